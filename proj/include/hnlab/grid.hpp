#pragma once

// Flat-torus grid and the field containers that live on it.
//
// Sites are (ix, iy) with 0 <= ix, iy < n, stored row-major as ix * n + iy.
// A U(1) link U_mu(x) transports from x to x + mu; a section value at
// x + mu is brought back to x by conj(U_mu(x)). With that convention the
// plaquette angle arg(U_x(x) U_y(x+x) conj(U_x(x+y)) conj(U_y(x))) sums to
// 2*pi*degree and positive degree carries holomorphic sections.

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace hnlab {

using cplx = std::complex<double>;

class Grid {
public:
    Grid(int n, double volume);

    int n() const noexcept { return n_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_) * n_; }
    double volume() const noexcept { return volume_; }
    double side() const noexcept { return side_; }
    double spacing() const noexcept { return spacing_; }
    /// Area weight of one site in L^2 sums.
    double cell_area() const noexcept { return spacing_ * spacing_; }

    std::size_t index(int ix, int iy) const noexcept {
        const int x = ((ix % n_) + n_) % n_;
        const int y = ((iy % n_) + n_) % n_;
        return static_cast<std::size_t>(x) * n_ + y;
    }
    int ix(std::size_t k) const noexcept { return static_cast<int>(k / n_); }
    int iy(std::size_t k) const noexcept { return static_cast<int>(k % n_); }
    double x(std::size_t k) const noexcept { return ix(k) * spacing_; }
    double y(std::size_t k) const noexcept { return iy(k) * spacing_; }

    bool operator==(const Grid& o) const noexcept { return n_ == o.n_ && volume_ == o.volume_; }
    bool operator!=(const Grid& o) const noexcept { return !(*this == o); }

private:
    int n_;
    double volume_;
    double side_;
    double spacing_;
};

Grid make_grid(int n, double volume);

struct ScalarField {
    Grid grid;
    std::vector<double> values;

    explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}

    double mean() const;
    /// sum over sites weighted by the cell area
    double integral() const;
    double sup_norm() const;
};

class LinkField {
public:
    LinkField(const Grid& grid, int degree, std::vector<cplx> ux, std::vector<cplx> uy);

    const Grid& grid() const noexcept { return grid_; }
    int degree() const noexcept { return degree_; }
    const std::vector<cplx>& ux() const noexcept { return ux_; }
    const std::vector<cplx>& uy() const noexcept { return uy_; }

    /// Plaquette angle in (-pi, pi] at the cell with lower-left corner k.
    double plaquette_angle(std::size_t k) const;
    double total_flux() const;

    /// conj(U_x(k)) s(k + x), and the adjoint U_x(k - x) w(k - x); same for y.
    void shift_x(const cplx* in, cplx* out) const;
    void shift_x_adj(const cplx* in, cplx* out) const;
    void shift_y(const cplx* in, cplx* out) const;
    void shift_y_adj(const cplx* in, cplx* out) const;

private:
    Grid grid_;
    int degree_;
    std::vector<cplx> ux_;
    std::vector<cplx> uy_;
};

using LinkPtr = std::shared_ptr<const LinkField>;

/// Section of the line bundle described by `link` (or a (0,1)-form with
/// values in it, when produced by the Dolbeault operator).
struct SectionField {
    LinkPtr link;
    std::vector<cplx> values;

    explicit SectionField(LinkPtr l) : link(std::move(l)), values(link->grid().size()) {}
    SectionField(LinkPtr l, std::vector<cplx> v);

    const Grid& grid() const { return link->grid(); }
    double norm() const; ///< L^2 norm with cell-area weight
};

cplx inner(const SectionField& a, const SectionField& b);

} // namespace hnlab

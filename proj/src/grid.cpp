#include "hnlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hnlab {

Grid::Grid(int n, double volume) : n_(n), volume_(volume) {
    if (n < 8 || (n & (n - 1)) != 0)
        throw std::invalid_argument("grid size must be a power of two >= 8, got " + std::to_string(n));
    if (!(volume > 0.0) || !std::isfinite(volume))
        throw std::invalid_argument("grid volume must be positive");
    side_ = std::sqrt(volume);
    spacing_ = side_ / n;
}

Grid make_grid(int n, double volume) { return Grid(n, volume); }

double ScalarField::mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double ScalarField::integral() const { return mean() * grid.volume(); }

double ScalarField::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

LinkField::LinkField(const Grid& grid, int degree, std::vector<cplx> ux, std::vector<cplx> uy)
    : grid_(grid), degree_(degree), ux_(std::move(ux)), uy_(std::move(uy)) {
    if (ux_.size() != grid_.size() || uy_.size() != grid_.size())
        throw std::invalid_argument("link arrays do not match the grid");
}

double LinkField::plaquette_angle(std::size_t k) const {
    const int i = grid_.ix(k);
    const int j = grid_.iy(k);
    const cplx u = ux_[k] * uy_[grid_.index(i + 1, j)] * std::conj(ux_[grid_.index(i, j + 1)]) *
                   std::conj(uy_[k]);
    return std::arg(u);
}

double LinkField::total_flux() const {
    double s = 0.0;
    for (std::size_t k = 0; k < grid_.size(); ++k) s += plaquette_angle(k);
    return s;
}

// Row-major ix * n + iy: +x is a stride of n, +y a stride of 1 with wrap.
void LinkField::shift_x(const cplx* in, cplx* out) const {
    const int n = grid_.n();
    const std::size_t N = grid_.size();
    for (std::size_t k = 0; k < N; ++k) {
        const std::size_t kx = (k + n) % N;
        out[k] = std::conj(ux_[k]) * in[kx];
    }
}

void LinkField::shift_x_adj(const cplx* in, cplx* out) const {
    const int n = grid_.n();
    const std::size_t N = grid_.size();
    for (std::size_t k = 0; k < N; ++k) {
        const std::size_t km = (k + N - n) % N;
        out[k] = ux_[km] * in[km];
    }
}

void LinkField::shift_y(const cplx* in, cplx* out) const {
    const int n = grid_.n();
    for (int i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const std::size_t k = row + j;
            out[k] = std::conj(uy_[k]) * in[row + (j + 1) % n];
        }
    }
}

void LinkField::shift_y_adj(const cplx* in, cplx* out) const {
    const int n = grid_.n();
    for (int i = 0; i < n; ++i) {
        const std::size_t row = static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const std::size_t km = row + (j + n - 1) % n;
            out[row + j] = uy_[km] * in[km];
        }
    }
}

SectionField::SectionField(LinkPtr l, std::vector<cplx> v) : link(std::move(l)), values(std::move(v)) {
    if (values.size() != link->grid().size())
        throw std::invalid_argument("section values do not match the grid");
}

double SectionField::norm() const { return std::sqrt(std::real(inner(*this, *this))); }

cplx inner(const SectionField& a, const SectionField& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("inner product across different grids");
    cplx s = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) s += std::conj(a.values[k]) * b.values[k];
    return s * a.grid().cell_area();
}

} // namespace hnlab

#include "hnlab/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hnlab {

struct Spectral::Impl {
    Grid grid;
    fftw_complex* buf = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
    std::vector<double> k2; // |k|^2 per mode, same layout as sites

    explicit Impl(const Grid& g) : grid(g) {
        const int n = g.n();
        buf = fftw_alloc_complex(g.size());
        if (!buf) throw std::bad_alloc();
        forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
        backward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        k2.resize(g.size());
        const double dk = 2.0 * std::numbers::pi / g.side();
        auto wave = [n](int m) { return m <= n / 2 ? m : m - n; };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double kx = dk * wave(i);
                const double ky = dk * wave(j);
                k2[static_cast<std::size_t>(i) * n + j] = kx * kx + ky * ky;
            }
    }

    ~Impl() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        if (buf) fftw_free(buf);
    }
};

Spectral::Spectral(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {}
Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

const Grid& Spectral::grid() const { return impl_->grid; }

ScalarField Spectral::apply_symbol(const ScalarField& f,
                                   const std::function<double(double)>& symbol) const {
    if (f.grid != impl_->grid) throw std::invalid_argument("field grid does not match FFT workspace");
    const std::size_t N = f.values.size();
    fftw_complex* b = impl_->buf;
    for (std::size_t k = 0; k < N; ++k) {
        b[k][0] = f.values[k];
        b[k][1] = 0.0;
    }
    fftw_execute(impl_->forward);
    const double scale = 1.0 / static_cast<double>(N);
    for (std::size_t k = 0; k < N; ++k) {
        const double s = symbol(impl_->k2[k]) * scale;
        b[k][0] *= s;
        b[k][1] *= s;
    }
    fftw_execute(impl_->backward);
    ScalarField out(f.grid);
    for (std::size_t k = 0; k < N; ++k) out.values[k] = b[k][0];
    return out;
}

ScalarField Spectral::laplacian(const ScalarField& f) const {
    return apply_symbol(f, [](double k2) { return -k2; });
}

ScalarField Spectral::poisson_solve(const ScalarField& f) const {
    const double m = f.mean();
    if (std::abs(m) > 1e-12 * std::max(1.0, f.sup_norm()))
        throw std::domain_error("solvability violated: source has nonzero mean " + std::to_string(m));
    return apply_symbol(f, [](double k2) { return k2 == 0.0 ? 0.0 : -1.0 / k2; });
}

ScalarField poisson_solve(const ScalarField& f) { return Spectral(f.grid).poisson_solve(f); }
ScalarField spectral_laplacian(const ScalarField& f) { return Spectral(f.grid).laplacian(f); }

} // namespace hnlab

#pragma once

#include "hnlab/grid.hpp"

#include <functional>
#include <memory>

namespace hnlab {

/// FFT workspace for periodic scalar fields on one grid. Owns its FFTW plans;
/// not safe to share between threads.
class Spectral {
public:
    explicit Spectral(const Grid& grid);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;
    Spectral(Spectral&&) noexcept;
    Spectral& operator=(Spectral&&) noexcept;

    const Grid& grid() const;

    /// Multiplies the Fourier coefficients by symbol(|k|^2) and transforms back.
    ScalarField apply_symbol(const ScalarField& f, const std::function<double(double)>& symbol) const;

    /// Laplacian with symbol -|k|^2.
    ScalarField laplacian(const ScalarField& f) const;

    /// Zero-mean u with laplacian(u) = f. Throws if mean(f) != 0.
    ScalarField poisson_solve(const ScalarField& f) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

ScalarField poisson_solve(const ScalarField& f);
ScalarField spectral_laplacian(const ScalarField& f);

} // namespace hnlab

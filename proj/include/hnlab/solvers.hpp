#pragma once

// Hermitian-Einstein, vortex and coupled-vortex solves on the flat torus,
// the t-sweep for extensions and the inf(M) estimator.

#include "hnlab/exact_stability.hpp"
#include "hnlab/grid.hpp"
#include "hnlab/hermitian_fields.hpp"

#include <optional>
#include <vector>

namespace hnlab {

struct SolverConfig {
    double tol = 1e-10; ///< sup-norm residual target
    int max_iter = 50;
    double damping = 1.0;

    void validate() const;
};

/// Solution of -kappa Lap u + w e^{2u} = f by damped Newton.
struct NewtonReport {
    ScalarField u;
    int iterations = 0;
    std::vector<double> residual_history; ///< sup-norm, one entry per iterate
    double min_ritz = 0.0;                ///< smallest Ritz value of the preconditioned Jacobian seen
    int linear_iterations = 0;
};

NewtonReport kazdan_warner_newton(double kappa, const ScalarField& w, const ScalarField& f,
                                  const SolverConfig& cfg);

struct HeSolution {
    ScalarField psi;
    double residual = 0.0; ///< sup |Phi(psi) - target|
};

HeSolution he_line_solve(long degree, const std::optional<ScalarField>& target, const Grid& grid,
                         const SolverConfig& cfg = {});

struct VortexSolution {
    ScalarField psi;
    int iterations = 0;
    std::vector<double> residual_history;
    double residual = 0.0;
    double section_norm_h = 0.0;     ///< integral of |phi0|^2 e^{2 psi}
    double identity_residual = 0.0;  ///< |deg + norm_h / 2pi - tau vol|
    double min_ritz = 0.0;
    double dbar_residual = 0.0;      ///< ||dbar phi0||
};

VortexSolution vortex_solve(long degree, const SectionField& phi0, double tau, const Grid& grid,
                            const SolverConfig& cfg = {});

struct CoupledVortexSolution {
    ScalarField psi1;
    ScalarField psi2;
    double tau = 0.0;
    double tau_prime = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;
    double residual1 = 0.0; ///< sup residual of the first equation
    double residual2 = 0.0;
    double section_norm_h = 0.0;
    double identity1 = 0.0; ///< |d1 + norm_h/2pi - tau vol|
    double identity2 = 0.0; ///< |d2 - norm_h/2pi - tau' vol|
    double phi1_margin = 0.0; ///< min(tau - Phi1)
    double phi2_margin = 0.0; ///< min(Phi2 - tau')
    double min_ritz = 0.0;
};

CoupledVortexSolution coupled_vortex_solve(long d1, long d2, const SectionField& phi0, double tau,
                                           const Grid& grid, const SolverConfig& cfg = {});

struct SweepPoint {
    double t = 0.0;
    double deviation = 0.0;  ///< sup operator-norm distance to diag(mu1, mu2)
    double offdiag_sup = 0.0;
    double m_achieved = 0.0; ///< max eigenvalue over sites
    double ym_energy = 0.0;
    double domination_margin = 0.0; ///< dominated_by(F, m_achieved, upper)
    bool guan_consistent = false;   ///< guan_bound_check against the exact witness slopes
};

struct SweepReport {
    long d1 = 0;
    long d2 = 0;
    std::vector<SweepPoint> points;
    double fitted_exponent = 0.0;
    double fit_intercept = 0.0;
    double fit_residual = 0.0; ///< rms of the log-log fit
    int fit_points = 0;
    double harmonic_residual = 0.0;
    double beta_sup = 0.0; ///< sup |beta_h|
    bool monotone = false; ///< D nonincreasing as t decreases
};

SweepReport theorem5_sweep(long d1, long d2, const SectionField& beta_raw, const std::vector<double>& t_values,
                           const Grid& grid, const SolverConfig& cfg = {});

/// Least squares of log y on log x over points with y >= floor.
struct PowerFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double rms = 0.0;
    int used = 0;
};
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double floor);

struct InfMReport {
    Rational mu1;
    std::vector<double> t_values;
    std::vector<double> m_values;
    bool attained = false;
    std::vector<double> halving_ratios; ///< (m(t_{i+1}) - mu1) / (m(t_i) - mu1)
    std::vector<double> domination_margins;
    bool layers_agree = false;
};

/// beta defaults to the constant 1 section for nonsplit equal-degree models.
InfMReport inf_m_estimate(const BundleModel& model, const std::vector<double>& t_values, const Grid& grid,
                          const SolverConfig& cfg = {}, const std::optional<SectionField>& beta = std::nullopt);

} // namespace hnlab

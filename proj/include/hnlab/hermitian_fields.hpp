#pragma once

// Curvature densities (i/2pi) Lambda F for line bundles and rank-2
// extensions on the flat torus.
//
// Conventions (sheet version below, embedded in every report):
//   H = H0 exp(2 psi),  Phi = deg/vol - (1/2pi) Lap psi,
//   i Lambda(beta ^ beta*) = -|beta|^2,
//   beta is stored in the unit coframe, so |beta|_h^2 = |v|^2 exp(2(psi1 - psi2)).

#include "hnlab/exact_stability.hpp"
#include "hnlab/grid.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace hnlab {

inline constexpr const char* kConventionSheet = "hnlab-conventions/2";

struct MetricData {
    int rank = 1;
    ScalarField psi1;
    std::optional<ScalarField> psi2;
    std::optional<SectionField> beta; ///< (0,1)-form in Hom(L2, L1), twist d1 - d2
    double t = 0.0;

    static MetricData line(ScalarField psi);
    static MetricData extension(ScalarField psi1, ScalarField psi2, SectionField beta, double t);
    const Grid& grid() const { return psi1.grid; }
};

/// Pointwise Hermitian matrices; rank-1 fields use the (0,0) entry only.
struct CurvatureField {
    Grid grid;
    int rank = 1;
    std::vector<Eigen::Matrix2cd> values;

    CurvatureField(const Grid& g, int r);
    ScalarField entry(int i, int j) const; ///< real part of entry (i, j)
    ScalarField trace() const;
    /// mean(trace) * volume, the discrete Chern-Weil degree.
    double chern_weil_degree() const;
    double offdiag_sup() const;
};

CurvatureField line_curvature(long degree, const ScalarField& psi);
ScalarField line_density(long degree, const ScalarField& psi);

/// Block formula for the extension 0 -> L1 -> E -> L2 -> 0 with metric
/// K = h1 + h2 and second fundamental form t * beta.
CurvatureField extension_curvature(long d1, long d2, const MetricData& metric);

struct EigRange {
    double min = 0.0;
    double max = 0.0;
    ScalarField lambda_min;
    ScalarField lambda_max;
};

EigRange eig_range(const CurvatureField& f);

struct Domination {
    bool holds = false;
    double margin = 0.0; ///< m - max(lambda) (upper) or min(lambda) - m (lower)
};

Domination dominated_by(const CurvatureField& f, double m, BoundSide side);

/// H -> g^* H g for g = diag(1, s): psi2 shifts by log s.
MetricData transport_metric(const MetricData& metric, double s);
/// dbar -> g dbar g^{-1} for g = diag(1, s): the extension class scales by 1/s.
MetricData transform_structure(const MetricData& metric, double s);
/// Sup over sites of the eigenvalue discrepancy between g F_{dbar, H_g} g^{-1}
/// and F_{g dbar, H}; the two fields are compared through conjugation invariants.
double gauge_transport_check(const CurvatureField& transformed, const CurvatureField& metric);

CurvatureField dual_curvature(const CurvatureField& f);

/// Squared L^2 norm of F - mu I with cell-area weights.
double ym_energy(const CurvatureField& f, double mu);

} // namespace hnlab

#pragma once

// Lattice Dolbeault operators on a flat torus with a U(1) link field.
//
// The discrete dbar lives on cells: with T_x s = conj(U_x) s(x + x^),
//   Dx = (1/2h) (1 + T_y)(T_x - 1),   Dy = (1/2h) (1 + T_x)(T_y - 1),
//   dbar = (Dx + i Dy) / 2,
// and the output value of a cell is stored at its lower-left site. This is a
// centred second-order stencil whose only spurious zero sits at momentum
// (pi, pi) and carries the opposite index; holo_sections filters it out.

#include "hnlab/grid.hpp"

#include <cstdint>
#include <vector>

namespace hnlab {

/// Constant-curvature connection of the given degree (uniform plaquette flux).
LinkPtr background_connection(const Grid& grid, int degree);

SectionField covariant_dbar(const LinkField& link, const SectionField& s);
/// L^2 adjoint of covariant_dbar (cell-area weights cancel).
SectionField dbar_adjoint(const LinkField& link, const SectionField& w);

/// Site-centred covariant (1,0) derivative (Dx^c - i Dy^c)/2 with central differences.
SectionField covariant_d_central(const LinkField& link, const SectionField& w);

/// 4 s - T_x s - T_x^* s - T_y s - T_y^* s, in lattice units (spectrum in [0, 8]).
SectionField lattice_laplacian(const LinkField& link, const SectionField& s);

// Raw-array kernels used by the iterative solvers (length grid.size()).
void apply_dbar(const LinkField& link, const cplx* in, cplx* out);
void apply_dbar_adjoint(const LinkField& link, const cplx* in, cplx* out);
void apply_lattice_laplacian(const LinkField& link, const cplx* in, cplx* out);

struct HarmonicOptions {
    double tol = 1e-12; ///< residual of the normal equations relative to max(||dbar^* beta||, ||beta||/h)
    int max_iter = 20000;
};

struct HarmonicProjection {
    SectionField beta;          ///< harmonic representative
    double adjoint_residual;    ///< ||dbar^* beta_h||_{L^2}
    int iterations;
};

/// beta - dbar(alpha) with alpha minimizing the L^2 norm (CG on the normal equations).
HarmonicProjection harmonic_project(const SectionField& beta, const HarmonicOptions& opts = {});

struct SectionOptions {
    int extra = 6;               ///< Ritz vectors beyond |degree|
    double min_gap = 10.0;       ///< required ratio first-rejected / last-kept
    double resolution_cut = 4.0; ///< lattice-Laplacian quotient separating doublers
    std::uint64_t seed = 0x5eed;
};

struct HoloSections {
    std::vector<SectionField> sections; ///< L^2-orthonormal
    std::vector<double> singular_values; ///< lowest computed, ascending
    std::size_t near_kernel = 0;         ///< size of the numerical kernel before filtering
    double gap_ratio = 0.0;
    std::vector<double> dbar_residuals;  ///< ||dbar s||_{L^2} per section
};

HoloSections holo_sections(const LinkPtr& link, const SectionOptions& opts = {});

struct DbarIndex {
    std::size_t kernel = 0;
    std::size_t cokernel = 0;
    double kernel_gap = 0.0;
    double cokernel_gap = 0.0;
    long index() const { return static_cast<long>(kernel) - static_cast<long>(cokernel); }
};

DbarIndex dbar_index(const LinkPtr& link, const SectionOptions& opts = {});

} // namespace hnlab

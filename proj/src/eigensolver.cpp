#include "hnlab/eigensolver.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace hnlab {

namespace {

Eigen::MatrixXcd orthonormalize(const Eigen::MatrixXcd& x) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(x);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(x.rows(), x.cols());
}

// Scaled Chebyshev filter damping [cut, upper] and amplifying below cut.
void chebyshev_filter(const BlockOperator& op, Eigen::MatrixXcd& x, int degree, double low,
                      double cut, double upper) {
    const double e = 0.5 * (upper - cut);
    const double c = 0.5 * (upper + cut);
    double sigma = e / (low - c);
    const double sigma1 = sigma;
    Eigen::MatrixXcd ax(x.rows(), x.cols());
    op(x, ax);
    Eigen::MatrixXcd y = (ax - c * x) * (sigma1 / e);
    for (int i = 2; i <= degree; ++i) {
        const double sigma_next = 1.0 / (2.0 / sigma1 - sigma);
        op(y, ax);
        Eigen::MatrixXcd next = (ax - c * y) * (2.0 * sigma_next / e) - (sigma * sigma_next) * x;
        x = std::move(y);
        y = std::move(next);
        sigma = sigma_next;
    }
    x = std::move(y);
}

} // namespace

EigenPairs lowest_eigenpairs(const BlockOperator& op, Eigen::Index dim, int k, double upper_bound,
                             const SubspaceOptions& opts) {
    if (k <= 0 || k > dim) throw std::invalid_argument("requested eigenpair count out of range");
    if (!(upper_bound > 0.0)) throw std::invalid_argument("spectral upper bound must be positive");

    // Guard vectors keep the filter cut above the wanted cluster.
    const Eigen::Index m = std::min<Eigen::Index>(dim, 2 * k + opts.guard);
    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd x(dim, m);
    for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index i = 0; i < dim; ++i) x(i, j) = {gauss(rng), gauss(rng)};

    // Dense fallback for tiny problems.
    if (dim <= 4 * m) {
        Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(dim, dim);
        Eigen::MatrixXcd a(dim, dim);
        op(eye, a);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()));
        EigenPairs out;
        out.values = es.eigenvalues().head(k);
        out.vectors = es.eigenvectors().leftCols(k);
        out.residuals = Eigen::VectorXd::Zero(k);
        out.converged = true;
        return out;
    }

    const double target = opts.tol * upper_bound;
    Eigen::MatrixXcd ax(dim, m);
    EigenPairs out;
    for (int pass = 0; pass < opts.max_passes; ++pass) {
        Eigen::MatrixXcd q = orthonormalize(x);
        op(q, ax);
        Eigen::MatrixXcd h = q.adjoint() * ax;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()));
        x = q * es.eigenvectors();
        ax = ax * es.eigenvectors();
        out.values = es.eigenvalues().head(k);
        out.vectors = x.leftCols(k);
        out.residuals.resize(k);
        for (int j = 0; j < k; ++j) out.residuals(j) = (ax.col(j) - out.values(j) * x.col(j)).norm();
        out.passes = pass + 1;
        if (out.residuals.maxCoeff() <= target) {
            out.converged = true;
            return out;
        }
        const double cut = std::min(es.eigenvalues()(m - 1), upper_bound * 0.999);
        const double low = std::min(0.0, out.values(0));
        chebyshev_filter(op, x, opts.degree, low, cut, upper_bound);
    }
    return out;
}

} // namespace hnlab

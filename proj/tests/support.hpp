#pragma once

// Generators and small helpers shared by the test binaries. All randomness is
// std::mt19937_64 with fixed seeds so every run sees the same cases.

#include "hnlab/exact_stability.hpp"
#include "hnlab/grid.hpp"
#include "hnlab/torus_lattice.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace hnlab::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline std::int64_t uniform_int(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

inline BundleModel random_direct_sum(std::mt19937_64& rng, int max_rank = 6, std::int64_t max_deg = 9) {
    DirectSum s;
    const int r = static_cast<int>(uniform_int(rng, 1, max_rank));
    for (int i = 0; i < r; ++i) s.degrees.push_back(uniform_int(rng, -max_deg, max_deg));
    return BundleModel(s);
}

inline BundleModel random_ext2(std::mt19937_64& rng, std::int64_t max_deg = 9) {
    return BundleModel(Ext2{uniform_int(rng, -max_deg, max_deg), uniform_int(rng, -max_deg, max_deg),
                            uniform_int(rng, 0, 1) == 1});
}

inline BundleModel random_bundle(std::mt19937_64& rng) {
    return uniform_int(rng, 0, 2) == 0 ? random_ext2(rng) : random_direct_sum(rng);
}

/// Random rank-2 model with a [phi] degree that a saturated line subsheaf can
/// actually have: for a split sum (or an extension that splits) either the top
/// summand or anything up to the bottom one; for a nonsplit semistable
/// extension anything up to floor(mu).
struct RankTwoPair {
    BundleModel bundle;
    std::int64_t phi_deg;
    std::int64_t top;    ///< larger summand degree (split cases)
    std::int64_t bottom; ///< smaller summand degree (split cases)
    bool split;
};

inline RankTwoPair random_rank2_pair(std::mt19937_64& rng, std::int64_t max_deg = 9) {
    const std::int64_t a = uniform_int(rng, -max_deg, max_deg);
    const std::int64_t b = uniform_int(rng, -max_deg, max_deg);
    const int kind = static_cast<int>(uniform_int(rng, 0, 2));
    if (kind == 2 && a <= b) {
        const std::int64_t total = a + b;
        const std::int64_t fl = total >= 0 ? total / 2 : -((-total + 1) / 2);
        return {BundleModel(Ext2{a, b, true}), uniform_int(rng, fl - 6, fl), 0, 0, false};
    }
    BundleModel bundle = kind == 0 ? BundleModel(DirectSum{{a, b}}) : BundleModel(Ext2{a, b, kind == 2});
    const std::int64_t top = std::max(a, b), bottom = std::min(a, b);
    const std::int64_t p = uniform_int(rng, 0, 3) == 0 ? top : uniform_int(rng, bottom - 6, bottom);
    return {bundle, p, top, bottom, true};
}

inline Rational random_rational(std::mt19937_64& rng, long range = 20, long max_den = 12) {
    Rational q(uniform_int(rng, -range * max_den, range * max_den), uniform_int(rng, 1, max_den));
    q.canonicalize();
    return q;
}

/// Smooth zero-mean potential made of a few random Fourier modes.
inline ScalarField random_potential(const Grid& g, std::mt19937_64& rng, double amp = 0.3, int modes = 3) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ScalarField f(g);
    for (int a = -modes; a <= modes; ++a)
        for (int b = -modes; b <= modes; ++b) {
            if (a == 0 && b == 0) continue;
            const double c = amp * u(rng) / (a * a + b * b), ph = kTwoPi * u(rng);
            for (std::size_t k = 0; k < g.size(); ++k)
                f.values[k] += c * std::cos(kTwoPi * (a * g.x(k) + b * g.y(k)) / g.side() + ph);
        }
    const double m = f.mean();
    for (double& v : f.values) v -= m;
    return f;
}

inline SectionField random_section(const LinkPtr& link, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    SectionField s(link);
    for (auto& z : s.values) z = {nd(rng), nd(rng)};
    return s;
}

inline double sup_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const cplx& z : v) m = std::max(m, std::abs(z));
    return m;
}

inline double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace hnlab::test

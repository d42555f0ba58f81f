#pragma once

// Exact slopes, Harder-Narasimhan data and tau-stability criteria for
// bundles, holomorphic pairs and triples. Everything here is rational
// arithmetic; no floating point enters a comparison.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hnlab {

using Rational = mpq_class;

/// Exact fraction string, "7/3" or "2".
std::string to_string(const Rational& q);
/// Parses "7/3", "-2", "0.25" into a canonical rational.
Rational parse_rational(const std::string& text);
/// Every finite double is a dyadic rational; this returns it exactly.
Rational exact_from_double(double x);

struct CurveModel {
    unsigned genus = 1;
    Rational volume = 1;
};

struct DirectSum {
    std::vector<std::int64_t> degrees;
};

/// Rank-2 extension 0 -> L_sub -> E -> L_quot -> 0.
struct Ext2 {
    std::int64_t d_sub = 0;
    std::int64_t d_quot = 0;
    bool class_nonzero = false;
};

class BundleModel {
public:
    explicit BundleModel(DirectSum sum);
    explicit BundleModel(Ext2 ext);

    /// Mini-language: "sum:3,3,1", "ext2:1,0,nz", "ext2:0,0,z".
    static BundleModel parse(const std::string& text);

    int rank() const;
    std::int64_t degree() const;
    bool is_direct_sum() const { return std::holds_alternative<DirectSum>(variant_); }
    const DirectSum* direct_sum() const { return std::get_if<DirectSum>(&variant_); }
    const Ext2* ext2() const { return std::get_if<Ext2>(&variant_); }

    /// Dual model: degrees negate; for an extension the sub and quotient swap.
    BundleModel dual() const;
    std::string to_string() const;

    bool operator==(const BundleModel& other) const;

private:
    std::variant<DirectSum, Ext2> variant_;
};

struct HNQuotient {
    int rank = 0;
    Rational slope;
};

struct HNData {
    std::vector<HNQuotient> quotients;
    Rational mu1;
};

Rational slope(int rank, const Rational& degree, const CurveModel& curve = {});

HNData hn_filtration(const BundleModel& bundle, const CurveModel& curve = {});
Rational mu1(const BundleModel& bundle, const CurveModel& curve = {});
Rational mu1_dual(const BundleModel& bundle, const CurveModel& curve = {});

/// Largest degree of a line subbundle allowed by the model (rank 2 only).
std::int64_t max_line_subdegree(const BundleModel& bundle);

struct Witness {
    int rank = 0;
    std::int64_t degree = 0;
    bool contains_phi = false;
};

struct PairModel {
    BundleModel bundle;
    std::int64_t phi_sub_degree = 0;
    std::optional<std::vector<Witness>> witnesses;

    PairModel(BundleModel b, std::int64_t phi_deg,
              std::optional<std::vector<Witness>> w = std::nullopt);
};

struct Violation {
    Witness witness;
    int condition = 0; ///< 1: slope >= tau, 2: quotient slope <= tau
    Rational value;    ///< the offending slope
};

struct PairStability {
    bool stable = false;
    std::vector<Violation> violations;
    std::vector<Witness> witnesses_used;
};

/// Witness set actually evaluated by tau_stable_pair: E itself, then either
/// the supplied witnesses or (rank 2) the HN sub and the subsheaf [phi].
std::vector<Witness> effective_witnesses(const PairModel& pair, const CurveModel& curve = {});

PairStability tau_stable_pair(const PairModel& pair, const Rational& tau,
                              const CurveModel& curve = {});

Rational pair_inf(const PairModel& pair, const CurveModel& curve = {});

struct OpenInterval {
    Rational lo;
    Rational hi;
};

/// (mu1, inf(E, phi)) when nonempty.
std::optional<OpenInterval> tau_interval(const PairModel& pair, const CurveModel& curve = {});
std::string to_string(const std::optional<OpenInterval>& interval);

Rational sigma_of_tau(int rank, std::int64_t degree, const Rational& tau,
                      const CurveModel& curve = {});
Rational tau_of_sigma(int rank, std::int64_t degree, const Rational& sigma,
                      const CurveModel& curve = {});

struct Subtriple {
    int r1 = 0;
    std::int64_t d1 = 0;
    int r2 = 0;
    std::int64_t d2 = 0;
};

struct TripleModel {
    int r1 = 1;
    std::int64_t d1 = 0;
    int r2 = 1;
    std::int64_t d2 = 0;
    std::vector<Subtriple> witness_subtriples;
};

Rational theta_tau(const TripleModel& triple, const Subtriple& sub, const Rational& tau,
                   const CurveModel& curve = {});
Rational tau_prime_of_tau(const TripleModel& triple, const Rational& tau);

/// theta_tau < 0 on every proper witness subtriple.
bool triple_tau_stable(const TripleModel& triple, const Rational& tau,
                       const CurveModel& curve = {});

enum class BoundSide { upper, lower };

/// upper: every witness subsheaf slope <= m; lower: every quotient slope >= m.
bool guan_bound_check(const std::vector<Rational>& witness_slopes, const Rational& m,
                      BoundSide side);

} // namespace hnlab

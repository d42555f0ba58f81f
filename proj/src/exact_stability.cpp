#include "hnlab/exact_stability.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hnlab {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

std::int64_t parse_int(const std::string& text) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("not an integer: '" + text + "'");
    }
    if (used != text.size()) throw std::invalid_argument("not an integer: '" + text + "'");
    return v;
}

void require_volume(const CurveModel& curve) {
    if (curve.volume <= 0) throw std::invalid_argument("curve volume must be positive");
}

// (rank, degree) of the first HN term.
std::pair<int, std::int64_t> first_hn_term(const BundleModel& bundle) {
    if (const auto* s = bundle.direct_sum()) {
        const auto top = *std::max_element(s->degrees.begin(), s->degrees.end());
        const auto count = std::count(s->degrees.begin(), s->degrees.end(), top);
        return {static_cast<int>(count), top * count};
    }
    const Ext2& e = *bundle.ext2();
    if (!e.class_nonzero) {
        if (e.d_sub == e.d_quot) return {2, e.d_sub + e.d_quot};
        return {1, std::max(e.d_sub, e.d_quot)};
    }
    if (e.d_sub > e.d_quot) return {1, e.d_sub};
    return {2, e.d_sub + e.d_quot};
}

} // namespace

std::string to_string(const Rational& q) {
    Rational c = q;
    c.canonicalize();
    return c.get_str();
}

Rational parse_rational(const std::string& raw) {
    std::string text = raw;
    text.erase(std::remove_if(text.begin(), text.end(), ::isspace), text.end());
    if (text.empty()) throw std::invalid_argument("empty rational");
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        const auto num = parse_int(text.substr(0, slash));
        const auto den = parse_int(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + raw + "'");
        Rational q(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
        q.canonicalize();
        return q;
    }
    if (const auto dot = text.find('.'); dot != std::string::npos) {
        std::string whole = text.substr(0, dot);
        const std::string frac = text.substr(dot + 1);
        bool negative = !whole.empty() && whole[0] == '-';
        if (negative || (!whole.empty() && whole[0] == '+')) whole.erase(0, 1);
        if (whole.empty()) whole = "0";
        if (frac.empty() || !std::all_of(frac.begin(), frac.end(), ::isdigit) ||
            !std::all_of(whole.begin(), whole.end(), ::isdigit))
            throw std::invalid_argument("not a rational: '" + raw + "'");
        mpz_class num(whole + frac, 10);
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
        Rational q(negative ? mpz_class(-num) : num, den);
        q.canonicalize();
        return q;
    }
    return Rational(mpz_class(static_cast<long>(parse_int(text))));
}

Rational exact_from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite double has no rational value");
    Rational q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

BundleModel::BundleModel(DirectSum sum) : variant_(std::move(sum)) {
    if (std::get<DirectSum>(variant_).degrees.empty())
        throw std::invalid_argument("direct sum needs at least one summand");
}

BundleModel::BundleModel(Ext2 ext) : variant_(ext) {}

BundleModel BundleModel::parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("bundle model must look like 'sum:...' or 'ext2:...': " + text);
    const std::string kind = text.substr(0, colon);
    const auto parts = split(text.substr(colon + 1), ',');
    if (kind == "sum") {
        DirectSum s;
        for (const auto& p : parts) s.degrees.push_back(parse_int(p));
        return BundleModel(std::move(s));
    }
    if (kind == "ext2") {
        if (parts.size() != 3)
            throw std::invalid_argument("ext2 needs 'd_sub,d_quot,nz|z': " + text);
        Ext2 e;
        e.d_sub = parse_int(parts[0]);
        e.d_quot = parse_int(parts[1]);
        if (parts[2] == "nz")
            e.class_nonzero = true;
        else if (parts[2] == "z")
            e.class_nonzero = false;
        else
            throw std::invalid_argument("extension flag must be 'nz' or 'z': " + text);
        return BundleModel(e);
    }
    throw std::invalid_argument("unknown bundle kind '" + kind + "'");
}

int BundleModel::rank() const {
    if (const auto* s = direct_sum()) return static_cast<int>(s->degrees.size());
    return 2;
}

std::int64_t BundleModel::degree() const {
    if (const auto* s = direct_sum()) {
        std::int64_t total = 0;
        for (auto d : s->degrees) total += d;
        return total;
    }
    return ext2()->d_sub + ext2()->d_quot;
}

BundleModel BundleModel::dual() const {
    if (const auto* s = direct_sum()) {
        DirectSum out;
        for (auto d : s->degrees) out.degrees.push_back(-d);
        return BundleModel(std::move(out));
    }
    const Ext2& e = *ext2();
    return BundleModel(Ext2{-e.d_quot, -e.d_sub, e.class_nonzero});
}

std::string BundleModel::to_string() const {
    std::ostringstream out;
    if (const auto* s = direct_sum()) {
        out << "sum:";
        for (std::size_t i = 0; i < s->degrees.size(); ++i) out << (i ? "," : "") << s->degrees[i];
    } else {
        const Ext2& e = *ext2();
        out << "ext2:" << e.d_sub << ',' << e.d_quot << ',' << (e.class_nonzero ? "nz" : "z");
    }
    return out.str();
}

bool BundleModel::operator==(const BundleModel& other) const {
    if (is_direct_sum() != other.is_direct_sum()) return false;
    if (const auto* s = direct_sum()) return s->degrees == other.direct_sum()->degrees;
    const Ext2& a = *ext2();
    const Ext2& b = *other.ext2();
    return a.d_sub == b.d_sub && a.d_quot == b.d_quot && a.class_nonzero == b.class_nonzero;
}

Rational slope(int rank, const Rational& degree, const CurveModel& curve) {
    if (rank <= 0) throw std::invalid_argument("slope: rank must be positive");
    require_volume(curve);
    Rational out = degree / (rank * curve.volume);
    out.canonicalize();
    return out;
}

HNData hn_filtration(const BundleModel& bundle, const CurveModel& curve) {
    HNData hn;
    auto push = [&](int rank, std::int64_t degree) {
        hn.quotients.push_back({rank, slope(rank, Rational(static_cast<long>(degree)), curve)});
    };

    std::vector<std::int64_t> degrees;
    if (const auto* s = bundle.direct_sum()) {
        degrees = s->degrees;
    } else {
        const Ext2& e = *bundle.ext2();
        if (!e.class_nonzero) {
            degrees = {e.d_sub, e.d_quot};
        } else if (e.d_sub > e.d_quot) {
            // A nonsplit class cannot lower the destabilizing sub.
            push(1, e.d_sub);
            push(1, e.d_quot);
        } else {
            // Generic-extension model: no line subbundle above mu(E).
            push(2, e.d_sub + e.d_quot);
        }
    }

    if (!degrees.empty()) {
        std::sort(degrees.begin(), degrees.end(), std::greater<>());
        for (std::size_t i = 0; i < degrees.size();) {
            std::size_t j = i;
            while (j < degrees.size() && degrees[j] == degrees[i]) ++j;
            const int r = static_cast<int>(j - i);
            push(r, degrees[i] * r);
            i = j;
        }
    }
    hn.mu1 = hn.quotients.front().slope;
    return hn;
}

Rational mu1(const BundleModel& bundle, const CurveModel& curve) {
    return hn_filtration(bundle, curve).mu1;
}

Rational mu1_dual(const BundleModel& bundle, const CurveModel& curve) {
    return hn_filtration(bundle.dual(), curve).mu1;
}

std::int64_t max_line_subdegree(const BundleModel& bundle) {
    if (const auto* s = bundle.direct_sum())
        return *std::max_element(s->degrees.begin(), s->degrees.end());
    const Ext2& e = *bundle.ext2();
    if (!e.class_nonzero) return std::max(e.d_sub, e.d_quot);
    if (e.d_sub > e.d_quot) return e.d_sub;
    // floor of mu(E) for the semistable rule
    const std::int64_t total = e.d_sub + e.d_quot;
    return total >= 0 ? total / 2 : -((-total + 1) / 2);
}

PairModel::PairModel(BundleModel b, std::int64_t phi_deg, std::optional<std::vector<Witness>> w)
    : bundle(std::move(b)), phi_sub_degree(phi_deg), witnesses(std::move(w)) {
    if (phi_sub_degree > max_line_subdegree(bundle))
        throw std::invalid_argument("phi_sub_degree exceeds the largest line subbundle degree of " +
                                    bundle.to_string());
    if (witnesses) {
        for (const auto& x : *witnesses)
            if (x.rank <= 0 || x.rank >= bundle.rank())
                throw std::invalid_argument("witness rank must lie strictly between 0 and rank(E)");
    }
}

std::vector<Witness> effective_witnesses(const PairModel& pair, const CurveModel& curve) {
    (void)curve;
    const int R = pair.bundle.rank();
    std::vector<Witness> out;
    if (pair.witnesses) {
        out.push_back({R, pair.bundle.degree(), true});
        out.insert(out.end(), pair.witnesses->begin(), pair.witnesses->end());
        return out;
    }
    if (R != 2) throw std::invalid_argument("no witnesses: supply witness subsheaves for rank != 2");
    out.push_back({R, pair.bundle.degree(), true});
    const auto [r1, d1] = first_hn_term(pair.bundle);
    if (r1 < R) out.push_back({r1, d1, false});
    out.push_back({1, pair.phi_sub_degree, true});
    return out;
}

PairStability tau_stable_pair(const PairModel& pair, const Rational& tau, const CurveModel& curve) {
    const int R = pair.bundle.rank();
    const Rational total(static_cast<long>(pair.bundle.degree()));
    PairStability result;
    result.witnesses_used = effective_witnesses(pair, curve);
    for (const auto& w : result.witnesses_used) {
        const Rational mu_sub = slope(w.rank, Rational(static_cast<long>(w.degree)), curve);
        if (!(mu_sub < tau)) result.violations.push_back({w, 1, mu_sub});
        if (w.contains_phi && w.rank < R) {
            const Rational mu_quot =
                slope(R - w.rank, total - Rational(static_cast<long>(w.degree)), curve);
            if (!(mu_quot > tau)) result.violations.push_back({w, 2, mu_quot});
        }
    }
    result.stable = result.violations.empty();
    return result;
}

Rational pair_inf(const PairModel& pair, const CurveModel& curve) {
    const int R = pair.bundle.rank();
    const Rational total(static_cast<long>(pair.bundle.degree()));
    if (pair.witnesses) {
        std::optional<Rational> best;
        for (const auto& w : *pair.witnesses) {
            if (!w.contains_phi) continue;
            Rational q = slope(R - w.rank, total - Rational(static_cast<long>(w.degree)), curve);
            if (!best || q < *best) best = q;
        }
        if (best) return *best;
        if (R != 2) throw std::invalid_argument("pair_inf: no witness contains phi");
    }
    if (R != 2) throw std::invalid_argument("pair_inf: no witness contains phi");
    Rational out = 2 * slope(R, total, curve) -
                   slope(1, Rational(static_cast<long>(pair.phi_sub_degree)), curve);
    out.canonicalize();
    return out;
}

std::optional<OpenInterval> tau_interval(const PairModel& pair, const CurveModel& curve) {
    const Rational lo = mu1(pair.bundle, curve);
    const Rational hi = pair_inf(pair, curve);
    if (lo < hi) return OpenInterval{lo, hi};
    return std::nullopt;
}

std::string to_string(const std::optional<OpenInterval>& interval) {
    if (!interval) return "empty";
    return "(" + to_string(interval->lo) + ", " + to_string(interval->hi) + ")";
}

Rational sigma_of_tau(int rank, std::int64_t degree, const Rational& tau, const CurveModel& curve) {
    if (rank <= 0) throw std::invalid_argument("sigma_of_tau: rank must be positive");
    require_volume(curve);
    const Rational denom = (rank + 1) * tau - Rational(static_cast<long>(degree));
    if (denom <= 0) throw std::domain_error("sigma undefined for this tau");
    Rational out = 2 * curve.volume / denom;
    out.canonicalize();
    return out;
}

Rational tau_of_sigma(int rank, std::int64_t degree, const Rational& sigma, const CurveModel& curve) {
    if (rank <= 0) throw std::invalid_argument("tau_of_sigma: rank must be positive");
    if (sigma <= 0) throw std::domain_error("sigma must be positive");
    require_volume(curve);
    Rational out = (2 * curve.volume / sigma + Rational(static_cast<long>(degree))) / (rank + 1);
    out.canonicalize();
    return out;
}

Rational theta_tau(const TripleModel& t, const Subtriple& s, const Rational& tau,
                   const CurveModel& curve) {
    if (t.r1 < 1 || t.r2 < 1) throw std::invalid_argument("triple ranks must be >= 1");
    if (s.r1 < 0 || s.r2 < 0 || s.r1 > t.r1 || s.r2 > t.r2)
        throw std::invalid_argument("subtriple ranks out of range");
    if (s.r1 + s.r2 == 0) throw std::invalid_argument("subtriple must have positive total rank");

    const Rational mu_sub = slope(s.r1 + s.r2, Rational(static_cast<long>(s.d1 + s.d2)), curve);
    const Rational mu_all = slope(t.r1 + t.r2, Rational(static_cast<long>(t.d1 + t.d2)), curve);
    Rational weight(s.r2 * (t.r1 + t.r2), t.r2 * (s.r1 + s.r2));
    weight.canonicalize();
    Rational out = (mu_sub - tau) - weight * (mu_all - tau);
    out.canonicalize();
    return out;
}

Rational tau_prime_of_tau(const TripleModel& t, const Rational& tau) {
    if (t.r2 < 1) throw std::invalid_argument("triple ranks must be >= 1");
    Rational out = (Rational(static_cast<long>(t.d1 + t.d2)) - t.r1 * tau) / t.r2;
    out.canonicalize();
    return out;
}

bool triple_tau_stable(const TripleModel& triple, const Rational& tau, const CurveModel& curve) {
    if (triple.witness_subtriples.empty())
        throw std::invalid_argument("no witnesses: supply witness subtriples");
    for (const auto& s : triple.witness_subtriples) {
        if (s.r1 == triple.r1 && s.r2 == triple.r2) continue;
        if (!(theta_tau(triple, s, tau, curve) < 0)) return false;
    }
    return true;
}

bool guan_bound_check(const std::vector<Rational>& slopes, const Rational& m, BoundSide side) {
    return std::all_of(slopes.begin(), slopes.end(), [&](const Rational& s) {
        return side == BoundSide::upper ? s <= m : s >= m;
    });
}

} // namespace hnlab

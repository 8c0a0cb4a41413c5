#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace kirchhoff {

// Actions I_1..I_N; everything past N is invisible to the frequencies.
struct FreqContext {
    int N = 1;
    std::vector<double> I;  // I[d-1]

    FreqContext() = default;
    FreqContext(int N_, std::vector<double> I_) : N(N_), I(std::move(I_)) {
        if (N < 1) throw std::invalid_argument("FreqContext needs N >= 1");
        I.resize(static_cast<std::size_t>(N), 0.0);
        for (double x : I)
            if (!(x >= 0.0)) throw std::invalid_argument("actions must be nonnegative");
    }
    static FreqContext from_z(const ComplexSeq& z, int N) {
        std::vector<double> I(static_cast<std::size_t>(N));
        for (int d = 1; d <= N; ++d) I[d - 1] = std::norm(z(d));
        return FreqContext(N, std::move(I));
    }
    double action(int d) const { return (d >= 1 && d <= N) ? I[d - 1] : 0.0; }
};

struct NonResonanceParams {
    int r = 2;
    int N = 1;
    double gamma = 1e-3;
    WeightSpec weight = WeightSpec::sobolev(0.0);

    void validate() const {
        if (r < 2) throw std::invalid_argument("r must be >= 2");
        if (N < 1) throw std::invalid_argument("N must be >= 1");
        if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    }
};

inline double omega2(const FreqContext& ctx, int a) {
    if (a < 1 || a > ctx.N) return 0.0;
    return 0.25 * ctx.action(a);
}

inline double omega4_coupling(int a, int d) {
    double dd = d, aa = a;
    return 3.0 / dd + dd / (dd * dd - aa * aa);
}

inline double omega4(const FreqContext& ctx, int a) {
    if (a < 1) return 0.0;
    double tail = 0.0;
    for (int d = 1; d <= ctx.N; ++d) {
        if (d == a) continue;
        double Id = ctx.action(d);
        tail += Id * Id / (static_cast<double>(d) * d - static_cast<double>(a) * a);
    }
    tail *= a / 16.0;
    if (a > ctx.N) return tail;
    const double Ia = ctx.action(a);
    double mix = 0.0;
    for (int d = 1; d <= ctx.N; ++d)
        if (d != a) mix += omega4_coupling(a, d) * ctx.action(d);
    return -27.0 / (64.0 * a) * Ia * Ia - 0.125 * Ia * mix + tail;
}

// d omega4_a / d I_b
inline double domega4(const FreqContext& ctx, int a, int b) {
    if (a < 1 || b < 1 || b > ctx.N) return 0.0;
    const double aa = a, bb = b;
    if (a > ctx.N) return aa / 8.0 * ctx.action(b) / (bb * bb - aa * aa);
    if (b == a) {
        double mix = 0.0;
        for (int d = 1; d <= ctx.N; ++d)
            if (d != a) mix += omega4_coupling(a, d) * ctx.action(d);
        return -27.0 / (32.0 * aa) * ctx.action(a) - 0.125 * mix;
    }
    return -0.125 * omega4_coupling(a, b) * ctx.action(a) + aa / 8.0 * ctx.action(b) / (bb * bb - aa * aa);
}

enum class DivisorOrder { two, four };

namespace detail {
inline void require_nonnegative_delta(long D) {
    if (D < 0) throw std::domain_error("divisor needs Delta >= 0; conjugate the index first");
}
}  // namespace detail

inline double big_omega(DivisorOrder ord, const IndexVector& j, const FreqContext& ctx) {
    const long D = delta_of(j);
    detail::require_nonnegative_delta(D);
    auto om = [&](int a) { return ord == DivisorOrder::two ? omega2(ctx, a) : omega2(ctx, a) + omega4(ctx, a); };
    double acc = 0.0;
    for (auto& x : j)
        if (x.delta != 0) acc += x.delta * om(x.a);
    return 2.0 * (acc - om(static_cast<int>(D)));
}

// d Omega_j / d I_b
inline double dbig_omega(DivisorOrder ord, const IndexVector& j, const FreqContext& ctx, int b) {
    const long D = delta_of(j);
    detail::require_nonnegative_delta(D);
    auto dom = [&](int a) {
        double d2 = (a == b && a >= 1 && a <= ctx.N) ? 0.25 : 0.0;
        return ord == DivisorOrder::two ? d2 : d2 + domega4(ctx, a, b);
    };
    double acc = 0.0;
    for (auto& x : j)
        if (x.delta != 0) acc += x.delta * dom(x.a);
    return 2.0 * (acc - dom(static_cast<int>(D)));
}

inline IndexVector irr(const IndexVector& j, long delta_target) {
    if (delta_of(j) != delta_target) throw std::domain_error("irr: Delta does not match the target");
    // per mode: count of +1 and -1 entries, then cancel pairs
    std::map<int, std::pair<int, int>> cnt;
    for (auto& x : j) {
        if (x.delta == 1) ++cnt[x.a].first;
        else if (x.delta == -1) ++cnt[x.a].second;
    }
    IndexVector out;
    bool removed = delta_target <= 0;
    for (auto& [a, pm] : cnt) {
        int c = std::min(pm.first, pm.second);
        int plus = pm.first - c, minus = pm.second - c;
        if (!removed && a == delta_target && plus > 0) {
            --plus;
            removed = true;
        }
        for (int i = 0; i < minus; ++i) out.push_back({-1, a});
        for (int i = 0; i < plus; ++i) out.push_back({1, a});
    }
    return canonicalize(std::move(out));
}

inline int kappa(const IndexVector& j) {
    if (j.empty()) throw std::domain_error("kappa of an empty index vector");
    const long D = delta_of(j);
    detail::require_nonnegative_delta(D);
    int m = mu_min(j);
    if (D > 0) m = static_cast<int>(std::min<long>(m, D));
    return m;
}

inline bool is_irreducible_element(const IndexVector& j, int N) {
    if (j.size() < 2) return false;
    const long D = delta_of(j);
    if (D < 0 || D > N) return false;
    if (D == 0 && j.size() < 3) return false;
    for (auto& x : j)
        if (x.a > N) return false;
    return irr(j, D) == canonicalize(j);
}

namespace detail {

inline double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline void enum_rec(int N, int len, std::size_t pos, IndexVector& cur, std::vector<IndexVector>& out) {
    if (cur.size() == static_cast<std::size_t>(len)) {
        if (is_irreducible_element(cur, N)) out.push_back(cur);
        return;
    }
    // symbols in canonical order: (-1,a) before (1,a)
    for (std::size_t s = pos; s < 2 * static_cast<std::size_t>(N); ++s) {
        MonomialIndex m{(s % 2 == 0) ? -1 : 1, static_cast<int>(s / 2) + 1};
        // no conjugate pair inside an irreducible vector
        bool clash = false;
        for (auto& x : cur)
            if (x.a == m.a && x.delta == -m.delta) { clash = true; break; }
        if (clash) continue;
        cur.push_back(m);
        enum_rec(N, len, s, cur, out);
        cur.pop_back();
    }
}

}  // namespace detail

using IrrSet = std::shared_ptr<const std::vector<IndexVector>>;

inline constexpr double kEnumerationGuard = 1e7;

inline IrrSet enumerate_irr_indices(const NonResonanceParams& p) {
    p.validate();
    static std::mutex mu;
    static std::map<std::pair<int, int>, IrrSet> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(p.r, p.N);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    double candidates = 0.0;
    for (int l = 2; l <= p.r; ++l) candidates += detail::binom(2 * p.N + l - 1, l);
    if (candidates > kEnumerationGuard) throw std::length_error("irreducible index enumeration exceeds the size guard");
    auto out = std::make_shared<std::vector<IndexVector>>();
    IndexVector cur;
    for (int l = 2; l <= p.r; ++l) detail::enum_rec(p.N, l, 0, cur, *out);
    cache[key] = out;
    return out;
}

struct NonresonanceReport {
    bool in_set = false;
    std::string reason;          // empty when in_set
    double worst_ratio = std::numeric_limits<double>::infinity();  // min |Omega| / threshold
    double worst_ratio_omega2 = std::numeric_limits<double>::infinity();
    IndexVector witness;
    int witness_order = 0;       // 2 or 4
    double norm = 0.0;
};

// Frequencies for all a in 0..N at once, so the index loop is cheap.
struct FrequencyTable {
    FreqContext ctx;
    std::vector<double> w2, w24;
    explicit FrequencyTable(FreqContext c) : ctx(std::move(c)), w2(ctx.N + 1, 0.0), w24(ctx.N + 1, 0.0) {
        for (int a = 1; a <= ctx.N; ++a) {
            w2[a] = omega2(ctx, a);
            w24[a] = w2[a] + omega4(ctx, a);
        }
    }
    double om(DivisorOrder ord, long a) const {
        if (a <= ctx.N) return ord == DivisorOrder::two ? w2[a] : w24[a];
        return ord == DivisorOrder::two ? 0.0 : omega4(ctx, static_cast<int>(a));
    }
    double Omega(DivisorOrder ord, const IndexVector& j) const {
        long D = 0;
        double acc = 0.0;
        for (auto& x : j) {
            D += static_cast<long>(x.delta) * x.a;
            if (x.delta != 0) acc += x.delta * om(ord, x.a);
        }
        detail::require_nonnegative_delta(D);
        return 2.0 * (acc - om(ord, D));
    }
};

inline double threshold2(const IndexVector& j, double gamma, double znorm2, int N, const WeightSpec& w) {
    const int l = static_cast<int>(j.size());
    return gamma * znorm2 * std::pow(static_cast<double>(N), -4.0 * l - 2.0) / w.sq(kappa(j));
}

inline double threshold4(const IndexVector& j, double gamma, double znorm2, int N, const WeightSpec& w) {
    const int l = static_cast<int>(j.size());
    return gamma * znorm2 * std::pow(static_cast<double>(N), -4.0 * l - 2.0) *
           std::max(1.0 / w.sq(kappa(j)), gamma * znorm2);
}

// thresholds may be evaluated at a norm other than ||z|| (the perturbation lemma does this)
inline NonresonanceReport is_nonresonant(const ComplexSeq& z, const NonResonanceParams& p, double norm_override = -1.0) {
    NonresonanceReport rep;
    rep.norm = norm_override >= 0 ? norm_override : weighted_norm(z, p.weight);
    if (!(rep.norm > 0.0)) {
        rep.reason = "zero norm";
        return rep;
    }
    const double n2 = rep.norm * rep.norm;
    const FreqContext ctx = FreqContext::from_z(z, p.N);
    const FrequencyTable tab(ctx);
    auto set = enumerate_irr_indices(p);
    rep.in_set = true;
    for (auto& j : *set) {
        double r2 = std::abs(tab.Omega(DivisorOrder::two, j)) / threshold2(j, p.gamma, n2, p.N, p.weight);
        double r4 = std::abs(tab.Omega(DivisorOrder::four, j)) / threshold4(j, p.gamma, n2, p.N, p.weight);
        rep.worst_ratio_omega2 = std::min(rep.worst_ratio_omega2, r2);
        if (r2 < rep.worst_ratio) { rep.worst_ratio = r2; rep.witness = j; rep.witness_order = 2; }
        if (r4 < rep.worst_ratio) { rep.worst_ratio = r4; rep.witness = j; rep.witness_order = 4; }
    }
    if (!(rep.worst_ratio > 1.0)) {
        rep.in_set = false;
        rep.reason = "divisor below threshold";
    }
    return rep;
}

struct PerturbationReport {
    bool hypotheses = false;
    bool norm_cap = false;
    bool action_cap = false;
    double action_drift = 0.0;   // sup_{a<=N} w(a)^2 |I'_a - I_a|
    double action_bound = 0.0;
    bool conclusion = false;     // z' in U at gamma/2, thresholds at ||z'||
    bool conclusion_base_norm = false;  // same, thresholds at ||z||
};

inline PerturbationReport perturbation_stable(const ComplexSeq& z, const ComplexSeq& zp, const NonResonanceParams& p) {
    PerturbationReport r;
    const double nz = weighted_norm(z, p.weight), nzp = weighted_norm(zp, p.weight);
    r.norm_cap = nzp <= 4.0 * nz;
    for (int a = 1; a <= p.N; ++a)
        r.action_drift = std::max(r.action_drift, p.weight.sq(a) * std::abs(std::norm(zp(a)) - std::norm(z(a))));
    r.action_bound = p.gamma * p.gamma * nz * nz / (288.0 * (p.r + 1) * std::pow(static_cast<double>(p.N), 4.0 * p.r + 3.0));
    r.action_cap = r.action_drift <= r.action_bound;
    r.hypotheses = r.norm_cap && r.action_cap;
    NonResonanceParams half = p;
    half.gamma = p.gamma / 2;
    r.conclusion = is_nonresonant(zp, half).in_set;
    r.conclusion_base_norm = is_nonresonant(zp, half, nz).in_set;
    return r;
}

}  // namespace kirchhoff

#pragma once

// Exact derivatives of the divisors with respect to the actions, and the
// symbolic Lie bracket [X, Y] = DX[Y] - DY[X] on term maps.

#include <map>
#include <utility>
#include <vector>

#include "algebra.hpp"

namespace kirchhoff::nf {

struct HessEntry {
    int b, d;
    Rat v;
};

inline Rat coupling_q(int a, int d) {  // 3/d + d/(d^2 - a^2)
    return rat(3, d) + rat(d, d * d - a * a);
}

// Nonzero second derivatives d^2 omega4_a / dI_b dI_d for a truncation N.
inline std::vector<HessEntry> omega4_hessian(int a, int N) {
    std::vector<HessEntry> out;
    if (a < 1) return out;
    for (int d = 1; d <= N; ++d) {
        if (d == a) continue;
        out.push_back({d, d, rat(a, 8L * (d * d - a * a))});
    }
    if (a > N) return out;
    out.push_back({a, a, rat(-27, 32L * a)});
    for (int d = 1; d <= N; ++d) {
        if (d == a) continue;
        Rat c = -coupling_q(a, d) / 8;
        out.push_back({a, d, c});
        out.push_back({d, a, c});
    }
    return out;
}

// d omega4_a / dI_b as a linear form in I: map e -> coefficient of I_e
inline std::map<int, Rat> omega4_gradient_form(int a, int b, int N) {
    std::map<int, Rat> f;
    for (auto& h : omega4_hessian(a, N))
        if (h.b == b) f[h.d] += h.v;
    return f;
}

// Constant part of d Omega_D / dI_b (shared by both orders).
inline std::map<int, Rat> divisor_gradient_const(const IndexVector& D, int N) {
    std::map<int, Rat> g;
    for (auto& x : D)
        if (x.delta != 0 && x.a <= N) g[x.a] += Rat(x.delta, 2);
    long Delta = delta_of(D);
    if (Delta >= 1 && Delta <= N) g[static_cast<int>(Delta)] -= Rat(1, 2);
    for (auto it = g.begin(); it != g.end();) it = sgn(it->second) == 0 ? g.erase(it) : std::next(it);
    return g;
}

// Linear part of d Omega4_D / dI_b: (b, e) -> coefficient of I_e.
inline std::map<std::pair<int, int>, Rat> divisor_gradient_linear(const IndexVector& D, int N) {
    std::map<std::pair<int, int>, Rat> g;
    for (auto& x : D) {
        if (x.delta == 0) continue;
        for (auto& h : omega4_hessian(x.a, N)) g[{h.b, h.d}] += Rat(2 * x.delta) * h.v;
    }
    long Delta = delta_of(D);
    if (Delta >= 1)
        for (auto& h : omega4_hessian(static_cast<int>(Delta), N)) g[{h.b, h.d}] -= Rat(2) * h.v;
    for (auto it = g.begin(); it != g.end();) it = sgn(it->second) == 0 ? g.erase(it) : std::next(it);
    return g;
}

struct ScalarTerm {
    QC c;
    Mono m;
    Desc d;
};

namespace detail {

struct ComponentIndex {
    std::map<int, std::vector<const TermMap::value_type*>> by_comp;
    explicit ComponentIndex(const TermMap& t) {
        for (auto& kv : t) by_comp[kv.first.a].push_back(&kv);
    }
    const std::vector<const TermMap::value_type*>* get(int b) const {
        auto it = by_comp.find(b);
        return it == by_comp.end() ? nullptr : &it->second;
    }
};

struct DivisorCache {
    int N;
    std::map<IndexVector, std::map<int, Rat>> cst;
    std::map<IndexVector, std::map<std::pair<int, int>, Rat>> lin;
    const std::map<int, Rat>& constant(const IndexVector& D) {
        auto it = cst.find(D);
        if (it == cst.end()) it = cst.emplace(D, divisor_gradient_const(D, N)).first;
        return it->second;
    }
    const std::map<std::pair<int, int>, Rat>& linear(const IndexVector& D) {
        auto it = lin.find(D);
        if (it == lin.end()) it = lin.emplace(D, divisor_gradient_linear(D, N)).first;
        return it->second;
    }
};

// DI_b[Y] = conj(z_b) Y_b + z_b conj(Y_b) as scalar terms
inline std::vector<ScalarTerm> di_terms(const ComponentIndex& Y, int b) {
    std::vector<ScalarTerm> out;
    auto* list = Y.get(b);
    if (!list) return out;
    for (auto* kv : *list) {
        out.push_back({kv->second, mono_shift(kv->first.m, b, 0, 1), kv->first.d});
        out.push_back({kv->second.conj(), mono_shift(mono_conj(kv->first.m), b, 1, 0), kv->first.d});
    }
    return out;
}

// accumulate D(X)[Y] into out with the given sign
inline void directional(const TermMap& X, const TermMap& Ymap, int N, const Rat& sign, TermMap& out) {
    ComponentIndex Y(Ymap);
    DivisorCache cache{N, {}, {}};
    std::map<int, std::vector<ScalarTerm>> di;
    auto di_of = [&](int b) -> const std::vector<ScalarTerm>& {
        auto it = di.find(b);
        if (it == di.end()) it = di.emplace(b, di_terms(Y, b)).first;
        return it->second;
    };

    for (auto& [kx, cx] : X) {
        // numerator: d/dz_b and d/dconj(z_b)
        for (auto& v : kx.m) {
            auto* list = Y.get(v.mode);
            if (!list) continue;
            if (v.p > 0) {
                Mono base = mono_shift(kx.m, v.mode, -1, 0);
                for (auto* ky : *list) {
                    QC c = cx * ky->second * Rat(v.p) * sign;
                    add_term(out, Key{kx.a, mono_mul(base, ky->first.m), desc_concat(kx.d, ky->first.d)}, c);
                }
            }
            if (v.q > 0) {
                Mono base = mono_shift(kx.m, v.mode, 0, -1);
                for (auto* ky : *list) {
                    QC c = cx * ky->second.conj() * Rat(v.q) * sign;
                    add_term(out, Key{kx.a, mono_mul(base, mono_conj(ky->first.m)), desc_concat(kx.d, ky->first.d)}, c);
                }
            }
        }
        // divisors: d(1/Omega) = -dOmega / Omega^2
        auto touch = [&](const IndexVector& D, bool order_two) {
            for (auto& [b, g] : cache.constant(D)) {
                for (auto& st : di_of(b)) {
                    Desc nd = desc_concat(kx.d, st.d);
                    (order_two ? nd.h2 : nd.h4).push_back(D);
                    nd.normalize();
                    add_term(out, Key{kx.a, mono_mul(kx.m, st.m), std::move(nd)}, -(cx * st.c) * g * sign);
                }
            }
            if (order_two) return;
            for (auto& [be, g] : cache.linear(D)) {
                auto [b, e] = be;
                for (auto& st : di_of(b)) {
                    Desc nd = desc_concat(kx.d, st.d);
                    nd.k.push_back(D);
                    nd.normalize();
                    Mono m = mono_shift(mono_mul(kx.m, st.m), e, 1, 1);
                    add_term(out, Key{kx.a, std::move(m), std::move(nd)}, -(cx * st.c) * g * sign);
                }
            }
        };
        for (auto& D : kx.d.h2) touch(D, true);
        for (auto& D : kx.d.h4) touch(D, false);
        for (auto& D : kx.d.k) touch(D, false);
    }
}

}  // namespace detail

// [X, Y] = DX[Y] - DY[X]
inline TermMap bracket(const TermMap& X, const TermMap& Y, int N) {
    TermMap out;
    detail::directional(X, Y, N, Rat(1), out);
    detail::directional(Y, X, N, Rat(-1), out);
    return out;
}

// DI_a[chi] as scalar terms
inline std::vector<ScalarTerm> di_symbolic(const TermMap& chi, int a) {
    detail::ComponentIndex Y(chi);
    return detail::di_terms(Y, a);
}

}  // namespace kirchhoff::nf

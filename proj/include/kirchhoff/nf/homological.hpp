#pragma once

// Homological equations for the integrable fields Z_3 and Z_3 + Z_5 and the
// quintic/septic rational normal form steps built on them.

#include <string>
#include <vector>

#include "rational.hpp"
#include "resonant.hpp"

namespace kirchhoff::nf {

// rational normal form: diag only, imaginary, and each numerator paired with
// its conjugate under the same divisors
inline bool is_rational_normal_form(const FieldBase& Q) {
    for (auto& [k, c] : Q.raw()) {
        if (!c.is_imag()) return false;
        Shape s = shape_of(k.a, k.m);
        if (s.kind != Kind::diag) return false;
        Key kc{k.a, mono_of_shape(k.a, Kind::diag, conj(s.j)), k.d};
        auto it = Q.raw().find(kc);
        if (it == Q.raw().end() || !(it->second == c)) return false;
    }
    return true;
}

inline bool is_integrable_term(const Key& k) { return is_integrable_key(k); }

struct Z3Solution {
    RationalVF chi;    // order l-1, anti-reversible, one more Omega2 divisor
    RationalVF Z_int;  // integrable part of the input
    RationalVF R;      // -i (z_a/4) DI_a[chi], order l
};

namespace detail {

// -i (z_a / 4) DI_a[chi] for every component a <= N
inline void add_z3_remainder(const RationalVF& chi, int N, RationalVF& R) {
    const QC f = QC::imag(rat(-1, 4));
    for (int a = 1; a <= N; ++a)
        for (auto& st : di_symbolic(chi.raw(), a)) R.add_raw(Key{a, mono_shift(st.m, a, 1, 0), st.d}, st.c * f);
}

// -i z_a sum_d (d omega4_a / dI_d) DI_d[chi]
inline void add_z5_remainder(const RationalVF& chi, int N, RationalVF& R) {
    std::map<int, std::vector<ScalarTerm>> di;
    for (int d = 1; d <= N; ++d) di[d] = di_symbolic(chi.raw(), d);
    for (int a = 1; a <= N; ++a)
        for (auto& h : omega4_hessian(a, N))
            for (auto& st : di[h.b]) {
                Mono m = mono_shift(mono_shift(st.m, h.d, 1, 1), a, 1, 0);
                R.add_raw(Key{a, std::move(m), st.d}, st.c * QC::imag(-h.v));
            }
}

}  // namespace detail

// [Z_3, chi] + Q = Z_int + R with chi = i Q / Omega2_{Irr j} on the
// non-integrable terms.
inline Z3Solution solve_z3(const RationalVF& Q) {
    const int N = Q.cutoff(), l = Q.order();
    if (!Q.is_reversible()) throw BracketError("solve_z3 needs a reversible field");
    Z3Solution s{RationalVF(l - 1, N), RationalVF(l, N), RationalVF(l, N)};
    for (auto& [k, c] : Q.raw()) {
        if (is_integrable_key(k)) {
            s.Z_int.add_raw(k, c);
            continue;
        }
        Desc d = k.d;
        d.h2.push_back(numerator_irr(k));
        d.normalize();
        s.chi.add_raw(Key{k.a, k.m, std::move(d)}, c.times_i());
    }
    detail::add_z3_remainder(s.chi, N, s.R);
    return s;
}

struct QuinticSolution {
    RationalVF S;   // step one: anti-kind numerators over one Omega2
    RationalVF M;   // step two: n = #h = 2, no k
    RationalVF R1;  // remainder of step one, removed by M
    RationalVF RM;  // remainder of step two; DI_a[M] vanishes, so this is zero as a function
};

inline QuinticSolution quintic_rational_solve(const PolyVF& K5_nonint) {
    auto s1 = solve_z3(RationalVF::from_poly(K5_nonint));
    if (!s1.Z_int.empty()) throw std::invalid_argument("quintic input has an integrable part");
    auto s2 = solve_z3(s1.R);
    if (!s2.Z_int.empty()) throw std::logic_error("step-one remainder has an integrable part");
    return {s1.chi, s2.chi, s1.R, s2.R};
}

struct Z35Solution {
    RationalVF chi;      // order l-2, Omega4 divisor appended to k
    RationalVF Z_int;    // order l
    RationalVF Znf_l;    // -i z_a sum_d dω4_a/dI_d DI_d[chi]
    RationalVF Znf_lm1;  // -i (z_a/4) DI_a[chi]
    double norm_Q = 0, norm_chi = 0, norm_l = 0, norm_lm1 = 0;
};

struct BoundViolation : std::logic_error {
    using std::logic_error::logic_error;
};

// [Z_3 + Z_5, chi] + Q = Z_int + Znf_l + Znf_{l-1}
inline Z35Solution solve_homological_z3z5(const RationalVF& Q) {
    const int N = Q.cutoff(), l = Q.order();
    if (l < 3) throw std::invalid_argument("solve_homological_z3z5 needs order >= 3");
    if (!Q.is_reversible()) throw BracketError("solve_homological_z3z5 needs a reversible field");
    Z35Solution s{RationalVF(l - 2, N), RationalVF(l, N), RationalVF(l, N), RationalVF(l - 1, N)};
    for (auto& [k, c] : Q.raw()) {
        if (is_integrable_key(k)) {
            s.Z_int.add_raw(k, c);
            continue;
        }
        Desc d = k.d;
        d.k.push_back(numerator_irr(k));
        d.normalize();
        s.chi.add_raw(Key{k.a, k.m, std::move(d)}, c.times_i());
    }
    detail::add_z3_remainder(s.chi, N, s.Znf_lm1);
    detail::add_z5_remainder(s.chi, N, s.Znf_l);
    s.norm_Q = Q.linf();
    s.norm_chi = s.chi.linf();
    s.norm_l = s.Znf_l.linf();
    s.norm_lm1 = s.Znf_lm1.linf();
    const double tol = 1 + 1e-12;
    if (s.norm_chi > s.norm_Q * tol) throw BoundViolation("generator exceeds the input norm");
    if (s.norm_l > 2 * s.norm_Q * tol) throw BoundViolation("order-l normal form exceeds twice the input norm");
    if (s.norm_lm1 > 0.5 * s.norm_Q * tol) throw BoundViolation("order-(l-1) normal form exceeds half the input norm");
    return s;
}

}  // namespace kirchhoff::nf

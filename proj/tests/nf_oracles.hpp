#pragma once

// Oracles and generators for the normal-form tests, written against the term
// listing only: a naive evaluator, a finite-difference bracket, closed-form
// tables, and random small fields.

#include <cmath>
#include <random>
#include <vector>

#include "kirchhoff/nf/homological.hpp"

namespace oracle {

using kirchhoff::cd;
using kirchhoff::ComplexSeq;
using kirchhoff::IndexVector;
using kirchhoff::QC;
using kirchhoff::Rat;
using kirchhoff::rat;
using namespace kirchhoff::nf;

// z-component of a divisor-free field, monomials expanded by hand
inline ComplexSeq naive_eval(const FieldBase& f, const ComplexSeq& z) {
    ComplexSeq out(std::max(z.M(), f.cutoff()));
    for (auto& [k, c] : f.raw()) {
        cd v(c.re.get_d(), c.im.get_d());
        for (auto& x : k.m) {
            for (int i = 0; i < x.p; ++i) v *= z(x.mode);
            for (int i = 0; i < x.q; ++i) v *= std::conj(z(x.mode));
        }
        out.at(k.a) += v;
    }
    return out;
}

// d/dt F(z + t w) at t = 0, fourth-order central difference; the step moves
// z by hrel * |z|
template <class Eval>
ComplexSeq directional_fd(Eval&& F, const ComplexSeq& z, const ComplexSeq& w, double hrel) {
    const double wn = kirchhoff::l2_norm(w);
    if (wn == 0.0) return ComplexSeq(std::max(z.M(), w.M()));
    const double h = hrel * kirchhoff::l2_norm(z) / wn;
    auto at = [&](double t) {
        ComplexSeq p = z;
        for (int a = 1; a <= w.M(); ++a) p.at(a) += t * w(a);
        return F(p);
    };
    ComplexSeq f1 = at(h), f_1 = at(-h), f2 = at(2 * h), f_2 = at(-2 * h);
    ComplexSeq out(f1.M());
    for (int a = 1; a <= out.M(); ++a) out.at(a) = (8.0 * (f1(a) - f_1(a)) - (f2(a) - f_2(a))) / (12.0 * h);
    return out;
}

// [X, Y](z) = DX[Y] - DY[X] by differencing the given evaluators, with one
// Richardson step (steps hrel and hrel/2) to reach sixth order
template <class EX, class EY>
ComplexSeq fd_bracket(EX&& ex, EY&& ey, const ComplexSeq& z, double hrel) {
    ComplexSeq x = ex(z), y = ey(z);
    auto D = [&](double h) { return directional_fd(ex, z, y, h) - directional_fd(ey, z, x, h); };
    ComplexSeq c = D(hrel), f = D(0.5 * hrel);
    ComplexSeq out(f.M());
    for (int a = 1; a <= out.M(); ++a) out.at(a) = (16.0 * f(a) - c(a)) / 15.0;
    return out;
}

// K5 at cutoff N written out from the closed forms: the integrable part and the
// anti terms conj(z_a) z_b1^2 z_b2^2 (b1 + b2 = a) and conj(z_a) z_b^2 conj(z_c)^2 (b - c = a)
inline PolyVF k5_closed_form(int N) {
    PolyVF K(2, N);
    for (int a = 1; a <= N; ++a) {
        K.add(a, Kind::diag, {{0, a}, {0, a}}, QC::imag(rat(27, 64L * a)));
        for (int d = 1; d <= N; ++d) {
            if (d == a) continue;
            K.add(a, Kind::diag, {{0, a}, {0, d}}, QC::imag(rat(1, 8) * (rat(3, d) + rat(d, d * d - a * a))));
            K.add(a, Kind::diag, {{0, d}, {0, d}}, QC::imag(-rat(a, 16L * (d * d - a * a))));
        }
        // ordered pairs (b1, b2): the monomial collects both orders when b1 != b2
        for (int b1 = 1; b1 < a; ++b1) K.add(a, Kind::anti, {{1, b1}, {1, a - b1}}, QC::imag(rat(3L * a, 32L * b1 * (a - b1))));
        for (int c = 1; c + a <= N; ++c) K.add(a, Kind::anti, {{1, c + a}, {-1, c}}, QC::imag(rat(6L * a, 32L * (c + a) * c)));
    }
    return K;
}

// ---- random small fields ------------------------------------------------

inline Rat small_rat(std::mt19937_64& g) {
    std::uniform_int_distribution<long> num(-9, 9), den(1, 7);
    long p = num(g);
    if (p == 0) p = 1;
    return rat(p, den(g));
}

inline IndexVector random_index(std::mt19937_64& g, int len, int N) {
    std::uniform_int_distribution<int> d(-1, 1), m(1, N);
    IndexVector j;
    for (int i = 0; i < len; ++i) j.push_back({d(g), m(g)});
    return j;
}

// order l on modes <= N, purely imaginary (reversible) or real coefficients
inline PolyVF random_poly(std::mt19937_64& g, int l, int N, bool reversible, int terms) {
    PolyVF f(l, N);
    std::uniform_int_distribution<int> mode(1, N), kind(0, 1);
    for (int t = 0; t < terms; ++t) {
        Rat c = small_rat(g);
        f.add(mode(g), kind(g) ? Kind::anti : Kind::diag, random_index(g, l, N), reversible ? QC::imag(c) : QC(c));
    }
    return f;
}

// resonant, non-integrable, reversible terms of order l
inline PolyVF random_resonant(std::mt19937_64& g, int l, int N, int terms, int max_tries = 2000) {
    PolyVF f(l, N);
    std::uniform_int_distribution<int> mode(1, N), kind(0, 1);
    for (int t = 0; t < max_tries && static_cast<int>(f.size()) < terms; ++t) {
        int a = mode(g);
        Kind k = kind(g) ? Kind::anti : Kind::diag;
        Key key{a, mono_of_shape(a, k, kirchhoff::canonicalize(random_index(g, l, N))), {}};
        if (!is_resonant_key(key) || is_integrable_key(key)) continue;
        f.add_raw(key, QC::imag(small_rat(g)));
    }
    return f;
}

// ---- structural property case ------------------------------------------

struct CaseOutcome {
    int parity = 0, order = 0, bound = 0, control = 0;
    int violations() const { return parity + order + bound + control; }
};

inline bool orders_ok(const FieldBase& f) {
    for (auto& [k, c] : f.raw())
        if (term_order(k) != f.order()) return false;
    return true;
}

// one randomized case: a polynomial commutator and a rational pipeline
// (resonant input -> solve_z3 -> rational commutator with the input)
inline CaseOutcome structural_case(std::uint64_t seed) {
    std::mt19937_64 g(seed);
    CaseOutcome o;
    std::uniform_int_distribution<int> ord(1, 2), cut(2, 4), nt(1, 4);
    const int N = cut(g);
    PolyVF X = random_poly(g, ord(g), N, true, nt(g));
    PolyVF chi = random_poly(g, ord(g), N, false, nt(g));
    PolyVF B = bracket_any(X, chi);
    if (!B.is_reversible()) ++o.parity;
    if (B.order() != X.order() + chi.order() || !orders_ok(B)) ++o.order;
    if (B.linf() > 6.0 * (X.order() + chi.order() + 1) * X.linf() * chi.linf() * (1 + 1e-12)) ++o.bound;

    PolyVF P = random_resonant(g, 2, N, nt(g));
    if (P.empty()) return o;
    auto Q = RationalVF::from_poly(P);
    auto s = solve_z3(Q);
    for (const FieldBase* f : {static_cast<const FieldBase*>(&s.chi), static_cast<const FieldBase*>(&s.R)}) {
        if (!orders_ok(*f)) ++o.order;
        if (!check_structure(*f).ok) ++o.control;
    }
    if (!s.chi.is_anti_reversible() || !s.R.is_reversible()) ++o.parity;
    auto C = RationalVF::from_terms(Q.order() + s.chi.order(), N, bracket(Q.raw(), s.chi.raw(), N));
    if (!C.is_reversible()) ++o.parity;
    if (!orders_ok(C)) ++o.order;
    if (!check_structure(C).ok) ++o.control;
    return o;
}

// ---- rational estimate --------------------------------------------------

// Right-hand side of the rational norm bound with (alpha, beta, beta') = (#j, #h, #k) per term:
// 6 sqrt2 J^3 max (12 alpha^2)^(alpha-1) N^((4 alpha+2)(beta+beta')) / gamma^(beta+2 beta') |Q| |z|^(2l+1)
inline double rational_bound(const FieldBase& Q, double gamma, double znorm) {
    const double N = Q.cutoff();
    int J = 0;
    double mx = 0.0;
    for (auto& [k, c] : Q.raw()) {
        const int al = zeta_count(k.m), be = k.d.h_count(), bp = k.d.k_count();
        J = std::max(J, al);
        double v = std::pow(12.0 * al * al, al - 1) * std::pow(N, (4.0 * al + 2) * (be + bp)) / std::pow(gamma, be + 2.0 * bp);
        mx = std::max(mx, v);
    }
    return 6.0 * std::sqrt(2.0) * std::pow(J, 3) * mx * Q.linf() * std::pow(znorm, 2 * Q.order() + 1);
}

}  // namespace oracle

#pragma once

// Resonant normal form: remove the non-resonant part of each P_{2l+1} with
// the Lie series generated by a solution of the Z_1 homological equation.

#include <limits>
#include <stdexcept>
#include <vector>

#include "fields.hpp"
#include "taylor.hpp"

namespace kirchhoff::nf {

struct Z1Solution {
    PolyVF chi;  // anti-reversible
    PolyVF K;    // resonant part of the input
};

// [Z_1, chi] + P = K with K resonant; chi = i P / defect term by term.
inline Z1Solution solve_homological_z1(const PolyVF& P) {
    Z1Solution s{PolyVF(P.order(), P.cutoff()), PolyVF(P.order(), P.cutoff())};
    for (auto& [k, c] : P.raw()) {
        long lam = z1_defect(k);
        if (lam == 0) s.K.add_raw(k, c);
        else s.chi.add_raw(k, c.times_i() / Rat(lam));
    }
    return s;
}

inline PolyVF ad(const PolyVF& X, const PolyVF& chi) {
    if (X.order() == 0 && X == z1_field(X.cutoff())) return commutator_z1(chi);
    return commutator(X, chi);
}

struct ResonantNF {
    int r = 0;
    int N = 0;
    std::vector<PolyVF> K;       // K[l] for l = 1..r (K[0] = Z_1)
    std::vector<PolyVF> chi;     // chi[l] generator of order l, l = 1..r
    std::vector<PolyVF> input;   // P_{2l+1} before the transformation
    int remainder_min_degree = std::numeric_limits<int>::max();

    const PolyVF& K3() const { return K.at(1); }
    const PolyVF& K5() const { return K.at(2); }
    const PolyVF& K7() const { return K.at(3); }
};

// e^{ad_chi} X, keeping orders <= r. X[l] holds the order-l part.
inline std::vector<PolyVF> lie_transform(const std::vector<PolyVF>& X, const PolyVF& chi, int r,
                                         int* dropped_min_order = nullptr) {
    const int lc = chi.order();
    if (lc < 1) throw std::invalid_argument("generator order must be >= 1");
    std::vector<PolyVF> Y = X;
    for (int l = 0; l <= r; ++l) {
        if (X[l].empty()) continue;
        PolyVF term = X[l];
        Rat fact(1);
        for (int k = 1;; ++k) {
            int ord = l + k * lc;
            if (ord > r) {
                if (dropped_min_order) *dropped_min_order = std::min(*dropped_min_order, ord);
                break;
            }
            term = ad(term, chi);
            fact *= k;
            if (term.empty()) break;
            Y[ord] += term.scaled(1 / fact);
        }
    }
    return Y;
}

inline ResonantNF resonant_normal_form(int r, int N) {
    if (r < 1 || r > 3) throw std::out_of_range("resonant_normal_form supports r in {1,2,3}");
    ResonantNF out;
    out.r = r;
    out.N = N;
    std::vector<PolyVF> X(r + 1);
    X[0] = z1_field(N);
    for (int l = 1; l <= r; ++l) {
        X[l] = taylor_vf(l, N);
        out.input.push_back(X[l]);
    }
    int dropped = std::numeric_limits<int>::max();
    out.chi.assign(r + 1, PolyVF());
    for (int l = 1; l <= r; ++l) {
        auto sol = solve_homological_z1(X[l]);
        out.chi[l] = sol.chi;
        if (sol.chi.empty()) continue;
        X = lie_transform(X, sol.chi, r, &dropped);
        if (!(X[l] == sol.K))
            throw std::logic_error("Lie step did not reduce the order " + std::to_string(l) + " part to K");
    }
    out.K = X;
    out.remainder_min_degree = dropped == std::numeric_limits<int>::max() ? dropped : 2 * dropped + 1;
    if (out.remainder_min_degree < 2 * r + 3) throw std::logic_error("remainder below the order budget");
    return out;
}

// Integrable part (products of actions times z_a) and its complement.
inline PolyVF integrable_part(const PolyVF& X) {
    return X.filtered([](const Key& k) { return is_integrable_key(k); });
}
inline PolyVF nonintegrable_part(const PolyVF& X) {
    return X.filtered([](const Key& k) { return !is_integrable_key(k); });
}

// Z_3 = -(i/4) I_a z_a on modes <= N
inline PolyVF z3_field(int N) {
    PolyVF f(1, N);
    for (int a = 1; a <= N; ++a) f.add(a, Kind::diag, {{0, a}}, QC::imag(rat(-1, 4)));
    return f;
}

// Z_5 = i z_a (omega4_a(I) - the I_a^2 self part halved), i.e. the quintic
// integrable part: 27/(64a) I_a^2 + (1/8) I_a sum_d q(a,d) I_d - (a/16) sum_d I_d^2/(d^2-a^2)
inline PolyVF z5_field(int N) {
    PolyVF f(2, N);
    for (int a = 1; a <= N; ++a) {
        f.add(a, Kind::diag, {{0, a}, {0, a}}, QC::imag(rat(27, 64L * a)));
        for (int d = 1; d <= N; ++d) {
            if (d == a) continue;
            f.add(a, Kind::diag, {{0, a}, {0, d}}, QC::imag(coupling_q(a, d) / 8));
            f.add(a, Kind::diag, {{0, d}, {0, d}}, QC::imag(-rat(a, 16L * (d * d - a * a))));
        }
    }
    return f;
}

// chi_3 in closed form: conj(z_a) z_b^2 / (8(b - a)) for b != a and
// conj(z_a) conj(z_b)^2 / (8(b + a)).
inline PolyVF chi3_explicit(int N) {
    PolyVF chi(1, N);
    for (int a = 1; a <= N; ++a)
        for (int b = 1; b <= N; ++b) {
            if (b != a) chi.add(a, Kind::anti, {{1, b}}, QC(rat(1, 8L * (b - a))));
            chi.add(a, Kind::anti, {{-1, b}}, QC(rat(1, 8L * (b + a))));
        }
    return chi;
}

}  // namespace kirchhoff::nf

#pragma once

// Polynomial parts P_{2l+1} of the Kirchhoff field in the z coordinates.

#include <stdexcept>
#include <vector>

#include "fields.hpp"

namespace kirchhoff::nf {

namespace series {

using Series = std::vector<Rat>;  // truncated power series, index = power

inline Series mul(const Series& x, const Series& y) {
    const std::size_t K = x.size();
    Series r(K, Rat(0));
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t k = 0; i + k < K; ++k) r[i + k] += x[i] * y[k];
    return r;
}

// (1 + u)^alpha for u with zero constant term, alpha = num/den
inline Series binomial(const Series& u, long num, long den) {
    if (sgn(u[0]) != 0) throw std::invalid_argument("binomial series needs u(0) = 0");
    const std::size_t K = u.size();
    Series r(K, Rat(0)), up(K, Rat(0));
    up[0] = 1;
    Rat c(1);
    const Rat alpha = rat(num, den);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < K; ++i) r[i] += c * up[i];
        c *= (alpha - Rat(static_cast<long>(k))) / Rat(static_cast<long>(k + 1));
        up = mul(up, u);
    }
    return r;
}

}  // namespace series

// Taylor coefficients f_0..f_{K-1} of f(y) = (1 + 2 phi(y))^{-3/2}, where
// phi is the inverse relation y = phi sqrt(1 + 2 phi).
inline std::vector<Rat> f_taylor(int K) {
    using namespace series;
    Series phi(K, Rat(0)), y(K, Rat(0));
    if (K > 1) y[1] = 1;
    // phi = y (1 + 2 phi)^{-1/2}; each pass fixes one more coefficient
    for (int it = 0; it <= K; ++it) {
        Series two_phi = phi;
        for (auto& c : two_phi) c *= 2;
        phi = mul(y, binomial(two_phi, -1, 2));
    }
    Series two_phi = phi;
    for (auto& c : two_phi) c *= 2;
    return binomial(two_phi, -3, 2);
}

using PolyMap = std::map<Mono, QC>;

inline PolyMap poly_mul(const PolyMap& x, const PolyMap& y) {
    PolyMap r;
    for (auto& [mx, cx] : x)
        for (auto& [my, cy] : y) {
            auto [it, fresh] = r.try_emplace(mono_mul(mx, my), cx * cy);
            if (!fresh) it->second += cx * cy;
        }
    for (auto it = r.begin(); it != r.end();) it = it->second.is_zero() ? r.erase(it) : std::next(it);
    return r;
}

// P_{2l+1} on modes 1..N:
//   c_l Y^{l-1} W  conj(z_a)   in the z_a component,
// Y = sum (z_b^2 + conj(z_b)^2 + 2 I_b)/b, W = sum (z_b^2 - conj(z_b)^2),
// c_l = -i f_{l-1} / 4^l.
inline PolyVF taylor_vf(int l, int N) {
    if (l < 1 || l > 3) throw std::out_of_range("taylor_vf supports 1 <= l <= 3");
    const auto f = f_taylor(l);
    const QC cl = QC::imag(-f[l - 1] / Rat(1L << (2 * l)));

    PolyMap Y, W;
    for (int b = 1; b <= N; ++b) {
        Rat ib = rat(1, b);
        Y[{{b, 2, 0}}] += QC(ib);
        Y[{{b, 0, 2}}] += QC(ib);
        Y[{{b, 1, 1}}] += QC(2 * ib);
        W[{{b, 2, 0}}] += QC(Rat(1));
        W[{{b, 0, 2}}] += QC(Rat(-1));
    }
    PolyMap S = W;
    for (int i = 1; i < l; ++i) S = poly_mul(S, Y);

    PolyVF P(l, N);
    for (int a = 1; a <= N; ++a)
        for (auto& [m, c] : S) P.add_mono(a, mono_shift(m, a, 0, 1), c * cl);
    return P;
}

}  // namespace kirchhoff::nf

#pragma once

// Term storage shared by the polynomial and rational vector fields.
//
// A vector field is stored through its z-components only; the conj(z)-component
// is the complex conjugate. A term (a, m, d, c) stands for
//     c * m(z, conj z) / f_d(I)   in the d/dz_a component,
// where m is a monomial given by exponents and d lists the divisors.

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "../core.hpp"
#include "../divisors.hpp"
#include "../exact.hpp"

namespace kirchhoff::nf {

struct Var {
    int mode;
    int p;  // power of z_mode
    int q;  // power of conj z_mode
    friend bool operator==(const Var&, const Var&) = default;
    friend auto operator<=>(const Var&, const Var&) = default;
};

using Mono = std::vector<Var>;  // sorted by mode, no all-zero entries

inline int degree(const Mono& m) {
    int d = 0;
    for (auto& v : m) d += v.p + v.q;
    return d;
}

inline Var var_of(const Mono& m, int mode) {
    auto it = std::lower_bound(m.begin(), m.end(), mode, [](const Var& v, int x) { return v.mode < x; });
    if (it != m.end() && it->mode == mode) return *it;
    return {mode, 0, 0};
}

inline int max_mode(const Mono& m) { return m.empty() ? 0 : m.back().mode; }

inline Mono mono_mul(const Mono& x, const Mono& y) {
    Mono r;
    r.reserve(x.size() + y.size());
    std::size_t i = 0, k = 0;
    while (i < x.size() || k < y.size()) {
        if (k == y.size() || (i < x.size() && x[i].mode < y[k].mode)) r.push_back(x[i++]);
        else if (i == x.size() || y[k].mode < x[i].mode) r.push_back(y[k++]);
        else {
            r.push_back({x[i].mode, x[i].p + y[k].p, x[i].q + y[k].q});
            ++i;
            ++k;
        }
    }
    return r;
}

inline Mono mono_conj(Mono m) {
    for (auto& v : m) std::swap(v.p, v.q);
    return m;
}

// multiply by z_mode^dp conj(z_mode)^dq (dp, dq may be -1 for differentiation)
inline Mono mono_shift(Mono m, int mode, int dp, int dq) {
    auto it = std::lower_bound(m.begin(), m.end(), mode, [](const Var& v, int x) { return v.mode < x; });
    if (it != m.end() && it->mode == mode) {
        it->p += dp;
        it->q += dq;
        if (it->p < 0 || it->q < 0) throw std::logic_error("negative exponent");
        if (it->p == 0 && it->q == 0) m.erase(it);
    } else {
        if (dp < 0 || dq < 0) throw std::logic_error("negative exponent");
        m.insert(it, Var{mode, dp, dq});
    }
    return m;
}

inline Mono mono_of_zeta(const IndexVector& j) {
    Mono m;
    for (auto& x : j) {
        int dp = x.delta == 1 ? 2 : (x.delta == 0 ? 1 : 0);
        int dq = x.delta == -1 ? 2 : (x.delta == 0 ? 1 : 0);
        m = mono_shift(std::move(m), x.a, dp, dq);
    }
    return m;
}

inline cd eval_mono(const Mono& m, const ComplexSeq& z) {
    cd r{1.0, 0.0};
    for (auto& v : m) {
        cd x = z(v.mode), xc = std::conj(x);
        for (int i = 0; i < v.p; ++i) r *= x;
        for (int i = 0; i < v.q; ++i) r *= xc;
    }
    return r;
}

enum class Kind { diag, anti };

inline const char* kind_name(Kind k) { return k == Kind::diag ? "diag" : "anti"; }

// Normal form of a component-a monomial: diag (z_a * zeta_j) whenever z_a
// divides it, anti (conj z_a * zeta_j) otherwise; conjugate pairs inside j are
// written as two actions.
struct Shape {
    Kind kind;
    IndexVector j;
};

inline IndexVector zeta_of_even(const Mono& m) {
    IndexVector j;
    for (auto& v : m) {
        if ((v.p - v.q) % 2 != 0) throw std::invalid_argument("monomial is not a product of zeta factors");
        int w = std::min(v.p, v.q);
        for (int i = 0; i < w; ++i) j.push_back({0, v.mode});
        for (int i = 0; i < (v.q - w) / 2; ++i) j.push_back({-1, v.mode});
        for (int i = 0; i < (v.p - w) / 2; ++i) j.push_back({1, v.mode});
    }
    return j;  // already canonical: modes ascending, 0 < -1 < 1
}

inline Shape shape_of(int a, const Mono& m) {
    Var va = var_of(m, a);
    if (va.p >= 1) return {Kind::diag, zeta_of_even(mono_shift(m, a, -1, 0))};
    if (va.q >= 1) return {Kind::anti, zeta_of_even(mono_shift(m, a, 0, -1))};
    throw std::invalid_argument("component monomial lacks z_a and conj z_a");
}

inline Mono mono_of_shape(int a, Kind k, const IndexVector& j) {
    Mono m = mono_of_zeta(j);
    return k == Kind::diag ? mono_shift(std::move(m), a, 1, 0) : mono_shift(std::move(m), a, 0, 1);
}

inline bool representable(int a, const Mono& m) {
    if (degree(m) % 2 != 1) return false;
    for (auto& v : m) {
        int par = (v.p + v.q) % 2;
        if ((v.mode == a) != (par == 1)) return false;
    }
    return true;
}

// Number of (kind, ordered j) pairs that name this component monomial. Dividing
// the monomial coefficient by it gives the symmetric per-tuple coefficient, the
// smallest sup over all representations.
inline double representation_count(int a, const Mono& m) {
    auto fact = [](int n) { double f = 1; for (int i = 2; i <= n; ++i) f *= i; return f; };
    auto count_even = [&](const Mono& r) {
        int L = degree(r) / 2;
        double prod = fact(L);
        for (auto& v : r) {
            double s = 0.0;
            for (int w = v.p % 2; w <= std::min(v.p, v.q); w += 2) {
                if ((v.q - w) % 2) continue;
                s += 1.0 / (fact((v.p - w) / 2) * fact((v.q - w) / 2) * fact(w));
            }
            prod *= s;
        }
        return prod;
    };
    Var va = var_of(m, a);
    double c = 0.0;
    if (va.p >= 1) c += count_even(mono_shift(m, a, -1, 0));
    if (va.q >= 1) c += count_even(mono_shift(m, a, 0, -1));
    return c;
}

inline int zeta_count(const Mono& m) { return (degree(m) - 1) / 2; }

// Divisor descriptor: Omega^(2) over h2, Omega^(4) over h4 and k. Each list is
// kept sorted so equal products compare equal.
struct Desc {
    std::vector<IndexVector> h2, h4, k;

    bool empty() const { return h2.empty() && h4.empty() && k.empty(); }
    int n() const { return static_cast<int>(h2.size()); }
    int h_count() const { return static_cast<int>(h2.size() + h4.size()); }
    int k_count() const { return static_cast<int>(k.size()); }

    void normalize() {
        std::sort(h2.begin(), h2.end());
        std::sort(h4.begin(), h4.end());
        std::sort(k.begin(), k.end());
    }
    friend bool operator==(const Desc&, const Desc&) = default;
    friend bool operator<(const Desc& x, const Desc& y) {
        return std::tie(x.h2, x.h4, x.k) < std::tie(y.h2, y.h4, y.k);
    }
};

inline Desc desc_concat(const Desc& x, const Desc& y) {
    Desc d = x;
    d.h2.insert(d.h2.end(), y.h2.begin(), y.h2.end());
    d.h4.insert(d.h4.end(), y.h4.begin(), y.h4.end());
    d.k.insert(d.k.end(), y.k.begin(), y.k.end());
    d.normalize();
    return d;
}

struct Key {
    int a;
    Mono m;
    Desc d;
    friend bool operator==(const Key&, const Key&) = default;
    friend bool operator<(const Key& x, const Key& y) {
        if (x.a != y.a) return x.a < y.a;
        if (x.m != y.m) return x.m < y.m;
        return x.d < y.d;
    }
};

using TermMap = std::map<Key, QC>;

inline void add_term(TermMap& t, Key k, const QC& c) {
    if (c.is_zero()) return;
    auto [it, fresh] = t.try_emplace(std::move(k), c);
    if (!fresh) {
        it->second += c;
        if (it->second.is_zero()) t.erase(it);
    }
}

inline void add_into(TermMap& dst, const TermMap& src, const Rat& scale = Rat(1)) {
    for (auto& [k, c] : src) add_term(dst, k, c * scale);
}

enum class Parity { reversible, anti_reversible, none };

inline Parity parity_of(const TermMap& t) {
    bool im = true, re = true;
    for (auto& [k, c] : t) {
        im = im && c.is_imag();
        re = re && c.is_real();
    }
    if (im) return Parity::reversible;  // the zero field lands here as well
    if (re) return Parity::anti_reversible;
    return Parity::none;
}

inline bool all_imag(const TermMap& t) {
    for (auto& [k, c] : t)
        if (!c.is_imag()) return false;
    return true;
}
inline bool all_real(const TermMap& t) {
    for (auto& [k, c] : t)
        if (!c.is_real()) return false;
    return true;
}

inline double linf_norm(const TermMap& t) {
    double m = 0.0;
    for (auto& [k, c] : t) m = std::max(m, c.abs() / representation_count(k.a, k.m));
    return m;
}

inline int term_order(const Key& k) { return zeta_count(k.m) - k.d.h_count() - 2 * k.d.k_count(); }

inline int truncation_of(const Key& k) { return std::max(k.a, max_mode(k.m)); }

}  // namespace kirchhoff::nf

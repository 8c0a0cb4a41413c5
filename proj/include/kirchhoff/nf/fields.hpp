#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "algebra.hpp"
#include "calculus.hpp"

namespace kirchhoff::nf {

struct TermView {
    int a;
    Kind kind;
    IndexVector j;
    Desc d;
    QC c;
};

// Homogeneous field of order l (degree 2l+1) on modes 1..N.
class FieldBase {
public:
    FieldBase() = default;
    FieldBase(int order, int N) : order_(order), N_(N) {
        if (N < 1) throw std::invalid_argument("field cutoff must be >= 1");
    }

    int order() const { return order_; }
    int cutoff() const { return N_; }
    bool empty() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }
    const TermMap& raw() const { return t_; }

    Parity parity() const { return parity_of(t_); }
    bool is_reversible() const { return all_imag(t_); }
    bool is_anti_reversible() const { return all_real(t_); }
    double linf() const { return linf_norm(t_); }

    void add_raw(const Key& k, const QC& c) {
        check_key(k);
        add_term(t_, k, c);
    }

    std::vector<TermView> terms() const {
        std::vector<TermView> out;
        out.reserve(t_.size());
        for (auto& [k, c] : t_) {
            Shape s = shape_of(k.a, k.m);
            out.push_back({k.a, s.kind, std::move(s.j), k.d, c});
        }
        return out;
    }

    friend bool operator==(const FieldBase& x, const FieldBase& y) { return x.t_ == y.t_; }

protected:
    void check_key(const Key& k) const {
        if (k.a < 1 || k.a > N_ || max_mode(k.m) > N_) throw std::out_of_range("term outside the cutoff");
        if (!representable(k.a, k.m)) throw std::invalid_argument("monomial does not fit the component structure");
        if (term_order(k) != order_)
            throw std::invalid_argument("term order " + std::to_string(term_order(k)) + " differs from field order " +
                                        std::to_string(order_));
    }

    int order_ = 0;
    int N_ = 1;
    TermMap t_;
};

class PolyVF : public FieldBase {
public:
    PolyVF() = default;
    PolyVF(int order, int N) : FieldBase(order, N) {}

    static PolyVF from_terms(int order, int N, const TermMap& t) {
        PolyVF f(order, N);
        for (auto& [k, c] : t) f.add_raw(k, c);
        return f;
    }

    void add(int a, Kind kind, const IndexVector& j, const QC& c) {
        add_raw(Key{a, mono_of_shape(a, kind, canonicalize(j)), {}}, c);
    }
    void add_mono(int a, const Mono& m, const QC& c) { add_raw(Key{a, m, {}}, c); }

    QC coeff(int a, Kind kind, const IndexVector& j) const {
        return coeff_mono(a, mono_of_shape(a, kind, canonicalize(j)));
    }
    QC coeff_mono(int a, const Mono& m) const {
        auto it = t_.find(Key{a, m, {}});
        return it == t_.end() ? QC() : it->second;
    }

    PolyVF& operator+=(const PolyVF& o) {
        require_compatible(o);
        add_into(t_, o.t_);
        return *this;
    }
    PolyVF& operator-=(const PolyVF& o) {
        require_compatible(o);
        add_into(t_, o.t_, Rat(-1));
        return *this;
    }
    PolyVF scaled(const Rat& s) const {
        PolyVF r(order_, N_);
        add_into(r.t_, t_, s);
        return r;
    }
    friend PolyVF operator+(PolyVF x, const PolyVF& y) { return x += y; }
    friend PolyVF operator-(PolyVF x, const PolyVF& y) { return x -= y; }

    // restriction to modes <= M
    PolyVF truncated(int M) const {
        PolyVF r(order_, std::min(M, N_));
        for (auto& [k, c] : t_)
            if (truncation_of(k) <= M) r.t_.emplace(k, c);
        return r;
    }

    template <class Pred>
    PolyVF filtered(Pred keep) const {
        PolyVF r(order_, N_);
        for (auto& [k, c] : t_)
            if (keep(k)) r.t_.emplace(k, c);
        return r;
    }

private:
    void require_compatible(const PolyVF& o) const {
        if (o.order_ != order_ || o.N_ != N_) throw std::invalid_argument("fields differ in order or cutoff");
    }
};

// Z_1: the linear rotation -i a z_a
inline PolyVF z1_field(int N) {
    PolyVF f(0, N);
    for (int a = 1; a <= N; ++a) f.add(a, Kind::diag, {}, QC::imag(Rat(-a)));
    return f;
}

// Resonance quantity sum_b b (p_b - q_b) - a; zero iff the term commutes with Z_1.
inline long z1_defect(const Key& k) {
    long s = 0;
    for (auto& v : k.m) s += static_cast<long>(v.mode) * (v.p - v.q);
    return s - k.a;
}

inline bool is_resonant_key(const Key& k) { return z1_defect(k) == 0; }

// Integrable: the divisor-free part of the numerator is a product of actions.
inline bool is_integrable_key(const Key& k) {
    Shape s = shape_of(k.a, k.m);
    if (s.kind != Kind::diag) return false;
    for (auto& x : s.j)
        if (x.delta != 0) return false;
    return true;
}

// Irreducible part of the numerator index for a resonant term
inline IndexVector numerator_irr(const Key& k) {
    Shape s = shape_of(k.a, k.m);
    return irr(s.j, s.kind == Kind::diag ? 0 : k.a);
}

// Z_1 eigenvalue shortcut for [Z_1, chi]
inline PolyVF commutator_z1(const PolyVF& chi) {
    PolyVF out(chi.order(), chi.cutoff());
    for (auto& [k, c] : chi.raw()) out.add_raw(k, c.times_i() * Rat(z1_defect(k)));
    return out;
}

struct BracketError : std::logic_error {
    using std::logic_error::logic_error;
};

// [X, chi] with X reversible and chi anti-reversible. The coefficient bound
// 6(l1+l2+1)|X||chi| is checked whenever both orders are positive.
inline PolyVF commutator(const PolyVF& X, const PolyVF& chi) {
    if (!X.is_reversible()) throw BracketError("commutator: first argument must be reversible");
    if (!chi.is_anti_reversible()) throw BracketError("commutator: second argument must be anti-reversible");
    const int N = std::max(X.cutoff(), chi.cutoff());
    PolyVF out = PolyVF::from_terms(X.order() + chi.order(), N, bracket(X.raw(), chi.raw(), N));
    if (!out.is_reversible()) throw BracketError("commutator produced a non-reversible field");
    if (X.order() >= 1 && chi.order() >= 1) {
        double bound = 6.0 * (X.order() + chi.order() + 1) * X.linf() * chi.linf();
        if (out.linf() > bound * (1 + 1e-12)) throw BracketError("commutator coefficient bound violated");
    }
    return out;
}

// bracket with no parity contract, for mixed uses and oracles
inline PolyVF bracket_any(const PolyVF& X, const PolyVF& Y) {
    const int N = std::max(X.cutoff(), Y.cutoff());
    return PolyVF::from_terms(X.order() + Y.order(), N, bracket(X.raw(), Y.raw(), N));
}

class RationalVF : public FieldBase {
public:
    RationalVF() = default;
    RationalVF(int order, int N) : FieldBase(order, N) {}

    static RationalVF from_terms(int order, int N, const TermMap& t) {
        RationalVF f(order, N);
        for (auto& [k, c] : t) f.add_raw(k, c);
        return f;
    }
    static RationalVF from_poly(const PolyVF& p) { return from_terms(p.order(), p.cutoff(), p.raw()); }

    void add(int a, Kind kind, const IndexVector& j, Desc d, const QC& c) {
        d.normalize();
        add_raw(Key{a, mono_of_shape(a, kind, canonicalize(j)), std::move(d)}, c);
    }

    QC coeff(int a, Kind kind, const IndexVector& j, Desc d) const {
        d.normalize();
        auto it = t_.find(Key{a, mono_of_shape(a, kind, canonicalize(j)), std::move(d)});
        return it == t_.end() ? QC() : it->second;
    }

    RationalVF& operator+=(const RationalVF& o) {
        if (o.order_ != order_ || o.N_ != N_) throw std::invalid_argument("fields differ in order or cutoff");
        add_into(t_, o.t_);
        return *this;
    }
    RationalVF& operator-=(const RationalVF& o) {
        if (o.order_ != order_ || o.N_ != N_) throw std::invalid_argument("fields differ in order or cutoff");
        add_into(t_, o.t_, Rat(-1));
        return *this;
    }
    friend RationalVF operator+(RationalVF x, const RationalVF& y) { return x += y; }
    friend RationalVF operator-(RationalVF x, const RationalVF& y) { return x -= y; }

    template <class Pred>
    RationalVF filtered(Pred keep) const {
        RationalVF r(order_, N_);
        for (auto& [k, c] : t_)
            if (keep(k)) r.t_.emplace(k, c);
        return r;
    }

    bool divisor_free() const {
        for (auto& [k, c] : t_)
            if (!k.d.empty()) return false;
        return true;
    }
    PolyVF to_poly() const {
        if (!divisor_free()) throw std::logic_error("field carries divisors");
        return PolyVF::from_terms(order_, N_, t_);
    }
};

}  // namespace kirchhoff::nf

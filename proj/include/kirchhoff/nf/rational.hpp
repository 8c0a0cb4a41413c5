#pragma once

// Rational vector fields: structure checks, symbolic commutator, and numeric
// evaluation with directional derivatives.

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fields.hpp"

namespace kirchhoff::nf {

struct StructureReport {
    bool ok = true;
    std::vector<std::string> violations;
    std::size_t terms = 0;
    // largest count of (h, k) descriptors sharing one (a, j); exposed, not enforced
    std::size_t max_descriptors_per_numerator = 0;

    void fail(std::string s) {
        ok = false;
        if (violations.size() < 20) violations.push_back(std::move(s));
    }
};

struct StructureOptions {
    WeightSpec weight = WeightSpec::sobolev(0.0);
    // septic-stage inputs: prod kappa_h <= prod j* / j*_1
    bool strict_control = false;
};

inline std::string describe_key(const Key& k) {
    Shape s = shape_of(k.a, k.m);
    std::string out = "a=" + std::to_string(k.a) + " " + kind_name(s.kind) + " j=" + to_string(s.j);
    auto list = [&](const char* name, const std::vector<IndexVector>& v) {
        if (v.empty()) return;
        out += std::string(" ") + name + "=[";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + to_string(v[i]);
        out += "]";
    };
    list("h2", k.d.h2);
    list("h4", k.d.h4);
    list("k", k.d.k);
    return out;
}

// control condition on one term: prod kappa_h <= prod j* (Sobolev) or the
// sum of kappa^theta against the sum of (j*)^theta (Gevrey)
inline bool control_condition(const Key& k, const StructureOptions& opt) {
    Shape s = shape_of(k.a, k.m);
    auto js = decreasing_moduli(s.j);
    std::vector<int> kh;
    for (auto* v : {&k.d.h2, &k.d.h4})
        for (auto& D : *v) kh.push_back(kappa(D));
    if (kh.empty()) return true;
    if (opt.strict_control && !js.empty()) js.erase(js.begin());
    if (opt.weight.is_gevrey()) {
        const double th = opt.weight.theta;
        double lhs = 0, rhs = 0;
        for (int x : kh) lhs += std::pow(x, th);
        for (int x : js) rhs += std::pow(x, th);
        return lhs <= rhs * (1 + 1e-12);
    }
    double lhs = 0, rhs = 0;
    for (int x : kh) lhs += std::log(static_cast<double>(x));
    for (int x : js) rhs += std::log(static_cast<double>(x));
    return lhs <= rhs + 1e-9;
}

inline StructureReport check_structure(const FieldBase& Q, const StructureOptions& opt = {}) {
    StructureReport rep;
    const int N = Q.cutoff();
    std::map<std::pair<int, Mono>, std::size_t> per_num;
    for (auto& [k, c] : Q.raw()) {
        ++rep.terms;
        if (!is_resonant_key(k)) rep.fail("numerator not resonant: " + describe_key(k));
        const int nj = zeta_count(k.m);
        if (term_order(k) != Q.order()) rep.fail("order bookkeeping: " + describe_key(k));
        for (auto* v : {&k.d.h2, &k.d.h4, &k.d.k})
            for (auto& D : *v) {
                if (!is_irreducible_element(D, N)) rep.fail("divisor index not irreducible: " + describe_key(k));
                if (static_cast<int>(D.size()) > nj) rep.fail("divisor index longer than numerator: " + describe_key(k));
            }
        if (!k.d.empty() && nj < 2) rep.fail("numerator shorter than 2: " + describe_key(k));
        if (!control_condition(k, opt)) rep.fail("control condition: " + describe_key(k));
        rep.max_descriptors_per_numerator = std::max(rep.max_descriptors_per_numerator, ++per_num[{k.a, k.m}]);
    }
    return rep;
}

struct StructureError : std::logic_error {
    using std::logic_error::logic_error;
};

inline void require_structure(const FieldBase& Q, const StructureOptions& opt, const char* what) {
    auto rep = check_structure(Q, opt);
    if (!rep.ok) throw StructureError(std::string(what) + ": " + rep.violations.front());
}

// [Q1, Q2] for Q1 reversible and Q2 anti-reversible, with structure checked on
// both inputs and on the output.
inline RationalVF rational_commutator(const RationalVF& Q1, const RationalVF& Q2, const StructureOptions& opt = {}) {
    if (!Q1.is_reversible()) throw BracketError("rational_commutator: first argument must be reversible");
    if (!Q2.is_anti_reversible()) throw BracketError("rational_commutator: second argument must be anti-reversible");
    require_structure(Q1, opt, "first argument");
    require_structure(Q2, opt, "second argument");
    const int N = std::max(Q1.cutoff(), Q2.cutoff());
    RationalVF out = RationalVF::from_terms(Q1.order() + Q2.order(), N, bracket(Q1.raw(), Q2.raw(), N));
    if (!out.is_reversible()) throw BracketError("rational commutator produced a non-reversible field");
    require_structure(out, opt, "commutator output");
    return out;
}

struct DivisorRefusal : std::runtime_error {
    IndexVector witness;
    DivisorOrder order;
    double value;
    double threshold;
    DivisorRefusal(IndexVector w, DivisorOrder o, double v, double t)
        : std::runtime_error("divisor " + std::string(o == DivisorOrder::two ? "Omega2" : "Omega4") + " at " +
                             to_string(w) + " is " + std::to_string(v) + ", below " + std::to_string(t)),
          witness(std::move(w)), order(o), value(v), threshold(t) {}
};

inline constexpr double kRefusalRelative = 1e-12;
inline constexpr double kRefusalFloor = 1e-300;

// Numeric evaluation at a fixed point z. Divisor values and gradients are
// cached, so one evaluator serves many fields at the same z.
class Evaluator {
public:
    Evaluator(const ComplexSeq& z, int N) : z_(z), N_(N), table_(FreqContext::from_z(z, N)) {
        double n2 = 0;
        for (int a = 1; a <= N; ++a) n2 += std::norm(z(a));
        threshold_ = std::max(kRefusalRelative * n2, kRefusalFloor);
    }

    int cutoff() const { return N_; }
    const ComplexSeq& point() const { return z_; }
    const FreqContext& context() const { return table_.ctx; }

    double omega(DivisorOrder ord, const IndexVector& D) {
        auto& cache = ord == DivisorOrder::two ? om2_ : om4_;
        auto it = cache.find(D);
        if (it != cache.end()) return it->second;
        double v = table_.Omega(ord, D);
        if (!(std::abs(v) >= threshold_)) throw DivisorRefusal(D, ord, v, threshold_);
        return cache.emplace(D, v).first->second;
    }

    const std::vector<double>& omega_gradient(DivisorOrder ord, const IndexVector& D) {
        auto& cache = ord == DivisorOrder::two ? g2_ : g4_;
        auto it = cache.find(D);
        if (it != cache.end()) return it->second;
        std::vector<double> g(N_ + 1, 0.0);
        for (int b = 1; b <= N_; ++b) g[b] = dbig_omega(ord, D, table_.ctx, b);
        return cache.emplace(D, std::move(g)).first->second;
    }

    double inverse_divisor(const Desc& d) {
        double p = 1.0;
        for (auto& D : d.h2) p *= omega(DivisorOrder::two, D);
        for (auto& D : d.h4) p *= omega(DivisorOrder::four, D);
        for (auto& D : d.k) p *= omega(DivisorOrder::four, D);
        return 1.0 / p;
    }

    ComplexSeq eval(const FieldBase& f) {
        ComplexSeq out(std::max(N_, f.cutoff()));
        for (auto& [k, c] : f.raw()) out.at(k.a) += c.to_cd() * eval_mono(k.m, z_) * inverse_divisor(k.d);
        return out;
    }

    // D f(z)[w], w the z-part of the tangent (the conj part is its conjugate)
    ComplexSeq jvp(const FieldBase& f, const ComplexSeq& w) {
        std::vector<double> dI(N_ + 1, 0.0);
        for (int b = 1; b <= N_; ++b) dI[b] = 2.0 * std::real(std::conj(z_(b)) * w(b));
        ComplexSeq out(std::max(N_, f.cutoff()));
        for (auto& [k, c] : f.raw()) {
            const double F = inverse_divisor(k.d);
            cd dm{0.0, 0.0};
            for (auto& v : k.m) {
                if (v.p > 0) dm += static_cast<double>(v.p) * eval_mono(mono_shift(k.m, v.mode, -1, 0), z_) * w(v.mode);
                if (v.q > 0)
                    dm += static_cast<double>(v.q) * eval_mono(mono_shift(k.m, v.mode, 0, -1), z_) * std::conj(w(v.mode));
            }
            double dlog = 0.0;  // d log(prod Omega)
            auto acc = [&](DivisorOrder ord, const IndexVector& D) {
                const auto& g = omega_gradient(ord, D);
                double s = 0.0;
                for (int b = 1; b <= N_; ++b) s += g[b] * dI[b];
                dlog += s / omega(ord, D);
            };
            for (auto& D : k.d.h2) acc(DivisorOrder::two, D);
            for (auto& D : k.d.h4) acc(DivisorOrder::four, D);
            for (auto& D : k.d.k) acc(DivisorOrder::four, D);
            out.at(k.a) += c.to_cd() * F * (dm - eval_mono(k.m, z_) * dlog);
        }
        return out;
    }

    // [X, Y](z) = DX[Y] - DY[X]
    ComplexSeq bracket(const FieldBase& X, const FieldBase& Y) {
        ComplexSeq x = eval(X), y = eval(Y);
        ComplexSeq a = jvp(X, y), b = jvp(Y, x);
        return a - b;
    }

    double di(const FieldBase& chi, int a) { return 2.0 * std::real(std::conj(z_(a)) * eval(chi)(a)); }

private:
    ComplexSeq z_;
    int N_;
    FrequencyTable table_;
    double threshold_;
    std::map<IndexVector, double> om2_, om4_;
    std::map<IndexVector, std::vector<double>> g2_, g4_;
};

inline ComplexSeq evaluate_vf(const FieldBase& Q, const ComplexSeq& z, int N) { return Evaluator(z, N).eval(Q); }

// DI_a[chi](z) = conj(z_a) chi_a(z) + z_a conj(chi_a(z))
inline double di_functional(int a, const FieldBase& chi, const ComplexSeq& z, int N) {
    return Evaluator(z, N).di(chi, a);
}

// sup over pieces of the Euclidean norm; the denominator of relative residuals
inline double residual_scale(std::initializer_list<const ComplexSeq*> pieces) {
    double s = 0.0;
    for (auto* p : pieces) s = std::max(s, l2_norm(*p));
    return s;
}

}  // namespace kirchhoff::nf

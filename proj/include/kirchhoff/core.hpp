#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kirchhoff {

using cd = std::complex<double>;

struct WeightSpec {
    enum class Kind { sobolev, gevrey };
    Kind kind = Kind::sobolev;
    double s = 0.0;
    double rho = 0.0;
    double theta = 1.0;

    static WeightSpec sobolev(double s) {
        if (!(s >= 0.0)) throw std::invalid_argument("sobolev weight needs s >= 0");
        WeightSpec w;
        w.kind = Kind::sobolev;
        w.s = s;
        return w;
    }
    static WeightSpec gevrey(double rho, double theta) {
        if (!(rho > 0.0)) throw std::invalid_argument("gevrey weight needs rho > 0");
        if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("gevrey weight needs theta in (0,1]");
        WeightSpec w;
        w.kind = Kind::gevrey;
        w.rho = rho;
        w.theta = theta;
        return w;
    }

    bool is_gevrey() const { return kind == Kind::gevrey; }

    double operator()(double a) const {
        return is_gevrey() ? std::exp(rho * std::pow(a, theta)) : std::pow(a, s);
    }
    // w(a)^2, used by the divisor thresholds and the action-drift functional
    double sq(double a) const {
        return is_gevrey() ? std::exp(2.0 * rho * std::pow(a, theta)) : std::pow(a, 2.0 * s);
    }
    // log of w(a), handy for the Gevrey control condition sum_k kappa^theta
    double log_weight(double a) const {
        return is_gevrey() ? rho * std::pow(a, theta) : s * std::log(a);
    }
    std::string describe() const {
        if (is_gevrey()) return "gevrey(rho=" + std::to_string(rho) + ",theta=" + std::to_string(theta) + ")";
        return "sobolev(s=" + std::to_string(s) + ")";
    }
};

// Dense storage of modes 1..M; anything past M reads as zero.
class ComplexSeq {
public:
    ComplexSeq() = default;
    explicit ComplexSeq(int M) : v_(static_cast<std::size_t>(M), cd{}) {
        if (M < 1) throw std::invalid_argument("ComplexSeq truncation must be >= 1");
    }
    ComplexSeq(int M, std::initializer_list<std::pair<int, cd>> entries) : ComplexSeq(M) {
        for (auto& [a, c] : entries) set(a, c);
    }

    int M() const { return static_cast<int>(v_.size()); }

    cd operator()(int a) const {
        if (a < 1 || a > M()) return cd{};
        return v_[static_cast<std::size_t>(a - 1)];
    }
    void set(int a, cd c) {
        if (a < 1 || a > M()) throw std::out_of_range("mode outside truncation");
        v_[static_cast<std::size_t>(a - 1)] = c;
    }
    cd& at(int a) {
        if (a < 1 || a > M()) throw std::out_of_range("mode outside truncation");
        return v_[static_cast<std::size_t>(a - 1)];
    }
    double action(int a) const { return std::norm((*this)(a)); }

    const std::vector<cd>& data() const { return v_; }
    std::vector<cd>& data() { return v_; }

    ComplexSeq conj() const {
        ComplexSeq r = *this;
        for (auto& c : r.v_) c = std::conj(c);
        return r;
    }
    ComplexSeq& operator*=(cd c) {
        for (auto& x : v_) x *= c;
        return *this;
    }
    ComplexSeq& operator+=(const ComplexSeq& o) {
        if (o.M() > M()) v_.resize(o.v_.size());
        for (int a = 1; a <= o.M(); ++a) at(a) += o(a);
        return *this;
    }
    ComplexSeq& operator-=(const ComplexSeq& o) {
        if (o.M() > M()) v_.resize(o.v_.size());
        for (int a = 1; a <= o.M(); ++a) at(a) -= o(a);
        return *this;
    }
    friend ComplexSeq operator*(cd c, ComplexSeq z) { return z *= c; }
    friend ComplexSeq operator+(ComplexSeq x, const ComplexSeq& y) { return x += y; }
    friend ComplexSeq operator-(ComplexSeq x, const ComplexSeq& y) { return x -= y; }

private:
    std::vector<cd> v_;
};

inline double weighted_norm(const ComplexSeq& z, const WeightSpec& w) {
    double acc = 0.0;
    for (int a = 1; a <= z.M(); ++a) acc += w.sq(a) * std::norm(z(a));
    return std::sqrt(acc);
}

inline double sup_norm(const ComplexSeq& z) {
    double m = 0.0;
    for (auto& c : z.data()) m = std::max(m, std::abs(c));
    return m;
}

inline double l2_norm(const ComplexSeq& z) {
    double acc = 0.0;
    for (auto& c : z.data()) acc += std::norm(c);
    return std::sqrt(acc);
}

struct MonomialIndex {
    int delta = 0;
    int a = 1;

    MonomialIndex conj() const { return {-delta, a}; }
    int modulus() const { return a; }

    friend bool operator==(const MonomialIndex&, const MonomialIndex&) = default;
};

// 0 < -1 < 1 inside one mode
inline int delta_rank(int d) { return d == 0 ? 0 : (d == -1 ? 1 : 2); }

inline bool operator<(const MonomialIndex& x, const MonomialIndex& y) {
    if (x.a != y.a) return x.a < y.a;
    return delta_rank(x.delta) < delta_rank(y.delta);
}

using IndexVector = std::vector<MonomialIndex>;

inline IndexVector canonicalize(IndexVector v) {
    std::stable_sort(v.begin(), v.end());
    return v;
}

inline bool is_canonical(const IndexVector& v) { return std::is_sorted(v.begin(), v.end()); }

inline IndexVector conj(const IndexVector& v) {
    IndexVector r;
    r.reserve(v.size());
    for (auto& j : v) r.push_back(j.conj());
    return canonicalize(std::move(r));
}

inline long delta_of(const IndexVector& v) {
    long d = 0;
    for (auto& j : v) d += static_cast<long>(j.delta) * j.a;
    return d;
}

// j_1^* >= j_2^* >= ...
inline std::vector<int> decreasing_moduli(const IndexVector& v) {
    std::vector<int> m;
    m.reserve(v.size());
    for (auto& j : v) m.push_back(j.a);
    std::sort(m.begin(), m.end(), std::greater<>());
    return m;
}

inline int mu_min(const IndexVector& v) {
    if (v.empty()) throw std::domain_error("mu_min of empty index vector");
    int m = v.front().a;
    for (auto& j : v) m = std::min(m, j.a);
    return m;
}

inline cd zeta_value(const MonomialIndex& j, const ComplexSeq& z) {
    cd x = z(j.a);
    switch (j.delta) {
        case 1: return x * x;
        case -1: return std::conj(x) * std::conj(x);
        case 0: return cd{std::norm(x), 0.0};
    }
    throw std::invalid_argument("monomial index delta must be -1, 0 or 1");
}

inline cd zeta_value(const IndexVector& v, const ComplexSeq& z) {
    cd p{1.0, 0.0};
    for (auto& j : v) p *= zeta_value(j, z);
    return p;
}

inline std::string to_string(const MonomialIndex& j) {
    return "(" + std::to_string(j.delta) + "," + std::to_string(j.a) + ")";
}

inline std::string to_string(const IndexVector& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += to_string(v[i]);
    }
    return s + ")";
}

}  // namespace kirchhoff

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "core.hpp"

namespace kirchhoff {

// Real sine-basis coefficients, modes 1..M.
struct UVState {
    std::vector<double> u, v;

    UVState() = default;
    explicit UVState(int M) : u(static_cast<std::size_t>(M), 0.0), v(static_cast<std::size_t>(M), 0.0) {
        if (M < 1) throw std::invalid_argument("UVState truncation must be >= 1");
    }
    int M() const { return static_cast<int>(u.size()); }
    double& U(int a) { return u[static_cast<std::size_t>(a - 1)]; }
    double& V(int a) { return v[static_cast<std::size_t>(a - 1)]; }
    double U(int a) const { return u[static_cast<std::size_t>(a - 1)]; }
    double V(int a) const { return v[static_cast<std::size_t>(a - 1)]; }
};

// sum_b b^{2s} u_b^2
inline double sobolev_sq(const std::vector<double>& x, double s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::pow(static_cast<double>(i + 1), 2.0 * s) * x[i] * x[i];
    return acc;
}

// ||u||^2_{s+1/2} + ||v||^2_{s-1/2}
inline double data_norm_sq(const UVState& st, double s) {
    return sobolev_sq(st.u, s + 0.5) + sobolev_sq(st.v, s - 0.5);
}

struct PsiState {
    ComplexSeq psi;
};

struct EtaState {
    ComplexSeq eta;
    double Q = 0.0;  // Q(eta, conj eta)
};

struct ZState {
    ComplexSeq z;
};

inline PsiState uv_to_psi(const UVState& st) {
    PsiState p{ComplexSeq(st.M())};
    for (int a = 1; a <= st.M(); ++a) {
        double ra = std::sqrt(static_cast<double>(a));
        p.psi.set(a, cd(ra * st.U(a), st.V(a) / ra) / std::sqrt(2.0));
    }
    return p;
}

inline UVState psi_to_uv(const PsiState& p) {
    UVState st(p.psi.M());
    for (int a = 1; a <= st.M(); ++a) {
        double ra = std::sqrt(static_cast<double>(a));
        cd x = p.psi(a) * std::sqrt(2.0);
        st.U(a) = x.real() / ra;
        st.V(a) = x.imag() * ra;
    }
    return st;
}

// 1/4 sum_b b |x_b + conj x_b|^2 = sum_b b (Re x_b)^2
inline double compute_Q(const ComplexSeq& x) {
    double acc = 0.0;
    for (int b = 1; b <= x.M(); ++b) acc += b * x(b).real() * x(b).real();
    return acc;
}
inline double compute_Q(const PsiState& p) { return compute_Q(p.psi); }

// Inverse of x -> x sqrt(1+2x) on x >= 0.
inline double varphi(double y) {
    if (!(y >= 0.0)) throw std::domain_error("varphi needs y >= 0");
    if (y == 0.0) return 0.0;
    const double y2 = y * y;
    auto g = [&](double x) { return x * x * (1.0 + 2.0 * x) - y2; };
    double lo = 0.0, hi = std::max(1.0, y);  // g(hi) >= 0 since hi^2(1+2hi) >= y^2
    double x = y / std::sqrt(1.0 + 2.0 * y);
    for (int it = 0; it < 200; ++it) {
        double gx = g(x);
        if (gx < 0) lo = x; else hi = x;
        double dg = 2.0 * x + 6.0 * x * x;
        double nx = (dg > 0) ? x - gx / dg : 0.5 * (lo + hi);
        if (!(nx > lo && nx < hi)) nx = 0.5 * (lo + hi);
        if (std::abs(nx - x) <= 1e-15 * nx) return nx;
        x = nx;
    }
    return x;
}

inline double rho_of(double x) { return x / (1.0 + x + std::sqrt(1.0 + 2.0 * x)); }

inline EtaState psi_to_eta(const PsiState& p) {
    const double Qpsi = compute_Q(p);
    const double r = rho_of(Qpsi);
    if (!(r < 1.0)) throw std::domain_error("rho(Q) must be < 1");
    const double scale = 1.0 / std::sqrt(1.0 - r * r);
    EtaState e{ComplexSeq(p.psi.M()), 0.0};
    for (int a = 1; a <= p.psi.M(); ++a) e.eta.set(a, (p.psi(a) + r * std::conj(p.psi(a))) * scale);
    e.Q = compute_Q(e.eta);
    return e;
}

inline EtaState make_eta(ComplexSeq eta) {
    double Q = compute_Q(eta);
    return EtaState{std::move(eta), Q};
}

inline PsiState eta_to_psi(const EtaState& e) {
    const double Qpsi = varphi(e.Q);
    const double r = rho_of(Qpsi);
    const double scale = 1.0 / std::sqrt(1.0 - r * r);
    PsiState p{ComplexSeq(e.eta.M())};
    for (int a = 1; a <= e.eta.M(); ++a) p.psi.set(a, (e.eta(a) - r * std::conj(e.eta(a))) * scale);
    return p;
}

inline ZState eta_to_z(const EtaState& e) {
    ZState z{ComplexSeq(e.eta.M())};
    for (int a = 1; a <= e.eta.M(); ++a) z.z.set(a, static_cast<double>(a) * e.eta(a));
    return z;
}

inline EtaState z_to_eta(const ZState& z) {
    ComplexSeq eta(z.z.M());
    for (int a = 1; a <= z.z.M(); ++a) eta.set(a, z.z(a) / static_cast<double>(a));
    return make_eta(std::move(eta));
}

// 1/4 sum_b |z_b + conj z_b|^2 / b
inline double y_of_z(const ZState& z) {
    double acc = 0.0;
    for (int b = 1; b <= z.z.M(); ++b) {
        double re = z.z(b).real();
        acc += 4.0 * re * re / (4.0 * b);
    }
    return acc;
}

inline double time_dilation(const EtaState& e) { return std::sqrt(1.0 + 2.0 * varphi(e.Q)); }

inline ZState uv_to_z(const UVState& st) { return eta_to_z(psi_to_eta(uv_to_psi(st))); }
inline UVState z_to_uv(const ZState& z) { return psi_to_uv(eta_to_psi(z_to_eta(z))); }

}  // namespace kirchhoff

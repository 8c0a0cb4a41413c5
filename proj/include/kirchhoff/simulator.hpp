#pragma once

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "transforms.hpp"

namespace kirchhoff {

struct NumericalAbort : std::runtime_error {
    double t;
    NumericalAbort(double t_, const std::string& what)
        : std::runtime_error(what + " at t=" + std::to_string(t_)), t(t_) {}
};

enum class Scheme { strang_split, rk4 };

struct SimConfig {
    double dt = 1e-3;
    double T = 1.0;
    Scheme scheme = Scheme::strang_split;
    int M = 16;
    int record_stride = 1;
    int split_order = 4;          // 2: single symmetric step, 4: triple-jump composition
    bool enforce_resolution = true;  // dt <= 0.1/M
    bool linear_only = false;     // drop the ||u||_1^2 coupling
    bool keep_states = false;
    WeightSpec weight = WeightSpec::sobolev(0.0);

    void validate() const {
        if (!(dt > 0)) throw std::invalid_argument("dt must be > 0");
        if (!(T >= 0)) throw std::invalid_argument("T must be >= 0");
        if (M < 1) throw std::invalid_argument("M must be >= 1");
        if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
        if (split_order != 2 && split_order != 4) throw std::invalid_argument("split_order must be 2 or 4");
        if (enforce_resolution && dt > 0.1 / M + 1e-15) throw std::invalid_argument("dt exceeds 0.1/M");
    }
};

inline double stiffness_sum(const std::vector<double>& u) {
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double a = static_cast<double>(i + 1);
        acc += a * a * u[i] * u[i];
    }
    return acc;
}

struct UVTangent {
    std::vector<double> du, dv;
};

inline UVTangent rhs_uv(const UVState& st, bool linear_only = false) {
    const double kappa = 1.0 + (linear_only ? 0.0 : stiffness_sum(st.u));
    UVTangent d{st.v, std::vector<double>(st.u.size())};
    for (std::size_t i = 0; i < st.u.size(); ++i) {
        double a = static_cast<double>(i + 1);
        d.dv[i] = -kappa * a * a * st.u[i];
    }
    return d;
}

inline double energy(const UVState& st) {
    double kin = 0.0;
    for (double x : st.v) kin += x * x;
    double p = stiffness_sum(st.u);
    return 0.5 * kin + 0.5 * p + 0.25 * p * p;
}

inline std::vector<double> actions(const UVState& st) {
    std::vector<double> I(st.u.size());
    for (int a = 1; a <= st.M(); ++a) I[a - 1] = 0.5 * (a * st.U(a) * st.U(a) + st.V(a) * st.V(a) / a);
    return I;
}
inline std::vector<double> actions(const ComplexSeq& x) {
    std::vector<double> I(static_cast<std::size_t>(x.M()));
    for (int a = 1; a <= x.M(); ++a) I[a - 1] = std::norm(x(a));
    return I;
}
inline std::vector<double> actions(const PsiState& p) { return actions(p.psi); }
inline std::vector<double> actions(const ZState& z) { return actions(z.z); }

namespace detail {

// exact flow of u'' = -kappa a^2 u over time t
inline void rotate(UVState& st, double kappa, double t) {
    const double sk = std::sqrt(kappa);
    for (int a = 1; a <= st.M(); ++a) {
        double w = a * sk;
        double c = std::cos(w * t), s = std::sin(w * t);
        double u = st.U(a), v = st.V(a);
        st.U(a) = u * c + v / w * s;
        st.V(a) = -u * w * s + v * c;
    }
}

// Rotation at the stiffness of the half-step state, solved by fixed point.
// Symmetric in time, so the composition below stays reversible.
inline void midpoint_rotation(UVState& st, double h, bool linear_only) {
    if (linear_only) {
        rotate(st, 1.0, h);
        return;
    }
    double kappa = 1.0 + stiffness_sum(st.u);
    for (int it = 0; it < 100; ++it) {
        UVState half = st;
        rotate(half, kappa, 0.5 * h);
        double k2 = 1.0 + stiffness_sum(half.u);
        bool done = std::abs(k2 - kappa) <= 1e-16 * kappa;
        kappa = k2;
        if (done) break;
    }
    rotate(st, kappa, h);
}

inline void rk4_step(UVState& st, double h, bool linear_only) {
    auto axpy = [](const UVState& x, const UVTangent& d, double c) {
        UVState y = x;
        for (std::size_t i = 0; i < y.u.size(); ++i) {
            y.u[i] += c * d.du[i];
            y.v[i] += c * d.dv[i];
        }
        return y;
    };
    UVTangent k1 = rhs_uv(st, linear_only);
    UVTangent k2 = rhs_uv(axpy(st, k1, 0.5 * h), linear_only);
    UVTangent k3 = rhs_uv(axpy(st, k2, 0.5 * h), linear_only);
    UVTangent k4 = rhs_uv(axpy(st, k3, h), linear_only);
    for (std::size_t i = 0; i < st.u.size(); ++i) {
        st.u[i] += h / 6.0 * (k1.du[i] + 2 * k2.du[i] + 2 * k3.du[i] + k4.du[i]);
        st.v[i] += h / 6.0 * (k1.dv[i] + 2 * k2.dv[i] + 2 * k3.dv[i] + k4.dv[i]);
    }
}

inline bool finite_state(const UVState& st) {
    for (double x : st.u) if (!std::isfinite(x)) return false;
    for (double x : st.v) if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace detail

inline UVState step(UVState st, const SimConfig& cfg, double t_now = 0.0) {
    const double h = cfg.dt;
    if (cfg.scheme == Scheme::rk4) {
        detail::rk4_step(st, h, cfg.linear_only);
    } else if (cfg.split_order == 2) {
        detail::midpoint_rotation(st, h, cfg.linear_only);
    } else {
        const double c = std::cbrt(2.0);
        const double w1 = 1.0 / (2.0 - c), w0 = -c / (2.0 - c);
        detail::midpoint_rotation(st, w1 * h, cfg.linear_only);
        detail::midpoint_rotation(st, w0 * h, cfg.linear_only);
        detail::midpoint_rotation(st, w1 * h, cfg.linear_only);
    }
    if (!detail::finite_state(st)) throw NumericalAbort(t_now + h, "non-finite state");
    return st;
}

struct Sample {
    double t = 0.0;
    double H = 0.0;
    double sup_drift = 0.0;   // sup_a w(a)^2 |I_a(t) - I_a(0)|, running max
    double znorm = 0.0;       // weighted norm of the z coordinates
    std::vector<double> I;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<UVState> states;
    double max_sup_drift = 0.0;
    double max_rel_energy_drift = 0.0;
    double max_znorm_ratio = 1.0;
    UVState final_state;
};

inline Trajectory simulate(const UVState& init, const SimConfig& cfg) {
    cfg.validate();
    if (init.M() != cfg.M) throw std::invalid_argument("state truncation differs from config M");
    Trajectory tr;
    const auto I0 = actions(init);
    const double H0 = energy(init);
    double zn0 = 0.0;
    try {
        zn0 = weighted_norm(uv_to_z(init).z, cfg.weight);
    } catch (const std::domain_error& e) {
        throw std::invalid_argument(std::string("initial state outside the transform domain: ") + e.what());
    }

    auto record = [&](const UVState& st, double t) {
        Sample s;
        s.t = t;
        s.H = energy(st);
        s.I = actions(st);
        double d = 0.0;
        for (int a = 1; a <= st.M(); ++a) d = std::max(d, cfg.weight.sq(a) * std::abs(s.I[a - 1] - I0[a - 1]));
        tr.max_sup_drift = std::max(tr.max_sup_drift, d);
        s.sup_drift = tr.max_sup_drift;
        try {
            s.znorm = weighted_norm(uv_to_z(st).z, cfg.weight);
        } catch (const std::domain_error& e) {
            throw NumericalAbort(t, std::string("left the transform domain: ") + e.what());
        }
        if (H0 > 0) tr.max_rel_energy_drift = std::max(tr.max_rel_energy_drift, std::abs(s.H - H0) / H0);
        if (zn0 > 0) tr.max_znorm_ratio = std::max(tr.max_znorm_ratio, s.znorm / zn0);
        tr.samples.push_back(std::move(s));
        if (cfg.keep_states) tr.states.push_back(st);
    };

    const long nsteps = static_cast<long>(std::llround(cfg.T / cfg.dt));
    UVState st = init;
    record(st, 0.0);
    for (long i = 1; i <= nsteps; ++i) {
        st = step(std::move(st), cfg, (i - 1) * cfg.dt);
        if (i % cfg.record_stride == 0 || i == nsteps) record(st, i * cfg.dt);
    }
    tr.final_state = st;
    return tr;
}

inline void write_csv(std::ostream& os, const Trajectory& tr) {
    const std::size_t M = tr.samples.empty() ? 0 : tr.samples.front().I.size();
    os << "t,H,sup_drift";
    for (std::size_t a = 1; a <= M; ++a) os << ",I_" << a;
    os << "\n" << std::setprecision(17);
    for (auto& s : tr.samples) {
        os << s.t << "," << s.H << "," << s.sup_drift;
        for (double x : s.I) os << "," << x;
        os << "\n";
    }
}

inline nlohmann::json to_json(const Trajectory& tr) {
    nlohmann::json j;
    j["final_sup_drift"] = tr.max_sup_drift;
    j["max_rel_energy_drift"] = tr.max_rel_energy_drift;
    j["max_znorm_ratio"] = tr.max_znorm_ratio;
    j["samples"] = tr.samples.size();
    if (!tr.samples.empty()) {
        j["t_final"] = tr.samples.back().t;
        j["H_final"] = tr.samples.back().H;
    }
    return j;
}

}  // namespace kirchhoff

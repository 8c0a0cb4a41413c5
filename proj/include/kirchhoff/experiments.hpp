#pragma once

// Drift sweep: nonresonant sampled data, run the wave equation to T = eps^-p,
// record the weighted action drift, fit log D against log eps.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "divisors.hpp"
#include "measure.hpp"
#include "simulator.hpp"
#include "transforms.hpp"

namespace kirchhoff {

struct SamplingFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DriftSweepConfig {
    std::vector<double> eps = {0.2, 0.1, 0.05};
    double s = 3.0;
    int N = 16;
    int M = 16;
    int r = 2;
    double gamma = 1e-3;
    double T_power = 2.0;  // T = eps^{-T_power}
    double dt = 0.1 / 16;
    long max_draws = 1000;  // candidate draws per eps before giving up
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const {
        if (eps.size() < 2) throw std::invalid_argument("drift sweep needs at least two eps values");
        for (double e : eps)
            if (!(e > 0)) throw std::invalid_argument("eps values must be > 0");
        if (M < N) throw std::invalid_argument("M must be >= N");
        if (!(dt > 0) || dt > 0.1 / M + 1e-15) throw std::invalid_argument("dt must lie in (0, 0.1/M]");
        if (max_draws < 1) throw std::invalid_argument("max_draws must be >= 1");
        NonResonanceParams p{r, N, gamma, WeightSpec::sobolev(s)};
        p.validate();
    }
};

struct DriftPoint {
    double eps = 0, T = 0;
    long sample_index = -1;
    long draws = 0;
    double D = 0;            // sup_t sup_a w(a)^2 |I_a(t) - I_a(0)|
    double norm_ratio = 1;   // sup_t ||z(t)|| / ||z(0)||
    double energy_drift = 0;
    double worst_ratio = 0;  // nonresonance margin of the chosen data
};

struct SlopeFit {
    double slope = 0, intercept = 0, stderr_slope = 0;
};

// ordinary least squares with intercept
inline SlopeFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) throw std::invalid_argument("fit_line needs two points");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (x.size() > 2) {
        double rss = 0;
        for (std::size_t i = 0; i < x.size(); ++i) rss += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
        f.stderr_slope = std::sqrt(rss / (n - 2) / sxx);
    }
    return f;
}

struct DriftSweepResult {
    std::vector<DriftPoint> points;
    SlopeFit fit;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["points"] = nlohmann::json::array();
        for (auto& p : points)
            j["points"].push_back({{"eps", p.eps}, {"T", p.T}, {"sample_index", p.sample_index}, {"draws", p.draws},
                                   {"D", p.D}, {"norm_ratio", p.norm_ratio}, {"energy_drift", p.energy_drift},
                                   {"worst_ratio", p.worst_ratio}});
        j["slope"] = fit.slope;
        j["slope_stderr"] = fit.stderr_slope;
        j["intercept"] = fit.intercept;
        return j;
    }
};

inline DriftPoint drift_point(const DriftSweepConfig& c, double eps) {
    NonResonanceParams p{c.r, c.N, c.gamma, WeightSpec::sobolev(c.s)};
    MeasureSpec ms;
    ms.weight = p.weight;
    ms.M = c.M;
    ms.seed = c.seed;
    DriftPoint pt;
    pt.eps = eps;
    pt.T = std::pow(eps, -c.T_power);
    ComplexSeq z;
    for (long i = 0; i < c.max_draws; ++i) {
        ComplexSeq cand = sample_actions(ms, static_cast<std::uint64_t>(i)).to_z();
        cand *= cd(eps, 0.0);
        auto rep = is_nonresonant(cand, p);
        pt.draws = i + 1;
        if (rep.in_set) {
            z = cand;
            pt.sample_index = i;
            pt.worst_ratio = rep.worst_ratio;
            break;
        }
    }
    if (pt.sample_index < 0) {
        std::ostringstream msg;
        msg << "no nonresonant sample in " << c.max_draws << " draws at eps=" << eps;
        throw SamplingFailure(msg.str());
    }
    SimConfig sc;
    sc.dt = c.dt;
    sc.T = pt.T;
    sc.M = c.M;
    sc.weight = WeightSpec::sobolev(c.s);
    sc.record_stride = 1;  // the sup over t needs every step
    auto tr = simulate(z_to_uv(ZState{z}), sc);
    pt.D = tr.max_sup_drift;
    pt.norm_ratio = tr.max_znorm_ratio;
    pt.energy_drift = tr.max_rel_energy_drift;
    return pt;
}

inline DriftSweepResult drift_sweep(const DriftSweepConfig& c) {
    c.validate();
    enumerate_irr_indices({c.r, c.N, c.gamma, WeightSpec::sobolev(c.s)});
    DriftSweepResult out;
    out.points.resize(c.eps.size());
    parallel_for(static_cast<long>(c.eps.size()), c.threads, [&](long i) { out.points[i] = drift_point(c, c.eps[i]); });
    std::vector<double> lx, ly;
    for (auto& p : out.points) {
        if (!(p.D > 0)) throw std::runtime_error("zero drift; the log-log fit is undefined");
        lx.push_back(std::log(p.eps));
        ly.push_back(std::log(p.D));
    }
    out.fit = fit_line(lx, ly);
    return out;
}

}  // namespace kirchhoff

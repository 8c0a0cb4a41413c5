#pragma once

// Gaussian sampling of actions and phases, and Monte-Carlo estimates of the
// non-resonant set and of single-divisor tails.

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <mutex>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "divisors.hpp"

namespace kirchhoff {

struct MeasureConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MeasureSpec {
    WeightSpec weight = WeightSpec::sobolev(3.0);
    int M = 8;
    double ball_radius = 0.5;
    long sample_count = 10000;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const {
        if (M < 1) throw MeasureConfigError("M must be >= 1");
        if (sample_count < 1) throw MeasureConfigError("sample_count must be >= 1");
        if (!(ball_radius > 0)) throw MeasureConfigError("ball_radius must be > 0");
        if (threads < 1) throw MeasureConfigError("threads must be >= 1");
    }

    // exponential rate of I_m: m^{2s} (Sobolev), e^{2 rho m^theta} m^2 (Gevrey)
    double rate(int m) const { return weight.is_gevrey() ? weight.sq(m) * m * m : weight.sq(m); }
    // ball weight: m^{2s-2} (Sobolev), e^{2 rho m^theta} (Gevrey)
    double ball_weight(int m) const { return weight.is_gevrey() ? weight.sq(m) : weight.sq(m) / (double(m) * m); }
};

struct ActionSample {
    std::vector<double> I;      // I_1..I_M
    std::vector<double> theta;  // phases
    long attempts = 0;          // draws needed to land in the ball

    ComplexSeq to_z() const {
        ComplexSeq z(static_cast<int>(I.size()));
        for (std::size_t m = 0; m < I.size(); ++m) z.set(static_cast<int>(m + 1), std::polar(std::sqrt(I[m]), theta[m]));
        return z;
    }
};

// Per-sample engine: the stream for sample i depends only on (seed, i).
inline std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t i, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

// one unconditioned draw
inline ActionSample draw_actions(const MeasureSpec& spec, std::mt19937_64& eng) {
    ActionSample s;
    s.I.resize(spec.M);
    s.theta.resize(spec.M);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    for (int m = 1; m <= spec.M; ++m) {
        std::exponential_distribution<double> ex(spec.rate(m));
        s.I[m - 1] = ex(eng);
        s.theta[m - 1] = ph(eng);
    }
    s.attempts = 1;
    return s;
}

inline double ball_value(const MeasureSpec& spec, const std::vector<double>& I) {
    double acc = 0.0;
    for (std::size_t m = 0; m < I.size(); ++m) acc += spec.ball_weight(static_cast<int>(m + 1)) * I[m];
    return acc;
}

inline constexpr long kMaxAttemptsPerSample = 100000;  // acceptance below 1e-5 is far past the 0.999 cap

inline ActionSample sample_actions(const MeasureSpec& spec, std::uint64_t index) {
    auto eng = sample_engine(spec.seed, index);
    for (long att = 1; att <= kMaxAttemptsPerSample; ++att) {
        ActionSample s = draw_actions(spec, eng);
        if (ball_value(spec, s.I) <= spec.ball_radius) {
            s.attempts = att;
            return s;
        }
    }
    throw MeasureConfigError("ball rejection rate exceeds 0.999");
}

template <class F>
void parallel_for(long n, int threads, F&& f) {
    if (threads <= 1 || n < 2) {
        for (long i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<long> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex mu;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            try {
                for (long i; (i = next.fetch_add(1)) < n;) f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
                next = n;
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

inline std::vector<ActionSample> sample_batch(const MeasureSpec& spec) {
    spec.validate();
    std::vector<ActionSample> out(spec.sample_count);
    parallel_for(spec.sample_count, spec.threads, [&](long i) { out[i] = sample_actions(spec, static_cast<std::uint64_t>(i)); });
    long att = 0;
    for (auto& s : out) att += s.attempts;
    if (1.0 - double(spec.sample_count) / double(att) > 0.999) throw MeasureConfigError("ball rejection rate exceeds 0.999");
    return out;
}

struct Proportion {
    long hits = 0;
    long n = 0;
    double fraction = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
};

// Wilson score interval at 95%
inline Proportion wilson(long hits, long n) {
    Proportion p;
    p.hits = hits;
    p.n = n;
    if (n <= 0) return p;
    const double z = 1.959963984540054, ph = double(hits) / n, z2 = z * z;
    p.fraction = ph;
    const double den = 1 + z2 / n;
    const double mid = (ph + z2 / (2.0 * n)) / den;
    const double half = z * std::sqrt(ph * (1 - ph) / n + z2 / (4.0 * n * n)) / den;
    p.ci_low = std::max(0.0, std::min(ph, mid - half));
    p.ci_high = std::min(1.0, std::max(ph, mid + half));
    return p;
}

inline bool measure_hypothesis(const NonResonanceParams& p, double eps) {
    return eps * eps <= 2.0 * p.gamma / ((p.r + 1) * std::pow(double(p.N), 4.0 * p.r + 2.0));
}

struct MeasureResult {
    NonResonanceParams params;
    double eps = 1.0;
    Proportion in_set;
    bool hypothesis_ok = true;
    std::string warning;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        return {{"gamma", params.gamma},  {"N", params.N},       {"r", params.r},
                {"eps", eps},             {"fraction", in_set.fraction}, {"ci_low", in_set.ci_low},
                {"ci_high", in_set.ci_high}, {"samples", in_set.n}, {"seed", seed},
                {"weight", params.weight.describe()}, {"hypothesis_ok", hypothesis_ok}, {"warning", warning}};
    }
};

inline MeasureResult estimate_on(const std::vector<ActionSample>& samples, const NonResonanceParams& p, double eps,
                                 std::uint64_t seed, int threads = 1) {
    p.validate();
    MeasureResult r;
    r.params = p;
    r.eps = eps;
    r.seed = seed;
    r.hypothesis_ok = measure_hypothesis(p, eps);
    if (!r.hypothesis_ok) r.warning = "eps^2 exceeds 2 gamma / ((r+1) N^(4r+2))";
    enumerate_irr_indices(p);  // fill the cache before the workers start
    std::vector<char> hit(samples.size(), 0);
    parallel_for(static_cast<long>(samples.size()), threads, [&](long i) {
        ComplexSeq z = samples[i].to_z();
        z *= cd(eps, 0.0);
        hit[i] = is_nonresonant(z, p).in_set ? 1 : 0;
    });
    long h = 0;
    for (char c : hit) h += c;
    r.in_set = wilson(h, static_cast<long>(samples.size()));
    return r;
}

inline MeasureResult estimate_measure(const NonResonanceParams& p, const MeasureSpec& spec, double eps) {
    return estimate_on(sample_batch(spec), p, eps, spec.seed, spec.threads);
}

// One sample set shared by the whole gamma grid, so the curve is monotone.
inline std::vector<MeasureResult> measure_scan(const NonResonanceParams& base, const MeasureSpec& spec, double eps,
                                               const std::vector<double>& gammas) {
    auto samples = sample_batch(spec);
    std::vector<MeasureResult> out;
    for (double g : gammas) {
        NonResonanceParams p = base;
        p.gamma = g;
        out.push_back(estimate_on(samples, p, eps, spec.seed, spec.threads));
    }
    return out;
}

struct LineFit {
    double slope = 0.0;
    double r2 = std::numeric_limits<double>::quiet_NaN();  // undefined when every y is zero
};

// least squares through the origin; R^2 = 1 - SS_res / sum y^2
inline LineFit fit_through_origin(const std::vector<double>& x, const std::vector<double>& y) {
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += x[i] * y[i];
        sxx += x[i] * x[i];
        syy += y[i] * y[i];
    }
    LineFit f;
    if (sxx > 0) f.slope = sxy / sxx;
    if (syy > 0) {
        double res = 0;
        for (std::size_t i = 0; i < x.size(); ++i) res += std::pow(y[i] - f.slope * x[i], 2);
        f.r2 = 1.0 - res / syy;
    }
    return f;
}

enum class TailKind { omega2, omega4_tilde };

// Omega~4_j = Omega2_j + 2(sum delta_k w~_{a_k} - w~_Delta), where w~ skips
// d in {a_1..a_l, Delta}.
inline double omega4_tilde(const IndexVector& j, const FreqContext& ctx) {
    const long D = delta_of(j);
    std::vector<int> skip;
    for (auto& x : j) skip.push_back(x.a);
    if (D > 0) skip.push_back(static_cast<int>(D));
    auto wt = [&](long a) {
        if (a <= 0) return 0.0;
        double acc = 0.0;
        for (int d = 1; d <= ctx.N; ++d) {
            if (std::find(skip.begin(), skip.end(), d) != skip.end()) continue;
            double Id = ctx.action(d);
            acc += Id * Id / (double(d) * d - double(a) * a);
        }
        return a / 16.0 * acc;
    };
    double acc = 0.0;
    for (auto& x : j)
        if (x.delta != 0) acc += x.delta * wt(x.a);
    return big_omega(DivisorOrder::two, j, ctx) + 2.0 * (acc - wt(D));
}

struct TailResult {
    Proportion p;
    double threshold_scale = 0.0;  // gamma' or gamma'' at unit norm
};

// P(|Omega_j(eps^2 I)| <= gamma') with gamma' = gamma eps^2 N^{-4l-2} kappa^{-2s} / 2,
// or the Omega~4 variant with gamma'' = gamma eps^2 N^{-4l-2} max(kappa^{-2s}, gamma eps^2).
inline TailResult divisor_tail(const IndexVector& j, const NonResonanceParams& p, const MeasureSpec& spec, double eps,
                               TailKind kind = TailKind::omega2) {
    p.validate();
    if (!is_irreducible_element(canonicalize(j), p.N)) throw std::invalid_argument("divisor_tail needs an irreducible index");
    const int l = static_cast<int>(j.size());
    const double base = p.gamma * eps * eps * std::pow(double(p.N), -4.0 * l - 2.0);
    const double wk = 1.0 / p.weight.sq(kappa(j));
    const double thr = kind == TailKind::omega2 ? 0.5 * base * wk : base * std::max(wk, p.gamma * eps * eps);
    auto samples = sample_batch(spec);
    long hits = 0;
    for (auto& s : samples) {
        std::vector<double> I(p.N, 0.0);
        for (int d = 1; d <= p.N && d <= spec.M; ++d) I[d - 1] = eps * eps * s.I[d - 1];
        FreqContext ctx(p.N, I);
        double v = kind == TailKind::omega2 ? big_omega(DivisorOrder::two, j, ctx) : omega4_tilde(j, ctx);
        if (std::abs(v) <= thr) ++hits;
    }
    return {wilson(hits, static_cast<long>(samples.size())), thr};
}

}  // namespace kirchhoff

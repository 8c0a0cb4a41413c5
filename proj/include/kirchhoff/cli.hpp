#pragma once

// Experiment drivers behind the kirchhoff command. Each command takes a
// parsed config, writes its files under Common::out and returns an exit code.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "divisors.hpp"
#include "experiments.hpp"
#include "measure.hpp"
#include "nf/verify.hpp"
#include "simulator.hpp"
#include "transforms.hpp"

namespace kirchhoff::cli {

inline constexpr const char* kVersion = "0.1.0";

enum Exit : int { exit_ok = 0, exit_config = 2, exit_numerical = 3, exit_sampling = 4, exit_verification = 5 };

struct Common {
    std::uint64_t seed = 1;
    std::string out = "out";
    int threads = 1;
    std::string config_text;  // resolved config, embedded in every output
};

inline nlohmann::json meta(const Common& c, const std::string& cmd) {
    return {{"artifact", "kirchhoff"}, {"version", kVersion}, {"command", cmd}, {"seed", c.seed}, {"config", c.config_text}};
}

inline std::string csv_header(const Common& c, const std::string& cmd) {
    std::ostringstream os;
    os << "# kirchhoff " << kVersion << " " << cmd << " seed=" << c.seed << "\n";
    std::istringstream in(c.config_text);
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) os << "# " << line << "\n";
    return os.str();
}

inline std::filesystem::path out_path(const Common& c, const std::string& name) {
    std::filesystem::create_directories(c.out);
    return std::filesystem::path(c.out) / name;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    std::ofstream f(p);
    f << std::setw(2) << j << "\n";
}

inline WeightSpec make_weight(const std::string& kind, double s, double rho, double theta) {
    if (kind == "sobolev") return WeightSpec::sobolev(s);
    if (kind == "gevrey") return WeightSpec::gevrey(rho, theta);
    throw std::invalid_argument("weight must be sobolev or gevrey");
}

// ---- simulate ----

struct SimulateCfg {
    int M = 16;
    double dt = 1e-3;
    double T = 1.0;
    std::string scheme = "strang";
    int split_order = 4;
    std::string init = "sample";  // zero | single | sample
    int mode = 1;
    double amplitude = 0.1;       // u_mode for init=single
    double eps = 0.1;             // scale for init=sample
    double s = 3.0;
    int stride = 1;
};

inline UVState initial_state(const SimulateCfg& c, std::uint64_t seed) {
    if (c.init == "zero") return UVState(c.M);
    if (c.init == "single") {
        if (c.mode < 1 || c.mode > c.M) throw std::invalid_argument("mode outside 1..M");
        UVState st(c.M);
        st.U(c.mode) = c.amplitude;
        return st;
    }
    if (c.init == "sample") {
        MeasureSpec ms;
        ms.weight = WeightSpec::sobolev(c.s);
        ms.M = c.M;
        ms.seed = seed;
        ComplexSeq z = sample_actions(ms, 0).to_z();
        z *= cd(c.eps, 0.0);
        return z_to_uv(ZState{z});
    }
    throw std::invalid_argument("init must be zero, single or sample");
}

inline int cmd_simulate(const Common& com, const SimulateCfg& c) {
    SimConfig sc;
    sc.M = c.M;
    sc.dt = c.dt;
    sc.T = c.T;
    if (c.scheme == "strang") sc.scheme = Scheme::strang_split;
    else if (c.scheme == "rk4") sc.scheme = Scheme::rk4;
    else throw std::invalid_argument("scheme must be strang or rk4");
    sc.split_order = c.split_order;
    sc.record_stride = c.stride;
    sc.weight = WeightSpec::sobolev(c.s);
    sc.validate();
    UVState init = initial_state(c, com.seed);
    Trajectory tr;
    try {
        tr = simulate(init, sc);
    } catch (const NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return exit_numerical;
    }
    {
        std::ofstream f(out_path(com, "trajectory.csv"));
        f << csv_header(com, "simulate");
        write_csv(f, tr);
    }
    nlohmann::json j = meta(com, "simulate");
    j["summary"] = to_json(tr);
    j["final_u"] = tr.final_state.u;
    j["final_v"] = tr.final_state.v;
    write_json(out_path(com, "simulate.json"), j);
    std::cout << j["summary"].dump() << "\n";
    return exit_ok;
}

// ---- drift-sweep ----

inline int cmd_drift_sweep(const Common& com, DriftSweepConfig c) {
    c.seed = com.seed;
    c.threads = com.threads;
    c.validate();
    enumerate_irr_indices({c.r, c.N, c.gamma, WeightSpec::sobolev(c.s)});
    std::filesystem::create_directories(std::filesystem::path(com.out) / "drift_points");
    DriftSweepResult res;
    res.points.resize(c.eps.size());
    try {
        parallel_for(static_cast<long>(c.eps.size()), c.threads, [&](long i) {
            res.points[i] = drift_point(c, c.eps[i]);
            DriftSweepResult one;
            one.points = {res.points[i]};
            auto j = one.to_json();
            write_json(std::filesystem::path(com.out) / "drift_points" / ("point_" + std::to_string(i) + ".json"), j["points"][0]);
        });
    } catch (const SamplingFailure& e) {
        std::cerr << "sampling failure: " << e.what() << "\n";
        return exit_sampling;
    }
    std::vector<double> lx, ly;
    for (auto& p : res.points) {
        lx.push_back(std::log(p.eps));
        ly.push_back(std::log(std::max(p.D, std::numeric_limits<double>::min())));
    }
    res.fit = fit_line(lx, ly);
    nlohmann::json j = meta(com, "drift-sweep");
    j["result"] = res.to_json();
    write_json(out_path(com, "drift_sweep.json"), j);
    {
        std::ofstream f(out_path(com, "drift_sweep.csv"));
        f << csv_header(com, "drift-sweep") << "eps,T,D,norm_ratio,energy_drift\n" << std::setprecision(17);
        for (auto& p : res.points) f << p.eps << "," << p.T << "," << p.D << "," << p.norm_ratio << "," << p.energy_drift << "\n";
    }
    std::cout << "slope " << res.fit.slope << " +- " << res.fit.stderr_slope << "\n";
    return exit_ok;
}

// ---- nf-verify ----

struct NfVerifyCli {
    nf::NfVerifyConfig cfg;
    std::string golden;  // optional file to compare K5 against
};

inline int cmd_nf_verify(const Common& com, NfVerifyCli c) {
    c.cfg.seed = com.seed;
    auto rep = nf::verify_normal_forms(c.cfg);
    if (!c.golden.empty()) {
        std::ifstream f(c.golden);
        if (!f) throw std::invalid_argument("cannot open golden file " + c.golden);
        nlohmann::json g = nlohmann::json::parse(f);
        bool same = g.at("N") == rep.golden["N"] && g.at("K5") == rep.golden["K5"];
        rep.checks.push_back({"K5 matches the golden file", true, same ? 0.0 : 1.0, 0, same});
    }
    nlohmann::json j = meta(com, "nf-verify");
    j["checks"] = nlohmann::json::array();
    for (auto& k : rep.checks) {
        j["checks"].push_back({{"name", k.name}, {"exact", k.exact}, {"residual", k.residual}, {"tol", k.tol}, {"pass", k.pass}});
        std::cout << (k.pass ? "PASS " : "FAIL ") << k.name << "  residual=" << k.residual << "\n";
    }
    j["pass"] = rep.ok();
    write_json(out_path(com, "nf_verify.json"), j);
    write_json(out_path(com, "golden.json"), rep.golden);
    return rep.ok() ? exit_ok : exit_verification;
}

// ---- measure ----

struct MeasureCli {
    int r = 2;
    int N = 8;
    int M = 0;  // 0: same as N
    std::vector<double> gammas = {0.02, 0.05, 0.1, 0.2};
    double eps = 1.0;
    std::string weight = "sobolev";
    double s = 3.0, rho = 0.5, theta = 0.5;
    long samples = 10000;
};

inline int cmd_measure(const Common& com, const MeasureCli& c) {
    NonResonanceParams p{c.r, c.N, c.gammas.empty() ? 0.1 : c.gammas.front(), make_weight(c.weight, c.s, c.rho, c.theta)};
    p.validate();
    MeasureSpec ms;
    ms.weight = p.weight;
    ms.M = c.M > 0 ? c.M : c.N;
    ms.sample_count = c.samples;
    ms.seed = com.seed;
    ms.threads = com.threads;
    auto gammas = c.gammas;
    std::sort(gammas.begin(), gammas.end());
    auto res = measure_scan(p, ms, c.eps, gammas);
    nlohmann::json j = meta(com, "measure");
    j["records"] = nlohmann::json::array();
    std::vector<double> x, y;
    for (auto& r : res) {
        j["records"].push_back(r.to_json());
        x.push_back(r.params.gamma);
        y.push_back(1.0 - r.in_set.fraction);
        std::cout << "gamma=" << r.params.gamma << " fraction=" << r.in_set.fraction << " [" << r.in_set.ci_low << ","
                  << r.in_set.ci_high << "]" << (r.hypothesis_ok ? "" : "  warning: " + r.warning) << "\n";
    }
    auto fit = fit_through_origin(x, y);
    j["complement_fit"] = {{"slope", fit.slope}, {"r2", std::isnan(fit.r2) ? nlohmann::json() : nlohmann::json(fit.r2)}};
    write_json(out_path(com, "measure.json"), j);
    return exit_ok;
}

// ---- resonance ----

struct ResonanceCli {
    int r = 2;
    int N = 8;
    double gamma = 1e-3;
    std::string weight = "sobolev";
    double s = 3.0, rho = 0.5, theta = 0.5;
    std::string z;      // "re:im,re:im,..." for modes 1,2,...; empty samples one state
    double eps = 0.1;   // scale of the sampled state
};

inline ComplexSeq parse_state(const std::string& text, int N) {
    ComplexSeq z(N);
    std::istringstream in(text);
    int a = 1;
    for (std::string tok; std::getline(in, tok, ','); ++a) {
        if (a > N) throw std::invalid_argument("state has more than N modes");
        double re = 0, im = 0;
        auto colon = tok.find(':');
        try {
            re = std::stod(tok.substr(0, colon));
            if (colon != std::string::npos) im = std::stod(tok.substr(colon + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad state entry '" + tok + "'");
        }
        z.set(a, cd(re, im));
    }
    return z;
}

inline nlohmann::json resonance_report(const ComplexSeq& z, const NonResonanceParams& p) {
    auto rep = is_nonresonant(z, p);
    nlohmann::json j;
    j["in_set"] = rep.in_set;
    j["verdict"] = rep.in_set ? "in U" : "not in U";
    j["reason"] = rep.reason;
    j["norm"] = rep.norm;
    if (!rep.witness.empty()) {
        const double n2 = rep.norm * rep.norm;
        FrequencyTable tab(FreqContext::from_z(z, p.N));
        j["witness"] = to_string(rep.witness);
        j["witness_order"] = rep.witness_order;
        j["worst_ratio"] = rep.worst_ratio;
        j["omega2"] = tab.Omega(DivisorOrder::two, rep.witness);
        j["omega4"] = tab.Omega(DivisorOrder::four, rep.witness);
        j["threshold2"] = threshold2(rep.witness, p.gamma, n2, p.N, p.weight);
        j["threshold4"] = threshold4(rep.witness, p.gamma, n2, p.N, p.weight);
    }
    return j;
}

inline int cmd_resonance(const Common& com, const ResonanceCli& c) {
    NonResonanceParams p{c.r, c.N, c.gamma, make_weight(c.weight, c.s, c.rho, c.theta)};
    p.validate();
    ComplexSeq z;
    if (!c.z.empty()) {
        z = parse_state(c.z, c.N);
    } else {
        MeasureSpec ms;
        ms.weight = p.weight;
        ms.M = c.N;
        ms.seed = com.seed;
        z = sample_actions(ms, 0).to_z();
        z *= cd(c.eps, 0.0);
    }
    nlohmann::json j = meta(com, "resonance");
    j["report"] = resonance_report(z, p);
    write_json(out_path(com, "resonance.json"), j);
    std::cout << j["report"]["verdict"].get<std::string>()
              << (j["report"]["reason"].get<std::string>().empty() ? "" : " (" + j["report"]["reason"].get<std::string>() + ")")
              << "\n";
    return exit_ok;
}

// ---- roundtrip ----

struct RoundtripCli {
    int M = 16;
    int count = 1000;
    double s = 1.0;  // data norm ||u||^2_{s+1/2} + ||v||^2_{s-1/2} <= 1
    double tol = 1e-12;
};

// random state with data norm uniform in [0, 1]
inline UVState random_uv(int M, double s, std::mt19937_64& eng) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> un;
    UVState st(M);
    for (int a = 1; a <= M; ++a) {
        st.U(a) = g(eng) * std::pow(a, -s - 1.0);
        st.V(a) = g(eng) * std::pow(a, -s);
    }
    const double n = std::sqrt(data_norm_sq(st, s)), target = un(eng);
    if (n > 0)
        for (int a = 1; a <= M; ++a) st.U(a) *= target / n, st.V(a) *= target / n;
    return st;
}

inline int cmd_roundtrip(const Common& com, const RoundtripCli& c) {
    if (c.M < 1 || c.count < 1) throw std::invalid_argument("M and count must be >= 1");
    double worst = 0, worst_q = 0;
    for (int i = 0; i < c.count; ++i) {
        auto eng = sample_engine(com.seed, static_cast<std::uint64_t>(i), 7);
        UVState st = random_uv(c.M, c.s, eng);
        UVState back = z_to_uv(uv_to_z(st));
        for (int a = 1; a <= c.M; ++a)
            worst = std::max({worst, std::abs(back.U(a) - st.U(a)), std::abs(back.V(a) - st.V(a))});
        PsiState p = uv_to_psi(st);
        EtaState e = psi_to_eta(p);
        const double Qp = compute_Q(p);
        worst_q = std::max(worst_q, std::abs(compute_Q(e.eta) - Qp * std::sqrt(1 + 2 * Qp)));
    }
    const bool pass = worst <= c.tol && worst_q <= c.tol;
    nlohmann::json j = meta(com, "roundtrip");
    j["max_coefficient_error"] = worst;
    j["max_q_identity_error"] = worst_q;
    j["pass"] = pass;
    write_json(out_path(com, "roundtrip.json"), j);
    std::cout << (pass ? "PASS" : "FAIL") << " roundtrip error=" << worst << " Q identity error=" << worst_q << "\n";
    return pass ? exit_ok : exit_verification;
}

}  // namespace kirchhoff::cli

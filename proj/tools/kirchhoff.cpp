// kirchhoff: experiment drivers. See README.md for the config file format.

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kirchhoff/cli.hpp"

namespace kc = kirchhoff::cli;

int main(int argc, char** argv) {
    CLI::App app{"Kirchhoff string: simulation, normal forms, non-resonance and measure experiments"};
    app.set_version_flag("--version", std::string("kirchhoff ") + kc::kVersion);
    app.set_config("--config", "", "key=value config file; [section] per subcommand");
    app.allow_config_extras(false);
    app.require_subcommand(1);

    kc::Common com;
    app.add_option("--seed", com.seed, "master seed")->capture_default_str();
    app.add_option("--out", com.out, "output directory")->capture_default_str();
    app.add_option("--threads", com.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    kc::SimulateCfg sim;
    auto* s = app.add_subcommand("simulate", "integrate the truncated equation, write trajectory CSV and JSON summary");
    s->add_option("--M", sim.M)->capture_default_str();
    s->add_option("--dt", sim.dt)->capture_default_str();
    s->add_option("--T", sim.T)->capture_default_str();
    s->add_option("--scheme", sim.scheme)->capture_default_str()->check(CLI::IsMember({"strang", "rk4"}));
    s->add_option("--split-order", sim.split_order)->capture_default_str()->check(CLI::IsMember({2, 4}));
    s->add_option("--init", sim.init)->capture_default_str()->check(CLI::IsMember({"zero", "single", "sample"}));
    s->add_option("--mode", sim.mode)->capture_default_str();
    s->add_option("--amplitude", sim.amplitude)->capture_default_str();
    s->add_option("--eps", sim.eps)->capture_default_str();
    s->add_option("--s", sim.s)->capture_default_str();
    s->add_option("--stride", sim.stride)->capture_default_str();

    kirchhoff::DriftSweepConfig drift;
    auto* d = app.add_subcommand("drift-sweep", "weighted action drift against eps on nonresonant sampled data");
    d->add_option("--eps", drift.eps)->capture_default_str();
    d->add_option("--s", drift.s)->capture_default_str();
    d->add_option("--N", drift.N)->capture_default_str();
    d->add_option("--M", drift.M)->capture_default_str();
    d->add_option("--r", drift.r)->capture_default_str();
    d->add_option("--gamma", drift.gamma)->capture_default_str();
    d->add_option("--T-power", drift.T_power, "T = eps^-p")->capture_default_str();
    d->add_option("--dt", drift.dt)->capture_default_str();
    d->add_option("--max-draws", drift.max_draws)->capture_default_str();

    kc::NfVerifyCli nfv;
    auto* n = app.add_subcommand("nf-verify", "normal form identities, K5 table and golden JSON");
    n->add_option("--N", nfv.cfg.N)->capture_default_str();
    n->add_option("--quintic-N", nfv.cfg.quintic_N)->capture_default_str();
    n->add_option("--septic-N", nfv.cfg.septic_N)->capture_default_str();
    n->add_option("--quintic-points", nfv.cfg.quintic_points)->capture_default_str();
    n->add_option("--z3z5-points", nfv.cfg.z3z5_points)->capture_default_str();
    n->add_option("--gamma", nfv.cfg.gamma)->capture_default_str();
    n->add_option("--s", nfv.cfg.s)->capture_default_str();
    n->add_option("--eps", nfv.cfg.eps)->capture_default_str();
    n->add_option("--tol", nfv.cfg.tol)->capture_default_str();
    n->add_option("--golden", nfv.golden, "golden JSON to compare K5 against");

    kc::MeasureCli mea;
    auto* m = app.add_subcommand("measure", "non-resonant fraction over a gamma grid");
    m->add_option("--r", mea.r)->capture_default_str();
    m->add_option("--N", mea.N)->capture_default_str();
    m->add_option("--M", mea.M, "sampling truncation, 0 for N")->capture_default_str();
    m->add_option("--gammas", mea.gammas)->capture_default_str();
    m->add_option("--eps", mea.eps)->capture_default_str();
    m->add_option("--weight", mea.weight)->capture_default_str()->check(CLI::IsMember({"sobolev", "gevrey"}));
    m->add_option("--s", mea.s)->capture_default_str();
    m->add_option("--rho", mea.rho)->capture_default_str();
    m->add_option("--theta", mea.theta)->capture_default_str();
    m->add_option("--samples", mea.samples)->capture_default_str();

    kc::ResonanceCli res;
    auto* r = app.add_subcommand("resonance", "non-resonance report for one state");
    r->add_option("--r", res.r)->capture_default_str();
    r->add_option("--N", res.N)->capture_default_str();
    r->add_option("--gamma", res.gamma)->capture_default_str();
    r->add_option("--weight", res.weight)->capture_default_str()->check(CLI::IsMember({"sobolev", "gevrey"}));
    r->add_option("--s", res.s)->capture_default_str();
    r->add_option("--rho", res.rho)->capture_default_str();
    r->add_option("--theta", res.theta)->capture_default_str();
    r->add_option("--z", res.z, "re:im,re:im,... for modes 1,2,...; omitted: sampled state");
    r->add_option("--eps", res.eps)->capture_default_str();

    kc::RoundtripCli rt;
    auto* t = app.add_subcommand("roundtrip", "uv -> psi -> eta -> z and back on random states");
    t->add_option("--M", rt.M)->capture_default_str();
    t->add_option("--count", rt.count)->capture_default_str();
    t->add_option("--s", rt.s)->capture_default_str();
    t->add_option("--tol", rt.tol)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kc::exit_config;
    }

    // resolved config: global keys and the active subcommand's section
    {
        const std::string active = app.get_subcommands().front()->get_name() + ".";
        std::istringstream in(app.config_to_str(true, false));
        for (std::string line; std::getline(in, line);) {
            const auto eq = line.find('='), dot = line.find('.');
            if (dot == std::string::npos || dot > eq || line.rfind(active, 0) == 0) com.config_text += line + "\n";
        }
    }
    try {
        if (*s) return kc::cmd_simulate(com, sim);
        if (*d) return kc::cmd_drift_sweep(com, drift);
        if (*n) return kc::cmd_nf_verify(com, nfv);
        if (*m) return kc::cmd_measure(com, mea);
        if (*r) return kc::cmd_resonance(com, res);
        if (*t) return kc::cmd_roundtrip(com, rt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kc::exit_config;
    } catch (const kirchhoff::NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return kc::exit_numerical;
    } catch (const kirchhoff::SamplingFailure& e) {
        std::cerr << "sampling failure: " << e.what() << "\n";
        return kc::exit_sampling;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kc::exit_verification;
    }
    return kc::exit_ok;
}

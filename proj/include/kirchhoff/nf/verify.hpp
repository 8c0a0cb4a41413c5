#pragma once

// Identity checks shared by the nf-verify command and the acceptance harness.

#include <algorithm>
#include <string>
#include <vector>

#include "../measure.hpp"
#include "homological.hpp"
#include "json.hpp"

namespace kirchhoff::nf {

struct IdentityCheck {
    std::string name;
    bool exact = false;  // symbolic equality, residual is a term count
    double residual = 0;
    double tol = 0;
    bool pass = false;
};

inline IdentityCheck exact_check(std::string name, const FieldBase& diff) {
    IdentityCheck c{std::move(name), true, static_cast<double>(diff.size()), 0, diff.empty()};
    return c;
}

// Input of the septic step: (1/2)[Z5 + K5, S + M] + K7, all on modes <= N.
inline RationalVF septic_input(const ResonantNF& nf3, const QuinticSolution& q) {
    const int N = nf3.N;
    RationalVF A = RationalVF::from_poly(nf3.K5() + z5_field(N));
    auto C = rational_commutator(A, q.S + q.M);
    RationalVF Q(3, N);
    for (auto& [k, c] : C.raw()) Q.add_raw(k, c * rat(1, 2));
    for (auto& [k, c] : nf3.K7().raw()) Q.add_raw(k, c);
    return Q;
}

// count points eps*z with z from the Sobolev-s measure and eps*z in U_gamma^N at depth r
inline std::vector<ComplexSeq> nonresonant_points(int N, int r, double gamma, double s, double eps, int count,
                                                  std::uint64_t seed, long max_draws = 100000) {
    NonResonanceParams p{r, N, gamma, WeightSpec::sobolev(s)};
    MeasureSpec ms;
    ms.weight = p.weight;
    ms.M = N;
    ms.seed = seed;
    std::vector<ComplexSeq> out;
    for (long i = 0; i < max_draws && static_cast<int>(out.size()) < count; ++i) {
        ComplexSeq z = sample_actions(ms, static_cast<std::uint64_t>(i)).to_z();
        z *= cd(eps, 0.0);
        if (is_nonresonant(z, p).in_set) out.push_back(std::move(z));
    }
    if (static_cast<int>(out.size()) < count) throw std::runtime_error("not enough nonresonant points");
    return out;
}

struct NfVerifyConfig {
    int N = 8;          // resonant normal form and K5 table
    int quintic_N = 6;  // rational quintic step
    int septic_N = 4;   // Z3 + Z5 solver
    int quintic_points = 100;
    int z3z5_points = 50;
    double gamma = 1e-3;
    double s = 3.0;
    double eps = 0.1;
    double tol = 1e-9;
    std::uint64_t seed = 1;
};

struct NfVerifyReport {
    std::vector<IdentityCheck> checks;
    nlohmann::json golden;  // K3, K5, Z5, chi3 at N; S, M at quintic_N
    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.pass; });
    }
};

inline IdentityCheck quintic_numeric_check(const QuinticSolution& q, const PolyVF& K5n, const std::vector<ComplexSeq>& pts,
                                           int N, double tol) {
    auto Z3 = RationalVF::from_poly(z3_field(N));
    auto K = RationalVF::from_poly(K5n);
    IdentityCheck c{"[Z3,S+M] + K5 - Z5 = 0 (numeric)", false, 0, tol, false};
    for (auto& z : pts) {
        Evaluator ev(z, N);
        auto b1 = ev.bracket(Z3, q.S), b2 = ev.bracket(Z3, q.M), k = ev.eval(K);
        c.residual = std::max(c.residual, l2_norm(b1 + b2 + k) / residual_scale({&b1, &b2, &k}));
    }
    c.pass = c.residual <= tol;
    return c;
}

inline IdentityCheck z3z5_numeric_check(const RationalVF& Q, const Z35Solution& s, const std::vector<ComplexSeq>& pts,
                                        int N, double tol) {
    auto Z3 = RationalVF::from_poly(z3_field(N));
    auto Z5 = RationalVF::from_poly(z5_field(N));
    IdentityCheck c{"[Z3+Z5,chi] + Q = Z_int + Z~_l + Z~_{l-1} (numeric)", false, 0, tol, false};
    for (auto& z : pts) {
        Evaluator ev(z, N);
        auto b1 = ev.bracket(Z3, s.chi), b2 = ev.bracket(Z5, s.chi), q = ev.eval(Q);
        auto r0 = ev.eval(s.Z_int), r1 = ev.eval(s.Znf_l), r2 = ev.eval(s.Znf_lm1);
        auto lhs = b1 + b2 + q;
        auto rhs = r0 + r1 + r2;
        c.residual = std::max(c.residual, l2_norm(lhs - rhs) / residual_scale({&b1, &b2, &q, &r0, &r1, &r2}));
    }
    c.pass = c.residual <= tol;
    return c;
}

inline NfVerifyReport verify_normal_forms(const NfVerifyConfig& cfg) {
    NfVerifyReport rep;
    auto& ch = rep.checks;
    const int N = cfg.N;

    // resonant normal form and the Z1 identities, with the generic commutator as oracle
    auto nf = resonant_normal_form(2, N);
    const PolyVF Z1 = z1_field(N);
    std::vector<PolyVF> X{Z1, taylor_vf(1, N), taylor_vf(2, N)};
    ch.push_back(exact_check("chi3 = closed form", nf.chi[1] - chi3_explicit(N)));
    ch.push_back(exact_check("[Z1,chi3] + P3 - K3 = 0", commutator(Z1, nf.chi[1]) + X[1] - nf.K3()));
    auto X1 = lie_transform(X, nf.chi[1], 2);
    ch.push_back(exact_check("[Z1,chi5] + P5' - K5 = 0", commutator(Z1, nf.chi[2]) + X1[2] - nf.K5()));
    ch.push_back(exact_check("K3 = Z3", nf.K3() - z3_field(N)));
    ch.push_back(exact_check("integrable part of K5 = Z5", integrable_part(nf.K5()) - z5_field(N)));
    rep.golden["N"] = N;
    rep.golden["K3"] = field_to_json(nf.K3(), "K3");
    rep.golden["K5"] = field_to_json(nf.K5(), "K5");
    rep.golden["Z5"] = field_to_json(z5_field(N), "Z5");
    rep.golden["chi3"] = field_to_json(nf.chi[1], "chi3");

    // rational quintic step
    {
        const int n = cfg.quintic_N;
        auto nfq = n == N ? nf : resonant_normal_form(2, n);
        auto K5n = nonintegrable_part(nfq.K5());
        auto q = quintic_rational_solve(K5n);
        auto rs = check_structure(q.S), rm = check_structure(q.M);
        ch.push_back({"S, M satisfy the rational structure", true, double(rs.violations.size() + rm.violations.size()), 0,
                      rs.ok && rm.ok});
        auto pts = nonresonant_points(n, 4, cfg.gamma, cfg.s, cfg.eps, cfg.quintic_points, cfg.seed);
        ch.push_back(quintic_numeric_check(q, K5n, pts, n, cfg.tol));
        rep.golden["quintic_N"] = n;
        rep.golden["S"] = field_to_json(q.S, "S");
        rep.golden["M"] = field_to_json(q.M, "M");
    }

    // Z3 + Z5 solver on the septic input
    {
        const int n = cfg.septic_N;
        auto nf3 = resonant_normal_form(3, n);
        auto q = quintic_rational_solve(nonintegrable_part(nf3.K5()));
        auto Q = septic_input(nf3, q);
        StructureOptions strict;
        strict.strict_control = true;
        auto rq = check_structure(Q, strict);
        ch.push_back({"septic input satisfies the strict control condition", true, double(rq.violations.size()), 0, rq.ok});
        auto s = solve_homological_z3z5(Q);
        bool nf_ok = is_rational_normal_form(s.Znf_l) && is_rational_normal_form(s.Znf_lm1) &&
                     check_structure(s.chi).ok && check_structure(s.Znf_l).ok && check_structure(s.Znf_lm1).ok;
        ch.push_back({"Z3+Z5 solver outputs are rational normal forms", true, nf_ok ? 0.0 : 1.0, 0, nf_ok});
        auto pts = nonresonant_points(n, 6, cfg.gamma, cfg.s, cfg.eps, cfg.z3z5_points, cfg.seed + 1);
        ch.push_back(z3z5_numeric_check(Q, s, pts, n, cfg.tol));
    }
    return rep;
}

}  // namespace kirchhoff::nf

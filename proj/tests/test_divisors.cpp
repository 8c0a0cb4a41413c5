#include <set>

#include <gtest/gtest.h>

#include "gen.hpp"
#include "kirchhoff/divisors.hpp"
#include "kirchhoff/measure.hpp"

using namespace kirchhoff;

namespace oracle {

// frequencies written out from their definitions
double w2(const std::vector<double>& I, int N, long a) { return (a >= 1 && a <= N) ? I[a - 1] / 4 : 0.0; }
double w4(const std::vector<double>& I, int N, long a) {
    if (a <= 0) return 0.0;
    double s1 = 0, s2 = 0;
    for (int d = 1; d <= N; ++d) {
        if (d == a) continue;
        s1 += (3.0 / d + d / (double(d) * d - double(a) * a)) * I[d - 1];
        s2 += I[d - 1] * I[d - 1] / (double(d) * d - double(a) * a);
    }
    if (a > N) return a / 16.0 * s2;
    const double Ia = I[a - 1];
    return -27.0 / (64.0 * a) * Ia * Ia - Ia * s1 / 8 + a / 16.0 * s2;
}
double Om(int ord, const IndexVector& j, const std::vector<double>& I, int N) {
    long D = 0;
    double acc = 0;
    auto f = [&](long a) { return ord == 2 ? w2(I, N, a) : w2(I, N, a) + w4(I, N, a); };
    for (auto& x : j) D += x.delta * x.a, acc += x.delta * f(x.a);
    return 2 * (acc - f(D));
}

// independent filter: no actions, no conjugate pair, no (1, Delta), 0 <= Delta <= N, length >= 3 at Delta = 0
bool irreducible(const IndexVector& j, int N) {
    long D = 0;
    for (auto& x : j) {
        if (x.delta == 0 || x.a > N) return false;
        D += x.delta * x.a;
        for (auto& y : j)
            if (y.a == x.a && y.delta == -x.delta) return false;
    }
    if (D < 0 || D > N) return false;
    if (D == 0 && j.size() < 3) return false;
    for (auto& x : j)
        if (x.delta == 1 && x.a == D) return false;
    return true;
}

std::set<IndexVector> brute(int r, int N) {
    std::set<IndexVector> out;
    std::vector<MonomialIndex> sym;
    for (int a = 1; a <= N; ++a)
        for (int d = -1; d <= 1; ++d) sym.push_back({d, a});
    for (int l = 2; l <= r; ++l) {
        std::vector<std::size_t> idx(l, 0);
        while (true) {
            IndexVector j;
            for (auto i : idx) j.push_back(sym[i]);
            if (irreducible(j, N)) out.insert(canonicalize(j));
            int p = 0;
            while (p < l && ++idx[p] == sym.size()) idx[p++] = 0;
            if (p == l) break;
        }
    }
    return out;
}

}  // namespace oracle

TEST(Omega2, Examples) {
    FreqContext ctx(10, {0, 0, 0.4});
    EXPECT_DOUBLE_EQ(omega2(ctx, 3), 0.1);
    EXPECT_EQ(omega2(ctx, 12), 0);
    EXPECT_EQ(omega2(ctx, 0), 0);
}

TEST(Omega4, Examples) {
    EXPECT_NEAR(omega4(FreqContext(2, {0.1, 0}), 1), -27.0 / 6400, 1e-16);
    EXPECT_NEAR(omega4(FreqContext(1, {0.2}), 2), -1.0 / 600, 1e-16);
    EXPECT_EQ(omega4(FreqContext(4, {}), 3), 0);
}

TEST(BigOmega, Examples) {
    FreqContext ctx(5, {0, 0.4, 0.2, 0, 0.1});
    IndexVector j{{1, 2}, {1, 3}};
    EXPECT_NEAR(big_omega(DivisorOrder::two, j, ctx), 0.25, 1e-15);
    IndexVector pair{{-1, 3}, {1, 3}};
    EXPECT_EQ(big_omega(DivisorOrder::two, pair, ctx), 0);
    EXPECT_EQ(big_omega(DivisorOrder::four, pair, ctx), 0);
    EXPECT_THROW(big_omega(DivisorOrder::two, IndexVector{{-1, 2}}, ctx), std::domain_error);
}

TEST(Irr, Examples) {
    IndexVector j{{1, 5}, {1, 2}, {1, 3}, {1, 4}, {-1, 5}, {-1, 8}, {0, 7}};
    EXPECT_EQ(irr(canonicalize(j), 1), canonicalize(IndexVector{{1, 2}, {1, 3}, {1, 4}, {-1, 8}}));
    EXPECT_TRUE(irr({{1, 4}, {-1, 4}, {0, 2}}, 0).empty());
    IndexVector k{{1, 2}, {1, 3}};
    EXPECT_EQ(irr(k, 5), k);
    EXPECT_EQ(irr({{1, 2}, {1, 3}, {-1, 3}}, 2), IndexVector{});
    EXPECT_THROW(irr(k, 4), std::domain_error);
}

TEST(Kappa, Examples) {
    EXPECT_EQ(kappa({{1, 2}, {1, 3}}), 2);
    EXPECT_EQ(kappa({{1, 7}, {-1, 4}}), 3);
    EXPECT_THROW(kappa(irr({{1, 3}, {-1, 3}, {1, 4}, {-1, 4}}, 0)), std::domain_error);
}

TEST(Enumerate, MatchesBruteForce) {
    for (int r = 2; r <= 4; ++r)
        for (int N = 1; N <= 5; ++N) {
            auto got = *enumerate_irr_indices({r, N, 0.1, WeightSpec::sobolev(1)});
            std::set<IndexVector> gs(got.begin(), got.end());
            EXPECT_EQ(gs.size(), got.size()) << "duplicates at r=" << r << " N=" << N;
            EXPECT_EQ(gs, oracle::brute(r, N)) << "r=" << r << " N=" << N;
            for (auto& j : got) {
                EXPECT_TRUE(is_canonical(j));
                EXPECT_EQ(irr(j, delta_of(j)), j);
            }
        }
    EXPECT_TRUE(enumerate_irr_indices({2, 1, 0.1, {}})->empty());
}

TEST(Enumerate, SizeGuard) {
    EXPECT_THROW(enumerate_irr_indices({6, 200, 0.1, {}}), std::length_error);
}

TEST(IsNonresonant, ZeroIsNotInSet) {
    auto rep = is_nonresonant(ComplexSeq(4), {2, 4, 1e-3, WeightSpec::sobolev(3)});
    EXPECT_FALSE(rep.in_set);
    EXPECT_EQ(rep.reason, "zero norm");
}

TEST(IsNonresonant, MatchesBruteForceOracle) {
    auto g = gen::rng(41);
    for (int t = 0; t < 300; ++t) {
        const int N = t == 0 ? 2 : gen::integer(g, 2, 5), r = t == 0 ? 2 : gen::integer(g, 2, 3);
        double gamma = std::exp(gen::uniform(g, std::log(1e-6), std::log(0.9)));
        WeightSpec w = t % 3 ? WeightSpec::sobolev(gen::uniform(g, 0, 3)) : WeightSpec::gevrey(0.5, 0.5);
        ComplexSeq z = gen::seq(g, N, 1.0, 0.3);
        if (t == 0) {  // single mode, I_1 = 1/2
            z = ComplexSeq(N, {{1, std::sqrt(0.5)}});
            w = WeightSpec::sobolev(3);
            gamma = 1e-3;
        }
        std::vector<double> I(N);
        double n2 = 0;
        for (int a = 1; a <= N; ++a) I[a - 1] = z.action(a), n2 += w.sq(a) * I[a - 1];
        bool in = true;
        double worst = INFINITY;
        for (auto& j : oracle::brute(r, N)) {
            const int l = j.size();
            int kap = 1 << 30;
            long D = delta_of(j);
            for (auto& x : j) kap = std::min(kap, x.a);
            if (D > 0) kap = std::min<long>(kap, D);
            double base = gamma * n2 * std::pow(N, -4.0 * l - 2) / w.sq(kap);
            double t2 = base, t4 = gamma * n2 * std::pow(N, -4.0 * l - 2) * std::max(1 / w.sq(kap), gamma * n2);
            double r2 = std::abs(oracle::Om(2, j, I, N)) / t2, r4 = std::abs(oracle::Om(4, j, I, N)) / t4;
            worst = std::min({worst, r2, r4});
            if (!(r2 > 1 && r4 > 1)) in = false;
        }
        auto rep = is_nonresonant(z, {r, N, gamma, w});
        EXPECT_EQ(rep.in_set, in) << "t=" << t;
        EXPECT_NEAR(rep.worst_ratio, worst, 1e-9 * worst);
    }
}

TEST(DivisorsProperty, OmegaEqualsOmegaOfIrr) {
    auto g = gen::rng(42);
    for (int t = 0; t < 1000; ++t) {
        const int N = gen::integer(g, 1, 8);
        auto j = gen::index_vector(g, gen::integer(g, 1, 6), N + 2);
        if (delta_of(j) < 0) j = conj(j);
        std::vector<double> I(N);
        for (auto& x : I) x = gen::uniform(g, 0, 1);
        FreqContext ctx(N, I);
        auto k = irr(j, delta_of(j));
        for (auto ord : {DivisorOrder::two, DivisorOrder::four}) {
            double a = big_omega(ord, j, ctx), b = big_omega(ord, k, ctx);
            EXPECT_NEAR(a, b, 1e-12 * (1 + std::abs(a)));
            EXPECT_NEAR(a, oracle::Om(ord == DivisorOrder::two ? 2 : 4, j, I, N), 1e-12 * (1 + std::abs(a)));
        }
    }
}

TEST(DivisorsProperty, IntegrableIndicesVanish) {
    auto g = gen::rng(43);
    for (int t = 0; t < 1000; ++t) {
        IndexVector j;
        for (int i = gen::integer(g, 1, 3); i > 0; --i) {
            int a = gen::integer(g, 1, 9);
            j.push_back({1, a});
            j.push_back({-1, a});
            if (gen::integer(g, 0, 1)) j.push_back({0, gen::integer(g, 1, 9)});
        }
        std::vector<double> I(6);
        for (auto& x : I) x = gen::uniform(g, 0, 1);
        FreqContext ctx(6, I);
        EXPECT_NEAR(big_omega(DivisorOrder::two, j, ctx), 0, 1e-15);
        EXPECT_NEAR(big_omega(DivisorOrder::four, j, ctx), 0, 1e-15);
    }
}

TEST(DivisorsProperty, ConjugateAntisymmetryAtZeroDelta) {
    auto g = gen::rng(44);
    int tested = 0;
    while (tested < 500) {
        auto j = gen::index_vector(g, gen::integer(g, 2, 5), 6);
        if (delta_of(j) != 0) continue;
        ++tested;
        std::vector<double> I(6);
        for (auto& x : I) x = gen::uniform(g, 0, 1);
        FreqContext ctx(6, I);
        for (auto ord : {DivisorOrder::two, DivisorOrder::four})
            EXPECT_NEAR(big_omega(ord, conj(j), ctx), -big_omega(ord, j, ctx), 1e-14);
    }
}

TEST(DivisorsProperty, MonotoneInGamma) {
    auto g = gen::rng(45);
    for (int t = 0; t < 300; ++t) {
        NonResonanceParams p{2, gen::integer(g, 2, 6), gen::uniform(g, 1e-6, 0.9), WeightSpec::sobolev(gen::uniform(g, 0, 3))};
        auto z = gen::seq(g, p.N, 1.0, 0.2);
        if (is_nonresonant(z, p).in_set) {
            p.gamma *= gen::uniform(g, 0, 1);
            EXPECT_TRUE(is_nonresonant(z, p).in_set);
        }
    }
}

TEST(DivisorsProperty, Omega2SubtestScaleInvariant) {
    auto g = gen::rng(46);
    for (int t = 0; t < 300; ++t) {
        NonResonanceParams p{3, gen::integer(g, 2, 5), 1e-3, WeightSpec::sobolev(2)};
        auto z = gen::seq(g, p.N, 1.0, 0.5);
        cd c(gen::uniform(g, -2, 2), gen::uniform(g, -2, 2));
        auto a = is_nonresonant(z, p), b = is_nonresonant(c * z, p);
        EXPECT_NEAR(a.worst_ratio_omega2, b.worst_ratio_omega2, 1e-9 * a.worst_ratio_omega2);
    }
}

TEST(Perturbation, IdentityAndNormCap) {
    NonResonanceParams p{2, 4, 1e-3, WeightSpec::sobolev(3)};
    MeasureSpec ms;
    ms.M = 4;
    ComplexSeq z;
    for (std::uint64_t i = 0;; ++i) {
        z = sample_actions(ms, i).to_z();
        if (is_nonresonant(z, p).in_set) break;
    }
    auto same = perturbation_stable(z, z, p);
    EXPECT_TRUE(same.hypotheses);
    EXPECT_TRUE(same.conclusion);
    auto big = perturbation_stable(z, cd(5, 0) * z, p);
    EXPECT_FALSE(big.norm_cap);
    EXPECT_FALSE(big.hypotheses);
}

TEST(Perturbation, AdmissiblePerturbationsStayNonresonant) {
    auto g = gen::rng(47);
    // gamma = 1e-3 puts the action bound at the rounding level of w(4)^2 I_4
    NonResonanceParams p{2, 4, 0.5, WeightSpec::sobolev(3)};
    MeasureSpec ms;
    ms.M = 4;
    ms.weight = p.weight;
    ComplexSeq z;
    for (std::uint64_t i = 0;; ++i) {
        z = sample_actions(ms, i).to_z();
        if (is_nonresonant(z, p).in_set) break;
    }
    const double nz = weighted_norm(z, p.weight);
    const double bound = p.gamma * p.gamma * nz * nz / (288.0 * (p.r + 1) * std::pow(p.N, 4.0 * p.r + 3));
    for (int t = 0; t < 1000; ++t) {
        ComplexSeq zp(4);
        for (int a = 1; a <= 4; ++a) {
            double I = std::max(0.0, z.action(a) + gen::uniform(g, -0.9, 0.9) * bound / p.weight.sq(a));
            zp.set(a, std::polar(std::sqrt(I), gen::uniform(g, 0, 6.3)));
        }
        auto rep = perturbation_stable(z, zp, p);
        ASSERT_TRUE(rep.hypotheses);
        EXPECT_TRUE(rep.conclusion_base_norm);
        EXPECT_TRUE(rep.conclusion);
    }
}

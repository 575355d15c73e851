#include "pbr/growth.hpp"
#include "pbr/params.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pbr;

namespace {

// Frozen from oracle::identify (numerical maximization of the Han rate in long double).
constexpr double frozen_theta_per_s = 4.089e-07;
constexpr double frozen_mu_max = 1.63518306106588;
constexpr double frozen_I_star = 202.932216961974;

const HaldaneParams table1 = han_to_haldane(table1_han);

} // namespace

TEST(HaldaneMu, Endpoints)
{
    EXPECT_EQ(haldane_mu(table1, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(haldane_mu(table1, table1.I_star), table1.mu_max);
    EXPECT_THROW(haldane_mu(table1, -1.0), DomainError);
}

TEST(HaldaneMu, BoundedByMuMax)
{
    for (double I = 1e-3; I < 1e6; I *= 1.1) {
        const double m = haldane_mu(table1, I);
        EXPECT_GE(m, 0.0);
        EXPECT_LE(m, table1.mu_max * (1 + 1e-15));
    }
}

TEST(HaldaneMu, MatchesOracle)
{
    for (double I : {0.5, 10.0, 202.93, 1000.0, 2000.0, 1e5})
        EXPECT_NEAR(haldane_mu(table1, I), static_cast<double>(oracle::mu(table1, I)), 1e-14 * table1.mu_max);
}

TEST(HaldaneMu, UnimodalInLight)
{
    double prev_I = 0.0, prev = 0.0;
    for (double I = 1e-2; I < 1e6; I *= 1.01) {
        const double m = haldane_mu(table1, I);
        if (prev_I >= table1.I_star)
            EXPECT_LT(m, prev);
        else if (I <= table1.I_star)
            EXPECT_GT(m, prev);
        prev_I = I;
        prev = m;
    }
}

// Concave below I*; beyond roughly 2 I* the 1/I tail is convex.
TEST(HaldaneMu, ConcaveUpToOptimalLight)
{
    const double step = 0.01;
    for (double I = step; I + step <= table1.I_star; I += 0.37) {
        const double d2 = haldane_mu(table1, I + step) - 2 * haldane_mu(table1, I) + haldane_mu(table1, I - step);
        EXPECT_LE(d2, 1e-13) << "I = " << I;
    }
    const double I = 10 * table1.I_star;
    EXPECT_GT(haldane_mu(table1, I + 1) - 2 * haldane_mu(table1, I) + haldane_mu(table1, I - 1), 0.0);
}

TEST(HanToHaldane, Table1AgainstOracle)
{
    const oracle::Identified id = oracle::identify(table1_han);
    EXPECT_NEAR(table1.theta_per_second(), static_cast<double>(id.theta_per_s), 1e-12 * frozen_theta_per_s);
    EXPECT_NEAR(table1.mu_max, static_cast<double>(id.mu_max_per_d), 1e-12 * frozen_mu_max);
    // the maximizer is flat, so the oracle pins it to ~1e-8 only
    EXPECT_NEAR(table1.I_star, static_cast<double>(id.I_star), 1e-7 * frozen_I_star);

    EXPECT_NEAR(table1.theta_per_second(), frozen_theta_per_s, 1e-12 * frozen_theta_per_s);
    EXPECT_NEAR(table1.mu_max, frozen_mu_max, 1e-12 * frozen_mu_max);
    EXPECT_NEAR(table1.I_star, frozen_I_star, 1e-8 * frozen_I_star);
    EXPECT_DOUBLE_EQ(table1.R, table1_han.R * seconds_per_day);
}

TEST(HanToHaldane, ScalingYield)
{
    HanParams scaled = table1_han;
    scaled.k *= 3.0;
    const HaldaneParams q = han_to_haldane(scaled);
    EXPECT_NEAR(q.theta, 3 * table1.theta, 1e-15 * q.theta);
    EXPECT_NEAR(q.mu_max, 3 * table1.mu_max, 1e-15 * q.mu_max);
    EXPECT_DOUBLE_EQ(q.I_star, table1.I_star);
}

TEST(HanToHaldane, SameCurve)
{
    for (double I : {1.0, 50.0, 202.93, 2000.0})
        EXPECT_NEAR(haldane_mu(table1, I), seconds_per_day * han_mu(table1_han, I), 1e-12 * haldane_mu(table1, I));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> logI(-2.0, 5.0), f(0.5, 2.0);
    for (int i = 0; i < 200; ++i) {
        HanParams p{6.8e-3 * f(rng), 2.99e-4 * f(rng), 0.25 * f(rng), 0.047 * f(rng), 8.7e-6 * f(rng), 1e-6};
        const HaldaneParams q = han_to_haldane(p);
        const double I = std::pow(10.0, logI(rng));
        EXPECT_NEAR(haldane_mu(q, I), seconds_per_day * han_mu(p, I), 1e-12 * haldane_mu(q, I));
    }
}

TEST(HanMu, PeakAtIStar)
{
    EXPECT_NEAR(han_mu(table1_han, table1.I_star) * seconds_per_day, table1.mu_max, 1e-13);
    EXPECT_LT(han_mu(table1_han, table1.I_star * 1.01), han_mu(table1_han, table1.I_star));
    EXPECT_LT(han_mu(table1_han, table1.I_star * 0.99), han_mu(table1_han, table1.I_star));
    EXPECT_EQ(han_mu(table1_han, 0.0), 0.0);
    EXPECT_THROW(han_mu(table1_han, -2.0), DomainError);
}

TEST(HanParams, Validation)
{
    HanParams p = table1_han;
    p.k_d = 1.5;
    EXPECT_THROW(p.validate(), DomainError);
    p = table1_han;
    p.sigma = 0.0;
    EXPECT_THROW(han_to_haldane(p), DomainError);
}

TEST(HanRhs, DarkEquilibrium)
{
    const HanState d = han_rhs(table1_han, HanState{1.0, 0.0, 0.0}, 0.0);
    EXPECT_EQ(d.A, 0.0);
    EXPECT_EQ(d.B, 0.0);
    EXPECT_EQ(d.C, 0.0);
}

TEST(HanRhs, ConservesTotal)
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double A = u(rng), C = u(rng) * (1 - A);
        const HanState d = han_rhs(table1_han, HanState{A, 1 - A - C, C}, 3000 * u(rng));
        EXPECT_NEAR(d.A + d.B + d.C, 0.0, 1e-15 * (std::abs(d.A) + std::abs(d.B) + std::abs(d.C)));
    }
}

TEST(HanRhs, FastNullcline)
{
    for (double C : {0.0, 0.2, 0.7})
        for (double I : {10.0, 2000.0}) {
            const double A = han_quasi_steady_A(table1_han, C, I);
            EXPECT_NEAR(han_rhs(table1_han, HanState{A, 1 - A - C, C}, I).A, 0.0, 1e-15);
        }
}

TEST(HanSystem, ReducedDynamicsTrackFull)
{
    const double I = 2000.0;
    const auto full = integrate_han(table1_han, HanState{1.0, 0.0, 0.0}, I, 100.0);
    for (const auto& s : full) {
        EXPECT_NEAR(s.state.A + s.state.B + s.state.C, 1.0, 1e-9);
        EXPECT_GE(s.state.A, -1e-12);
        EXPECT_GE(s.state.B, -1e-12);
        EXPECT_GE(s.state.C, -1e-12);
    }

    const auto reduced = integrate_ode<1>([&](double, const State<1>& c) {
        return State<1>{han_reduced_dC(table1_han, c[0], I)};
    }, State<1>{0.0}, 0.0, 100.0, Tolerance{1e-10, 1e-13, 1'000'000});

    // compare after the fast transient (time scale ~0.01 s)
    std::size_t j = 0;
    for (const auto& s : full) {
        if (s.t < 1.0)
            continue;
        while (j + 1 < reduced.size() && reduced.t[j + 1] < s.t)
            ++j;
        const double w = (s.t - reduced.t[j]) / (reduced.t[j + 1] - reduced.t[j]);
        const double C_red = reduced.x[j][0] + w * (reduced.x[j + 1][0] - reduced.x[j][0]);
        EXPECT_NEAR(s.state.C, C_red, 1e-3) << "t = " << s.t;
    }
}

TEST(RespirationRoots, Substitution)
{
    for (double R : {0.012, 0.12, 0.8, 1.6}) {
        HaldaneParams p = table1;
        p.R = R;
        const RespirationRoots r = respiration_roots(p);
        EXPECT_LT(r.lower, p.I_star);
        EXPECT_GT(r.upper, p.I_star);
        EXPECT_NEAR(haldane_mu(p, r.lower), R, 1e-12 * p.mu_max);
        EXPECT_NEAR(haldane_mu(p, r.upper), R, 1e-12 * p.mu_max);
    }
}

TEST(RespirationRoots, Infeasible)
{
    HaldaneParams p = table1;
    p.R = p.mu_max;
    EXPECT_THROW(respiration_roots(p), InfeasibleRespiration);
}

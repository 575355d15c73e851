#include "pbr/optimizer.hpp"
#include "pbr/params.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pbr;

namespace {

// Frozen from oracle::y_opt (bisection on mu = R, long double).
constexpr double frozen_Y_opt_R_x10 = 6.33699742379659;
constexpr double frozen_Y_opt_as_printed = 8.67661664651309;
// Frozen from oracle::grid_argmax of oracle::surface_productivity, preset table1-R-x10.
constexpr double frozen_X_star_h010 = 344.872936365697;
constexpr double frozen_X_star_h015 = 249.903082456976;

const ModelSetup setup = preset("table1-R-x10");
const HaldaneParams& p = setup.haldane;

double brute_force_argmax_P(const HaldaneParams& q, double I_s, double Y_max, double step)
{
    double best_y = 0.0, best = 0.0;
    const auto n = static_cast<long>(Y_max / step);
    for (long i = 0; i <= n; ++i) {
        const double y = step * static_cast<double>(i);
        const double P = optical_productivity(q, I_s, y);
        if (P > best) {
            best = P;
            best_y = y;
        }
    }
    return best_y;
}

} // namespace

TEST(YOpt, FrozenValues)
{
    EXPECT_NEAR(y_opt(p, 2000.0).Y_opt, frozen_Y_opt_R_x10, 1e-12);
    EXPECT_NEAR(static_cast<double>(oracle::y_opt(p, 2000.0L)), frozen_Y_opt_R_x10, 1e-12);
    const ModelSetup printed = preset("table1-as-printed");
    EXPECT_NEAR(y_opt(printed.haldane, 2000.0).Y_opt, frozen_Y_opt_as_printed, 1e-12);
}

TEST(YOpt, CompensationAtBottom)
{
    for (double I_s : {50.0, 200.0, 2000.0, 1e4}) {
        const YOptResult r = y_opt(p, I_s);
        EXPECT_EQ(r.branch, YOptBranch::surface_above_R);
        EXPECT_TRUE(r.compensated);
        EXPECT_NEAR(r.I_bottom, I_s * std::exp(-r.Y_opt), 1e-12 * r.I_bottom);
        EXPECT_NEAR(haldane_mu(p, r.I_bottom), p.R, 1e-9 * p.mu_max);
    }
}

TEST(YOpt, MatchesGridScan)
{
    for (double I_s : {100.0, 2000.0})
        EXPECT_NEAR(y_opt(p, I_s).Y_opt, brute_force_argmax_P(p, I_s, 12.0, 1e-4), 1e-4);
}

TEST(YOpt, SurfaceBelowCompensation)
{
    // too dark: P decreases from Y = 0
    const RespirationRoots roots = respiration_roots(p);
    const YOptResult dark = y_opt(p, 0.5 * roots.lower);
    EXPECT_EQ(dark.branch, YOptBranch::surface_at_or_below_R);
    EXPECT_EQ(dark.Y_opt, 0.0);
    EXPECT_FALSE(dark.compensated);

    // photoinhibited surface: the productive band lies deeper in the column
    const double I_s = 3.0 * roots.upper;
    ASSERT_LT(haldane_mu(p, I_s), p.R);
    const YOptResult bright = y_opt(p, I_s);
    EXPECT_EQ(bright.branch, YOptBranch::surface_at_or_below_R);
    EXPECT_NEAR(bright.Y_opt, std::log(I_s / roots.lower), 1e-12);
    EXPECT_NEAR(bright.Y_opt, brute_force_argmax_P(p, I_s, 20.0, 1e-4), 1e-4);
    EXPECT_GT(optical_productivity(p, I_s, bright.Y_opt), 0.0);
}

TEST(YOpt, Errors)
{
    HaldaneParams q = p;
    q.R = 2.0;
    EXPECT_THROW(y_opt(q, 2000.0), InfeasibleRespiration);
    EXPECT_THROW(y_opt(p, 0.0), DomainError);
}

TEST(OptimalDepth, ForConcentration)
{
    EXPECT_NEAR(optimal_depth_for_X(p, setup.extinction, 2000.0, 50.0), frozen_Y_opt_R_x10 / 20.0, 1e-13);
    EXPECT_NEAR(optimal_depth_for_X(p, setup.extinction, 2000.0, 0.0), frozen_Y_opt_R_x10 / 10.0, 1e-13);
    EXPECT_THROW(optimal_depth_for_X(p, ExtinctionModel{0.2, 0.0, 1.0}, 2000.0, 0.0), DomainError);
}

TEST(OptimalDepth, MaximizesAlongDepth)
{
    const double X = 120.0;
    const double h = optimal_depth_for_X(p, setup.extinction, 2000.0, X);
    const double best = surface_productivity(p, setup.extinction, X, h, 2000.0);
    for (double f : {0.9, 0.99, 1.01, 1.1})
        EXPECT_LT(surface_productivity(p, setup.extinction, X, f * h, 2000.0), best);
}

TEST(CompensationConcentration, Inverts)
{
    EXPECT_NEAR(compensation_concentration(setup.extinction, 6.0, 0.15), (40.0 - 10.0) / 0.2, 1e-12);
    EXPECT_EQ(compensation_concentration(setup.extinction, 1.0, 0.2), 0.0);
    const ExtinctionModel m{11.76, 10.0, 0.365};
    const double X0 = compensation_concentration(m, 6.0, 0.15);
    EXPECT_NEAR(extinction(m, X0) * 0.15, 6.0, 1e-12);
}

TEST(OptimalX, WithoutTurbidityIsCompensation)
{
    const ExtinctionModel m{0.2, 0.0, 1.0};
    const XOptResult r = optimal_X_for_h(p, m, 2000.0, 0.15);
    EXPECT_NEAR(extinction(m, r.X) * 0.15, frozen_Y_opt_R_x10, 1e-6);
    EXPECT_NEAR(r.X, r.X_compensation, 1e-6 * r.X);
}

TEST(OptimalX, WithTurbidityAgainstOracle)
{
    const XOptResult r10 = optimal_X_for_h(p, setup.extinction, 2000.0, 0.1);
    EXPECT_NEAR(r10.X, frozen_X_star_h010, 1e-7 * frozen_X_star_h010);
    const XOptResult r15 = optimal_X_for_h(p, setup.extinction, 2000.0, 0.15);
    EXPECT_NEAR(r15.X, frozen_X_star_h015, 1e-7 * frozen_X_star_h015);
    EXPECT_GT(r15.X, (frozen_Y_opt_R_x10 / 0.15 - 10.0) / 0.2);
    EXPECT_LT(std::abs(r15.stationarity), 1e-6);
    for (double f : {0.98, 0.999, 1.001, 1.02})
        EXPECT_LT(surface_productivity(p, setup.extinction, f * r15.X, 0.15, 2000.0), r15.Pi);
}

TEST(OptimalX, PowerLawExtinction)
{
    const ModelSetup s = preset("chlorella-s0365");
    for (double h : {0.05, 0.15, 0.5}) {
        const XOptResult r = optimal_X_for_h(s.haldane, s.extinction, 2000.0, h);
        const double ref = static_cast<double>(oracle::grid_argmax(
            [&](oracle::ld X) { return oracle::surface_productivity(s.haldane, s.extinction, 2000.0L, X, h); },
            r.X_compensation, 4 * r.X + 100, 200, 12));
        EXPECT_NEAR(r.X, ref, 1e-6 * ref) << "h = " << h;
        EXPECT_GT(r.X, r.X_compensation);
    }
}

TEST(OptimalX, NoProductiveConcentration)
{
    const double I_s = 0.5 * respiration_roots(p).lower;
    EXPECT_THROW(optimal_X_for_h(p, setup.extinction, I_s, 0.1), BracketMiss);
    EXPECT_THROW(optimal_X_for_h(p, setup.extinction, 2000.0, 0.0), DomainError);
}

// Any X strictly between the compensation concentration and the turbidity bound improves on X0.
TEST(OptimalX, StrictImprovementAboveCompensation)
{
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> h_dist(0.05, 0.4), u(0.0, 1.0);
    const double Y = frozen_Y_opt_R_x10;
    const double P_opt = optical_productivity(p, 2000.0, Y);
    for (int i = 0; i < 20; ++i) {
        const double h = h_dist(rng);
        const double X0 = compensation_concentration(setup.extinction, Y, h);
        if (X0 <= 0.0)
            continue;
        const double upper = 10.0 * P_opt / (0.2 * p.R * Y);
        const double base = surface_productivity(p, setup.extinction, X0, h, 2000.0);
        for (int k = 0; k < 10; ++k) {
            const double X = X0 + (upper - X0) * (0.01 + 0.98 * u(rng));
            if (X <= X0)
                continue;
            EXPECT_GT(surface_productivity(p, setup.extinction, X, h, 2000.0) - base, 1e-10);
        }
    }
}

TEST(Alternate, FixedPointWithoutTurbidity)
{
    const ExtinctionModel m{0.2, 0.0, 1.0};
    const SequenceTrace t = alternate(p, m, 2000.0, 50.0, 100);
    ASSERT_EQ(t.iterates.size(), 1u);
    EXPECT_TRUE(t.converged);
    EXPECT_EQ(t.stop_reason, StopReason::fixed_point);
    EXPECT_NEAR(t.iterates[0].X, 50.0, 1e-8);
    EXPECT_NEAR(t.iterates[0].Pi, optical_productivity(p, 2000.0, t.Y_opt) / 0.2, 1e-8);
}

TEST(Alternate, MonotoneWithTurbidity)
{
    const SequenceTrace t = alternate(p, setup.extinction, 2000.0, 50.0, 200);
    EXPECT_EQ(t.stop_reason, StopReason::max_iterations);
    EXPECT_FALSE(t.converged);
    ASSERT_EQ(t.iterates.size(), 200u);
    double X_prev = 50.0;
    for (std::size_t i = 0; i < t.iterates.size(); ++i) {
        const auto& it = t.iterates[i];
        EXPECT_GT(it.X, X_prev);
        EXPECT_LT(it.bottom_net_growth, 0.0);
        EXPECT_GT(it.Pi, it.Pi_depth_optimal);
        EXPECT_NEAR(it.Y, extinction(setup.extinction, it.X) * it.h, 1e-12 * it.Y);
        if (i > 0) {
            EXPECT_LT(it.h, t.iterates[i - 1].h);
            EXPECT_GT(it.Pi_depth_optimal, t.iterates[i - 1].Pi);
            EXPECT_GT(it.bottom_net_growth, t.iterates[i - 1].bottom_net_growth);
        }
        X_prev = it.X;
    }
    const SequenceSummary s = summarize(t, p, setup.extinction, 2000.0);
    EXPECT_TRUE(s.monotone);
    EXPECT_EQ(s.iterates, 200u);
    EXPECT_GT(s.optical_depth_gap, 0.0);
    EXPECT_LT(s.Pi_gap, 0.0);
    EXPECT_DOUBLE_EQ(s.surface_biomass_limit, t.Y_opt / 0.2);
}

TEST(Alternate, DepthFloorStops)
{
    const SequenceTrace t = alternate(p, setup.extinction, 2000.0, 50.0, 100000, depth_floor::raceway);
    EXPECT_EQ(t.stop_reason, StopReason::depth_floor);
    ASSERT_FALSE(t.iterates.empty());
    EXPECT_GE(t.iterates.back().h, depth_floor::raceway);
    EXPECT_LT(t.Y_opt / extinction(setup.extinction, t.iterates.back().X), depth_floor::raceway);
}

TEST(Alternate, Errors)
{
    EXPECT_THROW(alternate(p, setup.extinction, 2000.0, 0.0, 10), DomainError);
    EXPECT_THROW(alternate(p, setup.extinction, 2000.0, 50.0, 0), DomainError);
}

TEST(Summarize, EmptyTrace)
{
    SequenceTrace t;
    t.Y_opt = frozen_Y_opt_R_x10;
    const SequenceSummary s = summarize(t, p, setup.extinction, 2000.0);
    EXPECT_EQ(s.iterates, 0u);
    EXPECT_NEAR(s.Pi_limit, optical_productivity(p, 2000.0, t.Y_opt) / 0.2, 1e-12);
}

TEST(StopReason, Names)
{
    EXPECT_EQ(to_string(StopReason::fixed_point), "fixed_point");
    EXPECT_EQ(to_string(StopReason::depth_floor), "depth_floor");
    EXPECT_EQ(to_string(StopReason::max_iterations), "max_iterations");
    EXPECT_EQ(to_string(StopReason::range_limit), "range_limit");
    EXPECT_EQ(to_string(YOptBranch::surface_above_R), "surface_above_R");
}

TEST(OptimalYForDepth, MatchesOptimalX)
{
    const ModelSetup s = preset("chlorella-s0365");
    for (double h : {0.05, 0.15, 0.4}) {
        const XOptResult r = optimal_X_for_h(p, s.extinction, 2000.0, h);
        const double Y = optimal_Y_for_depth(p, s.extinction, 2000.0, s.extinction.alpha1 * h);
        EXPECT_NEAR(Y, extinction(s.extinction, r.X) * h, 1e-6 * Y) << "h = " << h;
    }
    const ExtinctionModel linear{0.2, 0.0, 1.0};
    EXPECT_DOUBLE_EQ(optimal_Y_for_depth(p, linear, 2000.0, 0.0), y_opt(p, 2000.0).Y_opt);
}

TEST(AlternateLog, AgreesWithDirectSequence)
{
    const ModelSetup s = preset("chlorella-s0365");
    const SequenceTrace direct = alternate(p, s.extinction, 2000.0, 50.0, 100);
    const LogSequenceTrace logged = alternate_log(p, s.extinction, 2000.0, 50.0, 100);
    ASSERT_EQ(direct.iterates.size(), logged.iterates.size());
    for (std::size_t i = 0; i < direct.iterates.size(); ++i) {
        EXPECT_NEAR(logged.iterates[i].log_X, std::log(direct.iterates[i].X), 1e-9) << i;
        EXPECT_NEAR(logged.iterates[i].log_h, std::log(direct.iterates[i].h), 1e-9) << i;
        EXPECT_NEAR(std::exp(logged.iterates[i].log_Pi), direct.iterates[i].Pi, 1e-8 * direct.iterates[i].Pi) << i;
    }
}

TEST(AlternateLog, PastDoubleRange)
{
    const ModelSetup s = preset("chlorella-s0365");
    const SequenceTrace direct = alternate(p, s.extinction, 2000.0, 50.0, 400);
    EXPECT_EQ(direct.stop_reason, StopReason::range_limit);
    EXPECT_LT(direct.iterates.size(), 400u);
    for (const auto& it : direct.iterates)
        EXPECT_TRUE(std::isfinite(it.X) && std::isfinite(it.Pi));

    const LogSequenceTrace logged = alternate_log(p, s.extinction, 2000.0, 50.0, 400);
    EXPECT_EQ(logged.iterates.size(), 400u);
    EXPECT_EQ(logged.stop_reason, StopReason::max_iterations);
    EXPECT_GT(logged.iterates.back().log_X, 1000.0);
    EXPECT_LT(std::abs(scaled_productivity_change(logged, s.extinction, 40, 400)), 1e-6);
    EXPECT_THROW(scaled_productivity_change(logged, s.extinction, 0, 10), DomainError);
}

TEST(AlternateLog, LinearExtinctionLimit)
{
    const LogSequenceTrace t = alternate_log(p, setup.extinction, 2000.0, 50.0, 2000);
    const double limit = optical_productivity(p, 2000.0, t.Y_opt) / setup.extinction.alpha0;
    EXPECT_LT(std::exp(t.iterates.back().log_Pi), limit);
    EXPECT_LT(limit - std::exp(t.iterates.back().log_Pi), 1e-2 * limit);
}

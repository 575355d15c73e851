#pragma once

/**
 * @file
 * Optimal operating points: the optical depth maximizing P, the optimal depth
 * for a given concentration, the optimal concentration for a given depth, and
 * the alternating sequence that chains the two directional optima.
 */

#include "pbr/error.hpp"
#include "pbr/growth.hpp"
#include "pbr/light.hpp"
#include "pbr/numerics.hpp"
#include "pbr/productivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace pbr {

enum class YOptBranch { surface_above_R, surface_at_or_below_R };

inline std::string_view to_string(YOptBranch b)
{
    return b == YOptBranch::surface_above_R ? "surface_above_R" : "surface_at_or_below_R";
}

struct YOptResult
{
    double Y_opt;
    YOptBranch branch;
    double I_bottom;
    /// False only when no non-negative optical depth has mu(I_bottom) = R
    /// worth reaching (dim or fully inhibited surface); Y_opt is then 0.
    bool compensated = true;
};

/**
 * Optical depth maximizing P(Y) = Int_0^Y (mu(I_s e^-y) - R) dy.
 *
 * When mu(I_s) > R this is ln(I_s / I_low) with I_low the lower root of
 * mu(I) = R. Otherwise P starts out non-increasing and the candidates are
 * Y = 0 and the deeper compensation point ln(I_s / I_low).
 */
inline YOptResult y_opt(const HaldaneParams& p, double I_s)
{
    if (!(I_s > 0.0))
        throw DomainError("y_opt: surface light must be > 0");
    const RespirationRoots roots = respiration_roots(p);
    const double mu_s = haldane_mu(p, I_s);

    if (mu_s > p.R) {
        const double Y = std::log(I_s / roots.lower);
        return {Y, YOptBranch::surface_above_R, I_s * std::exp(-Y), true};
    }

    if (I_s > roots.lower) {
        const double Y = std::log(I_s / roots.lower);
        if (optical_productivity(p, I_s, Y) > 0.0)
            return {Y, YOptBranch::surface_at_or_below_R, I_s * std::exp(-Y), true};
    }
    const bool compensated = std::abs(mu_s - p.R) <= 1e-9 * p.mu_max;
    return {0.0, YOptBranch::surface_at_or_below_R, I_s, compensated};
}

/// Depth h* = Y_opt / eps(X) maximizing Pi(X, .) at fixed concentration.
inline double optimal_depth_for_X(const HaldaneParams& p, const ExtinctionModel& m, double I_s, double X)
{
    const double eps = extinction(m, X);
    if (!(eps > 0.0))
        throw DomainError("optimal_depth_for_X: extinction must be positive");
    return y_opt(p, I_s).Y_opt / eps;
}

/// Concentration X0 with eps(X0) h = Y; 0 when background turbidity alone exceeds Y/h.
inline double compensation_concentration(const ExtinctionModel& m, double Y, double h)
{
    const double excess = Y / h - m.alpha1;
    if (excess <= 0.0)
        return 0.0;
    return m.s == 1.0 ? excess / m.alpha0 : std::pow(excess / m.alpha0, 1.0 / m.s);
}

struct XOptOptions
{
    /// Upper limit for bracket expansion; the effective cap is
    /// max(cap, 64 * initial upper end).
    double cap = 1e6;
    double rel_tol = 1e-13;
};

struct XOptResult
{
    double X;
    double Pi;
    double X_compensation; ///< X0 with eps(X0) h = Y_opt
    double stationarity;   ///< central difference dPi/dX at X, step 1e-6 X
};

/**
 * argmax over X of Pi(X, h). The bracket starts at [X0, 4 X0 + 100] (X0 the
 * compensation concentration) and the upper end doubles until dPi/dX < 0.
 * Golden-section search localizes the maximum, then Brent's method on the
 * analytic dPi/dX pins it down.
 */
inline XOptResult optimal_X_for_h(const HaldaneParams& p, const ExtinctionModel& m, double I_s, double h,
                                  XOptOptions opt = {})
{
    if (!(h > 0.0))
        throw DomainError("optimal_X_for_h: depth must be > 0");
    m.validate();
    const double Y_opt = y_opt(p, I_s).Y_opt;
    const double X0 = compensation_concentration(m, Y_opt, h);

    auto Pi = [&](double X) { return surface_productivity(p, m, X, h, I_s); };
    auto dPi = [&](double X) { return surface_productivity_dX(p, m, X, h, I_s); };

    double lo = X0 > 0.0 ? X0 : 1e-9;
    for (int i = 0; dPi(lo) <= 0.0; ++i) {
        if (i == 60)
            throw BracketMiss("optimal_X_for_h: Pi is not increasing at any positive concentration");
        lo *= 0.5;
    }
    double hi = 4.0 * lo + 100.0;
    const double cap = std::max(opt.cap, 64.0 * hi);
    while (dPi(hi) >= 0.0) {
        hi *= 2.0;
        if (hi > cap)
            throw BracketMiss("optimal_X_for_h: bracket expansion reached the cap without dPi/dX < 0");
    }

    const ScalarMax coarse = maximize_scalar(Pi, Bracket{lo, hi}, Tolerance{1e-6, 0.0, 300});
    double a = std::max(lo, coarse.argmax * (1.0 - 1e-4));
    double b = std::min(hi, coarse.argmax * (1.0 + 1e-4));
    if (dPi(a) <= 0.0)
        a = lo;
    if (dPi(b) >= 0.0)
        b = hi;
    const double X = find_root(dPi, Bracket{a, b}, Tolerance{opt.rel_tol, 0.0, 200});

    const double step = 1e-6 * X;
    const double residual = (Pi(X + step) - Pi(X - step)) / (2.0 * step);
    return XOptResult{X, Pi(X), X0, residual};
}

enum class StopReason { max_iterations, depth_floor, fixed_point, range_limit };

inline std::string_view to_string(StopReason r)
{
    switch (r) {
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::depth_floor: return "depth_floor";
    case StopReason::fixed_point: return "fixed_point";
    case StopReason::range_limit: return "range_limit";
    }
    return "unknown";
}

struct SequenceIterate
{
    std::size_t n;
    double X;                 ///< X_n = argmax_X Pi(X, h_n)
    double h;                 ///< h_n = Y_opt / eps(X_{n-1})
    double Y;                 ///< eps(X_n) h_n
    double Pi;                ///< Pi(X_n, h_n)
    double Pi_depth_optimal;  ///< Pi(X_{n-1}, h_n), the depth-direction optimum
    double bottom_net_growth; ///< mu(I(X_n, -h_n)) - R
};

struct SequenceTrace
{
    std::vector<SequenceIterate> iterates;
    double Y_opt = 0.0;
    bool converged = false;
    StopReason stop_reason = StopReason::max_iterations;
};

/// Depth floors for common reactor types [m].
namespace depth_floor {
inline constexpr double raceway = 0.1;
inline constexpr double tubular = 0.01;
inline constexpr double biofilm = 1e-4;
} // namespace depth_floor

/**
 * Alternating directional optimization: h_n = Y_opt / eps(X_{n-1}), then
 * X_n = argmax_X Pi(X, h_n). Stops after n_max iterates, when h_n would fall
 * below h_min, when X_n stops moving (relative change < 1e-10), or when the
 * iterates are about to leave the double range (s < 1 grows geometrically;
 * see alternate_log).
 */
inline SequenceTrace alternate(const HaldaneParams& p, const ExtinctionModel& m, double I_s, double X0,
                               std::size_t n_max, std::optional<double> h_min = std::nullopt,
                               XOptOptions opt = {})
{
    if (!(X0 > 0.0))
        throw DomainError("alternate: initial concentration must be > 0");
    if (n_max < 1)
        throw DomainError("alternate: n_max must be >= 1");
    m.validate();

    SequenceTrace trace;
    trace.Y_opt = y_opt(p, I_s).Y_opt;
    trace.iterates.reserve(std::min<std::size_t>(n_max, 100'000));

    double X_prev = X0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double h = trace.Y_opt / extinction(m, X_prev);
        if (X_prev > 1e290 || !(h > 1e-290)) {
            trace.stop_reason = StopReason::range_limit;
            return trace;
        }
        if (h_min && h < *h_min) {
            trace.stop_reason = StopReason::depth_floor;
            return trace;
        }
        const XOptResult best = optimal_X_for_h(p, m, I_s, h, opt);
        const double Y = extinction(m, best.X) * h;
        trace.iterates.push_back(SequenceIterate{n, best.X, h, Y, best.Pi,
                                                 surface_productivity(p, m, X_prev, h, I_s),
                                                 bottom_net_growth(p, I_s, Y)});
        if (std::abs(best.X - X_prev) < 1e-10 * best.X) {
            trace.converged = true;
            trace.stop_reason = StopReason::fixed_point;
            return trace;
        }
        X_prev = best.X;
    }
    trace.stop_reason = StopReason::max_iterations;
    return trace;
}

/// Asymptotic quantities of a sequence compared with their predicted limits.
struct SequenceSummary
{
    std::size_t iterates = 0;
    double Y_opt = 0.0;
    double Pi_limit = 0.0;         ///< P(Y_opt)/alpha0
    double surface_biomass_limit = 0.0; ///< Y_opt/alpha0
    double final_X = 0.0;
    double final_h = 0.0;
    double final_Pi = 0.0;
    double optical_depth_gap = 0.0;   ///< eps(X_n) h_n / Y_opt - 1
    double surface_biomass_gap = 0.0; ///< X_n h_n alpha0 / Y_opt - 1
    double Pi_gap = 0.0;              ///< Pi_n / limit - 1
    double scaled_Pi = 0.0;           ///< Pi_n / X_n^(1-s)
    /// d log Pi / d log X over the last decade of iterates; ~ 1 - s when Pi diverges.
    double growth_exponent = 0.0;
    bool monotone = true; ///< X up, h down, Pi up along the whole trace
};

inline SequenceSummary summarize(const SequenceTrace& trace, const HaldaneParams& p, const ExtinctionModel& m,
                                 double I_s)
{
    SequenceSummary s;
    s.iterates = trace.iterates.size();
    s.Y_opt = trace.Y_opt;
    s.Pi_limit = optical_productivity(p, I_s, trace.Y_opt) / m.alpha0;
    s.surface_biomass_limit = trace.Y_opt / m.alpha0;
    if (trace.iterates.empty())
        return s;

    const SequenceIterate& last = trace.iterates.back();
    s.final_X = last.X;
    s.final_h = last.h;
    s.final_Pi = last.Pi;
    s.optical_depth_gap = last.Y / trace.Y_opt - 1.0;
    s.surface_biomass_gap = last.X * last.h / s.surface_biomass_limit - 1.0;
    s.Pi_gap = last.Pi / s.Pi_limit - 1.0;
    s.scaled_Pi = last.Pi / std::pow(last.X, 1.0 - m.s);

    const std::size_t first = trace.iterates.size() / 10;
    const SequenceIterate& ref = trace.iterates[first];
    if (last.X > ref.X && ref.Pi > 0.0 && last.Pi > 0.0)
        s.growth_exponent = std::log(last.Pi / ref.Pi) / std::log(last.X / ref.X);

    for (std::size_t i = 1; i < trace.iterates.size(); ++i) {
        const auto& a = trace.iterates[i - 1];
        const auto& b = trace.iterates[i];
        if (!(b.X > a.X && b.h < a.h && b.Pi > a.Pi))
            s.monotone = false;
    }
    return s;
}

/**
 * Optical depth Y_n = eps(X_n) h of the concentration optimum at depth h,
 * from the stationarity condition of log Pi written in Y:
 *   1/(s (Y - alpha1 h)) + (mu(I_s e^-Y) - R)/P(Y) - 1/Y = 0
 * on (Y_opt, Y_0) with P(Y_0) = 0. Only alpha1 h enters, so h may be far
 * below the double range of X.
 */
inline double optimal_Y_for_depth(const HaldaneParams& p, const ExtinctionModel& m, double I_s, double alpha1_h)
{
    const double Y_opt = y_opt(p, I_s).Y_opt;
    auto P = [&](double Y) { return optical_productivity(p, I_s, Y); };
    if (!(P(Y_opt) > 0.0))
        throw BracketMiss("optimal_Y_for_depth: no optical depth with positive productivity");
    double Y_zero = 2.0 * Y_opt;
    while (P(Y_zero) > 0.0)
        Y_zero *= 2.0;
    Y_zero = find_root(P, Bracket{Y_opt, Y_zero});

    auto G = [&](double Y) {
        return 1.0 / (m.s * (Y - alpha1_h)) + bottom_net_growth(p, I_s, Y) / P(Y) - 1.0 / Y;
    };
    // G(Y_zero) is -inf; back off until finite and negative
    double hi = Y_zero;
    double width = 1e-9 * Y_zero;
    while (!(std::isfinite(G(hi)) && G(hi) < 0.0)) {
        hi = Y_zero - width;
        width *= 2.0;
        if (hi <= Y_opt)
            throw BracketMiss("optimal_Y_for_depth: stationarity condition has no sign change");
    }
    if (G(Y_opt) <= 0.0)
        return Y_opt;
    return find_root(G, Bracket{Y_opt, hi});
}

struct LogSequenceIterate
{
    std::size_t n;
    double log_X;             ///< ln X_n
    double log_h;             ///< ln h_n
    double Y;                 ///< eps(X_n) h_n
    double log_Pi;            ///< ln Pi(X_n, h_n)
    double bottom_net_growth; ///< mu(I(X_n, -h_n)) - R
};

struct LogSequenceTrace
{
    std::vector<LogSequenceIterate> iterates;
    double Y_opt = 0.0;
    bool converged = false;
    StopReason stop_reason = StopReason::max_iterations;
};

/// ln eps(X) for X = e^xi without forming X.
inline double log_extinction(const ExtinctionModel& m, double log_X)
{
    const double a = std::log(m.alpha0) + m.s * log_X;
    if (m.alpha1 == 0.0)
        return a;
    const double b = std::log(m.alpha1);
    return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

/**
 * The alternating sequence of alternate() carried in (ln X, ln h). Same
 * recursion, but the concentration step solves for Y_n with
 * optimal_Y_for_depth and recovers X_n = ((Y_n/h_n - alpha1)/alpha0)^(1/s).
 * Needed when s < 1, where X_n grows by a roughly constant factor per step
 * and leaves the double range after a few hundred iterates.
 */
inline LogSequenceTrace alternate_log(const HaldaneParams& p, const ExtinctionModel& m, double I_s, double X0,
                                      std::size_t n_max)
{
    if (!(X0 > 0.0))
        throw DomainError("alternate_log: initial concentration must be > 0");
    if (n_max < 1)
        throw DomainError("alternate_log: n_max must be >= 1");
    m.validate();

    LogSequenceTrace trace;
    trace.Y_opt = y_opt(p, I_s).Y_opt;
    trace.iterates.reserve(std::min<std::size_t>(n_max, 100'000));
    const double log_alpha0 = std::log(m.alpha0);

    double log_X_prev = std::log(X0);
    for (std::size_t n = 1; n <= n_max; ++n) {
        const double log_h = std::log(trace.Y_opt) - log_extinction(m, log_X_prev);
        const double alpha1_h = m.alpha1 * std::exp(log_h);
        const double Y = optimal_Y_for_depth(p, m, I_s, alpha1_h);
        // eps(X_n) - alpha1 = (Y - alpha1 h)/h
        const double log_X = (std::log(Y - alpha1_h) - log_h - log_alpha0) / m.s;
        const double log_Pi = log_X + log_h + std::log(optical_productivity(p, I_s, Y) / Y);
        trace.iterates.push_back(LogSequenceIterate{n, log_X, log_h, Y, log_Pi, bottom_net_growth(p, I_s, Y)});
        if (std::abs(log_X - log_X_prev) < 1e-10) {
            trace.converged = true;
            trace.stop_reason = StopReason::fixed_point;
            return trace;
        }
        log_X_prev = log_X;
    }
    trace.stop_reason = StopReason::max_iterations;
    return trace;
}

/// Relative change of Pi_n / X_n^(1-s) between iterates i and j (1-based n).
inline double scaled_productivity_change(const LogSequenceTrace& trace, const ExtinctionModel& m, std::size_t i,
                                         std::size_t j)
{
    if (i < 1 || j < 1 || i > trace.iterates.size() || j > trace.iterates.size())
        throw DomainError("scaled_productivity_change: iterate index out of range");
    auto log_scaled = [&](std::size_t n) {
        const auto& it = trace.iterates[n - 1];
        return it.log_Pi - (1.0 - m.s) * it.log_X;
    };
    return std::expm1(log_scaled(j) - log_scaled(i));
}

} // namespace pbr

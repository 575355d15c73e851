#pragma once

/**
 * @file
 * Closed-loop dilution control of the biomass balance
 *   dX/dt = (mu_bar(X, h) - R - D) X
 * with D = D_max above a saturation threshold X_bar and
 * D = Phi / X_star below it, where Phi = (mu_bar - R) X is the measured net
 * volumetric production.
 */

#include "pbr/error.hpp"
#include "pbr/growth.hpp"
#include "pbr/light.hpp"
#include "pbr/numerics.hpp"
#include "pbr/productivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace pbr {

struct ControlConfig
{
    double X_star; ///< target concentration [g.m^-3]
    double D_max;  ///< maximal dilution [1/d]
    double X_bar;  ///< saturation threshold [g.m^-3]

    void validate(const HaldaneParams& p) const
    {
        if (!(X_star > 0.0))
            throw ConfigError("ControlConfig: X_star must be > 0");
        if (!(D_max > p.mu_max))
            throw ConfigError("ControlConfig: D_max must exceed mu_max");
        if (!(X_bar > X_star))
            throw ConfigError("ControlConfig: X_bar must exceed X_star");
        if (!((p.mu_max - p.R) * X_bar / X_star < D_max))
            throw ConfigError("ControlConfig: (mu_max - R) X_bar / X_star must stay below D_max");
    }
};

/// Phi = (mu_bar(X, h) - R) X  [g.m^-3.d^-1].
inline double phi(const HaldaneParams& p, const ExtinctionModel& m, double I_s, double X, double h)
{
    if (!(X >= 0.0) || !(h > 0.0))
        throw DomainError("phi requires X >= 0 and h > 0");
    return (mean_growth(p, I_s, extinction(m, X) * h) - p.R) * X;
}

/**
 * Concentration above which mu_bar(., h) < R; mu_bar decreases in X from
 * mu(I_s e^{-alpha1 h}) at X = 0 towards 0. Empty when mu_bar(0, h) <= R.
 */
inline std::optional<double> respiration_limit_concentration(const HaldaneParams& p, const ExtinctionModel& m,
                                                             double I_s, double h)
{
    auto net = [&](double X) { return mean_growth(p, I_s, extinction(m, X) * h) - p.R; };
    if (net(0.0) <= 0.0)
        return std::nullopt;
    double hi = 1.0;
    while (net(hi) > 0.0) {
        hi *= 2.0;
        if (hi > 1e15)
            return std::nullopt;
    }
    return find_root(net, Bracket{0.0, hi}, Tolerance{1e-12, 0.0, 200});
}

/**
 * X_bar = min(0.9 D_max X_star / (mu_max - R), 10 X_star, (X_star + X_c)/2)
 * with X_c the concentration where mu_bar(X_c, h) = R. The last term keeps
 * mu_bar - R positive on the whole sub-threshold branch.
 */
inline double default_saturation_threshold(const HaldaneParams& p, const ExtinctionModel& m, double I_s,
                                           double h, double X_star, double D_max)
{
    double X_bar = std::min(0.9 * D_max * X_star / (p.mu_max - p.R), 10.0 * X_star);
    if (const auto X_c = respiration_limit_concentration(p, m, I_s, h))
        X_bar = std::min(X_bar, 0.5 * (X_star + *X_c));
    if (!(X_bar > X_star))
        throw ConfigError("default_saturation_threshold: no admissible X_bar above X_star");
    return X_bar;
}

struct Dilution
{
    double D;
    /// Set when the sub-threshold law asked for D < 0 (mu_bar < R) and was clamped to 0.
    bool clamped;
};

/// Piecewise law: D_max for X >= X_bar, Phi X / X_star otherwise (clamped at 0).
inline Dilution dilution_from_phi(const ControlConfig& cfg, double X, double measured_phi)
{
    if (X >= cfg.X_bar)
        return {cfg.D_max, false};
    const double D = measured_phi / cfg.X_star;
    if (D < 0.0)
        return {0.0, true};
    return {D, false};
}

inline Dilution dilution_law(const ControlConfig& cfg, const HaldaneParams& p, const ExtinctionModel& m,
                             double I_s, double X, double h)
{
    cfg.validate(p);
    if (!(X > 0.0))
        throw DomainError("dilution_law: X must be > 0");
    return dilution_from_phi(cfg, X, phi(p, m, I_s, X, h));
}

struct SimSample
{
    double t;      ///< [d]
    double X;      ///< [g.m^-3]
    double D;      ///< [1/d]
    double mu_bar; ///< [1/d]
    double Phi;    ///< [g.m^-3.d^-1]
    double Pi;     ///< [g.m^-2.d^-1]
};

struct SimTrace
{
    std::vector<SimSample> samples;
    std::size_t regime_warnings = 0; ///< accepted samples where D was clamped at 0
};

struct SimOptions
{
    Tolerance tol{1e-10, 1e-9, 2'000'000};
    double max_step = 0.05; ///< [d]
    /// Maps the true Phi to the measured one. Empty means exact, continuous measurement.
    std::function<double(double t, double phi)> measurement;
    /// With a measurement hook, D is recomputed every sample_period [d] and held in between.
    double sample_period = 0.01;
};

inline SimTrace simulate_closed_loop(const ControlConfig& cfg, const HaldaneParams& p, const ExtinctionModel& m,
                                     double I_s, double X0, double h, double t_end, const SimOptions& opt = {})
{
    cfg.validate(p);
    if (!(X0 > 0.0) || !(t_end > 0.0) || !(h > 0.0))
        throw DomainError("simulate_closed_loop requires X0 > 0, h > 0, t_end > 0");

    auto sample_at = [&](double t, double X) {
        const double mu_bar = mean_growth(p, I_s, extinction(m, X) * h);
        const double true_phi = (mu_bar - p.R) * X;
        const double measured = opt.measurement ? opt.measurement(t, true_phi) : true_phi;
        const Dilution d = dilution_from_phi(cfg, X, measured);
        return std::pair{SimSample{t, X, d.D, mu_bar, true_phi, true_phi * h}, d.clamped};
    };
    auto rhs = [&](double t, const State<1>& x) {
        const auto [s, clamped] = sample_at(t, x[0]);
        return State<1>{(s.mu_bar - p.R - s.D) * s.X};
    };

    OdeOptions ode;
    ode.max_step = opt.max_step;
    SimTrace trace;

    if (!opt.measurement) {
        const auto ode_trace = integrate_ode<1>(rhs, State<1>{X0}, 0.0, t_end, opt.tol, ode);
        trace.samples.reserve(ode_trace.size());
        for (std::size_t i = 0; i < ode_trace.size(); ++i) {
            const auto [s, clamped] = sample_at(ode_trace.t[i], ode_trace.x[i][0]);
            trace.samples.push_back(s);
            if (clamped)
                ++trace.regime_warnings;
        }
        return trace;
    }

    // Sampled measurement: zero-order hold of D over each period, so the
    // right-hand side stays deterministic inside every integration.
    if (!(opt.sample_period > 0.0))
        throw DomainError("simulate_closed_loop: sample_period must be > 0");
    double t = 0.0;
    double X = X0;
    while (t < t_end) {
        const double t_next = std::min(t_end, t + opt.sample_period);
        const auto [start, clamped] = sample_at(t, X);
        const double D = start.D;
        auto held = [&](double, const State<1>& x) {
            const double mu_bar = mean_growth(p, I_s, extinction(m, x[0]) * h);
            return State<1>{(mu_bar - p.R - D) * x[0]};
        };
        const auto seg = integrate_ode<1>(held, State<1>{X}, t, t_next, opt.tol, ode);
        for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
            const double Xi = seg.x[i][0];
            const double mu_bar = mean_growth(p, I_s, extinction(m, Xi) * h);
            const double true_phi = (mu_bar - p.R) * Xi;
            trace.samples.push_back(SimSample{seg.t[i], Xi, D, mu_bar, true_phi, true_phi * h});
            if (clamped)
                ++trace.regime_warnings;
        }
        t = t_next;
        X = seg.final_state()[0];
    }
    const double mu_bar = mean_growth(p, I_s, extinction(m, X) * h);
    const double true_phi = (mu_bar - p.R) * X;
    trace.samples.push_back(SimSample{t_end, X, trace.samples.back().D, mu_bar, true_phi, true_phi * h});
    return trace;
}

/// First time after which X stays within band * X_star of X_star; empty if never.
inline std::optional<double> convergence_time(const SimTrace& trace, double X_star, double band)
{
    std::optional<double> entered;
    for (const auto& s : trace.samples) {
        if (std::abs(s.X - X_star) <= band * X_star) {
            if (!entered)
                entered = s.t;
        } else {
            entered.reset();
        }
    }
    return entered;
}

} // namespace pbr

#pragma once

/**
 * @file
 * Light-response growth models.
 *
 * Two parametrizations are provided. The Han photosynthetic-unit model works
 * with per-second rates (as the parameters are usually published); the
 * Haldane description uses per-day rates. Light is always in
 * umol.m^-2.s^-1. The only unit conversion in the library happens in
 * han_to_haldane().
 */

#include "pbr/error.hpp"
#include "pbr/numerics.hpp"

#include <cmath>
#include <vector>

namespace pbr {

inline constexpr double seconds_per_day = 86400.0;

/// Han model parameters, per-second time base.
struct HanParams
{
    double k_r;   ///< repair rate [1/s]
    double k_d;   ///< damage ratio [-]
    double tau;   ///< turnover time [s]
    double sigma; ///< specific photon absorption [m^2/umol]
    double k;     ///< yield factor [-]
    double R;     ///< respiration rate [1/s]

    void validate() const
    {
        if (!(k_r > 0 && k_d > 0 && tau > 0 && sigma > 0 && k > 0 && R > 0))
            throw DomainError("HanParams: all parameters must be positive");
        if (!(k_d < 1))
            throw DomainError("HanParams: k_d must be < 1");
    }
};

/// Haldane growth parameters, per-day time base.
struct HaldaneParams
{
    double theta;  ///< initial slope [1/d per umol.m^-2.s^-1]
    double mu_max; ///< maximum growth rate [1/d]
    double I_star; ///< light of maximal growth [umol.m^-2.s^-1]
    double R;      ///< respiration rate [1/d]

    void validate() const
    {
        if (!(theta > 0 && mu_max > 0 && I_star > 0 && R > 0))
            throw DomainError("HaldaneParams: all parameters must be positive");
    }

    /// theta on the per-second basis used when quoting Han-derived slopes.
    [[nodiscard]] double theta_per_second() const { return theta / seconds_per_day; }
};

/// Relative frequencies of the open, excited and inhibited states.
struct HanState
{
    double A;
    double B;
    double C;
};

inline double haldane_mu(const HaldaneParams& p, double I)
{
    if (!(I >= 0.0))
        throw DomainError("haldane_mu: light intensity must be >= 0");
    const double q = I / p.I_star - 1.0;
    const double denom = I + p.mu_max / p.theta * q * q;
    return p.mu_max * I / denom;
}

/// Steady-state growth rate of the Han model [1/s].
inline double han_mu(const HanParams& p, double I)
{
    if (!(I >= 0.0))
        throw DomainError("han_mu: light intensity must be >= 0");
    const double sI = p.sigma * I;
    return p.k * sI / (p.k_d / p.k_r * p.tau * sI * sI + p.tau * sI + 1.0);
}

inline HaldaneParams han_to_haldane(const HanParams& p)
{
    p.validate();
    const double theta = p.k * p.sigma;
    const double kd_tau_s2 = p.k_d * p.tau * p.sigma * p.sigma;
    const double I_star = std::sqrt(p.k_r / kd_tau_s2);
    const double mu_max = theta / (p.tau * p.sigma + 2.0 * std::sqrt(kd_tau_s2 / p.k_r));
    return HaldaneParams{theta * seconds_per_day, mu_max * seconds_per_day, I_star, p.R * seconds_per_day};
}

/// Time derivative of the three-state Han system at constant light I.
inline HanState han_rhs(const HanParams& p, const HanState& s, double I)
{
    if (!(I >= 0.0))
        throw DomainError("han_rhs: light intensity must be >= 0");
    const double sI = p.sigma * I;
    const double dA = -(sI + 1.0 / p.tau) * s.A + (1.0 - s.C) / p.tau;
    const double dC = -(p.k_r + p.k_d * sI) * s.C + p.k_d * sI * (1.0 - s.A);
    return HanState{dA, -(dA + dC), dC};
}

/// Fast-variable nullcline: A at which dA/dt vanishes for given C.
inline double han_quasi_steady_A(const HanParams& p, double C, double I)
{
    return (1.0 - C) / (p.tau * p.sigma * I + 1.0);
}

/// Slow scalar dynamics of C once A sits on its quasi-steady value.
inline double han_reduced_dC(const HanParams& p, double C, double I)
{
    const double sI = p.sigma * I;
    const double g = p.k_d * p.tau * sI * sI / (p.tau * sI + 1.0);
    return -(g + p.k_r) * C + g;
}

struct HanSample
{
    double t;
    HanState state;
};

/// Integrates the Han system at constant light from s0 over [0, t_end] seconds.
inline std::vector<HanSample> integrate_han(const HanParams& p, const HanState& s0, double I, double t_end,
                                            Tolerance tol = {1e-10, 1e-13, 5'000'000})
{
    auto rhs = [&](double, const State<3>& x) {
        const HanState d = han_rhs(p, HanState{x[0], x[1], x[2]}, I);
        return State<3>{d.A, d.B, d.C};
    };
    const auto trace = integrate_ode<3>(rhs, State<3>{s0.A, s0.B, s0.C}, 0.0, t_end, tol);
    std::vector<HanSample> out;
    out.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i)
        out.push_back({trace.t[i], HanState{trace.x[i][0], trace.x[i][1], trace.x[i][2]}});
    return out;
}

/// Roots I_low < I_high of mu(I) = R (the compensation light levels).
struct RespirationRoots
{
    double lower;
    double upper;
};

/**
 * Solves mu(I) = R, i.e. A I^2 - B I + C = 0 with A = R mu_max/(theta I*^2),
 * B = mu_max - R + 2 R mu_max/(theta I*), C = R mu_max/theta. The lower root
 * is taken from the product of roots to avoid cancellation.
 */
inline RespirationRoots respiration_roots(const HaldaneParams& p)
{
    p.validate();
    if (!(p.R < p.mu_max))
        throw InfeasibleRespiration("respiration rate R must be below mu_max (R = " + std::to_string(p.R)
                                    + ", mu_max = " + std::to_string(p.mu_max) + ")");
    const double g = p.R * p.mu_max / p.theta;
    const double qa = g / (p.I_star * p.I_star);
    const double qb = p.mu_max - p.R + 2.0 * g / p.I_star;
    const double qc = g;
    const double disc = (p.mu_max - p.R) * (p.mu_max - p.R + 4.0 * g / p.I_star);
    const double big = qb + std::sqrt(disc);
    return RespirationRoots{2.0 * qc / big, big / (2.0 * qa)};
}

} // namespace pbr

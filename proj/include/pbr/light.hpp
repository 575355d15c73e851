#pragma once

#include "pbr/error.hpp"

#include <cmath>
#include <cstddef>

namespace pbr {

/// Extinction law eps(X) = alpha0 * X^s + alpha1.
struct ExtinctionModel
{
    double alpha0;       ///< specific extinction [m^(3s-1).g^-s]
    double alpha1 = 0.0; ///< background turbidity [1/m]
    double s = 1.0;

    void validate() const
    {
        if (!(alpha0 > 0.0) || !(alpha1 >= 0.0) || !(s > 0.0 && s <= 1.0))
            throw DomainError("ExtinctionModel requires alpha0 > 0, alpha1 >= 0, 0 < s <= 1");
    }
};

struct LightColumn
{
    double I_s; ///< surface light [umol.m^-2.s^-1]
    double h;   ///< depth [m]
    double X;   ///< biomass concentration [g.m^-3]

    void validate() const
    {
        if (!(I_s >= 0.0) || !(h > 0.0) || !(X >= 0.0))
            throw DomainError("LightColumn requires I_s >= 0, h > 0, X >= 0");
    }
};

inline double extinction(const ExtinctionModel& m, double X)
{
    if (!(X >= 0.0))
        throw DomainError("extinction: concentration must be >= 0");
    return m.s == 1.0 ? m.alpha0 * X + m.alpha1 : m.alpha0 * std::pow(X, m.s) + m.alpha1;
}

/// d eps / dX; unbounded at X = 0 when s < 1.
inline double extinction_slope(const ExtinctionModel& m, double X)
{
    return m.s == 1.0 ? m.alpha0 : m.s * m.alpha0 * std::pow(X, m.s - 1.0);
}

/// Beer-Lambert light at height z in [-h, 0] (z = 0 is the surface).
inline double intensity_at(const LightColumn& c, const ExtinctionModel& m, double z)
{
    if (!(z >= -c.h && z <= 0.0))
        throw DomainError("intensity_at: z must lie in [-h, 0]");
    return c.I_s * std::exp(extinction(m, c.X) * z);
}

/// Depth-averaged light (I_s / eps)(1 - exp(-eps h)).
inline double mean_light(const LightColumn& c, const ExtinctionModel& m)
{
    const double y = extinction(m, c.X) * c.h;
    if (y < 1e-8)
        return c.I_s * (1.0 - 0.5 * y);
    return c.I_s * -std::expm1(-y) / y;
}

/**
 * Least-squares alpha0 for exponent s_new that best reproduces the linear law
 * alpha0_ref * X on a uniform grid of grid_n points over [X_min, X_max]:
 * alpha0 = alpha0_ref * sum X^(1+s) / sum X^(2s).
 */
inline double fit_alpha0(double alpha0_ref, double s_new, double X_min, double X_max, std::size_t grid_n = 1001)
{
    if (!(s_new > 0.0 && s_new <= 1.0))
        throw DomainError("fit_alpha0: exponent must lie in (0, 1]");
    if (X_min == X_max)
        throw DegenerateRange("fit_alpha0: X_min equals X_max");
    if (!(X_min < X_max) || X_min < 0.0 || grid_n < 2)
        throw DomainError("fit_alpha0: requires 0 <= X_min < X_max and grid_n >= 2");
    if (s_new == 1.0)
        return alpha0_ref;

    double num = 0.0;
    double den = 0.0;
    const double step = (X_max - X_min) / static_cast<double>(grid_n - 1);
    for (std::size_t i = 0; i < grid_n; ++i) {
        const double X = i + 1 == grid_n ? X_max : X_min + step * static_cast<double>(i);
        num += std::pow(X, 1.0 + s_new);
        den += std::pow(X, 2.0 * s_new);
    }
    return alpha0_ref * num / den;
}

inline double fit_alpha0(const ExtinctionModel& reference, double s_new, double X_min, double X_max,
                         std::size_t grid_n = 1001)
{
    if (reference.s != 1.0)
        throw DomainError("fit_alpha0: reference model must be linear (s = 1)");
    return fit_alpha0(reference.alpha0, s_new, X_min, X_max, grid_n);
}

} // namespace pbr

#pragma once

/**
 * @file
 * Depth-averaged growth and the two productivity measures.
 *
 * With I(z) = I_s exp(eps z) the substitution dI = eps I dz turns the depth
 * average of mu into (1/Y) * Int_{I_b}^{I_s} mu(I)/I dI, Y = eps h,
 * I_b = I_s exp(-Y). For both growth laws mu(I)/I is the reciprocal of a
 * quadratic, so the average has an elementary closed form whose shape depends
 * on the sign of the quadratic's discriminant.
 */

#include "pbr/error.hpp"
#include "pbr/growth.hpp"
#include "pbr/light.hpp"
#include "pbr/numerics.hpp"

#include <cmath>

namespace pbr {

/// Which antiderivative applies to Int dI / (a I^2 + b I + c).
enum class DiscriminantBranch { two_log, rational, arctangent };

struct QuadraticDenominator
{
    double a;
    double b;
    double c;

    [[nodiscard]] double discriminant() const { return b * b - 4.0 * a * c; }

    /// |Delta| below 1e-12 * b^2 is treated as exactly zero.
    [[nodiscard]] DiscriminantBranch branch() const
    {
        const double delta = discriminant();
        if (std::abs(delta) < 1e-12 * b * b)
            return DiscriminantBranch::rational;
        return delta > 0.0 ? DiscriminantBranch::two_log : DiscriminantBranch::arctangent;
    }
};

/**
 * Int_{I_s e^-Y}^{I_s} dI / (a I^2 + b I + c). The quadratic must have no
 * root inside the integration range, which holds for both growth laws since
 * mu is finite for I > 0.
 */
inline double inverse_quadratic_integral(const QuadraticDenominator& q, double I_s, double Y)
{
    if (Y == 0.0 || I_s == 0.0)
        return 0.0;
    const double I_b = I_s * std::exp(-Y);
    const double width = -I_s * std::expm1(-Y);
    const double delta = q.discriminant();

    switch (q.branch()) {
    case DiscriminantBranch::two_log: {
        const double sq = std::sqrt(delta);
        const double big = -0.5 * (q.b + std::copysign(sq, q.b));
        const double r1 = big / q.a;
        const double r2 = q.c / big;
        // 1/(a(I-d1)(I-d2)) = (1/sqrt(Delta)) (1/(I-d1) - 1/(I-d2)) with d1 > d2
        const double d1 = std::max(r1, r2);
        const double d2 = std::min(r1, r2);
        return (std::log1p(width / (I_b - d1)) - std::log1p(width / (I_b - d2))) / sq;
    }
    case DiscriminantBranch::rational: {
        const double d = -q.b / (2.0 * q.a);
        return width / (q.a * (I_s - d) * (I_b - d));
    }
    case DiscriminantBranch::arctangent: {
        const double sq = std::sqrt(-delta);
        const double u = (2.0 * q.a * I_s + q.b) / sq;
        const double v = (2.0 * q.a * I_b + q.b) / sq;
        return 2.0 / sq * std::atan2(2.0 * q.a * width / sq, 1.0 + u * v);
    }
    }
    return 0.0;
}

/// mu(I)/I = theta / (I^2/I*^2 + (theta/mu_max - 2/I*) I + 1).
inline QuadraticDenominator growth_denominator(const HaldaneParams& p)
{
    return {1.0 / (p.I_star * p.I_star), p.theta / p.mu_max - 2.0 / p.I_star, 1.0};
}

/// mu_Han(I)/I = k_r k sigma / (k_d tau sigma^2 I^2 + k_r tau sigma I + k_r).
inline QuadraticDenominator growth_denominator(const HanParams& p)
{
    return {p.k_d * p.tau * p.sigma * p.sigma, p.k_r * p.tau * p.sigma, p.k_r};
}

/// Int_0^Y mu(I_s e^-y) dy  [1/d].
inline double integrated_growth(const HaldaneParams& p, double I_s, double Y)
{
    if (!(Y >= 0.0))
        throw DomainError("optical depth must be >= 0");
    return p.theta * inverse_quadratic_integral(growth_denominator(p), I_s, Y);
}

/// Int_0^Y mu_Han(I_s e^-y) dy, converted to [1/d].
inline double integrated_growth(const HanParams& p, double I_s, double Y)
{
    if (!(Y >= 0.0))
        throw DomainError("optical depth must be >= 0");
    return p.k_r * p.k * p.sigma * inverse_quadratic_integral(growth_denominator(p), I_s, Y) * seconds_per_day;
}

/// Mean growth over optical depth Y under surface light I_s [1/d].
inline double mean_growth(const HaldaneParams& p, double I_s, double Y)
{
    if (Y < 1e-12)
        return haldane_mu(p, I_s);
    return integrated_growth(p, I_s, Y) / Y;
}

inline double mean_growth_closed(const HaldaneParams& p, const LightColumn& c, const ExtinctionModel& m)
{
    c.validate();
    return mean_growth(p, c.I_s, extinction(m, c.X) * c.h);
}

inline double mean_growth_closed(const HanParams& p, const LightColumn& c, const ExtinctionModel& m)
{
    c.validate();
    const double Y = extinction(m, c.X) * c.h;
    if (Y < 1e-12)
        return han_mu(p, c.I_s) * seconds_per_day;
    return integrated_growth(p, c.I_s, Y) / Y;
}

/// (1/h) Int_{-h}^0 mu(I(X, z)) dz by adaptive quadrature.
inline double mean_growth_quadrature(const HaldaneParams& p, const LightColumn& c, const ExtinctionModel& m,
                                     Tolerance tol = {})
{
    c.validate();
    const double eps = extinction(m, c.X);
    auto integrand = [&](double z) { return haldane_mu(p, c.I_s * std::exp(eps * z)); };
    return integrate(integrand, -c.h, 0.0, tol) / c.h;
}

/// Same as above for the Han steady-state rate, in [1/d].
inline double mean_growth_quadrature(const HanParams& p, const LightColumn& c, const ExtinctionModel& m,
                                     Tolerance tol = {})
{
    c.validate();
    const double eps = extinction(m, c.X);
    auto integrand = [&](double z) { return han_mu(p, c.I_s * std::exp(eps * z)) * seconds_per_day; };
    return integrate(integrand, -c.h, 0.0, tol) / c.h;
}

/// (1/Y) Int_0^Y mu(I_s e^-y) dy by quadrature; optical-depth form.
inline double mean_growth_optical_quadrature(const HaldaneParams& p, double I_s, double Y, Tolerance tol = {})
{
    if (Y < 1e-12)
        return haldane_mu(p, I_s);
    auto integrand = [&](double y) { return haldane_mu(p, I_s * std::exp(-y)); };
    return integrate(integrand, 0.0, Y, tol) / Y;
}

/// P(Y) = (mu_bar(Y) - R) Y = Int_0^Y (mu(I_s e^-y) - R) dy  [1/d].
inline double optical_productivity(const HaldaneParams& p, double I_s, double Y)
{
    return integrated_growth(p, I_s, Y) - p.R * Y;
}

/// Net growth at the bottom of a column of optical depth Y: mu(I_s e^-Y) - R.
inline double bottom_net_growth(const HaldaneParams& p, double I_s, double Y)
{
    return haldane_mu(p, I_s * std::exp(-Y)) - p.R;
}

/// Pi = (mu_bar - R) X h  [g.m^-2.d^-1]. Negative values are returned as is.
inline double surface_productivity(const HaldaneParams& p, const ExtinctionModel& m, double X, double h,
                                   double I_s)
{
    if (!(X >= 0.0) || !(h > 0.0))
        throw DomainError("surface_productivity requires X >= 0 and h > 0");
    const double Y = extinction(m, X) * h;
    return (mean_growth(p, I_s, Y) - p.R) * X * h;
}

/**
 * dPi/dX from Pi = (X/eps) P(eps h):
 * P(Y) (eps - X eps')/eps^2 + (X/eps) (mu(I_s e^-Y) - R) eps' h.
 */
inline double surface_productivity_dX(const HaldaneParams& p, const ExtinctionModel& m, double X, double h,
                                      double I_s)
{
    const double eps = extinction(m, X);
    const double slope = extinction_slope(m, X);
    const double Y = eps * h;
    const double P = optical_productivity(p, I_s, Y);
    return P * (eps - X * slope) / (eps * eps) + X / eps * bottom_net_growth(p, I_s, Y) * slope * h;
}

struct ProductivityPoint
{
    double X;
    double h;
    double mu_bar;
    double P;
    double Pi;
};

inline ProductivityPoint evaluate_point(const HaldaneParams& p, const ExtinctionModel& m, double X, double h,
                                        double I_s)
{
    const double Y = extinction(m, X) * h;
    const double mu_bar = mean_growth(p, I_s, Y);
    return ProductivityPoint{X, h, mu_bar, optical_productivity(p, I_s, Y), (mu_bar - p.R) * X * h};
}

} // namespace pbr

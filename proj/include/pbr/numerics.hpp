#pragma once

/**
 * @file
 * Scalar numerical kernels shared by the model modules: adaptive quadrature,
 * bracketed root finding, golden-section maximization and an embedded
 * Runge-Kutta integrator. Everything is a free function template over a
 * caller-supplied callable; nothing here keeps state between calls.
 */

#include "pbr/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace pbr {

struct Tolerance
{
    double rel = 1e-10;
    double abs = 0.0;
    int max_iter = 50;

    void validate() const
    {
        if (!(rel > 0.0) || !(abs >= 0.0) || max_iter < 1)
            throw DomainError("Tolerance requires rel > 0, abs >= 0, max_iter >= 1");
    }
};

struct Bracket
{
    double lo;
    double hi;
};

namespace detail {

template <class F>
double simpson_refine(F& f, double a, double b, double fa, double fm, double fb, double whole, double eps,
                      int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;

    const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(left) + std::abs(right));
    if (std::abs(delta) <= 15.0 * eps || std::abs(delta) <= roundoff)
        return left + right + delta / 15.0;
    if (depth <= 0)
        throw NonConvergence("integrate: refinement did not stabilize within max_iter levels");
    return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
         + simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

} // namespace detail

/**
 * Adaptive Simpson quadrature with Richardson extrapolation of each accepted
 * panel. The interval is first split into 8 panels; the absolute target is
 * max(tol.abs, tol.rel * |coarse estimate|). Reversed limits flip the sign.
 */
template <class F>
double integrate(F&& f, double a, double b, Tolerance tol = {})
{
    tol.validate();
    if (a == b)
        return 0.0;
    if (a > b)
        return -integrate(std::forward<F>(f), b, a, tol);

    constexpr int panels = 8;
    const double width = (b - a) / panels;
    std::array<double, 2 * panels + 1> fx{};
    for (int i = 0; i <= 2 * panels; ++i)
        fx[i] = f(i == 2 * panels ? b : a + 0.5 * width * i);

    std::array<double, panels> coarse{};
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        coarse[i] = width / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
        total += coarse[i];
    }
    const double eps = std::max(tol.abs, tol.rel * std::abs(total)) / panels;

    double sum = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + width * i;
        const double hi = i + 1 == panels ? b : lo + width;
        sum += detail::simpson_refine(f, lo, hi, fx[2 * i], fx[2 * i + 1], fx[2 * i + 2], coarse[i], eps,
                                      tol.max_iter);
    }
    return sum;
}

/**
 * Brent's method (inverse quadratic / secant steps safeguarded by bisection).
 * The iterate never leaves [b.lo, b.hi]. Stops when |f(x)| <= tol.abs or the
 * enclosing interval is narrower than tol.rel * |x|.
 */
template <class F>
double find_root(F&& f, Bracket br, Tolerance tol = {1e-14, 0.0, 200})
{
    tol.validate();
    if (!(br.lo < br.hi))
        throw InvalidBracket("find_root: bracket requires lo < hi");

    double a = br.lo;
    double b = br.hi;
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if ((fa > 0.0) == (fb > 0.0))
        throw InvalidBracket("find_root: f(lo) and f(hi) have the same sign");

    double c = a;
    double fc = fa;
    double d = b - a;
    double e = d;
    constexpr double macheps = std::numeric_limits<double>::epsilon();

    for (int iter = 0; iter < tol.max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol_act = 2.0 * macheps * std::abs(b) + 0.5 * tol.rel * std::abs(b)
                             + std::numeric_limits<double>::min();
        const double half = 0.5 * (c - b);
        if (std::abs(half) <= tol_act || std::abs(fb) <= tol.abs || fb == 0.0)
            return std::clamp(b, br.lo, br.hi);

        if (std::abs(e) >= tol_act && std::abs(fa) > std::abs(fb)) {
            double p;
            double q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * half * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * half * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            else
                p = -p;
            if (2.0 * p < std::min(3.0 * half * q - std::abs(tol_act * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += std::abs(d) > tol_act ? d : (half > 0.0 ? tol_act : -tol_act);
        fb = f(b);
    }
    throw NonConvergence("find_root: no convergence within max_iter iterations");
}

struct ScalarMax
{
    double argmax;
    double max;
};

/**
 * Golden-section search for the maximum of a unimodal f on [b.lo, b.hi].
 * Unimodality is not checked. Shrinks until the width is at most
 * tol.rel * |argmax| + tol.abs.
 */
template <class F>
ScalarMax maximize_scalar(F&& f, Bracket br, Tolerance tol = {1e-10, 0.0, 300})
{
    tol.validate();
    if (!(br.lo < br.hi))
        throw InvalidBracket("maximize_scalar: bracket requires lo < hi");

    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = br.lo;
    double b = br.hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);

    for (int iter = 0; iter < tol.max_iter; ++iter) {
        const double best = f1 >= f2 ? x1 : x2;
        if (b - a <= tol.rel * std::abs(best) + tol.abs
            || b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)))
            return f1 >= f2 ? ScalarMax{x1, f1} : ScalarMax{x2, f2};
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    throw NonConvergence("maximize_scalar: bracket did not shrink within max_iter iterations");
}

template <std::size_t N>
using State = std::array<double, N>;

/// Accepted steps of an ODE integration, including the initial point.
template <std::size_t N>
struct OdeTrace
{
    std::vector<double> t;
    std::vector<State<N>> x;

    [[nodiscard]] std::size_t size() const { return t.size(); }
    [[nodiscard]] const State<N>& final_state() const { return x.back(); }
};

struct OdeOptions
{
    double initial_step = 0.0; ///< 0 selects a step from the initial derivative
    double max_step = std::numeric_limits<double>::infinity();
};

/**
 * Dormand-Prince 5(4) with FSAL and a mixed rel/abs RMS error norm.
 * tol.max_iter bounds the number of attempted steps.
 */
template <std::size_t N, class Rhs>
OdeTrace<N> integrate_ode(Rhs&& rhs, State<N> x0, double t0, double t1,
                          Tolerance tol = {1e-9, 1e-12, 1'000'000}, OdeOptions opt = {})
{
    tol.validate();
    if (!(t0 < t1))
        throw DomainError("integrate_ode: requires t0 < t1");

    // Butcher tableau
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    auto axpy = [](const State<N>& x, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
        State<N> out = x;
        for (const auto& [coef, k] : terms)
            for (std::size_t i = 0; i < N; ++i)
                out[i] += h * coef * (*k)[i];
        return out;
    };

    OdeTrace<N> trace;
    trace.t.push_back(t0);
    trace.x.push_back(x0);

    double t = t0;
    State<N> x = x0;
    State<N> k1 = rhs(t, x);

    double h = opt.initial_step;
    if (!(h > 0.0)) {
        double scale = 0.0;
        double dscale = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double w = tol.abs + tol.rel * std::abs(x[i]);
            scale += (x[i] / w) * (x[i] / w);
            dscale += (k1[i] / w) * (k1[i] / w);
        }
        scale = std::sqrt(scale / N);
        dscale = std::sqrt(dscale / N);
        h = (scale < 1e-5 || dscale < 1e-5) ? 1e-6 * (t1 - t0) : 0.01 * scale / dscale;
    }
    h = std::min({h, opt.max_step, t1 - t0});

    for (int step = 0; step < tol.max_iter; ++step) {
        const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0);
        if (h < h_min)
            throw StepUnderflow("integrate_ode: step size underflow at t = " + std::to_string(t));
        const bool last = t + h >= t1;
        if (last)
            h = t1 - t;

        const State<N> k2 = rhs(t + c2 * h, axpy(x, h, {{a21, &k1}}));
        const State<N> k3 = rhs(t + c3 * h, axpy(x, h, {{a31, &k1}, {a32, &k2}}));
        const State<N> k4 = rhs(t + c4 * h, axpy(x, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State<N> k5 = rhs(t + c5 * h, axpy(x, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State<N> k6 =
            rhs(t + h, axpy(x, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State<N> x_new = axpy(x, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State<N> k7 = rhs(t + h, x_new);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double w = tol.abs + tol.rel * std::max(std::abs(x[i]), std::abs(x_new[i]));
            err += (ei / w) * (ei / w);
        }
        err = std::sqrt(err / N);

        if (err <= 1.0 && std::isfinite(err)) {
            t = last ? t1 : t + h;
            x = x_new;
            k1 = k7;
            trace.t.push_back(t);
            trace.x.push_back(x);
            if (last)
                return trace;
            const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h = std::min(h * grow, opt.max_step);
        } else {
            const double shrink = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
            h *= shrink;
        }
    }
    throw NonConvergence("integrate_ode: step budget exhausted before t1");
}

} // namespace pbr

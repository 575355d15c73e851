#include "pbr/light.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pbr;

namespace {

// Frozen from an independent long double least-squares sum over X = 0..1000.
constexpr double frozen_alpha0_s0365 = 11.7593533592431;

} // namespace

TEST(Extinction, LinearLaw)
{
    const ExtinctionModel m{0.2, 10.0, 1.0};
    EXPECT_DOUBLE_EQ(extinction(m, 0.0), 10.0);
    EXPECT_DOUBLE_EQ(extinction(m, 50.0), 20.0);
    EXPECT_DOUBLE_EQ(extinction_slope(m, 50.0), 0.2);
    EXPECT_THROW(extinction(m, -1.0), DomainError);
}

TEST(Extinction, PowerLaw)
{
    const ExtinctionModel m{2.0, 1.0, 0.5};
    EXPECT_DOUBLE_EQ(extinction(m, 16.0), 9.0);
    EXPECT_DOUBLE_EQ(extinction_slope(m, 16.0), 0.25);
}

TEST(ExtinctionModel, Validation)
{
    EXPECT_THROW((ExtinctionModel{0.0, 1.0, 1.0}.validate()), DomainError);
    EXPECT_THROW((ExtinctionModel{0.2, -1.0, 1.0}.validate()), DomainError);
    EXPECT_THROW((ExtinctionModel{0.2, 1.0, 0.0}.validate()), DomainError);
    EXPECT_THROW((ExtinctionModel{0.2, 1.0, 1.1}.validate()), DomainError);
    EXPECT_NO_THROW((ExtinctionModel{0.2, 0.0, 1.0}.validate()));
}

TEST(IntensityAt, BeerLambert)
{
    const ExtinctionModel m{0.2, 10.0, 1.0};
    const LightColumn c{2000.0, 0.15, 50.0};
    EXPECT_DOUBLE_EQ(intensity_at(c, m, 0.0), 2000.0);
    EXPECT_NEAR(intensity_at(c, m, -0.15), 2000.0 * std::exp(-3.0), 1e-12);
    EXPECT_THROW(intensity_at(c, m, 0.01), DomainError);
    EXPECT_THROW(intensity_at(c, m, -0.2), DomainError);
}

TEST(IntensityAt, DependsOnOpticalDepthOnly)
{
    const ExtinctionModel m{0.2, 10.0, 1.0};
    // eps(50) * 0.15 = 3 = eps(140) * 0.0789...
    const double h2 = 3.0 / extinction(m, 140.0);
    EXPECT_NEAR(intensity_at({2000.0, 0.15, 50.0}, m, -0.15), intensity_at({2000.0, h2, 140.0}, m, -h2), 1e-10);
}

TEST(MeanLight, ClosedFormAgainstQuadrature)
{
    const ExtinctionModel m{0.2, 10.0, 1.0};
    for (double X : {0.0, 1e-9, 5.0, 50.0, 500.0}) {
        const LightColumn c{2000.0, 0.1, X};
        const double eps = extinction(m, X);
        const auto q = oracle::gauss_legendre([&](oracle::ld z) { return 2000.0L * std::exp(eps * z); }, -0.1L, 0.0L)
                     / 0.1L;
        EXPECT_NEAR(mean_light(c, m), static_cast<double>(q), 1e-12 * 2000.0) << "X = " << X;
    }
}

TEST(MeanLight, TinyOpticalDepthSeries)
{
    const ExtinctionModel m{1e-12, 0.0, 1.0};
    const double v = mean_light({2000.0, 1e-3, 1.0}, m);
    EXPECT_NEAR(v, 2000.0, 1e-9);
    EXPECT_LE(v, 2000.0);
}

TEST(FitAlpha0, LinearIsIdentity)
{
    EXPECT_DOUBLE_EQ(fit_alpha0(0.2, 1.0, 0.0, 1000.0), 0.2);
}

TEST(FitAlpha0, FrozenValue)
{
    long double num = 0, den = 0;
    for (int i = 0; i <= 1000; ++i) {
        const long double x = i;
        num += x * std::pow(x, 0.365L);
        den += std::pow(x, 0.73L);
    }
    EXPECT_NEAR(fit_alpha0(0.2, 0.365, 0.0, 1000.0, 1001), static_cast<double>(0.2L * num / den), 1e-12);
    EXPECT_NEAR(fit_alpha0(0.2, 0.365, 0.0, 1000.0, 1001), frozen_alpha0_s0365, 1e-12);
}

TEST(FitAlpha0, ScaleEquivariantAndPositive)
{
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> s(0.05, 1.0), a(0.01, 5.0);
    for (int i = 0; i < 50; ++i) {
        const double sv = s(rng), av = a(rng);
        const double base = fit_alpha0(1.0, sv, 0.0, 1000.0);
        EXPECT_GT(base, 0.0);
        EXPECT_NEAR(fit_alpha0(av, sv, 0.0, 1000.0), av * base, 1e-12 * av * base);
    }
}

TEST(FitAlpha0, Errors)
{
    EXPECT_THROW(fit_alpha0(0.2, 0.5, 10.0, 10.0), DegenerateRange);
    EXPECT_THROW(fit_alpha0(0.2, 0.0, 0.0, 10.0), DomainError);
    EXPECT_THROW(fit_alpha0(0.2, 0.5, 10.0, 1.0), DomainError);
    EXPECT_THROW(fit_alpha0(ExtinctionModel{0.2, 0.0, 0.5}, 0.3, 0.0, 10.0), DomainError);
    EXPECT_DOUBLE_EQ(fit_alpha0(ExtinctionModel{0.2, 3.0, 1.0}, 1.0, 0.0, 10.0), 0.2);
}

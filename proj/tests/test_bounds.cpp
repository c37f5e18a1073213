#include "polarvlsi/bounds.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace polarvlsi::bounds;

TEST(Thompson, Values)
{
	EXPECT_EQ(thompson_area(0).value, 0.0);
	EXPECT_EQ(thompson_area(4).value, 4.0);
	EXPECT_EQ(thompson_area(256).value, 256.0 * 256 / 4);
	EXPECT_THROW(thompson_area(-1), std::invalid_argument);
}

TEST(EncoderAt2, Values)
{
	EXPECT_DOUBLE_EQ(encoder_at2(256, 0.75).value, 256.0);
	EXPECT_DOUBLE_EQ(encoder_at2(1024, 0.75).value, 4096.0);
	EXPECT_LT(encoder_at2(1024, 0.5 + 1e-9).value, 1e-10);
	EXPECT_THROW(encoder_at2(256, 0.5), OutOfRegime);
	EXPECT_THROW(encoder_at2(256, 0.3), OutOfRegime);
	EXPECT_THROW(encoder_at2(0, 0.75), std::invalid_argument);
}

TEST(EncoderEnergy, Values)
{
	EXPECT_DOUBLE_EQ(encoder_energy(256, 0.75, 1).value, 256.0);
	EXPECT_DOUBLE_EQ(encoder_energy(256, 0.75, 0.5).value, 128.0);
	EXPECT_DOUBLE_EQ(encoder_energy(1024, 0.75, 1).value, 2048.0);
	EXPECT_THROW(encoder_energy(256, 0.75, 0), std::invalid_argument);
	EXPECT_THROW(encoder_energy(256, 0.75, 1.5), std::invalid_argument);
	EXPECT_THROW(encoder_energy(256, 0.5, 1), OutOfRegime);
}

TEST(EncoderBounds, EnergyFollowsFromAreaTime)
{
	// both come from a bisection width of at least N (2R - 1) / 4
	for (double N : {16.0, 256.0, 4096.0})
		for (double R : {0.6, 0.75, 0.9, 1.0}) {
			const double omega = N * (2 * R - 1) / 4;
			EXPECT_NEAR(encoder_at2(N, R).value, thompson_area(omega).value, 1e-9 * N * N);
			EXPECT_NEAR(encoder_energy(N, R, 1).value, omega * std::sqrt(N) / 2, 1e-9 * N * N);
		}
}

TEST(EncoderBounds, MonotoneInRate)
{
	double prev_a = 0, prev_e = 0;
	for (double R = 0.55; R <= 1.0; R += 0.05) {
		const double a = encoder_at2(512, R).value, e = encoder_energy(512, R, 0.3).value;
		EXPECT_GT(a, prev_a);
		EXPECT_GT(e, prev_e);
		prev_a = a;
		prev_e = e;
	}
}

TEST(DecoderMbw, Values)
{
	EXPECT_DOUBLE_EQ(decoder_mbw_bound(8, 0.75).value, 2.0);
	EXPECT_NEAR(decoder_mbw_bound(1024, 0.9).value, 716.8, 1e-9);
	EXPECT_LT(decoder_mbw_bound(1024, 2.0 / 3 + 1e-12).value, 1e-6);
	EXPECT_THROW(decoder_mbw_bound(8, 2.0 / 3), OutOfRegime);
	EXPECT_THROW(decoder_mbw_bound(8, 0.5), OutOfRegime);
}

TEST(DecoderEnergy, ScalingOnly)
{
	const auto r = decoder_energy_scale(8, 0.75);
	EXPECT_DOUBLE_EQ(r.value, 2 * std::sqrt(8.0));
	EXPECT_FALSE(r.has_constant);
	EXPECT_NEAR(decoder_energy_scale(1024, 0.9).value, 716.8 * 32, 1e-9);
	// N^1.5 at fixed rate
	EXPECT_NEAR(decoder_energy_scale(4096, 0.8).value / decoder_energy_scale(1024, 0.8).value, 8.0, 1e-12);
	EXPECT_THROW(AbsoluteBound{r}, std::invalid_argument);
	const AbsoluteBound ok(encoder_at2(256, 0.75));
	EXPECT_TRUE(ok.satisfied_by(256));
	EXPECT_FALSE(ok.satisfied_by(255));
}

TEST(Chi, Values)
{
	EXPECT_DOUBLE_EQ(chi(0.25, 0.5), 2.0);
	EXPECT_DOUBLE_EQ(chi(0, 0.7), 1.0);
	EXPECT_NEAR(chi(0.45, 0.5), 10.0, 1e-12);
	EXPECT_THROW(chi(0.5, 0.5), OutOfRegime);
	EXPECT_THROW(chi(0.2, 0), std::invalid_argument);
}

TEST(ChiWindow, Exponents)
{
	const auto w = chi_energy_window(2);
	EXPECT_EQ(w.lower_exponent, 5.325);
	EXPECT_EQ(w.upper_exponent, 7.05);
	EXPECT_DOUBLE_EQ(w.lower.value, std::pow(2.0, 5.325));
	EXPECT_DOUBLE_EQ(w.general_floor.value, std::pow(2.0, 2.5));
	EXPECT_FALSE(w.lower.has_constant);
	EXPECT_FALSE(w.upper.has_constant);
	EXPECT_NEAR(kChiLowerExponent, 1.5 * kMuLower, 1e-12);
	EXPECT_NEAR(kChiUpperExponent, 1.5 * kMuUpper, 1e-12);
	EXPECT_THROW(chi_energy_window(1), std::invalid_argument);
}

TEST(ChiWindow, OrderedForLargeChi)
{
	for (double x : {3.0, 10.0, 100.0}) {
		const auto w = chi_energy_window(x);
		EXPECT_LT(w.general_floor.value, w.lower.value);
		EXPECT_LT(w.lower.value, w.upper.value);
	}
}

TEST(Fit, PowerLaw)
{
	std::vector<std::pair<double, double>> pts;
	for (double N : {16.0, 64.0, 256.0})
		pts.emplace_back(N, std::pow(N, 1.5));
	const auto fit = fit_scaling_exponent(pts);
	EXPECT_NEAR(fit.slope, 1.5, 1e-9);
	EXPECT_LT(fit.residual, 1e-9);
	EXPECT_EQ(fit.points.size(), 3u);
}

TEST(Fit, ConstantSeries)
{
	EXPECT_NEAR(fit_scaling_exponent({{16, 7}, {64, 7}, {256, 7}, {1024, 7}}).slope, 0.0, 1e-9);
}

TEST(Fit, PowerTimesLogFourth)
{
	// reference slope from an independent least-squares fit
	std::vector<std::pair<double, double>> pts;
	for (int n = 4; n <= 10; ++n) {
		const double N = std::ldexp(1.0, n);
		pts.emplace_back(N, std::pow(N, 1.5) * std::pow(n, 4));
	}
	const auto fit = fit_scaling_exponent(pts);
	EXPECT_NEAR(fit.slope, 2.3681165138644036, 1e-9);
	EXPECT_GT(fit.residual, 0.0);
}

TEST(Fit, Errors)
{
	EXPECT_THROW(fit_scaling_exponent({{1, 1}, {2, 2}}), std::invalid_argument);
	EXPECT_THROW(fit_scaling_exponent({{4, 1}, {4, 2}, {4, 3}}), std::invalid_argument);
	EXPECT_THROW(fit_scaling_exponent({{4, 1}, {8, 0}, {16, 3}}), std::invalid_argument);
}

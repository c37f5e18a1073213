#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polarvlsi::bounds {

/// The argument lies outside the range in which the bound is stated.
struct OutOfRegime : std::domain_error
{
	using std::domain_error::domain_error;
};

struct BoundInputs
{
	std::optional<double> N, R, q, omega, chi, C;
};

/// An evaluated bound. has_constant is false for results known only up to
/// an unspecified constant; their value is the scaling quantity alone.
struct BoundReport
{
	std::string name;
	BoundInputs inputs;
	double value = 0;
	bool has_constant = true;
};

/// A bound that may be compared against a measurement. Only reports that
/// carry their constant convert.
class AbsoluteBound
{
public:
	explicit AbsoluteBound(const BoundReport &r) : report_(r)
	{
		if (!r.has_constant)
			throw std::invalid_argument("bound '" + r.name + "' has no constant and cannot be compared");
	}

	const BoundReport &report() const noexcept { return report_; }
	double value() const noexcept { return report_.value; }
	bool satisfied_by(double measured) const noexcept { return measured >= report_.value; }

private:
	BoundReport report_;
};

// Block-length exponents mu for the polar scaling law: 3.55 is the lower
// end of the reported window, 4.7 the tightest upper bound. Energy scales
// as N^1.5, so the chi exponents are 1.5 * mu.
inline constexpr double kMuLower = 3.55;
inline constexpr double kMuUpper = 4.7;
inline constexpr double kChiLowerExponent = 5.325; // 1.5 * 3.55
inline constexpr double kChiUpperExponent = 7.05;  // 1.5 * 4.7
inline constexpr double kChiGeneralExponent = 2.5;

/// Area of a circuit whose communication graph has bisection width omega.
inline BoundReport thompson_area(double omega)
{
	if (!(omega >= 0))
		throw std::invalid_argument("thompson_area: omega must be >= 0");
	BoundReport r{"thompson_area", {}, omega * omega / 4, true};
	r.inputs.omega = omega;
	return r;
}

/// Encoder area-time-squared: N^2 (2R - 1)^2 / 64 for R > 1/2.
inline BoundReport encoder_at2(double N, double R)
{
	if (!(N > 0))
		throw std::invalid_argument("encoder_at2: N must be positive");
	if (!(R > 0.5) || R > 1)
		throw OutOfRegime("encoder_at2: requires 1/2 < R <= 1");
	const double g = 2 * R - 1;
	BoundReport r{"encoder_at2", {}, N * N * g * g / 64, true};
	r.inputs.N = N;
	r.inputs.R = R;
	return r;
}

/// Encoder energy: q N^{3/2} (2R - 1) / 8 for R > 1/2.
inline BoundReport encoder_energy(double N, double R, double q)
{
	if (!(N > 0))
		throw std::invalid_argument("encoder_energy: N must be positive");
	if (!(R > 0.5) || R > 1)
		throw OutOfRegime("encoder_energy: requires 1/2 < R <= 1");
	if (!(q > 0 && q <= 1))
		throw std::invalid_argument("encoder_energy: q must lie in (0, 1]");
	BoundReport r{"encoder_energy", {}, q * N * std::sqrt(N) * (2 * R - 1) / 8, true};
	r.inputs.N = N;
	r.inputs.R = R;
	r.inputs.q = q;
	return r;
}

/// Bisection width of the unfrozen symbol nodes: N (3R - 2) for R > 2/3.
inline BoundReport decoder_mbw_bound(double N, double R)
{
	if (!(N > 0))
		throw std::invalid_argument("decoder_mbw_bound: N must be positive");
	if (!(3 * R > 2) || R > 1)
		throw OutOfRegime("decoder_mbw_bound: requires 2/3 < R <= 1");
	BoundReport r{"decoder_mbw_bound", {}, N * (3 * R - 2), true};
	r.inputs.N = N;
	r.inputs.R = R;
	return r;
}

/// omega * sqrt(N) with omega = N (3R - 2); decoder energy grows at least
/// this fast, with no constant known.
inline BoundReport decoder_energy_scale(double N, double R)
{
	const BoundReport w = decoder_mbw_bound(N, R);
	BoundReport r{"decoder_energy_scale", {}, w.value * std::sqrt(N), false};
	r.inputs.N = N;
	r.inputs.R = R;
	r.inputs.omega = w.value;
	return r;
}

/// Reciprocal gap to capacity 1 / (1 - R/C).
inline double chi(double R, double C)
{
	if (!(C > 0 && C <= 1) || !(R >= 0))
		throw std::invalid_argument("chi: requires R >= 0 and 0 < C <= 1");
	if (!(R < C))
		throw OutOfRegime("chi: requires R < C");
	return 1 / (1 - R / C);
}

struct ChiEnergyWindow
{
	double lower_exponent = kChiLowerExponent;
	double upper_exponent = kChiUpperExponent;
	BoundReport lower, upper, general_floor;
};

/// Energy window chi^5.325 .. chi^7.05 log^4 chi, with the chi^2.5 floor that
/// holds for every scheme of this error class. All scaling-only.
inline ChiEnergyWindow chi_energy_window(double x)
{
	if (!(x > 1))
		throw std::invalid_argument("chi_energy_window: chi must exceed 1");
	ChiEnergyWindow w;
	const double lg = std::log(x);
	w.lower = {"chi_energy_lower", {}, std::pow(x, kChiLowerExponent), false};
	w.upper = {"chi_energy_upper", {}, std::pow(x, kChiUpperExponent) * lg * lg * lg * lg, false};
	w.general_floor = {"chi_energy_general", {}, std::pow(x, kChiGeneralExponent), false};
	for (auto *r : {&w.lower, &w.upper, &w.general_floor})
		r->inputs.chi = x;
	return w;
}

struct ScalingFit
{
	std::vector<std::pair<double, double>> points;
	double slope = 0;
	double intercept = 0;
	/// Largest |log value - fitted log value|.
	double residual = 0;
};

/// Least-squares line through (ln N, ln value).
inline ScalingFit fit_scaling_exponent(std::vector<std::pair<double, double>> points)
{
	if (points.size() < 3)
		throw std::invalid_argument("fit_scaling_exponent: need at least 3 points");
	double sx = 0, sy = 0;
	for (auto [x, y] : points) {
		if (!(x > 0) || !(y > 0))
			throw std::invalid_argument("fit_scaling_exponent: points must be positive");
		sx += std::log(x);
		sy += std::log(y);
	}
	const double k = static_cast<double>(points.size());
	const double mx = sx / k, my = sy / k;
	double sxx = 0, sxy = 0;
	for (auto [x, y] : points) {
		const double dx = std::log(x) - mx;
		sxx += dx * dx;
		sxy += dx * (std::log(y) - my);
	}
	if (!(sxx > 0))
		throw std::invalid_argument("fit_scaling_exponent: need at least two distinct N");
	ScalingFit fit;
	fit.slope = sxy / sxx;
	fit.intercept = my - fit.slope * mx;
	for (auto [x, y] : points)
		fit.residual = std::max(fit.residual, std::abs(std::log(y) - (fit.intercept + fit.slope * std::log(x))));
	fit.points = std::move(points);
	return fit;
}

} // namespace polarvlsi::bounds

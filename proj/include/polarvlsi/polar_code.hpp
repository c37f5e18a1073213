#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarvlsi/gf2.hpp"
#include "polarvlsi/rng.hpp"

namespace polarvlsi {

using Bits = std::vector<std::uint8_t>;

/// Channel output symbol of the binary erasure channel.
enum class Symbol : std::uint8_t { zero = 0, one = 1, erased = 2 };

inline Symbol to_symbol(std::uint8_t bit) { return bit ? Symbol::one : Symbol::zero; }
inline bool known(Symbol s) { return s != Symbol::erased; }

struct ErasureWord
{
	std::vector<Symbol> symbols;

	std::size_t size() const noexcept { return symbols.size(); }

	static ErasureWord from_bits(const Bits &bits)
	{
		ErasureWord w;
		w.symbols.reserve(bits.size());
		for (auto b : bits)
			w.symbols.push_back(to_symbol(b));
		return w;
	}
};

/// Check-node combine: erased if either input is.
inline Symbol check_combine(Symbol a, Symbol b)
{
	if (!known(a) || !known(b))
		return Symbol::erased;
	return to_symbol(static_cast<std::uint8_t>(a) ^ static_cast<std::uint8_t>(b));
}

/// Variable-node combine given the upper decision u_hat.
inline Symbol variable_combine(Symbol a, Symbol b, std::uint8_t u_hat)
{
	if (known(b))
		return b;
	if (known(a))
		return to_symbol(static_cast<std::uint8_t>(a) ^ u_hat);
	return Symbol::erased;
}

/// Per-index erasure Bhattacharyya scores. Each level maps v to the adjacent
/// pair (2v - v^2, v^2), minus branch first.
inline std::vector<double> bhattacharyya_vector(int n, double eps)
{
	gf2::require_level(n, "bhattacharyya_vector");
	if (!(eps >= 0.0 && eps <= 1.0))
		throw std::invalid_argument("bhattacharyya_vector: erasure probability outside [0, 1]");
	std::vector<double> z{eps};
	for (int level = 0; level < n; ++level) {
		std::vector<double> next;
		next.reserve(2 * z.size());
		for (double v : z) {
			next.push_back(2 * v - v * v);
			next.push_back(v * v);
		}
		z = std::move(next);
	}
	return z;
}

class PolarCode
{
public:
	/// Freezes the N - K indices with the largest score; ties freeze the
	/// smaller index. frozen_values are listed in ascending frozen-index order
	/// and default to all zero when omitted.
	static PolarCode construct(int n, double eps, std::size_t K, std::optional<Bits> frozen_values = std::nullopt)
	{
		auto z = bhattacharyya_vector(n, eps);
		const std::size_t N = z.size();
		if (K > N)
			throw std::invalid_argument("PolarCode::construct: K exceeds block length");
		std::vector<std::size_t> order(N);
		std::iota(order.begin(), order.end(), std::size_t{0});
		std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
		std::vector<std::size_t> frozen;
		for (std::size_t k = 0; k < N - K; ++k)
			frozen.push_back(order[k] + 1);
		Bits values = frozen_values.value_or(Bits(N - K, 0));
		return PolarCode(n, gf2::IndexSet(N, std::move(frozen)), std::move(values), std::move(z));
	}

	/// Explicit frozen set; scores may be empty when not meaningful.
	PolarCode(int n, gf2::IndexSet frozen, Bits frozen_values, std::vector<double> z_scores = {})
		: n_(n), frozen_(std::move(frozen)), frozen_values_(std::move(frozen_values)), z_(std::move(z_scores))
	{
		gf2::require_level(n, "PolarCode");
		if (frozen_.universe_size() != length())
			throw std::invalid_argument("PolarCode: frozen set universe must equal the block length");
		if (frozen_values_.size() != frozen_.size())
			throw std::invalid_argument("PolarCode: one frozen value per frozen index required");
		if (!z_.empty() && z_.size() != length())
			throw std::invalid_argument("PolarCode: score vector length must equal the block length");
		is_frozen_.assign(length(), 0);
		full_values_.assign(length(), 0);
		for (std::size_t k = 0; k < frozen_.size(); ++k) {
			is_frozen_[frozen_.members()[k] - 1] = 1;
			full_values_[frozen_.members()[k] - 1] = frozen_values_[k] & 1;
		}
		for (std::size_t i = 0; i < length(); ++i)
			if (!is_frozen_[i])
				free_.push_back(i + 1);
	}

	int level() const noexcept { return n_; }
	std::size_t length() const noexcept { return std::size_t{1} << n_; }
	std::size_t info_length() const noexcept { return free_.size(); }
	double rate() const noexcept { return static_cast<double>(info_length()) / static_cast<double>(length()); }
	const gf2::IndexSet &frozen() const noexcept { return frozen_; }
	gf2::IndexSet free_indices() const { return frozen_.complement(); }
	const Bits &frozen_values() const noexcept { return frozen_values_; }
	const std::vector<double> &z_scores() const noexcept { return z_; }

	/// 0-based query.
	bool is_frozen(std::size_t i) const { return is_frozen_[i] != 0; }
	/// Frozen value at 0-based index i (0 for free indices).
	std::uint8_t frozen_value_at(std::size_t i) const { return full_values_[i]; }

	/// Full input vector u: info at free indices, frozen values elsewhere.
	Bits assemble(const Bits &info) const
	{
		if (info.size() != info_length())
			throw std::invalid_argument("PolarCode: info length must equal K = " + std::to_string(info_length()));
		Bits u = full_values_;
		for (std::size_t k = 0; k < free_.size(); ++k)
			u[free_[k] - 1] = info[k] & 1;
		return u;
	}

	Bits extract_info(const Bits &u) const
	{
		Bits info(free_.size());
		for (std::size_t k = 0; k < free_.size(); ++k)
			info[k] = u[free_[k] - 1];
		return info;
	}

private:
	int n_;
	gf2::IndexSet frozen_;
	Bits frozen_values_;
	std::vector<double> z_;
	Bits is_frozen_, full_values_;
	std::vector<std::size_t> free_;
};

/// x = u * G_n by dense matrix-vector product.
inline Bits encode_reference(const PolarCode &code, const Bits &info)
{
	const Bits u = code.assemble(info);
	const gf2::BitMatrix g = gf2::g_matrix(code.level());
	Bits x(code.length(), 0);
	for (std::size_t r = 0; r < u.size(); ++r)
		if (u[r])
			for (std::size_t c = 0; c < x.size(); ++c)
				x[c] ^= static_cast<std::uint8_t>(g.at(r, c));
	return x;
}

/// In-place butterfly for v * F_n.
inline void butterfly_f(std::span<std::uint8_t> v)
{
	for (std::size_t half = v.size() / 2; half >= 1; half /= 2)
		for (std::size_t base = 0; base < v.size(); base += 2 * half)
			for (std::size_t k = 0; k < half; ++k)
				v[base + k] ^= v[base + half + k];
}

/// x = u * G_n = (u B_n) F_n via the butterfly.
inline Bits encode(const PolarCode &code, const Bits &info)
{
	const Bits u = code.assemble(info);
	const auto sigma = gf2::bit_reversal_perm(code.level());
	Bits v(u.size());
	for (std::size_t k = 0; k < v.size(); ++k)
		v[k] = u[sigma[k] - 1];
	butterfly_f(v);
	return v;
}

struct DecodeResult
{
	Bits info;
	/// First free index (1-based) whose estimate stayed erased.
	std::optional<std::size_t> failed_index;

	bool ok() const noexcept { return !failed_index.has_value(); }
};

namespace detail {

// Successive cancellation against F_n on a block whose channel values are
// already in butterfly order. Returns the re-encoded block, or nullopt on
// the first unresolved free index.
class ScDecoder
{
public:
	explicit ScDecoder(const PolarCode &code) : code_(code), u_(code.length(), 0) {}

	std::optional<Bits> run(std::vector<Symbol> llr, std::size_t first)
	{
		if (llr.size() == 1) {
			const std::size_t i = first;
			if (code_.is_frozen(i)) {
				u_[i] = code_.frozen_value_at(i);
			} else if (known(llr[0])) {
				u_[i] = static_cast<std::uint8_t>(llr[0]);
			} else {
				failed_ = i + 1;
				return std::nullopt;
			}
			return Bits{u_[i]};
		}
		const std::size_t half = llr.size() / 2;
		std::vector<Symbol> upper(half), lower(half);
		for (std::size_t k = 0; k < half; ++k)
			upper[k] = check_combine(llr[k], llr[half + k]);
		auto a = run(std::move(upper), first);
		if (!a)
			return std::nullopt;
		for (std::size_t k = 0; k < half; ++k)
			lower[k] = variable_combine(llr[k], llr[half + k], (*a)[k]);
		auto b = run(std::move(lower), first + half);
		if (!b)
			return std::nullopt;
		Bits out(llr.size());
		for (std::size_t k = 0; k < half; ++k) {
			out[k] = (*a)[k] ^ (*b)[k];
			out[half + k] = (*b)[k];
		}
		return out;
	}

	const Bits &u() const noexcept { return u_; }
	std::size_t failed() const noexcept { return failed_; }

private:
	const PolarCode &code_;
	Bits u_;
	std::size_t failed_ = 0;
};

} // namespace detail

/// Successive cancellation decoding over {0, 1, erased}. Frozen indices
/// take their frozen value; an erased estimate at a free index is a block
/// error reported at that index.
inline DecodeResult sc_decode(const PolarCode &code, const ErasureWord &received)
{
	if (received.size() != code.length())
		throw std::invalid_argument("sc_decode: received word length must equal N");
	// x_j = (u F_n)_{sigma(j)}, so undo the bit reversal on the channel side
	const auto sigma = gf2::bit_reversal_perm(code.level());
	std::vector<Symbol> y(code.length());
	for (std::size_t k = 0; k < y.size(); ++k)
		y[k] = received.symbols[sigma[k] - 1];
	detail::ScDecoder dec(code);
	DecodeResult res;
	if (!dec.run(std::move(y), 0)) {
		res.failed_index = dec.failed();
		return res;
	}
	res.info = code.extract_info(dec.u());
	return res;
}

struct PeEstimate
{
	std::uint64_t trials = 0;
	std::uint64_t failures = 0;
	double p_hat = 0;
	double ci95_halfwidth = 0;
	std::uint64_t seed = 0;
};

/// Half-width of the 95% Wilson score interval.
inline double wilson_halfwidth(std::uint64_t failures, std::uint64_t trials)
{
	const double z = 1.959963984540054;
	const double n = static_cast<double>(trials);
	const double p = static_cast<double>(failures) / n;
	return z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
}

/// Monte-Carlo block error rate over i.i.d. erasures. Trial t draws its
/// info bits and its erasure pattern from separate substreams of (seed, t),
/// so erasure sets are nested across eps at a fixed seed.
inline PeEstimate simulate_block_error(const PolarCode &code, double eps, std::uint64_t trials, std::uint64_t seed)
{
	if (trials == 0)
		throw std::invalid_argument("simulate_block_error: trials must be >= 1");
	if (!(eps >= 0.0 && eps <= 1.0))
		throw std::invalid_argument("simulate_block_error: erasure probability outside [0, 1]");
	PeEstimate est;
	est.trials = trials;
	est.seed = seed;
	Bits info(code.info_length());
	for (std::uint64_t t = 0; t < trials; ++t) {
		SplitMix64 info_rng = substream(seed, 2 * t);
		SplitMix64 chan_rng = substream(seed, 2 * t + 1);
		for (auto &b : info)
			b = info_rng.bit();
		ErasureWord y = ErasureWord::from_bits(encode(code, info));
		for (auto &s : y.symbols)
			if (chan_rng.uniform01() < eps)
				s = Symbol::erased;
		const DecodeResult r = sc_decode(code, y);
		if (!r.ok() || r.info != info)
			++est.failures;
	}
	est.p_hat = static_cast<double>(est.failures) / static_cast<double>(trials);
	est.ci95_halfwidth = wilson_halfwidth(est.failures, trials);
	return est;
}

} // namespace polarvlsi

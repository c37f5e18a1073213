#pragma once

#include <cstdint>
#include <limits>

namespace polarvlsi {

/// SplitMix64 finalizer. Used both as the stream generator and to derive
/// independent substreams from (seed, index) pairs.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
	x += 0x9e3779b97f4a7c15ULL;
	x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
	x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
	return x ^ (x >> 31);
}

/// Small deterministic generator whose output does not depend on the
/// standard library implementation, so seeded results are byte-stable.
class SplitMix64
{
public:
	using result_type = std::uint64_t;

	explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

	static constexpr result_type min() noexcept { return 0; }
	static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

	constexpr result_type operator()() noexcept
	{
		std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
		return z ^ (z >> 31);
	}

	/// Uniform double in [0, 1) with 53 random bits.
	double uniform01() noexcept
	{
		return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
	}

	/// Uniform integer in [0, bound). bound must be nonzero.
	std::uint64_t below(std::uint64_t bound) noexcept
	{
		// rejection on the top of the range keeps the draw unbiased
		const std::uint64_t limit = max() - max() % bound;
		std::uint64_t x;
		do {
			x = (*this)();
		} while (x >= limit);
		return x % bound;
	}

	bool bit() noexcept { return ((*this)() >> 63) != 0; }

private:
	std::uint64_t state_;
};

/// Independent stream for item `index` of a run keyed by `seed`. Results
/// depend only on the pair, never on the order items are processed in.
inline SplitMix64 substream(std::uint64_t seed, std::uint64_t index) noexcept
{
	return SplitMix64(mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

} // namespace polarvlsi

// Encode a random message with a rate-1/2 polar code, erase part of the
// codeword and recover it with successive cancellation.
#include <polarvlsi/polarvlsi.hpp>

#include <cstdio>

using namespace polarvlsi;

int main()
{
	const int n = 6;
	const double eps = 0.25;
	const auto code = PolarCode::construct(n, eps, std::size_t{1} << (n - 1));

	SplitMix64 rng(2024);
	Bits info(code.info_length());
	for (auto &b : info)
		b = rng.bit();
	const Bits x = encode(code, info);

	auto received = ErasureWord::from_bits(x);
	std::size_t erased = 0;
	for (auto &s : received.symbols)
		if (rng.uniform01() < eps) {
			s = Symbol::erased;
			++erased;
		}

	const auto result = sc_decode(code, received);
	std::printf("N=%zu K=%zu erased=%zu\n", code.length(), code.info_length(), erased);
	if (result.ok())
		std::printf("decoded %s\n", result.info == info ? "correctly" : "incorrectly");
	else
		std::printf("decoder stopped at free index %zu\n", *result.failed_index);

	const auto pe = simulate_block_error(code, eps, 10000, 7);
	std::printf("block error %.4f +/- %.4f over %llu trials\n", pe.p_hat, pe.ci95_halfwidth,
	            static_cast<unsigned long long>(pe.trials));
}

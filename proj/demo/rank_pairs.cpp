// Minimum rank sum over balanced rectangle pairs of F_n and G_n.
#include <polarvlsi/polarvlsi.hpp>

#include <cstdio>

using namespace polarvlsi::gf2;

int main()
{
	for (int n = 1; n <= 3; ++n)
		for (Target t : {Target::F, Target::G}) {
			const auto rep = min_rank_sum({.n = n, .target = t});
			std::printf("%s_%d: min %zu, bound %zu, rows %s cols %s\n", to_string(t), n, rep.min_rank_sum, rep.bound,
			            rep.witness_rows.to_string().c_str(), rep.witness_cols.to_string().c_str());
		}

	const auto rep = min_rank_sum({.n = 4, .mode = SearchMode::sampled, .samples = 100000, .seed = 20240601});
	std::printf("F_4 sampled over %llu pairs: min %zu, bound %zu%s\n",
	            static_cast<unsigned long long>(rep.pairs_checked), rep.min_rank_sum, rep.bound,
	            rep.bound_holds ? "" : " (below bound)");
}

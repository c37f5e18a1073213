#pragma once

// Independent reference computations used only by the tests. Nothing here
// shares code paths with the library routines they check.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<int>>;

/// Rank over GF(2) by textbook elimination on int entries.
inline std::size_t rank(Dense m)
{
	if (m.empty() || m[0].empty())
		return 0;
	const std::size_t R = m.size(), C = m[0].size();
	std::size_t rank = 0;
	for (std::size_t c = 0; c < C && rank < R; ++c) {
		std::size_t p = rank;
		while (p < R && m[p][c] % 2 == 0)
			++p;
		if (p == R)
			continue;
		std::swap(m[p], m[rank]);
		for (std::size_t r = 0; r < R; ++r)
			if (r != rank && m[r][c] % 2)
				for (std::size_t k = 0; k < C; ++k)
					m[r][k] = (m[r][k] + m[rank][k]) % 2;
		++rank;
	}
	return rank;
}

/// F_n via the Kronecker power of [[1,0],[1,1]].
inline Dense kron_f(int n)
{
	Dense m{{1}};
	for (int level = 0; level < n; ++level) {
		const std::size_t h = m.size();
		Dense next(2 * h, std::vector<int>(2 * h, 0));
		const int k[2][2] = {{1, 0}, {1, 1}};
		for (int a = 0; a < 2; ++a)
			for (int b = 0; b < 2; ++b)
				for (std::size_t r = 0; r < h; ++r)
					for (std::size_t c = 0; c < h; ++c)
						next[a * h + r][b * h + c] = k[a][b] * m[r][c];
		m = std::move(next);
	}
	return m;
}

/// Reverses the n-character binary string of i - 1.
inline std::size_t reverse_index(std::size_t i, int n)
{
	std::string s;
	for (int b = n - 1; b >= 0; --b)
		s += ((i - 1) >> b & 1) ? '1' : '0';
	std::reverse(s.begin(), s.end());
	return std::stoul(s, nullptr, 2) + 1;
}

inline Dense multiply_mod2(const Dense &a, const Dense &b)
{
	Dense out(a.size(), std::vector<int>(b[0].size(), 0));
	for (std::size_t i = 0; i < a.size(); ++i)
		for (std::size_t j = 0; j < b[0].size(); ++j) {
			int s = 0;
			for (std::size_t k = 0; k < b.size(); ++k)
				s += a[i][k] * b[k][j];
			out[i][j] = s % 2;
		}
	return out;
}

/// Bit-reversal permutation matrix with B[i][sigma(i)] = 1.
inline Dense bit_reversal_matrix(int n)
{
	const std::size_t N = std::size_t{1} << n;
	Dense b(N, std::vector<int>(N, 0));
	for (std::size_t i = 1; i <= N; ++i)
		b[i - 1][reverse_index(i, n) - 1] = 1;
	return b;
}

inline Dense g_dense(int n) { return multiply_mod2(bit_reversal_matrix(n), kron_f(n)); }

inline std::vector<int> vec_times(const std::vector<int> &u, const Dense &g)
{
	std::vector<int> x(g[0].size(), 0);
	for (std::size_t r = 0; r < u.size(); ++r)
		for (std::size_t c = 0; c < x.size(); ++c)
			x[c] = (x[c] + u[r] * g[r][c]) % 2;
	return x;
}

/// Whether u_i (0-based) is determined by the unerased channel positions
/// given u_0..u_{i-1} = 0, by enumerating every consistent input. This is
/// the erasure event of bit-channel i on the all-zero codeword.
inline bool bit_channel_erased(const Dense &g, std::uint32_t erased_mask, std::size_t i)
{
	const std::size_t N = g.size();
	bool seen[2] = {false, false};
	for (std::uint32_t tail = 0; tail < (1u << (N - i)); ++tail) {
		std::vector<int> u(N, 0);
		for (std::size_t k = i; k < N; ++k)
			u[k] = (tail >> (k - i)) & 1;
		const auto x = vec_times(u, g);
		bool consistent = true;
		for (std::size_t k = 0; k < N && consistent; ++k)
			if (!(erased_mask >> k & 1) && x[k] != 0)
				consistent = false;
		if (consistent)
			seen[u[i]] = true;
	}
	return seen[0] && seen[1];
}

/// Exact per-index erasure probability of the SC bit-channels.
inline std::vector<double> bit_channel_erasure_probability(int n, double eps)
{
	const Dense g = g_dense(n);
	const std::size_t N = g.size();
	std::vector<double> p(N, 0.0);
	for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
		const int e = __builtin_popcount(mask);
		double w = 1;
		for (int k = 0; k < e; ++k)
			w *= eps;
		for (std::size_t k = e; k < N; ++k)
			w *= 1 - eps;
		for (std::size_t i = 0; i < N; ++i)
			if (bit_channel_erased(g, mask, i))
				p[i] += w;
	}
	return p;
}

} // namespace oracle

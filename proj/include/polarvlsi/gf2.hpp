#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polarvlsi/rng.hpp"

// Linear algebra over the two-element field: the polar kernel matrices,
// rectangles of a matrix and the rank-sum search over rectangle pairs.

namespace polarvlsi::gf2 {

/// Sorted set of 1-based indices drawn from [1, universe_size].
class IndexSet
{
public:
	IndexSet() = default;

	IndexSet(std::size_t universe_size, std::vector<std::size_t> members)
		: universe_(universe_size), members_(std::move(members))
	{
		std::sort(members_.begin(), members_.end());
		if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
			throw std::invalid_argument("IndexSet: duplicate member");
		if (!members_.empty() && (members_.front() < 1 || members_.back() > universe_))
			throw std::invalid_argument("IndexSet: member outside [1, universe_size]");
	}

	IndexSet(std::size_t universe_size, std::initializer_list<std::size_t> members)
		: IndexSet(universe_size, std::vector<std::size_t>(members)) {}

	static IndexSet all(std::size_t universe_size)
	{
		std::vector<std::size_t> m(universe_size);
		for (std::size_t i = 0; i < universe_size; ++i)
			m[i] = i + 1;
		return IndexSet(universe_size, std::move(m));
	}

	static IndexSet none(std::size_t universe_size) { return IndexSet(universe_size, std::vector<std::size_t>{}); }

	/// Bit i of mask selects index i + 1.
	static IndexSet from_mask(std::size_t universe_size, std::uint64_t mask)
	{
		std::vector<std::size_t> m;
		for (; mask; mask &= mask - 1)
			m.push_back(static_cast<std::size_t>(std::countr_zero(mask)) + 1);
		return IndexSet(universe_size, std::move(m));
	}

	std::size_t universe_size() const noexcept { return universe_; }
	const std::vector<std::size_t> &members() const noexcept { return members_; }
	std::size_t size() const noexcept { return members_.size(); }
	bool empty() const noexcept { return members_.empty(); }

	bool contains(std::size_t i) const
	{
		return std::binary_search(members_.begin(), members_.end(), i);
	}

	IndexSet complement() const
	{
		std::vector<std::size_t> out;
		out.reserve(universe_ - members_.size());
		auto it = members_.begin();
		for (std::size_t i = 1; i <= universe_; ++i) {
			if (it != members_.end() && *it == i)
				++it;
			else
				out.push_back(i);
		}
		return IndexSet(universe_, std::move(out));
	}

	std::string to_string() const
	{
		std::string s = "{";
		for (std::size_t k = 0; k < members_.size(); ++k) {
			if (k)
				s += ' ';
			s += std::to_string(members_[k]);
		}
		return s + "}";
	}

	friend bool operator==(const IndexSet &, const IndexSet &) = default;

	/// Lexicographic on the sorted member lists.
	friend auto operator<=>(const IndexSet &a, const IndexSet &b)
	{
		return a.members_ <=> b.members_;
	}

private:
	std::size_t universe_ = 0;
	std::vector<std::size_t> members_;
};

/// Anything rectangles can be cut from.
template <typename M>
concept RectMatrix = requires(M m, const M cm, std::size_t i) {
	{ cm.rows() } -> std::convertible_to<std::size_t>;
	{ cm.cols() } -> std::convertible_to<std::size_t>;
	cm.at(i, i);
	m.set(i, i, cm.at(i, i));
	M(i, i);
};

/// Plain dense matrix, used for value-carrying demos where no field
/// arithmetic is involved.
template <typename T>
class DenseMatrix
{
public:
	DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

	DenseMatrix(std::initializer_list<std::initializer_list<T>> init)
		: rows_(init.size()), cols_(init.size() ? init.begin()->size() : 0)
	{
		data_.reserve(rows_ * cols_);
		for (const auto &row : init) {
			if (row.size() != cols_)
				throw std::invalid_argument("DenseMatrix: ragged initializer");
			data_.insert(data_.end(), row.begin(), row.end());
		}
	}

	std::size_t rows() const noexcept { return rows_; }
	std::size_t cols() const noexcept { return cols_; }
	const T &at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
	void set(std::size_t r, std::size_t c, T v) { data_[r * cols_ + c] = std::move(v); }

	friend bool operator==(const DenseMatrix &, const DenseMatrix &) = default;

private:
	std::size_t rows_, cols_;
	std::vector<T> data_;
};

/// Dense bit matrix, rows packed into 64-bit words (column j of a row is
/// bit j % 64 of word j / 64).
class BitMatrix
{
public:
	BitMatrix() : BitMatrix(0, 0) {}

	BitMatrix(std::size_t rows, std::size_t cols)
		: rows_(rows), cols_(cols), stride_((cols + 63) / 64), words_(rows * stride_, 0) {}

	/// Rows given as strings of '0'/'1', leftmost character is column 1.
	static BitMatrix from_rows(std::initializer_list<std::string_view> rows)
	{
		const std::size_t cols = rows.size() ? rows.begin()->size() : 0;
		BitMatrix m(rows.size(), cols);
		std::size_t r = 0;
		for (auto row : rows) {
			if (row.size() != cols)
				throw std::invalid_argument("BitMatrix: ragged rows");
			for (std::size_t c = 0; c < cols; ++c) {
				if (row[c] != '0' && row[c] != '1')
					throw std::invalid_argument("BitMatrix: rows must be 0/1 strings");
				m.set(r, c, row[c] == '1');
			}
			++r;
		}
		return m;
	}

	std::size_t rows() const noexcept { return rows_; }
	std::size_t cols() const noexcept { return cols_; }
	bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

	bool at(std::size_t r, std::size_t c) const
	{
		return (words_[r * stride_ + c / 64] >> (c % 64)) & 1;
	}

	void set(std::size_t r, std::size_t c, bool v)
	{
		auto &w = words_[r * stride_ + c / 64];
		const std::uint64_t bit = std::uint64_t{1} << (c % 64);
		w = v ? (w | bit) : (w & ~bit);
	}

	std::span<const std::uint64_t> row_words(std::size_t r) const
	{
		return {words_.data() + r * stride_, stride_};
	}

	std::span<std::uint64_t> row_words(std::size_t r)
	{
		return {words_.data() + r * stride_, stride_};
	}

	std::size_t words_per_row() const noexcept { return stride_; }

	std::string row_string(std::size_t r) const
	{
		std::string s(cols_, '0');
		for (std::size_t c = 0; c < cols_; ++c)
			if (at(r, c))
				s[c] = '1';
		return s;
	}

	friend bool operator==(const BitMatrix &, const BitMatrix &) = default;

private:
	std::size_t rows_, cols_, stride_;
	std::vector<std::uint64_t> words_;
};

inline void require_level(int n, const char *who)
{
	if (n < 1)
		throw std::invalid_argument(std::string(who) + ": level must be >= 1");
	if (n > 20)
		throw std::invalid_argument(std::string(who) + ": level too large");
}

/// F_n = [[F_{n-1}, 0], [F_{n-1}, F_{n-1}]] with F_1 = [[1,0],[1,1]].
inline BitMatrix f_matrix(int n)
{
	require_level(n, "f_matrix");
	BitMatrix m = BitMatrix::from_rows({"10", "11"});
	for (int level = 2; level <= n; ++level) {
		const std::size_t h = m.rows();
		BitMatrix next(2 * h, 2 * h);
		for (std::size_t r = 0; r < h; ++r)
			for (std::size_t c = 0; c < h; ++c)
				if (m.at(r, c)) {
					next.set(r, c, true);
					next.set(h + r, c, true);
					next.set(h + r, h + c, true);
				}
		m = std::move(next);
	}
	return m;
}

/// sigma(i) = 1 + bit-reverse_n(i - 1), stored 0-based: result[i - 1] = sigma(i).
inline std::vector<std::size_t> bit_reversal_perm(int n)
{
	require_level(n, "bit_reversal_perm");
	const std::size_t N = std::size_t{1} << n;
	std::vector<std::size_t> sigma(N);
	for (std::size_t i = 0; i < N; ++i) {
		std::size_t rev = 0;
		for (int b = 0; b < n; ++b)
			if (i >> b & 1)
				rev |= std::size_t{1} << (n - 1 - b);
		sigma[i] = rev + 1;
	}
	return sigma;
}

/// G_n = B_n F_n: row i is row sigma(i) of F_n.
inline BitMatrix g_matrix(int n)
{
	const BitMatrix f = f_matrix(n);
	const auto sigma = bit_reversal_perm(n);
	BitMatrix g(f.rows(), f.cols());
	for (std::size_t r = 0; r < f.rows(); ++r) {
		auto src = f.row_words(sigma[r] - 1);
		std::copy(src.begin(), src.end(), g.row_words(r).begin());
	}
	return g;
}

namespace detail {

/// Rank of rows that each fit in one word. Destroys the input.
inline std::size_t rank_words(std::span<std::uint64_t> rows) noexcept
{
	std::size_t rank = 0;
	for (std::size_t i = 0; i < rows.size(); ++i) {
		std::uint64_t pivot = rows[i];
		if (!pivot)
			continue;
		++rank;
		const std::uint64_t low = pivot & (~pivot + 1);
		for (std::size_t k = i + 1; k < rows.size(); ++k)
			if (rows[k] & low)
				rows[k] ^= pivot;
	}
	return rank;
}

} // namespace detail

/// Rank over GF(2). Column pivots are taken leftmost first.
inline std::size_t rank_f2(const BitMatrix &m)
{
	if (m.empty())
		return 0;
	const std::size_t stride = m.words_per_row();
	std::vector<std::uint64_t> w(m.rows() * stride);
	for (std::size_t r = 0; r < m.rows(); ++r) {
		auto src = m.row_words(r);
		std::copy(src.begin(), src.end(), w.begin() + r * stride);
	}
	std::size_t rank = 0;
	for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
		const std::size_t word = c / 64;
		const std::uint64_t bit = std::uint64_t{1} << (c % 64);
		std::size_t p = rank;
		while (p < m.rows() && !(w[p * stride + word] & bit))
			++p;
		if (p == m.rows())
			continue;
		if (p != rank)
			std::swap_ranges(w.begin() + p * stride, w.begin() + (p + 1) * stride, w.begin() + rank * stride);
		for (std::size_t r = rank + 1; r < m.rows(); ++r)
			if (w[r * stride + word] & bit)
				for (std::size_t k = word; k < stride; ++k)
					w[r * stride + k] ^= w[rank * stride + k];
		++rank;
	}
	return rank;
}

/// Submatrix on rows r and columns c (1-based), in index order.
template <RectMatrix M>
M rectangle(const M &m, const IndexSet &r, const IndexSet &c)
{
	if (!r.empty() && r.members().back() > m.rows())
		throw std::invalid_argument("rectangle: row index out of range");
	if (!c.empty() && c.members().back() > m.cols())
		throw std::invalid_argument("rectangle: column index out of range");
	M out(r.size(), c.size());
	for (std::size_t i = 0; i < r.size(); ++i)
		for (std::size_t j = 0; j < c.size(); ++j)
			out.set(i, j, m.at(r.members()[i] - 1, c.members()[j] - 1));
	return out;
}

/// (m(r, c), m(complement r, complement c)), complements taken in [N].
template <RectMatrix M>
std::pair<M, M> rectangle_pair(const M &m, const IndexSet &r, const IndexSet &c)
{
	if (r.universe_size() != m.rows() || c.universe_size() != m.cols())
		throw std::invalid_argument("rectangle_pair: index sets must range over the matrix dimensions");
	return {rectangle(m, r, c), rectangle(m, r.complement(), c.complement())};
}

template <RectMatrix M>
M drop_rows(const M &m, std::vector<std::size_t> drop)
{
	std::sort(drop.begin(), drop.end());
	if (std::adjacent_find(drop.begin(), drop.end()) != drop.end())
		throw std::invalid_argument("row_reduce_pair: duplicate row");
	if (!drop.empty() && (drop.front() < 1 || drop.back() > m.rows()))
		throw std::invalid_argument("row_reduce_pair: row index out of range");
	M out(m.rows() - drop.size(), m.cols());
	std::size_t dst = 0;
	for (std::size_t r = 0; r < m.rows(); ++r) {
		if (std::binary_search(drop.begin(), drop.end(), r + 1))
			continue;
		for (std::size_t c = 0; c < m.cols(); ++c)
			out.set(dst, c, m.at(r, c));
		++dst;
	}
	return out;
}

/// Deletes rows drop_a (1-based, within the first matrix) and drop_b
/// (within the second) to give a (|drop_a| + |drop_b|)-row-reduced pair.
template <RectMatrix M>
std::pair<M, M> row_reduce_pair(const std::pair<M, M> &pair, const std::vector<std::size_t> &drop_a,
				const std::vector<std::size_t> &drop_b)
{
	return {drop_rows(pair.first, drop_a), drop_rows(pair.second, drop_b)};
}

enum class Target { F, G };
enum class Restriction { balanced_columns, unrestricted };
enum class SearchMode { exhaustive, sampled };

inline const char *to_string(Target t) { return t == Target::F ? "F" : "G"; }
inline const char *to_string(Restriction r) { return r == Restriction::balanced_columns ? "balanced" : "unrestricted"; }
inline const char *to_string(SearchMode m) { return m == SearchMode::exhaustive ? "exhaustive" : "sampled"; }

struct RankSumOptions
{
	int n = 1;
	Target target = Target::F;
	Restriction restriction = Restriction::balanced_columns;
	SearchMode mode = SearchMode::exhaustive;
	std::size_t samples = 0;
	std::uint64_t seed = 0;
	/// Raises the exhaustive limit from n = 3 to n = 4.
	bool long_run = false;
};

struct RankSumReport
{
	int n = 0;
	Target target = Target::F;
	Restriction restriction = Restriction::balanced_columns;
	SearchMode mode = SearchMode::exhaustive;
	std::uint64_t pairs_checked = 0;
	std::size_t min_rank_sum = 0;
	IndexSet witness_rows, witness_cols;
	std::size_t bound = 0;
	bool bound_holds = false;
};

namespace detail {

/// Matrix rows as single words; requires N <= 64.
inline std::vector<std::uint64_t> packed_rows(const BitMatrix &m)
{
	std::vector<std::uint64_t> rows(m.rows());
	for (std::size_t r = 0; r < m.rows(); ++r)
		rows[r] = m.row_words(r).empty() ? 0 : m.row_words(r)[0];
	return rows;
}

/// Compacts the columns selected by col_mask into the low bits.
inline std::uint64_t gather_bits(std::uint64_t word, std::uint64_t col_mask) noexcept
{
	std::uint64_t out = 0;
	int k = 0;
	for (; col_mask; col_mask &= col_mask - 1, ++k)
		if (word & (col_mask & (~col_mask + 1)))
			out |= std::uint64_t{1} << k;
	return out;
}

inline std::size_t masked_rank(const std::vector<std::uint64_t> &rows, std::uint64_t row_mask, std::uint64_t col_mask)
{
	std::uint64_t buf[64];
	std::size_t count = 0;
	for (; row_mask; row_mask &= row_mask - 1)
		buf[count++] = gather_bits(rows[std::countr_zero(row_mask)], col_mask);
	return rank_words({buf, count});
}

/// Lexicographic order of the sorted index lists encoded by two masks.
inline bool lex_less(std::uint64_t a, std::uint64_t b) noexcept
{
	while (a && b) {
		const int x = std::countr_zero(a), y = std::countr_zero(b);
		if (x != y)
			return x < y;
		a &= a - 1;
		b &= b - 1;
	}
	return !a && b;
}

inline bool pair_less(std::uint64_t r1, std::uint64_t c1, std::uint64_t r2, std::uint64_t c2) noexcept
{
	if (r1 != r2)
		return lex_less(r1, r2);
	return lex_less(c1, c2);
}

/// Uniform k-subset of [0, N) as a mask (partial Fisher-Yates).
inline std::uint64_t random_subset(SplitMix64 &rng, std::size_t N, std::size_t k)
{
	std::vector<std::size_t> idx(N);
	for (std::size_t i = 0; i < N; ++i)
		idx[i] = i;
	std::uint64_t mask = 0;
	for (std::size_t i = 0; i < k; ++i) {
		const std::size_t j = i + static_cast<std::size_t>(rng.below(N - i));
		std::swap(idx[i], idx[j]);
		mask |= std::uint64_t{1} << idx[i];
	}
	return mask;
}

} // namespace detail

inline BitMatrix target_matrix(int n, Target t)
{
	return t == Target::F ? f_matrix(n) : g_matrix(n);
}

/// Minimum of rank(m(r, c)) + rank(m(r', c')) over the chosen family of
/// rectangle pairs. Ties resolve to the lexicographically smallest (r, c).
inline RankSumReport min_rank_sum(const RankSumOptions &opt)
{
	require_level(opt.n, "min_rank_sum");
	if (opt.n > 6)
		throw std::invalid_argument("min_rank_sum: level above 6 not supported");
	if (opt.mode == SearchMode::sampled && opt.samples == 0)
		throw std::invalid_argument("min_rank_sum: sampled mode needs samples > 0");
	const int limit = opt.long_run ? 4 : 3;
	if (opt.mode == SearchMode::exhaustive && opt.n > limit)
		throw std::invalid_argument("min_rank_sum: exhaustive search limited to n <= " + std::to_string(limit) +
					    (opt.long_run ? "" : " (4 with long_run)"));

	const std::size_t N = std::size_t{1} << opt.n;
	const std::uint64_t full = N == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << N) - 1;
	const auto rows = detail::packed_rows(target_matrix(opt.n, opt.target));
	const bool balanced = opt.restriction == Restriction::balanced_columns;

	RankSumReport rep;
	rep.n = opt.n;
	rep.target = opt.target;
	rep.restriction = opt.restriction;
	rep.mode = opt.mode;
	rep.bound = N / 2;

	bool have = false;
	std::size_t best = 0;
	std::uint64_t best_r = 0, best_c = 0;
	auto consider = [&](std::uint64_t r, std::uint64_t c) {
		const std::size_t s = detail::masked_rank(rows, r, c) + detail::masked_rank(rows, full & ~r, full & ~c);
		++rep.pairs_checked;
		if (!have || s < best || (s == best && detail::pair_less(r, c, best_r, best_c))) {
			have = true;
			best = s;
			best_r = r;
			best_c = c;
		}
	};

	if (opt.mode == SearchMode::exhaustive) {
		for (std::uint64_t r = 0; r <= full; ++r)
			for (std::uint64_t c = 0; c <= full; ++c)
				if (!balanced || static_cast<std::size_t>(std::popcount(c)) == N / 2)
					consider(r, c);
	} else {
		SplitMix64 rng = substream(opt.seed, static_cast<std::uint64_t>(opt.n));
		for (std::size_t s = 0; s < opt.samples; ++s) {
			const std::uint64_t r = rng() & full;
			const std::uint64_t c = balanced ? detail::random_subset(rng, N, N / 2) : rng() & full;
			consider(r, c);
		}
	}

	rep.min_rank_sum = best;
	rep.witness_rows = IndexSet::from_mask(N, best_r);
	rep.witness_cols = IndexSet::from_mask(N, best_c);
	rep.bound_holds = best >= rep.bound;
	return rep;
}

struct RowReducedReport
{
	int n = 0;
	Target target = Target::F;
	std::uint64_t pairs_checked = 0;
	std::uint64_t reductions_checked = 0;
	/// min over pairs and deletions of (reduced rank sum) - (N/2 - k)
	long long min_slack = 0;
	IndexSet witness_rows, witness_cols;
	std::vector<std::size_t> witness_drop_a, witness_drop_b;
	bool bound_holds = false;
};

/// Exhaustive check that every k-row-reduced balanced-column rectangle pair
/// keeps rank sum >= N/2 - k. Deletions from the two members are
/// independent, so each member's worst deletion is found separately.
inline RowReducedReport verify_row_reduced(int n, Target target)
{
	require_level(n, "verify_row_reduced");
	if (n > 3)
		throw std::invalid_argument("verify_row_reduced: exhaustive search limited to n <= 3");
	const std::size_t N = std::size_t{1} << n;
	const std::uint64_t full = (std::uint64_t{1} << N) - 1;
	const auto rows = detail::packed_rows(target_matrix(n, target));

	RowReducedReport rep;
	rep.n = n;
	rep.target = target;
	bool have = false;
	std::uint64_t wr = 0, wc = 0, wda = 0, wdb = 0;

	// min over deletions d within `set` of rank(rows set\d, cols) + |d|
	auto worst = [&](std::uint64_t set, std::uint64_t cols, std::uint64_t &arg) {
		long long lo = 0;
		bool first = true;
		for (std::uint64_t d = set;; d = (d - 1) & set) {
			const long long v = static_cast<long long>(detail::masked_rank(rows, set & ~d, cols)) + std::popcount(d);
			++rep.reductions_checked;
			if (first || v < lo || (v == lo && detail::lex_less(d, arg))) {
				lo = v;
				arg = d;
				first = false;
			}
			if (d == 0)
				break;
		}
		return lo;
	};

	for (std::uint64_t r = 0; r <= full; ++r)
		for (std::uint64_t c = 0; c <= full; ++c) {
			if (static_cast<std::size_t>(std::popcount(c)) != N / 2)
				continue;
			++rep.pairs_checked;
			std::uint64_t da = 0, db = 0;
			const long long slack = worst(r, c, da) + worst(full & ~r, full & ~c, db) - static_cast<long long>(N / 2);
			if (!have || slack < rep.min_slack) {
				have = true;
				rep.min_slack = slack;
				wr = r;
				wc = c;
				wda = da;
				wdb = db;
			}
		}

	rep.witness_rows = IndexSet::from_mask(N, wr);
	rep.witness_cols = IndexSet::from_mask(N, wc);
	// deletions are reported as row positions within each member
	auto positions = [](std::uint64_t set, std::uint64_t d) {
		std::vector<std::size_t> out;
		std::size_t pos = 0;
		for (; set; set &= set - 1) {
			++pos;
			if (d & (set & (~set + 1)))
				out.push_back(pos);
		}
		return out;
	};
	rep.witness_drop_a = positions(wr, wda);
	rep.witness_drop_b = positions(full & ~wr, wdb);
	rep.bound_holds = rep.min_slack >= 0;
	return rep;
}

} // namespace polarvlsi::gf2

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polarvlsi/gf2.hpp"

namespace polarvlsi::graphs {

enum class Role : std::uint8_t { symbol, internal };
enum class Side : std::uint8_t { upper, lower };

using Vertex = std::size_t;
using Edge = std::pair<Vertex, Vertex>;

/// Raised when a contraction would merge two symbol nodes.
struct ContractForbidden : std::logic_error
{
	using std::logic_error::logic_error;
};

/// Raised when an operation needs the intact bowtie structure of P_n.
struct Unsupported : std::logic_error
{
	using std::logic_error::logic_error;
};

/// Top-level K_{2,2} coupling of symbol nodes a1, a2 with sub-copy symbol
/// nodes b (first copy) and c (second copy).
struct Bowtie
{
	Vertex a1, a2, b, c;
};

/// Undirected multigraph with role-tagged vertices. Vertices are 0-based
/// internally; the text format is 1-based.
class DecodingGraph
{
public:
	DecodingGraph() = default;

	explicit DecodingGraph(std::size_t vertex_count) : roles_(vertex_count, Role::internal) {}

	std::size_t vertex_count() const noexcept { return roles_.size(); }
	std::size_t edge_count() const noexcept { return edges_.size(); }
	const std::vector<Edge> &edges() const noexcept { return edges_; }
	Role role(Vertex v) const { return roles_.at(v); }
	const std::vector<Vertex> &symbol_nodes() const noexcept { return symbols_; }
	int level() const noexcept { return level_; }
	/// Present only while the graph is an unmodified P_n.
	const std::vector<Bowtie> &bowties() const noexcept { return bowties_; }
	bool intact() const noexcept { return intact_; }
	/// 1 - |frozen| / N for frozen graphs, 1 for a full P_n.
	double rate() const noexcept { return rate_; }

	Vertex add_vertex(Role r = Role::internal)
	{
		roles_.push_back(r);
		if (r == Role::symbol)
			symbols_.push_back(roles_.size() - 1);
		intact_ = false;
		bowties_.clear();
		return roles_.size() - 1;
	}

	void add_edge(Vertex u, Vertex v)
	{
		if (u >= vertex_count() || v >= vertex_count())
			throw std::invalid_argument("add_edge: vertex out of range");
		if (u == v)
			throw std::invalid_argument("add_edge: self loops not allowed");
		edges_.emplace_back(std::min(u, v), std::max(u, v));
		intact_ = false;
		bowties_.clear();
	}

	std::size_t degree(Vertex v) const
	{
		std::size_t d = 0;
		for (auto [a, b] : edges_)
			d += (a == v) + (b == v);
		return d;
	}

	/// Neighbour lists with multiplicity.
	std::vector<std::vector<Vertex>> adjacency() const
	{
		std::vector<std::vector<Vertex>> adj(vertex_count());
		for (auto [a, b] : edges_) {
			adj[a].push_back(b);
			adj[b].push_back(a);
		}
		return adj;
	}

	/// P_n: 2^n symbol nodes coupled to two copies of P_{n-1}; P_0 is a
	/// single vertex.
	static DecodingGraph polar(int n)
	{
		gf2::require_level(n, "build_polar_graph");
		if (n > 16)
			throw std::invalid_argument("build_polar_graph: level too large");
		DecodingGraph g;
		std::vector<Bowtie> top;
		const auto syms = g.grow(n, &top);
		for (Vertex v : syms)
			g.roles_[v] = Role::symbol;
		g.symbols_ = syms;
		g.bowties_ = std::move(top);
		g.level_ = n;
		g.intact_ = true;
		return g;
	}

	friend DecodingGraph freeze_graph(const DecodingGraph &g, const gf2::IndexSet &frozen);
	friend DecodingGraph contract(const DecodingGraph &g, Vertex u, Vertex v);
	friend DecodingGraph subdivide(const DecodingGraph &g, Edge e);
	friend DecodingGraph read_edge_list(std::istream &in);

private:
	// Appends P_k and returns its symbol nodes in order.
	std::vector<Vertex> grow(int k, std::vector<Bowtie> *top)
	{
		if (k == 0) {
			roles_.push_back(Role::internal);
			return {roles_.size() - 1};
		}
		const std::size_t count = std::size_t{1} << k;
		const Vertex first = roles_.size();
		roles_.resize(roles_.size() + count, Role::internal);
		const auto b = grow(k - 1, nullptr);
		const auto c = grow(k - 1, nullptr);
		for (std::size_t j = 0; j < count / 2; ++j) {
			const Vertex a1 = first + 2 * j, a2 = first + 2 * j + 1;
			for (Vertex a : {a1, a2}) {
				edges_.emplace_back(a, b[j]);
				edges_.emplace_back(a, c[j]);
			}
			if (top)
				top->push_back({a1, a2, b[j], c[j]});
		}
		std::vector<Vertex> syms(count);
		std::iota(syms.begin(), syms.end(), first);
		return syms;
	}

	void remove_vertices(const std::vector<bool> &gone, std::vector<Vertex> *remap_out = nullptr)
	{
		std::vector<Vertex> remap(vertex_count(), std::numeric_limits<Vertex>::max());
		std::vector<Role> roles;
		for (Vertex v = 0; v < vertex_count(); ++v)
			if (!gone[v]) {
				remap[v] = roles.size();
				roles.push_back(roles_[v]);
			}
		std::vector<Edge> edges;
		for (auto [a, b] : edges_)
			if (!gone[a] && !gone[b])
				edges.emplace_back(remap[a], remap[b]);
		std::vector<Vertex> syms;
		for (Vertex s : symbols_)
			if (!gone[s])
				syms.push_back(remap[s]);
		roles_ = std::move(roles);
		edges_ = std::move(edges);
		symbols_ = std::move(syms);
		if (remap_out)
			*remap_out = std::move(remap);
	}

	std::vector<Role> roles_;
	std::vector<Edge> edges_;
	std::vector<Vertex> symbols_;
	std::vector<Bowtie> bowties_;
	int level_ = 0;
	bool intact_ = false;
	double rate_ = 1.0;
};

inline DecodingGraph build_polar_graph(int n) { return DecodingGraph::polar(n); }

/// Deletes the symbol nodes at the given 1-based symbol positions together
/// with their edges.
inline DecodingGraph freeze_graph(const DecodingGraph &g, const gf2::IndexSet &frozen)
{
	if (frozen.universe_size() != g.symbol_nodes().size())
		throw std::invalid_argument("freeze_graph: index set must range over the symbol nodes");
	if (frozen.empty())
		return g;
	DecodingGraph out = g;
	std::vector<bool> gone(g.vertex_count(), false);
	for (std::size_t i : frozen.members())
		gone[g.symbol_nodes()[i - 1]] = true;
	out.remove_vertices(gone);
	out.bowties_.clear();
	out.intact_ = false;
	out.rate_ = g.rate() * (1.0 - static_cast<double>(frozen.size()) / static_cast<double>(frozen.universe_size()));
	return out;
}

/// Merges u and v. Edges between them vanish, all others are kept with
/// multiplicity. The merged vertex takes the smaller id and keeps the
/// symbol role if either endpoint had it.
inline DecodingGraph contract(const DecodingGraph &g, Vertex u, Vertex v)
{
	if (u == v)
		throw std::invalid_argument("contract: endpoints must differ");
	if (u >= g.vertex_count() || v >= g.vertex_count())
		throw std::invalid_argument("contract: vertex out of range");
	if (g.role(u) == Role::symbol && g.role(v) == Role::symbol)
		throw ContractForbidden("contract: two symbol nodes may not be merged");
	const Vertex keep = std::min(u, v), drop = std::max(u, v);
	DecodingGraph out = g;
	std::vector<Edge> edges;
	for (auto [a, b] : g.edges_) {
		if ((a == u && b == v) || (a == v && b == u))
			continue;
		if (a == drop)
			a = keep;
		if (b == drop)
			b = keep;
		edges.emplace_back(std::min(a, b), std::max(a, b));
	}
	out.edges_ = std::move(edges);
	if (g.role(drop) == Role::symbol) {
		out.roles_[keep] = Role::symbol;
		for (auto &s : out.symbols_)
			if (s == drop)
				s = keep;
	}
	std::vector<bool> gone(g.vertex_count(), false);
	gone[drop] = true;
	out.remove_vertices(gone);
	out.bowties_.clear();
	out.intact_ = false;
	return out;
}

/// Replaces one copy of edge e by a path through a new internal vertex.
inline DecodingGraph subdivide(const DecodingGraph &g, Edge e)
{
	const Edge key{std::min(e.first, e.second), std::max(e.first, e.second)};
	auto it = std::find(g.edges_.begin(), g.edges_.end(), key);
	if (it == g.edges_.end())
		throw std::invalid_argument("subdivide: edge not present");
	DecodingGraph out = g;
	out.edges_.erase(out.edges_.begin() + (it - g.edges_.begin()));
	out.roles_.push_back(Role::internal);
	const Vertex w = out.roles_.size() - 1;
	out.edges_.emplace_back(key.first, w);
	out.edges_.emplace_back(key.second, w);
	out.bowties_.clear();
	out.intact_ = false;
	return out;
}

/// Two-sided vertex assignment.
struct Partition
{
	std::vector<Side> side;

	std::size_t width(const DecodingGraph &g) const
	{
		std::size_t w = 0;
		for (auto [a, b] : g.edges())
			w += side[a] != side[b];
		return w;
	}

	std::size_t count_upper(const std::vector<Vertex> &xs) const
	{
		std::size_t m = 0;
		for (Vertex v : xs)
			m += side[v] == Side::upper;
		return m;
	}

	friend bool operator==(const Partition &, const Partition &) = default;
};

struct BowtieCensus
{
	std::size_t split = 0;
	std::size_t contained_upper = 0;
	std::size_t contained_lower = 0;
	std::size_t crossing = 0;
	/// Bowtie edges cut, by category.
	std::size_t split_edges_cut = 0;
	std::size_t crossing_edges_cut = 0;
};

inline BowtieCensus classify_bowties(const DecodingGraph &g, const Partition &p)
{
	if (!g.intact())
		throw Unsupported("classify_bowties: defined only on an unmodified P_n");
	if (p.side.size() != g.vertex_count())
		throw std::invalid_argument("classify_bowties: partition size mismatch");
	BowtieCensus c;
	for (const Bowtie &t : g.bowties()) {
		const Side a1 = p.side[t.a1], a2 = p.side[t.a2], b = p.side[t.b], cc = p.side[t.c];
		const std::size_t cut = (a1 != b) + (a1 != cc) + (a2 != b) + (a2 != cc);
		if (a1 != a2) {
			++c.split;
			c.split_edges_cut += cut;
		} else if (b == a1 && cc == a1) {
			++(a1 == Side::upper ? c.contained_upper : c.contained_lower);
		} else {
			++c.crossing;
			c.crossing_edges_cut += cut;
		}
	}
	return c;
}

enum class Solver { exhaustive, branch_and_bound };

inline const char *to_string(Solver s) { return s == Solver::exhaustive ? "exhaustive" : "branch_and_bound"; }

inline constexpr std::size_t kExhaustiveVertexLimit = 24;

struct CutResult
{
	std::size_t width = 0;
	Partition partition;
	bool certified = false;
};

namespace detail {

/// Lexicographic order with upper < lower.
inline bool partition_less(const std::vector<Side> &a, const std::vector<Side> &b)
{
	return a < b;
}

inline void validate_subset(const DecodingGraph &g, const std::vector<Vertex> &xs)
{
	std::vector<bool> seen(g.vertex_count(), false);
	for (Vertex v : xs) {
		if (v >= g.vertex_count())
			throw std::invalid_argument("m_section_width: vertex out of range");
		if (seen[v])
			throw std::invalid_argument("m_section_width: duplicate vertex in X");
		seen[v] = true;
	}
}

inline CutResult exhaustive_section(const DecodingGraph &g, const std::vector<Vertex> &xs, std::size_t m)
{
	const std::size_t V = g.vertex_count();
	if (V > kExhaustiveVertexLimit)
		throw std::invalid_argument("m_section_width: exhaustive solver limited to " +
					    std::to_string(kExhaustiveVertexLimit) + " vertices");
	const auto adj = g.adjacency();
	std::vector<bool> in_x(V, false);
	for (Vertex v : xs)
		in_x[v] = true;

	// Gray-code walk over all assignments; bit v set means v is lower.
	std::vector<Side> side(V, Side::upper);
	std::size_t cut = 0, x_upper = xs.size();
	bool have = false;
	CutResult best;
	auto offer = [&] {
		if (x_upper != m)
			return;
		if (!have || cut < best.width || (cut == best.width && partition_less(side, best.partition.side))) {
			have = true;
			best.width = cut;
			best.partition.side = side;
		}
	};
	offer();
	const std::uint64_t total = std::uint64_t{1} << V;
	for (std::uint64_t step = 1; step < total; ++step) {
		const Vertex v = static_cast<Vertex>(std::countr_zero(step));
		for (Vertex w : adj[v])
			cut += side[w] == side[v] ? 1 : -1;
		if (in_x[v])
			x_upper += side[v] == Side::upper ? -1 : 1;
		side[v] = side[v] == Side::upper ? Side::lower : Side::upper;
		offer();
	}
	best.certified = true;
	return best;
}

class SectionSearch
{
public:
	SectionSearch(const DecodingGraph &g, const std::vector<Vertex> &xs, std::size_t m, std::uint64_t node_limit)
		: V_(g.vertex_count()), m_(m), node_limit_(node_limit), adj_(g.adjacency()), in_x_(V_, false)
	{
		for (Vertex v : xs)
			in_x_[v] = true;
		x_total_ = xs.size();
		order_vertices();
	}

	CutResult run(std::optional<CutResult> incumbent)
	{
		assigned_.assign(V_, false);
		side_.assign(V_, Side::upper);
		to_upper_.assign(V_, 0);
		to_lower_.assign(V_, 0);
		if (incumbent) {
			best_ = *incumbent;
			have_ = true;
		}
		complete_ = true;
		descend(0, 0, 0, 0);
		best_.certified = complete_;
		return best_;
	}

private:
	// Seeds with the highest-degree vertex, then repeatedly takes the vertex
	// with most edges into the ordered prefix (ties: degree, then index).
	void order_vertices()
	{
		std::vector<std::size_t> deg(V_), into(V_, 0);
		for (Vertex v = 0; v < V_; ++v)
			deg[v] = adj_[v].size();
		std::vector<bool> used(V_, false);
		for (std::size_t k = 0; k < V_; ++k) {
			Vertex pick = V_;
			for (Vertex v = 0; v < V_; ++v) {
				if (used[v])
					continue;
				if (pick == V_ || into[v] > into[pick] || (into[v] == into[pick] && deg[v] > deg[pick]))
					pick = v;
			}
			used[pick] = true;
			order_.push_back(pick);
			for (Vertex w : adj_[pick])
				++into[w];
		}
	}

	// Each unassigned vertex will cut at least min(edges to upper, edges to
	// lower) among its edges into the assigned prefix; these sets are disjoint.
	std::size_t lookahead(std::size_t k) const
	{
		std::size_t lb = 0;
		for (std::size_t j = k; j < V_; ++j) {
			const Vertex v = order_[j];
			lb += std::min(to_upper_[v], to_lower_[v]);
		}
		return lb;
	}

	void descend(std::size_t k, std::size_t cut, std::size_t x_upper, std::size_t x_lower)
	{
		if (node_limit_ && ++nodes_ > node_limit_) {
			complete_ = false;
			return;
		}
		if (x_upper > m_ || x_lower > x_total_ - m_)
			return;
		// only strict improvements are searched for
		if (have_ && cut + lookahead(k) >= best_.width)
			return;
		if (k == V_) {
			{
				have_ = true;
				best_.width = cut;
				best_.partition.side = side_;
			}
			return;
		}
		const Vertex v = order_[k];
		// cheaper side first; upper on ties
		const std::size_t cost_up = to_lower_[v], cost_low = to_upper_[v];
		const Side first = cost_up <= cost_low ? Side::upper : Side::lower;
		for (Side s : {first, first == Side::upper ? Side::lower : Side::upper}) {
			const bool up = s == Side::upper;
			if (in_x_[v] && (up ? x_upper + 1 > m_ : x_lower + 1 > x_total_ - m_))
				continue;
			side_[v] = s;
			assigned_[v] = true;
			for (Vertex w : adj_[v])
				++(up ? to_upper_[w] : to_lower_[w]);
			descend(k + 1, cut + (up ? cost_up : cost_low), x_upper + (in_x_[v] && up), x_lower + (in_x_[v] && !up));
			for (Vertex w : adj_[v])
				--(up ? to_upper_[w] : to_lower_[w]);
			assigned_[v] = false;
			side_[v] = Side::upper;
			if (node_limit_ && nodes_ > node_limit_)
				return;
		}
	}

	std::size_t V_, m_, x_total_ = 0;
	std::uint64_t node_limit_, nodes_ = 0;
	std::vector<std::vector<Vertex>> adj_;
	std::vector<bool> in_x_, assigned_;
	std::vector<Vertex> order_;
	std::vector<std::size_t> to_upper_, to_lower_;
	std::vector<Side> side_;
	CutResult best_;
	bool have_ = false, complete_ = true;
};

/// Greedy feasible partition used as the first incumbent: the first m
/// members of X upper, everything else placed by majority of its
/// neighbours in breadth-first order.
inline CutResult greedy_section(const DecodingGraph &g, const std::vector<Vertex> &xs, std::size_t m)
{
	const std::size_t V = g.vertex_count();
	const auto adj = g.adjacency();
	std::vector<int> fixed(V, -1);
	for (std::size_t k = 0; k < xs.size(); ++k)
		fixed[xs[k]] = k < m ? 0 : 1;
	Partition p;
	p.side.assign(V, Side::upper);
	for (Vertex v = 0; v < V; ++v)
		if (fixed[v] == 1)
			p.side[v] = Side::lower;
	for (int sweep = 0; sweep < 4; ++sweep)
		for (Vertex v = 0; v < V; ++v) {
			if (fixed[v] >= 0)
				continue;
			std::size_t up = 0, low = 0;
			for (Vertex w : adj[v])
				++(p.side[w] == Side::upper ? up : low);
			p.side[v] = up >= low ? Side::upper : Side::lower;
		}
	CutResult r;
	r.partition = p;
	r.width = p.width(g);
	return r;
}

} // namespace detail

/// Minimum width over partitions with exactly m vertices of X upper.
/// node_limit bounds the branch-and-bound search (0 = unbounded); an
/// interrupted search returns its best partition uncertified.
inline CutResult m_section_width(const DecodingGraph &g, const std::vector<Vertex> &xs, std::size_t m, Solver solver,
				 std::uint64_t node_limit = 0)
{
	detail::validate_subset(g, xs);
	if (m > xs.size())
		throw std::invalid_argument("m_section_width: m exceeds |X|");
	if (solver == Solver::exhaustive)
		return detail::exhaustive_section(g, xs, m);
	detail::SectionSearch search(g, xs, m, node_limit);
	return search.run(detail::greedy_section(g, xs, m));
}

/// Minimum bisection width of X. The floor and ceiling sections are mirror
/// images (swap sides), so one search covers both.
inline CutResult mbw(const DecodingGraph &g, const std::vector<Vertex> &xs, Solver solver,
		     std::uint64_t node_limit = 0)
{
	if (xs.empty())
		throw std::invalid_argument("mbw: X must be nonempty");
	return m_section_width(g, xs, xs.size() / 2, solver, node_limit);
}

/// Exhaustive when the graph is small enough, branch-and-bound otherwise.
inline Solver auto_solver(const DecodingGraph &g)
{
	return g.vertex_count() <= 20 ? Solver::exhaustive : Solver::branch_and_bound;
}

/// Edge-list text: a header `vertices <V> symbols <s1> ... <sk>`, then one
/// `u v` pair per line, all 1-based. Lines starting with '#' are ignored.
inline void write_edge_list(std::ostream &out, const DecodingGraph &g)
{
	out << "vertices " << g.vertex_count() << " symbols";
	for (Vertex s : g.symbol_nodes())
		out << ' ' << s + 1;
	out << '\n';
	for (auto [a, b] : g.edges())
		out << a + 1 << ' ' << b + 1 << '\n';
}

inline DecodingGraph read_edge_list(std::istream &in)
{
	std::string line;
	auto next_line = [&]() -> bool {
		while (std::getline(in, line)) {
			if (!line.empty() && line.back() == '\r')
				line.pop_back();
			if (line.empty() || line[0] == '#')
				continue;
			return true;
		}
		return false;
	};
	if (!next_line())
		throw std::invalid_argument("read_edge_list: missing header");
	std::istringstream hs(line);
	std::string tag, tag2;
	std::size_t V = 0;
	if (!(hs >> tag >> V >> tag2) || tag != "vertices" || tag2 != "symbols")
		throw std::invalid_argument("read_edge_list: header must be `vertices <V> symbols ...`");
	DecodingGraph g(V);
	std::size_t s;
	while (hs >> s) {
		if (s < 1 || s > V || g.roles_[s - 1] == Role::symbol)
			throw std::invalid_argument("read_edge_list: bad symbol vertex " + std::to_string(s));
		g.roles_[s - 1] = Role::symbol;
		g.symbols_.push_back(s - 1);
	}
	if (!hs.eof())
		throw std::invalid_argument("read_edge_list: malformed header");
	while (next_line()) {
		std::istringstream ls(line);
		std::size_t u, v;
		std::string rest;
		if (!(ls >> u >> v) || (ls >> rest))
			throw std::invalid_argument("read_edge_list: expected `u v`, got: " + line);
		if (u < 1 || v < 1 || u > V || v > V || u == v)
			throw std::invalid_argument("read_edge_list: bad edge: " + line);
		g.edges_.emplace_back(std::min(u, v) - 1, std::max(u, v) - 1);
	}
	return g;
}

/// Six-vertex example: four shaded vertices on a 4-cycle, each white vertex
/// attached to two adjacent shaded ones. The 2-section width of the shaded
/// vertices and the 1-section width of the white vertices are both 2.
struct SectionExample
{
	DecodingGraph graph;
	std::vector<Vertex> shaded, white;
};

inline SectionExample section_example()
{
	SectionExample ex{DecodingGraph(6), {0, 1, 2, 3}, {4, 5}};
	for (auto [u, v] : {Edge{0, 1}, Edge{1, 2}, Edge{2, 3}, Edge{3, 0}, Edge{0, 4}, Edge{1, 4}, Edge{2, 5}, Edge{3, 5}})
		ex.graph.add_edge(u, v);
	return ex;
}

} // namespace polarvlsi::graphs

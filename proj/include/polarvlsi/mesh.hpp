#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarvlsi/gf2.hpp"
#include "polarvlsi/polar_code.hpp"

// Cycle-level model of a rows x cols mesh of processor nodes. Messages
// travel vertically to the target row, then horizontally, one hop per
// t_route cycles; a receiver spends t_parity cycles combining.

namespace polarvlsi::mesh {

enum class ConflictPolicy { fail, record };

struct MeshConfig
{
	int n = 1;
	std::size_t rows = 1, cols = 2;
	std::uint64_t t_route = 1;
	std::uint64_t t_parity = 1;
	std::uint64_t node_area = 1;
	ConflictPolicy conflict_policy = ConflictPolicy::fail;

	/// 2^ceil(n/2) x 2^floor(n/2) grid, t_route = log2 N, node area log2^2 N.
	static MeshConfig defaults(int n)
	{
		gf2::require_level(n, "MeshConfig");
		MeshConfig c;
		c.n = n;
		c.rows = std::size_t{1} << ((n + 1) / 2);
		c.cols = std::size_t{1} << (n / 2);
		c.t_route = static_cast<std::uint64_t>(n);
		c.t_parity = 1;
		c.node_area = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n);
		return c;
	}

	std::size_t block_length() const noexcept { return std::size_t{1} << n; }
	std::size_t node_count() const noexcept { return rows * cols; }
	std::uint64_t area() const noexcept { return node_count() * node_area; }

	void validate() const
	{
		gf2::require_level(n, "MeshConfig");
		if (rows == 0 || cols == 0 || rows * cols < block_length())
			throw std::invalid_argument("MeshConfig: grid must hold at least N nodes");
		if (t_route < 1 || t_parity < 1)
			throw std::invalid_argument("MeshConfig: t_route and t_parity must be >= 1");
		if (node_area < 1)
			throw std::invalid_argument("MeshConfig: node_area must be >= 1");
	}
};

/// 1-based grid coordinates.
struct GridPos
{
	std::size_t row, col;
	friend bool operator==(const GridPos &, const GridPos &) = default;
};

/// Raster-scan placement: left to right along each row, top row first.
inline GridPos raster_position(std::size_t i, const MeshConfig &cfg)
{
	if (i < 1 || i > cfg.block_length())
		throw std::invalid_argument("raster_position: node index outside [1, N]");
	const std::size_t row = (i + cfg.cols - 1) / cfg.cols;
	return {row, i - (row - 1) * cfg.cols};
}

inline std::size_t grid_index(GridPos p, const MeshConfig &cfg) { return (p.row - 1) * cfg.cols + p.col; }

inline std::size_t manhattan(GridPos a, GridPos b)
{
	auto dist = [](std::size_t x, std::size_t y) { return x > y ? x - y : y - x; };
	return dist(a.row, b.row) + dist(a.col, b.col);
}

/// Nodes visited from `from` to `to`, both included; rows first.
inline std::vector<std::size_t> route(std::size_t from, std::size_t to, const MeshConfig &cfg)
{
	GridPos p = raster_position(from, cfg);
	const GridPos t = raster_position(to, cfg);
	std::vector<std::size_t> path{grid_index(p, cfg)};
	while (p.row != t.row) {
		p.row += p.row < t.row ? 1 : -1;
		path.push_back(grid_index(p, cfg));
	}
	while (p.col != t.col) {
		p.col += p.col < t.col ? 1 : -1;
		path.push_back(grid_index(p, cfg));
	}
	return path;
}

enum class RowParity { even, odd };

inline const char *to_string(RowParity p) { return p == RowParity::even ? "even" : "odd"; }

/// One constant send-back step: every sender i targets i - offset.
struct Phase
{
	int stage = 0;
	RowParity parity = RowParity::even;
	std::vector<std::size_t> senders;
	std::size_t offset = 0;
};

/// Stage j (1..n) moves data across offset 2^(n-j); its senders are the
/// nodes whose bit n-j of (i - 1) is set. Each stage runs its even-row
/// senders, then its odd-row senders.
inline std::vector<Phase> encode_schedule(int n, const MeshConfig &cfg)
{
	gf2::require_level(n, "encode_schedule");
	if (cfg.n != n)
		throw std::invalid_argument("encode_schedule: config level mismatch");
	const std::size_t N = std::size_t{1} << n;
	std::vector<Phase> phases;
	for (int j = 1; j <= n; ++j) {
		const std::size_t offset = std::size_t{1} << (n - j);
		Phase even{j, RowParity::even, {}, offset}, odd{j, RowParity::odd, {}, offset};
		for (std::size_t i = 1; i <= N; ++i) {
			if (!((i - 1) & offset))
				continue;
			(raster_position(i, cfg).row % 2 == 0 ? even : odd).senders.push_back(i);
		}
		phases.push_back(std::move(even));
		phases.push_back(std::move(odd));
	}
	return phases;
}

enum class TraceKind { send, hop, recv, xor_op };

inline const char *to_string(TraceKind k)
{
	switch (k) {
	case TraceKind::send: return "send";
	case TraceKind::hop: return "hop";
	case TraceKind::recv: return "recv";
	case TraceKind::xor_op: return "xor";
	}
	return "?";
}

struct TraceEvent
{
	std::uint64_t cycle;
	std::size_t node;
	TraceKind kind;
	friend bool operator==(const TraceEvent &, const TraceEvent &) = default;
};

using TraceSink = std::function<void(const TraceEvent &)>;

/// `cycle,node,event` with a 1-based node index.
inline void write_trace_line(std::ostream &out, const TraceEvent &e)
{
	out << e.cycle << ',' << e.node << ',' << to_string(e.kind) << '\n';
}

struct Conflict
{
	std::uint64_t cycle;
	std::size_t node;
	std::size_t sender_a, sender_b;
};

struct ConflictError : std::runtime_error
{
	explicit ConflictError(const Conflict &c)
		: std::runtime_error("mesh conflict at cycle " + std::to_string(c.cycle) + ", node " + std::to_string(c.node) +
				     " between messages from " + std::to_string(c.sender_a) + " and " +
				     std::to_string(c.sender_b)),
		  conflict(c) {}

	Conflict conflict;
};

struct SimReport
{
	std::size_t N = 0;
	double R = 0;
	std::uint64_t T = 0;
	std::uint64_t A = 0;
	std::uint64_t active_node_cycles = 0;
	/// active_node_cycles / (grid nodes x T)
	double q = 0;
	/// node_area x active_node_cycles
	std::uint64_t E = 0;
	std::uint64_t messages_sent = 0;
	std::size_t max_hops = 0;
	std::uint64_t conflicts = 0;
};

/// Shortest round-trip decimal form, independent of locale.
inline std::string format_number(double v)
{
	char buf[64];
	auto r = std::to_chars(buf, buf + sizeof buf, v);
	return std::string(buf, r.ptr);
}

inline const char *csv_header() { return "N,R,T,A,q,E,messages,conflicts"; }

inline std::string to_csv_row(const SimReport &r)
{
	return std::to_string(r.N) + ',' + format_number(r.R) + ',' + std::to_string(r.T) + ',' + std::to_string(r.A) +
	       ',' + format_number(r.q) + ',' + std::to_string(r.E) + ',' + std::to_string(r.messages_sent) + ',' +
	       std::to_string(r.conflicts);
}

namespace detail {

struct Transfer
{
	std::size_t from, to;
};

struct PhaseOutcome
{
	std::size_t max_hops = 0;
	std::uint64_t active = 0;
	std::uint64_t duration = 0;
	std::vector<Conflict> conflicts;
};

/// Launches all transfers at start_cycle and advances them in lockstep.
/// Two messages resident at one node at the same hop-step conflict; a
/// message leaves the network in the step it reaches its target.
inline PhaseOutcome run_phase(const std::vector<Transfer> &msgs, std::uint64_t start, const MeshConfig &cfg,
			      const TraceSink &trace)
{
	PhaseOutcome out;
	if (msgs.empty())
		return out;
	std::vector<std::vector<std::size_t>> paths;
	paths.reserve(msgs.size());
	for (const auto &m : msgs) {
		paths.push_back(route(m.from, m.to, cfg));
		out.max_hops = std::max(out.max_hops, paths.back().size() - 1);
	}
	std::vector<std::size_t> stamp(cfg.node_count() + 1, 0), owner(cfg.node_count() + 1, 0);
	for (std::size_t step = 0; step <= out.max_hops; ++step) {
		for (std::size_t k = 0; k < msgs.size(); ++k) {
			const auto &path = paths[k];
			if (step >= path.size())
				continue;
			const std::size_t node = path[step];
			if (stamp[node] == step + 1)
				out.conflicts.push_back({start + step * cfg.t_route, node, msgs[owner[node]].from, msgs[k].from});
			stamp[node] = step + 1;
			owner[node] = k;
		}
	}
	for (const auto &path : paths) {
		const std::size_t h = path.size() - 1;
		out.active += h * cfg.t_route + cfg.t_parity;
	}
	out.duration = out.max_hops * cfg.t_route + cfg.t_parity;
	if (trace) {
		std::vector<TraceEvent> events;
		for (const auto &path : paths) {
			const std::size_t h = path.size() - 1;
			events.push_back({start, path[0], TraceKind::send});
			for (std::size_t s = 1; s < h; ++s)
				events.push_back({start + s * cfg.t_route, path[s], TraceKind::hop});
			events.push_back({start + h * cfg.t_route, path[h], TraceKind::recv});
			events.push_back({start + h * cfg.t_route, path[h], TraceKind::xor_op});
		}
		std::stable_sort(events.begin(), events.end(),
				 [](const TraceEvent &a, const TraceEvent &b) { return a.cycle < b.cycle; });
		for (const auto &e : events)
			trace(e);
	}
	return out;
}

inline void finish_report(SimReport &r, const MeshConfig &cfg)
{
	r.A = cfg.area();
	r.E = cfg.node_area * r.active_node_cycles;
	r.q = r.T ? static_cast<double>(r.active_node_cycles) / (static_cast<double>(cfg.node_count()) * static_cast<double>(r.T))
		  : 0.0;
}

} // namespace detail

/// Co-residency conflicts of one constant send-back step.
inline std::size_t check_constant_sendback(const MeshConfig &cfg, const std::vector<std::size_t> &senders, std::size_t m)
{
	cfg.validate();
	if (m == 0)
		throw std::invalid_argument("check_constant_sendback: offset must be positive");
	std::vector<detail::Transfer> msgs;
	for (std::size_t i : senders) {
		if (i > cfg.block_length() || i <= m)
			throw std::invalid_argument("check_constant_sendback: sender " + std::to_string(i) +
						    " has no valid target");
		msgs.push_back({i, i - m});
	}
	return detail::run_phase(msgs, 0, cfg, {}).conflicts.size();
}

/// Largest Manhattan distance between two of the nodes 1..N. The extremes of
/// row + col and row - col sit on corners of the occupied staircase.
inline std::size_t max_manhattan(const MeshConfig &cfg)
{
	const std::size_t N = cfg.block_length();
	const std::size_t last_row_start = N - (N - 1) % cfg.cols;
	const GridPos corners[] = {raster_position(1, cfg), raster_position(std::min(cfg.cols, N), cfg),
				   raster_position(last_row_start, cfg), raster_position(N, cfg)};
	std::size_t best = 0;
	for (const auto &a : corners)
		for (const auto &b : corners)
			best = std::max(best, manhattan(a, b));
	return best;
}

struct EncodeSimResult
{
	Bits codeword;
	SimReport report;
	std::vector<Conflict> conflicts;
};

/// Runs the staged send-back schedule. Node i starts with u_sigma(i) and
/// ends holding codeword bit x_i.
inline EncodeSimResult simulate_encode(const PolarCode &code, const Bits &info, const MeshConfig &cfg,
				       const TraceSink &trace = {})
{
	cfg.validate();
	if (cfg.n != code.level())
		throw std::invalid_argument("simulate_encode: config level does not match code");
	const Bits u = code.assemble(info);
	const auto sigma = gf2::bit_reversal_perm(code.level());
	Bits value(code.length() + 1, 0);
	for (std::size_t i = 1; i <= code.length(); ++i)
		value[i] = u[sigma[i - 1] - 1];

	EncodeSimResult res;
	SimReport &rep = res.report;
	rep.N = code.length();
	rep.R = code.rate();
	for (const Phase &ph : encode_schedule(code.level(), cfg)) {
		std::vector<detail::Transfer> msgs;
		msgs.reserve(ph.senders.size());
		for (std::size_t i : ph.senders)
			msgs.push_back({i, i - ph.offset});
		auto out = detail::run_phase(msgs, rep.T, cfg, trace);
		if (!out.conflicts.empty()) {
			if (cfg.conflict_policy == ConflictPolicy::fail)
				throw ConflictError(out.conflicts.front());
			rep.conflicts += out.conflicts.size();
			res.conflicts.insert(res.conflicts.end(), out.conflicts.begin(), out.conflicts.end());
		}
		// all payloads were read at launch; senders are never receivers in a stage
		for (const auto &m : msgs)
			value[m.to] ^= value[m.from];
		rep.T += out.duration;
		rep.active_node_cycles += out.active;
		rep.messages_sent += msgs.size();
		rep.max_hops = std::max(rep.max_hops, out.max_hops);
	}
	detail::finish_report(rep, cfg);
	res.codeword.assign(value.begin() + 1, value.end());
	return res;
}

struct DecodeSimResult
{
	DecodeResult result;
	SimReport report;
	/// Largest Manhattan distance between any two occupied nodes.
	std::size_t max_distance = 0;
};

namespace detail {

// Depth-first successive cancellation where node p owns butterfly row p.
// Each level keeps its channel estimates and partial sums per row; every
// value that crosses rows is carried by a single message.
class MeshDecoder
{
public:
	MeshDecoder(const PolarCode &code, const MeshConfig &cfg, const TraceSink &trace)
		: code_(code), cfg_(cfg), trace_(trace), n_(code.level()), N_(code.length()),
		  est_(static_cast<std::size_t>(n_) + 1, std::vector<Symbol>(N_, Symbol::erased)),
		  sums_(static_cast<std::size_t>(n_) + 1, Bits(N_, 0)), u_(N_, 0) {}

	DecodeSimResult run(const ErasureWord &received)
	{
		const auto sigma = gf2::bit_reversal_perm(n_);
		for (std::size_t p = 0; p < N_; ++p)
			est_[n_][p] = received.symbols[sigma[p] - 1];
		DecodeSimResult res;
		rep_.N = N_;
		rep_.R = code_.rate();
		if (decode(n_, 0))
			res.result.info = code_.extract_info(u_);
		else
			res.result.failed_index = failed_;
		finish_report(rep_, cfg_);
		res.report = rep_;
		res.max_distance = max_manhattan(cfg_);
		return res;
	}

private:
	// Moves one message between rows (0-based); the network holds nothing else.
	void transfer(std::size_t from, std::size_t to)
	{
		const auto path = route(from + 1, to + 1, cfg_);
		const std::size_t hops = path.size() - 1;
		if (trace_) {
			trace_({rep_.T, path[0], TraceKind::send});
			for (std::size_t s = 1; s < hops; ++s)
				trace_({rep_.T + s * cfg_.t_route, path[s], TraceKind::hop});
			trace_({rep_.T + hops * cfg_.t_route, path[hops], TraceKind::recv});
			trace_({rep_.T + hops * cfg_.t_route, path[hops], TraceKind::xor_op});
		}
		const std::uint64_t cycles = hops * cfg_.t_route + cfg_.t_parity;
		rep_.T += cycles;
		rep_.active_node_cycles += cycles;
		++rep_.messages_sent;
		rep_.max_hops = std::max(rep_.max_hops, hops);
	}

	bool decode(int lvl, std::size_t base)
	{
		if (lvl == 0) {
			const Symbol s = est_[0][base];
			if (code_.is_frozen(base)) {
				u_[base] = code_.frozen_value_at(base);
			} else if (known(s)) {
				u_[base] = static_cast<std::uint8_t>(s);
			} else {
				failed_ = base + 1;
				return false;
			}
			sums_[0][base] = u_[base];
			return true;
		}
		const std::size_t half = std::size_t{1} << (lvl - 1);
		auto &in = est_[lvl];
		auto &child = est_[lvl - 1];
		for (std::size_t k = 0; k < half; ++k) {
			transfer(base + half + k, base + k);
			child[base + k] = check_combine(in[base + k], in[base + half + k]);
		}
		if (!decode(lvl - 1, base))
			return false;
		for (std::size_t k = 0; k < half; ++k) {
			transfer(base + k, base + half + k);
			child[base + half + k] = variable_combine(in[base + k], in[base + half + k], sums_[lvl - 1][base + k]);
		}
		if (!decode(lvl - 1, base + half))
			return false;
		if (lvl == n_)
			return true; // the root's own partial sums are never read
		for (std::size_t k = 0; k < half; ++k) {
			transfer(base + half + k, base + k);
			sums_[lvl][base + k] = sums_[lvl - 1][base + k] ^ sums_[lvl - 1][base + half + k];
			sums_[lvl][base + half + k] = sums_[lvl - 1][base + half + k];
		}
		return true;
	}

	const PolarCode &code_;
	const MeshConfig &cfg_;
	const TraceSink &trace_;
	int n_;
	std::size_t N_;
	std::vector<std::vector<Symbol>> est_;
	std::vector<Bits> sums_;
	Bits u_;
	std::size_t failed_ = 0;
	SimReport rep_;
};

} // namespace detail

/// Serial depth-first decoding on the mesh: one message in flight at a time.
inline DecodeSimResult simulate_decode(const PolarCode &code, const ErasureWord &received, const MeshConfig &cfg,
				       const TraceSink &trace = {})
{
	cfg.validate();
	if (cfg.n != code.level())
		throw std::invalid_argument("simulate_decode: config level does not match code");
	if (received.size() != code.length())
		throw std::invalid_argument("simulate_decode: received word length must equal N");
	detail::MeshDecoder dec(code, cfg, trace);
	return dec.run(received);
}

} // namespace polarvlsi::mesh

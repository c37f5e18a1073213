// Command-line front end. Kept in a header so the test suite can drive it
// in-process with captured streams.
#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "polarvlsi/polarvlsi.hpp"

namespace polarvlsi::cli {

/// A failure that ends the run. kind is one of usage, io, assertion, domain.
struct CliError : std::runtime_error
{
	CliError(std::string k, const std::string &msg) : std::runtime_error(msg), kind(std::move(k)) {}
	std::string kind;
};

inline int exit_code(const std::string &kind)
{
	if (kind == "assertion")
		return 1;
	if (kind == "io")
		return 3;
	if (kind == "domain")
		return 4;
	return 2;
}

struct ExperimentConfig
{
	std::string command;
	std::string n;
	std::string n_list;
	double rate = 0.5;
	std::vector<double> eps;
	std::uint64_t trials = 10000;
	std::optional<std::uint64_t> seed;
	std::optional<std::uint64_t> t_route, t_parity, node_area;
	std::string restriction = "balanced";
	std::string target = "both";
	std::string solver = "auto";
	std::string out_dir;
	std::string format = "csv";
	std::string trace;
	std::optional<double> N, R, q, C, omega;
};

/// Levels from "7", "4,6,8" or "4..10".
inline std::vector<int> parse_levels(const std::string &spec)
{
	std::vector<int> out;
	if (spec.empty())
		return out;
	auto to_int = [&](std::string_view s) {
		int v = 0;
		auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
		if (ec != std::errc{} || p != s.data() + s.size())
			throw CliError("usage", "bad level list '" + spec + "'");
		return v;
	};
	if (auto dots = spec.find(".."); dots != std::string::npos) {
		const int lo = to_int(std::string_view(spec).substr(0, dots)), hi = to_int(std::string_view(spec).substr(dots + 2));
		if (lo > hi)
			throw CliError("usage", "empty level range '" + spec + "'");
		for (int v = lo; v <= hi; ++v)
			out.push_back(v);
		return out;
	}
	std::size_t start = 0;
	while (start <= spec.size()) {
		const std::size_t comma = std::min(spec.find(',', start), spec.size());
		out.push_back(to_int(std::string_view(spec).substr(start, comma - start)));
		start = comma + 1;
	}
	return out;
}

inline std::string fixed(double v, int digits)
{
	char buf[64];
	auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
	return std::string(buf, r.ptr);
}

inline std::string num(double v) { return mesh::format_number(v); }

/// RFC 4180 quoting.
inline std::string csv_field(const std::string &s)
{
	if (s.find_first_of(",\"\n") == std::string::npos)
		return s;
	std::string q = "\"";
	for (char ch : s) {
		if (ch == '"')
			q += '"';
		q += ch;
	}
	return q + '"';
}

/// A CSV table that is printed and optionally saved.
struct Table
{
	std::string name;
	std::string header;
	std::vector<std::string> rows;

	std::string text() const
	{
		std::string s = header + '\n';
		for (const auto &r : rows)
			s += r + '\n';
		return s;
	}
};

struct Series
{
	std::string label;
	std::string color;
	std::vector<std::pair<double, double>> points;
	bool fitted = false;
	bounds::ScalingFit fit;
};

/// Self-contained SVG 1.1 log-log plot; one polyline and marker set per
/// series, each labelled with its fitted slope.
inline std::string svg_loglog(const std::string &title, const std::string &ylabel, const std::vector<Series> &series)
{
	const double W = 640, H = 440, L = 80, R = 200, T = 40, B = 60;
	double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
	for (const auto &s : series)
		for (auto [x, y] : s.points) {
			x0 = std::min(x0, std::log10(x));
			x1 = std::max(x1, std::log10(x));
			y0 = std::min(y0, std::log10(y));
			y1 = std::max(y1, std::log10(y));
		}
	x0 = std::floor(x0), x1 = std::ceil(x1), y0 = std::floor(y0), y1 = std::ceil(y1);
	if (x1 == x0)
		x1 = x0 + 1;
	if (y1 == y0)
		y1 = y0 + 1;
	auto px = [&](double x) { return L + (std::log10(x) - x0) / (x1 - x0) * (W - L - R); };
	auto py = [&](double y) { return H - B - (std::log10(y) - y0) / (y1 - y0) * (H - T - B); };
	auto f = [](double v) { return fixed(v, 2); };

	std::ostringstream o;
	o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
	  << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W << "\" height=\"" << H << "\">\n"
	  << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
	  << "<text x=\"" << f(W / 2 - R / 2 + L / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
	  << "</text>\n";
	// axes, decade ticks and grid
	o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
	  << "\" stroke=\"black\"/>\n"
	  << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
	for (double d = x0; d <= x1; ++d) {
		const double x = px(std::pow(10.0, d));
		o << "<line x1=\"" << f(x) << "\" y1=\"" << T << "\" x2=\"" << f(x) << "\" y2=\"" << H - B
		  << "\" stroke=\"#dddddd\"/>\n"
		  << "<text x=\"" << f(x) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"12\">1e"
		  << static_cast<int>(d) << "</text>\n";
	}
	for (double d = y0; d <= y1; ++d) {
		const double y = py(std::pow(10.0, d));
		o << "<line x1=\"" << L << "\" y1=\"" << f(y) << "\" x2=\"" << W - R << "\" y2=\"" << f(y)
		  << "\" stroke=\"#dddddd\"/>\n"
		  << "<text x=\"" << L - 6 << "\" y=\"" << f(y + 4) << "\" text-anchor=\"end\" font-size=\"12\">1e"
		  << static_cast<int>(d) << "</text>\n";
	}
	o << "<text x=\"" << f((L + W - R) / 2) << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\" font-size=\"13\">N</text>\n"
	  << "<text x=\"20\" y=\"" << f((T + H - B) / 2) << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
	  << f((T + H - B) / 2) << ")\">" << ylabel << "</text>\n";

	double legend_y = T + 10;
	for (const auto &s : series) {
		for (std::size_t k = 1; k < s.points.size(); ++k)
			o << "<line x1=\"" << f(px(s.points[k - 1].first)) << "\" y1=\"" << f(py(s.points[k - 1].second))
			  << "\" x2=\"" << f(px(s.points[k].first)) << "\" y2=\"" << f(py(s.points[k].second)) << "\" stroke=\""
			  << s.color << "\" stroke-width=\"1.5\"/>\n";
		for (auto [x, y] : s.points)
			o << "<circle cx=\"" << f(px(x)) << "\" cy=\"" << f(py(y)) << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
		o << "<text x=\"" << W - R + 12 << "\" y=\"" << f(legend_y) << "\" font-size=\"12\" fill=\"" << s.color << "\">"
		  << s.label << "</text>\n";
		if (s.fitted)
			o << "<text x=\"" << W - R + 12 << "\" y=\"" << f(legend_y + 16) << "\" font-size=\"12\" fill=\"" << s.color
			  << "\">slope " << fixed(s.fit.slope, 3) << "</text>\n";
		legend_y += 40;
	}
	o << "</svg>\n";
	return o.str();
}

class App
{
public:
	App(std::ostream &out, std::ostream &err) : out_(out), err_(err) {}

	int run(std::vector<std::string> args)
	{
		std::string command = "?";
		try {
			CLI::App app{"Polar code VLSI complexity toolkit", "polarvlsi"};
			app.require_subcommand(1);
			app.set_help_all_flag("--help-all", "Help for every subcommand");
			ExperimentConfig cfg;
			std::string config_path;
			struct Cmd
			{
				const char *name, *help;
				std::function<int(ExperimentConfig &)> fn;
			};
			const std::vector<Cmd> cmds = {
				{"verify-ranks", "Rank sums of rectangle pairs of F_n and G_n", [&](auto &c) { return verify_ranks(c); }},
				{"bisection", "Minimum bisection width of P_n symbol nodes", [&](auto &c) { return bisection(c); }},
				{"encode-sim", "Mesh encoder simulation", [&](auto &c) { return encode_sim(c); }},
				{"decode-sim", "Mesh decoder simulation", [&](auto &c) { return decode_sim(c); }},
				{"pe-curve", "Monte-Carlo block error probability on the erasure channel", [&](auto &c) { return pe_curve(c); }},
				{"scaling", "Energy, time and activity scaling of the mesh circuits", [&](auto &c) { return scaling(c); }},
				{"bounds", "Evaluate the closed-form bounds", [&](auto &c) { return bound_table(c); }},
				{"check-consistency", "Check simulated circuits against every explicit bound",
				 [&](auto &c) { return check_consistency(c); }},
			};
			std::map<std::string, CLI::App *> subs;
			for (const auto &c : cmds) {
				auto *sub = app.add_subcommand(c.name, c.help);
				add_options(*sub, cfg, config_path);
				subs[c.name] = sub;
			}

			if (!args.empty() && args.front().rfind("-", 0) != 0 && !subs.count(args.front()))
				throw CliError("usage", "unknown command '" + args.front() + "'");

			// Config values are spliced in as flags the user did not pass.
			std::vector<std::string> argv = args;
			if (auto cp = find_config_path(argv)) {
				auto extra = config_args(*cp, argv);
				std::size_t pos = 0;
				while (pos < argv.size() && !subs.count(argv[pos]))
					++pos;
				argv.insert(argv.begin() + static_cast<std::ptrdiff_t>(std::min(pos + 1, argv.size())), extra.begin(),
					    extra.end());
			}
			std::vector<std::string> reversed(argv.rbegin(), argv.rend());
			try {
				app.parse(reversed);
			} catch (const CLI::CallForHelp &) {
				out_ << app.help();
				return 0;
			} catch (const CLI::CallForAllHelp &) {
				out_ << app.help("", CLI::AppFormatMode::All);
				return 0;
			} catch (const CLI::ParseError &e) {
				for (const auto &[name, sub] : subs)
					if (sub->parsed())
						command = name;
				throw CliError("usage", e.what());
			}
			for (const auto &c : cmds)
				if (subs[c.name]->parsed()) {
					command = c.name;
					cfg.command = c.name;
					return c.fn(cfg);
				}
			throw CliError("usage", "no command given");
		} catch (const CliError &e) {
			return fail(command, e.kind, e.what());
		} catch (const bounds::OutOfRegime &e) {
			return fail(command, "domain", e.what());
		} catch (const std::exception &e) {
			return fail(command, "usage", e.what());
		}
	}

private:
	std::ostream &out_;
	std::ostream &err_;

	int fail(const std::string &command, const std::string &kind, const std::string &msg)
	{
		nlohmann::ordered_json j;
		j["error"] = kind;
		j["command"] = command;
		j["message"] = msg;
		err_ << j.dump() << '\n';
		return exit_code(kind);
	}

	static void add_options(CLI::App &sub, ExperimentConfig &cfg, std::string &config_path)
	{
		sub.add_option("--config", config_path, "JSON file with flag values (keys are flag names)");
		sub.add_option("--n", cfg.n, "Level n, N = 2^n");
		sub.add_option("--n-list", cfg.n_list, "Levels: 4,6,8 or 4..10");
		sub.add_option("--rate", cfg.rate, "Code rate K/N");
		sub.add_option("--eps", cfg.eps, "Erasure probability (comma separated list allowed)")->delimiter(',');
		sub.add_option("--trials", cfg.trials, "Monte-Carlo trials or random samples");
		sub.add_option("--seed", cfg.seed, "RNG seed (required by stochastic commands)");
		sub.add_option("--t-route", cfg.t_route, "Cycles per mesh hop");
		sub.add_option("--t-parity", cfg.t_parity, "Cycles per XOR");
		sub.add_option("--node-area", cfg.node_area, "Area units per mesh node");
		sub.add_option("--restriction", cfg.restriction, "balanced or unrestricted")
			->check(CLI::IsMember({"balanced", "unrestricted"}));
		sub.add_option("--target", cfg.target, "F, G or both")->check(CLI::IsMember({"F", "G", "both"}));
		sub.add_option("--solver", cfg.solver, "auto, exhaustive or bnb")
			->check(CLI::IsMember({"auto", "exhaustive", "bnb"}));
		sub.add_option("--out-dir", cfg.out_dir, "Directory for CSV/SVG artifacts");
		sub.add_option("--format", cfg.format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
		sub.add_option("--trace", cfg.trace, "Write a cycle,node,event trace to this file");
		sub.add_option("--N", cfg.N, "Block length for bounds");
		sub.add_option("--R", cfg.R, "Rate for bounds");
		sub.add_option("--q", cfg.q, "Activity factor for bounds");
		sub.add_option("--C", cfg.C, "Channel capacity for bounds");
		sub.add_option("--omega", cfg.omega, "Bisection width for bounds");
	}

	static std::optional<std::string> find_config_path(const std::vector<std::string> &argv)
	{
		for (std::size_t k = 0; k < argv.size(); ++k) {
			if (argv[k] == "--config" && k + 1 < argv.size())
				return argv[k + 1];
			if (argv[k].rfind("--config=", 0) == 0)
				return argv[k].substr(9);
		}
		return std::nullopt;
	}

	static std::vector<std::string> config_args(const std::string &path, const std::vector<std::string> &argv)
	{
		std::ifstream in(path);
		if (!in)
			throw CliError("io", "cannot read config '" + path + "'");
		nlohmann::json j;
		try {
			j = nlohmann::json::parse(in);
		} catch (const nlohmann::json::exception &e) {
			throw CliError("usage", "config '" + path + "': " + e.what());
		}
		if (!j.is_object())
			throw CliError("usage", "config '" + path + "' must be a JSON object");
		auto given = [&](const std::string &flag) {
			for (const auto &a : argv)
				if (a == flag || a.rfind(flag + "=", 0) == 0)
					return true;
			return false;
		};
		std::vector<std::string> extra;
		for (auto it = j.begin(); it != j.end(); ++it) {
			const std::string flag = "--" + it.key();
			if (it.key() == "config" || given(flag))
				continue;
			std::string value;
			const auto &v = it.value();
			if (v.is_string())
				value = v.get<std::string>();
			else if (v.is_array()) {
				for (std::size_t k = 0; k < v.size(); ++k)
					value += (k ? "," : "") + (v[k].is_string() ? v[k].get<std::string>() : v[k].dump());
			} else if (v.is_number() || v.is_boolean())
				value = v.dump();
			else
				throw CliError("usage", "config key '" + it.key() + "' has an unsupported value");
			extra.push_back(flag);
			extra.push_back(value);
		}
		return extra;
	}

	// ---- shared helpers ----------------------------------------------

	static std::uint64_t require_seed(const ExperimentConfig &c)
	{
		if (!c.seed)
			throw CliError("usage", c.command + " is stochastic and needs an explicit --seed");
		return *c.seed;
	}

	static std::vector<int> levels(const ExperimentConfig &c, bool allow_single = true)
	{
		std::vector<int> ls = parse_levels(c.n_list);
		if (allow_single && !c.n.empty()) {
			auto single = parse_levels(c.n);
			if (single.size() != 1)
				throw CliError("usage", "--n takes one level; use --n-list for a sweep");
			ls.insert(ls.begin(), single.front());
		}
		if (ls.empty())
			throw CliError("usage", "empty sweep: no levels given");
		for (int n : ls)
			gf2::require_level(n, c.command.c_str());
		return ls;
	}

	static std::size_t info_length(int n, double rate)
	{
		if (!(rate >= 0 && rate <= 1))
			throw CliError("usage", "--rate must lie in [0, 1]");
		return static_cast<std::size_t>(std::llround(rate * std::ldexp(1.0, n)));
	}

	static mesh::MeshConfig mesh_config(const ExperimentConfig &c, int n)
	{
		auto m = mesh::MeshConfig::defaults(n);
		if (c.t_route)
			m.t_route = *c.t_route;
		if (c.t_parity)
			m.t_parity = *c.t_parity;
		if (c.node_area)
			m.node_area = *c.node_area;
		m.validate();
		return m;
	}

	static Bits random_bits(SplitMix64 &rng, std::size_t k)
	{
		Bits b(k);
		for (auto &x : b)
			x = rng.bit();
		return b;
	}

	bool want_csv(const ExperimentConfig &c) const { return c.format != "svg"; }
	bool want_svg(const ExperimentConfig &c) const { return c.format != "csv"; }

	void write_file(const ExperimentConfig &c, const std::string &name, const std::string &text)
	{
		namespace fs = std::filesystem;
		std::error_code ec;
		fs::create_directories(c.out_dir, ec);
		const fs::path p = fs::path(c.out_dir) / name;
		std::ofstream f(p, std::ios::binary);
		if (!f || !(f << text) || !f.flush())
			throw CliError("io", "cannot write '" + p.string() + "'");
	}

	void emit(const ExperimentConfig &c, const std::vector<Table> &tables)
	{
		for (std::size_t k = 0; k < tables.size(); ++k) {
			if (k)
				out_ << '\n';
			out_ << tables[k].text();
			if (!c.out_dir.empty() && want_csv(c))
				write_file(c, tables[k].name + ".csv", tables[k].text());
		}
	}

	[[noreturn]] static int assertion(const std::string &what)
	{
		throw CliError("assertion", what);
	}

	// ---- commands ----------------------------------------------------

	int verify_ranks(ExperimentConfig &c)
	{
		const auto ls = levels(c);
		const bool balanced = c.restriction == "balanced";
		std::vector<gf2::Target> targets;
		if (c.target != "G")
			targets.push_back(gf2::Target::F);
		if (c.target != "F")
			targets.push_back(gf2::Target::G);

		Table sums{"rank_sums", "n,target,restriction,mode,pairs_checked,min_rank_sum,bound,bound_holds,witness_rows,witness_cols", {}};
		Table reduced{"row_reduced", "n,target,pairs_checked,reductions_checked,min_slack,bound_holds", {}};
		std::vector<std::string> violations;
		for (int n : ls)
			for (auto t : targets) {
				gf2::RankSumOptions opt;
				opt.n = n;
				opt.target = t;
				opt.restriction = balanced ? gf2::Restriction::balanced_columns : gf2::Restriction::unrestricted;
				if (n > 3) {
					opt.mode = gf2::SearchMode::sampled;
					opt.samples = c.trials;
					opt.seed = require_seed(c);
				}
				const auto r = gf2::min_rank_sum(opt);
				sums.rows.push_back(std::to_string(n) + ',' + gf2::to_string(t) + ',' + gf2::to_string(r.restriction) +
						    ',' + gf2::to_string(r.mode) + ',' + std::to_string(r.pairs_checked) + ',' +
						    std::to_string(r.min_rank_sum) + ',' + std::to_string(r.bound) + ',' +
						    (r.bound_holds ? "1" : "0") + ',' + csv_field(r.witness_rows.to_string()) + ',' +
						    csv_field(r.witness_cols.to_string()));
				if (balanced && !r.bound_holds)
					violations.push_back("rank sum " + std::to_string(r.min_rank_sum) + " below " +
							     std::to_string(r.bound) + " for " + gf2::to_string(t) + " at n=" + std::to_string(n));
				if (balanced && n <= 3) {
					const auto rr = gf2::verify_row_reduced(n, t);
					reduced.rows.push_back(std::to_string(n) + ',' + gf2::to_string(t) + ',' +
							       std::to_string(rr.pairs_checked) + ',' + std::to_string(rr.reductions_checked) +
							       ',' + std::to_string(rr.min_slack) + ',' + (rr.bound_holds ? "1" : "0"));
					if (!rr.bound_holds)
						violations.push_back("row-reduced bound fails for " + std::string(gf2::to_string(t)) +
								     " at n=" + std::to_string(n));
				}
			}
		std::vector<Table> tables{sums};
		if (!reduced.rows.empty())
			tables.push_back(reduced);
		emit(c, tables);
		if (!violations.empty())
			return assertion(violations.front());
		return 0;
	}

	int bisection(ExperimentConfig &c)
	{
		const auto ls = levels(c);
		const double design_eps = c.eps.empty() ? 0.5 : c.eps.front();
		Table t{"bisection", "n,N,R,vertices,edges,symbols,mbw,certified,solver,bound", {}};
		std::vector<std::string> violations;
		for (int n : ls) {
			const std::size_t N = std::size_t{1} << n;
			const std::size_t K = info_length(n, c.rate);
			const auto code = PolarCode::construct(n, design_eps, K);
			const auto g = graphs::freeze_graph(graphs::build_polar_graph(n), code.frozen());
			const graphs::Solver s = c.solver == "exhaustive" ? graphs::Solver::exhaustive
						 : c.solver == "bnb"      ? graphs::Solver::branch_and_bound
									  : graphs::auto_solver(g);
			if (s == graphs::Solver::exhaustive && g.vertex_count() > graphs::kExhaustiveVertexLimit)
				throw CliError("usage", "exhaustive solver limited to " +
								std::to_string(graphs::kExhaustiveVertexLimit) + " vertices");
			std::string bound;
			const auto r = g.symbol_nodes().empty() ? graphs::CutResult{0, {}, true}
								: graphs::mbw(g, g.symbol_nodes(), s);
			if (3 * code.rate() > 2) {
				const double b = bounds::decoder_mbw_bound(static_cast<double>(N), code.rate()).value;
				bound = num(b);
				if (r.certified && static_cast<double>(r.width) < b)
					violations.push_back("mbw " + std::to_string(r.width) + " below " + bound + " at n=" +
							     std::to_string(n));
			}
			t.rows.push_back(std::to_string(n) + ',' + std::to_string(N) + ',' + num(code.rate()) + ',' +
					 std::to_string(g.vertex_count()) + ',' + std::to_string(g.edge_count()) + ',' +
					 std::to_string(g.symbol_nodes().size()) + ',' + std::to_string(r.width) + ',' +
					 (r.certified ? "1" : "0") + ',' + graphs::to_string(s) + ',' + bound);
		}
		emit(c, {t});
		if (!violations.empty())
			return assertion(violations.front());
		return 0;
	}

	std::ofstream open_trace(const ExperimentConfig &c)
	{
		std::ofstream f;
		if (!c.trace.empty()) {
			f.open(c.trace, std::ios::binary);
			if (!f)
				throw CliError("io", "cannot write trace '" + c.trace + "'");
		}
		return f;
	}

	int encode_sim(ExperimentConfig &c)
	{
		const auto ls = levels(c);
		const std::uint64_t seed = require_seed(c);
		auto trace_file = open_trace(c);
		Table t{"encode_sim", mesh::csv_header(), {}};
		for (std::size_t k = 0; k < ls.size(); ++k) {
			const int n = ls[k];
			const auto cfg = mesh_config(c, n);
			const auto code = PolarCode::construct(n, 0.5, info_length(n, c.rate));
			SplitMix64 rng = substream(seed, k);
			const Bits info = random_bits(rng, code.info_length());
			mesh::TraceSink sink;
			if (trace_file.is_open())
				sink = [&](const mesh::TraceEvent &e) { mesh::write_trace_line(trace_file, e); };
			const auto r = mesh::simulate_encode(code, info, cfg, sink);
			t.rows.push_back(mesh::to_csv_row(r.report));
			if (r.codeword != encode_reference(code, info)) {
				emit(c, {t});
				return assertion("mesh codeword differs from u*G_n at n=" + std::to_string(n));
			}
		}
		emit(c, {t});
		return 0;
	}

	int decode_sim(ExperimentConfig &c)
	{
		const auto ls = levels(c);
		const std::uint64_t seed = require_seed(c);
		const double eps = c.eps.empty() ? 0.0 : c.eps.front();
		if (!(eps >= 0 && eps <= 1))
			throw CliError("usage", "--eps must lie in [0, 1]");
		auto trace_file = open_trace(c);
		Table t{"decode_sim", mesh::csv_header(), {}};
		for (std::size_t k = 0; k < ls.size(); ++k) {
			const int n = ls[k];
			const auto cfg = mesh_config(c, n);
			const auto code = PolarCode::construct(n, eps > 0 ? eps : 0.5, info_length(n, c.rate));
			SplitMix64 rng = substream(seed, k);
			const Bits info = random_bits(rng, code.info_length());
			auto y = ErasureWord::from_bits(encode(code, info));
			for (auto &s : y.symbols)
				if (rng.uniform01() < eps)
					s = Symbol::erased;
			mesh::TraceSink sink;
			if (trace_file.is_open())
				sink = [&](const mesh::TraceEvent &e) { mesh::write_trace_line(trace_file, e); };
			const auto r = mesh::simulate_decode(code, y, cfg, sink);
			t.rows.push_back(mesh::to_csv_row(r.report));
			const auto ref = sc_decode(code, y);
			if (r.result.info != ref.info || r.result.failed_index != ref.failed_index) {
				emit(c, {t});
				return assertion("mesh decoder disagrees with SC at n=" + std::to_string(n));
			}
		}
		emit(c, {t});
		return 0;
	}

	int pe_curve(ExperimentConfig &c)
	{
		const auto ls = levels(c);
		const std::uint64_t seed = require_seed(c);
		if (c.eps.empty())
			throw CliError("usage", "pe-curve needs --eps");
		Table t{"pe_curve", "N,R,eps,trials,failures,p_hat,ci95_halfwidth", {}};
		std::uint64_t point = 0;
		for (int n : ls)
			for (double eps : c.eps) {
				const auto code = PolarCode::construct(n, eps, info_length(n, c.rate));
				const auto e = simulate_block_error(code, eps, c.trials, mix64(seed + point++));
				t.rows.push_back(std::to_string(code.length()) + ',' + num(code.rate()) + ',' + num(eps) + ',' +
						 std::to_string(e.trials) + ',' + std::to_string(e.failures) + ',' + num(e.p_hat) +
						 ',' + num(e.ci95_halfwidth));
			}
		emit(c, {t});
		return 0;
	}

	int scaling(ExperimentConfig &c)
	{
		const auto ls = parse_levels(c.n_list);
		if (ls.empty())
			throw CliError("usage", std::string("empty sweep: scaling runs over --n-list and none was given") +
							(c.n.empty() ? "" : " (--n names a single level, not a sweep)"));
		if (ls.size() < 3)
			throw CliError("usage", "scaling needs at least 3 levels to fit a slope");
		for (int n : ls)
			gf2::require_level(n, "scaling");
		const std::uint64_t seed = require_seed(c);
		if (want_svg(c) && c.out_dir.empty())
			throw CliError("usage", "SVG output needs --out-dir");

		Table runs{"scaling", std::string("circuit,") + mesh::csv_header(), {}};
		std::map<std::string, Series> series;
		const char *metrics[] = {"E", "T", "q"};
		for (const char *circuit : {"encoder", "decoder"})
			for (const char *m : metrics)
				series[std::string(circuit) + m] = {circuit, std::string(circuit) == "encoder" ? "#1f77b4" : "#d62728", {}, false, {}};
		for (std::size_t k = 0; k < ls.size(); ++k) {
			const int n = ls[k];
			const auto cfg = mesh_config(c, n);
			const auto code = PolarCode::construct(n, 0.5, info_length(n, c.rate));
			SplitMix64 rng = substream(seed, k);
			const Bits info = random_bits(rng, code.info_length());
			const auto enc = mesh::simulate_encode(code, info, cfg);
			const auto dec = mesh::simulate_decode(code, ErasureWord::from_bits(enc.codeword), cfg);
			for (auto [name, rep] : {std::pair{"encoder", &enc.report}, std::pair{"decoder", &dec.report}}) {
				runs.rows.push_back(std::string(name) + ',' + mesh::to_csv_row(*rep));
				const double N = static_cast<double>(rep->N);
				series[std::string(name) + "E"].points.emplace_back(N, static_cast<double>(rep->E));
				series[std::string(name) + "T"].points.emplace_back(N, static_cast<double>(rep->T));
				series[std::string(name) + "q"].points.emplace_back(N, rep->q);
			}
		}
		Table fits{"scaling_fit", "circuit,metric,slope,intercept,residual", {}};
		for (const char *circuit : {"encoder", "decoder"})
			for (const char *m : metrics) {
				auto &s = series[std::string(circuit) + m];
				s.fit = bounds::fit_scaling_exponent(s.points);
				s.fitted = true;
				fits.rows.push_back(std::string(circuit) + ',' + m + ',' + num(s.fit.slope) + ',' +
						    num(s.fit.intercept) + ',' + num(s.fit.residual));
			}
		emit(c, {runs, fits});
		if (want_svg(c)) {
			const std::map<std::string, std::string> titles = {
				{"E", "Energy (node area x active node-cycles)"}, {"T", "Clock cycles"}, {"q", "Activity factor"}};
			for (const char *m : metrics)
				write_file(c, std::string("scaling_") + m + ".svg",
					   svg_loglog(titles.at(m), m, {series[std::string("encoder") + m], series[std::string("decoder") + m]}));
		}
		return 0;
	}

	int bound_table(ExperimentConfig &c)
	{
		Table t{"bounds", "name,value,has_constant,N,R,q,omega,chi", {}};
		auto opt = [](const std::optional<double> &v) { return v ? num(*v) : std::string(); };
		auto add = [&](const bounds::BoundReport &r) {
			t.rows.push_back(r.name + ',' + num(r.value) + ',' + (r.has_constant ? "1" : "0") + ',' + opt(r.inputs.N) +
					 ',' + opt(r.inputs.R) + ',' + opt(r.inputs.q) + ',' + opt(r.inputs.omega) + ',' +
					 opt(r.inputs.chi));
		};
		auto skip = [&](const std::string &name, const std::string &why) {
			nlohmann::ordered_json j;
			j["skipped"] = name;
			j["reason"] = why;
			err_ << j.dump() << '\n';
		};
		if (c.omega)
			add(bounds::thompson_area(*c.omega));
		if (c.N && c.R) {
			const double N = *c.N, R = *c.R;
			if (R > 0.5) {
				add(bounds::encoder_at2(N, R));
				if (c.q)
					add(bounds::encoder_energy(N, R, *c.q));
			} else {
				skip("encoder_at2", "requires R > 1/2");
			}
			if (3 * R > 2) {
				add(bounds::decoder_mbw_bound(N, R));
				add(bounds::decoder_energy_scale(N, R));
			} else {
				skip("decoder_mbw_bound", "requires R > 2/3");
			}
		}
		if (c.C) {
			if (!c.R)
				throw CliError("usage", "--C needs --R");
			const double x = bounds::chi(*c.R, *c.C);
			bounds::BoundReport r{"chi", {}, x, true};
			r.inputs.R = c.R;
			r.inputs.C = c.C;
			r.inputs.chi = x;
			add(r);
			if (x > 1) {
				const auto w = bounds::chi_energy_window(x);
				add(w.general_floor);
				add(w.lower);
				add(w.upper);
			}
		}
		if (t.rows.empty())
			throw CliError("usage", "nothing to evaluate: give --N and --R, --omega, or --R and --C");
		emit(c, {t});
		return 0;
	}

	int check_consistency(ExperimentConfig &c)
	{
		const auto ls = levels(c);
		const std::uint64_t seed = require_seed(c);
		Table t{"consistency", "circuit,N,R,bound,bound_value,measured,holds", {}};
		std::vector<std::string> violations;
		for (std::size_t k = 0; k < ls.size(); ++k) {
			const int n = ls[k];
			const auto cfg = mesh_config(c, n);
			const auto code = PolarCode::construct(n, 0.5, info_length(n, c.rate));
			SplitMix64 rng = substream(seed, k);
			const auto rep = mesh::simulate_encode(code, random_bits(rng, code.info_length()), cfg).report;
			const double N = static_cast<double>(rep.N), R = rep.R;
			if (!(R > 0.5))
				continue;
			const double at2 = static_cast<double>(rep.A) * static_cast<double>(rep.T) * static_cast<double>(rep.T);
			const std::pair<bounds::BoundReport, double> checks[] = {
				{bounds::encoder_at2(N, R), at2},
				{bounds::encoder_energy(N, R, rep.q), static_cast<double>(rep.E)},
			};
			for (const auto &[report, measured] : checks) {
				const bounds::AbsoluteBound b(report);
				const bool ok = b.satisfied_by(measured);
				t.rows.push_back(std::string("encoder,") + std::to_string(rep.N) + ',' + num(R) + ',' + report.name +
						 ',' + num(b.value()) + ',' + num(measured) + ',' + (ok ? "1" : "0"));
				if (!ok)
					violations.push_back(report.name + " violated at N=" + std::to_string(rep.N));
			}
		}
		if (t.rows.empty())
			throw CliError("usage", "no run is in the regime of an explicit bound (encoder bounds need R > 1/2)");
		emit(c, {t});
		if (!violations.empty())
			return assertion(violations.front());
		return 0;
	}
};

inline int run(const std::vector<std::string> &args, std::ostream &out = std::cout, std::ostream &err = std::cerr)
{
	return App(out, err).run(args);
}

} // namespace polarvlsi::cli

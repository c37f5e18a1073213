#include "polarvlsi/mesh.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace polarvlsi;
using namespace polarvlsi::mesh;

namespace {

Bits random_bits(SplitMix64 &rng, std::size_t n)
{
	Bits b(n);
	for (auto &x : b)
		x = rng.bit();
	return b;
}

MeshConfig unit_config(int n)
{
	auto c = MeshConfig::defaults(n);
	c.t_route = 1;
	c.t_parity = 1;
	return c;
}

// Recomputes T from row/column arithmetic alone: each phase lasts its
// longest |drow| + |dcol| plus one parity cycle.
std::uint64_t hand_encode_time(int n, std::size_t cols, std::uint64_t t_route, std::uint64_t t_parity)
{
	const std::size_t N = std::size_t{1} << n;
	std::uint64_t T = 0;
	for (int j = 1; j <= n; ++j) {
		const std::size_t d = N >> j;
		for (std::size_t parity : {0u, 1u}) {
			std::size_t worst = 0;
			bool any = false;
			for (std::size_t i = 1; i <= N; ++i) {
				if (!((i - 1) & d))
					continue;
				const std::size_t r1 = (i - 1) / cols, c1 = (i - 1) % cols;
				if ((r1 + 1) % 2 != parity)
					continue;
				const std::size_t r2 = (i - d - 1) / cols, c2 = (i - d - 1) % cols;
				const std::size_t dist = (r1 - r2) + (c1 > c2 ? c1 - c2 : c2 - c1);
				worst = std::max(worst, dist);
				any = true;
			}
			if (any)
				T += worst * t_route + t_parity;
		}
	}
	return T;
}

} // namespace

TEST(Config, Defaults)
{
	const auto c = MeshConfig::defaults(4);
	EXPECT_EQ(c.rows, 4u);
	EXPECT_EQ(c.cols, 4u);
	EXPECT_EQ(c.t_route, 4u);
	EXPECT_EQ(c.node_area, 16u);
	const auto odd = MeshConfig::defaults(5);
	EXPECT_EQ(odd.rows, 8u);
	EXPECT_EQ(odd.cols, 4u);
	MeshConfig bad = c;
	bad.rows = 3;
	EXPECT_THROW(bad.validate(), std::invalid_argument);
	bad = c;
	bad.t_route = 0;
	EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Raster, Positions)
{
	const auto c = MeshConfig::defaults(4);
	EXPECT_EQ(raster_position(1, c), (GridPos{1, 1}));
	EXPECT_EQ(raster_position(5, c), (GridPos{2, 1}));
	EXPECT_EQ(raster_position(16, c), (GridPos{4, 4}));
	EXPECT_THROW(raster_position(0, c), std::invalid_argument);
	EXPECT_THROW(raster_position(17, c), std::invalid_argument);
}

TEST(Route, VerticalThenHorizontal)
{
	const auto c = MeshConfig::defaults(4);
	EXPECT_EQ(route(7, 2, c), (std::vector<std::size_t>{7, 3, 2}));
	EXPECT_EQ(route(1, 1, c), (std::vector<std::size_t>{1}));
	EXPECT_EQ(route(16, 1, c).size(), 7u);
}

TEST(Schedule, Examples)
{
	const auto s2 = encode_schedule(2, MeshConfig::defaults(2));
	ASSERT_EQ(s2.size(), 4u);
	std::vector<std::size_t> stage1;
	for (const auto &ph : s2)
		if (ph.stage == 1) {
			EXPECT_EQ(ph.offset, 2u);
			stage1.insert(stage1.end(), ph.senders.begin(), ph.senders.end());
		}
	std::sort(stage1.begin(), stage1.end());
	EXPECT_EQ(stage1, (std::vector<std::size_t>{3, 4}));

	const auto cfg3 = MeshConfig::defaults(3);
	std::vector<std::size_t> s31;
	for (const auto &ph : encode_schedule(3, cfg3))
		if (ph.stage == 1) {
			EXPECT_EQ(ph.offset, 4u);
			s31.insert(s31.end(), ph.senders.begin(), ph.senders.end());
		}
	std::sort(s31.begin(), s31.end());
	EXPECT_EQ(s31, (std::vector<std::size_t>{5, 6, 7, 8}));
	EXPECT_THROW(encode_schedule(2, cfg3), std::invalid_argument);
}

TEST(Schedule, PhasesAreSingleParityAndCoverButterfly)
{
	for (int n = 1; n <= 10; ++n) {
		const auto cfg = MeshConfig::defaults(n);
		const auto phases = encode_schedule(n, cfg);
		ASSERT_EQ(phases.size(), static_cast<std::size_t>(2 * n));
		for (int j = 1; j <= n; ++j) {
			const auto &even = phases[2 * (j - 1)], &odd = phases[2 * (j - 1) + 1];
			EXPECT_EQ(even.parity, RowParity::even);
			EXPECT_EQ(odd.parity, RowParity::odd);
			EXPECT_EQ(even.senders.size() + odd.senders.size(), cfg.block_length() / 2);
			for (const auto *ph : {&even, &odd})
				for (std::size_t i : ph->senders) {
					EXPECT_EQ(raster_position(i, cfg).row % 2 == 0, ph->parity == RowParity::even);
					EXPECT_GT(i, ph->offset);
				}
		}
	}
}

TEST(Encode, MatchesReferenceEncoder)
{
	SplitMix64 rng(8);
	for (int n = 1; n <= 10; ++n) {
		const auto cfg = MeshConfig::defaults(n);
		const int vectors = n <= 6 ? 100 : 20;
		for (int t = 0; t < vectors; ++t) {
			const std::size_t N = cfg.block_length();
			const std::size_t K = rng.below(N + 1);
			const auto code = PolarCode::construct(n, rng.uniform01(), K, random_bits(rng, N - K));
			const Bits info = random_bits(rng, K);
			const auto r = simulate_encode(code, info, cfg);
			ASSERT_EQ(r.codeword, encode_reference(code, info)) << "n=" << n;
			ASSERT_EQ(r.report.conflicts, 0u);
		}
	}
}

TEST(Encode, ZeroConflictsUnderFailPolicy)
{
	for (int n : {2, 4, 6, 8, 10}) {
		const auto cfg = MeshConfig::defaults(n);
		const auto code = PolarCode::construct(n, 0.5, cfg.block_length() / 2);
		EXPECT_NO_THROW(simulate_encode(code, Bits(code.info_length(), 1), cfg));
	}
}

TEST(Encode, TimeMatchesPhaseMaxima)
{
	const auto cfg = unit_config(2);
	const auto code = PolarCode::construct(2, 0.5, 4);
	const auto r = simulate_encode(code, Bits{1, 0, 1, 1}, cfg);
	EXPECT_EQ(r.report.T, 6u);
	EXPECT_EQ(r.report.T, hand_encode_time(2, 2, 1, 1));
	for (int n = 1; n <= 10; ++n) {
		const auto c = MeshConfig::defaults(n);
		const auto code_n = PolarCode::construct(n, 0.5, c.block_length());
		const auto rep = simulate_encode(code_n, Bits(c.block_length(), 0), c).report;
		EXPECT_EQ(rep.T, hand_encode_time(n, c.cols, c.t_route, c.t_parity)) << "n=" << n;
		EXPECT_EQ(rep.messages_sent, static_cast<std::uint64_t>(n) * c.block_length() / 2);
	}
}

TEST(Encode, AccountingIdentities)
{
	for (int n = 2; n <= 10; ++n) {
		const auto cfg = MeshConfig::defaults(n);
		const auto code = PolarCode::construct(n, 0.5, cfg.block_length() * 3 / 4);
		const auto rep = simulate_encode(code, Bits(code.info_length(), 1), cfg).report;
		EXPECT_DOUBLE_EQ(static_cast<double>(rep.E), rep.q * static_cast<double>(rep.A) * static_cast<double>(rep.T));
		EXPECT_LE(rep.active_node_cycles, cfg.node_count() * rep.T);
		EXPECT_GT(rep.q, 0.0);
		EXPECT_LE(rep.q, 1.0);
		const double N = static_cast<double>(rep.N), R = rep.R;
		EXPECT_GE(static_cast<double>(rep.A) * std::pow(static_cast<double>(rep.T), 2),
			  N * N * (2 * R - 1) * (2 * R - 1) / 64);
		EXPECT_GE(static_cast<double>(rep.E), rep.q * std::pow(N, 1.5) * (2 * R - 1) / 8);
	}
}

TEST(Encode, Errors)
{
	const auto code = PolarCode::construct(3, 0.5, 4);
	EXPECT_THROW(simulate_encode(code, Bits(4, 0), MeshConfig::defaults(4)), std::invalid_argument);
	EXPECT_THROW(simulate_encode(code, Bits(3, 0), MeshConfig::defaults(3)), std::invalid_argument);
}

TEST(SendBack, SingleParityIsConflictFree)
{
	const auto cfg = MeshConfig::defaults(6); // 8 x 8
	SplitMix64 rng(17);
	for (std::size_t row = 2; row <= 8; ++row)
		for (std::size_t m = 1; m <= (row - 1) * 8; m += 3) {
			std::vector<std::size_t> senders;
			for (std::size_t c = 1; c <= 8; ++c)
				senders.push_back((row - 1) * 8 + c);
			EXPECT_EQ(check_constant_sendback(cfg, senders, m), 0u);
		}
	for (int t = 0; t < 50; ++t) {
		const std::size_t m = 1 + rng.below(16);
		std::vector<std::size_t> senders;
		for (std::size_t row : {3u, 5u, 7u})
			for (std::size_t c = 1; c <= 8; ++c)
				if (rng.bit())
					senders.push_back((row - 1) * 8 + c);
		EXPECT_EQ(check_constant_sendback(cfg, senders, m), 0u);
	}
}

TEST(SendBack, MixedParityCanCollide)
{
	// 4 -> 1 runs along row 1 while 7 -> 4 climbs into node 3 on the same step
	const auto cfg = MeshConfig::defaults(4);
	EXPECT_EQ(check_constant_sendback(cfg, {4, 7}, 3), 1u);
	EXPECT_THROW(check_constant_sendback(cfg, {2}, 3), std::invalid_argument);
	EXPECT_THROW(check_constant_sendback(cfg, {17}, 3), std::invalid_argument);
	EXPECT_THROW(check_constant_sendback(cfg, {5}, 0), std::invalid_argument);
}

TEST(ConflictErrorType, CarriesDetails)
{
	const ConflictError err(Conflict{12, 3, 4, 7});
	EXPECT_EQ(err.conflict.cycle, 12u);
	EXPECT_EQ(err.conflict.node, 3u);
	EXPECT_NE(std::string(err.what()).find("node 3"), std::string::npos);
}

TEST(Decode, MatchesSoftwareDecoder)
{
	SplitMix64 rng(33);
	for (int n = 1; n <= 8; ++n) {
		const auto cfg = MeshConfig::defaults(n);
		for (int t = 0; t < 30; ++t) {
			const std::size_t N = cfg.block_length();
			const std::size_t K = rng.below(N + 1);
			const auto code = PolarCode::construct(n, 0.5, K, random_bits(rng, N - K));
			const Bits info = random_bits(rng, code.info_length());
			auto y = ErasureWord::from_bits(encode(code, info));
			const double eps = t % 3 == 0 ? 0.0 : rng.uniform01() * 0.6;
			for (auto &s : y.symbols)
				if (rng.uniform01() < eps)
					s = Symbol::erased;
			const auto mesh = simulate_decode(code, y, cfg);
			const auto ref = sc_decode(code, y);
			ASSERT_EQ(mesh.result.failed_index, ref.failed_index);
			ASSERT_EQ(mesh.result.info, ref.info);
			if (eps == 0.0) {
				ASSERT_EQ(mesh.result.info, info);
			}
		}
	}
}

TEST(Decode, TwoBitMessageCount)
{
	const auto code = PolarCode::construct(1, 0.5, 1);
	const auto r = simulate_decode(code, ErasureWord::from_bits(Bits{1, 1}), MeshConfig::defaults(1));
	EXPECT_TRUE(r.result.ok());
	EXPECT_LE(r.report.messages_sent, 8u);
}

TEST(Decode, SerialScheduleBounds)
{
	for (int n = 2; n <= 10; ++n) {
		const auto cfg = MeshConfig::defaults(n);
		const auto code = PolarCode::construct(n, 0.5, cfg.block_length() / 2);
		const auto r = simulate_decode(code, ErasureWord::from_bits(encode(code, Bits(code.info_length(), 1))), cfg);
		const auto &rep = r.report;
		ASSERT_TRUE(r.result.ok());
		const double N = static_cast<double>(rep.N);
		EXPECT_LE(rep.q, static_cast<double>(rep.max_hops + 1) / N);
		EXPECT_LE(rep.T, rep.messages_sent * (r.max_distance * cfg.t_route + cfg.t_parity));
		EXPECT_EQ(rep.messages_sent, static_cast<std::uint64_t>(3 * n - 1) * cfg.block_length() / 2);
		EXPECT_DOUBLE_EQ(static_cast<double>(rep.E), rep.q * static_cast<double>(rep.A) * static_cast<double>(rep.T));
	}
}

TEST(Decode, ActivityFactorFalls)
{
	auto q_at = [](int n) {
		const auto cfg = MeshConfig::defaults(n);
		const auto code = PolarCode::construct(n, 0.5, cfg.block_length() / 2);
		SplitMix64 rng(1234);
		const Bits info = random_bits(rng, code.info_length());
		return simulate_decode(code, ErasureWord::from_bits(encode(code, info)), cfg).report.q;
	};
	const double q4 = q_at(4), q6 = q_at(6), q8 = q_at(8);
	EXPECT_LT(q8, q6);
	EXPECT_LT(q6, q4);
}

TEST(Decode, Errors)
{
	const auto code = PolarCode::construct(2, 0.5, 2);
	EXPECT_THROW(simulate_decode(code, ErasureWord::from_bits(Bits(3, 0)), MeshConfig::defaults(2)),
		     std::invalid_argument);
	EXPECT_THROW(simulate_decode(code, ErasureWord::from_bits(Bits(4, 0)), MeshConfig::defaults(3)),
		     std::invalid_argument);
}

TEST(Trace, EventsAreOrderedAndComplete)
{
	const auto cfg = unit_config(2);
	const auto code = PolarCode::construct(2, 0.5, 4);
	std::vector<TraceEvent> events;
	const auto rep = simulate_encode(code, Bits{1, 1, 0, 1}, cfg, [&](const TraceEvent &e) { events.push_back(e); }).report;
	std::size_t sends = 0, recvs = 0;
	for (std::size_t k = 0; k < events.size(); ++k) {
		if (k) {
			EXPECT_LE(events[k - 1].cycle, events[k].cycle);
		}
		EXPECT_LT(events[k].cycle, rep.T);
		sends += events[k].kind == TraceKind::send;
		recvs += events[k].kind == TraceKind::recv;
	}
	EXPECT_EQ(sends, rep.messages_sent);
	EXPECT_EQ(recvs, rep.messages_sent);
	EXPECT_EQ(events.front(), (TraceEvent{0, 3, TraceKind::send}));

	std::ostringstream out;
	write_trace_line(out, events.front());
	EXPECT_EQ(out.str(), "0,3,send\n");
}

TEST(Report, CsvRow)
{
	SimReport r;
	r.N = 16;
	r.R = 0.5;
	r.T = 40;
	r.A = 256;
	r.q = 0.25;
	r.E = 2560;
	r.messages_sent = 32;
	EXPECT_STREQ(csv_header(), "N,R,T,A,q,E,messages,conflicts");
	EXPECT_EQ(to_csv_row(r), "16,0.5,40,256,0.25,2560,32,0");
}

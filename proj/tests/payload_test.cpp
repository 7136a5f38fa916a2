/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#include "irmark/payload.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace irmark;

namespace {

CapacityPlan plan_with(int cols, int rows, qr::Version v = qr::Version(5), qr::Ecc e = qr::Ecc::L)
{
	const double module = 1.0;
	const double cell = (v.side() + 8) * module;
	return plan_for(grid_fit(SheetSpec::custom(cols * cell, rows * cell), v, module, 4, e));
}

Bytes random_bytes(std::mt19937& rng, std::size_t n)
{
	Bytes b(n);
	for (auto& c : b)
		c = static_cast<std::uint8_t>(rng());
	return b;
}

// Fragments placed on a synthetic grid, one per chunk, with small jitter.
std::vector<DecodedFragment> fragments_of(const ChunkSet& cs, std::mt19937& rng, double pitch = 100)
{
	std::uniform_real_distribution<double> jitter(-0.2 * pitch, 0.2 * pitch);
	std::vector<DecodedFragment> out;
	for (const auto& c : cs.chunks) {
		const int col = c.grid_index % cs.layout.cols, row = c.grid_index / cs.layout.cols;
		out.push_back({c.bytes, col * pitch + jitter(rng), row * pitch + jitter(rng), 0.8 * pitch});
	}
	return out;
}

GrayImage checkerboard(int w, int h, int cell)
{
	GrayImage g(w, h);
	for (int y = 0; y < h; ++y)
		for (int x = 0; x < w; ++x)
			g(x, y) = ((x / cell + y / cell) % 2) ? 255 : 0;
	return g;
}

} // namespace

TEST(Chunk, GreedyRowMajor)
{
	const auto plan = plan_with(5, 4);
	ASSERT_EQ(plan.per_code_chars, 106);
	ASSERT_EQ(plan.codes(), 20u);
	const Bytes text(300, 'a');
	const auto cs = chunk(text, plan);
	ASSERT_EQ(cs.chunks.size(), 3u);
	EXPECT_EQ(cs.chunks[0].bytes.size(), 106u);
	EXPECT_EQ(cs.chunks[1].bytes.size(), 106u);
	EXPECT_EQ(cs.chunks[2].bytes.size(), 88u);
	EXPECT_EQ(cs.layout.count(), 3u);
	EXPECT_EQ(cs.chunks[2].grid_index, 2);
}

TEST(Chunk, EmptyAndExactlyFull)
{
	const auto plan = plan_with(2, 2);
	EXPECT_TRUE(chunk(Bytes{}, plan).chunks.empty());
	const Bytes full(static_cast<std::size_t>(plan.total_chars), 'z');
	const auto cs = chunk(full, plan);
	ASSERT_EQ(cs.chunks.size(), 4u);
	for (const auto& c : cs.chunks)
		EXPECT_EQ(c.bytes.size(), static_cast<std::size_t>(plan.per_code_chars));
}

TEST(Chunk, OversizeNamesBothSizes)
{
	const auto plan = plan_with(1, 1);
	const Bytes text(static_cast<std::size_t>(plan.total_chars) + 1, 'x');
	try {
		chunk(text, plan);
		FAIL();
	} catch (const CapacityError& e) {
		EXPECT_EQ(e.code(), "capacity");
		EXPECT_NE(std::string(e.what()).find(std::to_string(plan.total_chars + 1)), std::string::npos);
		EXPECT_NE(std::string(e.what()).find(std::to_string(plan.total_chars)), std::string::npos);
	}
}

TEST(Assemble, SingleFragment)
{
	EXPECT_EQ(assemble({{to_bytes("solo"), 10, 10, 50}}), to_bytes("solo"));
}

TEST(Assemble, ReversedTwoByTwo)
{
	std::vector<DecodedFragment> f{
		{to_bytes("D"), 200, 210, 80}, {to_bytes("C"), 95, 190, 80}, {to_bytes("B"), 210, 95, 80}, {to_bytes("A"), 100, 105, 80}};
	EXPECT_EQ(to_string(assemble(f)), "ABCD");
}

TEST(Assemble, PermutationInvariantAndReconstructs)
{
	std::mt19937 rng(11);
	for (int trial = 0; trial < 200; ++trial) {
		const int cols = 1 + static_cast<int>(rng() % 5), rows = 1 + static_cast<int>(rng() % 5);
		const auto plan = plan_with(cols, rows, qr::Version(1 + static_cast<int>(rng() % 7)),
									static_cast<qr::Ecc>(rng() % 4));
		const auto text = random_bytes(rng, rng() % (plan.total_chars + 1));
		const auto cs = chunk(text, plan);
		auto frags = fragments_of(cs, rng);
		const auto expected = assemble(frags);
		ASSERT_EQ(expected, text);
		for (int k = 0; k < 5; ++k) {
			std::shuffle(frags.begin(), frags.end(), rng);
			ASSERT_EQ(assemble(frags), expected);
		}
	}
}

TEST(Assemble, IdenticalPositionsStillDeterministic)
{
	std::vector<DecodedFragment> f{{to_bytes("b"), 5, 5, 10}, {to_bytes("a"), 5, 5, 10}};
	const auto x = assemble(f);
	std::reverse(f.begin(), f.end());
	EXPECT_EQ(assemble(f), x);
}

TEST(Trackability, BlankAndDegenerate)
{
	GrayImage blank(64, 64, 200);
	EXPECT_EQ(trackability_score(blank, {0, 0, 64, 64}), 0.0);
	const auto cb = checkerboard(64, 64, 4);
	EXPECT_EQ(trackability_score(cb, {0, 0, 4, 64}), 0.0);
	EXPECT_THROW(trackability_score(cb, {60, 0, 10, 10}), ValidationError);
}

TEST(Trackability, DenseCheckerboardPasses)
{
	const auto cb = checkerboard(96, 96, 6);
	EXPECT_GE(trackability_score(cb, {0, 0, 96, 96}), kTrackableScore);
}

TEST(Trackability, TranslationInvariant)
{
	GrayImage img(200, 120, 255);
	const auto cb = checkerboard(40, 40, 5);
	for (int y = 0; y < 40; ++y)
		for (int x = 0; x < 40; ++x) {
			img(10 + x, 20 + y) = cb(x, y);
			img(130 + x, 60 + y) = cb(x, y);
		}
	EXPECT_DOUBLE_EQ(trackability_score(img, {5, 15, 50, 50}), trackability_score(img, {125, 55, 50, 50}));
}

TEST(Trackability, MonotoneInAddedStructure)
{
	GrayImage img(80, 80, 255);
	double prev = trackability_score(img, {0, 0, 80, 80});
	for (int k = 0; k < 8; ++k) {
		for (int y = 0; y < 6; ++y)
			for (int x = 0; x < 6; ++x)
				img(4 + k * 9 + x, 10 + y) = 0;
		const double s = trackability_score(img, {0, 0, 80, 80});
		EXPECT_GE(s, prev);
		prev = s;
	}
	EXPECT_GT(prev, 0.0);
}

TEST(OnlinePayload, SchemeRoundTrip)
{
	EXPECT_EQ(online_payload("b42", 3), "ip1:b42/3");
	const auto p = parse_online_payload("ip1:b42/3");
	ASSERT_TRUE(p);
	EXPECT_EQ(p->bundle_id, "b42");
	EXPECT_EQ(p->region, 3);
	EXPECT_FALSE(parse_online_payload("plain offline text"));
	EXPECT_FALSE(parse_online_payload("ip1:/3"));
	EXPECT_FALSE(parse_online_payload("ip1:b42/"));
	EXPECT_FALSE(parse_online_payload("ip1:b42/x1"));
}

TEST(OnlineDescriptor, TwoRegionsThreeFrames)
{
	const std::vector<ContentFrame> frames{{FrameKind::Text, "hello"}, {FrameKind::Image, "blob:ab"}, {FrameKind::Audio, "blob:cd"}};
	const std::vector<TrackedRegion> regions{{{0, 0, 50, 50}, 80, frames}, {{60, 0, 50, 50}, 91.5, frames}};
	const auto d = build_online_descriptor("bundle1", regions);
	EXPECT_EQ(d.bundle.id, "bundle1");
	EXPECT_EQ(d.bundle.frames.size(), 2u);
	EXPECT_EQ(d.bundle.frames.at(1).size(), 3u);
	EXPECT_EQ(d.payloads, (std::vector<std::string>{"ip1:bundle1/0", "ip1:bundle1/1"}));
}

TEST(OnlineDescriptor, Rejections)
{
	const std::vector<ContentFrame> frames{{FrameKind::Text, "x"}};
	try {
		build_online_descriptor("b", {{{0, 0, 5, 5}, 90, frames}, {{0, 0, 5, 5}, 60, frames}});
		FAIL();
	} catch (const RegionRejected& e) {
		EXPECT_EQ(e.regions(), std::vector<int>{1});
		EXPECT_EQ(e.code(), "untrackable");
	}
	EXPECT_THROW(build_online_descriptor("b", {}), ValidationError);
	EXPECT_THROW(build_online_descriptor("", {{{0, 0, 5, 5}, 90, frames}}), ValidationError);
	EXPECT_THROW(build_online_descriptor("b", {{{0, 0, 5, 5}, 90, {}}}), ValidationError);
}

TEST(FrameKind, Names)
{
	for (auto k : {FrameKind::Text, FrameKind::Image, FrameKind::Audio})
		EXPECT_EQ(parse_frame_kind(frame_kind_name(k)), k);
	EXPECT_THROW(parse_frame_kind("video"), ValidationError);
}

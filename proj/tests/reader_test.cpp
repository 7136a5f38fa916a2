/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#include "irmark/capsim.hpp"
#include "irmark/pipeline.hpp"
#include "irmark/reader.hpp"
#include "irmark/roundtrip.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace irmark;
using namespace irmark::reader;

namespace {

// Symbol drawn at `ppm` pixels per module with a `quiet`-module white border.
BinaryImage raster(const qr::QrMatrix& m, int ppm, int quiet = 4)
{
	const int side = m.side(), n = (side + 2 * quiet) * ppm;
	BinaryImage b(n, n, 0);
	for (int y = 0; y < n; ++y)
		for (int x = 0; x < n; ++x) {
			const int mx = x / ppm - quiet, my = y / ppm - quiet;
			if (mx >= 0 && my >= 0 && mx < side && my < side)
				b(x, y) = m.dark(mx, my) ? 1 : 0;
		}
	return b;
}

GrayImage to_levels(const BinaryImage& b, std::uint8_t dark, std::uint8_t light)
{
	GrayImage g(b.width(), b.height());
	for (std::size_t i = 0; i < b.size(); ++i)
		g.data()[i] = b.data()[i] ? dark : light;
	return g;
}

// Faint noisy capture of a raster: reflectances 0.85 and 0.85 - contrast.
GrayImage faint(const BinaryImage& b, double contrast, double noise, std::uint64_t seed)
{
	FloatImage f(b.width(), b.height());
	for (std::size_t i = 0; i < b.size(); ++i)
		f.data()[i] = static_cast<float>(b.data()[i] ? 0.85 - contrast : 0.85);
	CaptureParams p;
	p.px_per_mm = 1.0;
	p.noise_sigma = noise;
	p.seed = seed;
	return simulate({f, 25.4}, p).pixels;
}

// One-code print job on a small custom sheet.
Embedded single_code(const std::string& text, int density, qr::Version v = qr::Version(2))
{
	EmbedOptions o;
	o.density_percent = density;
	const double module = 1.27;
	const double cell = (v.side() + 8) * module;
	o.sheet = SheetSpec::custom(cell, cell);
	o.module_mm = module;
	o.ecc = qr::Ecc::M;
	return embed_offline(to_bytes(text), o);
}

int module_agreement(const BinaryImage& b, const qr::QrMatrix& m, int ppm, int quiet = 4)
{
	int ok = 0;
	for (int y = 0; y < m.side(); ++y)
		for (int x = 0; x < m.side(); ++x) {
			int dark = 0;
			for (int dy = -1; dy <= 1; ++dy)
				for (int dx = -1; dx <= 1; ++dx)
					dark += b((x + quiet) * ppm + ppm / 2 + dx, (y + quiet) * ppm + ppm / 2 + dy);
			ok += (dark >= 5) == m.dark(x, y);
		}
	return ok;
}

} // namespace

TEST(Clahe, UniformStaysUniformAndKeepsSize)
{
	const auto odd = clahe(GrayImage(97, 61, 140));
	EXPECT_EQ(odd.width(), 97);
	EXPECT_EQ(odd.height(), 61);
	const auto out = clahe(GrayImage(96, 64, 140));
	for (auto v : out.data())
		ASSERT_EQ(v, out.data()[0]);
}

TEST(Clahe, WidensLowContrastGap)
{
	const auto sym = qr::encode("clahe", qr::Version(2), qr::Ecc::L);
	const auto b = raster(sym, 6);
	const auto g = to_levels(b, 180, 200);
	const auto out = clahe(g);
	double dark = 0, light = 0;
	long nd = 0, nl = 0;
	for (std::size_t i = 0; i < b.size(); ++i)
		(b.data()[i] ? dark : light) += out.data()[i], ++(b.data()[i] ? nd : nl);
	EXPECT_GT(light / nl - dark / nd, 20.0);
}

TEST(Clahe, Validation)
{
	EXPECT_THROW(clahe(GrayImage(4, 4, 0)), ValidationError);
	BinarizeParams p;
	p.clahe_clip = 0.5;
	EXPECT_THROW(clahe(GrayImage(64, 64, 0), p), ValidationError);
}

TEST(Sauvola, UniformIsOneClass)
{
	for (int v : {0, 90, 255}) {
		const auto b = sauvola(GrayImage(50, 40, static_cast<std::uint8_t>(v)));
		for (auto x : b.data())
			ASSERT_EQ(x, 0);
	}
}

TEST(Sauvola, WindowMustBeOdd)
{
	BinarizeParams p;
	p.sauvola_window = 30;
	EXPECT_THROW(sauvola(GrayImage(40, 40, 0), p), ValidationError);
	p.sauvola_window = 1;
	EXPECT_THROW(sauvola(GrayImage(40, 40, 0), p), ValidationError);
}

TEST(Sauvola, MatchesDirectWindowComputation)
{
	std::mt19937 rng(2);
	GrayImage g(40, 30);
	for (auto& v : g.data())
		v = static_cast<std::uint8_t>(rng());
	BinarizeParams p;
	p.sauvola_window = 7;
	const auto b = sauvola(g, p);
	for (int y = 0; y < 30; ++y)
		for (int x = 0; x < 40; ++x) {
			double s1 = 0, s2 = 0, n = 0;
			for (int yy = std::max(0, y - 3); yy <= std::min(29, y + 3); ++yy)
				for (int xx = std::max(0, x - 3); xx <= std::min(39, x + 3); ++xx) {
					s1 += g(xx, yy);
					s2 += g(xx, yy) * g(xx, yy);
					++n;
				}
			const double m = s1 / n, s = std::sqrt(std::max(0.0, s2 / n - m * m));
			const double t = m * (1 + 0.2 * (s / 128 - 1));
			if (std::abs(g(x, y) - t) > 1e-6)
				ASSERT_EQ(b(x, y), g(x, y) < t ? 1 : 0) << x << "," << y;
		}
}

TEST(Sauvola, InversionSwapsClasses)
{
	const auto sym = qr::encode("inverse", qr::Version(3), qr::Ecc::Q);
	const auto b = raster(sym, 2, 0);
	const auto pos = sauvola(to_levels(b, 0, 255));
	const auto neg = sauvola(to_levels(b, 255, 0));
	for (std::size_t i = 0; i < b.size(); ++i) {
		ASSERT_EQ(pos.data()[i], b.data()[i]);
		ASSERT_EQ(neg.data()[i], 1 - b.data()[i]);
	}
}

TEST(Binarize, FaintNoisyCodeBitsRecovered)
{
	const auto sym = qr::encode("faint code fixture", qr::Version(4), qr::Ecc::M);
	const int ppm = 7;
	const auto truth = raster(sym, ppm);
	const auto p = BinarizeParams::for_module_px(ppm);
	const auto bin = builtin_binarizer("clahe+sauvola");
	for (std::uint64_t seed = 0; seed < 5; ++seed) {
		const auto b = bin.run(faint(truth, 0.14, 0.03, seed), p);
		const int total = sym.side() * sym.side();
		EXPECT_GE(module_agreement(b, sym, ppm), 0.99 * total) << seed;
	}
}

TEST(Binarize, UnknownStrategy)
{
	EXPECT_THROW(builtin_binarizer("cnn"), ValidationError);
	EXPECT_EQ(default_binarizers().size(), 2u);
}

TEST(Detect, IdealRasterEveryVersion)
{
	for (int v = 1; v <= 7; ++v) {
		const auto sym = qr::encode("v" + std::to_string(v), qr::Version(v), qr::Ecc::H);
		const auto found = detect(raster(sym, 8));
		ASSERT_EQ(found.size(), 1u) << v;
		EXPECT_TRUE(found[0].grid == sym.modules) << v;
		EXPECT_TRUE(qr::is_valid_side(found[0].side()));
		const double mid = (sym.side() + 8) * 8 / 2.0;
		EXPECT_NEAR(found[0].center.x, mid, 1.0);
		EXPECT_NEAR(found[0].center.y, mid, 1.0);
	}
}

TEST(Detect, BlankImage)
{
	EXPECT_TRUE(detect(BinaryImage(300, 200, 0)).empty());
	EXPECT_TRUE(detect(BinaryImage(300, 200, 1)).empty());
}

TEST(Detect, TwelveCodeSheet)
{
	EmbedOptions o;
	o.ecc = qr::Ecc::L;
	o.density_percent = 155;
	o.module_mm = 1.27;
	std::string text;
	for (int i = 0; i < 12 * 154; ++i)
		text += static_cast<char>('a' + i % 26);
	const auto e = embed_offline(to_bytes(text), o);
	ASSERT_EQ(e.chunks.chunks.size(), 12u);
	CaptureParams cp;
	cp.px_per_mm = 6.0;
	cp.blur_sigma = 0.6;
	const auto sim = simulate(render_ideal(e.job), cp);
	const auto p = BinarizeParams::for_module_px(6.0 * 1.27);
	const auto found = detect(builtin_binarizer("clahe+sauvola").run(sim.pixels, p));
	ASSERT_EQ(found.size(), 12u);
	const double half = e.chunks.layout.code_mm() / 2;
	for (const auto& pl : e.chunks.layout.placements) {
		const Point truth = sim.sheet_to_frame.apply({pl.x_mm + half, pl.y_mm + half});
		double best = 1e9;
		for (const auto& d : found)
			best = std::min(best, distance(truth, d.center));
		EXPECT_LT(best, 2.0);
	}
}

// Handheld perspective leaves the far corner off the three-finder affine
// guess; sampling through the alignment pattern must still be exact.
TEST(Detect, PerspectiveSampledExactly)
{
	const double module = 1.18;
	const auto sym = qr::encode(std::string(100, 'q'), qr::Version(5), qr::Ecc::L);
	const auto layout = grid_fit(SheetSpec::custom(45 * module, 45 * module), qr::Version(5), module, 4, qr::Ecc::L);
	const auto job = make_print_job({}, layout, std::vector{sym}, 155);
	auto cp = nominal_capture(7.0 / module);
	const auto ideal = render_ideal(job, cp);
	const auto bin = builtin_binarizer("clahe+sauvola");
	for (std::uint64_t seed = 0; seed < 20; ++seed) {
		cp.seed = seed;
		const auto found = detect(bin.run(simulate(ideal, cp).pixels, BinarizeParams::for_module_px(7.0)));
		ASSERT_EQ(found.size(), 1u) << seed;
		EXPECT_TRUE(found[0].grid == sym.modules) << seed;
	}
}

TEST(ReadSheet, ThreeChunksAssemble)
{
	EmbedOptions o;
	o.ecc = qr::Ecc::L;
	o.density_percent = 102;
	o.module_mm = 1.18;
	o.sheet = SheetSpec::half_letter();
	const auto plan = max_capacity(o.sheet, o.ecc, o.module_mm);
	std::string text;
	for (int i = 0; i < 2 * plan.per_code_chars + 40; ++i)
		text += static_cast<char>('!' + (i * 7) % 90);
	const auto e = embed_offline(to_bytes(text), o);
	ASSERT_EQ(e.chunks.chunks.size(), 3u);
	CaptureParams cp;
	cp.px_per_mm = 6.0;
	cp.blur_sigma = 0.7;
	cp.noise_sigma = 0.01;
	cp.perspective = 0.02;
	cp.seed = 4;
	const auto sim = simulate(render_ideal(e.job), cp);
	ReadParams rp;
	rp.binarize = BinarizeParams::for_module_px(6.0 * 1.18);
	const auto frags = read_sheet(sim.pixels, rp);
	ASSERT_EQ(frags.size(), 3u);
	EXPECT_EQ(to_string(assemble(fragments(frags))), text);
	const auto again = read_sheet(sim.pixels, rp);
	ASSERT_EQ(again.size(), frags.size());
	for (std::size_t i = 0; i < frags.size(); ++i)
		EXPECT_EQ(again[i].fragment, frags[i].fragment);
}

TEST(ReadSheet, BothBinarizersYieldOneFragment)
{
	const auto sym = qr::encode("dedupe", qr::Version(2), qr::Ecc::M);
	const auto g = to_levels(raster(sym, 8), 20, 235);
	ReadParams rp;
	rp.binarize = BinarizeParams::for_module_px(8);
	for (const auto& b : rp.binarizers)
		ASSERT_EQ(read_binary(b.run(g, rp.binarize)).size(), 1u) << b.name;
	const auto frags = read_sheet(g, rp);
	ASSERT_EQ(frags.size(), 1u);
	EXPECT_EQ(frags[0].binarizer, "sauvola");
	EXPECT_EQ(to_string(frags[0].fragment.bytes), "dedupe");
}

TEST(ReadSheet, CorruptedBeyondCorrectionYieldsNothing)
{
	std::mt19937 rng(8);
	const auto layout = qr::function_layout(qr::Version(3));
	for (int trial = 0; trial < 40; ++trial) {
		auto sym = qr::encode("corrupt " + std::to_string(trial), qr::Version(3), qr::Ecc::L);
		// Flip a third of the data modules: far beyond what RS can repair.
		for (int y = 0; y < sym.side(); ++y)
			for (int x = 0; x < sym.side(); ++x)
				if (!layout.reserved(x, y) && rng() % 3 == 0)
					sym.modules(x, y) ^= 1;
		EXPECT_TRUE(read_binary(raster(sym, 6)).empty()) << trial;
	}
}

TEST(ReadSheet, HeavyNoiseNeverReturnsWrongPayload)
{
	const auto e = single_code("heavy noise payload", 155);
	const auto ideal = render_ideal(e.job);
	CaptureParams cp;
	cp.px_per_mm = 6.0;
	cp.noise_sigma = 0.2;
	ReadParams rp;
	rp.binarize = BinarizeParams::for_module_px(6.0 * 1.27);
	for (std::uint64_t seed = 0; seed < 20; ++seed) {
		cp.seed = seed;
		for (const auto& f : read_sheet(simulate(ideal, cp).pixels, rp))
			EXPECT_EQ(to_string(f.fragment.bytes), "heavy noise payload");
	}
}

TEST(ReadSheet, SuccessMonotoneInScaleAndContrast)
{
	const int seeds = 20;
	auto rate = [&](int density, double px_per_mm) {
		const auto e = single_code("monotone", density);
		const auto ideal = render_ideal(e.job);
		CaptureParams cp;
		cp.px_per_mm = px_per_mm;
		cp.noise_sigma = 0.04;
		cp.blur_sigma = 0.8;
		cp.perspective = 0.03;
		ReadParams rp;
		rp.binarize = BinarizeParams::for_module_px(px_per_mm * 1.27);
		int ok = 0;
		for (int s = 0; s < seeds; ++s) {
			cp.seed = static_cast<std::uint64_t>(s);
			const auto f = read_sheet(simulate(ideal, cp).pixels, rp);
			ok += f.size() == 1 && to_string(f[0].fragment.bytes) == "monotone";
		}
		return ok;
	};
	int prev = -1;
	for (double ppm : {1.6, 2.4, 4.0, 6.0}) {
		const int r = rate(102, ppm);
		EXPECT_GE(r, prev) << ppm;
		prev = r;
	}
	EXPECT_EQ(prev, seeds);
	prev = -1;
	for (int d : {81, 102, 155}) {
		const int r = rate(d, 3.0);
		EXPECT_GE(r, prev) << d;
		prev = r;
	}
}

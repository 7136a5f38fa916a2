/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#include "irmark/export.hpp"
#include "irmark/pipeline.hpp"
#include "irmark/separation.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace irmark;

namespace {

std::filesystem::path temp_dir(const std::string& name)
{
	auto d = std::filesystem::temp_directory_path() / ("irmark_sep_" + name + "_" + std::to_string(::getpid()));
	std::filesystem::remove_all(d);
	return d;
}

std::vector<char> slurp(const std::filesystem::path& p)
{
	std::ifstream in(p, std::ios::binary);
	return {std::istreambuf_iterator<char>(in), {}};
}

} // namespace

TEST(Gcr, PrimaryColors)
{
	EXPECT_EQ(rgb_to_cmy(kWhite), (CmyPixel{0, 0, 0}));
	const auto black = rgb_to_cmy(kBlack);
	EXPECT_DOUBLE_EQ(black.cyan(), 1.0);
	EXPECT_DOUBLE_EQ(black.magenta(), 1.0);
	EXPECT_DOUBLE_EQ(black.yellow(), 1.0);
	const auto red = rgb_to_cmy({255, 0, 0});
	EXPECT_DOUBLE_EQ(red.cyan(), 0.0);
	EXPECT_DOUBLE_EQ(red.magenta(), 1.0);
	EXPECT_DOUBLE_EQ(red.yellow(), 1.0);
	EXPECT_EQ(cmy_to_rgb(CmyPixel{0, 0, 0}), kWhite);
	EXPECT_EQ(cmy_to_rgb(CmyPixel{255, 255, 255}), kBlack);
}

TEST(Gcr, CoverageFollowsComplement)
{
	for (int v = 0; v < 256; ++v) {
		const auto p = rgb_to_cmy({static_cast<std::uint8_t>(v), 0, 255});
		ASSERT_NEAR(p.cyan(), 1.0 - v / 255.0, 1e-12);
	}
}

TEST(Gcr, ExhaustiveRoundTripPerChannel)
{
	for (int ch = 0; ch < 3; ++ch)
		for (int v = 0; v < 256; ++v)
			for (int other : {0, 77, 255}) {
				RgbColor c{static_cast<std::uint8_t>(other), static_cast<std::uint8_t>(other),
						   static_cast<std::uint8_t>(other)};
				(ch == 0 ? c.r : ch == 1 ? c.g : c.b) = static_cast<std::uint8_t>(v);
				const auto back = cmy_to_rgb(rgb_to_cmy(c));
				ASSERT_LE(std::abs(back.r - c.r), 1);
				ASSERT_LE(std::abs(back.g - c.g), 1);
				ASSERT_LE(std::abs(back.b - c.b), 1);
			}
}

TEST(IrLayer, ModulePixelsAt300Dpi)
{
	EXPECT_EQ(module_pixels(1.27, 300), 15);
	EXPECT_EQ(module_pixels(quantize_up(1.18), 300), 14);
}

TEST(IrLayer, PassesFollowDensity)
{
	const auto layout = grid_fit(SheetSpec::half_letter(), qr::Version(1), 2.0);
	for (int d : {81, 102, 155}) {
		const auto ir = compose_ir_layer(layout, {}, d);
		EXPECT_EQ(ir.passes, d > 100 ? 2 : 1);
		EXPECT_EQ(ir.density_percent, d);
	}
	EXPECT_THROW(compose_ir_layer(layout, {}, 90), ValidationError);
}

TEST(IrLayer, EmptyLayoutIsBlank)
{
	const auto layout = grid_fit(SheetSpec::letter(), qr::Version(7), 300.0);
	ASSERT_EQ(layout.count(), 0u);
	const auto ir = compose_ir_layer(layout, {}, 81);
	EXPECT_EQ(ir.width(), 2550);
	EXPECT_EQ(ir.height(), 3300);
	for (auto v : ir.coverage.data())
		ASSERT_EQ(v, 0);
}

TEST(IrLayer, RasterMatchesSymbolsAndLeavesQuietZonesBlank)
{
	const auto layout = grid_fit(SheetSpec::half_letter(), qr::Version(2), 1.27);
	std::vector<qr::QrMatrix> syms;
	for (std::size_t i = 0; i < layout.count(); ++i)
		syms.push_back(qr::encode("code " + std::to_string(i), qr::Version(2), qr::Ecc::M));
	const auto ir = compose_ir_layer(layout, syms, 102);
	const int ppm = 15, side = 25;

	Grid<std::uint8_t> expected(ir.width(), ir.height(), 0);
	for (std::size_t i = 0; i < syms.size(); ++i) {
		const int ox = mm_to_px(layout.placements[i].x_mm, 300), oy = mm_to_px(layout.placements[i].y_mm, 300);
		for (int my = 0; my < side; ++my)
			for (int mx = 0; mx < side; ++mx) {
				// Centre pixel of every module carries the module value.
				EXPECT_EQ(ir.coverage(ox + mx * ppm + ppm / 2, oy + my * ppm + ppm / 2), syms[i].dark(mx, my) ? 1 : 0);
				for (int dy = 0; dy < ppm; ++dy)
					for (int dx = 0; dx < ppm; ++dx)
						expected(ox + mx * ppm + dx, oy + my * ppm + dy) = syms[i].dark(mx, my);
			}
	}
	EXPECT_TRUE(ir.coverage == expected);
}

TEST(IrLayer, RejectsSubPixelModules)
{
	const auto layout = grid_fit(SheetSpec::half_letter(), qr::Version(1), 0.03);
	const std::vector<qr::QrMatrix> syms{qr::encode("x", qr::Version(1), qr::Ecc::L)};
	EXPECT_THROW(compose_ir_layer(layout, syms, 81), ValidationError);
}

TEST(PrintJob, LetterRasterAndBlankPage)
{
	const auto e = embed_offline(to_bytes("hello"), {});
	EXPECT_EQ(e.job.cmy.width(), 2550);
	EXPECT_EQ(e.job.cmy.height(), 3300);
	EXPECT_EQ(e.job.ir.width(), 2550);
	for (auto p : e.job.cmy.data())
		ASSERT_EQ(p, (CmyPixel{0, 0, 0}));
}

TEST(PrintJob, ExportIsDeterministic)
{
	EmbedOptions o;
	o.sheet = SheetSpec::half_letter();
	o.density_percent = 102;
	RgbImage doc(40, 60, {200, 120, 40});
	const auto e = embed_offline(to_bytes("deterministic export"), o, doc);
	const auto d1 = temp_dir("a"), d2 = temp_dir("b");
	const auto m = export_print_job(e.job, d1);
	export_print_job(e.job, d2);
	for (auto f : {"cmy.png", "ir.png", "manifest.json"})
		EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
	EXPECT_EQ(m.at("passes"), 2);
	EXPECT_EQ(m.at("density_percent"), 102);
	EXPECT_EQ(m.at("raster_px"), Json({1650, 2550}));
	EXPECT_TRUE(m.contains("layout_hash"));

	const auto back = load_print_job(d1 / "manifest.json");
	EXPECT_TRUE(back.ir.coverage == e.job.ir.coverage);
	EXPECT_TRUE(static_cast<const Grid<CmyPixel>&>(back.cmy) == e.job.cmy);
	EXPECT_EQ(back.layout, e.job.layout);
	std::filesystem::remove_all(d1);
	std::filesystem::remove_all(d2);
}

TEST(PrintJob, UnwritableDestination)
{
	const auto e = embed_offline(to_bytes("x"), {});
	const auto blocker = temp_dir("file");
	std::ofstream(blocker) << "not a directory";
	EXPECT_THROW(export_print_job(e.job, blocker / "sub"), IoError);
	std::filesystem::remove(blocker);
}

/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Two-layer print jobs: the visible document separated into CMY with the K
// channel left empty, and a bilevel IR layer printed through the freed K
// channel. Densities above 100% are reached by printing the IR layer twice.

#include "error.hpp"
#include "image.hpp"
#include "inkmodel.hpp"
#include "planner.hpp"
#include "qr/symbol.hpp"

#include <cmath>
#include <span>

namespace irmark {

// Ink coverage in 1/255 steps; cyan()/magenta()/yellow() give [0,1] values.
struct CmyPixel
{
	std::uint8_t c = 0, m = 0, y = 0;

	double cyan() const { return c / 255.0; }
	double magenta() const { return m / 255.0; }
	double yellow() const { return y / 255.0; }
	friend bool operator==(const CmyPixel&, const CmyPixel&) = default;
};

struct CmyImage : Grid<CmyPixel>
{
	using Grid<CmyPixel>::Grid;
	double dpi = 300.0;
};

struct IrLayer
{
	Grid<std::uint8_t> coverage; // 1 = IR ink
	int density_percent = 81;
	int passes = 1;
	double dpi = 300.0;

	int width() const { return coverage.width(); }
	int height() const { return coverage.height(); }
};

// Gray component replacement with K forced to zero: the full tone range is
// carried by C, M and Y.
inline CmyPixel rgb_to_cmy(RgbColor p)
{
	return {static_cast<std::uint8_t>(255 - p.r), static_cast<std::uint8_t>(255 - p.g),
			static_cast<std::uint8_t>(255 - p.b)};
}

inline RgbColor cmy_to_rgb(CmyPixel p)
{
	return {static_cast<std::uint8_t>(255 - p.c), static_cast<std::uint8_t>(255 - p.m),
			static_cast<std::uint8_t>(255 - p.y)};
}

inline CmyImage rgb_to_cmy(const RgbImage& img)
{
	CmyImage out(img.width(), img.height());
	out.dpi = img.dpi;
	for (std::size_t i = 0; i < img.size(); ++i)
		out.data()[i] = rgb_to_cmy(img.data()[i]);
	return out;
}

inline RgbImage cmy_to_rgb(const CmyImage& img)
{
	RgbImage out(img.width(), img.height());
	out.dpi = img.dpi;
	for (std::size_t i = 0; i < img.size(); ++i)
		out.data()[i] = cmy_to_rgb(img.data()[i]);
	return out;
}

inline int mm_to_px(double mm, double dpi) { return static_cast<int>(std::lround(mm * dpi / 25.4)); }

inline int module_pixels(double module_mm, double dpi) { return mm_to_px(module_mm, dpi); }

struct SheetRaster
{
	int width = 0, height = 0;
};

inline SheetRaster sheet_raster(const SheetSpec& sheet, double dpi)
{
	return {mm_to_px(sheet.width_mm, dpi), mm_to_px(sheet.height_mm, dpi)};
}

// Rasterizes `symbols[i]` at `layout.placements[i]`; placements without a
// symbol stay blank. Quiet zones are never inked.
inline IrLayer compose_ir_layer(const Layout& layout, std::span<const qr::QrMatrix> symbols, int density_percent,
								double dpi = 300.0)
{
	if (!is_density_class(density_percent))
		throw ValidationError("IR density must be one of 81, 102, 155");
	if (!(dpi > 0))
		throw ValidationError("dpi must be positive");
	if (symbols.size() > layout.placements.size())
		throw ValidationError("more symbols than layout placements");

	const auto raster = sheet_raster(layout.sheet, dpi);
	IrLayer out{Grid<std::uint8_t>(raster.width, raster.height, 0), density_percent, print_passes(density_percent), dpi};
	if (symbols.empty())
		return out;

	const int ppm = module_pixels(layout.module_mm, dpi);
	if (ppm < 1)
		throw ValidationError("module rasterizes to less than one pixel at this dpi");

	for (std::size_t i = 0; i < symbols.size(); ++i) {
		const auto& sym = symbols[i];
		if (sym.version != layout.version)
			throw ValidationError("symbol version differs from layout version");
		const int ox = mm_to_px(layout.placements[i].x_mm, dpi);
		const int oy = mm_to_px(layout.placements[i].y_mm, dpi);
		const int side = sym.side();
		if (ox < 0 || oy < 0 || ox + side * ppm > raster.width || oy + side * ppm > raster.height)
			throw ValidationError("placed symbol falls outside the sheet raster");
		for (int my = 0; my < side; ++my)
			for (int mx = 0; mx < side; ++mx) {
				if (!sym.dark(mx, my))
					continue;
				for (int dy = 0; dy < ppm; ++dy) {
					auto row = out.coverage.row(oy + my * ppm + dy);
					std::fill_n(row.begin() + ox + mx * ppm, ppm, std::uint8_t{1});
				}
			}
	}
	return out;
}

// Nearest-neighbour resample so a document scan matches the sheet raster.
inline RgbImage fit_to_raster(const RgbImage& doc, int width, int height)
{
	if (doc.width() == width && doc.height() == height)
		return doc;
	RgbImage out(width, height, kWhite);
	if (doc.empty())
		return out;
	for (int y = 0; y < height; ++y) {
		const int sy = std::min(doc.height() - 1, static_cast<int>(static_cast<long long>(y) * doc.height() / height));
		for (int x = 0; x < width; ++x) {
			const int sx = std::min(doc.width() - 1, static_cast<int>(static_cast<long long>(x) * doc.width() / width));
			out(x, y) = doc(sx, sy);
		}
	}
	return out;
}

struct PrintJob
{
	CmyImage cmy;
	IrLayer ir;
	Layout layout;
	std::size_t symbol_count = 0; // codes actually printed, a prefix of layout.placements
};

// Document separated to CMY (blank sheet when `doc` is empty) plus the IR layer.
inline PrintJob make_print_job(const RgbImage& doc, const Layout& layout, std::span<const qr::QrMatrix> symbols,
							   int density_percent, double dpi = 300.0)
{
	auto ir = compose_ir_layer(layout, symbols, density_percent, dpi);
	RgbImage page = doc.empty() ? RgbImage(ir.width(), ir.height(), kWhite) : fit_to_raster(doc, ir.width(), ir.height());
	page.dpi = dpi;
	return {rgb_to_cmy(page), std::move(ir), layout, symbols.size()};
}

} // namespace irmark

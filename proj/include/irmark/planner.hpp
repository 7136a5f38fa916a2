/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Sheet layout and capacity planning for grids of identical QR codes.
//
// Every code carries its own quiet zone, so a grid cell is
// (side + 2 * quiet) modules wide and neighbouring quiet zones never share
// space. Codes are packed in a centered rectangular grid with no extra margin.

#include "error.hpp"
#include "qr/tables.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace irmark {

// Printer dot pitch at 300 dpi; printable module sizes are multiples of it.
inline constexpr double kDotPitchMm = 25.4 / 300.0;

inline double quantize_up(double mm, double pitch = kDotPitchMm)
{
	return std::ceil(mm / pitch - 1e-6) * pitch;
}

inline double quantize_down(double mm, double pitch = kDotPitchMm)
{
	return std::floor(mm / pitch + 1e-6) * pitch;
}

enum class SheetPreset { Letter, HalfLetter, Custom };

struct SheetSpec
{
	SheetPreset preset = SheetPreset::Custom;
	double width_mm = 0;
	double height_mm = 0;

	static SheetSpec letter() { return {SheetPreset::Letter, 215.9, 279.4}; }
	static SheetSpec half_letter() { return {SheetPreset::HalfLetter, 139.7, 215.9}; }
	static SheetSpec custom(double w, double h)
	{
		if (!(w > 0 && h > 0))
			throw ValidationError("sheet dimensions must be positive");
		return {SheetPreset::Custom, w, h};
	}

	std::string name() const
	{
		switch (preset) {
		case SheetPreset::Letter: return "letter";
		case SheetPreset::HalfLetter: return "half-letter";
		case SheetPreset::Custom: break;
		}
		return "custom";
	}
	friend bool operator==(const SheetSpec&, const SheetSpec&) = default;
};

inline SheetSpec parse_sheet(const std::string& name)
{
	if (name == "letter") return SheetSpec::letter();
	if (name == "half-letter" || name == "halfletter" || name == "half_letter") return SheetSpec::half_letter();
	throw ValidationError("unknown sheet '" + name + "' (expected letter or half-letter)");
}

struct RectMm
{
	double x = 0, y = 0, width = 0, height = 0;
	friend bool operator==(const RectMm&, const RectMm&) = default;
};

struct Placement
{
	double x_mm = 0; // top-left corner of the symbol itself (quiet zone excluded)
	double y_mm = 0;
	friend bool operator==(const Placement&, const Placement&) = default;
};

struct Layout
{
	SheetSpec sheet;
	qr::Version version;
	qr::Ecc ecc = qr::Ecc::L;
	double module_mm = 0;
	int quiet_modules = 4;
	int cols = 0;
	int rows = 0;
	std::vector<Placement> placements; // row-major

	double code_mm() const { return version.side() * module_mm; }
	double cell_mm() const { return (version.side() + 2 * quiet_modules) * module_mm; }
	std::size_t count() const { return placements.size(); }
	int per_code_chars() const { return qr::byte_capacity(version, ecc); }
	friend bool operator==(const Layout&, const Layout&) = default;
};

inline Layout grid_fit(const SheetSpec& sheet, qr::Version version, double module_mm, int quiet_modules = 4,
					   qr::Ecc ecc = qr::Ecc::L)
{
	if (!(module_mm > 0))
		throw ValidationError("module size must be positive");
	if (quiet_modules < 0)
		throw ValidationError("quiet zone cannot be negative");
	Layout out{sheet, version, ecc, module_mm, quiet_modules, 0, 0, {}};
	const double cell = out.cell_mm();
	// Tolerance absorbs floating error when the cells tile the sheet exactly.
	out.cols = static_cast<int>(std::floor(sheet.width_mm / cell + 1e-9));
	out.rows = static_cast<int>(std::floor(sheet.height_mm / cell + 1e-9));
	if (out.cols == 0 || out.rows == 0) {
		out.cols = out.rows = 0;
		return out;
	}
	const double x0 = (sheet.width_mm - out.cols * cell) / 2 + quiet_modules * module_mm;
	const double y0 = (sheet.height_mm - out.rows * cell) / 2 + quiet_modules * module_mm;
	for (int r = 0; r < out.rows; ++r)
		for (int c = 0; c < out.cols; ++c)
			out.placements.push_back({x0 + c * cell, y0 + r * cell});
	return out;
}

struct CapacityPlan
{
	Layout layout;
	int per_code_chars = 0;
	int total_chars = 0;

	qr::Version version() const { return layout.version; }
	std::size_t codes() const { return layout.count(); }
};

inline CapacityPlan plan_for(const Layout& layout)
{
	const int per = layout.per_code_chars();
	return {layout, per, per * static_cast<int>(layout.count())};
}

// Best single-size grid over versions 1..7 at the given minimum module size
// (rounded up to the printable grid). Ties go to the lower version.
inline CapacityPlan max_capacity(const SheetSpec& sheet, qr::Ecc ecc, double min_module_mm, int quiet_modules = 4)
{
	if (!(min_module_mm > 0))
		throw ValidationError("minimum module size must be positive");
	const double module = quantize_up(min_module_mm);
	std::optional<CapacityPlan> best;
	for (int v = qr::kMinVersion; v <= qr::kMaxVersion; ++v) {
		auto plan = plan_for(grid_fit(sheet, qr::Version(v), module, quiet_modules, ecc));
		if (!best || plan.total_chars > best->total_chars)
			best = std::move(plan);
	}
	return *best;
}

// Smallest detectable module sizes measured per sheet size, ink density and
// ECC level, with the capacities reported alongside them.
struct DetectabilityEntry
{
	SheetPreset sheet;
	int ink_percent;
	qr::Ecc ecc;
	double smallest_mm;
	int reported_chars;
};

inline const std::vector<DetectabilityEntry>& detectability_table()
{
	using qr::Ecc;
	static const std::vector<DetectabilityEntry> table = {
		{SheetPreset::Letter, 81, Ecc::L, 1.27, 1800},     {SheetPreset::Letter, 81, Ecc::M, 1.18, 1600},
		{SheetPreset::Letter, 81, Ecc::H, 1.18, 800},      {SheetPreset::Letter, 102, Ecc::L, 1.18, 2040},
		{SheetPreset::Letter, 102, Ecc::M, 1.18, 1600},    {SheetPreset::Letter, 102, Ecc::H, 1.10, 1080},
		{SheetPreset::Letter, 155, Ecc::L, 1.18, 2040},    {SheetPreset::Letter, 155, Ecc::M, 1.18, 1600},
		{SheetPreset::Letter, 155, Ecc::H, 1.10, 1080},    {SheetPreset::HalfLetter, 81, Ecc::L, 1.27, 900},
		{SheetPreset::HalfLetter, 81, Ecc::M, 0.93, 1224}, {SheetPreset::HalfLetter, 81, Ecc::H, 0.93, 648},
		{SheetPreset::HalfLetter, 102, Ecc::L, 1.01, 1224}, {SheetPreset::HalfLetter, 102, Ecc::M, 0.93, 1224},
		{SheetPreset::HalfLetter, 102, Ecc::H, 0.93, 648}, {SheetPreset::HalfLetter, 155, Ecc::L, 0.93, 1560},
		{SheetPreset::HalfLetter, 155, Ecc::M, 0.93, 1224}, {SheetPreset::HalfLetter, 155, Ecc::H, 0.93, 648},
	};
	return table;
}

inline const DetectabilityEntry& detectability(SheetPreset sheet, int ink_percent, qr::Ecc ecc)
{
	for (const auto& e : detectability_table())
		if (e.sheet == sheet && e.ink_percent == ink_percent && e.ecc == ecc)
			return e;
	throw ValidationError("no measured module size for this sheet/ink/ECC combination");
}

inline double smallest_module(SheetPreset sheet, int ink_percent, qr::Ecc ecc)
{
	return detectability(sheet, ink_percent, ecc).smallest_mm;
}

struct CapacityTableRow
{
	std::string sheet;
	int ink_percent;
	qr::Ecc ecc;
	double smallest_mm;
	int version;
	int codes;
	int chars;
	int reported_chars;
	double delta_pct;
};

inline std::vector<CapacityTableRow> capacity_table()
{
	std::vector<CapacityTableRow> rows;
	for (const auto& e : detectability_table()) {
		const auto sheet = e.sheet == SheetPreset::Letter ? SheetSpec::letter() : SheetSpec::half_letter();
		const auto plan = max_capacity(sheet, e.ecc, e.smallest_mm);
		const double delta = 100.0 * (plan.total_chars - e.reported_chars) / e.reported_chars;
		rows.push_back({sheet.name(), e.ink_percent, e.ecc, e.smallest_mm, plan.version().value,
						static_cast<int>(plan.codes()), plan.total_chars, e.reported_chars, delta});
	}
	return rows;
}

// One code, as large as the printable grid allows, centered in `rect`.
inline Layout custom_region_layout(const SheetSpec& sheet, const RectMm& rect, qr::Version version, qr::Ecc ecc,
								   double min_module_mm, int quiet_modules = 4)
{
	constexpr double eps = 1e-9;
	if (!(rect.width > 0 && rect.height > 0) || rect.x < -eps || rect.y < -eps ||
		rect.x + rect.width > sheet.width_mm + eps || rect.y + rect.height > sheet.height_mm + eps)
		throw ValidationError("region must be non-empty and inside the sheet");
	const int cell_modules = version.side() + 2 * quiet_modules;
	const double module = quantize_down(std::min(rect.width, rect.height) / cell_modules);
	if (module + 1e-9 < min_module_mm || module <= 0)
		throw ValidationError("region too small for a version " + std::to_string(version.value) +
							  " code at the minimum module size");
	Layout out{sheet, version, ecc, module, quiet_modules, 1, 1, {}};
	const double code = out.code_mm();
	out.placements.push_back({rect.x + (rect.width - code) / 2, rect.y + (rect.height - code) / 2});
	return out;
}

} // namespace irmark

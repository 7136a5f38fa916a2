/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Module grid of a QR symbol plus the fixed structures every symbol shares:
// finder/timing/alignment patterns, format and version information, masks.

#include "../image.hpp"
#include "tables.hpp"

#include <bit>
#include <cstdint>
#include <optional>

namespace irmark::qr {

using ModuleGrid = Grid<std::uint8_t>; // 1 = dark module

struct QrMatrix
{
	Version version;
	Ecc ecc = Ecc::L;
	int mask = 0;
	ModuleGrid modules;

	int side() const noexcept { return version.side(); }
	bool dark(int x, int y) const noexcept { return modules(x, y) != 0; }
};

// 15-bit format word (already XORed with the standard mask 0x5412).
inline std::uint32_t format_bits(Ecc e, int mask)
{
	const std::uint32_t data = (static_cast<std::uint32_t>(ecc_format_bits(e)) << 3) | static_cast<std::uint32_t>(mask);
	std::uint32_t rem = data;
	for (int i = 0; i < 10; ++i)
		rem = (rem << 1) ^ ((rem >> 9) * 0x537);
	return ((data << 10) | rem) ^ 0x5412;
}

// 18-bit version word for v >= 7.
inline std::uint32_t version_bits(int version)
{
	std::uint32_t rem = static_cast<std::uint32_t>(version);
	for (int i = 0; i < 12; ++i)
		rem = (rem << 1) ^ ((rem >> 11) * 0x1F25);
	return (static_cast<std::uint32_t>(version) << 12) | rem;
}

struct FormatInfo
{
	Ecc ecc;
	int mask;
	int distance; // Hamming distance of the best match
};

// Nearest valid format word; nullopt beyond the correctable distance (3).
inline std::optional<FormatInfo> decode_format(std::uint32_t raw)
{
	std::optional<FormatInfo> best;
	for (int bits = 0; bits < 4; ++bits)
		for (int mask = 0; mask < 8; ++mask) {
			const auto e = ecc_from_format_bits(bits);
			const int d = std::popcount(format_bits(e, mask) ^ raw);
			if (!best || d < best->distance)
				best = FormatInfo{e, mask, d};
		}
	if (best && best->distance > 3)
		return std::nullopt;
	return best;
}

inline std::optional<int> decode_version_bits(std::uint32_t raw)
{
	int best = -1, best_d = 99;
	for (int v = 7; v <= 40; ++v) {
		const int d = std::popcount(version_bits(v) ^ raw);
		if (d < best_d) {
			best_d = d;
			best = v;
		}
	}
	if (best_d > 3)
		return std::nullopt;
	return best;
}

inline bool mask_bit(int mask, int x, int y)
{
	switch (mask) {
	case 0: return (x + y) % 2 == 0;
	case 1: return y % 2 == 0;
	case 2: return x % 3 == 0;
	case 3: return (x + y) % 3 == 0;
	case 4: return (x / 3 + y / 2) % 2 == 0;
	case 5: return x * y % 2 + x * y % 3 == 0;
	case 6: return (x * y % 2 + x * y % 3) % 2 == 0;
	case 7: return ((x + y) % 2 + x * y % 3) % 2 == 0;
	}
	throw ValidationError("mask id must be in 0..7");
}

// Positions of the 15 format bits, bit i (LSB = 0) in copy A and copy B.
struct FormatPositions
{
	std::array<std::pair<int, int>, 15> a, b; // (x, y)
};

inline FormatPositions format_positions(int side)
{
	FormatPositions p;
	for (int i = 0; i <= 5; ++i) p.a[i] = {8, i};
	p.a[6] = {8, 7};
	p.a[7] = {8, 8};
	p.a[8] = {7, 8};
	for (int i = 9; i < 15; ++i) p.a[i] = {14 - i, 8};
	for (int i = 0; i < 8; ++i) p.b[i] = {side - 1 - i, 8};
	for (int i = 8; i < 15; ++i) p.b[i] = {8, side - 15 + i};
	return p;
}

// Positions of the 18 version bits in the two copies (x, y).
inline std::array<std::array<std::pair<int, int>, 18>, 2> version_positions(int side)
{
	std::array<std::array<std::pair<int, int>, 18>, 2> p{};
	for (int i = 0; i < 18; ++i) {
		const int a = side - 11 + i % 3, b = i / 3;
		p[0][i] = {a, b}; // top-right block
		p[1][i] = {b, a}; // bottom-left block
	}
	return p;
}

// Symbol template: function patterns drawn, plus a map of reserved cells.
struct FunctionLayout
{
	ModuleGrid modules;
	ModuleGrid reserved; // 1 = not a data module
};

namespace detail {

inline void set_module(FunctionLayout& f, int x, int y, bool dark)
{
	f.modules(x, y) = dark ? 1 : 0;
	f.reserved(x, y) = 1;
}

inline void draw_finder(FunctionLayout& f, int cx, int cy)
{
	const int side = f.modules.width();
	for (int dy = -4; dy <= 4; ++dy)
		for (int dx = -4; dx <= 4; ++dx) {
			const int x = cx + dx, y = cy + dy;
			if (x < 0 || y < 0 || x >= side || y >= side)
				continue;
			const int dist = std::max(std::abs(dx), std::abs(dy));
			set_module(f, x, y, dist != 2 && dist != 4);
		}
}

inline void draw_alignment(FunctionLayout& f, int cx, int cy)
{
	for (int dy = -2; dy <= 2; ++dy)
		for (int dx = -2; dx <= 2; ++dx)
			set_module(f, cx + dx, cy + dy, std::max(std::abs(dx), std::abs(dy)) != 1);
}

} // namespace detail

// Everything but data and the format bits' values (format cells are
// reserved and left light; `apply_format` fills them in).
inline FunctionLayout function_layout(Version v)
{
	const int side = v.side();
	FunctionLayout f{ModuleGrid(side, side, 0), ModuleGrid(side, side, 0)};

	for (int i = 0; i < side; ++i) {
		detail::set_module(f, 6, i, i % 2 == 0);
		detail::set_module(f, i, 6, i % 2 == 0);
	}
	detail::draw_finder(f, 3, 3);
	detail::draw_finder(f, side - 4, 3);
	detail::draw_finder(f, 3, side - 4);

	const auto pos = alignment_positions(v);
	const int n = static_cast<int>(pos.size());
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j) {
			if ((i == 0 && j == 0) || (i == 0 && j == n - 1) || (i == n - 1 && j == 0))
				continue;
			detail::draw_alignment(f, pos[i], pos[j]);
		}

	const auto fp = format_positions(side);
	for (int i = 0; i < 15; ++i) {
		detail::set_module(f, fp.a[i].first, fp.a[i].second, false);
		detail::set_module(f, fp.b[i].first, fp.b[i].second, false);
	}
	detail::set_module(f, 8, side - 8, true); // dark module

	if (v.value >= 7) {
		const auto bits = version_bits(v.value);
		for (const auto& copy : version_positions(side))
			for (int i = 0; i < 18; ++i)
				detail::set_module(f, copy[i].first, copy[i].second, (bits >> i) & 1);
	}
	return f;
}

inline void apply_format(ModuleGrid& m, Ecc e, int mask)
{
	const auto bits = format_bits(e, mask);
	const auto fp = format_positions(m.width());
	for (int i = 0; i < 15; ++i) {
		const std::uint8_t bit = (bits >> i) & 1;
		m(fp.a[i].first, fp.a[i].second) = bit;
		m(fp.b[i].first, fp.b[i].second) = bit;
	}
	m(8, m.width() - 8) = 1;
}

// Data module visiting order: upward/downward two-column zigzag from the
// bottom-right corner, skipping the vertical timing column.
inline std::vector<std::pair<int, int>> data_module_order(const FunctionLayout& f)
{
	const int side = f.modules.width();
	std::vector<std::pair<int, int>> order;
	for (int right = side - 1; right >= 1; right -= 2) {
		if (right == 6)
			right = 5;
		const bool upward = ((right + 1) & 2) == 0;
		for (int vert = 0; vert < side; ++vert) {
			for (int j = 0; j < 2; ++j) {
				const int x = right - j;
				const int y = upward ? side - 1 - vert : vert;
				if (!f.reserved(x, y))
					order.emplace_back(x, y);
			}
		}
	}
	return order;
}

} // namespace irmark::qr

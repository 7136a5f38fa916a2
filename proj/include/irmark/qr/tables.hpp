/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Symbol geometry and block structure for QR versions 1..7.

#include "../error.hpp"

#include <array>
#include <string>
#include <vector>

namespace irmark::qr {

inline constexpr int kMinVersion = 1;
inline constexpr int kMaxVersion = 7;

enum class Ecc { L = 0, M = 1, Q = 2, H = 3 };
inline constexpr std::array<Ecc, 4> kAllEcc{Ecc::L, Ecc::M, Ecc::Q, Ecc::H};

enum class Mode { Numeric, Alphanumeric, Byte };

inline char ecc_name(Ecc e) { return "LMQH"[static_cast<int>(e)]; }

inline Ecc parse_ecc(const std::string& s)
{
	if (s == "L" || s == "l") return Ecc::L;
	if (s == "M" || s == "m") return Ecc::M;
	if (s == "Q" || s == "q") return Ecc::Q;
	if (s == "H" || s == "h") return Ecc::H;
	throw ValidationError("unknown ECC level '" + s + "'");
}

// The two format bits the standard assigns to each level.
inline int ecc_format_bits(Ecc e)
{
	static constexpr int bits[4] = {1, 0, 3, 2};
	return bits[static_cast<int>(e)];
}

inline Ecc ecc_from_format_bits(int bits)
{
	static constexpr Ecc levels[4] = {Ecc::M, Ecc::L, Ecc::H, Ecc::Q};
	return levels[bits & 3];
}

struct Version
{
	int value = 1;

	constexpr Version() = default;
	constexpr explicit Version(int v) : value(v)
	{
		if (v < kMinVersion || v > kMaxVersion)
			throw ValidationError("QR version must be in 1..7");
	}
	constexpr int side() const noexcept { return 17 + 4 * value; }
	friend constexpr bool operator==(Version, Version) = default;
	friend constexpr auto operator<=>(Version, Version) = default;
};

inline bool is_valid_side(int side) { return side >= 21 && side <= 45 && (side - 17) % 4 == 0; }

inline Version version_from_side(int side)
{
	if (!is_valid_side(side))
		throw ValidationError("grid side " + std::to_string(side) + " is not a version 1..7 symbol");
	return Version((side - 17) / 4);
}

// Alignment pattern center coordinates (row/column) for each version.
inline std::vector<int> alignment_positions(Version v)
{
	static const std::array<std::vector<int>, 8> table{{{}, {}, {6, 18}, {6, 22}, {6, 26}, {6, 30}, {6, 34}, {6, 22, 38}}};
	return table[v.value];
}

namespace detail {
// [ecc][version]
inline constexpr int kEccPerBlock[4][8] = {
	{0, 7, 10, 15, 20, 26, 18, 20},
	{0, 10, 16, 26, 18, 24, 16, 18},
	{0, 13, 22, 18, 26, 18, 24, 18},
	{0, 17, 28, 22, 16, 22, 28, 26},
};
inline constexpr int kNumBlocks[4][8] = {
	{0, 1, 1, 1, 1, 1, 2, 2},
	{0, 1, 1, 1, 2, 2, 4, 4},
	{0, 1, 1, 2, 2, 4, 4, 6},
	{0, 1, 1, 2, 4, 4, 4, 5},
};
} // namespace detail

// Modules available for codewords (everything but function patterns and
// format/version information), counted from the symbol geometry.
inline int raw_data_modules(Version v)
{
	const int side = v.side();
	int n = side * side;
	n -= 3 * 64;                  // finders + separators
	n -= 2 * (side - 16);         // timing rows/cols between separators
	n -= 31;                      // format info (2 x 15) + dark module
	const auto pos = alignment_positions(v);
	if (!pos.empty()) {
		const int k = static_cast<int>(pos.size());
		const int patterns = k * k - 3;
		n -= patterns * 25;
		n += 2 * (k - 2) * 5;     // alignment overlap with timing patterns
	}
	if (v.value >= 7)
		n -= 36;                  // two version-information blocks
	return n;
}

inline int total_codewords(Version v) { return raw_data_modules(v) / 8; }

struct BlockLayout
{
	int total_codewords = 0;
	int ecc_per_block = 0;
	int num_blocks = 0;
	int short_blocks = 0;         // blocks carrying short_data_len data bytes
	int short_data_len = 0;       // remaining blocks carry one more

	int data_codewords() const { return total_codewords - ecc_per_block * num_blocks; }
	int data_len(int block) const { return short_data_len + (block >= short_blocks ? 1 : 0); }
};

inline BlockLayout block_layout(Version v, Ecc e)
{
	BlockLayout b;
	b.total_codewords = total_codewords(v);
	b.ecc_per_block = detail::kEccPerBlock[static_cast<int>(e)][v.value];
	b.num_blocks = detail::kNumBlocks[static_cast<int>(e)][v.value];
	const int short_block_len = b.total_codewords / b.num_blocks;
	b.short_blocks = b.num_blocks - b.total_codewords % b.num_blocks;
	b.short_data_len = short_block_len - b.ecc_per_block;
	return b;
}

inline int data_capacity_bits(Version v, Ecc e) { return block_layout(v, e).data_codewords() * 8; }

inline int char_count_bits(Mode m)
{
	// Versions 1..9 only.
	switch (m) {
	case Mode::Numeric: return 10;
	case Mode::Alphanumeric: return 9;
	case Mode::Byte: return 8;
	}
	return 8;
}

// Maximum characters in a single segment, derived from codeword arithmetic.
inline int computed_capacity(Version v, Ecc e, Mode m)
{
	const int bits = data_capacity_bits(v, e) - 4 - char_count_bits(m);
	if (bits <= 0)
		return 0;
	switch (m) {
	case Mode::Byte: return bits / 8;
	case Mode::Alphanumeric: return bits / 11 * 2 + (bits % 11 >= 6 ? 1 : 0);
	case Mode::Numeric: {
		const int rem = bits % 10;
		return bits / 10 * 3 + (rem >= 7 ? 2 : rem >= 4 ? 1 : 0);
	}
	}
	return 0;
}

namespace detail {
// Published character capacities, [version][ecc], for byte / alnum / numeric.
inline constexpr int kByteCapacity[8][4] = {
	{0, 0, 0, 0}, {17, 14, 11, 7}, {32, 26, 20, 14}, {53, 42, 32, 24},
	{78, 62, 46, 34}, {106, 84, 60, 44}, {134, 106, 74, 58}, {154, 122, 86, 64},
};
inline constexpr int kAlnumCapacity[8][4] = {
	{0, 0, 0, 0}, {25, 20, 16, 10}, {47, 38, 29, 20}, {77, 61, 47, 35},
	{114, 90, 67, 50}, {154, 122, 87, 64}, {195, 154, 108, 84}, {224, 178, 125, 93},
};
inline constexpr int kNumericCapacity[8][4] = {
	{0, 0, 0, 0}, {41, 34, 27, 17}, {77, 63, 48, 34}, {127, 101, 77, 58},
	{187, 149, 111, 82}, {255, 202, 144, 106}, {322, 255, 178, 139}, {370, 293, 207, 154},
};

// Cross-checks the embedded tables against the codeword arithmetic once.
inline bool validate_tables()
{
	for (int v = kMinVersion; v <= kMaxVersion; ++v)
		for (auto e : kAllEcc) {
			const int i = static_cast<int>(e);
			if (kByteCapacity[v][i] != computed_capacity(Version(v), e, Mode::Byte) ||
				kAlnumCapacity[v][i] != computed_capacity(Version(v), e, Mode::Alphanumeric) ||
				kNumericCapacity[v][i] != computed_capacity(Version(v), e, Mode::Numeric))
				return false;
		}
	return true;
}

inline const bool kTablesValid = [] {
	if (!validate_tables())
		throw std::logic_error("QR capacity tables disagree with codeword arithmetic");
	return true;
}();
} // namespace detail

inline int capacity(Version v, Ecc e, Mode m)
{
	const int i = static_cast<int>(e);
	switch (m) {
	case Mode::Byte: return detail::kByteCapacity[v.value][i];
	case Mode::Alphanumeric: return detail::kAlnumCapacity[v.value][i];
	case Mode::Numeric: return detail::kNumericCapacity[v.value][i];
	}
	return 0;
}

inline int byte_capacity(Version v, Ecc e) { return capacity(v, e, Mode::Byte); }

} // namespace irmark::qr

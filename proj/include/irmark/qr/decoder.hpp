/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../error.hpp"
#include "encoder.hpp"
#include "reed_solomon.hpp"
#include "symbol.hpp"

namespace irmark::qr {

struct BlockDiagnostic
{
	int index = 0;
	int data_len = 0;
	int ecc_len = 0;
	int corrected = 0; // -1 when the block could not be corrected
};

class DecodeError : public Error
{
public:
	DecodeError(const std::string& message, std::vector<BlockDiagnostic> blocks = {})
		: Error("decode", message), blocks_(std::move(blocks))
	{}
	const std::vector<BlockDiagnostic>& blocks() const noexcept { return blocks_; }

private:
	std::vector<BlockDiagnostic> blocks_;
};

struct Decoded
{
	std::vector<std::uint8_t> payload;
	Version version;
	Ecc ecc = Ecc::L;
	int mask = 0;
	int corrected = 0; // total symbols fixed by RS
	std::vector<BlockDiagnostic> blocks;

	std::string text() const { return {payload.begin(), payload.end()}; }
};

inline std::optional<FormatInfo> read_format(const ModuleGrid& grid)
{
	const auto fp = format_positions(grid.width());
	std::uint32_t a = 0, b = 0;
	for (int i = 0; i < 15; ++i) {
		a |= static_cast<std::uint32_t>(grid(fp.a[i].first, fp.a[i].second) & 1) << i;
		b |= static_cast<std::uint32_t>(grid(fp.b[i].first, fp.b[i].second) & 1) << i;
	}
	auto fa = decode_format(a);
	auto fb = decode_format(b);
	if (fa && fb)
		return fa->distance <= fb->distance ? fa : fb;
	return fa ? fa : fb;
}

// Version encoded in the version-information blocks (v >= 7 symbols).
inline std::optional<int> read_version_info(const ModuleGrid& grid)
{
	std::optional<int> best;
	for (const auto& copy : version_positions(grid.width())) {
		std::uint32_t raw = 0;
		for (int i = 0; i < 18; ++i)
			raw |= static_cast<std::uint32_t>(grid(copy[i].first, copy[i].second) & 1) << i;
		if (auto v = decode_version_bits(raw); v && (!best || *v == (grid.width() - 17) / 4))
			best = v;
	}
	return best;
}

namespace detail {

class BitReader
{
public:
	explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
	std::size_t remaining() const noexcept { return bytes_.size() * 8 - pos_; }
	std::uint32_t read(int n)
	{
		if (static_cast<std::size_t>(n) > remaining())
			throw DecodeError("segment runs past end of data");
		std::uint32_t v = 0;
		for (int i = 0; i < n; ++i, ++pos_)
			v = (v << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1);
		return v;
	}
	std::size_t position() const noexcept { return pos_; }

private:
	std::span<const std::uint8_t> bytes_;
	std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> parse_segments(std::span<const std::uint8_t> data)
{
	BitReader in(data);
	std::vector<std::uint8_t> out;
	while (true) {
		if (in.remaining() < 4) {
			if (in.remaining() > 0 && in.read(static_cast<int>(in.remaining())) != 0)
				throw DecodeError("non-zero trailing bits");
			break;
		}
		const auto mode = in.read(4);
		if (mode == 0)
			break;
		Mode m;
		switch (mode) {
		case 0x1: m = Mode::Numeric; break;
		case 0x2: m = Mode::Alphanumeric; break;
		case 0x4: m = Mode::Byte; break;
		default: throw DecodeError("unsupported segment mode " + std::to_string(mode));
		}
		std::size_t count = in.read(char_count_bits(m));
		switch (m) {
		case Mode::Byte:
			for (std::size_t i = 0; i < count; ++i)
				out.push_back(static_cast<std::uint8_t>(in.read(8)));
			break;
		case Mode::Numeric:
			while (count > 0) {
				const std::size_t n = std::min<std::size_t>(3, count);
				const auto v = in.read(static_cast<int>(n * 3 + 1));
				if (v >= (n == 3 ? 1000u : n == 2 ? 100u : 10u))
					throw DecodeError("numeric group out of range");
				const auto digits = std::to_string(v + (n == 3 ? 1000 : n == 2 ? 100 : 10)).substr(1);
				out.insert(out.end(), digits.begin(), digits.end());
				count -= n;
			}
			break;
		case Mode::Alphanumeric:
			while (count >= 2) {
				const auto v = in.read(11);
				if (v >= 45 * 45)
					throw DecodeError("alphanumeric pair out of range");
				out.push_back(static_cast<std::uint8_t>(kAlphanumericCharset[v / 45]));
				out.push_back(static_cast<std::uint8_t>(kAlphanumericCharset[v % 45]));
				count -= 2;
			}
			if (count == 1) {
				const auto v = in.read(6);
				if (v >= 45)
					throw DecodeError("alphanumeric char out of range");
				out.push_back(static_cast<std::uint8_t>(kAlphanumericCharset[v]));
			}
			break;
		}
	}

	// After the terminator: zero bits to the byte boundary, then alternating pad bytes.
	const std::size_t pos = in.position();
	const std::size_t fill = (8 - pos % 8) % 8;
	if (fill > 0 && fill <= in.remaining() && in.read(static_cast<int>(fill)) != 0)
		throw DecodeError("non-zero bits after terminator");
	std::uint8_t expect = 0xEC;
	for (std::size_t i = (in.position() + 7) / 8; i < data.size(); ++i, expect ^= 0xEC ^ 0x11)
		if (data[i] != expect)
			throw DecodeError("malformed padding");
	return out;
}

} // namespace detail

// Decodes an upright, unmirrored module grid (1 = dark).
inline Decoded decode(const ModuleGrid& grid)
{
	if (grid.width() != grid.height() || !is_valid_side(grid.width()))
		throw DecodeError("grid is not a version 1..7 symbol");
	const Version v = version_from_side(grid.width());

	const auto format = read_format(grid);
	if (!format)
		throw DecodeError("unreadable format information");
	if (v.value >= 7) {
		const auto info = read_version_info(grid);
		if (!info || *info != v.value)
			throw DecodeError("version information disagrees with symbol size");
	}

	const auto layout = function_layout(v);
	const auto order = data_module_order(layout);
	const auto blocks_layout = block_layout(v, format->ecc);
	std::vector<std::uint8_t> raw(static_cast<std::size_t>(blocks_layout.total_codewords), 0);
	for (std::size_t i = 0; i < raw.size() * 8; ++i) {
		const auto [x, y] = order[i];
		std::uint8_t bit = grid(x, y) & 1;
		if (mask_bit(format->mask, x, y))
			bit ^= 1;
		raw[i / 8] |= static_cast<std::uint8_t>(bit << (7 - i % 8));
	}

	// De-interleave: data columns first (short blocks skip the last one), then parity.
	const int nb = blocks_layout.num_blocks;
	std::vector<std::vector<std::uint8_t>> blocks(nb);
	std::size_t k = 0;
	for (int i = 0; i <= blocks_layout.short_data_len; ++i)
		for (int b = 0; b < nb; ++b)
			if (i < blocks_layout.data_len(b))
				blocks[b].push_back(raw[k++]);
	for (int i = 0; i < blocks_layout.ecc_per_block; ++i)
		for (int b = 0; b < nb; ++b)
			blocks[b].push_back(raw[k++]);

	Decoded out;
	out.version = v;
	out.ecc = format->ecc;
	out.mask = format->mask;
	std::vector<std::uint8_t> data;
	bool failed = false;
	for (int b = 0; b < nb; ++b) {
		BlockDiagnostic d{b, blocks_layout.data_len(b), blocks_layout.ecc_per_block, 0};
		const auto fixed = rs::correct(blocks[b], blocks_layout.ecc_per_block);
		if (!fixed) {
			d.corrected = -1;
			failed = true;
		} else {
			d.corrected = *fixed;
			out.corrected += *fixed;
		}
		out.blocks.push_back(d);
		data.insert(data.end(), blocks[b].begin(), blocks[b].begin() + d.data_len);
	}
	if (failed)
		throw DecodeError("Reed-Solomon correction failed", out.blocks);

	out.payload = detail::parse_segments(data);
	return out;
}

inline Decoded decode(const QrMatrix& m) { return decode(m.modules); }

} // namespace irmark::qr

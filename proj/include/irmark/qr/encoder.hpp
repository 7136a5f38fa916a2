/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../error.hpp"
#include "reed_solomon.hpp"
#include "symbol.hpp"

#include <span>
#include <string_view>

namespace irmark::qr {

class BitBuffer
{
public:
	void append(std::uint32_t value, int bits)
	{
		for (int i = bits - 1; i >= 0; --i)
			bits_.push_back((value >> i) & 1);
	}
	std::size_t size() const noexcept { return bits_.size(); }
	std::vector<std::uint8_t> to_bytes() const
	{
		std::vector<std::uint8_t> out((bits_.size() + 7) / 8, 0);
		for (std::size_t i = 0; i < bits_.size(); ++i)
			out[i / 8] |= static_cast<std::uint8_t>(bits_[i] << (7 - i % 8));
		return out;
	}

private:
	std::vector<std::uint8_t> bits_;
};

inline constexpr std::string_view kAlphanumericCharset = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ $%*+-./:";

inline int mode_indicator(Mode m)
{
	switch (m) {
	case Mode::Numeric: return 0x1;
	case Mode::Alphanumeric: return 0x2;
	case Mode::Byte: return 0x4;
	}
	return 0x4;
}

// Appends one segment (mode indicator, count, payload bits) to `bb`.
inline void append_segment(BitBuffer& bb, Mode mode, std::span<const std::uint8_t> data)
{
	bb.append(mode_indicator(mode), 4);
	bb.append(static_cast<std::uint32_t>(data.size()), char_count_bits(mode));
	switch (mode) {
	case Mode::Byte:
		for (auto b : data)
			bb.append(b, 8);
		break;
	case Mode::Numeric:
		for (std::size_t i = 0; i < data.size(); i += 3) {
			const std::size_t n = std::min<std::size_t>(3, data.size() - i);
			std::uint32_t v = 0;
			for (std::size_t j = 0; j < n; ++j) {
				if (data[i + j] < '0' || data[i + j] > '9')
					throw ValidationError("non-digit in numeric segment");
				v = v * 10 + (data[i + j] - '0');
			}
			bb.append(v, static_cast<int>(n * 3 + 1));
		}
		break;
	case Mode::Alphanumeric: {
		auto index = [](std::uint8_t c) {
			const auto p = kAlphanumericCharset.find(static_cast<char>(c));
			if (p == std::string_view::npos)
				throw ValidationError("character outside the alphanumeric set");
			return static_cast<std::uint32_t>(p);
		};
		std::size_t i = 0;
		for (; i + 1 < data.size(); i += 2)
			bb.append(index(data[i]) * 45 + index(data[i + 1]), 11);
		if (i < data.size())
			bb.append(index(data[i]), 6);
		break;
	}
	}
}

// Splits data codewords into blocks, appends per-block parity and
// interleaves everything into final symbol order.
inline std::vector<std::uint8_t> add_ecc_and_interleave(std::span<const std::uint8_t> data, Version v, Ecc e)
{
	const auto layout = block_layout(v, e);
	if (static_cast<int>(data.size()) != layout.data_codewords())
		throw std::logic_error("data codeword count mismatch");

	std::vector<std::vector<std::uint8_t>> blocks;
	std::size_t k = 0;
	for (int b = 0; b < layout.num_blocks; ++b) {
		const int len = layout.data_len(b);
		std::vector<std::uint8_t> block(data.begin() + k, data.begin() + k + len);
		k += len;
		auto parity = rs::encode(block, layout.ecc_per_block);
		if (b < layout.short_blocks)
			block.push_back(0); // placeholder keeps columns aligned
		block.insert(block.end(), parity.begin(), parity.end());
		blocks.push_back(std::move(block));
	}

	std::vector<std::uint8_t> out;
	const std::size_t width = blocks.front().size();
	for (std::size_t i = 0; i < width; ++i)
		for (int b = 0; b < layout.num_blocks; ++b)
			if (i != static_cast<std::size_t>(layout.short_data_len) || b >= layout.short_blocks)
				out.push_back(blocks[b][i]);
	return out;
}

// Penalty score of a finished grid, per the four standard rules.
inline long penalty_score(const ModuleGrid& m)
{
	const int side = m.width();
	long score = 0;

	auto line_penalty = [&](auto at) {
		long s = 0;
		for (int a = 0; a < side; ++a) {
			int run = 1;
			for (int b = 1; b <= side; ++b) {
				if (b < side && at(a, b) == at(a, b - 1)) {
					++run;
					continue;
				}
				if (run >= 5)
					s += 3 + (run - 5);
				run = 1;
			}
			// 1:1:3:1:1 with four light modules on one side; outside counts as light.
			for (int b = -4; b < side; ++b) {
				auto cell = [&](int i) { return (i < 0 || i >= side) ? 0 : at(a, i); };
				static constexpr int pat[7] = {1, 0, 1, 1, 1, 0, 1};
				bool core = true;
				for (int i = 0; i < 7 && core; ++i)
					core = cell(b + i) == pat[i];
				if (!core)
					continue;
				bool before = true, after = true;
				for (int i = 1; i <= 4; ++i) {
					before = before && cell(b - i) == 0;
					after = after && cell(b + 6 + i) == 0;
				}
				s += 40 * ((before ? 1 : 0) + (after ? 1 : 0));
			}
		}
		return s;
	};
	score += line_penalty([&](int row, int col) { return m(col, row); });
	score += line_penalty([&](int col, int row) { return m(col, row); });

	for (int y = 0; y + 1 < side; ++y)
		for (int x = 0; x + 1 < side; ++x) {
			const auto c = m(x, y);
			if (c == m(x + 1, y) && c == m(x, y + 1) && c == m(x + 1, y + 1))
				score += 3;
		}

	long dark = 0;
	for (auto v : m.data())
		dark += v;
	const long total = static_cast<long>(side) * side;
	const long k = (std::abs(dark * 20 - total * 10) + total - 1) / total - 1;
	score += std::max(0L, k) * 10;
	return score;
}

// Lays out the codewords with the given mask; also used to rebuild a symbol
// for each candidate mask.
inline ModuleGrid place_codewords(const FunctionLayout& f, std::span<const std::uint8_t> codewords, int mask)
{
	ModuleGrid m = f.modules;
	const auto order = data_module_order(f);
	for (std::size_t i = 0; i < order.size(); ++i) {
		const auto [x, y] = order[i];
		std::uint8_t bit = 0;
		if (i / 8 < codewords.size())
			bit = (codewords[i / 8] >> (7 - i % 8)) & 1;
		if (mask_bit(mask, x, y))
			bit ^= 1;
		m(x, y) = bit;
	}
	return m;
}

struct EncodeOptions
{
	Mode mode = Mode::Byte;
	int mask = -1; // -1 picks the lowest-penalty mask
};

inline QrMatrix encode(std::span<const std::uint8_t> payload, Version v, Ecc e, EncodeOptions opt = {})
{
	const int cap = capacity(v, e, opt.mode);
	if (static_cast<int>(payload.size()) > cap)
		throw CapacityError(payload.size(), static_cast<std::size_t>(cap));
	if (opt.mask < -1 || opt.mask > 7)
		throw ValidationError("mask id must be in 0..7");

	BitBuffer bb;
	append_segment(bb, opt.mode, payload);
	const std::size_t capacity_bits = static_cast<std::size_t>(data_capacity_bits(v, e));
	bb.append(0, static_cast<int>(std::min<std::size_t>(4, capacity_bits - bb.size())));
	bb.append(0, static_cast<int>((8 - bb.size() % 8) % 8));
	auto data = bb.to_bytes();
	for (std::uint8_t pad = 0xEC; data.size() * 8 < capacity_bits; pad ^= 0xEC ^ 0x11)
		data.push_back(pad);

	const auto codewords = add_ecc_and_interleave(data, v, e);
	const auto layout = function_layout(v);

	QrMatrix out{v, e, 0, {}};
	long best = -1;
	for (int mask = 0; mask < 8; ++mask) {
		if (opt.mask >= 0 && mask != opt.mask)
			continue;
		auto grid = place_codewords(layout, codewords, mask);
		apply_format(grid, e, mask);
		const long p = penalty_score(grid);
		if (best < 0 || p < best) {
			best = p;
			out.mask = mask;
			out.modules = std::move(grid);
		}
	}
	return out;
}

inline QrMatrix encode(std::string_view text, Version v, Ecc e, EncodeOptions opt = {})
{
	return encode(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()), v, e, opt);
}

} // namespace irmark::qr

/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Arithmetic in GF(2^8) with the QR field polynomial x^8+x^4+x^3+x^2+1
// (0x11D) and primitive element 2.

#include <array>
#include <cstdint>
#include <stdexcept>

namespace irmark::qr::gf256 {

inline constexpr unsigned kPrimitive = 0x11D;

struct Tables
{
	std::array<std::uint8_t, 512> exp{}; // doubled so exp[log a + log b] needs no modulo
	std::array<std::uint8_t, 256> log{}; // log[0] is unused
};

inline constexpr Tables make_tables()
{
	Tables t;
	unsigned x = 1;
	for (int i = 0; i < 255; ++i) {
		t.exp[i] = static_cast<std::uint8_t>(x);
		t.log[x] = static_cast<std::uint8_t>(i);
		x <<= 1;
		if (x & 0x100)
			x ^= kPrimitive;
	}
	for (int i = 255; i < 512; ++i)
		t.exp[i] = t.exp[i - 255];
	return t;
}

inline constexpr Tables kTables = make_tables();

inline constexpr std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

inline constexpr std::uint8_t mul(std::uint8_t a, std::uint8_t b)
{
	if (a == 0 || b == 0)
		return 0;
	return kTables.exp[kTables.log[a] + kTables.log[b]];
}

inline constexpr std::uint8_t div(std::uint8_t a, std::uint8_t b)
{
	if (b == 0)
		throw std::domain_error("GF(256) division by zero");
	if (a == 0)
		return 0;
	return kTables.exp[kTables.log[a] + 255 - kTables.log[b]];
}

inline constexpr std::uint8_t inv(std::uint8_t a) { return div(1, a); }

// 2^n for any integer n (negative allowed).
inline constexpr std::uint8_t exp2(int n)
{
	n %= 255;
	if (n < 0)
		n += 255;
	return kTables.exp[n];
}

inline constexpr std::uint8_t pow(std::uint8_t a, int n)
{
	if (a == 0)
		return n == 0 ? 1 : 0;
	return exp2(static_cast<int>(kTables.log[a]) * n);
}

} // namespace irmark::qr::gf256

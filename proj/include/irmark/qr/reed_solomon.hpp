/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Systematic Reed-Solomon over GF(256), generator roots 2^0 .. 2^(nsym-1).
// Codewords are stored highest-degree coefficient first (data, then parity),
// which is the order QR symbols place them in.

#include "../error.hpp"
#include "gf256.hpp"

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

namespace irmark::qr::rs {

// Generator polynomial, highest degree first; the leading 1 is included.
inline std::vector<std::uint8_t> generator(int nsym)
{
	std::vector<std::uint8_t> g{1};
	for (int i = 0; i < nsym; ++i) {
		std::vector<std::uint8_t> next(g.size() + 1, 0);
		const auto root = gf256::exp2(i);
		for (std::size_t j = 0; j < g.size(); ++j) {
			next[j] ^= g[j];
			next[j + 1] ^= gf256::mul(g[j], root);
		}
		g = std::move(next);
	}
	return g;
}

inline void check_params(std::size_t data_len, int nsym)
{
	if (nsym < 1)
		throw ValidationError("Reed-Solomon needs at least one parity symbol");
	if (data_len + static_cast<std::size_t>(nsym) > 255)
		throw ValidationError("Reed-Solomon codeword longer than 255 symbols");
}

// Parity bytes for `data`.
inline std::vector<std::uint8_t> encode(std::span<const std::uint8_t> data, int nsym)
{
	check_params(data.size(), nsym);
	const auto g = generator(nsym);
	std::vector<std::uint8_t> rem(nsym, 0);
	for (auto byte : data) {
		const auto factor = static_cast<std::uint8_t>(byte ^ rem.front());
		rem.erase(rem.begin());
		rem.push_back(0);
		for (int j = 0; j < nsym; ++j)
			rem[j] ^= gf256::mul(g[j + 1], factor);
	}
	return rem;
}

inline std::vector<std::uint8_t> syndromes(std::span<const std::uint8_t> codeword, int nsym)
{
	std::vector<std::uint8_t> s(nsym, 0);
	for (int j = 0; j < nsym; ++j) {
		const auto x = gf256::exp2(j);
		std::uint8_t acc = 0;
		for (auto c : codeword)
			acc = gf256::mul(acc, x) ^ c;
		s[j] = acc;
	}
	return s;
}

namespace detail {

// Evaluates a lowest-degree-first polynomial.
inline std::uint8_t eval_low_first(const std::vector<std::uint8_t>& p, std::uint8_t x)
{
	std::uint8_t acc = 0;
	for (auto it = p.rbegin(); it != p.rend(); ++it)
		acc = gf256::mul(acc, x) ^ *it;
	return acc;
}

} // namespace detail

// Corrects `codeword` (data followed by nsym parity bytes) in place. Returns
// the number of corrected symbols, or nullopt when the errors exceed what
// the code can fix; the buffer is left untouched on failure.
inline std::optional<int> correct(std::span<std::uint8_t> codeword, int nsym)
{
	if (nsym < 1 || codeword.size() > 255 || codeword.size() <= static_cast<std::size_t>(nsym))
		throw ValidationError("invalid Reed-Solomon codeword geometry");

	const auto s = syndromes(codeword, nsym);
	if (std::all_of(s.begin(), s.end(), [](auto v) { return v == 0; }))
		return 0;

	// Berlekamp-Massey; polynomials lowest degree first.
	std::vector<std::uint8_t> lambda{1}, prev{1};
	int len = 0, shift = 1;
	std::uint8_t prev_disc = 1;
	for (int n = 0; n < nsym; ++n) {
		std::uint8_t d = s[n];
		for (int i = 1; i <= len && i < static_cast<int>(lambda.size()); ++i)
			d ^= gf256::mul(lambda[i], s[n - i]);
		if (d == 0) {
			++shift;
			continue;
		}
		auto update = lambda;
		const auto coef = gf256::div(d, prev_disc);
		if (update.size() < prev.size() + shift)
			update.resize(prev.size() + shift, 0);
		for (std::size_t i = 0; i < prev.size(); ++i)
			update[i + shift] ^= gf256::mul(coef, prev[i]);
		if (2 * len <= n) {
			prev = std::move(lambda);
			len = n + 1 - len;
			prev_disc = d;
			shift = 1;
		} else {
			++shift;
		}
		lambda = std::move(update);
	}
	while (lambda.size() > 1 && lambda.back() == 0)
		lambda.pop_back();
	const int degree = static_cast<int>(lambda.size()) - 1;
	if (degree != len || 2 * degree > nsym)
		return std::nullopt;

	// Chien search over valid positions only.
	const int n = static_cast<int>(codeword.size());
	std::vector<int> positions;
	for (int i = 0; i < n; ++i) {
		const int power = n - 1 - i;
		if (detail::eval_low_first(lambda, gf256::exp2(-power)) == 0)
			positions.push_back(i);
	}
	if (static_cast<int>(positions.size()) != degree)
		return std::nullopt;

	// Forney: omega = S * lambda mod x^nsym.
	std::vector<std::uint8_t> omega(nsym, 0);
	for (int i = 0; i < nsym; ++i)
		for (int j = 0; j < static_cast<int>(lambda.size()) && i + j < nsym; ++j)
			omega[i + j] ^= gf256::mul(s[i], lambda[j]);
	std::vector<std::uint8_t> dlambda;
	for (std::size_t j = 1; j < lambda.size(); ++j)
		dlambda.push_back((j % 2) ? lambda[j] : 0);

	std::vector<std::uint8_t> fixed(codeword.begin(), codeword.end());
	for (int pos : positions) {
		const int power = n - 1 - pos;
		const auto x = gf256::exp2(power);
		const auto x_inv = gf256::exp2(-power);
		const auto denom = detail::eval_low_first(dlambda, x_inv);
		if (denom == 0)
			return std::nullopt;
		fixed[pos] ^= gf256::mul(x, gf256::div(detail::eval_low_first(omega, x_inv), denom));
	}

	const auto check = syndromes(fixed, nsym);
	if (!std::all_of(check.begin(), check.end(), [](auto v) { return v == 0; }))
		return std::nullopt;
	std::copy(fixed.begin(), fixed.end(), codeword.begin());
	return degree;
}

} // namespace irmark::qr::rs

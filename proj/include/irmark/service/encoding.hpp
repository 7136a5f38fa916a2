/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// SHA-256 and base64 via OpenSSL libcrypto.

#include "../error.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace irmark::service {

inline std::string sha256_hex(std::span<const std::uint8_t> bytes)
{
	unsigned char digest[SHA256_DIGEST_LENGTH];
	SHA256(bytes.data(), bytes.size(), digest);
	static constexpr char kHex[] = "0123456789abcdef";
	std::string out;
	out.reserve(2 * SHA256_DIGEST_LENGTH);
	for (unsigned char c : digest) {
		out += kHex[c >> 4];
		out += kHex[c & 15];
	}
	return out;
}

inline bool is_sha256_hex(std::string_view s)
{
	if (s.size() != 64)
		return false;
	for (char c : s)
		if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')))
			return false;
	return true;
}

inline std::string base64_encode(std::span<const std::uint8_t> bytes)
{
	std::string out(4 * ((bytes.size() + 2) / 3), '\0');
	const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
	out.resize(static_cast<std::size_t>(n));
	return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view s)
{
	if (s.size() % 4 != 0)
		throw ValidationError("base64 length must be a multiple of 4");
	std::vector<std::uint8_t> out(3 * s.size() / 4);
	const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(s.data()), static_cast<int>(s.size()));
	if (n < 0)
		throw ValidationError("invalid base64");
	// EVP_DecodeBlock keeps the zero bytes that padding stands for.
	std::size_t pad = 0;
	if (!s.empty() && s.back() == '=')
		pad = s.size() >= 2 && s[s.size() - 2] == '=' ? 2 : 1;
	out.resize(static_cast<std::size_t>(n) - pad);
	return out;
}

} // namespace irmark::service

/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "../payload.hpp"
#include "../qr/decoder.hpp"
#include "binarize.hpp"
#include "detector.hpp"

namespace irmark::reader {

struct ReadParams
{
	BinarizeParams binarize;
	std::vector<Binarizer> binarizers = default_binarizers();
};

struct ReadFragment
{
	DecodedFragment fragment;
	std::string binarizer; // strategy that produced it
	qr::Version version;
	qr::Ecc ecc = qr::Ecc::L;
	int corrected = 0;
	std::array<Point, 4> corners;
};

// Detects and fully decodes every symbol in one binary image. Only symbols
// that pass error correction and segment parsing are returned.
inline std::vector<ReadFragment> read_binary(const BinaryImage& b, const std::string& binarizer = {})
{
	std::vector<ReadFragment> out;
	scan_codes(b, [&](const DetectedCode& d) {
		try {
			const auto dec = qr::decode(d.grid);
			out.push_back({{dec.payload, d.center.x, d.center.y, d.height_px()},
						   binarizer,
						   dec.version,
						   dec.ecc,
						   dec.corrected,
						   d.corners});
			return true;
		} catch (const Error&) {
			return false;
		}
	});
	return out;
}

// Runs every binarizer, decodes on each result and merges the fragments.
// Two fragments closer than half a code height are the same code; the first
// binarizer's copy is kept.
inline std::vector<ReadFragment> read_sheet(const GrayImage& img, const ReadParams& params = {})
{
	params.binarize.validate();
	std::vector<ReadFragment> out;
	for (const auto& bin : params.binarizers) {
		for (auto& f : read_binary(bin.run(img, params.binarize), bin.name)) {
			const Point c{f.fragment.center_x, f.fragment.center_y};
			const bool dup = std::any_of(out.begin(), out.end(), [&](const ReadFragment& o) {
				const double half = std::max(o.fragment.code_height_px, f.fragment.code_height_px) / 2;
				return distance(c, {o.fragment.center_x, o.fragment.center_y}) < half;
			});
			if (!dup)
				out.push_back(std::move(f));
		}
	}
	return out;
}

inline std::vector<DecodedFragment> fragments(const std::vector<ReadFragment>& r)
{
	std::vector<DecodedFragment> out;
	for (const auto& f : r)
		out.push_back(f.fragment);
	return out;
}

} // namespace irmark::reader

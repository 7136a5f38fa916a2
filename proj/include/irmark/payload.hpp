/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Payload handling for both embedding modes.
//
// Offline: text is split greedily across the codes of a plan in row-major
// grid order and recovered by concatenating decoded codes in reading order.
// There are no per-chunk headers, so a missed code shortens the result.
//
// Online: each tracked region gets a short `ip1:<bundle>/<region>` pointer
// and the frames live in a content bundle served over HTTP.

#include "error.hpp"
#include "image.hpp"
#include "planner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace irmark {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return {s.begin(), s.end()}; }
inline std::string to_string(const Bytes& b) { return {b.begin(), b.end()}; }

struct Chunk
{
	int grid_index = 0;
	Bytes bytes;
	friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkSet
{
	std::vector<Chunk> chunks;
	int per_code_capacity = 0;
	Layout layout; // the plan's layout trimmed to the codes actually used
};

inline ChunkSet chunk(std::span<const std::uint8_t> payload, const CapacityPlan& plan)
{
	const std::size_t available = static_cast<std::size_t>(plan.total_chars);
	if (payload.size() > available)
		throw CapacityError(payload.size(), available);
	ChunkSet out;
	out.per_code_capacity = plan.per_code_chars;
	out.layout = plan.layout;
	const std::size_t per = static_cast<std::size_t>(plan.per_code_chars);
	for (std::size_t off = 0, i = 0; off < payload.size(); off += per, ++i) {
		const std::size_t n = std::min(per, payload.size() - off);
		out.chunks.push_back({static_cast<int>(i), Bytes(payload.begin() + off, payload.begin() + off + n)});
	}
	out.layout.placements.resize(out.chunks.size());
	return out;
}

struct DecodedFragment
{
	Bytes bytes;
	double center_x = 0;
	double center_y = 0;
	double code_height_px = 0;
	friend bool operator==(const DecodedFragment&, const DecodedFragment&) = default;
};

// Reading order: rows by center y (a new row starts once y exceeds the row's
// first center by half the median code height), then x within a row.
inline std::vector<DecodedFragment> reading_order(std::vector<DecodedFragment> frags)
{
	if (frags.empty())
		return frags;
	std::vector<double> heights;
	for (const auto& f : frags)
		heights.push_back(f.code_height_px);
	std::nth_element(heights.begin(), heights.begin() + heights.size() / 2, heights.end());
	const double tolerance = 0.5 * heights[heights.size() / 2];

	auto by_y = [](const DecodedFragment& a, const DecodedFragment& b) {
		return std::tie(a.center_y, a.center_x, a.bytes) < std::tie(b.center_y, b.center_x, b.bytes);
	};
	std::sort(frags.begin(), frags.end(), by_y);

	std::vector<DecodedFragment> out;
	std::size_t row_begin = 0;
	for (std::size_t i = 1; i <= frags.size(); ++i) {
		if (i < frags.size() && frags[i].center_y - frags[row_begin].center_y <= tolerance)
			continue;
		std::sort(frags.begin() + row_begin, frags.begin() + i, [](const auto& a, const auto& b) {
			return std::tie(a.center_x, a.center_y, a.bytes) < std::tie(b.center_x, b.center_y, b.bytes);
		});
		out.insert(out.end(), frags.begin() + row_begin, frags.begin() + i);
		row_begin = i;
	}
	return out;
}

inline Bytes assemble(const std::vector<DecodedFragment>& frags)
{
	Bytes out;
	for (const auto& f : reading_order(frags))
		out.insert(out.end(), f.bytes.begin(), f.bytes.end());
	return out;
}

// Corner-feature density of a region, 0..100. Computed from the region's own
// pixels only, so the score does not depend on where the region sits.
inline constexpr double kTrackableScore = 75.0;

inline double trackability_score(const GrayImage& img, const Rect& rect)
{
	if (!rect.inside(img.width(), img.height()))
		throw ValidationError("region outside image bounds");
	if (rect.width <= 4 || rect.height <= 4)
		return 0.0;

	const int w = rect.width, h = rect.height;
	auto px = [&](int x, int y) {
		return img(rect.x + std::clamp(x, 0, w - 1), rect.y + std::clamp(y, 0, h - 1)) / 255.0;
	};
	Grid<float> gxx(w, h), gyy(w, h), gxy(w, h);
	for (int y = 0; y < h; ++y)
		for (int x = 0; x < w; ++x) {
			const double gx = (px(x + 1, y) - px(x - 1, y)) / 2;
			const double gy = (px(x, y + 1) - px(x, y - 1)) / 2;
			gxx(x, y) = static_cast<float>(gx * gx);
			gyy(x, y) = static_cast<float>(gy * gy);
			gxy(x, y) = static_cast<float>(gx * gy);
		}

	// Shi-Tomasi response over 3x3 windows.
	Grid<float> response(w, h, 0.f);
	for (int y = 1; y + 1 < h; ++y)
		for (int x = 1; x + 1 < w; ++x) {
			double a = 0, b = 0, c = 0;
			for (int dy = -1; dy <= 1; ++dy)
				for (int dx = -1; dx <= 1; ++dx) {
					a += gxx(x + dx, y + dy);
					b += gxy(x + dx, y + dy);
					c += gyy(x + dx, y + dy);
				}
			response(x, y) = static_cast<float>((a + c) / 2 - std::sqrt((a - c) * (a - c) / 4 + b * b));
		}

	constexpr float kMinResponse = 0.05f;
	constexpr double kFullDensity = 0.004; // corners per pixel that earn a full score
	long corners = 0;
	for (int y = 1; y + 1 < h; ++y)
		for (int x = 1; x + 1 < w; ++x) {
			const float r = response(x, y);
			if (r < kMinResponse)
				continue;
			bool peak = true;
			for (int dy = -1; dy <= 1 && peak; ++dy)
				for (int dx = -1; dx <= 1 && peak; ++dx) {
					if (dx == 0 && dy == 0)
						continue;
					const float o = response(x + dx, y + dy);
					// Strict on one side so plateaus count exactly once.
					peak = (dy < 0 || (dy == 0 && dx < 0)) ? r > o : r >= o;
				}
			corners += peak ? 1 : 0;
		}
	const double density = static_cast<double>(corners) / (static_cast<double>(w) * h);
	return std::min(100.0, 100.0 * density / kFullDensity);
}

enum class FrameKind { Text, Image, Audio };

inline std::string frame_kind_name(FrameKind k)
{
	switch (k) {
	case FrameKind::Text: return "text";
	case FrameKind::Image: return "image";
	case FrameKind::Audio: return "audio";
	}
	return "text";
}

inline FrameKind parse_frame_kind(const std::string& s)
{
	if (s == "text") return FrameKind::Text;
	if (s == "image") return FrameKind::Image;
	if (s == "audio") return FrameKind::Audio;
	throw ValidationError("unknown frame kind '" + s + "'");
}

struct ContentFrame
{
	FrameKind kind = FrameKind::Text;
	std::string value; // text body or asset reference
	friend bool operator==(const ContentFrame&, const ContentFrame&) = default;
};

struct TrackedRegion
{
	Rect rect;
	double score = 0;
	std::vector<ContentFrame> frames;
	friend bool operator==(const TrackedRegion&, const TrackedRegion&) = default;
};

struct OfflinePayload
{
	Bytes text;
};

struct OnlinePayload
{
	std::string resource_id;
	std::vector<TrackedRegion> tracked_regions;
};

using PayloadSpec = std::variant<OfflinePayload, OnlinePayload>;

struct ContentBundle
{
	std::string id;
	std::map<int, std::vector<ContentFrame>> frames; // region index -> frames
	friend bool operator==(const ContentBundle&, const ContentBundle&) = default;
};

struct OnlineDescriptor
{
	ContentBundle bundle;
	std::vector<std::string> payloads; // one per region, in region order
};

class RegionRejected : public Error
{
public:
	explicit RegionRejected(std::vector<int> regions)
		: Error("untrackable", describe(regions)), regions_(std::move(regions))
	{}
	const std::vector<int>& regions() const noexcept { return regions_; }

private:
	static std::string describe(const std::vector<int>& r)
	{
		std::string s = "regions not trackable enough (score below 75), choose a different area:";
		for (int i : r)
			s += " " + std::to_string(i);
		return s;
	}
	std::vector<int> regions_;
};

inline constexpr std::string_view kOnlineScheme = "ip1:";

inline std::string online_payload(const std::string& bundle_id, int region)
{
	return std::string(kOnlineScheme) + bundle_id + "/" + std::to_string(region);
}

struct OnlinePointer
{
	std::string bundle_id;
	int region = 0;
};

inline std::optional<OnlinePointer> parse_online_payload(std::string_view s)
{
	if (!s.starts_with(kOnlineScheme))
		return std::nullopt;
	s.remove_prefix(kOnlineScheme.size());
	const auto slash = s.rfind('/');
	if (slash == std::string_view::npos || slash == 0 || slash + 1 == s.size())
		return std::nullopt;
	int region = 0;
	for (char c : s.substr(slash + 1)) {
		if (c < '0' || c > '9')
			return std::nullopt;
		region = region * 10 + (c - '0');
	}
	return OnlinePointer{std::string(s.substr(0, slash)), region};
}

inline OnlineDescriptor build_online_descriptor(const std::string& bundle_id, const std::vector<TrackedRegion>& regions)
{
	if (bundle_id.empty() || bundle_id.find('/') != std::string::npos)
		throw ValidationError("bundle id must be non-empty and contain no '/'");
	if (regions.empty())
		throw ValidationError("online mode needs at least one tracked region");
	std::vector<int> rejected;
	for (std::size_t i = 0; i < regions.size(); ++i)
		if (regions[i].score < kTrackableScore)
			rejected.push_back(static_cast<int>(i));
	if (!rejected.empty())
		throw RegionRejected(rejected);

	OnlineDescriptor out;
	out.bundle.id = bundle_id;
	for (std::size_t i = 0; i < regions.size(); ++i) {
		if (regions[i].frames.empty())
			throw ValidationError("region " + std::to_string(i) + " has no frames");
		out.bundle.frames[static_cast<int>(i)] = regions[i].frames;
		out.payloads.push_back(online_payload(bundle_id, static_cast<int>(i)));
	}
	return out;
}

} // namespace irmark

/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// QR symbol localization on a binary image: finder-pattern scanlines, finder
// triplet grouping, alignment-pattern search and perspective sampling.

#include "../geometry.hpp"
#include "../image.hpp"
#include "../qr/symbol.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <optional>
#include <vector>

namespace irmark::reader {

struct FinderCandidate
{
	Point center;
	double module = 0; // estimated module size, px
	int hits = 0;
};

struct DetectedCode
{
	qr::ModuleGrid grid;
	Point center;
	std::array<Point, 4> corners; // symbol corners TL, TR, BR, BL in image px
	double confidence = 0;        // timing-pattern agreement, 0..1
	Homography module_to_image;

	int side() const { return grid.width(); }
	// Mean length of the symbol's left and right edges.
	double height_px() const { return (distance(corners[0], corners[3]) + distance(corners[1], corners[2])) / 2; }
};

namespace detail {

// 1:1:3:1:1 with each run within 40% of its expected length.
inline bool finder_ratio(const std::array<int, 5>& runs, double& module)
{
	int total = 0;
	for (int r : runs) {
		if (r == 0)
			return false;
		total += r;
	}
	if (total < 7)
		return false;
	module = total / 7.0;
	static constexpr std::array<double, 5> kExpect{1, 1, 3, 1, 1};
	for (int i = 0; i < 5; ++i)
		if (std::abs(runs[i] - kExpect[i] * module) > 0.4 * kExpect[i] * module + 0.5)
			return false;
	return true;
}

// Runs along a line through (x, y) in direction (dx, dy), centered on a dark
// run that contains (x, y). Returns the center offset along the line.
inline std::optional<double> cross_check(const BinaryImage& b, int x, int y, int dx, int dy, int max_run,
										 double& module)
{
	auto dark = [&](int i) {
		const int px = x + i * dx, py = y + i * dy;
		return b.contains(px, py) && b(px, py) == 1;
	};
	auto inside = [&](int i) { return b.contains(x + i * dx, y + i * dy); };
	if (!dark(0))
		return std::nullopt;
	std::array<int, 5> runs{};
	int i = 0;
	while (inside(i) && dark(i) && runs[2] <= max_run) {
		++runs[2];
		--i;
	}
	while (inside(i) && !dark(i) && runs[1] <= max_run) {
		++runs[1];
		--i;
	}
	while (inside(i) && dark(i) && runs[0] <= max_run) {
		++runs[0];
		--i;
	}
	int j = 1;
	while (inside(j) && dark(j) && runs[2] <= max_run) {
		++runs[2];
		++j;
	}
	const int center_end = j;
	while (inside(j) && !dark(j) && runs[3] <= max_run) {
		++runs[3];
		++j;
	}
	while (inside(j) && dark(j) && runs[4] <= max_run) {
		++runs[4];
		++j;
	}
	if (!finder_ratio(runs, module))
		return std::nullopt;
	return center_end - runs[2] / 2.0;
}

inline void merge_candidate(std::vector<FinderCandidate>& found, Point c, double module)
{
	for (auto& f : found)
		if (distance(f.center, c) < 1.5 * std::max(module, f.module) &&
			std::max(module, f.module) < 1.4 * std::min(module, f.module)) {
			const double n = f.hits;
			f.center = (1.0 / (n + 1)) * (n * f.center + c);
			f.module = (n * f.module + module) / (n + 1);
			++f.hits;
			return;
		}
	found.push_back({c, module, 1});
}

// Row scan of `b` for finder candidates confirmed along the column through
// the center run. The confirming column then re-centers the row check; when
// that fails the original row measurement stands.
inline void scan_rows(const BinaryImage& b, bool transposed, std::vector<FinderCandidate>& found)
{
	std::vector<std::array<int, 3>> runs; // start, length, dark
	for (int y = 0; y < b.height(); ++y) {
		runs.clear();
		const auto row = b.row(y);
		for (int x = 0; x < b.width();) {
			int e = x;
			while (e < b.width() && row[e] == row[x])
				++e;
			runs.push_back({x, e - x, row[x]});
			x = e;
		}
		for (std::size_t i = 0; i + 4 < runs.size(); ++i) {
			if (runs[i][2] != 1)
				continue;
			std::array<int, 5> r{runs[i][1], runs[i + 1][1], runs[i + 2][1], runs[i + 3][1], runs[i + 4][1]};
			double hm = 0;
			if (!finder_ratio(r, hm))
				continue;
			const int cx = runs[i + 2][0] + runs[i + 2][1] / 2;
			const int max_run = static_cast<int>(std::ceil(hm * 5));
			double vm = 0;
			const auto oy = cross_check(b, cx, y, 0, 1, max_run, vm);
			if (!oy || std::max(vm, hm) > 1.4 * std::min(vm, hm))
				continue;
			const int cy = y + static_cast<int>(std::floor(*oy));
			double hm2 = 0;
			Point c{runs[i + 2][0] + runs[i + 2][1] / 2.0, y + *oy};
			if (const auto ox = cross_check(b, cx, cy, 1, 0, max_run, hm2);
				ox && std::max(vm, hm2) <= 1.4 * std::min(vm, hm2)) {
				c.x = cx + *ox;
				hm = hm2;
			}
			const double module = (vm + hm) / 2;
			merge_candidate(found, transposed ? Point{c.y, c.x} : c, module);
		}
	}
}

inline BinaryImage transpose(const BinaryImage& b)
{
	BinaryImage t(b.height(), b.width());
	for (int y = 0; y < b.height(); ++y)
		for (int x = 0; x < b.width(); ++x)
			t(y, x) = b(x, y);
	return t;
}

} // namespace detail

// Finder patterns found by row and by column scans; a candidate needs at
// least two confirming scanlines.
inline std::vector<FinderCandidate> find_finders(const BinaryImage& b)
{
	std::vector<FinderCandidate> found;
	detail::scan_rows(b, false, found);
	detail::scan_rows(detail::transpose(b), true, found);
	std::erase_if(found, [](const FinderCandidate& f) { return f.hits < 2; });
	return found;
}

struct FinderTriplet
{
	std::array<int, 3> index; // into the candidate list: TL, TR, BL
	int side = 0;             // estimated symbol side in modules
	double score = 0;         // geometric defect, lower is better
};

// Plausible symbol hypotheses, best first. Each triplet's corner is the
// candidate opposite the longest side; TR and BL follow QR orientation.
inline std::vector<FinderTriplet> group_finders(const std::vector<FinderCandidate>& f)
{
	std::vector<FinderTriplet> out;
	const int n = static_cast<int>(f.size());
	for (int a = 0; a < n; ++a)
		for (int b = a + 1; b < n; ++b)
			for (int c = b + 1; c < n; ++c) {
				const std::array<int, 3> id{a, b, c};
				const double mmin = std::min({f[a].module, f[b].module, f[c].module});
				const double mmax = std::max({f[a].module, f[b].module, f[c].module});
				if (mmax > 1.5 * mmin)
					continue;
				const double dab = distance(f[a].center, f[b].center), dbc = distance(f[b].center, f[c].center),
							 dca = distance(f[c].center, f[a].center);
				int corner = 2; // opposite ab
				if (dbc >= dab && dbc >= dca)
					corner = 0;
				else if (dca >= dab && dca >= dbc)
					corner = 1;
				int tl = id[corner], tr = id[(corner + 1) % 3], bl = id[(corner + 2) % 3];
				Point u = f[tr].center - f[tl].center, v = f[bl].center - f[tl].center;
				if (cross(u, v) < 0) {
					std::swap(tr, bl);
					std::swap(u, v);
				}
				const double lu = norm(u), lv = norm(v);
				if (std::max(lu, lv) > 1.25 * std::min(lu, lv))
					continue;
				const double cosang = std::abs(dot(u, v)) / (lu * lv);
				if (cosang > 0.25)
					continue;
				const double module = (f[tl].module + f[tr].module + f[bl].module) / 3;
				const double span = (lu + lv) / 2 / module; // side - 7 in modules
				const double side_est = span + 7;
				const int k = static_cast<int>(std::lround((side_est - 17) / 4));
				if (k < qr::kMinVersion || k > qr::kMaxVersion)
					continue;
				const int side = 17 + 4 * k;
				const double off = std::abs(side_est - side);
				if (off > 2.5)
					continue;
				const double score = std::abs(lu - lv) / std::max(lu, lv) + cosang + off / 4 + (mmax - mmin) / mmax;
				out.push_back({{tl, tr, bl}, side, score});
			}
	std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.score < y.score; });
	return out;
}

namespace detail {

inline bool sample_majority(const BinaryImage& b, Point p, int radius)
{
	const int cx = static_cast<int>(std::floor(p.x)), cy = static_cast<int>(std::floor(p.y));
	int dark = 0, total = 0;
	for (int dy = -radius; dy <= radius; ++dy)
		for (int dx = -radius; dx <= radius; ++dx) {
			if (!b.contains(cx + dx, cy + dy))
				continue;
			++total;
			dark += b(cx + dx, cy + dy);
		}
	return total > 0 && 2 * dark > total;
}

// Affine map from module coordinates using the three finder centers.
inline Homography finder_affine(Point tl, Point tr, Point bl, int side)
{
	const double s = side - 7.0;
	const Point ex = (1 / s) * (tr - tl), ey = (1 / s) * (bl - tl);
	const Point o = tl - 3.5 * ex - 3.5 * ey;
	return Homography({ex.x, ey.x, o.x, ex.y, ey.y, o.y, 0, 0, 1});
}

// Center of the 5x5 alignment template near its predicted location: the
// centroid of all positions sharing the best match score.
inline std::optional<Point> find_alignment(const BinaryImage& b, const Homography& affine, int side, double module)
{
	const Point predicted = affine.apply({side - 6.5, side - 6.5});
	const Point o = affine.apply({0, 0});
	const Point ex = affine.apply({1, 0}) - o, ey = affine.apply({0, 1}) - o;
	const int reach = static_cast<int>(std::ceil(4 * module));
	const int r = std::max(0, static_cast<int>(module / 4));
	int best = -1;
	Point sum;
	int ties = 0;
	for (int dy = -reach; dy <= reach; ++dy)
		for (int dx = -reach; dx <= reach; ++dx) {
			const Point c = predicted + Point{static_cast<double>(dx), static_cast<double>(dy)};
			int score = 0;
			for (int j = -2; j <= 2; ++j)
				for (int i = -2; i <= 2; ++i) {
					const bool want = std::max(std::abs(i), std::abs(j)) != 1;
					score += sample_majority(b, c + static_cast<double>(i) * ex + static_cast<double>(j) * ey, r) == want;
				}
			if (score > best) {
				best = score;
				sum = c;
				ties = 1;
			} else if (score == best) {
				sum = sum + c;
				++ties;
			}
		}
	if (best < 23)
		return std::nullopt;
	return (1.0 / ties) * sum;
}

inline double timing_agreement(const qr::ModuleGrid& g)
{
	const int side = g.width();
	int ok = 0, total = 0;
	for (int i = 8; i < side - 8; ++i) {
		const bool want = i % 2 == 0;
		ok += (g(i, 6) == 1) == want;
		ok += (g(6, i) == 1) == want;
		total += 2;
	}
	return total ? static_cast<double>(ok) / total : 0.0;
}

} // namespace detail

// Samples the module grid of a `side`-module symbol through `h`.
inline DetectedCode sample_code(const BinaryImage& b, const Homography& h, int side, double module)
{
	DetectedCode d;
	d.grid = qr::ModuleGrid(side, side, 0);
	const int r = std::max(0, static_cast<int>(module / 4));
	for (int y = 0; y < side; ++y)
		for (int x = 0; x < side; ++x)
			d.grid(x, y) = detail::sample_majority(b, h.apply({x + 0.5, y + 0.5}), r) ? 1 : 0;
	d.module_to_image = h;
	const double s = side;
	d.corners = {h.apply({0, 0}), h.apply({s, 0}), h.apply({s, s}), h.apply({0, s})};
	d.center = h.apply({s / 2, s / 2});
	d.confidence = detail::timing_agreement(d.grid);
	return d;
}

// Sampling hypotheses for one triplet, most likely first: estimated side
// before its neighbours, alignment-corrected perspective before plain affine.
inline std::vector<DetectedCode> hypotheses(const BinaryImage& b, const std::vector<FinderCandidate>& f,
											const FinderTriplet& t)
{
	const Point tl = f[t.index[0]].center, tr = f[t.index[1]].center, bl = f[t.index[2]].center;
	const double module = (f[t.index[0]].module + f[t.index[1]].module + f[t.index[2]].module) / 3;
	std::vector<DetectedCode> out;
	for (int side : {t.side, t.side - 4, t.side + 4}) {
		if (!qr::is_valid_side(side))
			continue;
		const auto affine = detail::finder_affine(tl, tr, bl, side);
		if (side > 21) {
			if (auto al = detail::find_alignment(b, affine, side, module)) {
				const double s = side;
				const std::array<Point, 4> src{Point{3.5, 3.5}, Point{s - 3.5, 3.5}, Point{s - 6.5, s - 6.5},
											   Point{3.5, s - 3.5}};
				const std::array<Point, 4> dst{tl, tr, *al, bl};
				if (auto h = Homography::from_points(src, dst))
					out.push_back(sample_code(b, *h, side, module));
			}
		}
		out.push_back(sample_code(b, affine, side, module));
	}
	std::stable_sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.confidence > y.confidence; });
	return out;
}

// Walks triplets best first and offers each hypothesis to `accept`. A triplet
// whose hypothesis is accepted claims its three finders.
inline void scan_codes(const BinaryImage& b, const std::function<bool(const DetectedCode&)>& accept)
{
	const auto finders = find_finders(b);
	if (finders.size() < 3)
		return;
	std::vector<char> used(finders.size(), 0);
	for (const auto& t : group_finders(finders)) {
		if (used[t.index[0]] || used[t.index[1]] || used[t.index[2]])
			continue;
		for (const auto& h : hypotheses(b, finders, t))
			if (accept(h)) {
				for (int i : t.index)
					used[i] = 1;
				break;
			}
	}
}

inline constexpr double kMinTimingAgreement = 0.8;

// Codes whose sampled timing patterns look right; no decoding involved.
inline std::vector<DetectedCode> detect(const BinaryImage& b)
{
	std::vector<DetectedCode> out;
	scan_codes(b, [&](const DetectedCode& d) {
		if (d.confidence < kMinTimingAgreement)
			return false;
		out.push_back(d);
		return true;
	});
	return out;
}

} // namespace irmark::reader

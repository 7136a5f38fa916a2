/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Classical binarization: CLAHE contrast equalization and Sauvola adaptive
// thresholding. Output convention: 1 = dark (foreground).

#include "../capsim.hpp"
#include "../error.hpp"
#include "../image.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace irmark::reader {

struct BinarizeParams
{
	int clahe_tiles_x = 8;
	int clahe_tiles_y = 8;
	double clahe_clip = 2.0;
	int sauvola_window = 31;
	double sauvola_k = 0.2;
	double sauvola_r = 128.0;
	// Gaussian pre-smoothing before thresholding; 0 disables it.
	double denoise_sigma = 0.0;

	// Settings for captures with `module_px` pixels per module: a window
	// spanning about nine modules, a stronger CLAHE stretch for faint ink,
	// and light smoothing of sensor noise.
	static BinarizeParams for_module_px(double module_px)
	{
		BinarizeParams p;
		const int w = static_cast<int>(std::lround(9 * module_px));
		p.sauvola_window = std::max(31, w | 1);
		p.clahe_clip = 8.0;
		p.denoise_sigma = 1.0;
		return p;
	}

	void validate() const
	{
		if (clahe_tiles_x < 1 || clahe_tiles_y < 1)
			throw ValidationError("CLAHE tile grid must be at least 1x1");
		if (!(clahe_clip >= 1.0))
			throw ValidationError("CLAHE clip limit must be >= 1");
		if (sauvola_window < 3 || sauvola_window % 2 == 0)
			throw ValidationError("Sauvola window must be odd and >= 3");
		if (!(sauvola_r > 0) || sauvola_k < 0 || denoise_sigma < 0)
			throw ValidationError("Sauvola k and R out of range");
	}
};

// Contrast-limited adaptive histogram equalization. Tile mappings are
// blended bilinearly between tile centers.
inline GrayImage clahe(const GrayImage& img, const BinarizeParams& params = {})
{
	params.validate();
	const int w = img.width(), h = img.height();
	const int tx = params.clahe_tiles_x, ty = params.clahe_tiles_y;
	if (w < tx || h < ty)
		throw ValidationError("image smaller than the CLAHE tile grid");

	auto x0 = [&](int i) { return static_cast<int>(static_cast<long long>(i) * w / tx); };
	auto y0 = [&](int j) { return static_cast<int>(static_cast<long long>(j) * h / ty); };

	std::vector<std::array<std::uint8_t, 256>> lut(static_cast<std::size_t>(tx) * ty);
	for (int j = 0; j < ty; ++j)
		for (int i = 0; i < tx; ++i) {
			std::array<long long, 256> hist{};
			for (int y = y0(j); y < y0(j + 1); ++y)
				for (int x = x0(i); x < x0(i + 1); ++x)
					++hist[img(x, y)];
			const long long area = static_cast<long long>(x0(i + 1) - x0(i)) * (y0(j + 1) - y0(j));
			const long long limit = std::max<long long>(1, static_cast<long long>(params.clahe_clip * area / 256));
			long long excess = 0;
			for (auto& c : hist)
				if (c > limit) {
					excess += c - limit;
					c = limit;
				}
			const long long each = excess / 256;
			long long rest = excess % 256;
			for (auto& c : hist)
				c += each;
			if (rest > 0) {
				const long long step = std::max<long long>(1, 256 / rest);
				for (int v = 0; v < 256 && rest > 0; v += static_cast<int>(step), --rest)
					++hist[v];
			}
			auto& l = lut[static_cast<std::size_t>(j) * tx + i];
			long long cdf = 0;
			for (int v = 0; v < 256; ++v) {
				cdf += hist[v];
				l[v] = static_cast<std::uint8_t>(std::min<long long>(255, (cdf * 255 + area / 2) / area));
			}
		}

	GrayImage out(w, h);
	const double tw = static_cast<double>(w) / tx, th = static_cast<double>(h) / ty;
	for (int y = 0; y < h; ++y) {
		const double fy = (y + 0.5) / th - 0.5;
		const int j0 = std::clamp(static_cast<int>(std::floor(fy)), 0, ty - 1);
		const int j1 = std::min(j0 + 1, ty - 1);
		const double ay = std::clamp(fy - j0, 0.0, 1.0);
		for (int x = 0; x < w; ++x) {
			const double fx = (x + 0.5) / tw - 0.5;
			const int i0 = std::clamp(static_cast<int>(std::floor(fx)), 0, tx - 1);
			const int i1 = std::min(i0 + 1, tx - 1);
			const double ax = std::clamp(fx - i0, 0.0, 1.0);
			const std::uint8_t v = img(x, y);
			const double top = lut[j0 * tx + i0][v] * (1 - ax) + lut[j0 * tx + i1][v] * ax;
			const double bot = lut[j1 * tx + i0][v] * (1 - ax) + lut[j1 * tx + i1][v] * ax;
			out(x, y) = static_cast<std::uint8_t>(std::lround(top * (1 - ay) + bot * ay));
		}
	}
	return out;
}

// Sauvola thresholding over a square window clipped at the borders:
// T = m * (1 + k * (s / R - 1)); a pixel below T is foreground.
inline BinaryImage sauvola(const GrayImage& img, const BinarizeParams& params = {})
{
	params.validate();
	const int w = img.width(), h = img.height();

	// Integral images with a zero row and column in front.
	std::vector<double> sum(static_cast<std::size_t>(w + 1) * (h + 1), 0.0), sq(sum.size(), 0.0);
	auto at = [w](int x, int y) { return static_cast<std::size_t>(y) * (w + 1) + x; };
	for (int y = 0; y < h; ++y) {
		double rs = 0, rq = 0;
		for (int x = 0; x < w; ++x) {
			const double v = img(x, y);
			rs += v;
			rq += v * v;
			sum[at(x + 1, y + 1)] = sum[at(x + 1, y)] + rs;
			sq[at(x + 1, y + 1)] = sq[at(x + 1, y)] + rq;
		}
	}

	const int r = params.sauvola_window / 2;
	BinaryImage out(w, h, 0);
	for (int y = 0; y < h; ++y) {
		const int ya = std::max(0, y - r), yb = std::min(h, y + r + 1);
		for (int x = 0; x < w; ++x) {
			const int xa = std::max(0, x - r), xb = std::min(w, x + r + 1);
			const double n = static_cast<double>(xb - xa) * (yb - ya);
			const double s1 = sum[at(xb, yb)] - sum[at(xa, yb)] - sum[at(xb, ya)] + sum[at(xa, ya)];
			const double s2 = sq[at(xb, yb)] - sq[at(xa, yb)] - sq[at(xb, ya)] + sq[at(xa, ya)];
			const double m = s1 / n;
			const double s = std::sqrt(std::max(0.0, s2 / n - m * m));
			const double t = m * (1 + params.sauvola_k * (s / params.sauvola_r - 1));
			out(x, y) = img(x, y) < t ? 1 : 0;
		}
	}
	return out;
}

// Sensor-noise suppression ahead of either binarizer.
inline GrayImage denoise(const GrayImage& img, const BinarizeParams& params)
{
	if (params.denoise_sigma <= 0)
		return img;
	return to_gray8(gaussian_blur(to_float(img), params.denoise_sigma));
}

// A named binarization strategy; the reader runs every configured one.
struct Binarizer
{
	std::string name;
	std::function<BinaryImage(const GrayImage&, const BinarizeParams&)> run;
};

inline Binarizer builtin_binarizer(const std::string& name)
{
	if (name == "sauvola")
		return {name, [](const GrayImage& g, const BinarizeParams& p) { return sauvola(denoise(g, p), p); }};
	if (name == "clahe+sauvola")
		return {name, [](const GrayImage& g, const BinarizeParams& p) { return sauvola(clahe(denoise(g, p), p), p); }};
	throw ValidationError("unknown binarizer '" + name + "'");
}

inline std::vector<Binarizer> default_binarizers()
{
	return {builtin_binarizer("sauvola"), builtin_binarizer("clahe+sauvola")};
}

} // namespace irmark::reader

/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Seeded simulator of a near-infrared capture of a printed sheet.
//
// CMY inks are nearly transparent in the NIR band, so visible content barely
// changes the captured image; IR ink absorbs and shows up dark, more so at
// higher densities. The capture pipeline is: perspective warp, Gaussian
// blur, radial vignette, additive noise, brightness/contrast jitter,
// 8-bit quantization. Output is a pure function of (ideal, params, seed).

#include "error.hpp"
#include "geometry.hpp"
#include "image.hpp"
#include "separation.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace irmark {

struct JitterRanges
{
	double brightness = 0.0; // additive offset drawn from [-b, b]
	double contrast = 0.0;   // gain drawn from [1-c, 1+c]
	double hue = 0.0;        // monochrome sensor: folded into a small gain change
	double saturation = 0.0; // likewise
};

struct CaptureParams
{
	static constexpr int kSchemaVersion = 1;

	double px_per_mm = 600.0 / 215.9; // letter sheet filling a 600 px wide frame
	double margin = 0.0;              // frame border around the sheet, fraction of sheet size

	// Reflectance drop of IR ink per density class (81, 102, 155). Stand-in
	// calibration constants; no radiometric measurements back them.
	std::array<double, 3> contrast{0.10, 0.14, 0.22};
	double background = 0.85;     // paper reflectance in the NIR band
	double cmy_absorbance = 0.02; // largest darkening from full CMY coverage
	double surround = 0.25;       // reflectance outside the sheet

	double blur_sigma = 0.0;      // px
	double noise_sigma = 0.0;     // fraction of full scale
	double vignette_strength = 0.0;
	double perspective = 0.0;     // max corner offset, fraction of frame size
	// Explicit corner offsets (TL, TR, BR, BL) as fractions of the frame;
	// replaces the seeded draw when present.
	std::optional<std::array<Point, 4>> corner_offsets;
	JitterRanges jitter;
	std::uint64_t seed = 0;

	double contrast_for(int density_percent) const
	{
		switch (density_percent) {
		case 81: return contrast[0];
		case 102: return contrast[1];
		case 155: return contrast[2];
		}
		throw ValidationError("IR density must be one of 81, 102, 155");
	}

	void validate() const
	{
		auto in01 = [](double v) { return v >= 0 && v <= 1; };
		if (!(px_per_mm > 0) || margin < 0 || margin > 1)
			throw ValidationError("capture scale and margin must be positive");
		if (!(contrast[0] < contrast[1] && contrast[1] < contrast[2]) || !in01(contrast[0]) || !in01(contrast[2]))
			throw ValidationError("density contrasts must be increasing and in [0,1]");
		if (!in01(background) || !in01(cmy_absorbance) || !in01(surround) || background < contrast[2])
			throw ValidationError("reflectances must be in [0,1]");
		if (blur_sigma < 0 || noise_sigma < 0 || !in01(vignette_strength) || perspective < 0 || perspective > 0.25)
			throw ValidationError("capture degradations out of range");
		if (jitter.brightness < 0 || jitter.contrast < 0 || jitter.contrast >= 1 || jitter.hue < 0 ||
			jitter.saturation < 0)
			throw ValidationError("jitter ranges must be non-negative");
	}

	// Typical capture framing for a sheet at its recommended distance.
	static CaptureParams for_sheet(const SheetSpec& sheet)
	{
		CaptureParams p;
		p.px_per_mm = 600.0 / sheet.width_mm;
		return p;
	}
};

// Reflectance rendering of a print job at its own dpi.
struct IdealImage
{
	FloatImage reflectance;
	double dpi = 300.0;
	double width_mm() const { return reflectance.width() * 25.4 / dpi; }
	double height_mm() const { return reflectance.height() * 25.4 / dpi; }
};

inline IdealImage render_ideal(const PrintJob& job, const CaptureParams& params = {})
{
	if (job.cmy.width() != job.ir.width() || job.cmy.height() != job.ir.height())
		throw ValidationError("CMY and IR layers differ in size");
	const double drop = params.contrast_for(job.ir.density_percent);
	IdealImage out{FloatImage(job.ir.width(), job.ir.height()), job.ir.dpi};
	for (std::size_t i = 0; i < out.reflectance.size(); ++i) {
		const auto c = job.cmy.data()[i];
		const double cmy = (c.c + c.m + c.y) / (3.0 * 255.0);
		double r = params.background - params.cmy_absorbance * cmy;
		if (job.ir.coverage.data()[i])
			r -= drop;
		out.reflectance.data()[i] = static_cast<float>(r);
	}
	return out;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
	x += 0x9E3779B97F4A7C15ull;
	x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
	x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
	return x ^ (x >> 31);
}

// Portable draws: std distributions are not bit-identical across libraries.
class Rng
{
public:
	explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
	double uniform() { return (engine_() >> 11) * (1.0 / 9007199254740992.0); }
	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
	double normal()
	{
		if (has_spare_) {
			has_spare_ = false;
			return spare_;
		}
		double u, v, s;
		do {
			u = uniform(-1, 1);
			v = uniform(-1, 1);
			s = u * u + v * v;
		} while (s >= 1 || s == 0);
		const double f = std::sqrt(-2 * std::log(s) / s);
		spare_ = v * f;
		has_spare_ = true;
		return u * f;
	}

private:
	std::mt19937_64 engine_;
	bool has_spare_ = false;
	double spare_ = 0;
};

inline float sample_bilinear(const FloatImage& img, double u, double v, float outside)
{
	// Pixel i covers [i, i+1); its value sits at i + 0.5.
	const double fx = u - 0.5, fy = v - 0.5;
	if (fx < -0.5 || fy < -0.5 || fx > img.width() - 0.5 || fy > img.height() - 0.5)
		return outside;
	const int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
	const float ax = static_cast<float>(fx - x0), ay = static_cast<float>(fy - y0);
	float p00, p10, p01, p11;
	if (x0 >= 0 && y0 >= 0 && x0 + 1 < img.width() && y0 + 1 < img.height()) {
		const float* r0 = img.row(y0).data() + x0;
		const float* r1 = img.row(y0 + 1).data() + x0;
		p00 = r0[0], p10 = r0[1], p01 = r1[0], p11 = r1[1];
	} else {
		p00 = img.at_clamped(x0, y0), p10 = img.at_clamped(x0 + 1, y0);
		p01 = img.at_clamped(x0, y0 + 1), p11 = img.at_clamped(x0 + 1, y0 + 1);
	}
	return (p00 * (1 - ax) + p10 * ax) * (1 - ay) + (p01 * (1 - ax) + p11 * ax) * ay;
}

} // namespace detail

inline FloatImage gaussian_blur(const FloatImage& img, double sigma)
{
	if (sigma <= 0)
		return img;
	const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
	std::vector<float> k(2 * radius + 1);
	double sum = 0;
	for (int i = -radius; i <= radius; ++i)
		sum += k[i + radius] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)));
	for (auto& v : k)
		v = static_cast<float>(v / sum);

	const int w = img.width(), h = img.height();
	FloatImage tmp(w, h), out(w, h);
	for (int y = 0; y < h; ++y) {
		const float* src = img.row(y).data();
		float* dst = tmp.row(y).data();
		for (int x = 0; x < w; ++x) {
			float acc = 0;
			if (x >= radius && x + radius < w)
				for (int i = -radius; i <= radius; ++i)
					acc += k[i + radius] * src[x + i];
			else
				for (int i = -radius; i <= radius; ++i)
					acc += k[i + radius] * src[std::clamp(x + i, 0, w - 1)];
			dst[x] = acc;
		}
	}
	// Vertical pass row by row so the inner loop runs along memory.
	for (int y = 0; y < h; ++y) {
		float* dst = out.row(y).data();
		std::fill(dst, dst + w, 0.0f);
		for (int i = -radius; i <= radius; ++i) {
			const float* src = tmp.row(std::clamp(y + i, 0, h - 1)).data();
			const float kv = k[i + radius];
			for (int x = 0; x < w; ++x)
				dst[x] += kv * src[x];
		}
	}
	return out;
}

struct SimImage
{
	GrayImage pixels;
	Homography sheet_to_frame; // sheet millimetres -> frame pixel coordinates
	double px_per_mm = 0;
};

struct FrameGeometry
{
	int width = 0, height = 0;
	std::array<Point, 4> sheet_corners_px; // TL, TR, BR, BL
	Homography sheet_to_frame;
};

// Frame size and the seeded perspective placement of the sheet within it.
inline FrameGeometry capture_geometry(double sheet_w_mm, double sheet_h_mm, const CaptureParams& params)
{
	params.validate();
	FrameGeometry g;
	const double sw = sheet_w_mm * params.px_per_mm, sh = sheet_h_mm * params.px_per_mm;
	const double mx = sw * params.margin, my = sh * params.margin;
	g.width = static_cast<int>(std::lround(sw + 2 * mx));
	g.height = static_cast<int>(std::lround(sh + 2 * my));
	if (g.width < 1 || g.height < 1)
		throw ValidationError("capture frame is empty");

	detail::Rng rng(params.seed ^ 0x6765'6F6D'6574'7279ull);
	const std::array<Point, 4> base{Point{mx, my}, Point{mx + sw, my}, Point{mx + sw, my + sh}, Point{mx, my + sh}};
	for (int i = 0; i < 4; ++i) {
		Point off{rng.uniform(-1, 1) * params.perspective, rng.uniform(-1, 1) * params.perspective};
		if (params.corner_offsets)
			off = (*params.corner_offsets)[i];
		g.sheet_corners_px[i] = base[i] + Point{off.x * g.width, off.y * g.height};
	}
	if (!is_convex_quad(g.sheet_corners_px))
		throw ValidationError("perspective offsets produce a degenerate quad");
	const std::array<Point, 4> sheet{Point{0, 0}, Point{sheet_w_mm, 0}, Point{sheet_w_mm, sheet_h_mm}, Point{0, sheet_h_mm}};
	auto h = Homography::from_points(sheet, g.sheet_corners_px);
	if (!h)
		throw ValidationError("perspective offsets produce a degenerate quad");
	g.sheet_to_frame = *h;
	return g;
}

inline SimImage simulate(const IdealImage& ideal, const CaptureParams& params)
{
	const auto geo = capture_geometry(ideal.width_mm(), ideal.height_mm(), params);
	const double ideal_px_per_mm = ideal.dpi / 25.4;
	// Frame pixels straight to ideal raster pixels.
	auto m = geo.sheet_to_frame.inverse().matrix();
	for (int i = 0; i < 6; ++i)
		m[i] *= ideal_px_per_mm;
	const Homography frame_to_raster(m);

	// Supersample when the frame is coarser than the ideal raster.
	const int ss = std::max(1, static_cast<int>(std::ceil(ideal_px_per_mm / params.px_per_mm - 1e-9)));
	FloatImage frame(geo.width, geo.height);
	const auto surround = static_cast<float>(params.surround);
	for (int y = 0; y < geo.height; ++y)
		for (int x = 0; x < geo.width; ++x) {
			float acc = 0;
			for (int sy = 0; sy < ss; ++sy)
				for (int sx = 0; sx < ss; ++sx) {
					const Point fp{x + (sx + 0.5) / ss, y + (sy + 0.5) / ss};
					const Point q = frame_to_raster.apply(fp);
					acc += detail::sample_bilinear(ideal.reflectance, q.x, q.y, surround);
				}
			frame(x, y) = acc / static_cast<float>(ss * ss);
		}

	frame = gaussian_blur(frame, params.blur_sigma);

	if (params.vignette_strength > 0) {
		const double cx = geo.width / 2.0, cy = geo.height / 2.0;
		const double rmax2 = cx * cx + cy * cy;
		for (int y = 0; y < geo.height; ++y)
			for (int x = 0; x < geo.width; ++x) {
				const double dx = x + 0.5 - cx, dy = y + 0.5 - cy;
				frame(x, y) *= static_cast<float>(1.0 - params.vignette_strength * (dx * dx + dy * dy) / rmax2);
			}
	}

	if (params.noise_sigma > 0) {
		detail::Rng rng(params.seed ^ 0x6E6F'6973'6500'0000ull);
		for (auto& v : frame.data())
			v += static_cast<float>(params.noise_sigma * rng.normal());
	}

	detail::Rng jrng(params.seed ^ 0x6A69'7474'6572'0000ull);
	const double brightness = jrng.uniform(-1, 1) * params.jitter.brightness;
	double gain = 1 + jrng.uniform(-1, 1) * params.jitter.contrast;
	gain *= 1 + 0.1 * jrng.uniform(-1, 1) * params.jitter.hue;
	gain *= 1 + 0.1 * jrng.uniform(-1, 1) * params.jitter.saturation;
	SimImage out{GrayImage(geo.width, geo.height), geo.sheet_to_frame, params.px_per_mm};
	for (std::size_t i = 0; i < frame.size(); ++i) {
		const double v = (frame.data()[i] - 0.5) * gain + 0.5 + brightness;
		out.pixels.data()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
	}
	return out;
}

// Seed for draw `index` of a batch.
inline std::uint64_t batch_seed(std::uint64_t seed, std::size_t index)
{
	return detail::splitmix64(seed ^ detail::splitmix64(index + 0x62617463'68000000ull));
}

inline std::vector<SimImage> augment_batch(const IdealImage& ideal, std::size_t n, std::uint64_t seed,
										   CaptureParams params = {})
{
	if (n < 1)
		throw ValidationError("batch size must be at least 1");
	std::vector<SimImage> out;
	out.reserve(n);
	for (std::size_t i = 0; i < n; ++i) {
		params.seed = batch_seed(seed, i);
		out.push_back(simulate(ideal, params));
	}
	return out;
}

} // namespace irmark

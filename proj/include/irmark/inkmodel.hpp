/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Invisible IR ink density prediction for a background color.
//
// The prediction is a bivariate polynomial in darkness K (0..100) and
// relative luminance (0..1). Predictions are mapped onto three density
// classes; each class recommends the lowest density of its range so that
// the ink stays below the detection threshold for every color in the class.

#include "error.hpp"
#include "image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace irmark {

struct ColorMetrics
{
	double k_percent = 0; // darkness, 0..100
	double luminance = 0; // relative luminance, 0..1
};

enum class InkClass { Class1 = 1, Class2 = 2, Class3 = 3 };

struct InkRecommendation
{
	double predicted_percent = 0;
	InkClass class_id = InkClass::Class1;
	int recommended_percent = 81;
	bool clamped = false;
};

// Versioned record of the model constants; serialized alongside exports.
struct InkModelConfig
{
	static constexpr int kSchemaVersion = 1;

	// f = c0 + c1*K + c2*lum + c3*K^2 + c4*lum^2 + c5*K^3 + c6*lum^3
	std::array<double, 7> coefficients{113.7, -0.1384, -25.43, 0.0081, -0.5103, 0.0, -0.0013};
	double valid_min = 81;   // lowest measured detection threshold
	double valid_max = 200;  // highest printable density
	double class2_floor = 102;
	double class3_floor = 155;
	std::array<int, 3> recommended{81, 102, 155};
};

inline constexpr std::array<int, 3> kDensityClasses{81, 102, 155};

inline bool is_density_class(int percent)
{
	return std::find(kDensityClasses.begin(), kDensityClasses.end(), percent) != kDensityClasses.end();
}

// Number of print passes needed to lay down `density_percent` of ink.
inline int print_passes(int density_percent) { return density_percent > 100 ? 2 : 1; }

inline ColorMetrics color_metrics(RgbColor c)
{
	const int peak = std::max({c.r, c.g, c.b});
	return {(1.0 - peak / 255.0) * 100.0, (0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b) / 255.0};
}

inline double predict_density(const ColorMetrics& m, const InkModelConfig& cfg = {})
{
	const auto& c = cfg.coefficients;
	const double k = m.k_percent, l = m.luminance;
	return c[0] + c[1] * k + c[2] * l + c[3] * k * k + c[4] * l * l + c[5] * k * k * k + c[6] * l * l * l;
}

inline InkRecommendation classify(double predicted, const InkModelConfig& cfg = {})
{
	InkRecommendation rec;
	rec.predicted_percent = predicted;
	rec.clamped = !(predicted >= cfg.valid_min && predicted <= cfg.valid_max); // NaN counts as clamped
	if (predicted >= cfg.class3_floor)
		rec.class_id = InkClass::Class3;
	else if (predicted >= cfg.class2_floor)
		rec.class_id = InkClass::Class2;
	else
		rec.class_id = InkClass::Class1;
	rec.recommended_percent = cfg.recommended[static_cast<int>(rec.class_id) - 1];
	return rec;
}

inline InkRecommendation recommend(RgbColor c, const InkModelConfig& cfg = {})
{
	return classify(predict_density(color_metrics(c), cfg), cfg);
}

struct RegionAnalysis
{
	Rect region;
	std::array<long long, 3> per_class_histogram{};
	InkRecommendation recommendation;
};

// Conservative recommendation for a document region: the per-pixel minimum.
inline RegionAnalysis analyze_region(const RgbImage& img, const Rect& rect, const InkModelConfig& cfg = {})
{
	if (rect.empty())
		throw ValidationError("empty region");
	if (!rect.inside(img.width(), img.height()))
		throw ValidationError("region outside image bounds");

	RegionAnalysis out;
	out.region = rect;
	bool first = true;
	for (int y = rect.y; y < rect.y + rect.height; ++y) {
		for (int x = rect.x; x < rect.x + rect.width; ++x) {
			const auto rec = recommend(img(x, y), cfg);
			++out.per_class_histogram[static_cast<int>(rec.class_id) - 1];
			if (first || rec.recommended_percent < out.recommendation.recommended_percent ||
				(rec.recommended_percent == out.recommendation.recommended_percent &&
				 rec.predicted_percent < out.recommendation.predicted_percent)) {
				out.recommendation = rec;
				first = false;
			}
		}
	}
	return out;
}

} // namespace irmark

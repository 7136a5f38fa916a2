/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Embed -> simulated capture -> read, the loop behind `irmark roundtrip`
// and the end-to-end acceptance run.

#include "capsim.hpp"
#include "pipeline.hpp"
#include "reader.hpp"

namespace irmark {

// Nominal handheld capture: light blur, sensor noise 0.03, corner offsets up
// to 5%, mild vignetting and exposure jitter, a small border of background.
inline CaptureParams nominal_capture(double px_per_mm)
{
	CaptureParams p;
	p.px_per_mm = px_per_mm;
	p.noise_sigma = 0.03;
	p.perspective = 0.05;
	p.blur_sigma = 0.8;
	p.vignette_strength = 0.2;
	p.jitter.brightness = 0.05;
	p.jitter.contrast = 0.1;
	p.margin = 0.03;
	return p;
}

// Camera scale giving `px_per_module` pixels on the smallest module any
// density class uses for this sheet and ECC level, so every class is
// photographed from the same distance.
inline double capture_scale(const SheetSpec& sheet, qr::Ecc ecc, double px_per_module)
{
	double smallest = 0;
	for (int d : kDensityClasses) {
		const double m = quantize_up(smallest_module(sheet.preset, d, ecc));
		smallest = smallest == 0 ? m : std::min(smallest, m);
	}
	return px_per_module / smallest;
}

struct RoundTripResult
{
	Bytes payload;
	std::size_t codes = 0;
	std::vector<reader::ReadFragment> fragments;
	bool ok = false;
};

// Reads one simulated capture of an already embedded job.
inline RoundTripResult read_back(const Embedded& e, std::span<const std::uint8_t> text, const IdealImage& ideal,
								 const CaptureParams& capture, const reader::ReadParams& read)
{
	RoundTripResult r;
	r.codes = e.chunks.chunks.size();
	r.fragments = reader::read_sheet(simulate(ideal, capture).pixels, read);
	r.payload = assemble(reader::fragments(r.fragments));
	r.ok = std::equal(r.payload.begin(), r.payload.end(), text.begin(), text.end());
	return r;
}

// Binarizer settings matched to the printed module size at `px_per_mm`.
inline reader::ReadParams read_params_for(const Embedded& e, double px_per_mm)
{
	reader::ReadParams rp;
	rp.binarize = reader::BinarizeParams::for_module_px(px_per_mm * e.plan.layout.module_mm);
	return rp;
}

inline RoundTripResult roundtrip(std::span<const std::uint8_t> text, const EmbedOptions& o, const CaptureParams& capture)
{
	const auto e = embed_offline(text, o);
	return read_back(e, text, render_ideal(e.job, capture), capture, read_params_for(e, capture.px_per_mm));
}

} // namespace irmark

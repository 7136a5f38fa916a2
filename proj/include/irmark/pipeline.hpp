/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Whole-sheet offline embedding: plan, chunk, encode and compose.

#include "payload.hpp"
#include "planner.hpp"
#include "qrcodec.hpp"
#include "separation.hpp"

namespace irmark {

struct EmbedOptions
{
	SheetSpec sheet = SheetSpec::letter();
	qr::Ecc ecc = qr::Ecc::L;
	int density_percent = 102;
	double module_mm = 0; // 0 = smallest detectable module for (sheet, density, ecc)
	double dpi = 300.0;
};

struct Embedded
{
	PrintJob job;
	ChunkSet chunks;
	CapacityPlan plan;
};

inline double default_module(const EmbedOptions& o)
{
	if (o.module_mm > 0)
		return o.module_mm;
	if (o.sheet.preset == SheetPreset::Custom)
		throw ValidationError("custom sheets need an explicit module size");
	return smallest_module(o.sheet.preset, o.density_percent, o.ecc);
}

inline Embedded embed_offline(std::span<const std::uint8_t> text, const EmbedOptions& o, const RgbImage& doc = {})
{
	auto plan = max_capacity(o.sheet, o.ecc, default_module(o));
	auto chunks = chunk(text, plan);
	std::vector<qr::QrMatrix> symbols;
	for (const auto& c : chunks.chunks)
		symbols.push_back(qr::encode(c.bytes, plan.version(), o.ecc));
	auto job = make_print_job(doc, chunks.layout, symbols, o.density_percent, o.dpi);
	return {std::move(job), std::move(chunks), std::move(plan)};
}

} // namespace irmark

/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Print job export: cmy.png, ir.png and manifest.json in one directory.

#include "json_io.hpp"
#include "png_io.hpp"
#include "separation.hpp"

#include <filesystem>
#include <fstream>

namespace irmark {

inline constexpr int kManifestSchemaVersion = 1;

inline RgbImage cmy_raster(const CmyImage& cmy)
{
	RgbImage out(cmy.width(), cmy.height());
	for (std::size_t i = 0; i < cmy.size(); ++i) {
		const auto p = cmy.data()[i];
		out.data()[i] = {p.c, p.m, p.y};
	}
	return out;
}

inline GrayImage ir_raster(const IrLayer& ir)
{
	GrayImage out(ir.width(), ir.height());
	for (std::size_t i = 0; i < ir.coverage.size(); ++i)
		out.data()[i] = ir.coverage.data()[i] ? 255 : 0;
	return out;
}

inline Json make_manifest(const PrintJob& job)
{
	const Json layout = job.layout;
	return Json{{"schema_version", kManifestSchemaVersion},
				{"dpi", job.ir.dpi},
				{"sheet", job.layout.sheet.name()},
				{"sheet_mm", {job.layout.sheet.width_mm, job.layout.sheet.height_mm}},
				{"raster_px", {job.ir.width(), job.ir.height()}},
				{"density_percent", job.ir.density_percent},
				{"passes", job.ir.passes},
				{"layout", layout},
				{"layout_hash", stable_hash(layout)},
				{"codec", {{"version", job.layout.version.value},
						   {"ecc", to_string(job.layout.ecc)},
						   {"mode", "byte"},
						   {"symbols", job.symbol_count}}},
				{"ink_model", InkModelConfig{}},
				{"files", {{"cmy", "cmy.png"}, {"ir", "ir.png"}, {"manifest", "manifest.json"}}}};
}

struct ExportedFiles
{
	std::vector<std::uint8_t> cmy_png;
	std::vector<std::uint8_t> ir_png;
	std::string manifest_json;
};

inline ExportedFiles encode_print_job(const PrintJob& job)
{
	if (job.cmy.width() != job.ir.width() || job.cmy.height() != job.ir.height())
		throw ValidationError("CMY and IR layers differ in size");
	return {png::encode(cmy_raster(job.cmy)), png::encode(ir_raster(job.ir)), make_manifest(job).dump(2) + "\n"};
}

// Writes the three artifacts into `dir` (created if needed); returns the manifest.
inline Json export_print_job(const PrintJob& job, const std::filesystem::path& dir)
{
	std::error_code ec;
	std::filesystem::create_directories(dir, ec);
	if (ec)
		throw IoError("cannot create " + dir.string() + ": " + ec.message());
	const auto files = encode_print_job(job);
	png::write_file(dir / "cmy.png", files.cmy_png);
	png::write_file(dir / "ir.png", files.ir_png);
	const auto& m = files.manifest_json;
	png::write_file(dir / "manifest.json", std::span(reinterpret_cast<const std::uint8_t*>(m.data()), m.size()));
	return Json::parse(m);
}

inline Json read_json_file(const std::filesystem::path& path)
{
	std::ifstream in(path);
	if (!in)
		throw IoError("cannot open " + path.string());
	try {
		return Json::parse(in);
	} catch (const Json::parse_error& e) {
		throw ValidationError(path.string() + ": " + e.what());
	}
}

// Reloads an exported job from its manifest (artifacts resolved next to it).
inline PrintJob load_print_job(const std::filesystem::path& manifest_path)
{
	const auto m = read_json_file(manifest_path);
	const auto dir = manifest_path.parent_path();
	if (m.value("schema_version", 0) != kManifestSchemaVersion)
		throw ValidationError("unsupported manifest schema");

	PrintJob job;
	job.layout = m.at("layout").get<Layout>();
	job.symbol_count = m.at("codec").at("symbols").get<std::size_t>();
	const double dpi = m.at("dpi").get<double>();

	const auto rgb = png::read_rgb(dir / m.at("files").at("cmy").get<std::string>());
	job.cmy = CmyImage(rgb.width(), rgb.height());
	job.cmy.dpi = dpi;
	for (std::size_t i = 0; i < rgb.size(); ++i) {
		const auto p = rgb.data()[i];
		job.cmy.data()[i] = {p.r, p.g, p.b};
	}

	const auto ir = png::read_gray(dir / m.at("files").at("ir").get<std::string>());
	job.ir.coverage = Grid<std::uint8_t>(ir.width(), ir.height());
	for (std::size_t i = 0; i < ir.size(); ++i)
		job.ir.coverage.data()[i] = ir.data()[i] >= 128 ? 1 : 0;
	job.ir.density_percent = m.at("density_percent").get<int>();
	job.ir.passes = m.at("passes").get<int>();
	job.ir.dpi = dpi;
	if (!is_density_class(job.ir.density_percent) || job.ir.passes != print_passes(job.ir.density_percent))
		throw ValidationError("manifest density/passes are inconsistent");
	return job;
}

} // namespace irmark

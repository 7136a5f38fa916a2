/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Persisted authoring state and the print job it describes.

#include "../config_io.hpp"
#include "../payload.hpp"

namespace irmark::service {

enum class Mode { Offline, Online };

inline std::string mode_name(Mode m) { return m == Mode::Online ? "online" : "offline"; }

inline Mode parse_mode(const std::string& s)
{
	if (s == "offline") return Mode::Offline;
	if (s == "online") return Mode::Online;
	throw ValidationError("mode must be 'online' or 'offline'");
}

struct ProjectRegion
{
	Rect rect;
	RegionAnalysis analysis;
	double trackability = 0;
	std::vector<ContentFrame> frames; // online mode content
};

struct ExportRef
{
	int revision = 0; // project revision the artifacts were built from
	std::string manifest, cmy, ir; // blob hashes
	std::string bundle;            // online mode only
	friend bool operator==(const ExportRef&, const ExportRef&) = default;
};

struct ProjectDoc
{
	std::string id;
	int revision = 1;
	std::string source_blob; // SHA-256 of the uploaded PNG
	int image_width = 0;
	int image_height = 0;
	Mode mode = Mode::Offline;
	std::string text; // offline payload
	std::vector<ProjectRegion> regions;
	EmbedOptions codec;
	std::string version_policy = "max-capacity";
	std::optional<ExportRef> export_ref;
	std::string created_at, updated_at;

	void validate() const
	{
		if (id.empty() || id.find_first_of("/\\.") != std::string::npos)
			throw ValidationError("bad project id");
		if (revision < 1)
			throw ValidationError("revision must be positive");
		if (!is_density_class(codec.density_percent))
			throw ValidationError("density_percent must be one of 81, 102, 155");
		if (version_policy != "max-capacity")
			throw ValidationError("unknown version policy '" + version_policy + "'");
		for (const auto& r : regions)
			if (r.rect.empty() || !r.rect.inside(image_width, image_height))
				throw ValidationError("region outside the document image");
	}
};

} // namespace irmark::service

namespace irmark {

inline void to_json(Json& j, const ContentFrame& f) { j = Json{{"kind", frame_kind_name(f.kind)}, {"value", f.value}}; }
inline void from_json(const Json& j, ContentFrame& f)
{
	f.kind = parse_frame_kind(j.at("kind").get<std::string>());
	f.value = j.at("value").get<std::string>();
}

inline void to_json(Json& j, const ContentBundle& b)
{
	Json frames = Json::object();
	for (const auto& [region, list] : b.frames)
		frames[std::to_string(region)] = list;
	j = Json{{"id", b.id}, {"frames", frames}};
}
inline void from_json(const Json& j, ContentBundle& b)
{
	b.id = j.at("id").get<std::string>();
	b.frames.clear();
	for (const auto& [k, v] : j.at("frames").items())
		b.frames[std::stoi(k)] = v.get<std::vector<ContentFrame>>();
}

} // namespace irmark

namespace irmark::service {

inline void to_json(Json& j, const ProjectRegion& r)
{
	j = Json{{"rect", r.rect}, {"analysis", r.analysis}, {"trackability_score", r.trackability}, {"frames", r.frames}};
}
inline void from_json(const Json& j, ProjectRegion& r)
{
	r.rect = j.at("rect").get<Rect>();
	r.analysis = j.at("analysis").get<RegionAnalysis>();
	r.trackability = j.at("trackability_score").get<double>();
	r.frames = j.at("frames").get<std::vector<ContentFrame>>();
}

inline void to_json(Json& j, const ExportRef& e)
{
	j = Json{{"revision", e.revision}, {"manifest", e.manifest}, {"cmy", e.cmy}, {"ir", e.ir}, {"bundle", e.bundle}};
}
inline void from_json(const Json& j, ExportRef& e)
{
	e.revision = j.at("revision").get<int>();
	e.manifest = j.at("manifest").get<std::string>();
	e.cmy = j.at("cmy").get<std::string>();
	e.ir = j.at("ir").get<std::string>();
	e.bundle = j.value("bundle", std::string());
}

inline void to_json(Json& j, const ProjectDoc& d)
{
	j = Json{{"id", d.id},
			 {"revision", d.revision},
			 {"source", {{"blob", d.source_blob}, {"format", "png"}, {"width", d.image_width}, {"height", d.image_height}}},
			 {"mode", mode_name(d.mode)},
			 {"text", d.text},
			 {"regions", d.regions},
			 {"codec", d.codec},
			 {"version_policy", d.version_policy},
			 {"export", d.export_ref ? Json(*d.export_ref) : Json()},
			 {"created_at", d.created_at},
			 {"updated_at", d.updated_at}};
}
inline void from_json(const Json& j, ProjectDoc& d)
{
	d.id = j.at("id").get<std::string>();
	d.revision = j.at("revision").get<int>();
	const auto& src = j.at("source");
	d.source_blob = src.at("blob").get<std::string>();
	d.image_width = src.at("width").get<int>();
	d.image_height = src.at("height").get<int>();
	d.mode = parse_mode(j.at("mode").get<std::string>());
	d.text = j.at("text").get<std::string>();
	d.regions = j.at("regions").get<std::vector<ProjectRegion>>();
	d.codec = j.at("codec").get<EmbedOptions>();
	d.version_policy = j.at("version_policy").get<std::string>();
	d.export_ref.reset();
	if (!j.at("export").is_null())
		d.export_ref = j.at("export").get<ExportRef>();
	d.created_at = j.at("created_at").get<std::string>();
	d.updated_at = j.at("updated_at").get<std::string>();
	d.validate();
}

// Image pixel rectangle mapped onto the sheet the document is stretched over.
inline RectMm region_on_sheet(const Rect& r, int image_width, int image_height, const SheetSpec& sheet)
{
	const double sx = sheet.width_mm / image_width, sy = sheet.height_mm / image_height;
	return {r.x * sx, r.y * sy, r.width * sx, r.height * sy};
}

struct BuiltJob
{
	PrintJob job;
	std::optional<OnlineDescriptor> online;
};

// One code per tracked region, centered in it. All codes share the
// smallest version holding the longest pointer and the largest module
// size that fits every region.
inline BuiltJob build_online(const ProjectDoc& d, const RgbImage& doc)
{
	std::vector<TrackedRegion> tracked;
	for (const auto& r : d.regions)
		tracked.push_back({r.rect, r.trackability, r.frames});
	auto desc = build_online_descriptor(d.id, tracked);

	std::size_t longest = 0;
	for (const auto& p : desc.payloads)
		longest = std::max(longest, p.size());
	int v = 1;
	while (v <= 7 && qr::byte_capacity(qr::Version(v), d.codec.ecc) < static_cast<int>(longest))
		++v;
	if (v > 7)
		throw CapacityError(longest, static_cast<std::size_t>(qr::byte_capacity(qr::Version(7), d.codec.ecc)));

	const double min_module = default_module(d.codec);
	Layout merged{d.codec.sheet, qr::Version(v), d.codec.ecc, 0, 4, static_cast<int>(d.regions.size()), 1, {}};
	std::vector<RectMm> rects;
	for (const auto& r : d.regions) {
		rects.push_back(region_on_sheet(r.rect, d.image_width, d.image_height, d.codec.sheet));
		const auto l = custom_region_layout(d.codec.sheet, rects.back(), merged.version, d.codec.ecc, min_module);
		merged.module_mm = merged.module_mm == 0 ? l.module_mm : std::min(merged.module_mm, l.module_mm);
	}
	const double code = merged.code_mm(), quiet = merged.quiet_modules * merged.module_mm;
	for (const auto& r : rects)
		merged.placements.push_back({r.x + (r.width - code) / 2, r.y + (r.height - code) / 2});
	for (std::size_t i = 0; i < rects.size(); ++i)
		for (std::size_t k = i + 1; k < rects.size(); ++k) {
			const auto& a = merged.placements[i];
			const auto& b = merged.placements[k];
			if (std::abs(a.x_mm - b.x_mm) < code + 2 * quiet && std::abs(a.y_mm - b.y_mm) < code + 2 * quiet)
				throw ValidationError("codes for regions " + std::to_string(i) + " and " + std::to_string(k) +
									  " would overlap");
		}

	std::vector<qr::QrMatrix> symbols;
	for (const auto& p : desc.payloads)
		symbols.push_back(qr::encode(to_bytes(p), merged.version, merged.ecc));
	return {make_print_job(doc, merged, symbols, d.codec.density_percent, d.codec.dpi), std::move(desc)};
}

inline BuiltJob build_print_job(const ProjectDoc& d, const RgbImage& doc)
{
	if (d.mode == Mode::Online)
		return build_online(d, doc);
	if (d.text.empty())
		throw ValidationError("offline project has no text to embed");
	return {embed_offline(to_bytes(d.text), d.codec, doc).job, std::nullopt};
}

} // namespace irmark::service

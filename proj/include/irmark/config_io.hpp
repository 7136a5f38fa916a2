/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON forms of the tunable parameter sets and the combined config file
// shared by the CLI and the service. Missing keys keep their defaults;
// unknown keys are rejected so typos do not pass silently.

#include "capsim.hpp"
#include "json_io.hpp"
#include "pipeline.hpp"
#include "reader.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <optional>

namespace irmark {

namespace detail {

inline void only_keys(const Json& j, std::initializer_list<std::string_view> keys, std::string_view what)
{
	if (!j.is_object())
		throw ValidationError(std::string(what) + " must be a JSON object");
	for (const auto& [k, v] : j.items())
		if (std::find(keys.begin(), keys.end(), k) == keys.end())
			throw ValidationError("unknown key '" + k + "' in " + std::string(what));
}

template <class T>
void read_opt(const Json& j, const char* key, T& out)
{
	if (j.contains(key))
		out = j.at(key).get<T>();
}

} // namespace detail

inline void to_json(Json& j, Point p) { j = Json{p.x, p.y}; }
inline void from_json(const Json& j, Point& p) { p = {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline void to_json(Json& j, const Homography& h) { j = h.matrix(); }

inline void to_json(Json& j, const JitterRanges& r)
{
	j = Json{{"brightness", r.brightness}, {"contrast", r.contrast}, {"hue", r.hue}, {"saturation", r.saturation}};
}
inline void from_json(const Json& j, JitterRanges& r)
{
	detail::only_keys(j, {"brightness", "contrast", "hue", "saturation"}, "jitter");
	detail::read_opt(j, "brightness", r.brightness);
	detail::read_opt(j, "contrast", r.contrast);
	detail::read_opt(j, "hue", r.hue);
	detail::read_opt(j, "saturation", r.saturation);
}

inline void to_json(Json& j, const CaptureParams& p)
{
	j = Json{{"schema_version", CaptureParams::kSchemaVersion},
			 {"px_per_mm", p.px_per_mm},
			 {"margin", p.margin},
			 {"contrast", p.contrast},
			 {"background", p.background},
			 {"cmy_absorbance", p.cmy_absorbance},
			 {"surround", p.surround},
			 {"blur_sigma", p.blur_sigma},
			 {"noise_sigma", p.noise_sigma},
			 {"vignette_strength", p.vignette_strength},
			 {"perspective", p.perspective},
			 {"jitter", p.jitter},
			 {"seed", p.seed}};
	if (p.corner_offsets)
		j["corner_offsets"] = *p.corner_offsets;
}
inline void from_json(const Json& j, CaptureParams& p)
{
	detail::only_keys(j,
					  {"schema_version", "px_per_mm", "margin", "contrast", "background", "cmy_absorbance", "surround",
					   "blur_sigma", "noise_sigma", "vignette_strength", "perspective", "corner_offsets", "jitter",
					   "seed"},
					  "capture params");
	if (j.value("schema_version", CaptureParams::kSchemaVersion) != CaptureParams::kSchemaVersion)
		throw ValidationError("unsupported capture params schema_version");
	detail::read_opt(j, "px_per_mm", p.px_per_mm);
	detail::read_opt(j, "margin", p.margin);
	detail::read_opt(j, "contrast", p.contrast);
	detail::read_opt(j, "background", p.background);
	detail::read_opt(j, "cmy_absorbance", p.cmy_absorbance);
	detail::read_opt(j, "surround", p.surround);
	detail::read_opt(j, "blur_sigma", p.blur_sigma);
	detail::read_opt(j, "noise_sigma", p.noise_sigma);
	detail::read_opt(j, "vignette_strength", p.vignette_strength);
	detail::read_opt(j, "perspective", p.perspective);
	detail::read_opt(j, "jitter", p.jitter);
	detail::read_opt(j, "seed", p.seed);
	if (j.contains("corner_offsets") && !j.at("corner_offsets").is_null())
		p.corner_offsets = j.at("corner_offsets").get<std::array<Point, 4>>();
	p.validate();
}

} // namespace irmark

namespace irmark::reader {

inline void to_json(Json& j, const BinarizeParams& p)
{
	j = Json{{"clahe_tiles", {p.clahe_tiles_x, p.clahe_tiles_y}},
			 {"clahe_clip", p.clahe_clip},
			 {"sauvola_window", p.sauvola_window},
			 {"sauvola_k", p.sauvola_k},
			 {"sauvola_r", p.sauvola_r},
			 {"denoise_sigma", p.denoise_sigma}};
}
inline void from_json(const Json& j, BinarizeParams& p)
{
	irmark::detail::only_keys(j,
							  {"module_px", "clahe_tiles", "clahe_clip", "sauvola_window", "sauvola_k", "sauvola_r",
							   "denoise_sigma"},
							  "binarize params");
	// A module size selects the matching preset; explicit keys override it.
	if (j.contains("module_px"))
		p = BinarizeParams::for_module_px(j.at("module_px").get<double>());
	if (j.contains("clahe_tiles")) {
		p.clahe_tiles_x = j.at("clahe_tiles").at(0).get<int>();
		p.clahe_tiles_y = j.at("clahe_tiles").at(1).get<int>();
	}
	irmark::detail::read_opt(j, "clahe_clip", p.clahe_clip);
	irmark::detail::read_opt(j, "sauvola_window", p.sauvola_window);
	irmark::detail::read_opt(j, "sauvola_k", p.sauvola_k);
	irmark::detail::read_opt(j, "sauvola_r", p.sauvola_r);
	irmark::detail::read_opt(j, "denoise_sigma", p.denoise_sigma);
	p.validate();
}

} // namespace irmark::reader

namespace irmark {

inline void to_json(Json& j, const EmbedOptions& o)
{
	j = Json{{"sheet", o.sheet},
			 {"ecc", to_string(o.ecc)},
			 {"density_percent", o.density_percent},
			 {"module_mm", o.module_mm},
			 {"dpi", o.dpi}};
}
inline void from_json(const Json& j, EmbedOptions& o)
{
	detail::only_keys(j, {"sheet", "ecc", "density_percent", "module_mm", "dpi"}, "embed options");
	if (j.contains("sheet"))
		o.sheet = j.at("sheet").is_string() ? parse_sheet(j.at("sheet").get<std::string>()) : j.at("sheet").get<SheetSpec>();
	if (j.contains("ecc"))
		o.ecc = qr::parse_ecc(j.at("ecc").get<std::string>());
	detail::read_opt(j, "density_percent", o.density_percent);
	detail::read_opt(j, "module_mm", o.module_mm);
	detail::read_opt(j, "dpi", o.dpi);
	if (!is_density_class(o.density_percent))
		throw ValidationError("density_percent must be one of 81, 102, 155");
	if (o.module_mm < 0 || !(o.dpi > 0))
		throw ValidationError("module_mm and dpi must be positive");
}

struct ServiceConfig
{
	std::string host = "127.0.0.1";
	int port = 8080;
	std::filesystem::path data_dir = "irmark-data";
	std::filesystem::path static_dir; // built authoring UI, served at / when set
};

inline void from_json(const Json& j, ServiceConfig& c)
{
	detail::only_keys(j, {"host", "port", "data_dir", "static_dir"}, "service config");
	detail::read_opt(j, "host", c.host);
	detail::read_opt(j, "port", c.port);
	if (j.contains("data_dir"))
		c.data_dir = j.at("data_dir").get<std::string>();
	if (j.contains("static_dir"))
		c.static_dir = j.at("static_dir").get<std::string>();
}

// Everything one config file can set.
struct Config
{
	static constexpr int kSchemaVersion = 1;
	EmbedOptions embed;
	CaptureParams capture;
	reader::BinarizeParams binarize;
	ServiceConfig service;
};

inline Config parse_config(const Json& j)
{
	detail::only_keys(j, {"schema_version", "embed", "capture", "binarize", "service"}, "config");
	if (j.value("schema_version", Config::kSchemaVersion) != Config::kSchemaVersion)
		throw ValidationError("unsupported config schema_version");
	Config c;
	detail::read_opt(j, "embed", c.embed);
	detail::read_opt(j, "capture", c.capture);
	detail::read_opt(j, "binarize", c.binarize);
	detail::read_opt(j, "service", c.service);
	return c;
}

// Getter for environment variables; injectable for tests.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;

inline std::optional<std::string> process_env(const char* name)
{
	if (const char* v = std::getenv(name))
		return std::string(v);
	return std::nullopt;
}

// Reads `path` (empty = defaults only) and applies IRMARK_PORT and
// IRMARK_DATA_DIR overrides.
inline Config load_config(const std::filesystem::path& path, const EnvLookup& env = process_env)
{
	Config c;
	if (!path.empty()) {
		std::ifstream in(path);
		if (!in)
			throw IoError("cannot read config " + path.string());
		Json j;
		try {
			j = Json::parse(in);
		} catch (const Json::exception& e) {
			throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
		}
		try {
			c = parse_config(j);
		} catch (const Json::exception& e) {
			throw ValidationError("config " + path.string() + ": " + e.what());
		}
	}
	if (auto port = env("IRMARK_PORT")) {
		try {
			std::size_t used = 0;
			c.service.port = std::stoi(*port, &used);
			if (used != port->size())
				throw std::invalid_argument("trailing characters");
		} catch (const std::exception&) {
			throw ValidationError("IRMARK_PORT is not a port number: " + *port);
		}
	}
	if (auto dir = env("IRMARK_DATA_DIR"))
		c.service.data_dir = *dir;
	if (c.service.port < 0 || c.service.port > 65535)
		throw ValidationError("service port out of range");
	return c;
}

} // namespace irmark

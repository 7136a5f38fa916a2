/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// JSON forms of the public value types (nlohmann/json ADL hooks).

#include "inkmodel.hpp"
#include "planner.hpp"

#include <json.hpp>

#include <cstdio>

namespace irmark {

using Json = nlohmann::json;

inline std::string to_string(qr::Ecc e) { return std::string(1, qr::ecc_name(e)); }

inline void to_json(Json& j, const Rect& r) { j = Json{{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}}; }
inline void from_json(const Json& j, Rect& r)
{
	r = {j.at("x").get<int>(), j.at("y").get<int>(), j.at("width").get<int>(), j.at("height").get<int>()};
}

inline void to_json(Json& j, const RectMm& r)
{
	j = Json{{"x", r.x}, {"y", r.y}, {"width", r.width}, {"height", r.height}};
}
inline void from_json(const Json& j, RectMm& r)
{
	r = {j.at("x").get<double>(), j.at("y").get<double>(), j.at("width").get<double>(), j.at("height").get<double>()};
}

inline void to_json(Json& j, const SheetSpec& s)
{
	j = Json{{"name", s.name()}, {"width_mm", s.width_mm}, {"height_mm", s.height_mm}};
}
inline void from_json(const Json& j, SheetSpec& s)
{
	const auto name = j.value("name", std::string("custom"));
	if (name == "custom")
		s = SheetSpec::custom(j.at("width_mm").get<double>(), j.at("height_mm").get<double>());
	else
		s = parse_sheet(name);
}

inline void to_json(Json& j, const Layout& l)
{
	Json placements = Json::array();
	for (const auto& p : l.placements)
		placements.push_back({p.x_mm, p.y_mm});
	j = Json{{"sheet", l.sheet},
			 {"version", l.version.value},
			 {"ecc", to_string(l.ecc)},
			 {"module_mm", l.module_mm},
			 {"quiet_modules", l.quiet_modules},
			 {"cols", l.cols},
			 {"rows", l.rows},
			 {"code_mm", l.code_mm()},
			 {"placements", placements}};
}
inline void from_json(const Json& j, Layout& l)
{
	l.sheet = j.at("sheet").get<SheetSpec>();
	l.version = qr::Version(j.at("version").get<int>());
	l.ecc = qr::parse_ecc(j.at("ecc").get<std::string>());
	l.module_mm = j.at("module_mm").get<double>();
	l.quiet_modules = j.at("quiet_modules").get<int>();
	l.cols = j.at("cols").get<int>();
	l.rows = j.at("rows").get<int>();
	l.placements.clear();
	for (const auto& p : j.at("placements"))
		l.placements.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
}

inline void to_json(Json& j, const CapacityPlan& p)
{
	j = Json{{"version", p.version().value},
			 {"ecc", to_string(p.layout.ecc)},
			 {"module_mm", p.layout.module_mm},
			 {"cols", p.layout.cols},
			 {"rows", p.layout.rows},
			 {"codes", p.codes()},
			 {"per_code_chars", p.per_code_chars},
			 {"total_chars", p.total_chars},
			 {"layout", p.layout}};
}

inline std::string class_name(InkClass c) { return "Class" + std::to_string(static_cast<int>(c)); }

inline void to_json(Json& j, const InkRecommendation& r)
{
	j = Json{{"predicted_percent", r.predicted_percent},
			 {"class", class_name(r.class_id)},
			 {"recommended_percent", r.recommended_percent},
			 {"clamped", r.clamped}};
}

inline void from_json(const Json& j, InkRecommendation& r)
{
	const auto name = j.at("class").get<std::string>();
	if (name != "Class1" && name != "Class2" && name != "Class3")
		throw ValidationError("unknown ink class '" + name + "'");
	r.predicted_percent = j.at("predicted_percent").get<double>();
	r.class_id = static_cast<InkClass>(name.back() - '0');
	r.recommended_percent = j.at("recommended_percent").get<int>();
	r.clamped = j.at("clamped").get<bool>();
}

inline void to_json(Json& j, const RegionAnalysis& a)
{
	j = Json{{"region", a.region}, {"per_class_histogram", a.per_class_histogram}, {"recommendation", a.recommendation}};
}
inline void from_json(const Json& j, RegionAnalysis& a)
{
	a.region = j.at("region").get<Rect>();
	a.per_class_histogram = j.at("per_class_histogram").get<std::array<long long, 3>>();
	a.recommendation = j.at("recommendation").get<InkRecommendation>();
}

inline void to_json(Json& j, const InkModelConfig& c)
{
	j = Json{{"schema_version", InkModelConfig::kSchemaVersion},
			 {"coefficients", c.coefficients},
			 {"valid_range", {c.valid_min, c.valid_max}},
			 {"class_floors", {c.class2_floor, c.class3_floor}},
			 {"recommended", c.recommended}};
}

// FNV-1a over the canonical (sorted-key, compact) serialization.
inline std::string stable_hash(const Json& j)
{
	std::uint64_t h = 1469598103934665603ull;
	for (unsigned char c : j.dump()) {
		h ^= c;
		h *= 1099511628211ull;
	}
	char buf[17];
	std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
	return buf;
}

} // namespace irmark

/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// HTTP API as plain request -> response handling, independent of the
// transport. Every mutation carries the revision it was based on; a stale
// revision is answered with 409.

#include "../export.hpp"
#include "../png_io.hpp"
#include "store.hpp"

#include <ctime>
#include <map>
#include <memory>
#include <mutex>
#include <random>

namespace irmark::service {

class NotFound : public Error
{
public:
	explicit NotFound(const std::string& what) : Error("not_found", what) {}
};

class Conflict : public Error
{
public:
	Conflict(int expected, int current)
		: Error("revision_conflict", "project is at revision " + std::to_string(current) + ", request was based on " +
										 std::to_string(expected)),
		  current_(current)
	{}
	int current() const noexcept { return current_; }

private:
	int current_;
};

class BadRequest : public Error
{
public:
	explicit BadRequest(const std::string& what) : Error("bad_request", what) {}
};

class UnsupportedFormat : public Error
{
public:
	explicit UnsupportedFormat(const std::string& what) : Error("unsupported_format", what) {}
};

struct UploadedFile
{
	std::string content_type;
	std::string content;
};

struct Request
{
	std::string method;
	std::string path;
	std::map<std::string, std::string> query;
	std::string content_type;
	std::string body;
	std::map<std::string, UploadedFile> files; // multipart parts by field name
};

struct Response
{
	int status = 200;
	std::string content_type = "application/json";
	std::string body;

	Json json() const { return Json::parse(body); }
};

inline Response json_response(int status, const Json& j) { return {status, "application/json", j.dump()}; }

inline Response error_response(int status, const std::string& code, const std::string& message, Json details = Json::object())
{
	return json_response(status, {{"code", code}, {"message", message}, {"details", std::move(details)}});
}

// Fragment list plus assembled payload, shared by POST /read and the CLI.
inline Json read_report(const std::vector<reader::ReadFragment>& frags)
{
	Json list = Json::array();
	Json online = Json::array();
	for (const auto& f : frags) {
		const auto& d = f.fragment;
		list.push_back({{"bytes_base64", base64_encode(d.bytes)},
						{"center", {d.center_x, d.center_y}},
						{"code_height_px", d.code_height_px},
						{"binarizer", f.binarizer},
						{"version", f.version.value},
						{"ecc", to_string(f.ecc)},
						{"corrected", f.corrected},
						{"corners", f.corners}});
		if (auto p = parse_online_payload(to_string(d.bytes)))
			online.push_back({{"bundle", p->bundle_id}, {"region", p->region}});
	}
	const auto payload = assemble(reader::fragments(frags));
	return {{"fragments", list}, {"payload_base64", base64_encode(payload)}, {"online", online}};
}

inline std::string utc_now()
{
	const std::time_t t = std::time(nullptr);
	std::tm tm{};
	gmtime_r(&t, &tm);
	char buf[32];
	std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
	return buf;
}

class Api
{
public:
	using Clock = std::function<std::string()>;

	explicit Api(std::filesystem::path data_dir, Clock clock = utc_now)
		: store_(std::move(data_dir)), clock_(std::move(clock))
	{}

	Store& store() { return store_; }

	Response handle(const Request& req)
	{
		try {
			return route(req);
		} catch (const NotFound& e) {
			return error_response(404, e.code(), e.what());
		} catch (const Conflict& e) {
			return error_response(409, e.code(), e.what(), {{"current_revision", e.current()}});
		} catch (const BadRequest& e) {
			return error_response(400, e.code(), e.what());
		} catch (const RegionRejected& e) {
			return error_response(422, e.code(), e.what(), {{"regions", e.regions()}});
		} catch (const CapacityError& e) {
			return error_response(422, e.code(), e.what(), {{"required", e.required()}, {"available", e.available()}});
		} catch (const IoError& e) {
			return error_response(500, e.code(), e.what());
		} catch (const Error& e) {
			return error_response(422, e.code(), e.what());
		} catch (const Json::exception& e) {
			return error_response(422, "validation", e.what());
		}
	}

private:
	Response route(const Request& req)
	{
		std::vector<std::string> parts;
		for (std::size_t i = 0; i < req.path.size();) {
			const auto j = req.path.find('/', i);
			const auto part = req.path.substr(i, j == std::string::npos ? std::string::npos : j - i);
			if (!part.empty())
				parts.push_back(part);
			if (j == std::string::npos)
				break;
			i = j + 1;
		}
		const auto& m = req.method;
		const auto n = parts.size();
		auto is = [&](std::initializer_list<const char*> shape) {
			if (shape.size() != n)
				return false;
			std::size_t i = 0;
			for (const char* s : shape) {
				if (*s != '*' && parts[i] != s)
					return false;
				++i;
			}
			return true;
		};

		if (is({"projects"}) && m == "POST")
			return create_project(req);
		if (is({"projects", "*"}) && m == "GET")
			return json_response(200, load(parts[1]));
		if (is({"projects", "*", "settings"}) && m == "POST")
			return update_settings(parts[1], body_json(req));
		if (is({"projects", "*", "regions"}) && m == "POST")
			return add_region(parts[1], body_json(req));
		if (is({"projects", "*", "plan"}) && m == "POST")
			return plan(parts[1], body_json(req));
		if (is({"projects", "*", "export"}) && m == "POST")
			return export_project(parts[1], body_json(req));
		if (is({"simulate"}) && m == "POST")
			return simulate_project(body_json(req));
		if (is({"read"}) && m == "POST")
			return read(req);
		if (is({"content", "*", "*"}) && m == "GET")
			return content(parts[1], parts[2]);
		if (is({"blobs", "*"}) && m == "GET")
			return blob(parts[1]);
		if (is({"projects"}) || is({"projects", "*"}) || is({"simulate"}) || is({"read"}))
			return error_response(405, "method_not_allowed", m + " not allowed on " + req.path);
		throw NotFound("no route for " + m + " " + req.path);
	}

	static Json body_json(const Request& req)
	{
		if (req.body.empty())
			return Json::object();
		try {
			auto j = Json::parse(req.body);
			if (!j.is_object())
				throw BadRequest("request body must be a JSON object");
			return j;
		} catch (const Json::parse_error& e) {
			throw BadRequest(std::string("request body is not JSON: ") + e.what());
		}
	}

	// Image bytes from a multipart "image" part or a raw image body.
	static std::string image_bytes(const Request& req)
	{
		if (auto it = req.files.find("image"); it != req.files.end())
			return it->second.content;
		if (!req.files.empty())
			throw ValidationError("multipart upload needs an 'image' part");
		return req.body;
	}

	static std::span<const std::uint8_t> as_bytes(const std::string& s)
	{
		return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
	}

	std::shared_ptr<std::mutex> project_lock(const std::string& id)
	{
		std::lock_guard g(locks_mutex_);
		auto& p = locks_[id];
		if (!p)
			p = std::make_shared<std::mutex>();
		return p;
	}

	ProjectDoc load(const std::string& id) const
	{
		auto d = store_.load_project(id);
		if (!d)
			throw NotFound("unknown project '" + id + "'");
		return *d;
	}

	static void check_revision(const ProjectDoc& d, const Json& body)
	{
		if (!body.contains("revision"))
			throw ValidationError("mutations must carry the project revision they are based on");
		const int expected = body.at("revision").get<int>();
		if (expected != d.revision)
			throw Conflict(expected, d.revision);
	}

	void commit(ProjectDoc& d)
	{
		++d.revision;
		d.updated_at = clock_();
		store_.save_project(d);
	}

	RgbImage source_image(const ProjectDoc& d) const
	{
		const auto bytes = store_.get_blob(d.source_blob);
		if (!bytes)
			throw IoError("source image blob missing for project " + d.id);
		return png::decode_rgb(*bytes);
	}

	Response create_project(const Request& req)
	{
		const auto bytes = image_bytes(req);
		if (!png::looks_like_png(as_bytes(bytes)))
			throw UnsupportedFormat("document image must be a PNG");
		RgbImage img;
		try {
			img = png::decode_rgb(as_bytes(bytes));
		} catch (const Error& e) {
			throw UnsupportedFormat(std::string("cannot decode PNG: ") + e.what());
		}
		ProjectDoc d;
		d.source_blob = store_.put_blob(as_bytes(bytes));
		d.image_width = img.width();
		d.image_height = img.height();
		d.created_at = d.updated_at = clock_();
		{
			std::lock_guard g(locks_mutex_);
			do
				d.id = new_id();
			while (store_.load_project(d.id));
			store_.save_project(d);
		}
		return json_response(201, {{"id", d.id}, {"revision", d.revision}, {"project", d}});
	}

	std::string new_id()
	{
		static constexpr char kHex[] = "0123456789abcdef";
		std::string id(16, '0');
		for (auto& c : id)
			c = kHex[rng_() % 16];
		return id;
	}

	Response update_settings(const std::string& id, const Json& body)
	{
		const auto lock = project_lock(id);
		std::lock_guard g(*lock);
		auto d = load(id);
		check_revision(d, body);
		detail::only_keys(body, {"revision", "mode", "text", "codec"}, "settings");
		if (body.contains("mode"))
			d.mode = parse_mode(body.at("mode").get<std::string>());
		if (body.contains("text"))
			d.text = body.at("text").get<std::string>();
		if (body.contains("codec")) {
			Json merged = d.codec;
			merged.update(body.at("codec"));
			d.codec = merged.get<EmbedOptions>();
		}
		commit(d);
		return json_response(200, d);
	}

	Response add_region(const std::string& id, const Json& body)
	{
		const auto lock = project_lock(id);
		std::lock_guard g(*lock);
		auto d = load(id);
		check_revision(d, body);
		detail::only_keys(body, {"revision", "rect", "frames"}, "region");
		ProjectRegion r;
		r.rect = body.at("rect").get<Rect>();
		if (body.contains("frames"))
			r.frames = body.at("frames").get<std::vector<ContentFrame>>();
		const auto img = source_image(d);
		r.analysis = analyze_region(img, r.rect);
		r.trackability = trackability_score(rgb_to_gray(img), r.rect);
		d.regions.push_back(r);
		commit(d);
		return json_response(200, {{"index", d.regions.size() - 1},
								   {"region", r},
								   {"trackable", r.trackability >= kTrackableScore},
								   {"revision", d.revision}});
	}

	Response plan(const std::string& id, const Json& body)
	{
		const auto d = load(id);
		detail::only_keys(body, {"ecc", "sheet", "min_module"}, "plan request");
		Json opts = {{"ecc", body.value("ecc", to_string(d.codec.ecc))},
					 {"density_percent", d.codec.density_percent},
					 {"module_mm", body.value("min_module", 0.0)}};
		opts["sheet"] = body.contains("sheet") ? body.at("sheet") : Json(d.codec.sheet);
		const auto o = opts.get<EmbedOptions>();
		const auto p = max_capacity(o.sheet, o.ecc, default_module(o));
		Json preview = Json::array();
		for (const auto& pl : p.layout.placements)
			preview.push_back({{"x_mm", pl.x_mm}, {"y_mm", pl.y_mm}, {"size_mm", p.layout.code_mm()}});
		return json_response(200, {{"plan", p}, {"preview", preview}, {"density_percent", o.density_percent}});
	}

	Response export_project(const std::string& id, const Json& body)
	{
		const auto lock = project_lock(id);
		std::lock_guard g(*lock);
		auto d = load(id);
		check_revision(d, body);
		const auto built = build_print_job(d, source_image(d));
		const auto files = encode_print_job(built.job);
		ExportRef ref;
		ref.cmy = store_.put_blob(files.cmy_png);
		ref.ir = store_.put_blob(files.ir_png);
		ref.manifest = store_.put_blob(as_bytes(files.manifest_json));
		Json extra = Json::object();
		if (built.online) {
			store_.save_bundle(built.online->bundle);
			ref.bundle = built.online->bundle.id;
			extra = {{"bundle", ref.bundle}, {"payloads", built.online->payloads}};
		}
		ref.revision = d.revision + 1;
		d.export_ref = ref;
		commit(d);
		auto url = [](const std::string& h) { return Json{{"blob", h}, {"url", "/blobs/" + h}}; };
		Json out = {{"revision", d.revision},
					{"manifest", Json::parse(files.manifest_json)},
					{"artifacts", {{"cmy", url(ref.cmy)}, {"ir", url(ref.ir)}, {"manifest", url(ref.manifest)}}}};
		out.update(extra);
		return json_response(200, out);
	}

	Response simulate_project(const Json& body)
	{
		detail::only_keys(body, {"project", "params", "count"}, "simulate request");
		const auto id = body.at("project").get<std::string>();
		const auto lock = project_lock(id);
		std::lock_guard g(*lock);
		const auto d = load(id);
		const auto params = body.value("params", Json::object()).get<CaptureParams>();
		const int count = body.value("count", 1);
		if (count < 1 || count > 64)
			throw ValidationError("count must be in 1..64");
		const auto ideal = render_ideal(build_print_job(d, source_image(d)).job, params);
		const auto sims = count == 1 ? std::vector<SimImage>{simulate(ideal, params)}
									 : augment_batch(ideal, count, params.seed, params);
		Json frames = Json::array();
		for (std::size_t i = 0; i < sims.size(); ++i) {
			const auto& s = sims[i];
			const auto h = store_.put_blob(png::encode(s.pixels));
			frames.push_back({{"blob", h},
							  {"url", "/blobs/" + h},
							  {"seed", count == 1 ? params.seed : batch_seed(params.seed, i)},
							  {"width", s.pixels.width()},
							  {"height", s.pixels.height()},
							  {"px_per_mm", s.px_per_mm},
							  {"sheet_to_frame", s.sheet_to_frame}});
		}
		return json_response(200, {{"project", id}, {"revision", d.revision}, {"frames", frames}});
	}

	Response read(const Request& req)
	{
		const auto bytes = image_bytes(req);
		if (!png::looks_like_png(as_bytes(bytes)))
			throw UnsupportedFormat("capture must be a PNG");
		reader::ReadParams rp;
		if (auto it = req.files.find("params"); it != req.files.end())
			rp.binarize = Json::parse(it->second.content).get<reader::BinarizeParams>();
		else if (auto q = req.query.find("module_px"); q != req.query.end())
			rp.binarize = reader::BinarizeParams::for_module_px(std::stod(q->second));
		return json_response(200, read_report(reader::read_sheet(png::decode_gray(as_bytes(bytes)), rp)));
	}

	Response content(const std::string& bundle_id, const std::string& region)
	{
		const auto b = store_.load_bundle(bundle_id);
		if (!b)
			throw NotFound("unknown bundle '" + bundle_id + "'");
		int index = -1;
		if (!region.empty() && region.size() < 6 && std::all_of(region.begin(), region.end(), ::isdigit))
			index = std::stoi(region);
		const auto it = b->frames.find(index);
		if (it == b->frames.end())
			throw NotFound("bundle '" + bundle_id + "' has no region " + region);
		return json_response(200, {{"bundle", bundle_id}, {"region", index}, {"frames", it->second}});
	}

	Response blob(const std::string& hash)
	{
		const auto bytes = store_.get_blob(hash);
		if (!bytes)
			throw NotFound("unknown blob '" + hash + "'");
		const bool is_png = png::looks_like_png(*bytes);
		return {200, is_png ? "image/png" : "application/json", std::string(bytes->begin(), bytes->end())};
	}

	Store store_;
	Clock clock_;
	std::mutex locks_mutex_;
	std::map<std::string, std::shared_ptr<std::mutex>> locks_;
	std::mt19937_64 rng_{std::random_device{}()};
};

} // namespace irmark::service

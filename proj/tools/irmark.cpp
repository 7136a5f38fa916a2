/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

// irmark command line: every pipeline stage plus the HTTP service.

#include "irmark/roundtrip.hpp"
#include "irmark/service/server.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace irmark;

namespace {

struct Common
{
	std::string config;
	std::optional<std::uint64_t> seed;
	bool json_errors = false;
};

struct EmbedFlags
{
	std::optional<std::string> sheet, ecc;
	std::optional<int> ink;
	std::optional<double> module, dpi;

	void add(CLI::App* cmd)
	{
		cmd->add_option("--sheet", sheet, "letter | half-letter | WxH (mm)");
		cmd->add_option("--ecc", ecc, "L | M | Q | H");
		cmd->add_option("--ink", ink, "IR density class: 81 | 102 | 155");
		cmd->add_option("--module", module, "module size in mm (default: smallest detectable)");
		cmd->add_option("--dpi", dpi, "raster resolution");
	}

	EmbedOptions apply(EmbedOptions o) const
	{
		if (sheet) {
			const auto x = sheet->find('x');
			o.sheet = x == std::string::npos ? parse_sheet(*sheet)
											 : SheetSpec::custom(std::stod(sheet->substr(0, x)), std::stod(sheet->substr(x + 1)));
		}
		if (ecc)
			o.ecc = qr::parse_ecc(*ecc);
		if (ink) {
			if (!is_density_class(*ink))
				throw ValidationError("--ink must be one of 81, 102, 155");
			o.density_percent = *ink;
		}
		if (module)
			o.module_mm = *module;
		if (dpi)
			o.dpi = *dpi;
		return o;
	}
};

Config load(const Common& c)
{
	auto cfg = load_config(c.config);
	if (c.seed)
		cfg.capture.seed = *c.seed;
	return cfg;
}

void print_json(const Json& j) { std::cout << j.dump(2) << "\n"; }

Bytes read_payload(const std::optional<std::string>& text, const std::optional<std::string>& file)
{
	if (text && file)
		throw ValidationError("give either --text or --payload-file");
	if (file)
		return png::read_file(*file);
	if (text)
		return to_bytes(*text);
	throw ValidationError("a payload is required: --text or --payload-file");
}

Rect parse_rect(const std::string& s)
{
	int v[4];
	if (std::sscanf(s.c_str(), "%d,%d,%d,%d", &v[0], &v[1], &v[2], &v[3]) != 4)
		throw ValidationError("--rect must be x,y,width,height");
	return {v[0], v[1], v[2], v[3]};
}

std::string capacity_csv()
{
	std::string out = "sheet,ink,ecc,smallest_mm,version,codes,chars,paper_chars,delta_pct\n";
	char line[160];
	for (const auto& r : capacity_table()) {
		std::snprintf(line, sizeof line, "%s,%d,%c,%.2f,%d,%d,%d,%d,%.2f\n", r.sheet.c_str(), r.ink_percent,
					  qr::ecc_name(r.ecc), r.smallest_mm, r.version, r.codes, r.chars, r.reported_chars, r.delta_pct);
		out += line;
	}
	return out;
}

int exit_code(const Error& e)
{
	if (e.code() == "io")
		return 4;
	return 3;
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"irmark: invisible IR-ink codes for printed documents"};
	app.require_subcommand(1);
	app.fallthrough();
	Common common;
	app.add_option("--config", common.config, "JSON config file")->check(CLI::ExistingFile);
	app.add_option("--seed", common.seed, "seed for simulated captures");
	app.add_flag("--json", common.json_errors, "machine-readable errors on stderr");

	// analyze
	auto* analyze = app.add_subcommand("analyze", "ink recommendation and trackability for a document region");
	std::string analyze_image, analyze_rect;
	analyze->add_option("image", analyze_image, "document PNG")->required()->check(CLI::ExistingFile);
	analyze->add_option("--rect", analyze_rect, "x,y,width,height in pixels (default: whole image)");

	// plan
	auto* plan = app.add_subcommand("plan", "maximum-capacity code layout for a sheet");
	EmbedFlags plan_flags;
	plan_flags.add(plan);

	// embed
	auto* embed = app.add_subcommand("embed", "embed offline text and write print artifacts");
	EmbedFlags embed_flags;
	embed_flags.add(embed);
	std::optional<std::string> embed_text, embed_file, embed_doc;
	std::string embed_out;
	embed->add_option("--text", embed_text, "payload text");
	embed->add_option("--payload-file", embed_file, "payload file")->check(CLI::ExistingFile);
	embed->add_option("--doc", embed_doc, "document PNG printed in CMY")->check(CLI::ExistingFile);
	embed->add_option("--out", embed_out, "output directory")->required();

	// export
	auto* exp = app.add_subcommand("export", "export a stored project's print artifacts");
	std::string export_project, export_out;
	std::optional<std::string> export_data;
	exp->add_option("--project", export_project, "project id")->required();
	exp->add_option("--data-dir", export_data, "service data directory");
	exp->add_option("--out", export_out, "output directory")->required();

	// simulate
	auto* sim = app.add_subcommand("simulate", "simulated NIR captures of exported artifacts");
	std::string sim_manifest, sim_out;
	int sim_count = 1;
	std::optional<double> sim_ppm;
	sim->add_option("manifest", sim_manifest, "manifest.json from embed/export")->required()->check(CLI::ExistingFile);
	sim->add_option("--count", sim_count, "number of captures")->check(CLI::Range(1, 100000));
	sim->add_option("--px-per-mm", sim_ppm, "capture scale (overrides config)");
	sim->add_option("--out", sim_out, "output directory")->required();

	// read
	auto* rd = app.add_subcommand("read", "detect and decode codes in a capture");
	std::string read_image;
	std::optional<double> read_module_px;
	rd->add_option("image", read_image, "capture PNG")->required()->check(CLI::ExistingFile);
	rd->add_option("--module-px", read_module_px, "expected pixels per module; selects matching binarizer settings");

	// roundtrip
	auto* rt = app.add_subcommand("roundtrip", "embed, simulate a capture, read back and compare");
	EmbedFlags rt_flags;
	rt_flags.add(rt);
	std::optional<std::string> rt_text, rt_file;
	double rt_ppmod = 7.0;
	rt->add_option("--text", rt_text, "payload text");
	rt->add_option("--payload-file", rt_file, "payload file")->check(CLI::ExistingFile);
	rt->add_option("--px-per-module", rt_ppmod, "camera scale on the smallest module of the sheet");

	// capacity-table
	auto* table = app.add_subcommand("capacity-table", "capacity reproduction for all measured configurations (CSV)");

	// serve
	auto* serve = app.add_subcommand("serve", "run the HTTP API");
	std::optional<int> serve_port;
	std::optional<std::string> serve_data, serve_static;
	serve->add_option("--port", serve_port, "listen port");
	serve->add_option("--data-dir", serve_data, "data directory");
	serve->add_option("--static", serve_static, "built authoring UI to serve at /");

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		return app.exit(e);
	}

	try {
		const auto cfg = load(common);

		if (*analyze) {
			const auto img = png::read_rgb(analyze_image);
			const Rect rect = analyze_rect.empty() ? Rect{0, 0, img.width(), img.height()} : parse_rect(analyze_rect);
			const double score = trackability_score(rgb_to_gray(img), rect);
			print_json({{"analysis", analyze_region(img, rect)},
						{"trackability_score", score},
						{"trackable", score >= kTrackableScore}});
		} else if (*plan) {
			const auto o = plan_flags.apply(cfg.embed);
			print_json(max_capacity(o.sheet, o.ecc, default_module(o)));
		} else if (*embed) {
			const auto o = embed_flags.apply(cfg.embed);
			const RgbImage doc = embed_doc ? png::read_rgb(*embed_doc) : RgbImage{};
			const auto e = embed_offline(read_payload(embed_text, embed_file), o, doc);
			print_json(export_print_job(e.job, embed_out));
		} else if (*exp) {
			service::Api api(export_data ? std::filesystem::path(*export_data) : cfg.service.data_dir);
			const auto doc = api.handle({"GET", "/projects/" + export_project});
			if (doc.status != 200)
				throw service::NotFound(doc.json().at("message"));
			service::Request req{"POST", "/projects/" + export_project + "/export"};
			req.body = Json{{"revision", doc.json().at("revision")}}.dump();
			const auto out = api.handle(req);
			if (out.status != 200)
				throw ValidationError(out.json().at("message").get<std::string>());
			const auto j = out.json();
			std::filesystem::create_directories(export_out);
			for (const auto& [name, file] : {std::pair{"cmy", "cmy.png"}, {"ir", "ir.png"}, {"manifest", "manifest.json"}}) {
				const auto bytes = api.store().get_blob(j.at("artifacts").at(name).at("blob"));
				png::write_file(std::filesystem::path(export_out) / file, *bytes);
			}
			print_json(j);
		} else if (*sim) {
			auto params = cfg.capture;
			if (sim_ppm)
				params.px_per_mm = *sim_ppm;
			const auto ideal = render_ideal(load_print_job(sim_manifest), params);
			const auto shots = sim_count == 1 ? std::vector<SimImage>{simulate(ideal, params)}
											  : augment_batch(ideal, sim_count, params.seed, params);
			std::filesystem::create_directories(sim_out);
			Json frames = Json::array();
			for (std::size_t i = 0; i < shots.size(); ++i) {
				char name[32];
				std::snprintf(name, sizeof name, "frame_%05zu.png", i);
				png::write(std::filesystem::path(sim_out) / name, shots[i].pixels);
				frames.push_back({{"file", name},
								  {"seed", sim_count == 1 ? params.seed : batch_seed(params.seed, i)},
								  {"px_per_mm", shots[i].px_per_mm},
								  {"sheet_to_frame", shots[i].sheet_to_frame}});
			}
			const Json index = {{"params", params}, {"frames", frames}};
			const auto text = index.dump(2) + "\n";
			png::write_file(std::filesystem::path(sim_out) / "frames.json",
							std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
			print_json(index);
		} else if (*rd) {
			reader::ReadParams rp;
			rp.binarize = read_module_px ? reader::BinarizeParams::for_module_px(*read_module_px) : cfg.binarize;
			print_json(service::read_report(reader::read_sheet(png::read_gray(read_image), rp)));
		} else if (*rt) {
			const auto o = rt_flags.apply(cfg.embed);
			const auto text = read_payload(rt_text, rt_file);
			// Without a config file the nominal capture settings apply.
			auto capture = common.config.empty() ? nominal_capture(capture_scale(o.sheet, o.ecc, rt_ppmod)) : cfg.capture;
			if (common.seed)
				capture.seed = *common.seed;
			const auto r = roundtrip(text, o, capture);
			print_json({{"ok", r.ok},
						{"codes", r.codes},
						{"fragments", r.fragments.size()},
						{"payload_bytes", text.size()},
						{"recovered_bytes", r.payload.size()},
						{"seed", capture.seed}});
			return r.ok ? 0 : 1;
		} else if (*table) {
			std::cout << capacity_csv();
		} else if (*serve) {
			auto sc = cfg.service;
			if (serve_port)
				sc.port = *serve_port;
			if (serve_data)
				sc.data_dir = *serve_data;
			if (serve_static)
				sc.static_dir = *serve_static;
			std::cerr << "irmark: serving " << sc.data_dir.string() << " on " << sc.host << ":" << sc.port << "\n";
			service::serve(sc);
		}
	} catch (const Error& e) {
		if (common.json_errors)
			std::cerr << Json{{"code", e.code()}, {"message", e.what()}}.dump() << "\n";
		else
			std::cerr << "irmark: " << e.what() << "\n";
		return exit_code(e);
	} catch (const std::exception& e) {
		if (common.json_errors)
			std::cerr << Json{{"code", "internal"}, {"message", e.what()}}.dump() << "\n";
		else
			std::cerr << "irmark: " << e.what() << "\n";
		return 5;
	}
	return 0;
}

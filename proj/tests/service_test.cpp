/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#include "irmark/service/server.hpp"

#include <gtest/gtest.h>

#include <barrier>
#include <fstream>
#include <thread>

using namespace irmark;
using namespace irmark::service;

namespace {

std::filesystem::path fresh_dir(const std::string& name)
{
	auto d = std::filesystem::temp_directory_path() / ("irmark_svc_" + name + "_" + std::to_string(::getpid()));
	std::filesystem::remove_all(d);
	return d;
}

// Letter-proportioned document: white page with a textured block at
// (40,40)-(200,200) for online-mode regions.
RgbImage document()
{
	RgbImage img(425, 550, kWhite);
	for (int y = 40; y < 200; ++y)
		for (int x = 40; x < 200; ++x)
			if ((x / 6 + y / 6) % 2)
				img(x, y) = {30, 60, 90};
	return img;
}

std::string png_string(const RgbImage& img)
{
	const auto b = png::encode(img);
	return {b.begin(), b.end()};
}

std::string bytes_string(const std::vector<std::uint8_t>& b) { return {b.begin(), b.end()}; }

Request upload(const std::string& bytes)
{
	Request r{"POST", "/projects"};
	r.files["image"] = {"image/png", bytes};
	return r;
}

Request post(const std::string& path, const Json& body) { return {"POST", path, {}, "application/json", body.dump()}; }
Request get(const std::string& path) { return {"GET", path}; }

std::string fixed_clock() { return "2026-01-01T00:00:00Z"; }

struct ServiceApi : ::testing::Test
{
	std::filesystem::path dir = fresh_dir(::testing::UnitTest::GetInstance()->current_test_info()->name());
	Api api{dir, fixed_clock};

	~ServiceApi() override { std::filesystem::remove_all(dir); }

	std::string create(const RgbImage& img = document())
	{
		const auto r = api.handle(upload(png_string(img)));
		EXPECT_EQ(r.status, 201) << r.body;
		return r.json().at("id");
	}

	int revision(const std::string& id) { return api.handle(get("/projects/" + id)).json().at("revision"); }

	Response settings(const std::string& id, Json body)
	{
		body["revision"] = revision(id);
		return api.handle(post("/projects/" + id + "/settings", body));
	}
};

void expect_error_shape(const Response& r, int status, const std::string& code)
{
	EXPECT_EQ(r.status, status) << r.body;
	const auto j = r.json();
	EXPECT_EQ(j.at("code"), code);
	EXPECT_TRUE(j.at("message").is_string());
	EXPECT_TRUE(j.at("details").is_object());
}

} // namespace

TEST(Encoding, Sha256AndBase64)
{
	EXPECT_EQ(sha256_hex(to_bytes("abc")), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
	for (std::string s : {"", "f", "fo", "foo", "foob", "fooba", "foobar"}) {
		const auto enc = base64_encode(to_bytes(s));
		EXPECT_EQ(to_string(base64_decode(enc)), s);
	}
	EXPECT_EQ(base64_encode(to_bytes("foobar")), "Zm9vYmFy");
	EXPECT_EQ(base64_encode(to_bytes("fo")), "Zm8=");
	EXPECT_THROW(base64_decode("abc"), ValidationError);
}

TEST(Config, DefaultsEnvAndUnknownKeys)
{
	auto no_env = [](const char*) -> std::optional<std::string> { return std::nullopt; };
	EXPECT_EQ(load_config({}, no_env).service.port, 8080);

	const auto dir = fresh_dir("config");
	std::filesystem::create_directories(dir);
	const auto path = dir / "irmark.json";
	std::ofstream(path) << R"({"schema_version": 1, "service": {"port": 9000, "data_dir": "/srv/a"},
		"capture": {"noise_sigma": 0.03, "px_per_mm": 6}, "binarize": {"module_px": 7},
		"embed": {"sheet": "half-letter", "ecc": "M", "density_percent": 155}})";
	auto env = [](const char* name) -> std::optional<std::string> {
		if (std::string(name) == "IRMARK_DATA_DIR")
			return "/srv/b";
		return std::nullopt;
	};
	const auto c = load_config(path, env);
	EXPECT_EQ(c.service.port, 9000);
	EXPECT_EQ(c.service.data_dir, "/srv/b");
	EXPECT_DOUBLE_EQ(c.capture.noise_sigma, 0.03);
	EXPECT_EQ(c.binarize.sauvola_window, reader::BinarizeParams::for_module_px(7).sauvola_window);
	EXPECT_EQ(c.embed.sheet.preset, SheetPreset::HalfLetter);
	EXPECT_EQ(c.embed.ecc, qr::Ecc::M);

	auto port_env = [](const char* name) -> std::optional<std::string> {
		if (std::string(name) == "IRMARK_PORT")
			return "7001";
		return std::nullopt;
	};
	EXPECT_EQ(load_config(path, port_env).service.port, 7001);
	auto bad_port = [](const char* name) -> std::optional<std::string> {
		if (std::string(name) == "IRMARK_PORT")
			return "70x";
		return std::nullopt;
	};
	EXPECT_THROW(load_config(path, bad_port), ValidationError);

	std::ofstream(path) << R"({"capture": {"noise": 0.03}})";
	EXPECT_THROW(load_config(path, no_env), ValidationError);
	std::ofstream(path) << R"({"schema_version": 2})";
	EXPECT_THROW(load_config(path, no_env), ValidationError);
	std::filesystem::remove_all(dir);
}

TEST(Config, CaptureParamsRoundTrip)
{
	CaptureParams p;
	p.px_per_mm = 5.5;
	p.noise_sigma = 0.02;
	p.jitter = {0.05, 0.1, 0.02, 0.03};
	p.corner_offsets = std::array<Point, 4>{Point{0.01, 0}, Point{0, 0.02}, Point{-0.01, 0}, Point{0, -0.02}};
	p.seed = 77;
	const Json j = p;
	EXPECT_EQ(j.at("schema_version"), 1);
	const auto back = j.get<CaptureParams>();
	EXPECT_EQ(Json(back), j);
	EXPECT_THROW(Json({{"perspective", 0.9}}).get<CaptureParams>(), ValidationError);
}

TEST_F(ServiceApi, StoreSaveLoadAndRestartAreByteIdentical)
{
	const auto id = create();
	settings(id, {{"text", "persisted"}, {"codec", {{"ecc", "Q"}}}});
	const auto file = dir / "projects" / (id + ".json");
	const auto before = png::read_file(file);
	Store reopened(dir);
	const auto doc = reopened.load_project(id);
	ASSERT_TRUE(doc);
	EXPECT_EQ(doc->text, "persisted");
	EXPECT_EQ(doc->codec.ecc, qr::Ecc::Q);
	EXPECT_EQ(Json(*doc), Json(*api.store().load_project(id)));
	reopened.save_project(*doc);
	EXPECT_EQ(png::read_file(file), before);
}

TEST_F(ServiceApi, SameImageTwiceIsOneBlob)
{
	const auto a = create(), b = create();
	EXPECT_NE(a, b);
	EXPECT_EQ(api.store().blob_count(), 1u);
	EXPECT_EQ(api.store().project_ids().size(), 2u);
}

TEST_F(ServiceApi, CorruptStoreRefusesToOpen)
{
	const auto id = create();
	const auto file = dir / "projects" / (id + ".json");
	std::ofstream(dir / "projects" / (id + ".json.tmp-1-1")) << "half written";
	EXPECT_NO_THROW(Store{dir});
	EXPECT_FALSE(std::filesystem::exists(dir / "projects" / (id + ".json.tmp-1-1")));

	const auto good = png::read_file(file);
	std::ofstream(file) << "{ not json";
	try {
		Store s(dir);
		FAIL();
	} catch (const IoError& e) {
		EXPECT_NE(std::string(e.what()).find("corrupt store"), std::string::npos);
		EXPECT_NE(std::string(e.what()).find(id), std::string::npos);
	}
	png::write_file(file, good);

	const auto blob = *std::filesystem::directory_iterator(dir / "blobs");
	std::ofstream(blob.path(), std::ios::app) << "tampered";
	EXPECT_THROW(Store{dir}, IoError);
}

TEST_F(ServiceApi, UploadRejectsNonPng)
{
	expect_error_shape(api.handle(upload("GIF89a....")), 422, "unsupported_format");
	expect_error_shape(api.handle(upload("\x89PNG\r\n\x1a\n garbage")), 422, "unsupported_format");
	Request raw{"POST", "/projects", {}, "image/png", png_string(document())};
	EXPECT_EQ(api.handle(raw).status, 201);
}

TEST_F(ServiceApi, ErrorsCarryCodeMessageDetails)
{
	expect_error_shape(api.handle(get("/projects/nope")), 404, "not_found");
	expect_error_shape(api.handle(get("/nowhere")), 404, "not_found");
	expect_error_shape(api.handle(get("/content/nobundle/0")), 404, "not_found");
	expect_error_shape(api.handle(get("/blobs/abc")), 404, "not_found");
	const auto id = create();
	expect_error_shape(api.handle(post("/projects/" + id + "/settings", {{"text", "x"}})), 422, "validation");
	expect_error_shape(settings(id, {{"codec", {{"density_percent", 90}}}}), 422, "validation");
	Request bad = post("/projects/" + id + "/plan", {});
	bad.body = "{oops";
	expect_error_shape(api.handle(bad), 400, "bad_request");
}

TEST_F(ServiceApi, RegionMatchesLibraryCalls)
{
	const auto id = create();
	const auto img = document();
	for (const Rect rect : {Rect{250, 300, 100, 100}, Rect{40, 40, 160, 160}}) {
		const auto r = api.handle(post("/projects/" + id + "/regions", {{"revision", revision(id)}, {"rect", rect}}));
		ASSERT_EQ(r.status, 200) << r.body;
		const auto j = r.json();
		EXPECT_EQ(j.at("region").at("analysis"), Json(analyze_region(img, rect)));
		EXPECT_DOUBLE_EQ(j.at("region").at("trackability_score").get<double>(), trackability_score(rgb_to_gray(img), rect));
	}
	const auto doc = api.handle(get("/projects/" + id)).json();
	ASSERT_EQ(doc.at("regions").size(), 2u);
	// Blank paper takes the lightest class; the blank area is untrackable.
	EXPECT_EQ(doc.at("regions")[0].at("analysis").at("recommendation").at("recommended_percent"), 81);
	EXPECT_EQ(doc.at("regions")[0].at("trackability_score"), 0.0);
	EXPECT_GE(doc.at("regions")[1].at("trackability_score").get<double>(), kTrackableScore);
	EXPECT_EQ(doc.at("revision"), 3);

	const auto out = api.handle(post("/projects/" + id + "/regions", {{"revision", revision(id)}, {"rect", Rect{400, 500, 50, 80}}}));
	expect_error_shape(out, 422, "validation");
}

TEST_F(ServiceApi, PlanMatchesPlanner)
{
	const auto id = create();
	settings(id, {{"codec", {{"density_percent", 81}}}});
	const auto r = api.handle(post("/projects/" + id + "/plan", {{"ecc", "L"}, {"sheet", "letter"}}));
	ASSERT_EQ(r.status, 200) << r.body;
	const auto p = r.json().at("plan");
	EXPECT_EQ(p.at("version"), 7);
	EXPECT_EQ(p.at("codes"), 12);
	EXPECT_EQ(p.at("total_chars"), 1848);
	EXPECT_EQ(r.json().at("preview").size(), 12u);

	for (const char* ecc : {"L", "M", "Q", "H"})
		for (double m : {0.8, 1.0, 1.3}) {
			const auto j = api.handle(post("/projects/" + id + "/plan", {{"ecc", ecc}, {"sheet", "half-letter"}, {"min_module", m}}))
							   .json();
			EXPECT_EQ(j.at("plan"), Json(max_capacity(SheetSpec::half_letter(), qr::parse_ecc(ecc), m)));
		}
	expect_error_shape(api.handle(post("/projects/" + id + "/plan", {{"ecc", "L"}, {"sheet", {{"width_mm", 90}, {"height_mm", 90}}}})),
					   422, "validation");
}

TEST_F(ServiceApi, StaleRevisionConflicts)
{
	const auto id = create();
	const int rev = revision(id);
	EXPECT_EQ(api.handle(post("/projects/" + id + "/settings", {{"revision", rev}, {"text", "a"}})).status, 200);
	const auto r = api.handle(post("/projects/" + id + "/settings", {{"revision", rev}, {"text", "b"}}));
	expect_error_shape(r, 409, "revision_conflict");
	EXPECT_EQ(r.json().at("details").at("current_revision"), rev + 1);
	EXPECT_EQ(api.handle(get("/projects/" + id)).json().at("text"), "a");
}

TEST_F(ServiceApi, ConcurrentRegionPostsOneConflict)
{
	const auto id = create();
	const int rev = revision(id);
	for (int round = 0; round < 5; ++round) {
		const int base = rev + round;
		std::barrier sync(2);
		std::array<int, 2> status{};
		std::vector<std::thread> threads;
		for (int t = 0; t < 2; ++t)
			threads.emplace_back([&, t] {
				sync.arrive_and_wait();
				status[static_cast<std::size_t>(t)] =
					api.handle(post("/projects/" + id + "/regions", {{"revision", base}, {"rect", Rect{10, 10, 50, 50}}}))
						.status;
			});
		for (auto& th : threads)
			th.join();
		std::sort(status.begin(), status.end());
		EXPECT_EQ(status, (std::array<int, 2>{200, 409}));
	}
	EXPECT_EQ(api.handle(get("/projects/" + id)).json().at("regions").size(), 5u);
}

TEST_F(ServiceApi, ExportMatchesLibraryAndIsDeterministic)
{
	const auto id = create();
	settings(id, {{"text", "export me"}, {"codec", {{"density_percent", 155}, {"sheet", "letter"}, {"ecc", "M"}}}});
	const auto a = api.handle(post("/projects/" + id + "/export", {{"revision", revision(id)}}));
	ASSERT_EQ(a.status, 200) << a.body;
	const auto ja = a.json();

	EmbedOptions o;
	o.density_percent = 155;
	o.ecc = qr::Ecc::M;
	const auto files = encode_print_job(embed_offline(to_bytes("export me"), o, document()).job);
	const auto cmy = api.handle(get(ja.at("artifacts").at("cmy").at("url")));
	EXPECT_EQ(cmy.content_type, "image/png");
	EXPECT_EQ(cmy.body, bytes_string(files.cmy_png));
	EXPECT_EQ(api.handle(get(ja.at("artifacts").at("ir").at("url"))).body, bytes_string(files.ir_png));
	EXPECT_EQ(api.handle(get(ja.at("artifacts").at("manifest").at("url"))).body, files.manifest_json);

	const auto b = api.handle(post("/projects/" + id + "/export", {{"revision", revision(id)}})).json();
	EXPECT_EQ(b.at("artifacts"), ja.at("artifacts"));
	EXPECT_EQ(b.at("revision").get<int>(), ja.at("revision").get<int>() + 1);
	const auto doc = api.handle(get("/projects/" + id)).json();
	EXPECT_EQ(doc.at("export").at("cmy"), ja.at("artifacts").at("cmy").at("blob"));
	EXPECT_EQ(doc.at("export").at("revision"), doc.at("revision"));
}

TEST_F(ServiceApi, OverCapacityTextIs422)
{
	const auto id = create();
	settings(id, {{"text", std::string(5000, 'x')}});
	const auto r = api.handle(post("/projects/" + id + "/export", {{"revision", revision(id)}}));
	expect_error_shape(r, 422, "capacity");
	EXPECT_EQ(r.json().at("details").at("required"), 5000);
}

TEST_F(ServiceApi, ExportSimulateReadRoundTrip)
{
	const std::string text = "Round trip through the service: print, capture, read.";
	const auto id = create();
	settings(id, {{"text", text}, {"codec", {{"density_percent", 155}}}});
	const auto ex = api.handle(post("/projects/" + id + "/export", {{"revision", revision(id)}})).json();
	const double module = ex.at("manifest").at("layout").at("module_mm");

	CaptureParams cp;
	cp.px_per_mm = 6.0;
	cp.noise_sigma = 0.02;
	cp.blur_sigma = 0.6;
	cp.perspective = 0.03;
	cp.seed = 3;
	const auto sim = api.handle(post("/simulate", {{"project", id}, {"params", cp}}));
	ASSERT_EQ(sim.status, 200) << sim.body;
	const auto frame = sim.json().at("frames")[0];
	const auto raster = api.handle(get(frame.at("url")));

	EmbedOptions o;
	o.density_percent = 155;
	const auto expected = simulate(render_ideal(embed_offline(to_bytes(text), o, document()).job, cp), cp);
	EXPECT_EQ(raster.body, bytes_string(png::encode(expected.pixels)));

	Request rd{"POST", "/read", {{"module_px", std::to_string(6.0 * module)}}, "image/png", raster.body};
	const auto read = api.handle(rd);
	ASSERT_EQ(read.status, 200) << read.body;
	EXPECT_EQ(to_string(base64_decode(read.json().at("payload_base64").get<std::string>())), text);
	ASSERT_FALSE(read.json().at("fragments").empty());
	EXPECT_TRUE(read.json().at("fragments")[0].contains("binarizer"));

	const auto batch = api.handle(post("/simulate", {{"project", id}, {"params", cp}, {"count", 3}})).json();
	ASSERT_EQ(batch.at("frames").size(), 3u);
	EXPECT_EQ(batch.at("frames")[2].at("seed"), batch_seed(3, 2));
}

TEST_F(ServiceApi, ReadBlankImageIsEmpty)
{
	const auto r = api.handle({"POST", "/read", {}, "image/png", bytes_string(png::encode(GrayImage(200, 150, 220)))});
	ASSERT_EQ(r.status, 200) << r.body;
	EXPECT_TRUE(r.json().at("fragments").empty());
	EXPECT_EQ(r.json().at("payload_base64"), "");
}

TEST_F(ServiceApi, OnlineModeServesBundle)
{
	const auto id = create();
	settings(id, {{"mode", "online"}, {"codec", {{"density_percent", 155}}}});
	const Json frames = {{{"kind", "text"}, {"value", "further instructions"}}, {{"kind", "audio"}, {"value", "blob:1234"}}};
	api.handle(post("/projects/" + id + "/regions", {{"revision", revision(id)}, {"rect", Rect{40, 40, 160, 160}}, {"frames", frames}}));
	const auto ex = api.handle(post("/projects/" + id + "/export", {{"revision", revision(id)}}));
	ASSERT_EQ(ex.status, 200) << ex.body;
	EXPECT_EQ(ex.json().at("payloads"), Json({"ip1:" + id + "/0"}));
	const auto c = api.handle(get("/content/" + id + "/0"));
	ASSERT_EQ(c.status, 200);
	EXPECT_EQ(c.json().at("frames"), frames);
	expect_error_shape(api.handle(get("/content/" + id + "/1")), 404, "not_found");

	CaptureParams cp;
	cp.px_per_mm = 6.0;
	const auto frame = api.handle(post("/simulate", {{"project", id}, {"params", cp}})).json().at("frames")[0];
	const double module = ex.json().at("manifest").at("layout").at("module_mm");
	Request rd{"POST", "/read", {{"module_px", std::to_string(6.0 * module)}}, "image/png",
			   api.handle(get(frame.at("url"))).body};
	const auto online = api.handle(rd).json().at("online");
	ASSERT_EQ(online.size(), 1u);
	EXPECT_EQ(online[0].at("bundle"), id);
	EXPECT_EQ(online[0].at("region"), 0);
}

TEST_F(ServiceApi, OnlineUntrackableRegionRejected)
{
	const auto id = create();
	settings(id, {{"mode", "online"}});
	api.handle(post("/projects/" + id + "/regions",
					{{"revision", revision(id)}, {"rect", Rect{250, 300, 150, 150}}, {"frames", {{{"kind", "text"}, {"value", "x"}}}}}));
	const auto r = api.handle(post("/projects/" + id + "/export", {{"revision", revision(id)}}));
	expect_error_shape(r, 422, "untrackable");
	EXPECT_EQ(r.json().at("details").at("regions"), Json({0}));
}

TEST_F(ServiceApi, HttpTransport)
{
	httplib::Server server;
	install(server, api);
	const int port = server.bind_to_any_port("127.0.0.1");
	std::thread th([&] { server.listen_after_bind(); });
	server.wait_until_ready();

	httplib::Client client("127.0.0.1", port);
	httplib::MultipartFormDataItems items{{"image", png_string(document()), "doc.png", "image/png"}};
	const auto created = client.Post("/projects", items);
	ASSERT_TRUE(created);
	EXPECT_EQ(created->status, 201);
	const auto id = Json::parse(created->body).at("id").get<std::string>();
	const auto got = client.Get("/projects/" + id);
	ASSERT_TRUE(got);
	EXPECT_EQ(got->status, 200);
	EXPECT_EQ(Json::parse(got->body).at("source").at("width"), 425);
	const auto missing = client.Get("/projects/unknown");
	ASSERT_TRUE(missing);
	EXPECT_EQ(missing->status, 404);
	EXPECT_EQ(Json::parse(missing->body).at("code"), "not_found");

	server.stop();
	th.join();
}

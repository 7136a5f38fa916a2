/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// cpp-httplib transport for Api.

#include "api.hpp"

#include <httplib.h>

namespace irmark::service {

inline Request from_httplib(const httplib::Request& r)
{
	Request out;
	out.method = r.method;
	out.path = r.path;
	for (const auto& [k, v] : r.params)
		out.query[k] = v;
	out.content_type = r.get_header_value("Content-Type");
	out.body = r.body;
	for (const auto& [name, file] : r.files)
		out.files[name] = {file.content_type, file.content};
	return out;
}

// Routes every request to `api`; serves `static_dir` (the built authoring
// UI) at / when given.
inline void install(httplib::Server& server, Api& api, const std::filesystem::path& static_dir = {})
{
	auto handler = [&api](const httplib::Request& req, httplib::Response& res) {
		const auto out = api.handle(from_httplib(req));
		res.status = out.status;
		res.set_content(out.body, out.content_type);
	};
	if (!static_dir.empty() && !server.set_mount_point("/", static_dir.string()))
		throw IoError("cannot serve static files from " + static_dir.string());
	const char* pattern = R"(/(projects|simulate|read|content|blobs)(/.*)?)";
	server.Get(pattern, handler);
	server.Post(pattern, handler);
	server.Put(pattern, handler);
	server.Delete(pattern, handler);
}

// Blocks serving `config` until the server is stopped.
inline void serve(const ServiceConfig& config)
{
	Api api(config.data_dir);
	httplib::Server server;
	install(server, api, config.static_dir);
	if (!server.listen(config.host, config.port))
		throw IoError("cannot listen on " + config.host + ":" + std::to_string(config.port));
}

} // namespace irmark::service

/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Data directory: projects/<id>.json, bundles/<id>.json and
// content-addressed blobs/<sha256>. Every file is written to a temporary
// name, flushed and renamed into place.

#include "../png_io.hpp"
#include "encoding.hpp"
#include "project.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>

namespace irmark::service {

class Store
{
public:
	// Opens (creating if needed) and verifies the store. A store with
	// unparsable documents or blobs that do not match their hash is refused.
	explicit Store(std::filesystem::path root) : root_(std::move(root))
	{
		for (auto sub : {"projects", "bundles", "blobs"}) {
			std::error_code ec;
			std::filesystem::create_directories(root_ / sub, ec);
			if (ec)
				throw IoError("cannot create " + (root_ / sub).string() + ": " + ec.message());
		}
		verify();
	}

	const std::filesystem::path& root() const { return root_; }

	std::string put_blob(std::span<const std::uint8_t> bytes)
	{
		const auto hash = sha256_hex(bytes);
		const auto path = root_ / "blobs" / hash;
		if (!std::filesystem::exists(path))
			write_atomic(path, bytes);
		return hash;
	}

	std::optional<std::vector<std::uint8_t>> get_blob(const std::string& hash) const
	{
		if (!is_sha256_hex(hash))
			return std::nullopt;
		const auto path = root_ / "blobs" / hash;
		if (!std::filesystem::exists(path))
			return std::nullopt;
		return png::read_file(path);
	}

	std::size_t blob_count() const { return count(root_ / "blobs"); }

	void save_project(const ProjectDoc& d)
	{
		d.validate();
		write_json(root_ / "projects" / (d.id + ".json"), d);
	}

	std::optional<ProjectDoc> load_project(const std::string& id) const
	{
		if (!safe_id(id))
			return std::nullopt;
		const auto path = root_ / "projects" / (id + ".json");
		if (!std::filesystem::exists(path))
			return std::nullopt;
		return read_json(path).get<ProjectDoc>();
	}

	std::vector<std::string> project_ids() const
	{
		std::vector<std::string> out;
		for (const auto& e : std::filesystem::directory_iterator(root_ / "projects"))
			out.push_back(e.path().stem().string());
		std::sort(out.begin(), out.end());
		return out;
	}

	void save_bundle(const ContentBundle& b) { write_json(root_ / "bundles" / (b.id + ".json"), b); }

	std::optional<ContentBundle> load_bundle(const std::string& id) const
	{
		if (!safe_id(id))
			return std::nullopt;
		const auto path = root_ / "bundles" / (id + ".json");
		if (!std::filesystem::exists(path))
			return std::nullopt;
		return read_json(path).get<ContentBundle>();
	}

	static bool safe_id(const std::string& id)
	{
		if (id.empty() || id.size() > 64)
			return false;
		for (char c : id)
			if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_')
				return false;
		return true;
	}

	// Canonical bytes of a stored document: sorted keys, two-space indent.
	static std::string serialize(const Json& j) { return j.dump(2) + "\n"; }

private:
	static std::size_t count(const std::filesystem::path& dir)
	{
		return static_cast<std::size_t>(std::distance(std::filesystem::directory_iterator(dir), {}));
	}

	static bool is_temp(const std::filesystem::path& p) { return p.filename().string().find(".tmp-") != std::string::npos; }

	void write_json(const std::filesystem::path& path, const Json& j)
	{
		const auto s = serialize(j);
		write_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
	}

	static Json read_json(const std::filesystem::path& path)
	{
		const auto bytes = png::read_file(path);
		try {
			return Json::parse(bytes.begin(), bytes.end());
		} catch (const Json::exception& e) {
			throw IoError(path.string() + " is not valid JSON: " + e.what());
		}
	}

	void write_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
	{
		static std::atomic<unsigned> counter{0};
		const auto tmp = path.string() + ".tmp-" + std::to_string(::getpid()) + "-" + std::to_string(counter++);
		const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
		if (fd < 0)
			throw IoError("cannot write " + tmp);
		std::size_t done = 0;
		while (done < bytes.size()) {
			const auto n = ::write(fd, bytes.data() + done, bytes.size() - done);
			if (n <= 0) {
				::close(fd);
				std::filesystem::remove(tmp);
				throw IoError("short write to " + tmp);
			}
			done += static_cast<std::size_t>(n);
		}
		const bool synced = ::fsync(fd) == 0;
		::close(fd);
		std::error_code ec;
		if (synced)
			std::filesystem::rename(tmp, path, ec);
		if (!synced || ec) {
			std::filesystem::remove(tmp, ec);
			throw IoError("cannot replace " + path.string());
		}
	}

	void verify()
	{
		auto corrupt = [&](const std::filesystem::path& p, const std::string& why) {
			throw IoError("corrupt store at " + root_.string() + ": " + p.filename().string() + ": " + why);
		};
		// Leftovers of interrupted writes never became visible; drop them.
		for (auto sub : {"projects", "bundles", "blobs"})
			for (const auto& e : std::filesystem::directory_iterator(root_ / sub))
				if (is_temp(e.path()))
					std::filesystem::remove(e.path());

		for (const auto& e : std::filesystem::directory_iterator(root_ / "blobs")) {
			const auto name = e.path().filename().string();
			if (!is_sha256_hex(name))
				corrupt(e.path(), "not a content hash");
			if (sha256_hex(png::read_file(e.path())) != name)
				corrupt(e.path(), "content does not match its hash");
		}
		for (const auto& e : std::filesystem::directory_iterator(root_ / "projects"))
			if (auto why = check_document<ProjectDoc>(e.path()))
				corrupt(e.path(), *why);
		for (const auto& e : std::filesystem::directory_iterator(root_ / "bundles"))
			if (auto why = check_document<ContentBundle>(e.path()))
				corrupt(e.path(), *why);
	}

	template <class Doc>
	std::optional<std::string> check_document(const std::filesystem::path& path) const
	{
		if (path.extension() != ".json")
			return "unexpected file";
		try {
			const auto d = read_json(path).get<Doc>();
			if (d.id != path.stem().string())
				return "id does not match file name";
			if constexpr (std::is_same_v<Doc, ProjectDoc>)
				if (!std::filesystem::exists(root_ / "blobs" / d.source_blob))
					return "source image blob missing";
		} catch (const std::exception& ex) {
			return ex.what();
		}
		return std::nullopt;
	}

	std::filesystem::path root_;
};

} // namespace irmark::service

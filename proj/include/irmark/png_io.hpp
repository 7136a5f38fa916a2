/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Lossless raster I/O over libpng's simplified API. Output carries no
// timestamps or text chunks, so identical pixels give identical bytes.

#include "error.hpp"
#include "image.hpp"

#include <png.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <vector>

namespace irmark::png {

namespace detail {

inline std::vector<std::uint8_t> encode(const void* pixels, int width, int height, png_uint_32 format)
{
	png_image image;
	std::memset(&image, 0, sizeof image);
	image.version = PNG_IMAGE_VERSION;
	image.width = static_cast<png_uint_32>(width);
	image.height = static_cast<png_uint_32>(height);
	image.format = format;

	png_alloc_size_t size = 0;
	if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels, 0, nullptr))
		throw IoError(std::string("png encode failed: ") + image.message);
	std::vector<std::uint8_t> out(size);
	if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels, 0, nullptr))
		throw IoError(std::string("png encode failed: ") + image.message);
	out.resize(size);
	return out;
}

template <typename Pixel>
Grid<Pixel> decode(std::span<const std::uint8_t> bytes, png_uint_32 format)
{
	png_image image;
	std::memset(&image, 0, sizeof image);
	image.version = PNG_IMAGE_VERSION;
	if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
		throw ValidationError(std::string("unsupported image format: ") + image.message);
	image.format = format;
	Grid<Pixel> out(static_cast<int>(image.width), static_cast<int>(image.height));
	if (!png_image_finish_read(&image, nullptr, out.data().data(), 0, nullptr)) {
		png_image_free(&image);
		throw ValidationError(std::string("corrupt png: ") + image.message);
	}
	return out;
}

} // namespace detail

inline std::vector<std::uint8_t> encode(const GrayImage& img)
{
	return detail::encode(img.data().data(), img.width(), img.height(), PNG_FORMAT_GRAY);
}

inline std::vector<std::uint8_t> encode(const RgbImage& img)
{
	static_assert(sizeof(RgbColor) == 3);
	return detail::encode(img.data().data(), img.width(), img.height(), PNG_FORMAT_RGB);
}

inline GrayImage decode_gray(std::span<const std::uint8_t> bytes)
{
	return detail::decode<std::uint8_t>(bytes, PNG_FORMAT_GRAY);
}

inline RgbImage decode_rgb(std::span<const std::uint8_t> bytes)
{
	return RgbImage(detail::decode<RgbColor>(bytes, PNG_FORMAT_RGB));
}

inline bool looks_like_png(std::span<const std::uint8_t> bytes)
{
	static constexpr std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
	return bytes.size() >= 8 && std::equal(sig, sig + 8, bytes.begin());
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError("cannot open " + path.string());
	return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
	std::ofstream out(path, std::ios::binary | std::ios::trunc);
	if (!out)
		throw IoError("cannot write " + path.string());
	out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
	if (!out)
		throw IoError("short write to " + path.string());
}

inline GrayImage read_gray(const std::filesystem::path& path) { return decode_gray(read_file(path)); }
inline RgbImage read_rgb(const std::filesystem::path& path) { return decode_rgb(read_file(path)); }
inline void write(const std::filesystem::path& path, const GrayImage& img) { write_file(path, encode(img)); }
inline void write(const std::filesystem::path& path, const RgbImage& img) { write_file(path, encode(img)); }

} // namespace irmark::png

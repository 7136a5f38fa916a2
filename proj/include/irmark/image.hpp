/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace irmark {

struct RgbColor
{
	std::uint8_t r = 0, g = 0, b = 0;
	friend bool operator==(const RgbColor&, const RgbColor&) = default;
};

inline constexpr RgbColor kWhite{255, 255, 255};
inline constexpr RgbColor kBlack{0, 0, 0};

// Axis-aligned pixel rectangle, half-open: [x, x+width) x [y, y+height).
struct Rect
{
	int x = 0, y = 0, width = 0, height = 0;

	bool empty() const noexcept { return width <= 0 || height <= 0; }
	long long area() const noexcept { return empty() ? 0 : static_cast<long long>(width) * height; }
	bool inside(int w, int h) const noexcept
	{
		return !empty() && x >= 0 && y >= 0 && x + width <= w && y + height <= h;
	}
	friend bool operator==(const Rect&, const Rect&) = default;
};

// Dense row-major 2D grid; the common storage behind every raster type.
template <typename T>
class Grid
{
public:
	Grid() = default;
	Grid(int width, int height, T fill = T{}) : width_(width), height_(height)
	{
		if (width < 0 || height < 0)
			throw ValidationError("negative grid dimensions");
		data_.assign(static_cast<std::size_t>(width) * height, fill);
	}

	int width() const noexcept { return width_; }
	int height() const noexcept { return height_; }
	std::size_t size() const noexcept { return data_.size(); }
	bool empty() const noexcept { return data_.empty(); }

	T& operator()(int x, int y) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
	const T& operator()(int x, int y) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }

	// Clamped read for filters that run off the edge.
	const T& at_clamped(int x, int y) const noexcept
	{
		return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
	}

	bool contains(int x, int y) const noexcept { return x >= 0 && y >= 0 && x < width_ && y < height_; }

	std::span<T> row(int y) noexcept { return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)}; }
	std::span<const T> row(int y) const noexcept
	{
		return {data_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
	}

	std::vector<T>& data() noexcept { return data_; }
	const std::vector<T>& data() const noexcept { return data_; }

	friend bool operator==(const Grid&, const Grid&) = default;

private:
	int width_ = 0;
	int height_ = 0;
	std::vector<T> data_;
};

struct RgbImage : Grid<RgbColor>
{
	using Grid<RgbColor>::Grid;
	RgbImage(Grid<RgbColor> g, double dpi_ = 300.0) : Grid<RgbColor>(std::move(g)), dpi(dpi_) {}
	double dpi = 300.0;
};

using GrayImage = Grid<std::uint8_t>;   // 8-bit intensities
using FloatImage = Grid<float>;         // reflectance / normalized intensity
using BinaryImage = Grid<std::uint8_t>; // 1 = foreground (dark), 0 = background

inline GrayImage to_gray8(const FloatImage& img, float scale = 255.0f)
{
	GrayImage out(img.width(), img.height());
	for (std::size_t i = 0; i < img.size(); ++i)
		out.data()[i] = static_cast<std::uint8_t>(std::clamp(std::lround(img.data()[i] * scale), 0L, 255L));
	return out;
}

inline FloatImage to_float(const GrayImage& img)
{
	FloatImage out(img.width(), img.height());
	for (std::size_t i = 0; i < img.size(); ++i)
		out.data()[i] = img.data()[i] / 255.0f;
	return out;
}

inline GrayImage rgb_to_gray(const RgbImage& img)
{
	GrayImage out(img.width(), img.height());
	for (std::size_t i = 0; i < img.size(); ++i) {
		auto c = img.data()[i];
		out.data()[i] = static_cast<std::uint8_t>(std::lround(0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b));
	}
	return out;
}

} // namespace irmark

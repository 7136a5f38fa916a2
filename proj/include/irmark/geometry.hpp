/*
* Copyright 2026 The irmark Authors
*/
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "error.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <span>

namespace irmark {

struct Point
{
	double x = 0, y = 0;

	friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
	friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
	friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
	friend bool operator==(const Point&, const Point&) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

// Projective map of the plane, row-major 3x3.
class Homography
{
public:
	Homography() : m_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}
	explicit Homography(const std::array<double, 9>& m) : m_(m) {}

	Point apply(Point p) const
	{
		const double w = m_[6] * p.x + m_[7] * p.y + m_[8];
		return {(m_[0] * p.x + m_[1] * p.y + m_[2]) / w, (m_[3] * p.x + m_[4] * p.y + m_[5]) / w};
	}

	Homography inverse() const
	{
		const auto& a = m_;
		std::array<double, 9> inv{
			a[4] * a[8] - a[5] * a[7], a[2] * a[7] - a[1] * a[8], a[1] * a[5] - a[2] * a[4],
			a[5] * a[6] - a[3] * a[8], a[0] * a[8] - a[2] * a[6], a[2] * a[3] - a[0] * a[5],
			a[3] * a[7] - a[4] * a[6], a[1] * a[6] - a[0] * a[7], a[0] * a[4] - a[1] * a[3],
		};
		const double det = a[0] * inv[0] + a[1] * inv[3] + a[2] * inv[6];
		if (std::abs(det) < 1e-15)
			throw ValidationError("singular homography");
		for (auto& v : inv)
			v /= det;
		return Homography(inv);
	}

	const std::array<double, 9>& matrix() const { return m_; }

	// Exact map of four source points onto four destination points.
	static std::optional<Homography> from_points(std::span<const Point, 4> src, std::span<const Point, 4> dst)
	{
		double a[8][9] = {};
		for (int i = 0; i < 4; ++i) {
			const auto [x, y] = src[i];
			const auto [u, v] = dst[i];
			double r0[9] = {x, y, 1, 0, 0, 0, -u * x, -u * y, u};
			double r1[9] = {0, 0, 0, x, y, 1, -v * x, -v * y, v};
			std::copy(r0, r0 + 9, a[2 * i]);
			std::copy(r1, r1 + 9, a[2 * i + 1]);
		}
		for (int col = 0; col < 8; ++col) {
			int pivot = col;
			for (int r = col + 1; r < 8; ++r)
				if (std::abs(a[r][col]) > std::abs(a[pivot][col]))
					pivot = r;
			if (std::abs(a[pivot][col]) < 1e-12)
				return std::nullopt;
			std::swap(a[col], a[pivot]);
			for (int r = 0; r < 8; ++r) {
				if (r == col)
					continue;
				const double f = a[r][col] / a[col][col];
				for (int c = col; c < 9; ++c)
					a[r][c] -= f * a[col][c];
			}
		}
		std::array<double, 9> m{};
		for (int i = 0; i < 8; ++i)
			m[i] = a[i][8] / a[i][i];
		m[8] = 1;
		return Homography(m);
	}

private:
	std::array<double, 9> m_;
};

// True when the quad (in order) is strictly convex and not self-intersecting.
inline bool is_convex_quad(std::span<const Point, 4> q)
{
	int sign = 0;
	for (int i = 0; i < 4; ++i) {
		const double c = cross(q[(i + 1) % 4] - q[i], q[(i + 2) % 4] - q[(i + 1) % 4]);
		if (std::abs(c) < 1e-12)
			return false;
		const int s = c > 0 ? 1 : -1;
		if (sign != 0 && s != sign)
			return false;
		sign = s;
	}
	return true;
}

} // namespace irmark

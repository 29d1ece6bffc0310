#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "pedfair/errors.hpp"
#include "pedfair/types.hpp"

namespace pedfair {

inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Two direction vectors count as parallel when their normalized cross
// product is at or below this bound.
inline constexpr double kParallelEps = 1e-9;

// Unsigned angle between two vectors, degrees in [0, 180]. The cosine is
// clamped to [-1, 1] before acos so collinear vectors can never produce NaN
// through rounding.
inline double vec_angle(Vec2 a, Vec2 b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) {
    throw DegenerateGeometryError("vec_angle: zero-length vector");
  }
  const double c = std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
  return std::acos(c) * kRadToDeg;
}

// Knee flexion: angle between the thigh (hip->knee) and shank (knee->ankle)
// directions. 0 means a perfectly straight leg.
inline double knee_flexion(Vec2 hip, Vec2 knee, Vec2 ankle) {
  return vec_angle(knee - hip, ankle - knee);
}

// Angle between the two hip->ankle lines of the left and right leg.
inline double hip_ankle_separation(Vec2 hip_l, Vec2 ankle_l, Vec2 hip_r, Vec2 ankle_r) {
  return vec_angle(ankle_l - hip_l, ankle_r - hip_r);
}

// Intersection of the infinite lines p1 + t*d1 and p2 + s*d2. Returns
// nullopt when the lines are parallel under kParallelEps (cross product
// normalized by both direction norms).
inline std::optional<Vec2> line_intersection(Vec2 p1, Vec2 d1, Vec2 p2, Vec2 d2) {
  const double n1 = norm(d1);
  const double n2 = norm(d2);
  if (n1 == 0.0 || n2 == 0.0) {
    throw DegenerateGeometryError("line_intersection: zero-length direction");
  }
  const double denom = cross(d1, d2);
  if (std::abs(denom) / (n1 * n2) <= kParallelEps) return std::nullopt;
  const double t = cross(p2 - p1, d2) / denom;
  return p1 + t * d1;
}

// Intersection-over-union of two axis-aligned boxes; 0 when disjoint or when
// either box is empty.
inline double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x2(), b.x2()) - std::max(a.x, b.x);
  const double iy = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

}  // namespace pedfair

// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "scenectx/common.hpp"

namespace scenectx {

inline constexpr double kExtentEpsilon = 1e-4;

enum class ObbKind { kInstance, kPart };

// Oriented bounding box. Columns of `axes` are the box axes in world frame;
// `extents` are full side lengths along those columns. Instance boxes keep
// the third axis equal to world +z and carry `yaw`, the angle of the first
// axis about z. When `front` is set, the first axis equals it.
struct Obb {
  Vec3 center = Vec3::Zero();
  Vec3 extents = Vec3::Constant(kExtentEpsilon);
  Mat3 axes = Mat3::Identity();
  double yaw = 0.0;
  std::optional<Vec2> front;
  ObbKind kind = ObbKind::kInstance;
  std::optional<Affordance> affordance;

  Vec3 half_extents() const { return extents / 2.0; }
  // Highest / lowest world z reached by the box.
  double top() const;
  double bottom() const;
  // Center of the face whose outward normal points most upward.
  Vec3 top_face_center() const;
  std::array<Vec3, 8> corners() const;
  // True when p lies inside the box inflated by `margin` along every axis.
  bool contains(const Vec3& p, double margin = 0.0) const;

  bool operator==(const Obb&) const = default;
};

// Oriented rectangle in the XY plane.
struct Rect2 {
  Vec2 center = Vec2::Zero();
  Vec2 axis_u = Vec2::UnitX();  // unit
  Vec2 axis_v = Vec2::UnitY();  // unit, perpendicular to axis_u
  Vec2 half = Vec2::Zero();     // half extents along axis_u / axis_v

  bool contains(const Vec2& p, double margin = 0.0) const;
  std::array<Vec2, 4> corners() const;
  double area() const { return 4.0 * half.x() * half.y(); }
};

// XY footprint of a z-aligned box.
Rect2 footprint(const Obb& box);

// Instance box axes for a given heading: first axis (cos, sin, 0), third +z.
Mat3 z_axes_from_direction(const Vec2& dir);

// Wraps an angle into [0, 2*pi).
double wrap_two_pi(double a);

// Area of the intersection of two convex polygons given in CCW order.
double convex_intersection_area(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

// Intersection-over-union of two z-aligned boxes (footprint overlap times
// z-overlap over union volume).
double iou_zaligned(const Obb& a, const Obb& b);

}  // namespace scenectx

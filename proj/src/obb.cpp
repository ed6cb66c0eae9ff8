// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/obb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scenectx {

double Obb::top() const {
  const Vec3 h = half_extents();
  return center.z() + std::abs(axes(2, 0)) * h.x() + std::abs(axes(2, 1)) * h.y() +
         std::abs(axes(2, 2)) * h.z();
}

double Obb::bottom() const {
  const Vec3 h = half_extents();
  return center.z() - std::abs(axes(2, 0)) * h.x() - std::abs(axes(2, 1)) * h.y() -
         std::abs(axes(2, 2)) * h.z();
}

Vec3 Obb::top_face_center() const {
  int k = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(axes(2, i)) > std::abs(axes(2, k))) k = i;
  }
  const double sign = axes(2, k) >= 0.0 ? 1.0 : -1.0;
  return center + sign * axes.col(k) * (extents[k] / 2.0);
}

std::array<Vec3, 8> Obb::corners() const {
  std::array<Vec3, 8> out;
  const Vec3 h = half_extents();
  for (int i = 0; i < 8; ++i) {
    const double sx = (i & 1) ? 1.0 : -1.0;
    const double sy = (i & 2) ? 1.0 : -1.0;
    const double sz = (i & 4) ? 1.0 : -1.0;
    out[i] = center + axes.col(0) * (sx * h.x()) + axes.col(1) * (sy * h.y()) +
             axes.col(2) * (sz * h.z());
  }
  return out;
}

bool Obb::contains(const Vec3& p, double margin) const {
  const Vec3 local = axes.transpose() * (p - center);
  const Vec3 h = half_extents();
  for (int i = 0; i < 3; ++i) {
    if (std::abs(local[i]) > h[i] + margin) return false;
  }
  return true;
}

bool Rect2::contains(const Vec2& p, double margin) const {
  const Vec2 d = p - center;
  return std::abs(d.dot(axis_u)) <= half.x() + margin &&
         std::abs(d.dot(axis_v)) <= half.y() + margin;
}

std::array<Vec2, 4> Rect2::corners() const {
  const Vec2 u = axis_u * half.x();
  const Vec2 v = axis_v * half.y();
  // CCW when (axis_u, axis_v) is right-handed.
  return {center - u - v, center + u - v, center + u + v, center - u + v};
}

Rect2 footprint(const Obb& box) {
  Rect2 r;
  r.center = box.center.head<2>();
  r.axis_u = box.axes.col(0).head<2>().normalized();
  r.axis_v = Vec2(-r.axis_u.y(), r.axis_u.x());
  r.half = box.extents.head<2>() / 2.0;
  return r;
}

Mat3 z_axes_from_direction(const Vec2& dir) {
  Mat3 m;
  m << dir.x(), -dir.y(), 0.0,
       dir.y(), dir.x(), 0.0,
       0.0, 0.0, 1.0;
  return m;
}

double wrap_two_pi(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(a, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double polygon_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    s += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * s;
}

}  // namespace

// Sutherland-Hodgman clipping of `a` against each edge of convex `b`.
double convex_intersection_area(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  std::vector<Vec2> out = a;
  for (std::size_t i = 0; i < b.size() && !out.empty(); ++i) {
    const Vec2 p = b[i];
    const Vec2 q = b[(i + 1) % b.size()];
    const Vec2 edge = q - p;
    auto side = [&](const Vec2& x) { return cross(edge, x - p); };
    std::vector<Vec2> in = std::move(out);
    out.clear();
    for (std::size_t j = 0; j < in.size(); ++j) {
      const Vec2& cur = in[j];
      const Vec2& nxt = in[(j + 1) % in.size()];
      const double sc = side(cur);
      const double sn = side(nxt);
      if (sc >= 0.0) out.push_back(cur);
      if ((sc >= 0.0) != (sn >= 0.0)) {
        const double t = sc / (sc - sn);
        out.push_back(cur + (nxt - cur) * t);
      }
    }
  }
  if (out.size() < 3) return 0.0;
  return std::max(0.0, polygon_area(out));
}

double iou_zaligned(const Obb& a, const Obb& b) {
  const auto ca = footprint(a).corners();
  const auto cb = footprint(b).corners();
  const double inter_area = convex_intersection_area({ca.begin(), ca.end()}, {cb.begin(), cb.end()});
  const double z_overlap =
      std::max(0.0, std::min(a.top(), b.top()) - std::max(a.bottom(), b.bottom()));
  const double inter = inter_area * z_overlap;
  const double vol_a = a.extents.prod();
  const double vol_b = b.extents.prod();
  const double uni = vol_a + vol_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

}  // namespace scenectx

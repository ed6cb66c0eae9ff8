// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scenectx {

void RelationThresholds::validate() const {
  if (d_offset < 0.0 || d_adjacent < 0.0 || d_near < 0.0 || d_support < 0.0) {
    throw std::invalid_argument("relation thresholds must be non-negative");
  }
  if (!(d_adjacent < d_near)) throw std::invalid_argument("d_adjacent must be below d_near");
}

std::string_view to_token(RelationLabel r) {
  switch (r) {
    case RelationLabel::kInFrontOf: return "in_front_of";
    case RelationLabel::kBehind: return "behind";
    case RelationLabel::kOnLeft: return "on_left";
    case RelationLabel::kOnRight: return "on_right";
    case RelationLabel::kNear: return "near";
    case RelationLabel::kAdjacent: return "adjacent";
    case RelationLabel::kOn: return "on";
    case RelationLabel::kAbove: return "above";
    case RelationLabel::kUnder: return "under";
  }
  return "unknown";
}

std::optional<RelationLabel> relation_from_token(std::string_view token) {
  for (RelationLabel r : kAllRelations) {
    if (to_token(r) == token) return r;
  }
  return std::nullopt;
}

std::optional<RelationLabel> directional(const AbstractedInstance& s, const AbstractedInstance& o,
                                         const RelationThresholds& th) {
  if (!o.obb.front) {
    throw FrontMissing("instance " + std::to_string(o.instance_id) + " has no front");
  }
  const Vec2 front = o.obb.axes.col(0).head<2>();
  const Vec2 left = o.obb.axes.col(1).head<2>();
  const Vec2 d = (s.obb.center - o.obb.center).head<2>();
  const double x = d.dot(front);
  const double y = d.dot(left);
  const double hx = o.obb.extents.x() / 2.0;
  const double hy = o.obb.extents.y() / 2.0;

  if (std::abs(y) <= hy + th.d_offset) {
    if (x > hx) return RelationLabel::kInFrontOf;
    if (x < -hx) return RelationLabel::kBehind;
  }
  if (std::abs(x) <= hx + th.d_offset) {
    if (y > hy) return RelationLabel::kOnLeft;
    if (y < -hy) return RelationLabel::kOnRight;
  }
  return std::nullopt;
}

namespace {

bool footprints_overlap(const Rect2& a, const Rect2& b) {
  const Vec2 d = b.center - a.center;
  for (const Vec2& n : {a.axis_u, a.axis_v, b.axis_u, b.axis_v}) {
    const double ra = a.half.x() * std::abs(a.axis_u.dot(n)) + a.half.y() * std::abs(a.axis_v.dot(n));
    const double rb = b.half.x() * std::abs(b.axis_u.dot(n)) + b.half.y() * std::abs(b.axis_v.dot(n));
    if (std::abs(d.dot(n)) > ra + rb) return false;
  }
  return true;
}

// Distance from the rectangle center to its boundary along unit direction w.
double exit_distance(const Rect2& r, const Vec2& w) {
  double t = std::numeric_limits<double>::infinity();
  const double cu = std::abs(w.dot(r.axis_u));
  const double cv = std::abs(w.dot(r.axis_v));
  if (cu > 0.0) t = std::min(t, r.half.x() / cu);
  if (cv > 0.0) t = std::min(t, r.half.y() / cv);
  return t;
}

}  // namespace

double surface_gap(const Obb& a, const Obb& b) {
  const Rect2 ra = footprint(a);
  const Rect2 rb = footprint(b);
  if (footprints_overlap(ra, rb)) return 0.0;
  const Vec2 d = rb.center - ra.center;
  const double len = d.norm();
  if (len == 0.0) return 0.0;
  const Vec2 w = d / len;
  const double ea = exit_distance(ra, w);
  const double eb = exit_distance(rb, -w);
  return std::max(0.0, len - (ea + eb));
}

std::optional<RelationLabel> distance(const AbstractedInstance& s, const AbstractedInstance& o,
                                      const RelationThresholds& th) {
  const double gap = surface_gap(s.obb, o.obb);
  if (gap <= th.d_adjacent) return RelationLabel::kAdjacent;
  if (gap <= th.d_near) return RelationLabel::kNear;
  return std::nullopt;
}

const Obb& support_surface(const AbstractedInstance& o) {
  if (const Obb* p = o.part(Affordance::kSittable)) return *p;
  if (const Obb* p = o.part(Affordance::kSupportable)) return *p;
  return o.obb;
}

std::optional<RelationLabel> support(const AbstractedInstance& s, const AbstractedInstance& o,
                                     const RelationThresholds& th) {
  if (!footprint(o.obb).contains(s.obb.center.head<2>())) return std::nullopt;
  const Obb& surface = support_surface(o);
  const double gap = s.obb.bottom() - surface.top();
  // `on` also needs s to sit higher than o, which keeps on(s,o) and on(o,s)
  // exclusive for thin boxes.
  if (std::abs(gap) <= th.d_support && s.obb.center.z() > o.obb.center.z()) {
    return RelationLabel::kOn;
  }
  if (gap > th.d_support) return RelationLabel::kAbove;
  if (s.obb.top() < o.obb.bottom() - th.d_support) return RelationLabel::kUnder;
  return std::nullopt;
}

std::set<PairRelation> relations_for_pair(const AbstractedInstance& s,
                                          const AbstractedInstance& o,
                                          const RelationThresholds& th) {
  std::set<PairRelation> out;
  if (o.obb.front) {
    if (auto r = directional(s, o, th)) out.insert({*r, true});
  }
  if (s.obb.front) {
    if (auto r = directional(o, s, th)) out.insert({*r, false});
  }
  if (auto r = distance(s, o, th)) {
    out.insert({*r, true});
    out.insert({*r, false});
  }
  if (auto r = support(s, o, th)) out.insert({*r, true});
  if (auto r = support(o, s, th)) out.insert({*r, false});
  return out;
}

}  // namespace scenectx

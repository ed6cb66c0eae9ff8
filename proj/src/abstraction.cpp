// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/abstraction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

namespace scenectx {

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Sets `front` on an instance box and re-expresses the box so that its first
// axis is the front.
Obb with_front(const Obb& obb, const Vec2& front) {
  Obb out = obb;
  const Vec2 u = obb.axes.col(0).head<2>();
  const bool along_first = std::abs(front.dot(u)) >= 0.5;
  out.front = front;
  out.axes = z_axes_from_direction(front);
  out.yaw = wrap_two_pi(std::atan2(front.y(), front.x()));
  if (!along_first) std::swap(out.extents.x(), out.extents.y());
  return out;
}

}  // namespace

std::vector<Vec2> convex_hull_xy(std::span<const Vec3> points) {
  std::vector<Vec2> pts;
  pts.reserve(points.size());
  for (const Vec3& p : points) pts.emplace_back(p.x(), p.y());
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Vec2& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

Obb fit_zobb(std::span<const Vec3> points) {
  if (points.size() < 3) throw InsufficientPoints("instance box needs at least 3 points");
  const std::vector<Vec2> hull = convex_hull_xy(points);
  const std::size_t h = hull.size();
  if (h < 3) throw InsufficientPoints("points are horizontally collinear or coincident");

  // Rotating calipers. For each hull edge the rectangle has one side on the
  // edge; the three other supporting vertices only ever advance.
  double best_area = std::numeric_limits<double>::infinity();
  Vec2 best_dir = Vec2::UnitX();
  std::size_t right = 1, top = 1, left = 1;
  for (std::size_t i = 0; i < h; ++i) {
    const Vec2 u = (hull[(i + 1) % h] - hull[i]).normalized();
    const Vec2 v(-u.y(), u.x());
    if (i == 0) right = 1;
    while (u.dot(hull[(right + 1) % h]) > u.dot(hull[right])) right = (right + 1) % h;
    if (i == 0) top = right;
    while (v.dot(hull[(top + 1) % h]) > v.dot(hull[top])) top = (top + 1) % h;
    if (i == 0) left = top;
    while (u.dot(hull[(left + 1) % h]) < u.dot(hull[left])) left = (left + 1) % h;

    const double width = u.dot(hull[right]) - u.dot(hull[left]);
    const double height = v.dot(hull[top]) - v.dot(hull[i]);
    const double area = width * height;
    if (area < best_area) {
      best_area = area;
      best_dir = u;
    }
  }

  constexpr double quarter = std::numbers::pi / 2.0;
  double yaw = std::fmod(std::atan2(best_dir.y(), best_dir.x()), quarter);
  if (yaw < 0.0) yaw += quarter;
  if (yaw >= quarter) yaw = 0.0;
  const Vec2 u(std::cos(yaw), std::sin(yaw));
  const Vec2 v(-u.y(), u.x());

  double min_u = std::numeric_limits<double>::infinity(), max_u = -min_u;
  double min_v = min_u, max_v = -min_u;
  double min_z = min_u, max_z = -min_u;
  for (const Vec3& p : points) {
    const Vec2 q = p.head<2>();
    min_u = std::min(min_u, u.dot(q));
    max_u = std::max(max_u, u.dot(q));
    min_v = std::min(min_v, v.dot(q));
    max_v = std::max(max_v, v.dot(q));
    min_z = std::min(min_z, p.z());
    max_z = std::max(max_z, p.z());
  }

  Obb box;
  box.kind = ObbKind::kInstance;
  box.yaw = yaw;
  box.axes = z_axes_from_direction(u);
  const Vec2 c = u * ((min_u + max_u) / 2.0) + v * ((min_v + max_v) / 2.0);
  box.center = Vec3(c.x(), c.y(), (min_z + max_z) / 2.0);
  box.extents = Vec3(max_u - min_u, max_v - min_v, max_z - min_z).cwiseMax(kExtentEpsilon);
  return box;
}

Obb fit_part_obb(std::span<const Vec3> points) {
  if (points.size() < 3) throw InsufficientPoints("part box needs at least 3 points");

  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  // Eigen sorts ascending; the box wants descending.
  Mat3 axes;
  for (int i = 0; i < 2; ++i) {
    Vec3 e = solver.eigenvectors().col(2 - i);
    Eigen::Index k = 0;
    e.cwiseAbs().maxCoeff(&k);
    if (e[k] < 0.0) e = -e;
    axes.col(i) = e;
  }
  axes.col(2) = axes.col(0).cross(axes.col(1)).normalized();

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& p : points) {
    const Vec3 local = axes.transpose() * (p - mean);
    lo = lo.cwiseMin(local);
    hi = hi.cwiseMax(local);
  }

  Obb box;
  box.kind = ObbKind::kPart;
  box.axes = axes;
  box.center = mean + axes * ((lo + hi) / 2.0);
  box.extents = (hi - lo).cwiseMax(kExtentEpsilon);
  return box;
}

FrontEstimate estimate_front(const Obb& obb, const std::string& category,
                             std::span<const Vec3> normals,
                             const std::map<Affordance, Obb>& parts,
                             const AbstractionOptions& options) {
  FrontEstimate out{obb, FrontRule::kFrontless};
  out.obb.front.reset();
  if (options.frontless_categories.contains(category)) return out;

  const Vec2 u = obb.axes.col(0).head<2>();
  const Vec2 v = obb.axes.col(1).head<2>();
  const std::array<Vec2, 4> faces = {u, Vec2(-u), v, Vec2(-v)};

  auto sit = parts.find(Affordance::kSittable);
  auto lean = parts.find(Affordance::kLeanable);
  if (sit != parts.end() && lean != parts.end()) {
    const Vec2 dir = (sit->second.center - lean->second.center).head<2>();
    if (dir.norm() > 1e-9) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < faces.size(); ++i) {
        if (faces[i].dot(dir) > faces[best].dot(dir)) best = i;
      }
      out.obb = with_front(obb, faces[best]);
      out.rule = FrontRule::kAffordance;
      return out;
    }
  }

  const bool first_is_longer = obb.extents.x() >= obb.extents.y();
  const Vec2 longer = first_is_longer ? u : v;
  const Vec2 shorter = first_is_longer ? v : u;
  const Vec2 axis = options.long_axis_categories.contains(category) ? longer : shorter;

  Vec2 mean = Vec2::Zero();
  for (const Vec3& n : normals) mean += n.head<2>();
  if (!normals.empty()) mean /= static_cast<double>(normals.size());
  if (mean.norm() < options.degenerate_normal_threshold) {
    out.rule = FrontRule::kDegenerateNormals;
    return out;
  }
  out.obb = with_front(obb, axis.dot(mean) >= 0.0 ? axis : Vec2(-axis));
  out.rule = FrontRule::kExtentAndNormals;
  return out;
}

AbstractionResult abstract_instance(const InstanceRecord& record,
                                    const AbstractionOptions& options) {
  AbstractionResult result;
  AbstractedInstance& inst = result.instance;
  inst.instance_id = record.instance_id;
  inst.category = record.category;
  const Obb zobb = fit_zobb(record.points);

  for (const auto& [aff, pts] : record.parts) {
    try {
      Obb part = fit_part_obb(pts);
      part.affordance = aff;
      inst.part_obbs.emplace(aff, part);
      inst.attributes.insert(aff);
    } catch (const InsufficientPoints& e) {
      result.warnings.push_back("instance " + std::to_string(record.instance_id) + ": dropped " +
                                std::string(to_token(aff)) + " part (" + e.what() + ")");
    }
  }

  FrontEstimate front = estimate_front(zobb, inst.category, record.normals, inst.part_obbs, options);
  inst.obb = front.obb;
  result.front_rule = front.rule;
  if (front.rule == FrontRule::kDegenerateNormals) {
    result.warnings.push_back("instance " + std::to_string(record.instance_id) +
                              ": degenerate normals, front left unset");
  }
  return result;
}

}  // namespace scenectx

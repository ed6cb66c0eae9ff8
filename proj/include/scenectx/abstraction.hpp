// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "scenectx/obb.hpp"
#include "scenectx/semantic_map.hpp"

namespace scenectx {

struct AbstractedInstance {
  InstanceId instance_id = 0;
  std::string category;
  Obb obb;
  std::map<Affordance, Obb> part_obbs;
  std::set<Affordance> attributes;  // always the key set of part_obbs

  const Obb* part(Affordance a) const {
    auto it = part_obbs.find(a);
    return it == part_obbs.end() ? nullptr : &it->second;
  }

  bool operator==(const AbstractedInstance&) const = default;
};

struct AbstractionOptions {
  // Categories whose front lies along the longer horizontal extent.
  std::set<std::string> long_axis_categories = {"bed"};
  // Categories that never receive a front.
  std::set<std::string> frontless_categories = {"table", "floor", "wall", "ceiling", "otherprops"};
  double degenerate_normal_threshold = 1e-6;
};

// Which heuristic produced (or withheld) the front direction.
enum class FrontRule { kAffordance, kExtentAndNormals, kFrontless, kDegenerateNormals };

struct FrontEstimate {
  Obb obb;
  FrontRule rule = FrontRule::kExtentAndNormals;
};

struct AbstractionResult {
  AbstractedInstance instance;
  FrontRule front_rule = FrontRule::kExtentAndNormals;
  std::vector<std::string> warnings;
};

// Z-aligned minimum-footprint box: rotating calipers over the XY convex hull,
// z-extent from the point range. Yaw is normalized to [0, pi/2).
Obb fit_zobb(std::span<const Vec3> points);

// Free box along the principal axes of the point covariance (descending
// eigenvalues, right-handed).
Obb fit_part_obb(std::span<const Vec3> points);

FrontEstimate estimate_front(const Obb& obb, const std::string& category,
                             std::span<const Vec3> normals,
                             const std::map<Affordance, Obb>& parts,
                             const AbstractionOptions& options = {});

AbstractionResult abstract_instance(const InstanceRecord& record,
                                    const AbstractionOptions& options = {});

// XY convex hull in CCW order without collinear points (Andrew's monotone chain).
std::vector<Vec2> convex_hull_xy(std::span<const Vec3> points);

}  // namespace scenectx

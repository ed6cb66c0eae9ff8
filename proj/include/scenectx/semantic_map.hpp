// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scenectx/common.hpp"

namespace scenectx {

// One labeled surface sample in the z-up world frame (meters).
struct LabeledObservation {
  Vec3 position = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  InstanceId instance_id = 0;
  std::string category;
  std::optional<Affordance> affordance;
};

using Frame = std::vector<LabeledObservation>;

struct VoxelKey {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  auto operator<=>(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const noexcept {
    // Teschner et al. spatial hash primes.
    return static_cast<std::size_t>(k.x * 73856093LL) ^
           static_cast<std::size_t>(k.y * 19349663LL) ^
           static_cast<std::size_t>(k.z * 83492791LL);
  }
};

struct InstanceRecord {
  InstanceId instance_id = 0;
  std::string category;
  std::vector<Vec3> points;   // voxel centers
  std::vector<Vec3> normals;  // mean per-voxel unit normals, parallel to points
  std::map<Affordance, std::vector<Vec3>> parts;
};

struct SemanticMapOptions {
  double voxel_size = 0.04;
  std::size_t min_voxels = 10;
  double normal_tolerance = 1e-6;
};

// Sparse voxel map with independent vote layers for instance, category and
// affordance labels. Single writer; copies are immutable snapshots.
class LabeledVoxelMap {
 public:
  explicit LabeledVoxelMap(SemanticMapOptions options = {});

  // Adds one vote per layer for every observation. The whole frame is
  // validated first and rejected with MalformedObservation on any bad sample.
  void integrate_frame(std::span<const LabeledObservation> frame);

  // Returns and clears the set of instance ids touched since the last drain.
  std::set<InstanceId> drain_changed();

  std::vector<InstanceRecord> extract_instances() const;
  // Same as extract_instances() restricted to the given ids.
  std::vector<InstanceRecord> extract_instances(const std::set<InstanceId>& ids) const;

  std::shared_ptr<const LabeledVoxelMap> snapshot() const {
    return std::make_shared<const LabeledVoxelMap>(*this);
  }

  VoxelKey voxel_of(const Vec3& p) const;
  Vec3 voxel_center(const VoxelKey& k) const;

  // Resolved labels of one voxel; nullopt when the voxel is absent from that layer.
  std::optional<InstanceId> instance_at(const VoxelKey& k) const;
  std::optional<std::string> category_at(const VoxelKey& k) const;
  std::optional<Affordance> affordance_at(const VoxelKey& k) const;

  std::uint64_t version() const { return version_; }
  const SemanticMapOptions& options() const { return options_; }
  std::size_t voxel_count() const { return instance_layer_.size(); }
  const std::set<InstanceId>& pending_changes() const { return changed_; }

  // Raw layer access, mainly for tests of the layer invariants.
  const std::unordered_map<VoxelKey, std::map<InstanceId, std::uint32_t>, VoxelKeyHash>&
  instance_layer() const { return instance_layer_; }
  const std::unordered_map<VoxelKey, std::map<std::string, std::uint32_t>, VoxelKeyHash>&
  category_layer() const { return category_layer_; }
  const std::unordered_map<VoxelKey, std::map<Affordance, std::uint32_t>, VoxelKeyHash>&
  affordance_layer() const { return affordance_layer_; }

 private:
  void validate(const LabeledObservation& obs, std::size_t index) const;
  std::map<InstanceId, std::vector<VoxelKey>> voxels_by_instance() const;
  std::vector<InstanceRecord> build_records(
      const std::map<InstanceId, std::vector<VoxelKey>>& groups) const;

  SemanticMapOptions options_;
  std::unordered_map<VoxelKey, std::map<InstanceId, std::uint32_t>, VoxelKeyHash> instance_layer_;
  std::unordered_map<VoxelKey, std::map<std::string, std::uint32_t>, VoxelKeyHash> category_layer_;
  std::unordered_map<VoxelKey, std::map<Affordance, std::uint32_t>, VoxelKeyHash> affordance_layer_;
  std::unordered_map<VoxelKey, Vec3, VoxelKeyHash> normal_sums_;
  std::uint64_t version_ = 0;
  std::set<InstanceId> changed_;
};

}  // namespace scenectx

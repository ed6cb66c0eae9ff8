// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/semantic_map.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scenectx {

std::string_view to_token(Affordance a) {
  switch (a) {
    case Affordance::kSittable: return "sittable";
    case Affordance::kSupportable: return "supportable";
    case Affordance::kPushable: return "pushable";
    case Affordance::kOpenable: return "openable";
    case Affordance::kLeanable: return "leanable";
  }
  return "unknown";
}

std::optional<Affordance> affordance_from_token(std::string_view token) {
  for (Affordance a : kAllAffordances) {
    if (to_token(a) == token) return a;
  }
  return std::nullopt;
}

namespace {

// Plurality winner of a vote table. Ties go to the smallest key under `less`.
template <class Key, class Less = std::less<Key>>
std::optional<Key> plurality(const std::map<Key, std::uint32_t>& votes, Less less = {}) {
  std::optional<Key> best;
  std::uint32_t best_count = 0;
  for (const auto& [key, count] : votes) {
    if (!best || count > best_count || (count == best_count && less(key, *best))) {
      best = key;
      best_count = count;
    }
  }
  return best;
}

struct AffordanceTokenLess {
  bool operator()(Affordance a, Affordance b) const { return to_token(a) < to_token(b); }
};

}  // namespace

LabeledVoxelMap::LabeledVoxelMap(SemanticMapOptions options) : options_(options) {
  if (!(options_.voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be positive");
}

VoxelKey LabeledVoxelMap::voxel_of(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p.x() / options_.voxel_size)),
          static_cast<std::int64_t>(std::floor(p.y() / options_.voxel_size)),
          static_cast<std::int64_t>(std::floor(p.z() / options_.voxel_size))};
}

Vec3 LabeledVoxelMap::voxel_center(const VoxelKey& k) const {
  return {(static_cast<double>(k.x) + 0.5) * options_.voxel_size,
          (static_cast<double>(k.y) + 0.5) * options_.voxel_size,
          (static_cast<double>(k.z) + 0.5) * options_.voxel_size};
}

void LabeledVoxelMap::validate(const LabeledObservation& obs, std::size_t index) const {
  auto fail = [index](const std::string& what) {
    std::ostringstream os;
    os << "observation " << index << ": " << what;
    throw MalformedObservation(os.str());
  };
  if (!obs.position.allFinite()) fail("non-finite position");
  if (!obs.normal.allFinite() ||
      std::abs(obs.normal.norm() - 1.0) > options_.normal_tolerance) {
    fail("normal is not unit length");
  }
  if (obs.category.empty()) fail("empty category");
  if (obs.instance_id < 0) fail("negative instance id");
}

void LabeledVoxelMap::integrate_frame(std::span<const LabeledObservation> frame) {
  for (std::size_t i = 0; i < frame.size(); ++i) validate(frame[i], i);

  for (const auto& obs : frame) {
    const VoxelKey key = voxel_of(obs.position);
    auto& votes = instance_layer_[key];
    if (auto prev = plurality(votes)) changed_.insert(*prev);
    ++votes[obs.instance_id];
    ++category_layer_[key][obs.category];
    if (obs.affordance) ++affordance_layer_[key][*obs.affordance];
    auto [it, inserted] = normal_sums_.try_emplace(key, Vec3::Zero());
    it->second += obs.normal;
    changed_.insert(obs.instance_id);
  }
  ++version_;
}

std::set<InstanceId> LabeledVoxelMap::drain_changed() {
  std::set<InstanceId> out;
  out.swap(changed_);
  return out;
}

std::optional<InstanceId> LabeledVoxelMap::instance_at(const VoxelKey& k) const {
  auto it = instance_layer_.find(k);
  if (it == instance_layer_.end()) return std::nullopt;
  return plurality(it->second);
}

std::optional<std::string> LabeledVoxelMap::category_at(const VoxelKey& k) const {
  auto it = category_layer_.find(k);
  if (it == category_layer_.end()) return std::nullopt;
  return plurality(it->second);
}

std::optional<Affordance> LabeledVoxelMap::affordance_at(const VoxelKey& k) const {
  auto it = affordance_layer_.find(k);
  if (it == affordance_layer_.end()) return std::nullopt;
  return plurality(it->second, AffordanceTokenLess{});
}

std::map<InstanceId, std::vector<VoxelKey>> LabeledVoxelMap::voxels_by_instance() const {
  std::map<InstanceId, std::vector<VoxelKey>> groups;
  for (const auto& [key, votes] : instance_layer_) {
    groups[*plurality(votes)].push_back(key);
  }
  return groups;
}

std::vector<InstanceRecord> LabeledVoxelMap::build_records(
    const std::map<InstanceId, std::vector<VoxelKey>>& groups) const {
  std::vector<InstanceRecord> records;
  for (const auto& [id, unsorted] : groups) {
    if (unsorted.size() < options_.min_voxels) continue;
    std::vector<VoxelKey> keys = unsorted;
    std::sort(keys.begin(), keys.end());

    InstanceRecord rec;
    rec.instance_id = id;
    rec.points.reserve(keys.size());
    rec.normals.reserve(keys.size());
    std::map<std::string, std::uint32_t> category_votes;
    for (const VoxelKey& k : keys) {
      const Vec3 c = voxel_center(k);
      rec.points.push_back(c);
      const Vec3& sum = normal_sums_.at(k);
      const double n = sum.norm();
      rec.normals.push_back(n > 0.0 ? Vec3(sum / n) : Vec3::Zero());
      if (auto cat = category_at(k)) ++category_votes[*cat];
      if (auto aff = affordance_at(k)) rec.parts[*aff].push_back(c);
    }
    rec.category = plurality(category_votes).value_or(std::string{});
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<InstanceRecord> LabeledVoxelMap::extract_instances() const {
  return build_records(voxels_by_instance());
}

std::vector<InstanceRecord> LabeledVoxelMap::extract_instances(
    const std::set<InstanceId>& ids) const {
  auto groups = voxels_by_instance();
  std::erase_if(groups, [&](const auto& g) { return !ids.contains(g.first); });
  return build_records(groups);
}

}  // namespace scenectx

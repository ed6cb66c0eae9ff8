// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenectx/content.hpp"
#include "scenectx/scene_graph.hpp"

namespace scenectx {

// Injective map from matching-graph node id to scene instance id.
using Embedding = std::map<std::string, InstanceId>;

struct Placement {
  std::string content_node;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  InstanceId anchor = 0;
  Action action = Action::kPlacedOn;
  std::vector<std::string> warnings;

  bool operator==(const Placement&) const = default;
};

struct ArrangementOptions {
  double standoff = 0.3;          // meters, for pushing/opening poses
  std::size_t embedding_limit = 0;  // 0 = unlimited
};

// True when `scene_label` satisfies a query edge labelled `query_label`:
// exact match, or an `adjacent` scene edge standing in for `near`.
bool label_compatible(RelationLabel scene_label, RelationLabel query_label);

// All label-compatible injective embeddings of `query` into `graph`, ordered
// lexicographically by the mapped instance ids taken in query-node-id order,
// truncated to `limit` (0 = all).
std::vector<Embedding> find_embeddings(const SceneGraph& graph, const MatchingGraph& query,
                                       std::size_t limit = 0);

// Replays every query node and edge against the graph.
bool verify_embedding(const SceneGraph& graph, const MatchingGraph& query, const Embedding& emb);

std::optional<Embedding> select_embedding(std::span<const Embedding> embeddings);

Placement compute_placement(const SceneGraph& graph, const ContentGraph& content,
                            const Embedding& emb, const std::string& content_node,
                            const ArrangementOptions& options = {});

// One shared embedding and a placement per content node that has action edges.
struct Arrangement {
  Embedding embedding;
  std::vector<Placement> placements;

  bool operator==(const Arrangement&) const = default;
};

// Re-arranges content against the latest graph. A still-valid previous
// embedding is kept in preference to any other.
std::optional<Arrangement> rearrange_on_update(const std::optional<Arrangement>& previous,
                                               const SceneGraph& graph,
                                               const ContentGraph& content,
                                               const ArrangementOptions& options = {});

}  // namespace scenectx

// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "scenectx/relations.hpp"

namespace scenectx {

struct Edge {
  InstanceId subject = 0;
  InstanceId object = 0;
  RelationLabel label = RelationLabel::kNear;

  auto operator<=>(const Edge&) const = default;
};

// Directed multigraph of abstracted instances. Immutable once built; updates
// produce a new value.
struct SceneGraph {
  std::map<InstanceId, AbstractedInstance> nodes;
  std::set<Edge> edges;
  std::uint64_t version = 0;
  RelationThresholds thresholds;

  bool has_edge(InstanceId s, InstanceId o, RelationLabel label) const {
    return edges.contains(Edge{s, o, label});
  }
  // Nodes and edges agree; version is not compared.
  bool same_structure(const SceneGraph& other) const;
};

SceneGraph build_graph(std::span<const AbstractedInstance> instances,
                       const RelationThresholds& th = {}, std::uint64_t version = 0);

// Re-derives every edge incident to a changed, added or removed instance and
// carries the rest over. Equals build_graph(instances) on the same thresholds.
SceneGraph update_graph(const SceneGraph& graph, const std::set<InstanceId>& changed,
                        std::span<const AbstractedInstance> instances, std::uint64_t version);

enum class GraphFormat { kDot, kStructured };

GraphFormat graph_format_from_string(std::string_view name);  // throws UnsupportedFormat
std::string export_graph(const SceneGraph& graph, GraphFormat format);
// Inverse of export_graph(..., kStructured). Throws SchemaError.
SceneGraph parse_structured_graph(std::string_view text);

}  // namespace scenectx

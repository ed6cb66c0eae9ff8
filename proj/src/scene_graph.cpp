// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/scene_graph.hpp"

#include <sstream>
#include <vector>

#include "json_util.hpp"

namespace scenectx {

using detail::json;

bool SceneGraph::same_structure(const SceneGraph& other) const {
  return nodes == other.nodes && edges == other.edges;
}

namespace {

std::map<InstanceId, AbstractedInstance> index_nodes(std::span<const AbstractedInstance> instances) {
  std::map<InstanceId, AbstractedInstance> nodes;
  for (const auto& inst : instances) {
    if (!nodes.emplace(inst.instance_id, inst).second) {
      throw DuplicateInstanceId("duplicate instance id " + std::to_string(inst.instance_id));
    }
  }
  return nodes;
}

void add_pair_edges(const AbstractedInstance& a, const AbstractedInstance& b,
                    const RelationThresholds& th, std::set<Edge>& edges) {
  for (const PairRelation& r : relations_for_pair(a, b, th)) {
    if (r.forward) {
      edges.insert({a.instance_id, b.instance_id, r.label});
    } else {
      edges.insert({b.instance_id, a.instance_id, r.label});
    }
  }
}

}  // namespace

SceneGraph build_graph(std::span<const AbstractedInstance> instances,
                       const RelationThresholds& th, std::uint64_t version) {
  th.validate();
  SceneGraph g;
  g.nodes = index_nodes(instances);
  g.thresholds = th;
  g.version = version;
  for (auto i = g.nodes.begin(); i != g.nodes.end(); ++i) {
    for (auto j = std::next(i); j != g.nodes.end(); ++j) {
      add_pair_edges(i->second, j->second, th, g.edges);
    }
  }
  return g;
}

SceneGraph update_graph(const SceneGraph& graph, const std::set<InstanceId>& changed,
                        std::span<const AbstractedInstance> instances, std::uint64_t version) {
  SceneGraph g;
  g.nodes = index_nodes(instances);
  g.thresholds = graph.thresholds;
  g.version = version;

  std::set<InstanceId> dirty = changed;
  for (const auto& [id, _] : graph.nodes) {
    if (!g.nodes.contains(id)) dirty.insert(id);
  }
  for (const auto& [id, _] : g.nodes) {
    if (!graph.nodes.contains(id)) dirty.insert(id);
  }

  for (const Edge& e : graph.edges) {
    if (!dirty.contains(e.subject) && !dirty.contains(e.object)) g.edges.insert(e);
  }
  for (auto i = g.nodes.begin(); i != g.nodes.end(); ++i) {
    for (auto j = std::next(i); j != g.nodes.end(); ++j) {
      if (dirty.contains(i->first) || dirty.contains(j->first)) {
        add_pair_edges(i->second, j->second, g.thresholds, g.edges);
      }
    }
  }
  return g;
}

GraphFormat graph_format_from_string(std::string_view name) {
  if (name == "dot") return GraphFormat::kDot;
  if (name == "structured" || name == "json") return GraphFormat::kStructured;
  throw UnsupportedFormat("unsupported graph format '" + std::string(name) + "'");
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string export_dot(const SceneGraph& g) {
  std::ostringstream os;
  os << "digraph scene_graph {\n";
  for (const auto& [id, inst] : g.nodes) {
    os << "  n" << id << " [label=\"" << id << ": " << dot_escape(inst.category) << "\"];\n";
  }
  for (const Edge& e : g.edges) {
    os << "  n" << e.subject << " -> n" << e.object << " [label=\"" << to_token(e.label)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string export_structured(const SceneGraph& g) {
  json doc;
  doc["version"] = g.version;
  doc["thresholds"] = detail::thresholds_to_json(g.thresholds);
  json nodes = json::array();
  for (const auto& [id, inst] : g.nodes) nodes.push_back(detail::instance_to_json(inst));
  doc["nodes"] = nodes;
  json edges = json::array();
  for (const Edge& e : g.edges) {
    edges.push_back({{"sub", std::to_string(e.subject)},
                     {"obj", std::to_string(e.object)},
                     {"rel", std::string(to_token(e.label))}});
  }
  doc["edges"] = edges;
  return doc.dump(2) + "\n";
}

InstanceId parse_node_ref(const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw SchemaError("bad node reference '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw SchemaError("bad node reference '" + s + "'");
  }
}

}  // namespace

std::string export_graph(const SceneGraph& graph, GraphFormat format) {
  switch (format) {
    case GraphFormat::kDot: return export_dot(graph);
    case GraphFormat::kStructured: return export_structured(graph);
  }
  throw UnsupportedFormat("unsupported graph format");
}

SceneGraph parse_structured_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("graph document is not valid JSON: ") + e.what());
  }
  SceneGraph g;
  const json& version = detail::require(doc, "version");
  if (!version.is_number_unsigned()) throw SchemaError("'version' must be a non-negative integer");
  g.version = version.get<std::uint64_t>();
  if (doc.contains("thresholds")) g.thresholds = detail::thresholds_from_json(doc["thresholds"]);

  const json& nodes = detail::require(doc, "nodes");
  if (!nodes.is_array()) throw SchemaError("'nodes' must be an array");
  std::vector<AbstractedInstance> instances;
  for (const json& n : nodes) instances.push_back(detail::instance_from_json(n));
  try {
    g.nodes = index_nodes(instances);
  } catch (const DuplicateInstanceId& e) {
    throw SchemaError(e.what());
  }

  const json& edges = detail::require(doc, "edges");
  if (!edges.is_array()) throw SchemaError("'edges' must be an array");
  for (const json& e : edges) {
    const InstanceId s = parse_node_ref(detail::require_string(e, "sub"));
    const InstanceId o = parse_node_ref(detail::require_string(e, "obj"));
    const std::string rel = detail::require_string(e, "rel");
    auto label = relation_from_token(rel);
    if (!label) throw UnknownRelation("unknown relation '" + rel + "'");
    if (!g.nodes.contains(s) || !g.nodes.contains(o)) {
      throw DanglingEdge("edge references unknown node");
    }
    if (s == o) throw SchemaError("self edge on node " + std::to_string(s));
    g.edges.insert({s, o, *label});
  }
  return g;
}

}  // namespace scenectx

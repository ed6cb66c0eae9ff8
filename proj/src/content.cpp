// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/content.hpp"

#include <algorithm>
#include <map>

#include "json_util.hpp"

namespace scenectx {

using detail::json;

std::string_view to_token(Action a) {
  switch (a) {
    case Action::kSittingOn: return "sitting_on";
    case Action::kStandingOn: return "standing_on";
    case Action::kPlacedOn: return "placed_on";
    case Action::kPushing: return "pushing";
    case Action::kLeaningOn: return "leaning_on";
    case Action::kOpening: return "opening";
  }
  return "unknown";
}

std::optional<Action> action_from_token(std::string_view token) {
  for (Action a : kAllActions) {
    if (to_token(a) == token) return a;
  }
  return std::nullopt;
}

std::optional<Affordance> implied_affordance(Action a) {
  switch (a) {
    case Action::kSittingOn: return Affordance::kSittable;
    case Action::kPushing: return Affordance::kPushable;
    case Action::kLeaningOn: return Affordance::kLeanable;
    case Action::kOpening: return Affordance::kOpenable;
    case Action::kStandingOn:
    case Action::kPlacedOn: return std::nullopt;
  }
  return std::nullopt;
}

std::string_view to_token(Severity s) {
  switch (s) {
    case Severity::kError: return "error";
    case Severity::kWarning: return "warning";
    case Severity::kAdvisory: return "advisory";
  }
  return "unknown";
}

const ContentNode* ContentGraph::node(std::string_view id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const auto& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const ContentNode* MatchingGraph::node(std::string_view id) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                             [](const ContentNode& n, std::string_view key) { return n.id < key; });
  return (it != nodes.end() && it->id == id) ? &*it : nullptr;
}

namespace {

std::string label_token(const EdgeLabel& label) {
  return std::visit([](auto v) { return std::string(to_token(v)); }, label);
}

ContentNode parse_node(const json& j) {
  ContentNode n;
  n.id = detail::require_string(j, "id");
  if (n.id.empty()) throw SchemaError("node id must not be empty");
  const std::string kind = detail::require_string(j, "kind");
  if (kind == "real") {
    n.kind = NodeKind::kReal;
  } else if (kind == "content") {
    n.kind = NodeKind::kContent;
  } else {
    throw SchemaError("node '" + n.id + "': unknown kind '" + kind + "'");
  }
  if (j.contains("category") && !j["category"].is_null()) {
    n.category = detail::require_string(j, "category");
  }
  if (n.kind == NodeKind::kReal && n.category.empty()) {
    throw SchemaError("real node '" + n.id + "' needs a category");
  }
  if (j.contains("affordances")) {
    const json& affs = j["affordances"];
    if (!affs.is_array()) throw SchemaError("node '" + n.id + "': 'affordances' must be an array");
    for (const json& a : affs) {
      if (!a.is_string()) throw SchemaError("node '" + n.id + "': affordance must be a string");
      auto tok = affordance_from_token(a.get<std::string>());
      if (!tok) throw UnknownAffordance("unknown affordance '" + a.get<std::string>() + "'");
      n.required_affordances.insert(*tok);
    }
  }
  if (j.contains("attributes") && !j["attributes"].is_object()) {
    throw SchemaError("node '" + n.id + "': 'attributes' must be an object");
  }
  return n;
}

}  // namespace

ContentGraph parse_content_graph(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("content graph is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("content graph must be an object");

  ContentGraph g;
  const json& nodes = detail::require(doc, "nodes");
  if (!nodes.is_array()) throw SchemaError("'nodes' must be an array");
  std::map<std::string, NodeKind> kinds;
  for (const json& jn : nodes) {
    ContentNode n = parse_node(jn);
    if (!kinds.emplace(n.id, n.kind).second) throw SchemaError("duplicate node id '" + n.id + "'");
    g.nodes.push_back(std::move(n));
  }
  if (std::none_of(g.nodes.begin(), g.nodes.end(),
                   [](const auto& n) { return n.kind == NodeKind::kContent; })) {
    throw SchemaError("content graph needs at least one content node");
  }

  const json& edges = detail::require(doc, "edges");
  if (!edges.is_array()) throw SchemaError("'edges' must be an array");
  for (const json& je : edges) {
    ContentEdge e;
    e.subject = detail::require_string(je, "sub");
    e.object = detail::require_string(je, "obj");
    const std::string rel = detail::require_string(je, "rel");
    if (auto r = relation_from_token(rel)) {
      e.label = *r;
    } else if (auto a = action_from_token(rel)) {
      e.label = *a;
    } else {
      throw UnknownRelation("unknown relation '" + rel + "'");
    }
    auto s = kinds.find(e.subject);
    auto o = kinds.find(e.object);
    if (s == kinds.end() || o == kinds.end()) {
      throw DanglingEdge("edge " + e.subject + " -" + rel + "-> " + e.object +
                         " references an undeclared node");
    }
    if (e.subject == e.object) throw SchemaError("self edge on node '" + e.subject + "'");
    if (e.is_action()) {
      if (s->second != NodeKind::kContent || o->second != NodeKind::kReal) {
        throw SchemaError("action edge '" + rel + "' must go from a content node to a real node");
      }
    } else if (s->second != NodeKind::kReal || o->second != NodeKind::kReal) {
      throw SchemaError("relation edge '" + rel + "' must connect two real nodes");
    }
    g.edges.push_back(std::move(e));
  }
  return g;
}

std::string serialize_content_graph(const ContentGraph& g) {
  json nodes = json::array();
  for (const ContentNode& n : g.nodes) {
    json affs = json::array();
    for (Affordance a : n.required_affordances) affs.push_back(std::string(to_token(a)));
    nodes.push_back({{"id", n.id},
                     {"kind", n.kind == NodeKind::kReal ? "real" : "content"},
                     {"category", n.category},
                     {"affordances", affs}});
  }
  json edges = json::array();
  for (const ContentEdge& e : g.edges) {
    edges.push_back({{"sub", e.subject}, {"obj", e.object}, {"rel", label_token(e.label)}});
  }
  return json{{"nodes", nodes}, {"edges", edges}}.dump(2) + "\n";
}

MatchingGraph derive_matching_graph(const ContentGraph& g) {
  MatchingGraph m;
  for (const ContentNode& n : g.nodes) {
    if (n.kind == NodeKind::kReal) m.nodes.push_back(n);
  }
  if (m.nodes.empty()) throw EmptyMatchingGraph("content graph has no real nodes");
  std::sort(m.nodes.begin(), m.nodes.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const ContentEdge& e : g.edges) {
    if (e.is_action()) continue;
    const ContentNode* s = g.node(e.subject);
    const ContentNode* o = g.node(e.object);
    if (s && o && s->kind == NodeKind::kReal && o->kind == NodeKind::kReal) {
      m.edges.push_back({e.subject, e.object, std::get<RelationLabel>(e.label)});
    }
  }
  std::sort(m.edges.begin(), m.edges.end());
  m.edges.erase(std::unique(m.edges.begin(), m.edges.end()), m.edges.end());
  return m;
}

std::vector<Diagnostic> validate_content_graph(const ContentGraph& g,
                                               const AbstractionOptions& options) {
  std::vector<Diagnostic> out;
  for (const ContentNode& n : g.nodes) {
    if (n.kind != NodeKind::kContent) continue;
    const bool has_action = std::any_of(g.edges.begin(), g.edges.end(), [&](const auto& e) {
      return e.is_action() && e.subject == n.id;
    });
    if (!has_action) {
      out.push_back({Severity::kError, n.id, "content node has no action edge"});
    }
  }
  for (const ContentEdge& e : g.edges) {
    if (!e.is_action()) continue;
    const Action action = std::get<Action>(e.label);
    const ContentNode* target = g.node(e.object);
    if (!target) continue;
    if (action == Action::kSittingOn && options.frontless_categories.contains(target->category)) {
      out.push_back({Severity::kWarning, e.subject,
                     std::string(to_token(action)) + " target category '" + target->category +
                         "' has no front; placement yaw falls back to 0"});
    }
    if (auto aff = implied_affordance(action);
        aff && !target->required_affordances.contains(*aff)) {
      out.push_back({Severity::kAdvisory, e.subject,
                     std::string(to_token(action)) + " target '" + target->id +
                         "' does not require '" + std::string(to_token(*aff)) + "'"});
    }
  }
  return out;
}

}  // namespace scenectx

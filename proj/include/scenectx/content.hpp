// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scenectx/abstraction.hpp"
#include "scenectx/relations.hpp"

namespace scenectx {

// How a content node interacts with the real node it is attached to.
enum class Action { kSittingOn, kStandingOn, kPlacedOn, kPushing, kLeaningOn, kOpening };

inline constexpr std::array<Action, 6> kAllActions = {
    Action::kSittingOn, Action::kStandingOn, Action::kPlacedOn,
    Action::kPushing,   Action::kLeaningOn,  Action::kOpening};

std::string_view to_token(Action a);
std::optional<Action> action_from_token(std::string_view token);
// Part affordance an action works against, if any.
std::optional<Affordance> implied_affordance(Action a);

enum class NodeKind { kReal, kContent };

struct ContentNode {
  std::string id;
  NodeKind kind = NodeKind::kReal;
  std::string category;
  std::set<Affordance> required_affordances;

  bool operator==(const ContentNode&) const = default;
};

using EdgeLabel = std::variant<RelationLabel, Action>;

struct ContentEdge {
  std::string subject;
  std::string object;
  EdgeLabel label;

  bool is_action() const { return std::holds_alternative<Action>(label); }
  bool operator==(const ContentEdge&) const = default;
};

// Designer-authored context graph: real nodes, relation edges between them,
// and content nodes attached through action edges.
struct ContentGraph {
  std::vector<ContentNode> nodes;
  std::vector<ContentEdge> edges;

  const ContentNode* node(std::string_view id) const;
  bool operator==(const ContentGraph&) const = default;
};

struct QueryEdge {
  std::string subject;
  std::string object;
  RelationLabel label;

  auto operator<=>(const QueryEdge&) const = default;
};

// Real-node subgraph of a content graph; the pattern searched for in a scene.
struct MatchingGraph {
  std::vector<ContentNode> nodes;  // sorted by id
  std::vector<QueryEdge> edges;

  const ContentNode* node(std::string_view id) const;
};

ContentGraph parse_content_graph(std::string_view text);
std::string serialize_content_graph(const ContentGraph& g);

MatchingGraph derive_matching_graph(const ContentGraph& g);

enum class Severity { kError, kWarning, kAdvisory };
std::string_view to_token(Severity s);

struct Diagnostic {
  Severity severity = Severity::kAdvisory;
  std::string node_id;
  std::string message;
};

std::vector<Diagnostic> validate_content_graph(const ContentGraph& g,
                                               const AbstractionOptions& options = {});

}  // namespace scenectx

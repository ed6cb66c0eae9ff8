// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/arrangement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace scenectx {

bool label_compatible(RelationLabel scene_label, RelationLabel query_label) {
  return scene_label == query_label ||
         (query_label == RelationLabel::kNear && scene_label == RelationLabel::kAdjacent);
}

namespace {

bool has_compatible_edge(const SceneGraph& g, InstanceId s, InstanceId o, RelationLabel q) {
  if (g.has_edge(s, o, q)) return true;
  return q == RelationLabel::kNear && g.has_edge(s, o, RelationLabel::kAdjacent);
}

bool node_matches(const ContentNode& q, const AbstractedInstance& inst) {
  if (q.category != inst.category) return false;
  return std::includes(inst.attributes.begin(), inst.attributes.end(),
                       q.required_affordances.begin(), q.required_affordances.end());
}

class EmbeddingSearch {
 public:
  EmbeddingSearch(const SceneGraph& g, const MatchingGraph& q) : g_(g), q_(q) {}

  std::vector<Embedding> run() {
    // Distinct neighbour counts give a sound degree bound for injective maps.
    std::map<std::string, std::set<std::string>> q_out, q_in;
    for (const QueryEdge& e : q_.edges) {
      q_out[e.subject].insert(e.object);
      q_in[e.object].insert(e.subject);
    }
    std::map<InstanceId, std::set<InstanceId>> g_out, g_in;
    for (const Edge& e : g_.edges) {
      g_out[e.subject].insert(e.object);
      g_in[e.object].insert(e.subject);
    }

    std::vector<std::pair<std::string, std::vector<InstanceId>>> domains;
    for (const ContentNode& qn : q_.nodes) {
      std::vector<InstanceId> cands;
      for (const auto& [id, inst] : g_.nodes) {
        if (!node_matches(qn, inst)) continue;
        if (g_out[id].size() < q_out[qn.id].size() || g_in[id].size() < q_in[qn.id].size()) {
          continue;
        }
        cands.push_back(id);
      }
      if (cands.empty()) return {};
      domains.emplace_back(qn.id, std::move(cands));
    }
    // Fewest candidates first.
    std::stable_sort(domains.begin(), domains.end(), [](const auto& a, const auto& b) {
      return a.second.size() < b.second.size();
    });
    order_ = std::move(domains);
    extend(0);

    std::sort(found_.begin(), found_.end(), [this](const Embedding& a, const Embedding& b) {
      return key(a) < key(b);
    });
    return std::move(found_);
  }

 private:
  // Mapped ids in query-node-id order (Embedding is keyed by id).
  static std::vector<InstanceId> key(const Embedding& e) {
    std::vector<InstanceId> k;
    k.reserve(e.size());
    for (const auto& [_, id] : e) k.push_back(id);
    return k;
  }

  bool consistent(const std::string& u, InstanceId c) const {
    for (const QueryEdge& e : q_.edges) {
      if (e.subject == u) {
        if (e.object == u) return false;
        auto it = current_.find(e.object);
        if (it != current_.end() && !has_compatible_edge(g_, c, it->second, e.label)) return false;
      } else if (e.object == u) {
        auto it = current_.find(e.subject);
        if (it != current_.end() && !has_compatible_edge(g_, it->second, c, e.label)) return false;
      }
    }
    return true;
  }

  void extend(std::size_t depth) {
    if (depth == order_.size()) {
      found_.push_back(current_);
      return;
    }
    const auto& [u, cands] = order_[depth];
    for (InstanceId c : cands) {
      if (used_.contains(c) || !consistent(u, c)) continue;
      current_[u] = c;
      used_.insert(c);
      extend(depth + 1);
      used_.erase(c);
      current_.erase(u);
    }
  }

  const SceneGraph& g_;
  const MatchingGraph& q_;
  std::vector<std::pair<std::string, std::vector<InstanceId>>> order_;
  Embedding current_;
  std::set<InstanceId> used_;
  std::vector<Embedding> found_;
};

}  // namespace

bool verify_embedding(const SceneGraph& graph, const MatchingGraph& query, const Embedding& emb) {
  if (emb.size() != query.nodes.size()) return false;
  std::set<InstanceId> images;
  for (const ContentNode& qn : query.nodes) {
    auto it = emb.find(qn.id);
    if (it == emb.end()) return false;
    auto node = graph.nodes.find(it->second);
    if (node == graph.nodes.end() || !node_matches(qn, node->second)) return false;
    images.insert(it->second);
  }
  if (images.size() != emb.size()) return false;
  for (const QueryEdge& e : query.edges) {
    if (!has_compatible_edge(graph, emb.at(e.subject), emb.at(e.object), e.label)) return false;
  }
  return true;
}

std::vector<Embedding> find_embeddings(const SceneGraph& graph, const MatchingGraph& query,
                                       std::size_t limit) {
  if (query.nodes.empty()) throw EmptyMatchingGraph("matching graph has no nodes");
  std::vector<Embedding> out = EmbeddingSearch(graph, query).run();
  if (limit > 0 && out.size() > limit) out.resize(limit);
  for (const Embedding& e : out) {
    if (!verify_embedding(graph, query, e)) {
      throw std::logic_error("embedding search produced an invalid embedding");
    }
  }
  return out;
}

std::optional<Embedding> select_embedding(std::span<const Embedding> embeddings) {
  if (embeddings.empty()) return std::nullopt;
  return embeddings.front();
}

namespace {

double heading(const Vec2& v) { return wrap_two_pi(std::atan2(v.y(), v.x())); }

double front_yaw_or_zero(const AbstractedInstance& inst, std::vector<std::string>* warnings) {
  if (inst.obb.front) return heading(*inst.obb.front);
  if (warnings) {
    warnings->push_back("anchor " + std::to_string(inst.instance_id) + " has no front; yaw set to 0");
  }
  return 0.0;
}

// Horizontal direction pointing from the instance out through `part`.
Vec2 outward_direction(const AbstractedInstance& inst, const Obb& part) {
  Vec2 d = (part.center - inst.obb.center).head<2>();
  if (d.norm() > 1e-6) return d.normalized();
  if (inst.obb.front) return *inst.obb.front;
  return Vec2::UnitX();
}

// Face normal of `part` (one of its six signed axes) whose horizontal
// component best matches `dir`, with the matching half extent.
std::pair<Vec3, double> facing_normal(const Obb& part, const Vec2& dir) {
  Vec3 best = part.axes.col(0);
  double best_half = part.extents[0] / 2.0;
  double best_dot = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    for (double sign : {1.0, -1.0}) {
      const Vec3 n = part.axes.col(k) * sign;
      const double d = n.head<2>().dot(dir);
      if (d > best_dot) {
        best_dot = d;
        best = n;
        best_half = part.extents[k] / 2.0;
      }
    }
  }
  return {best, best_half};
}

const Obb& require_part(const AbstractedInstance& inst, Affordance a, Action action) {
  const Obb* p = inst.part(a);
  if (!p) {
    throw MissingRequiredPart(std::string(to_token(action)) + " needs a " +
                              std::string(to_token(a)) + " part on instance " +
                              std::to_string(inst.instance_id));
  }
  return *p;
}

}  // namespace

Placement compute_placement(const SceneGraph& graph, const ContentGraph& content,
                            const Embedding& emb, const std::string& content_node,
                            const ArrangementOptions& options) {
  const ContentEdge* edge = nullptr;
  InstanceId anchor = 0;
  for (const ContentEdge& e : content.edges) {
    if (!e.is_action() || e.subject != content_node) continue;
    auto it = emb.find(e.object);
    if (it != emb.end() && graph.nodes.contains(it->second)) {
      edge = &e;
      anchor = it->second;
      break;
    }
  }
  if (!edge) {
    throw MissingActionTarget("content node '" + content_node + "' has no mapped action target");
  }

  const AbstractedInstance& target = graph.nodes.at(anchor);
  Placement p;
  p.content_node = content_node;
  p.anchor = anchor;
  p.action = std::get<Action>(edge->label);

  switch (p.action) {
    case Action::kSittingOn: {
      const Obb* seat = target.part(Affordance::kSittable);
      p.position = (seat ? *seat : target.obb).top_face_center();
      p.yaw = front_yaw_or_zero(target, &p.warnings);
      break;
    }
    case Action::kPlacedOn:
    case Action::kStandingOn: {
      p.position = support_surface(target).top_face_center();
      p.yaw = front_yaw_or_zero(target, nullptr);
      break;
    }
    case Action::kPushing:
    case Action::kOpening: {
      const Affordance a =
          p.action == Action::kPushing ? Affordance::kPushable : Affordance::kOpenable;
      const Obb& part = require_part(target, a, p.action);
      const Vec2 out = outward_direction(target, part);
      const auto [n, half] = facing_normal(part, out);
      p.position = part.center + n * options.standoff;
      const Vec2 toward = n.head<2>().norm() > 1e-9 ? Vec2(-n.head<2>()) : Vec2(-out);
      p.yaw = heading(toward);
      break;
    }
    case Action::kLeaningOn: {
      const Obb& part = require_part(target, Affordance::kLeanable, p.action);
      const Vec2 dir = target.obb.front ? *target.obb.front : outward_direction(target, part);
      const auto [n, half] = facing_normal(part, dir);
      p.position = part.center + n * half;
      p.yaw = heading(n.head<2>().norm() > 1e-9 ? Vec2(n.head<2>()) : dir);
      break;
    }
  }
  return p;
}

namespace {

std::optional<Arrangement> arrange_with(const SceneGraph& graph, const ContentGraph& content,
                                        const Embedding& emb, const ArrangementOptions& options) {
  Arrangement a;
  a.embedding = emb;
  for (const ContentNode& n : content.nodes) {
    if (n.kind != NodeKind::kContent) continue;
    const bool has_action = std::any_of(content.edges.begin(), content.edges.end(),
                                        [&](const auto& e) { return e.is_action() && e.subject == n.id; });
    if (!has_action) continue;
    try {
      a.placements.push_back(compute_placement(graph, content, emb, n.id, options));
    } catch (const MissingActionTarget&) {
      return std::nullopt;
    } catch (const MissingRequiredPart&) {
      return std::nullopt;
    }
  }
  return a;
}

}  // namespace

std::optional<Arrangement> rearrange_on_update(const std::optional<Arrangement>& previous,
                                               const SceneGraph& graph,
                                               const ContentGraph& content,
                                               const ArrangementOptions& options) {
  const MatchingGraph query = derive_matching_graph(content);
  if (previous && verify_embedding(graph, query, previous->embedding)) {
    if (auto a = arrange_with(graph, content, previous->embedding, options)) return a;
  }
  for (const Embedding& e : find_embeddings(graph, query, options.embedding_limit)) {
    if (auto a = arrange_with(graph, content, e, options)) return a;
  }
  return std::nullopt;
}

}  // namespace scenectx

// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <set>
#include <string_view>

#include "scenectx/abstraction.hpp"

namespace scenectx {

struct RelationThresholds {
  double d_offset = 0.5;    // widening of the directional bands
  double d_adjacent = 0.1;  // surface gap for `adjacent`
  double d_near = 1.0;      // surface gap for `near`
  double d_support = 0.1;   // vertical tolerance for `on`

  // Throws std::invalid_argument when negative or d_adjacent >= d_near.
  void validate() const;
  bool operator==(const RelationThresholds&) const = default;
};

enum class RelationLabel {
  kInFrontOf,
  kBehind,
  kOnLeft,
  kOnRight,
  kNear,
  kAdjacent,
  kOn,
  kAbove,
  kUnder,
};

inline constexpr std::array<RelationLabel, 9> kAllRelations = {
    RelationLabel::kInFrontOf, RelationLabel::kBehind, RelationLabel::kOnLeft,
    RelationLabel::kOnRight,   RelationLabel::kNear,   RelationLabel::kAdjacent,
    RelationLabel::kOn,        RelationLabel::kAbove,  RelationLabel::kUnder};

std::string_view to_token(RelationLabel r);
std::optional<RelationLabel> relation_from_token(std::string_view token);

// Where `s` sits relative to `o`, in o's frame (+x = o's front, +y = o's left).
// Throws FrontMissing when o has no front.
std::optional<RelationLabel> directional(const AbstractedInstance& s, const AbstractedInstance& o,
                                         const RelationThresholds& th);

// Footprint surface gap along the segment joining the two centers; 0 when
// the footprints overlap. Symmetric in its arguments.
double surface_gap(const Obb& a, const Obb& b);

std::optional<RelationLabel> distance(const AbstractedInstance& s, const AbstractedInstance& o,
                                      const RelationThresholds& th);

// Box of `o` that `s` is measured against: sittable part, else supportable
// part, else o's own box.
const Obb& support_surface(const AbstractedInstance& o);

std::optional<RelationLabel> support(const AbstractedInstance& s, const AbstractedInstance& o,
                                     const RelationThresholds& th);

// Relation edge between a pair, oriented either s->o or o->s.
struct PairRelation {
  RelationLabel label;
  bool forward;  // true: label(s, o); false: label(o, s)

  auto operator<=>(const PairRelation&) const = default;
};

std::set<PairRelation> relations_for_pair(const AbstractedInstance& s,
                                          const AbstractedInstance& o,
                                          const RelationThresholds& th);

}  // namespace scenectx

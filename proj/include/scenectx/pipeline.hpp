// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenectx/arrangement.hpp"
#include "scenectx/semantic_map.hpp"

namespace scenectx {

struct PipelineConfig {
  SemanticMapOptions map;
  AbstractionOptions abstraction;
  RelationThresholds thresholds;
  ArrangementOptions arrangement;
  std::size_t rebuild_every = 10;  // frames between graph rebuilds
  bool sequential = false;         // run every stage on the calling thread
};

// Reads a config document; absent keys keep their defaults, unknown keys are
// rejected with SchemaError.
PipelineConfig parse_config(std::string_view text);

struct StreamFrame {
  std::int64_t frame_id = 0;
  Frame observations;
};

// One line of an observation stream. Throws MalformedObservation.
StreamFrame parse_frame_line(std::string_view line);
std::string serialize_frame(const StreamFrame& frame);

// State after one graph rebuild, handed to observers (exports).
struct RebuildResult {
  std::size_t rebuild_index = 0;
  std::size_t frame = 0;  // frames integrated so far
  SceneGraph graph;
  std::optional<Arrangement> arrangement;
};

struct PipelineCallbacks {
  std::function<void(const std::string&)> on_event;  // one JSON line, no newline
  std::function<void(const RebuildResult&)> on_rebuild;
};

struct PipelineSummary {
  std::size_t frames = 0;
  std::size_t rebuilds = 0;
  SceneGraph final_graph;
  std::optional<Arrangement> final_arrangement;
};

// Replays an observation stream: integrates every frame, and every
// `rebuild_every` frames (and once at end of stream) re-abstracts changed
// instances, updates the scene graph and re-arranges content. Events already
// emitted are kept when a malformed frame aborts the run.
PipelineSummary run_pipeline(std::istream& stream, const ContentGraph* content,
                             const PipelineConfig& config, const PipelineCallbacks& callbacks);

std::string placement_to_json_line(const Placement& p);

}  // namespace scenectx

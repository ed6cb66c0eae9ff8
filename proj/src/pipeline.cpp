// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/pipeline.hpp"

#include <condition_variable>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "json_util.hpp"

namespace scenectx {

using detail::json;

PipelineConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("config must be an object");
  static const std::set<std::string> known = {
      "voxel_size", "min_voxels",         "thresholds",           "rebuild_every",
      "standoff",   "limit_embeddings",   "long_axis_categories", "frontless_categories"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw SchemaError("unknown config key '" + key + "'");
  }

  PipelineConfig c;
  auto count = [&](const char* key, std::size_t& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_unsigned()) throw SchemaError(std::string("'") + key + "' must be a non-negative integer");
    field = doc[key].get<std::size_t>();
  };
  auto names = [&](const char* key, std::set<std::string>& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_array()) throw SchemaError(std::string("'") + key + "' must be an array");
    field.clear();
    for (const json& v : doc[key]) {
      if (!v.is_string()) throw SchemaError(std::string("'") + key + "' must hold strings");
      field.insert(v.get<std::string>());
    }
  };
  if (doc.contains("voxel_size")) c.map.voxel_size = detail::require_number(doc, "voxel_size");
  if (!(c.map.voxel_size > 0.0)) throw SchemaError("'voxel_size' must be positive");
  count("min_voxels", c.map.min_voxels);
  count("rebuild_every", c.rebuild_every);
  if (c.rebuild_every == 0) throw SchemaError("'rebuild_every' must be at least 1");
  count("limit_embeddings", c.arrangement.embedding_limit);
  if (doc.contains("standoff")) c.arrangement.standoff = detail::require_number(doc, "standoff");
  if (doc.contains("thresholds")) c.thresholds = detail::thresholds_from_json(doc["thresholds"]);
  try {
    c.thresholds.validate();
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  names("long_axis_categories", c.abstraction.long_axis_categories);
  names("frontless_categories", c.abstraction.frontless_categories);
  return c;
}

StreamFrame parse_frame_line(std::string_view line) {
  StreamFrame f;
  try {
    const json doc = json::parse(line);
    const json& id = detail::require(doc, "frame_id");
    if (!id.is_number_integer()) throw SchemaError("'frame_id' must be an integer");
    f.frame_id = id.get<std::int64_t>();
    const json& points = detail::require(doc, "points");
    if (!points.is_array()) throw SchemaError("'points' must be an array");
    f.observations.reserve(points.size());
    for (const json& p : points) {
      LabeledObservation o;
      o.position = detail::vec3_from_json(detail::require(p, "p"), "p");
      o.normal = detail::vec3_from_json(detail::require(p, "n"), "n");
      const json& inst = detail::require(p, "instance");
      if (!inst.is_number_integer()) throw SchemaError("'instance' must be an integer");
      o.instance_id = inst.get<InstanceId>();
      o.category = detail::require_string(p, "category");
      if (p.contains("affordance") && !p["affordance"].is_null()) {
        const std::string tok = detail::require_string(p, "affordance");
        auto a = affordance_from_token(tok);
        if (!a) throw SchemaError("unknown affordance token '" + tok + "'");
        o.affordance = *a;
      }
      f.observations.push_back(std::move(o));
    }
  } catch (const json::exception& e) {
    throw MalformedObservation(std::string("frame is not valid JSON: ") + e.what());
  } catch (const SchemaError& e) {
    throw MalformedObservation(e.what());
  }
  return f;
}

std::string serialize_frame(const StreamFrame& frame) {
  json points = json::array();
  for (const LabeledObservation& o : frame.observations) {
    points.push_back({{"p", detail::vec_to_json(o.position)},
                      {"n", detail::vec_to_json(o.normal)},
                      {"instance", o.instance_id},
                      {"category", o.category},
                      {"affordance", o.affordance ? json(std::string(to_token(*o.affordance)))
                                                  : json(nullptr)}});
  }
  return json{{"frame_id", frame.frame_id}, {"points", points}}.dump();
}

namespace {

json placement_json(const Placement& p) {
  return json{{"content", p.content_node},
              {"anchor", p.anchor},
              {"action", std::string(to_token(p.action))},
              {"position", detail::vec_to_json(p.position)},
              {"yaw", p.yaw}};
}

struct WorkItem {
  std::size_t frame = 0;
  std::shared_ptr<const LabeledVoxelMap> snapshot;
  std::set<InstanceId> changed;
};

// Abstraction, graph maintenance and arrangement for one rebuild. Owns all
// state downstream of the voxel map; only ever driven by one thread.
class RebuildStage {
 public:
  RebuildStage(const ContentGraph* content, const PipelineConfig& config,
               const PipelineCallbacks& callbacks)
      : content_(content), config_(config), callbacks_(callbacks) {
    graph_.thresholds = config.thresholds;
  }

  void process(const WorkItem& item) {
    const std::size_t index = rebuilds_++;
    std::set<InstanceId> present;
    for (const InstanceRecord& rec : item.snapshot->extract_instances(item.changed)) {
      present.insert(rec.instance_id);
      try {
        AbstractionResult r = abstract_instance(rec, config_.abstraction);
        for (const std::string& w : r.warnings) warn(item.frame, w);
        cache_[rec.instance_id] = std::move(r.instance);
      } catch (const InsufficientPoints& e) {
        warn(item.frame, "instance " + std::to_string(rec.instance_id) + ": " + e.what());
        cache_.erase(rec.instance_id);
      }
    }
    // Changed ids with no record fell below min_voxels or lost their voxels.
    for (InstanceId id : item.changed) {
      if (!present.contains(id)) cache_.erase(id);
    }

    std::vector<AbstractedInstance> instances;
    instances.reserve(cache_.size());
    for (const auto& [_, inst] : cache_) instances.push_back(inst);
    graph_ = index == 0 ? build_graph(instances, config_.thresholds, item.snapshot->version())
                        : update_graph(graph_, item.changed, instances, item.snapshot->version());

    json ids = json::array();
    for (InstanceId id : item.changed) ids.push_back(id);
    emit(json{{"event", "rebuild"},
              {"frame", item.frame},
              {"rebuild", index},
              {"version", graph_.version},
              {"nodes", graph_.nodes.size()},
              {"edges", graph_.edges.size()},
              {"changed", ids}});

    if (content_) arrange(item.frame);
    if (callbacks_.on_rebuild) callbacks_.on_rebuild({index, item.frame, graph_, arrangement_});
  }

  std::size_t rebuilds() const { return rebuilds_; }
  const SceneGraph& graph() const { return graph_; }
  const std::optional<Arrangement>& arrangement() const { return arrangement_; }

 private:
  void arrange(std::size_t frame) {
    std::optional<Arrangement> next =
        rearrange_on_update(arrangement_, graph_, *content_, config_.arrangement);
    std::map<std::string, const Placement*> before, after;
    if (arrangement_) {
      for (const Placement& p : arrangement_->placements) before[p.content_node] = &p;
    }
    if (next) {
      for (const Placement& p : next->placements) after[p.content_node] = &p;
    }
    for (const auto& [node, p] : after) {
      auto it = before.find(node);
      if (it != before.end() && *it->second == *p) continue;
      json e = placement_json(*p);
      e["event"] = "placement";
      e["frame"] = frame;
      json emb = json::object();
      for (const auto& [qid, iid] : next->embedding) emb[qid] = iid;
      e["embedding"] = emb;
      emit(e);
      for (const std::string& w : p->warnings) warn(frame, w);
    }
    for (const auto& [node, _] : before) {
      if (!after.contains(node)) emit(json{{"event", "withdrawn"}, {"frame", frame}, {"content", node}});
    }
    arrangement_ = std::move(next);
  }

  void warn(std::size_t frame, const std::string& message) {
    emit(json{{"event", "warning"}, {"frame", frame}, {"message", message}});
  }

  void emit(const json& e) {
    if (callbacks_.on_event) callbacks_.on_event(e.dump());
  }

  const ContentGraph* content_;
  const PipelineConfig& config_;
  const PipelineCallbacks& callbacks_;
  std::map<InstanceId, AbstractedInstance> cache_;
  SceneGraph graph_;
  std::optional<Arrangement> arrangement_;
  std::size_t rebuilds_ = 0;
};

// Single-producer single-consumer hand-off of snapshots to the rebuild stage.
class RebuildWorker {
 public:
  explicit RebuildWorker(RebuildStage& stage) : stage_(stage), thread_([this] { loop(); }) {}
  ~RebuildWorker() { finish(); }

  void push(WorkItem item) {
    {
      std::lock_guard lock(mutex_);
      queue_.push_back(std::move(item));
    }
    cv_.notify_one();
  }

  // Drains the queue, joins, and rethrows any stage failure.
  void finish() {
    if (thread_.joinable()) {
      {
        std::lock_guard lock(mutex_);
        done_ = true;
      }
      cv_.notify_one();
      thread_.join();
    }
    if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
  }

 private:
  void loop() {
    for (;;) {
      WorkItem item;
      {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [this] { return done_ || !queue_.empty(); });
        if (queue_.empty()) return;
        item = std::move(queue_.front());
        queue_.pop_front();
      }
      if (error_) continue;
      try {
        stage_.process(item);
      } catch (...) {
        error_ = std::current_exception();
      }
    }
  }

  RebuildStage& stage_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<WorkItem> queue_;
  bool done_ = false;
  std::exception_ptr error_;
  std::thread thread_;
};

}  // namespace

std::string placement_to_json_line(const Placement& p) { return placement_json(p).dump(); }

PipelineSummary run_pipeline(std::istream& stream, const ContentGraph* content,
                             const PipelineConfig& config, const PipelineCallbacks& callbacks) {
  LabeledVoxelMap map(config.map);
  RebuildStage stage(content, config, callbacks);
  std::unique_ptr<RebuildWorker> worker;
  if (!config.sequential) worker = std::make_unique<RebuildWorker>(stage);

  auto dispatch = [&](std::size_t frame) {
    WorkItem item{frame, map.snapshot(), map.drain_changed()};
    if (worker) {
      worker->push(std::move(item));
    } else {
      stage.process(item);
    }
  };

  std::size_t frames = 0;
  std::size_t since_rebuild = 0;
  std::string line;
  std::size_t line_no = 0;
  try {
    while (std::getline(stream, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      StreamFrame f;
      try {
        f = parse_frame_line(line);
        map.integrate_frame(f.observations);
      } catch (const MalformedObservation& e) {
        throw MalformedObservation("line " + std::to_string(line_no) + ": " + e.what());
      }
      ++frames;
      if (++since_rebuild == config.rebuild_every) {
        dispatch(frames);
        since_rebuild = 0;
      }
    }
    if (since_rebuild > 0) dispatch(frames);
  } catch (...) {
    if (worker) {
      try {
        worker->finish();
      } catch (...) {
      }
    }
    throw;
  }
  if (worker) worker->finish();

  if (callbacks.on_event) {
    callbacks.on_event(
        json{{"event", "end"}, {"frames", frames}, {"rebuilds", stage.rebuilds()}}.dump());
  }
  return {frames, stage.rebuilds(), stage.graph(), stage.arrangement()};
}

}  // namespace scenectx

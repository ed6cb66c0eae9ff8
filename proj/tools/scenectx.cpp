// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
//
// scenectx: replay labeled observation streams, build scene graphs, match
// content graphs and score OBB predictions.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "scenectx/evaluation.hpp"
#include "scenectx/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scenectx;

namespace {

struct IoError : Error {
  using Error::Error;
};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

// Event log sink: stdout or a file, flushed per line so that a failing run
// leaves everything emitted so far in place.
class LineSink {
 public:
  explicit LineSink(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw IoError("cannot open '" + path + "' for writing");
    }
  }
  void write(const std::string& line) {
    std::ostream& os = file_ ? *file_ : std::cout;
    os << line << '\n';
    os.flush();
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

struct PipelineArgs {
  std::string stream;
  std::string config;
  std::size_t rebuild_every = 0;
  std::size_t limit_embeddings = 0;
  bool limit_set = false;
  bool seq = false;
  std::string export_dot;
  std::string export_obbs;
  std::string out;
};

PipelineConfig load_config(const PipelineArgs& a) {
  PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : parse_config(read_text(a.config));
  if (a.rebuild_every > 0) cfg.rebuild_every = a.rebuild_every;
  if (a.limit_set) cfg.arrangement.embedding_limit = a.limit_embeddings;
  cfg.sequential = a.seq;
  return cfg;
}

void add_pipeline_options(CLI::App* cmd, PipelineArgs& a) {
  cmd->add_option("stream", a.stream, "observation stream (one JSON frame per line)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--config", a.config, "engine configuration document")->check(CLI::ExistingFile);
  cmd->add_option("--rebuild-every", a.rebuild_every, "frames between graph rebuilds")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--seq", a.seq, "run every stage on one thread");
  cmd->add_option("--export-dot", a.export_dot, "write one DOT file per rebuild into DIR");
  cmd->add_option("--export-obbs", a.export_obbs, "write the final instance boxes as an annotation");
  cmd->add_option("-o,--out", a.out, "output file (default stdout)");
}

PipelineSummary drive(const PipelineArgs& a, const ContentGraph* content, LineSink* sink) {
  const PipelineConfig cfg = load_config(a);
  std::ifstream in(a.stream, std::ios::binary);
  if (!in) throw IoError("cannot open '" + a.stream + "' for reading");
  if (!a.export_dot.empty()) fs::create_directories(a.export_dot);

  PipelineCallbacks cb;
  if (sink) cb.on_event = [sink](const std::string& line) { sink->write(line); };
  if (!a.export_dot.empty()) {
    cb.on_rebuild = [&a](const RebuildResult& r) {
      std::ostringstream name;
      name << "graph_" << std::setw(4) << std::setfill('0') << r.rebuild_index << ".dot";
      write_text(fs::path(a.export_dot) / name.str(), export_graph(r.graph, GraphFormat::kDot));
    };
  }
  PipelineSummary s = run_pipeline(in, content, cfg, cb);
  if (!a.export_obbs.empty()) {
    std::vector<AbstractedInstance> nodes;
    for (const auto& [_, inst] : s.final_graph.nodes) nodes.push_back(inst);
    write_text(a.export_obbs, serialize_annotation(annotation_from_instances(nodes)));
  }
  return s;
}

int cmd_run(const PipelineArgs& a, const std::string& content_path) {
  const ContentGraph content = parse_content_graph(read_text(content_path));
  for (const Diagnostic& d : validate_content_graph(content)) {
    std::cerr << "scenectx: " << to_token(d.severity) << ": " << d.node_id << ": " << d.message
              << '\n';
  }
  LineSink sink(a.out);
  drive(a, &content, &sink);
  return 0;
}

int cmd_build_graph(const PipelineArgs& a, const std::string& format) {
  const GraphFormat fmt = graph_format_from_string(format);
  const PipelineSummary s = drive(a, nullptr, nullptr);
  const std::string text = export_graph(s.final_graph, fmt);
  if (a.out.empty() || a.out == "-") {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  return 0;
}

int cmd_match(const std::string& graph_path, const std::string& content_path, std::size_t limit,
              double standoff, const std::string& out) {
  const SceneGraph g = parse_structured_graph(read_text(graph_path));
  const ContentGraph content = parse_content_graph(read_text(content_path));
  const MatchingGraph q = derive_matching_graph(content);
  const auto embeddings = find_embeddings(g, q, limit);
  LineSink sink(out);
  for (const Embedding& e : embeddings) {
    json j = json::object();
    for (const auto& [qid, iid] : e) j[qid] = iid;
    sink.write(json{{"embedding", j}}.dump());
  }
  ArrangementOptions opts;
  opts.standoff = standoff;
  opts.embedding_limit = limit;
  if (auto arr = rearrange_on_update(std::nullopt, g, content, opts)) {
    for (const Placement& p : arr->placements) sink.write(placement_to_json_line(p));
  }
  return 0;
}

int cmd_eval(const std::string& pred, const std::string& truth, const std::string& out) {
  const Annotation p = parse_annotation(read_text(pred));
  const Annotation t = parse_annotation(read_text(truth));
  const std::string text = serialize_report(eval_obbs(p.boxes, t.boxes));
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return 0;
}

int cmd_export(const std::string& graph_path, const std::string& format, const std::string& out) {
  const SceneGraph g = parse_structured_graph(read_text(graph_path));
  std::string text;
  if (format == "obbs") {
    std::vector<AbstractedInstance> nodes;
    for (const auto& [_, inst] : g.nodes) nodes.push_back(inst);
    text = serialize_annotation(annotation_from_instances(nodes));
  } else {
    text = export_graph(g, graph_format_from_string(format));
  }
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text(out, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Context-aware content placement over labeled 3D observation streams"};
  app.require_subcommand(1);

  PipelineArgs run_args;
  std::string run_content;
  auto* run = app.add_subcommand("run", "stream + content graph -> event log");
  add_pipeline_options(run, run_args);
  run->add_option("content", run_content, "content graph document")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--limit-embeddings", run_args.limit_embeddings, "stop matching after N embeddings")
      ->each([&](const std::string&) { run_args.limit_set = true; });

  PipelineArgs graph_args;
  std::string graph_format = "structured";
  auto* build = app.add_subcommand("build-graph", "stream -> final scene graph");
  add_pipeline_options(build, graph_args);
  build->add_option("--format", graph_format, "dot | structured")->capture_default_str();

  std::string match_graph, match_content, match_out;
  std::size_t match_limit = 0;
  double match_standoff = ArrangementOptions{}.standoff;
  auto* match = app.add_subcommand("match", "structured graph + content graph -> embeddings");
  match->add_option("graph", match_graph, "structured scene graph")->required()->check(CLI::ExistingFile);
  match->add_option("content", match_content, "content graph document")
      ->required()
      ->check(CLI::ExistingFile);
  match->add_option("--limit-embeddings", match_limit, "stop after N embeddings (0 = all)");
  match->add_option("--standoff", match_standoff, "push/open standoff in meters");
  match->add_option("-o,--out", match_out, "output file (default stdout)");

  std::string eval_pred, eval_truth, eval_out;
  auto* eval = app.add_subcommand("eval", "predicted + ground-truth annotations -> report");
  eval->add_option("predicted", eval_pred, "predicted annotation")->required()->check(CLI::ExistingFile);
  eval->add_option("truth", eval_truth, "ground-truth annotation")->required()->check(CLI::ExistingFile);
  eval->add_option("-o,--out", eval_out, "output file (default stdout)");

  std::string export_graph_path, export_format = "dot", export_out;
  auto* exp = app.add_subcommand("export", "structured graph -> dot | structured | obbs");
  exp->add_option("graph", export_graph_path, "structured scene graph")
      ->required()
      ->check(CLI::ExistingFile);
  exp->add_option("--format", export_format, "dot | structured | obbs")->capture_default_str();
  exp->add_option("-o,--out", export_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_args, run_content);
    if (*build) return cmd_build_graph(graph_args, graph_format);
    if (*match) return cmd_match(match_graph, match_content, match_limit, match_standoff, match_out);
    if (*eval) return cmd_eval(eval_pred, eval_truth, eval_out);
    if (*exp) return cmd_export(export_graph_path, export_format, export_out);
  } catch (const Error& e) {
    std::cerr << "scenectx: error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "scenectx: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

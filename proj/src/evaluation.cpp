// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "scenectx/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

#include "json_util.hpp"

namespace scenectx {

using detail::json;

Annotation annotation_from_instances(std::span<const AbstractedInstance> instances) {
  Annotation a;
  for (const auto& inst : instances) a.boxes.push_back({inst.instance_id, inst.category, inst.obb});
  std::sort(a.boxes.begin(), a.boxes.end(),
            [](const auto& x, const auto& y) { return x.instance_id < y.instance_id; });
  return a;
}

std::string serialize_annotation(const Annotation& a) {
  json boxes = json::array();
  for (const AnnotatedBox& b : a.boxes) {
    boxes.push_back({{"instance_id", b.instance_id},
                     {"category", b.category},
                     {"obb",
                      {{"center", detail::vec_to_json(b.obb.center)},
                       {"extents", detail::vec_to_json(b.obb.extents)},
                       {"yaw", b.obb.yaw},
                       {"has_front", b.obb.front.has_value()}}}});
  }
  return json{{"instances", boxes}}.dump(2) + "\n";
}

Annotation parse_annotation(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("annotation is not valid JSON: ") + e.what());
  }
  const json& list = detail::require(doc, "instances");
  if (!list.is_array()) throw SchemaError("'instances' must be an array");
  Annotation a;
  std::set<InstanceId> seen;
  for (const json& j : list) {
    AnnotatedBox b;
    const json& id = detail::require(j, "instance_id");
    if (!id.is_number_integer()) throw SchemaError("'instance_id' must be an integer");
    b.instance_id = id.get<InstanceId>();
    if (!seen.insert(b.instance_id).second) {
      throw SchemaError("duplicate instance id " + std::to_string(b.instance_id));
    }
    b.category = detail::require_string(j, "category");
    const json& o = detail::require(j, "obb");
    b.obb.kind = ObbKind::kInstance;
    b.obb.center = detail::vec3_from_json(detail::require(o, "center"), "center");
    b.obb.extents = detail::vec3_from_json(detail::require(o, "extents"), "extents");
    if ((b.obb.extents.array() <= 0.0).any()) {
      throw SchemaError("instance " + std::to_string(b.instance_id) + " has non-positive extents");
    }
    b.obb.yaw = detail::require_number(o, "yaw");
    const Vec2 dir(std::cos(b.obb.yaw), std::sin(b.obb.yaw));
    b.obb.axes = z_axes_from_direction(dir);
    if (o.contains("has_front") && o["has_front"].is_boolean() && o["has_front"].get<bool>()) {
      b.obb.front = dir;
    }
    a.boxes.push_back(std::move(b));
  }
  return a;
}

double orientation_error_deg(const Obb& predicted, const Obb& truth) {
  constexpr double to_deg = 180.0 / std::numbers::pi;
  auto cross = [](const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); };
  if (predicted.front && truth.front) {
    const Vec2& a = *predicted.front;
    const Vec2& b = *truth.front;
    return std::atan2(std::abs(cross(a, b)), a.dot(b)) * to_deg;
  }
  auto long_axis = [](const Obb& o) -> Vec2 {
    const int k = o.extents.x() >= o.extents.y() ? 0 : 1;
    return o.axes.col(k).head<2>();
  };
  const Vec2 a = long_axis(predicted), b = long_axis(truth);
  return std::atan2(std::abs(cross(a, b)), std::abs(a.dot(b))) * to_deg;
}

namespace {

struct Match {
  std::size_t pred = 0;
  std::size_t truth = 0;
  double iou = 0.0;
  double error_deg = 0.0;
};

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double pct(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

EvalReport eval_obbs(std::span<const AnnotatedBox> predicted, std::span<const AnnotatedBox> truth,
                     const std::vector<double>& iou_thresholds, double max_orientation_error_deg) {
  // Greedy matching is independent of the IoU threshold.
  std::vector<Match> candidates;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    for (std::size_t j = 0; j < truth.size(); ++j) {
      if (predicted[i].category != truth[j].category) continue;
      const double iou = iou_zaligned(predicted[i].obb, truth[j].obb);
      if (iou <= 0.0) continue;
      candidates.push_back({i, j, iou, orientation_error_deg(predicted[i].obb, truth[j].obb)});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Match& a, const Match& b) {
    return std::tie(b.iou, a.pred, a.truth) < std::tie(a.iou, b.pred, b.truth);
  });
  std::vector<bool> pred_used(predicted.size()), truth_used(truth.size());
  std::vector<Match> matches;
  for (const Match& m : candidates) {
    if (pred_used[m.pred] || truth_used[m.truth]) continue;
    pred_used[m.pred] = truth_used[m.truth] = true;
    matches.push_back(m);
  }

  std::set<std::string> categories;
  std::map<std::string, std::size_t> n_pred, n_truth;
  for (const auto& p : predicted) {
    categories.insert(p.category);
    ++n_pred[p.category];
  }
  for (const auto& t : truth) {
    categories.insert(t.category);
    ++n_truth[t.category];
  }

  EvalReport report;
  report.max_orientation_error_deg = max_orientation_error_deg;
  for (double th : iou_thresholds) {
    ThresholdReport tr;
    tr.iou_threshold = th;
    std::map<std::string, std::vector<double>> errors, tp_ious;
    std::vector<double> all_errors;
    for (const Match& m : matches) {
      if (m.iou < th) continue;
      const std::string& cat = truth[m.truth].category;
      errors[cat].push_back(m.error_deg);
      all_errors.push_back(m.error_deg);
      if (m.error_deg <= max_orientation_error_deg) tp_ious[cat].push_back(m.iou);
    }

    double prec_sum = 0.0, rec_sum = 0.0, iou_sum = 0.0;
    std::size_t iou_cats = 0;
    for (const std::string& cat : categories) {
      CategoryMetrics cm;
      cm.predictions = n_pred[cat];
      cm.truths = n_truth[cat];
      cm.true_positives = tp_ious[cat].size();
      cm.median_error_deg = median(errors[cat]);
      if (!tp_ious[cat].empty()) {
        double s = 0.0;
        for (double v : tp_ious[cat]) s += v;
        cm.tp_iou_pct = 100.0 * s / static_cast<double>(tp_ious[cat].size());
        iou_sum += *cm.tp_iou_pct;
        ++iou_cats;
      }
      cm.precision_pct = pct(cm.true_positives, cm.predictions);
      cm.recall_pct = pct(cm.true_positives, cm.truths);
      prec_sum += cm.precision_pct;
      rec_sum += cm.recall_pct;
      tr.overall.predictions += cm.predictions;
      tr.overall.truths += cm.truths;
      tr.overall.true_positives += cm.true_positives;
      tr.per_category.emplace(cat, cm);
    }
    if (!categories.empty()) {
      tr.overall.precision_pct = prec_sum / static_cast<double>(categories.size());
      tr.overall.recall_pct = rec_sum / static_cast<double>(categories.size());
    }
    if (iou_cats > 0) tr.overall.tp_iou_pct = iou_sum / static_cast<double>(iou_cats);
    tr.overall.median_error_deg = median(all_errors);
    report.thresholds.push_back(std::move(tr));
  }
  return report;
}

namespace {

json metrics_to_json(const CategoryMetrics& m) {
  return json{{"predictions", m.predictions},
              {"truths", m.truths},
              {"true_positives", m.true_positives},
              {"median_error_deg", m.median_error_deg ? json(*m.median_error_deg) : json(nullptr)},
              {"tp_iou_pct", m.tp_iou_pct ? json(*m.tp_iou_pct) : json(nullptr)},
              {"precision_pct", m.precision_pct},
              {"recall_pct", m.recall_pct}};
}

}  // namespace

std::string serialize_report(const EvalReport& report) {
  json doc;
  doc["matcher"] = report.matcher;
  doc["max_orientation_error_deg"] = report.max_orientation_error_deg;
  json list = json::array();
  for (const ThresholdReport& tr : report.thresholds) {
    json cats = json::object();
    for (const auto& [cat, m] : tr.per_category) cats[cat] = metrics_to_json(m);
    list.push_back({{"iou_threshold", tr.iou_threshold},
                    {"overall", metrics_to_json(tr.overall)},
                    {"categories", cats}});
  }
  doc["thresholds"] = list;
  return doc.dump(2) + "\n";
}

}  // namespace scenectx

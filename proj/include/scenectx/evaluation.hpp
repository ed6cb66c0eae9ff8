// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scenectx/abstraction.hpp"

namespace scenectx {

// One z-aligned box of an annotation file. When the box has a front, yaw is
// the front heading and the first extent runs along it.
struct AnnotatedBox {
  InstanceId instance_id = 0;
  std::string category;
  Obb obb;
};

struct Annotation {
  std::vector<AnnotatedBox> boxes;
};

Annotation annotation_from_instances(std::span<const AbstractedInstance> instances);
std::string serialize_annotation(const Annotation& a);
// Throws SchemaError on malformed input, duplicate ids or non-positive extents.
Annotation parse_annotation(std::string_view text);

struct CategoryMetrics {
  std::size_t predictions = 0;
  std::size_t truths = 0;
  std::size_t true_positives = 0;
  std::optional<double> median_error_deg;  // over matches with IoU >= threshold
  std::optional<double> tp_iou_pct;        // mean IoU of true positives
  double precision_pct = 0.0;
  double recall_pct = 0.0;
};

struct ThresholdReport {
  double iou_threshold = 0.25;
  std::map<std::string, CategoryMetrics> per_category;
  CategoryMetrics overall;  // counts summed, rates macro-averaged over categories
};

struct EvalReport {
  std::string matcher = "greedy-iou";
  double max_orientation_error_deg = 20.0;
  std::vector<ThresholdReport> thresholds;
};

// Angle between front directions when both boxes have one, otherwise between
// their long horizontal axes modulo 180 degrees.
double orientation_error_deg(const Obb& predicted, const Obb& truth);

// Greedy one-to-one matching by descending IoU within each category, then
// TP = same category, IoU >= threshold, orientation error <= max error.
EvalReport eval_obbs(std::span<const AnnotatedBox> predicted, std::span<const AnnotatedBox> truth,
                     const std::vector<double>& iou_thresholds = {0.25, 0.5},
                     double max_orientation_error_deg = 20.0);

std::string serialize_report(const EvalReport& report);

}  // namespace scenectx

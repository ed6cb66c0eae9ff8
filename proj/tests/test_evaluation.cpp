// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "scenectx/evaluation.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace scenectx;

namespace {

constexpr double kPi = std::numbers::pi;

AnnotatedBox ann(InstanceId id, const std::string& cat, const Vec3& center, const Vec3& extents,
                 double yaw, bool has_front = true) {
  AnnotatedBox b;
  b.instance_id = id;
  b.category = cat;
  const Vec2 dir(std::cos(yaw), std::sin(yaw));
  b.obb.center = center;
  b.obb.extents = extents;
  b.obb.axes = z_axes_from_direction(dir);
  b.obb.yaw = wrap_two_pi(yaw);
  if (has_front) b.obb.front = dir;
  return b;
}

const ThresholdReport& at(const EvalReport& r, double th) {
  for (const auto& t : r.thresholds) {
    if (t.iou_threshold == th) return t;
  }
  FAIL("missing threshold");
  return r.thresholds.front();
}

}  // namespace

TEST_CASE("iou of simple boxes") {
  const auto a = ann(1, "x", {0, 0, 0.5}, {1, 1, 1}, 0.0);
  CHECK(iou_zaligned(a.obb, a.obb) == doctest::Approx(1.0));
  // Footprint overlap is half of each box, same z-extent.
  const auto b = ann(2, "x", {0.5, 0, 0.5}, {1, 1, 1}, 0.0);
  CHECK(iou_zaligned(a.obb, b.obb) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Half the height overlaps.
  const auto c = ann(3, "x", {0, 0, 1.0}, {1, 1, 1}, 0.0);
  CHECK(iou_zaligned(a.obb, c.obb) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  const auto far = ann(4, "x", {5, 0, 0.5}, {1, 1, 1}, 0.0);
  CHECK(iou_zaligned(a.obb, far.obb) == 0.0);
  // A unit square rotated 45 degrees inside another.
  const auto d = ann(5, "x", {0, 0, 0.5}, {1, 1, 1}, kPi / 4);
  const double inter = 4.0 * (std::sqrt(2.0) - 1.0) / 2.0 * 1.0;  // regular octagon of inradius 0.5
  CHECK(iou_zaligned(a.obb, d.obb) == doctest::Approx(inter / (2.0 - inter)).epsilon(1e-12));
}

TEST_CASE("iou agrees with Monte Carlo sampling on random pairs") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Vec3 ea(0.3 + u(rng), 0.3 + u(rng), 0.3 + u(rng));
    const Vec3 eb(0.3 + u(rng), 0.3 + u(rng), 0.3 + u(rng));
    const auto a = ann(1, "x", {0, 0, 0.5}, ea, 2 * kPi * u(rng));
    const auto b = ann(2, "x", {0.6 * (u(rng) - 0.5), 0.6 * (u(rng) - 0.5), 0.5 + 0.4 * (u(rng) - 0.5)},
                       eb, 2 * kPi * u(rng));
    const double ref = oracle::monte_carlo_iou(a.obb, b.obb, 1'000'000, 17u + i);
    CHECK(std::abs(iou_zaligned(a.obb, b.obb) - ref) <= 1e-3);
  }
}

TEST_CASE("orientation error") {
  const auto a = ann(1, "chair", {0, 0, 0}, {1, 1, 1}, 0.3);
  CHECK(orientation_error_deg(a.obb, a.obb) == 0.0);
  const auto b = ann(1, "chair", {0, 0, 0}, {1, 1, 1}, 0.3 + kPi);
  CHECK(orientation_error_deg(a.obb, b.obb) == doctest::Approx(180.0));
  // Frontless boxes compare long axes modulo 180 degrees.
  const auto t1 = ann(1, "table", {0, 0, 0}, {2, 1, 1}, 0.0, false);
  const auto t2 = ann(1, "table", {0, 0, 0}, {1, 2, 1}, kPi / 2 + 0.1, false);
  CHECK(orientation_error_deg(t1.obb, t2.obb) == doctest::Approx(0.1 * 180 / kPi));
  const auto t3 = ann(1, "table", {0, 0, 0}, {2, 1, 1}, kPi - 0.2, false);
  CHECK(orientation_error_deg(t1.obb, t3.obb) == doctest::Approx(0.2 * 180 / kPi));
}

TEST_CASE("perfect predictions") {
  std::vector<AnnotatedBox> truth = {ann(1, "chair", {0, 0, 0.45}, {0.5, 0.5, 0.9}, 0.4),
                                     ann(2, "sofa", {2, 0, 0.4}, {0.9, 1.8, 0.8}, 1.2),
                                     ann(3, "table", {0, 2, 0.4}, {1.2, 0.8, 0.8}, 0.2, false)};
  const auto r = eval_obbs(truth, truth);
  CHECK(r.matcher == "greedy-iou");
  REQUIRE(r.thresholds.size() == 2);
  for (const auto& t : r.thresholds) {
    CHECK(t.overall.precision_pct == 100.0);
    CHECK(t.overall.recall_pct == 100.0);
    CHECK(t.overall.median_error_deg == 0.0);
    CHECK(*t.overall.tp_iou_pct == doctest::Approx(100.0));
    CHECK(t.per_category.size() == 3);
  }
}

TEST_CASE("a 10 degree yaw error with IoU 0.6 counts at both thresholds") {
  const auto truth = ann(1, "chair", {0, 0, 0.5}, {1, 1, 1}, 0.0);
  // Shift along x to bring IoU to 0.6 after the rotation.
  auto pred = ann(7, "chair", {0, 0, 0.5}, {1, 1, 1}, 10.0 * kPi / 180);
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    pred.obb.center.x() = mid;
    (iou_zaligned(pred.obb, truth.obb) > 0.6 ? lo : hi) = mid;
  }
  pred.obb.center.x() = lo;
  REQUIRE(iou_zaligned(pred.obb, truth.obb) == doctest::Approx(0.6).epsilon(1e-6));
  std::vector<AnnotatedBox> p = {pred}, t = {truth};
  const auto r = eval_obbs(p, t);
  CHECK(at(r, 0.25).overall.true_positives == 1);
  CHECK(at(r, 0.5).overall.true_positives == 1);
  CHECK(*at(r, 0.5).overall.median_error_deg == doctest::Approx(10.0));
}

TEST_CASE("an IoU of one third is a TP only at 0.25") {
  std::vector<AnnotatedBox> t = {ann(1, "box", {0, 0, 0.5}, {1, 1, 1}, 0.0)};
  std::vector<AnnotatedBox> p = {ann(1, "box", {0.5, 0, 0.5}, {1, 1, 1}, 0.0)};
  const auto r = eval_obbs(p, t);
  CHECK(at(r, 0.25).overall.true_positives == 1);
  CHECK(at(r, 0.5).overall.true_positives == 0);
  CHECK(at(r, 0.5).overall.precision_pct == 0.0);
  CHECK_FALSE(at(r, 0.5).overall.median_error_deg.has_value());
}

TEST_CASE("empty inputs do not divide by zero") {
  std::vector<AnnotatedBox> some = {ann(1, "chair", {0, 0, 0.5}, {1, 1, 1}, 0.0)};
  std::vector<AnnotatedBox> none;
  const auto no_pred = eval_obbs(none, some);
  CHECK(at(no_pred, 0.25).overall.recall_pct == 0.0);
  CHECK(at(no_pred, 0.25).overall.precision_pct == 0.0);
  const auto no_truth = eval_obbs(some, none);
  CHECK(at(no_truth, 0.25).overall.precision_pct == 0.0);
  CHECK(at(no_truth, 0.25).overall.recall_pct == 0.0);
  const auto nothing = eval_obbs(none, none);
  CHECK(at(nothing, 0.5).overall.true_positives == 0);
  CHECK(at(nothing, 0.5).per_category.empty());
}

TEST_CASE("categories must agree and matching is one-to-one") {
  std::vector<AnnotatedBox> t = {ann(1, "chair", {0, 0, 0.5}, {1, 1, 1}, 0.0)};
  std::vector<AnnotatedBox> wrong = {ann(1, "sofa", {0, 0, 0.5}, {1, 1, 1}, 0.0)};
  CHECK(at(eval_obbs(wrong, t), 0.25).overall.true_positives == 0);
  std::vector<AnnotatedBox> doubled = {ann(1, "chair", {0, 0, 0.5}, {1, 1, 1}, 0.0),
                                       ann(2, "chair", {0.05, 0, 0.5}, {1, 1, 1}, 0.0)};
  const auto r = at(eval_obbs(doubled, t), 0.25);
  CHECK(r.overall.true_positives == 1);
  CHECK(r.overall.precision_pct == 50.0);
  CHECK(r.overall.recall_pct == 100.0);
}

TEST_CASE("yaw errors beyond 20 degrees are not true positives") {
  std::vector<AnnotatedBox> t, p;
  for (int i = 0; i < 10; ++i) {
    t.push_back(ann(i, "chair", {3.0 * i, 0, 0.45}, {0.5, 0.5, 0.9}, 0.1 * i));
    p.push_back(ann(i, "chair", {3.0 * i, 0, 0.45}, {0.5, 0.5, 0.9}, 0.1 * i + 25.0 * kPi / 180));
  }
  const auto r = eval_obbs(p, t);
  for (const auto& tr : r.thresholds) {
    CHECK(tr.overall.true_positives == 0);
    CHECK(*tr.overall.median_error_deg == doctest::Approx(25.0));
  }
}

TEST_CASE("annotation round-trip and validation") {
  std::vector<AbstractedInstance> xs;
  for (const auto& obj : synth::living_room(true)) {
    xs.push_back(abstract_instance(synth::record_from(obj)).instance);
  }
  const Annotation a = annotation_from_instances(xs);
  const std::string text = serialize_annotation(a);
  const Annotation back = parse_annotation(text);
  REQUIRE(back.boxes.size() == 3);
  CHECK(serialize_annotation(back) == text);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.boxes[i].obb.front.has_value() == a.boxes[i].obb.front.has_value());
    CHECK(iou_zaligned(back.boxes[i].obb, a.boxes[i].obb) == doctest::Approx(1.0));
  }
  const auto r = eval_obbs(a.boxes, back.boxes);
  CHECK(r.thresholds[1].overall.recall_pct == 100.0);

  CHECK_THROWS_AS(parse_annotation("[]"), SchemaError);
  CHECK_THROWS_AS(parse_annotation(R"({"instances": [
      {"instance_id": 1, "category": "a", "obb": {"center": [0,0,0], "extents": [1,1,1], "yaw": 0}},
      {"instance_id": 1, "category": "b", "obb": {"center": [0,0,0], "extents": [1,1,1], "yaw": 0}}]})"),
                  SchemaError);
  CHECK_THROWS_AS(parse_annotation(R"({"instances": [
      {"instance_id": 1, "category": "a", "obb": {"center": [0,0,0], "extents": [1,0,1], "yaw": 0}}]})"),
                  SchemaError);
}

TEST_CASE("report serialization names the matcher") {
  std::vector<AnnotatedBox> t = {ann(1, "chair", {0, 0, 0.5}, {1, 1, 1}, 0.0)};
  const std::string s = serialize_report(eval_obbs(t, t));
  CHECK(s.find("greedy-iou") != std::string::npos);
  CHECK(s.find("chair") != std::string::npos);
}

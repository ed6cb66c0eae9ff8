// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "scenectx/abstraction.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using namespace scenectx;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Vec3> box_corners(const Vec3& lo, const Vec3& hi) {
  std::vector<Vec3> out;
  for (int i = 0; i < 8; ++i) {
    out.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(), i & 4 ? hi.z() : lo.z());
  }
  return out;
}

std::vector<Vec3> rotate_z(std::vector<Vec3> pts, double theta, const Vec3& shift = Vec3::Zero()) {
  const Eigen::AngleAxisd r(theta, Vec3::UnitZ());
  for (Vec3& p : pts) p = r * p + shift;
  return pts;
}

double mod90_deg(double rad) {
  double d = std::fmod(rad * 180.0 / kPi, 90.0);
  if (d < 0) d += 90.0;
  return d;
}

double circ_diff90(double a_deg, double b_deg) {
  const double d = std::abs(a_deg - b_deg);
  return std::min(d, 90.0 - d);
}

std::vector<Vec3> random_cloud(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  const double sx = u(rng), sy = u(rng), sz = u(rng);
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(sx * g(rng), sy * g(rng), sz * g(rng));
  return pts;
}

Obb part_at(const Vec3& center, Affordance a) {
  Obb p;
  p.kind = ObbKind::kPart;
  p.center = center;
  p.extents = Vec3(0.3, 0.3, 0.05);
  p.affordance = a;
  return p;
}

Obb unit_instance(const Vec3& extents) {
  Obb o;
  o.center = Vec3(0, 0, extents.z() / 2);
  o.extents = extents;
  return o;
}

bool front_is_face_normal(const Obb& box) {
  if (!box.front) return true;
  for (int k = 0; k < 2; ++k) {
    const Vec2 n = box.axes.col(k).head<2>();
    if (*box.front == n || *box.front == Vec2(-n)) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("fit_zobb on an axis-aligned box") {
  const auto pts = box_corners({0, 0, 0}, {2, 1, 1});
  const Obb box = fit_zobb(pts);
  CHECK(box.kind == ObbKind::kInstance);
  CHECK_FALSE(box.front.has_value());
  CHECK(box.center.isApprox(Vec3(1, 0.5, 0.5), 1e-12));
  CHECK(box.extents.isApprox(Vec3(2, 1, 1), 1e-12));
  CHECK(box.yaw == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_zobb on the box rotated 30 degrees matches the yaw sweep") {
  const auto pts = rotate_z(box_corners({0, 0, 0}, {2, 1, 1}), kPi / 6);
  const Obb box = fit_zobb(pts);
  const double area = box.extents.x() * box.extents.y();
  CHECK(area == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(area == doctest::Approx(oracle::sweep_min_area(pts)).epsilon(1e-9));
  CHECK(circ_diff90(mod90_deg(box.yaw), 30.0) < 1e-6);
  CHECK(box.yaw >= 0.0);
  CHECK(box.yaw < kPi / 2);
}

TEST_CASE("fit_zobb rejects degenerate inputs") {
  std::vector<Vec3> same(3, Vec3(1, 2, 3));
  CHECK_THROWS_AS(fit_zobb(same), InsufficientPoints);
  std::vector<Vec3> two = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(fit_zobb(two), InsufficientPoints);
  std::vector<Vec3> collinear = {{0, 0, 0}, {1, 1, 0}, {2, 2, 5}, {3, 3, 1}};
  CHECK_THROWS_AS(fit_zobb(collinear), InsufficientPoints);
}

TEST_CASE("fit_zobb containment and minimality on random clouds") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pts = random_cloud(rng, 200);
    const Obb box = fit_zobb(pts);
    for (const Vec3& p : pts) CHECK(box.contains(p, 1e-9));
    const double area = box.extents.x() * box.extents.y();
    CHECK(std::abs(area - oracle::sweep_min_area(pts)) <= 1e-6 * area);
    double zmin = 1e300, zmax = -1e300;
    for (const Vec3& p : pts) {
      zmin = std::min(zmin, p.z());
      zmax = std::max(zmax, p.z());
    }
    CHECK(box.extents.z() == doctest::Approx(zmax - zmin).epsilon(1e-12));
  }
}

TEST_CASE("fit_zobb matches the exact pairwise oracle on small sets") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pts = random_cloud(rng, 12);
    const Obb box = fit_zobb(pts);
    const double area = box.extents.x() * box.extents.y();
    CHECK(area == doctest::Approx(oracle::pairwise_min_area(pts)).epsilon(1e-9));
  }
}

TEST_CASE("fit_zobb is equivariant under z-rotation and translation") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> angle(0.0, 2 * kPi);
  std::uniform_real_distribution<double> shift(-10.0, 10.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pts = random_cloud(rng, 100);
    const Obb base = fit_zobb(pts);
    const double theta = angle(rng);
    const Vec3 t(shift(rng), shift(rng), shift(rng));

    const Obb rot = fit_zobb(rotate_z(pts, theta));
    CHECK(rot.extents.x() * rot.extents.y() ==
          doctest::Approx(base.extents.x() * base.extents.y()).epsilon(1e-9));
    CHECK(circ_diff90(mod90_deg(rot.yaw), mod90_deg(base.yaw + theta)) < 1e-6);

    std::vector<Vec3> moved = pts;
    for (Vec3& p : moved) p += t;
    const Obb tr = fit_zobb(moved);
    CHECK((tr.center - (base.center + t)).norm() < 1e-9);
    CHECK((tr.extents - base.extents).norm() < 1e-9);
    CHECK(circ_diff90(mod90_deg(tr.yaw), mod90_deg(base.yaw)) < 1e-6);
  }
}

TEST_CASE("fit_part_obb on a planar seat patch") {
  std::vector<Vec3> pts;
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; j <= 6; ++j) pts.emplace_back(0.05 * i, 0.05 * j, 0.45);
  const Obb part = fit_part_obb(pts);
  CHECK(part.kind == ObbKind::kPart);
  CHECK(part.extents.minCoeff() == doctest::Approx(kExtentEpsilon));
  bool has_z = false;
  for (int k = 0; k < 3; ++k) has_z = has_z || std::abs(std::abs(part.axes.col(k).z()) - 1.0) < 1e-9;
  CHECK(has_z);
  CHECK(part.axes.col(0).isApprox(Vec3::UnitX(), 1e-9));
  CHECK(part.extents.x() == doctest::Approx(0.5));
  CHECK(part.extents.y() == doctest::Approx(0.3));
  CHECK(part.axes.determinant() == doctest::Approx(1.0));
  for (const Vec3& p : pts) CHECK(part.contains(p, 1e-9));
}

TEST_CASE("fit_part_obb on a tilted backrest matches an independent eigen-solver") {
  // Backrest plane 0.45 wide (y), 0.5 tall, tilted 20 degrees back from vertical.
  const double tilt = 20.0 * kPi / 180.0;
  const Vec3 up(-std::sin(tilt), 0.0, std::cos(tilt));
  std::vector<Vec3> pts;
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 18; ++j) pts.push_back(Vec3(0, 0.025 * j - 0.225, 0.5) + up * (0.025 * i));

  const Obb part = fit_part_obb(pts);
  Vec3 mean = Vec3::Zero();
  for (const Vec3& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - mean) * (p - mean).transpose();
  cov /= static_cast<double>(pts.size());
  const auto ref = oracle::jacobi_eigen(cov);

  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(part.axes.col(k).dot(ref.vectors.col(k))) == doctest::Approx(1.0).epsilon(1e-9));
  }
  const double angle_deg = std::acos(std::min(1.0, std::abs(part.axes.col(0).dot(up)))) * 180 / kPi;
  CHECK(angle_deg < 1.0);
  CHECK(part.axes.determinant() == doctest::Approx(1.0));
}

TEST_CASE("fit_part_obb principal axes agree with the oracle on random clouds") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto pts = random_cloud(rng, 300);
    const Eigen::AngleAxisd tilt(0.7 * trial, Vec3(1, 2, 3).normalized());
    for (Vec3& p : pts) p = tilt * p;
    const Obb part = fit_part_obb(pts);
    Vec3 mean = Vec3::Zero();
    for (const Vec3& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    Mat3 cov = Mat3::Zero();
    for (const Vec3& p : pts) cov += (p - mean) * (p - mean).transpose();
    const auto ref = oracle::jacobi_eigen(cov);
    for (int k = 0; k < 3; ++k) {
      CHECK(std::abs(part.axes.col(k).dot(ref.vectors.col(k))) > 1.0 - 1e-6);
    }
    CHECK((part.axes.transpose() * part.axes - Mat3::Identity()).norm() < 1e-9);
    CHECK(part.axes.determinant() == doctest::Approx(1.0));
    for (const Vec3& p : pts) CHECK(part.contains(p, 1e-9));
  }
}

TEST_CASE("fit_part_obb rejects fewer than three points") {
  std::vector<Vec3> two = {{0, 0, 0}, {1, 0, 0}};
  CHECK_THROWS_AS(fit_part_obb(two), InsufficientPoints);
}

TEST_CASE("estimate_front: affordance rule for a chair") {
  const Obb obb = unit_instance({0.5, 0.5, 0.9});
  std::map<Affordance, Obb> parts;
  parts.emplace(Affordance::kSittable, part_at({0, 0.1, 0.45}, Affordance::kSittable));
  parts.emplace(Affordance::kLeanable, part_at({0, -0.1, 0.7}, Affordance::kLeanable));
  const std::vector<Vec3> normals = {Vec3(0, -1, 0)};
  const auto est = estimate_front(obb, "chair", normals, parts);
  CHECK(est.rule == FrontRule::kAffordance);
  REQUIRE(est.obb.front.has_value());
  CHECK(*est.obb.front == Vec2(0, 1));
  CHECK(est.obb.yaw == doctest::Approx(kPi / 2));
  CHECK(front_is_face_normal(est.obb));
}

TEST_CASE("estimate_front: extent and normal rule for a sofa") {
  const Obb obb = unit_instance({1.8, 0.9, 0.8});
  std::vector<Vec3> normals = {Vec3(0.1, -1, 0).normalized(), Vec3(-0.1, -1, 0.2).normalized(),
                               Vec3(0, 0, 1)};
  const auto est = estimate_front(obb, "sofa", normals, {});
  CHECK(est.rule == FrontRule::kExtentAndNormals);
  REQUIRE(est.obb.front.has_value());
  CHECK(est.obb.front->isApprox(Vec2(0, -1), 1e-12));
  CHECK(front_is_face_normal(est.obb));
  // Extents are re-expressed along the front.
  CHECK(est.obb.extents.x() == doctest::Approx(0.9));
  CHECK(est.obb.extents.y() == doctest::Approx(1.8));
}

TEST_CASE("estimate_front: beds use the long axis") {
  const Obb obb = unit_instance({1.0, 2.0, 0.5});
  const std::vector<Vec3> normals = {Vec3(0, 1, 0)};
  const auto est = estimate_front(obb, "bed", normals, {});
  REQUIRE(est.obb.front.has_value());
  CHECK(est.obb.front->isApprox(Vec2(0, 1), 1e-12));
}

TEST_CASE("estimate_front: frontless categories and degenerate normals") {
  const Obb obb = unit_instance({1.2, 0.8, 0.75});
  const std::vector<Vec3> normals = {Vec3(1, 0, 0)};
  const auto table = estimate_front(obb, "table", normals, {});
  CHECK(table.rule == FrontRule::kFrontless);
  CHECK_FALSE(table.obb.front.has_value());

  const std::vector<Vec3> cancel = {Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1)};
  const auto cab = estimate_front(obb, "cabinet", cancel, {});
  CHECK(cab.rule == FrontRule::kDegenerateNormals);
  CHECK_FALSE(cab.obb.front.has_value());

  AbstractionOptions opts;
  opts.frontless_categories = {};
  CHECK(estimate_front(obb, "table", normals, {}, opts).obb.front.has_value());
}

TEST_CASE("estimate_front keeps the box geometry") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts = random_cloud(rng, 60);
    const Obb obb = fit_zobb(pts);
    std::vector<Vec3> normals;
    for (int i = 0; i < 10; ++i) normals.push_back(Vec3(u(rng), u(rng), u(rng)).normalized());
    const auto est = estimate_front(obb, "cabinet", normals, {});
    CHECK(front_is_face_normal(est.obb));
    CHECK((est.obb.center - obb.center).norm() < 1e-12);
    CHECK(est.obb.extents.prod() == doctest::Approx(obb.extents.prod()).epsilon(1e-12));
    for (const Vec3& p : pts) CHECK(est.obb.contains(p, 1e-9));
    if (est.obb.front) {
      CHECK(est.obb.yaw >= 0.0);
      CHECK(est.obb.yaw < 2 * kPi);
      CHECK(est.obb.axes.col(0).head<2>() == *est.obb.front);
    }
  }
}

TEST_CASE("affordance rule ignores the observation normals") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    auto obj = synth::chair(1, {u(rng), u(rng)}, (u(rng) + 1.0) * kPi, 0.03);
    InstanceRecord rec = synth::record_from(obj);
    const auto base = abstract_instance(rec);
    REQUIRE(base.front_rule == FrontRule::kAffordance);

    InstanceRecord negated = rec;
    for (Vec3& n : negated.normals) n = -n;
    CHECK(abstract_instance(negated).instance == base.instance);

    InstanceRecord shuffled = rec;
    std::shuffle(shuffled.normals.begin(), shuffled.normals.end(), rng);
    CHECK(abstract_instance(shuffled).instance == base.instance);
  }
}

TEST_CASE("abstract_instance composes fits and fronts") {
  const double yaw = 0.4;
  const auto chair = abstract_instance(synth::record_from(synth::chair(1, {1, 2}, yaw)));
  CHECK(chair.front_rule == FrontRule::kAffordance);
  CHECK(chair.instance.part_obbs.size() == 2);
  CHECK(chair.instance.attributes ==
        std::set<Affordance>{Affordance::kSittable, Affordance::kLeanable});
  REQUIRE(chair.instance.obb.front.has_value());
  CHECK(chair.instance.obb.front->isApprox(Vec2(std::cos(yaw), std::sin(yaw)), 1e-9));
  CHECK(chair.warnings.empty());

  const auto table = abstract_instance(synth::record_from(synth::table(2, {0, 0}, 0.3)));
  CHECK_FALSE(table.instance.obb.front.has_value());
  CHECK(table.front_rule == FrontRule::kFrontless);

  // Sofa seen from the front only, so the normals lean toward the front.
  auto sofa = synth::sofa(3, {0, 0}, yaw);
  const Vec2 heading(std::cos(yaw), std::sin(yaw));
  std::erase_if(sofa.observations, [&](const LabeledObservation& o) {
    return o.normal.head<2>().dot(heading) < -0.5;
  });
  InstanceRecord rec = synth::record_from(sofa);
  rec.parts[Affordance::kLeanable].resize(2);
  const auto fallback = abstract_instance(rec);
  CHECK(fallback.instance.part_obbs.size() == 1);
  CHECK_FALSE(fallback.instance.attributes.contains(Affordance::kLeanable));
  CHECK(fallback.warnings.size() == 1);
  CHECK(fallback.front_rule == FrontRule::kExtentAndNormals);
  REQUIRE(fallback.instance.obb.front.has_value());
  CHECK(fallback.instance.obb.front->isApprox(heading, 1e-9));

  InstanceRecord tiny;
  tiny.instance_id = 4;
  tiny.category = "lamp";
  tiny.points = {Vec3(0, 0, 0), Vec3(0, 0, 1)};
  tiny.normals = {Vec3::UnitZ(), Vec3::UnitZ()};
  CHECK_THROWS_AS(abstract_instance(tiny), InsufficientPoints);
}

TEST_CASE("convex hull of a square with interior points") {
  std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0.5, 0.5, 3}, {0.5, 0, 1}};
  const auto hull = convex_hull_xy(pts);
  CHECK(hull.size() == 4);
}

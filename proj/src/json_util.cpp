// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#include "json_util.hpp"

namespace scenectx::detail {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::string require_string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double require_number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) throw SchemaError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }
json vec_to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

namespace {

template <int N>
Eigen::Matrix<double, N, 1> vec_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N) {
    throw SchemaError(std::string("'") + what + "' must be an array of " + std::to_string(N) +
                      " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw SchemaError(std::string("'") + what + "' holds a non-number");
    v[i] = j[i].get<double>();
  }
  return v;
}

}  // namespace

Vec3 vec3_from_json(const json& j, const char* what) { return vec_from_json<3>(j, what); }
Vec2 vec2_from_json(const json& j, const char* what) { return vec_from_json<2>(j, what); }

json obb_to_json(const Obb& box) {
  json j;
  j["kind"] = box.kind == ObbKind::kInstance ? "instance" : "part";
  j["center"] = vec_to_json(box.center);
  j["extents"] = vec_to_json(box.extents);
  j["axes"] = json::array({vec_to_json(Vec3(box.axes.col(0))), vec_to_json(Vec3(box.axes.col(1))),
                           vec_to_json(Vec3(box.axes.col(2)))});
  j["yaw"] = box.yaw;
  j["front"] = box.front ? vec_to_json(*box.front) : json(nullptr);
  j["affordance"] = box.affordance ? json(std::string(to_token(*box.affordance))) : json(nullptr);
  return j;
}

Obb obb_from_json(const json& j) {
  Obb box;
  const std::string kind = require_string(j, "kind");
  if (kind == "instance") {
    box.kind = ObbKind::kInstance;
  } else if (kind == "part") {
    box.kind = ObbKind::kPart;
  } else {
    throw SchemaError("unknown box kind '" + kind + "'");
  }
  box.center = vec3_from_json(require(j, "center"), "center");
  box.extents = vec3_from_json(require(j, "extents"), "extents");
  const json& axes = require(j, "axes");
  if (!axes.is_array() || axes.size() != 3) throw SchemaError("'axes' must hold 3 columns");
  for (int i = 0; i < 3; ++i) box.axes.col(i) = vec3_from_json(axes[i], "axes");
  box.yaw = require_number(j, "yaw");
  if (j.contains("front") && !j["front"].is_null()) box.front = vec2_from_json(j["front"], "front");
  if (j.contains("affordance") && !j["affordance"].is_null()) {
    const std::string tok = require_string(j, "affordance");
    auto a = affordance_from_token(tok);
    if (!a) throw UnknownAffordance("unknown affordance '" + tok + "'");
    box.affordance = *a;
  }
  return box;
}

json instance_to_json(const AbstractedInstance& inst) {
  json j;
  j["id"] = std::to_string(inst.instance_id);
  j["instance_id"] = inst.instance_id;
  j["kind"] = "real";
  j["category"] = inst.category;
  json affs = json::array();
  for (Affordance a : inst.attributes) affs.push_back(std::string(to_token(a)));
  j["affordances"] = affs;
  j["obb"] = obb_to_json(inst.obb);
  json parts = json::object();
  for (const auto& [a, box] : inst.part_obbs) parts[std::string(to_token(a))] = obb_to_json(box);
  j["parts"] = parts;
  return j;
}

AbstractedInstance instance_from_json(const json& j) {
  AbstractedInstance inst;
  const json& id = require(j, "instance_id");
  if (!id.is_number_integer()) throw SchemaError("'instance_id' must be an integer");
  inst.instance_id = id.get<InstanceId>();
  inst.category = require_string(j, "category");
  inst.obb = obb_from_json(require(j, "obb"));
  if (j.contains("parts")) {
    const json& parts = j["parts"];
    if (!parts.is_object()) throw SchemaError("'parts' must be an object");
    for (const auto& [tok, box] : parts.items()) {
      auto a = affordance_from_token(tok);
      if (!a) throw UnknownAffordance("unknown affordance '" + tok + "'");
      inst.part_obbs.emplace(*a, obb_from_json(box));
      inst.attributes.insert(*a);
    }
  }
  return inst;
}

json thresholds_to_json(const RelationThresholds& th) {
  return json{{"d_offset", th.d_offset},
              {"d_adjacent", th.d_adjacent},
              {"d_near", th.d_near},
              {"d_support", th.d_support}};
}

RelationThresholds thresholds_from_json(const json& j, RelationThresholds th) {
  if (!j.is_object()) throw SchemaError("thresholds must be an object");
  auto read = [&](const char* key, double& field) {
    if (j.contains(key)) field = require_number(j, key);
  };
  read("d_offset", th.d_offset);
  read("d_adjacent", th.d_adjacent);
  read("d_near", th.d_near);
  read("d_support", th.d_support);
  return th;
}

}  // namespace scenectx::detail

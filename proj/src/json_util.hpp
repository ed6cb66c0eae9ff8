// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON encoding of geometry shared by the graph export, annotation files and
// the event log. Internal to the library.

#include <string>

#include <json.hpp>

#include "scenectx/abstraction.hpp"
#include "scenectx/relations.hpp"

namespace scenectx::detail {

using nlohmann::json;

json vec_to_json(const Vec3& v);
json vec_to_json(const Vec2& v);
Vec3 vec3_from_json(const json& j, const char* what);
Vec2 vec2_from_json(const json& j, const char* what);

json obb_to_json(const Obb& box);
Obb obb_from_json(const json& j);

json instance_to_json(const AbstractedInstance& inst);
AbstractedInstance instance_from_json(const json& j);

json thresholds_to_json(const RelationThresholds& th);
RelationThresholds thresholds_from_json(const json& j, RelationThresholds defaults = {});

// Typed field access that reports SchemaError with the field name.
const json& require(const json& j, const char* key);
std::string require_string(const json& j, const char* key);
double require_number(const json& j, const char* key);

}  // namespace scenectx::detail

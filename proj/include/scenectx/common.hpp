// Copyright (c) scenectx contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace scenectx {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using InstanceId = std::int64_t;

// Part-level interaction labels carried by observations and part boxes.
enum class Affordance { kSittable, kSupportable, kPushable, kOpenable, kLeanable };

inline constexpr std::array<Affordance, 5> kAllAffordances = {
    Affordance::kSittable, Affordance::kSupportable, Affordance::kPushable,
    Affordance::kOpenable, Affordance::kLeanable};

std::string_view to_token(Affordance a);
std::optional<Affordance> affordance_from_token(std::string_view token);

// Base of every error raised by the engine. Subclasses name the failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MalformedObservation : Error { using Error::Error; };
struct InsufficientPoints : Error { using Error::Error; };
struct FrontMissing : Error { using Error::Error; };
struct DuplicateInstanceId : Error { using Error::Error; };
struct UnsupportedFormat : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct UnknownRelation : SchemaError { using SchemaError::SchemaError; };
struct UnknownAffordance : SchemaError { using SchemaError::SchemaError; };
struct DanglingEdge : SchemaError { using SchemaError::SchemaError; };
struct EmptyMatchingGraph : Error { using Error::Error; };
struct MissingActionTarget : Error { using Error::Error; };
struct MissingRequiredPart : Error { using Error::Error; };

}  // namespace scenectx

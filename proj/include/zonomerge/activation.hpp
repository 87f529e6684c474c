/*
 * Copyright 2026 The Zonomerge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ZONOMERGE_ACTIVATION_HPP
#define ZONOMERGE_ACTIVATION_HPP

#include <cmath>
#include <string>
#include <string_view>

#include "zonomerge/errors.hpp"

namespace zonomerge {

enum class ActivationKind { ReLU, Sigmoid, Tanh };

inline double activate(ActivationKind kind, double x) {
  switch (kind) {
    case ActivationKind::ReLU:
      return x > 0.0 ? x : 0.0;
    case ActivationKind::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case ActivationKind::Tanh:
      return std::tanh(x);
  }
  return x;
}

/// Global bound on |σ'| over the real line. ReLU is piecewise linear and
/// never needs it, but 1 is still a valid bound.
inline constexpr double derivative_bound(ActivationKind kind) {
  return kind == ActivationKind::Sigmoid ? 0.25 : 1.0;
}

inline std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::ReLU:
      return "relu";
    case ActivationKind::Sigmoid:
      return "sigmoid";
    case ActivationKind::Tanh:
      return "tanh";
  }
  return "?";
}

inline ActivationKind parse_activation(std::string_view name) {
  if (name == "relu") return ActivationKind::ReLU;
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "tanh") return ActivationKind::Tanh;
  throw UnknownActivation("unknown activation '" + std::string(name) + "'");
}

}  // namespace zonomerge

#endif  // ZONOMERGE_ACTIVATION_HPP

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

#ifndef ZONOMERGE_INSTANCE_HPP
#define ZONOMERGE_INSTANCE_HPP

#include <json.hpp>

#include <filesystem>
#include <string>

#include "zonomerge/network.hpp"
#include "zonomerge/verifier.hpp"

namespace zonomerge {

/// One verification query: an input box and the unsafe output set.
struct Instance {
  std::string id;
  InputSpec input;
  UnsafeSpec unsafe;
};

/// Accepted documents:
///   { "center": [...], "radius": r, "label": j }
///   { "center": [...], "box": [[lo, hi], ...], "unsafe": { "A": [[...]], "b": [...] } }
/// Any combination of radius/box with label/unsafe is allowed. "center" may be
/// omitted when "box" is given.
inline Instance instance_from_json(const nlohmann::json& doc, std::string id = {}) {
  if (!doc.is_object()) throw ParseError("instance: top level must be an object");
  Instance inst;
  inst.id = std::move(id);

  if (doc.contains("box")) {
    const auto& box = doc["box"];
    if (!box.is_array()) throw ParseError("instance: 'box' must be an array of [lo, hi] pairs");
    Vector lower(static_cast<Index>(box.size()));
    Vector upper(static_cast<Index>(box.size()));
    for (std::size_t i = 0; i < box.size(); ++i) {
      if (!box[i].is_array() || box[i].size() != 2 || !box[i][0].is_number() || !box[i][1].is_number()) {
        throw ParseError("instance: 'box' entry " + std::to_string(i) + " must be [lo, hi]");
      }
      lower(static_cast<Index>(i)) = box[i][0].get<double>();
      upper(static_cast<Index>(i)) = box[i][1].get<double>();
    }
    try {
      inst.input = InputSpec::from_box(IntervalVector(std::move(lower), std::move(upper)));
    } catch (const Error& e) {
      throw ParseError(std::string("instance: invalid box: ") + e.what());
    }
  } else {
    if (!doc.contains("center")) throw ParseError("instance: missing 'center'");
    if (!doc.contains("radius") || !doc["radius"].is_number()) throw ParseError("instance: missing 'radius' or 'box'");
    const Vector c = detail::json_to_vector(doc["center"], 0, "center");
    try {
      inst.input = InputSpec::ball(c, doc["radius"].get<double>());
    } catch (const Error& e) {
      throw ParseError(std::string("instance: ") + e.what());
    }
  }

  if (doc.contains("label")) {
    if (!doc["label"].is_number_integer()) throw ParseError("instance: 'label' must be an integer");
    inst.unsafe = Classification{doc["label"].get<Index>()};
  } else if (doc.contains("unsafe")) {
    const auto& u = doc["unsafe"];
    if (!u.is_object() || !u.contains("A") || !u.contains("b")) {
      throw ParseError("instance: 'unsafe' needs 'A' and 'b'");
    }
    inst.unsafe = Halfspaces{detail::json_to_matrix(u["A"], 0, "A"), detail::json_to_vector(u["b"], 0, "b")};
  } else {
    throw ParseError("instance: needs either 'label' or 'unsafe'");
  }
  return inst;
}

inline Instance load_instance(const std::filesystem::path& path) {
  const auto doc = detail::read_json_file(path);
  try {
    return instance_from_json(doc, path.stem().string());
  } catch (const Error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

/// Checks that an instance fits a network; throws DimensionMismatch or
/// IndexOutOfRange otherwise.
inline void validate_instance(const Instance& inst, const Network& net) {
  detail::require_same_dim(inst.input.dim(), net.input_width(), "instance input vs network input");
  validate_unsafe(inst.unsafe, net.output_width());
}

inline nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc;
  doc["center"] = detail::vector_to_json(inst.input.center);
  const double r = inst.input.dim() > 0 ? inst.input.radius(0) : 0.0;
  if ((inst.input.radius.array() == r).all()) {
    doc["radius"] = r;
  } else {
    const IntervalVector box = inst.input.box();
    auto pairs = nlohmann::json::array();
    for (Index i = 0; i < box.dim(); ++i) pairs.push_back({box.lower()(i), box.upper()(i)});
    doc["box"] = std::move(pairs);
  }
  if (const auto* cls = std::get_if<Classification>(&inst.unsafe)) {
    doc["label"] = cls->label;
  } else {
    const auto& hs = std::get<Halfspaces>(inst.unsafe);
    doc["unsafe"] = {{"A", detail::matrix_to_json(hs.A)}, {"b", detail::vector_to_json(hs.b)}};
  }
  return doc;
}

}  // namespace zonomerge

#endif  // ZONOMERGE_INSTANCE_HPP

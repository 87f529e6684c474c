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

#ifndef ZONOMERGE_NETWORK_HPP
#define ZONOMERGE_NETWORK_HPP

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "zonomerge/activation.hpp"
#include "zonomerge/errors.hpp"
#include "zonomerge/interval.hpp"

namespace zonomerge {

struct LinearLayer {
  Matrix weights;  // rows: output neurons
  Vector bias;

  Index in_width() const noexcept { return weights.cols(); }
  Index out_width() const noexcept { return weights.rows(); }
};

struct ActivationLayer {
  ActivationKind kind = ActivationKind::ReLU;
  Index width = 0;
};

using Layer = std::variant<LinearLayer, ActivationLayer>;

inline bool is_linear(const Layer& layer) { return std::holds_alternative<LinearLayer>(layer); }

/// Feed-forward network of alternating linear and activation layers.
///
/// The first layer is always linear. The last one is either an activation
/// (the classic alternating form) or a linear output layer.
class Network {
 public:
  Network() = default;

  /// Validates and normalizes: adjacent linear layers are fused into one, and
  /// activation widths are taken from the preceding linear layer.
  Network(std::string name, std::vector<Layer> layers);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Layer>& layers() const noexcept { return layers_; }
  Index input_width() const noexcept { return input_width_; }
  Index output_width() const noexcept { return output_width_; }

  /// Activation layers that are followed by a linear layer, i.e. the ones
  /// eligible for neuron merging. Positions index into layers().
  std::vector<std::size_t> hidden_activation_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k + 1 < layers_.size(); ++k) {
      if (!is_linear(layers_[k])) out.push_back(k);
    }
    return out;
  }

 private:
  std::string name_;
  std::vector<Layer> layers_;
  Index input_width_ = 0;
  Index output_width_ = 0;
};

inline Network::Network(std::string name, std::vector<Layer> layers) : name_(std::move(name)) {
  if (layers.empty()) throw ShapeError(0, "network has no layers");
  std::vector<Layer> fused;
  for (std::size_t k = 0; k < layers.size(); ++k) {
    auto& layer = layers[k];
    if (auto* lin = std::get_if<LinearLayer>(&layer)) {
      if (lin->weights.rows() != lin->bias.size()) {
        throw ShapeError(k, "weights have " + std::to_string(lin->weights.rows()) + " rows but bias has " +
                                std::to_string(lin->bias.size()) + " entries");
      }
      if (lin->weights.rows() == 0 || lin->weights.cols() == 0) {
        throw ShapeError(k, "linear layer has an empty weight matrix");
      }
      if (!lin->weights.allFinite() || !lin->bias.allFinite()) {
        throw ShapeError(k, "non-finite weight or bias");
      }
      if (fused.empty()) {
        fused.emplace_back(std::move(*lin));
        continue;
      }
      if (auto* prev = std::get_if<LinearLayer>(&fused.back())) {
        if (lin->weights.cols() != prev->weights.rows()) {
          throw ShapeError(k, "expects " + std::to_string(lin->weights.cols()) + " inputs but previous layer has " +
                                  std::to_string(prev->weights.rows()) + " outputs");
        }
        Vector bias = lin->weights * prev->bias + lin->bias;
        Matrix weights = lin->weights * prev->weights;
        prev->weights = std::move(weights);
        prev->bias = std::move(bias);
        continue;
      }
      const auto& act = std::get<ActivationLayer>(fused.back());
      if (lin->weights.cols() != act.width) {
        throw ShapeError(k, "expects " + std::to_string(lin->weights.cols()) + " inputs but previous layer has " +
                                std::to_string(act.width) + " outputs");
      }
      fused.emplace_back(std::move(*lin));
    } else {
      auto& act = std::get<ActivationLayer>(layer);
      if (fused.empty()) throw ShapeError(k, "network must start with a linear layer");
      const auto* prev = std::get_if<LinearLayer>(&fused.back());
      if (prev == nullptr) throw ShapeError(k, "two consecutive activation layers");
      if (act.width != 0 && act.width != prev->out_width()) {
        throw ShapeError(k, "activation width " + std::to_string(act.width) + " does not match " +
                                std::to_string(prev->out_width()));
      }
      act.width = prev->out_width();
      fused.emplace_back(act);
    }
  }
  layers_ = std::move(fused);
  input_width_ = std::get<LinearLayer>(layers_.front()).in_width();
  output_width_ = std::visit(
      [](const auto& l) -> Index {
        if constexpr (std::is_same_v<std::decay_t<decltype(l)>, LinearLayer>) {
          return l.out_width();
        } else {
          return l.width;
        }
      },
      layers_.back());
}

/// Concrete forward pass.
inline Vector eval(const Network& net, const Vector& x) {
  detail::require_same_dim(x.size(), net.input_width(), "eval");
  Vector h = x;
  for (const auto& layer : net.layers()) {
    if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
      h = lin->weights * h + lin->bias;
    } else {
      const auto kind = std::get<ActivationLayer>(layer).kind;
      h = h.unaryExpr([kind](double v) { return activate(kind, v); });
    }
  }
  return h;
}

/// Widths v_0, v_1, ..., v_K (input width followed by every layer's output width).
inline std::vector<Index> neuron_counts(const Network& net) {
  std::vector<Index> counts{net.input_width()};
  for (const auto& layer : net.layers()) {
    if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
      counts.push_back(lin->out_width());
    } else {
      counts.push_back(std::get<ActivationLayer>(layer).width);
    }
  }
  return counts;
}

namespace detail {

inline Vector json_to_vector(const nlohmann::json& j, std::size_t layer, const char* field) {
  if (!j.is_array()) throw ParseError("layer " + std::to_string(layer) + ": '" + field + "' must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ParseError("layer " + std::to_string(layer) + ": '" + field + "' entry " + std::to_string(i) +
                       " is not a number");
    }
    v(static_cast<Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Matrix json_to_matrix(const nlohmann::json& j, std::size_t layer, const char* field) {
  if (!j.is_array() || j.empty()) {
    throw ParseError("layer " + std::to_string(layer) + ": '" + field + "' must be a non-empty array of rows");
  }
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array()) {
      throw ParseError("layer " + std::to_string(layer) + ": '" + field + "' row " + std::to_string(r) +
                       " is not an array");
    }
    if (j[r].size() != cols) {
      throw ShapeError(layer, std::string("'") + field + "' row " + std::to_string(r) + " has " +
                                  std::to_string(j[r].size()) + " entries, expected " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) {
        throw ParseError("layer " + std::to_string(layer) + ": '" + field + "' entry (" + std::to_string(r) + "," +
                         std::to_string(c) + ") is not a number");
      }
      m(static_cast<Index>(r), static_cast<Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

inline nlohmann::json vector_to_json(const Vector& v) {
  auto j = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  auto j = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) j.push_back(vector_to_json(m.row(r).transpose()));
  return j;
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace detail

/// Builds a network from the JSON model document.
inline Network network_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("model: top level must be an object");
  if (!doc.contains("layers") || !doc["layers"].is_array()) throw ParseError("model: missing 'layers' array");
  std::string name = doc.value("name", std::string{});
  std::vector<Layer> layers;
  const auto& entries = doc["layers"];
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& entry = entries[k];
    if (!entry.is_object() || !entry.contains("type") || !entry["type"].is_string()) {
      throw ParseError("layer " + std::to_string(k) + ": missing 'type'");
    }
    const auto type = entry["type"].get<std::string>();
    if (type == "linear") {
      if (!entry.contains("weights") || !entry.contains("bias")) {
        throw ParseError("layer " + std::to_string(k) + ": linear layer needs 'weights' and 'bias'");
      }
      layers.emplace_back(LinearLayer{detail::json_to_matrix(entry["weights"], k, "weights"),
                                      detail::json_to_vector(entry["bias"], k, "bias")});
    } else if (type == "activation") {
      if (!entry.contains("kind") || !entry["kind"].is_string()) {
        throw ParseError("layer " + std::to_string(k) + ": activation layer needs 'kind'");
      }
      ActivationLayer act;
      try {
        act.kind = parse_activation(entry["kind"].get<std::string>());
      } catch (const UnknownActivation& e) {
        throw UnknownActivation("layer " + std::to_string(k) + ": " + e.what());
      }
      act.width = entry.value("width", Index{0});
      layers.emplace_back(act);
    } else {
      throw ParseError("layer " + std::to_string(k) + ": unknown layer type '" + type + "'");
    }
  }
  return Network(std::move(name), std::move(layers));
}

inline nlohmann::json network_to_json(const Network& net) {
  nlohmann::json doc;
  doc["name"] = net.name();
  auto layers = nlohmann::json::array();
  for (const auto& layer : net.layers()) {
    if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
      layers.push_back({{"type", "linear"},
                        {"weights", detail::matrix_to_json(lin->weights)},
                        {"bias", detail::vector_to_json(lin->bias)}});
    } else {
      layers.push_back({{"type", "activation"}, {"kind", to_string(std::get<ActivationLayer>(layer).kind)}});
    }
  }
  doc["layers"] = std::move(layers);
  return doc;
}

inline Network load_network(const std::filesystem::path& path) {
  const auto doc = detail::read_json_file(path);
  try {
    return network_from_json(doc);
  } catch (const ShapeError& e) {
    throw ShapeError(e.layer(), e.detail(), path.string());
  } catch (const UnknownActivation& e) {
    throw UnknownActivation(path.string() + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out << network_to_json(net).dump() << '\n';
}

}  // namespace zonomerge

#endif  // ZONOMERGE_NETWORK_HPP

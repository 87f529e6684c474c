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

#ifndef ZONOMERGE_VERIFIER_HPP
#define ZONOMERGE_VERIFIER_HPP

#include <chrono>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zonomerge/enclosure.hpp"
#include "zonomerge/interval.hpp"
#include "zonomerge/network.hpp"
#include "zonomerge/reduction.hpp"
#include "zonomerge/zonotope.hpp"

namespace zonomerge {

/// Input set: an axis-aligned box given by its center and per-dimension
/// half-widths, usually an L∞ ball around a sample.
struct InputSpec {
  Vector center;
  Vector radius;

  static InputSpec ball(const Vector& center, double radius) {
    if (!(radius >= 0.0) || !std::isfinite(radius)) throw Error("InputSpec: radius must be finite and >= 0");
    return {center, Vector::Constant(center.size(), radius)};
  }

  static InputSpec from_box(const IntervalVector& box) { return {zonomerge::center(box), box.radius()}; }

  Index dim() const noexcept { return center.size(); }
  IntervalVector box() const { return IntervalVector::from_center_radius(center, radius); }
};

/// Unsafe set {y : A·y <= b}.
struct Halfspaces {
  Matrix A;
  Vector b;
};

/// Unsafe set {y : y_j >= y_label for some j != label}.
struct Classification {
  Index label = 0;
};

using UnsafeSpec = std::variant<Halfspaces, Classification>;

enum class Verdict { Verified, Unknown };

inline std::string_view to_string(Verdict v) { return v == Verdict::Verified ? "verified" : "unknown"; }

inline Zonotope input_zonotope(const InputSpec& spec) {
  detail::require_same_dim(spec.radius.size(), spec.center.size(), "InputSpec");
  if (!(spec.radius.array() >= 0.0).all()) throw Error("InputSpec: radius must be >= 0");
  return Zonotope(spec.center, Matrix(spec.radius.asDiagonal()));
}

inline void validate_unsafe(const UnsafeSpec& spec, Index output_width) {
  if (const auto* hs = std::get_if<Halfspaces>(&spec)) {
    detail::require_same_dim(hs->A.cols(), output_width, "unsafe halfspaces (columns vs output)");
    detail::require_same_dim(hs->A.rows(), hs->b.size(), "unsafe halfspaces (rows vs b)");
  } else {
    const auto label = std::get<Classification>(spec).label;
    if (label < 0 || label >= output_width) {
      throw IndexOutOfRange("classification label " + std::to_string(label) + " outside output width " +
                            std::to_string(output_width));
    }
  }
}

/// Concrete membership test, used by counterexample search.
inline bool is_unsafe(const UnsafeSpec& spec, const Vector& y) {
  validate_unsafe(spec, y.size());
  if (const auto* hs = std::get_if<Halfspaces>(&spec)) {
    return ((hs->A * y).array() <= hs->b.array()).all();
  }
  const auto label = std::get<Classification>(spec).label;
  for (Index j = 0; j < y.size(); ++j) {
    if (j != label && y(j) >= y(label)) return true;
  }
  return false;
}

/// Sufficient disjointness test of the output set and the unsafe set. Contact
/// with the boundary counts as Unknown.
inline Verdict check(const Zonotope& output, const UnsafeSpec& spec) {
  validate_unsafe(spec, output.dim());
  if (const auto* hs = std::get_if<Halfspaces>(&spec)) {
    for (Index i = 0; i < hs->A.rows(); ++i) {
      if (halfspace_lower_bound(hs->A.row(i).transpose(), output) > hs->b(i)) return Verdict::Verified;
    }
    return Verdict::Unknown;
  }
  const auto label = std::get<Classification>(spec).label;
  Vector a = Vector::Zero(output.dim());
  for (Index j = 0; j < output.dim(); ++j) {
    if (j == label) continue;
    a.setZero();
    a(label) = 1.0;
    a(j) = -1.0;
    if (!(halfspace_lower_bound(a, output) > 0.0)) return Verdict::Unknown;
  }
  return Verdict::Verified;
}

/// Neuron counts of one mergeable activation layer. layer_index is 1-based.
struct LayerReduction {
  std::size_t layer_index = 0;
  Index original = 0;
  Index remaining = 0;
  std::size_t buckets = 0;
};

struct PhaseTimes {
  double lookahead_ms = 0.0;
  double enclosure_ms = 0.0;
  double check_ms = 0.0;

  PhaseTimes& operator+=(const PhaseTimes& o) {
    lookahead_ms += o.lookahead_ms;
    enclosure_ms += o.enclosure_ms;
    check_ms += o.check_ms;
    return *this;
  }
};

/// Look-ahead diagnostics for one mergeable layer (recorded on request).
struct LookaheadRecord {
  std::size_t layer_index = 0;
  IntervalVector predicted_output;  // interval look-ahead bounds, full width
  std::vector<Index> kept;
  IntervalVector enclosed_output;   // hull of the zonotope later built for the kept neurons
};

struct RunOptions {
  ApproximationConfig approximation;
  bool record_trace = false;
};

struct RunResult {
  Zonotope output;
  std::vector<LayerReduction> layers;
  PhaseTimes times;
  std::size_t intersection_fallbacks = 0;
  std::vector<LookaheadRecord> trace;
};

inline double remaining_percent(const std::vector<LayerReduction>& layers) {
  Index original = 0;
  Index remaining = 0;
  for (const auto& l : layers) {
    original += l.original;
    remaining += l.remaining;
  }
  return original == 0 ? 100.0 : 100.0 * static_cast<double>(remaining) / static_cast<double>(original);
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

/// Linear layer of the working copy; its bias turns interval-valued once a
/// merge has folded neurons into it.
struct WorkingLinear {
  Matrix weights;
  IntervalVector bias;
};

inline Zonotope enclose_working_linear(const WorkingLinear& layer, const Zonotope& input) {
  if (layer.bias.is_point()) return linear_map(layer.weights, layer.bias.lower(), input);
  const Vector bias_center = center(layer.bias);
  const IntervalVector residual(layer.bias.lower() - bias_center, layer.bias.upper() - bias_center);
  return add_interval(linear_map(layer.weights, bias_center, input), residual);
}

}  // namespace detail

/// Layer-by-layer zonotope propagation of the unmodified network.
inline Zonotope propagate_plain(const Network& net, const Zonotope& input, const ApproximationConfig& config = {}) {
  detail::require_same_dim(input.dim(), net.input_width(), "propagate_plain");
  Zonotope h = prune_zero_generators(input);
  for (const auto& layer : net.layers()) {
    if (const auto* lin = std::get_if<LinearLayer>(&layer)) {
      h = prune_zero_generators(enclose_linear(*lin, h));
    } else {
      h = prune_zero_generators(enclose_activation(std::get<ActivationLayer>(layer), h, config).output);
    }
  }
  return h;
}

/// One pass of on-the-fly reduction and verification at a fixed tolerance.
///
/// Before each mergeable activation layer is enclosed, cheap interval bounds of
/// its output are propagated from the current zonotope, buckets are formed
/// from them, and the working copy of the network is reduced around that
/// layer. The zonotope is then pushed through the reduced layers only.
/// BucketMode::None skips the look-ahead and reproduces propagate_plain().
inline RunResult run_once(const Network& net, const Zonotope& input, double tolerance, BucketMode mode,
                          const RunOptions& options = {}) {
  detail::require_same_dim(input.dim(), net.input_width(), "run_once");
  if (!(tolerance >= 0.0)) throw Error("run_once: tolerance must be >= 0");

  const auto& layers = net.layers();
  std::vector<std::optional<detail::WorkingLinear>> working(layers.size());
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (const auto* lin = std::get_if<LinearLayer>(&layers[k])) {
      working[k] = detail::WorkingLinear{lin->weights, IntervalVector::point(lin->bias)};
    }
  }

  RunResult result;
  Zonotope h = prune_zero_generators(input);
  std::optional<IntervalVector> previous_input_bounds;
  ActivationKind previous_kind = ActivationKind::ReLU;

  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (working[k]) {
      // Linear layers are consumed together with the activation that follows
      // them, except for a trailing output layer.
      if (k + 1 == layers.size()) {
        const auto t0 = detail::Clock::now();
        h = prune_zero_generators(detail::enclose_working_linear(*working[k], h));
        result.times.enclosure_ms += detail::elapsed_ms(t0);
      }
      continue;
    }
    const auto& act = std::get<ActivationLayer>(layers[k]);
    auto& prev = *working[k - 1];
    const bool mergeable = k + 1 < layers.size();
    std::vector<Index> kept;

    if (mergeable) {
      LayerReduction stats{k + 1, prev.weights.rows(), prev.weights.rows(), 0};
      if (mode != BucketMode::None) {
        const auto t0 = detail::Clock::now();
        IntervalVector input_bounds = interval_hull(h);
        if (previous_input_bounds) {
          const auto tightened = activation_map(previous_kind, *previous_input_bounds);
          try {
            input_bounds = intersect(input_bounds, tightened);
          } catch (const EmptyIntersection& e) {
            ++result.intersection_fallbacks;
            std::clog << "warning: look-ahead bounds of layer " << k << " did not intersect (" << e.what()
                      << "); keeping the zonotope hull\n";
          }
        }
        const IntervalVector predicted = activation_map(act.kind, affine_map(prev.weights, prev.bias, input_bounds));
        const BucketSet buckets = mode == BucketMode::Static ? static_buckets(act.kind, predicted, tolerance, k + 1)
                                                             : dynamic_buckets(predicted, tolerance, k + 1);
        auto& next = *working[k + 1];
        auto merged = merge(prev.weights, prev.bias, next.weights, next.bias, predicted, buckets);
        prev.weights = std::move(merged.prev_weights);
        prev.bias = std::move(merged.prev_bias);
        next.weights = std::move(merged.next_weights);
        next.bias = std::move(merged.next_bias);
        kept = std::move(merged.kept);
        stats.remaining = prev.weights.rows();
        stats.buckets = buckets.size();
        if (options.record_trace) result.trace.push_back({k + 1, predicted, kept, IntervalVector{}});
        result.times.lookahead_ms += detail::elapsed_ms(t0);
      }
      result.layers.push_back(stats);
    }

    const auto t0 = detail::Clock::now();
    h = prune_zero_generators(detail::enclose_working_linear(prev, h));
    auto enclosed = enclose_activation(act.kind, h, options.approximation);
    h = prune_zero_generators(enclosed.output);
    previous_input_bounds = std::move(enclosed.input_bounds);
    previous_kind = act.kind;
    result.times.enclosure_ms += detail::elapsed_ms(t0);
    if (options.record_trace && mergeable && mode != BucketMode::None) {
      result.trace.back().enclosed_output = interval_hull(h);
    }
  }
  result.output = std::move(h);
  return result;
}

/// Tolerances tried in order by verify() before falling back to the full network.
inline std::vector<double> default_schedule() { return {0.1, 0.05, 0.01, 0.005, 0.001}; }

inline void validate_schedule(const std::vector<double>& schedule) {
  if (schedule.empty()) throw Error("tolerance schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i] >= 0.0) || !std::isfinite(schedule[i])) {
      throw Error("tolerance schedule entries must be finite and >= 0");
    }
    if (i > 0 && !(schedule[i] < schedule[i - 1])) throw Error("tolerance schedule must be strictly decreasing");
  }
}

struct VerificationReport {
  Verdict verdict = Verdict::Unknown;
  double delta_final = 0.0;
  BucketMode mode = BucketMode::None;  // mode of the run that produced the verdict
  bool full_network = false;           // verdict came from the unreduced fallback
  std::size_t attempts = 0;
  std::vector<LayerReduction> layers;
  PhaseTimes times;  // summed over all attempts
  double total_ms = 0.0;
  IntervalVector output_bounds;
  std::size_t intersection_fallbacks = 0;

  double rn_percent() const { return remaining_percent(layers); }
};

/// Tries each tolerance of the schedule (largest first) and stops at the first
/// verified attempt; otherwise the unreduced network decides.
inline VerificationReport verify(const Network& net, const InputSpec& input, const UnsafeSpec& unsafe,
                                 const std::vector<double>& schedule, BucketMode mode, const RunOptions& options = {}) {
  validate_schedule(schedule);
  validate_unsafe(unsafe, net.output_width());
  const auto start = detail::Clock::now();
  const Zonotope x = input_zonotope(input);
  VerificationReport report;

  auto attempt = [&](double tolerance, BucketMode attempt_mode) {
    RunResult run = run_once(net, x, tolerance, attempt_mode, options);
    const auto t0 = detail::Clock::now();
    report.verdict = check(run.output, unsafe);
    run.times.check_ms += detail::elapsed_ms(t0);
    report.times += run.times;
    report.intersection_fallbacks += run.intersection_fallbacks;
    report.delta_final = tolerance;
    report.mode = attempt_mode;
    report.layers = std::move(run.layers);
    report.output_bounds = interval_hull(run.output);
    ++report.attempts;
  };

  if (mode != BucketMode::None) {
    for (double tolerance : schedule) {
      attempt(tolerance, mode);
      if (report.verdict == Verdict::Verified) break;
    }
  }
  if (report.verdict != Verdict::Verified) {
    attempt(0.0, BucketMode::None);
    report.full_network = true;
  }
  report.total_ms = detail::elapsed_ms(start);
  return report;
}

}  // namespace zonomerge

#endif  // ZONOMERGE_VERIFIER_HPP

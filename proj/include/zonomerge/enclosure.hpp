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

#ifndef ZONOMERGE_ENCLOSURE_HPP
#define ZONOMERGE_ENCLOSURE_HPP

#include <algorithm>
#include <cmath>
#include <limits>

#include "zonomerge/activation.hpp"
#include "zonomerge/interval.hpp"
#include "zonomerge/network.hpp"
#include "zonomerge/zonotope.hpp"

namespace zonomerge {

struct ApproximationConfig {
  int regression_samples = 20;  // evenly spaced, both endpoints included
  int error_samples = 100;      // smooth activations only
};

/// Linear approximation slope·x + intercept of an activation on [input_lower,
/// input_upper], with σ(x) - (slope·x + intercept) ∈ [error_lower, error_upper].
struct NeuronApproximation {
  double slope = 0.0;
  double intercept = 0.0;
  double error_lower = 0.0;
  double error_upper = 0.0;
  double input_lower = 0.0;
  double input_upper = 0.0;

  double residual(ActivationKind kind, double x) const { return activate(kind, x) - (slope * x + intercept); }
};

namespace detail {

inline double sample_point(double lower, double upper, int i, int count) {
  if (i == count - 1) return upper;
  return lower + (upper - lower) * static_cast<double>(i) / static_cast<double>(count - 1);
}

}  // namespace detail

inline NeuronApproximation approximate_neuron(ActivationKind kind, double lower, double upper,
                                              const ApproximationConfig& config = {}) {
  if (!(lower <= upper)) {
    throw Error("approximate_neuron: lower bound " + std::to_string(lower) + " exceeds upper bound " +
                std::to_string(upper));
  }
  if (config.regression_samples < 2 || config.error_samples < 2) {
    throw Error("approximate_neuron: need at least two regression and two error samples");
  }
  NeuronApproximation approx;
  approx.input_lower = lower;
  approx.input_upper = upper;
  if (lower == upper) {
    approx.intercept = activate(kind, lower);
    return approx;
  }

  // Ordinary least squares in centered form.
  const int p = config.regression_samples;
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (int i = 0; i < p; ++i) {
    const double x = detail::sample_point(lower, upper, i, p);
    mean_x += x;
    mean_y += activate(kind, x);
  }
  mean_x /= p;
  mean_y /= p;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < p; ++i) {
    const double x = detail::sample_point(lower, upper, i, p);
    const double dx = x - mean_x;
    sxx += dx * dx;
    sxy += dx * (activate(kind, x) - mean_y);
  }
  approx.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  approx.intercept = mean_y - approx.slope * mean_x;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto visit = [&](double x) {
    const double d = approx.residual(kind, x);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  };

  if (kind == ActivationKind::ReLU) {
    // Piecewise linear residual: extremes sit at the endpoints or the kink.
    visit(lower);
    visit(upper);
    if (lower < 0.0 && 0.0 < upper) visit(0.0);
  } else {
    const int m = config.error_samples;
    for (int i = 0; i < m; ++i) visit(detail::sample_point(lower, upper, i, m));
    const double spacing = (upper - lower) / static_cast<double>(m - 1);
    const double lipschitz = derivative_bound(kind) + std::abs(approx.slope);
    const double slack = lipschitz * spacing / 2.0;
    lo -= slack;
    hi += slack;
  }
  approx.error_lower = lo;
  approx.error_upper = hi;
  return approx;
}

/// Exact image of a zonotope under a linear layer.
inline Zonotope enclose_linear(const LinearLayer& layer, const Zonotope& input) {
  return linear_map(layer.weights, layer.bias, input);
}

struct ActivationEnclosure {
  Zonotope output;
  IntervalVector input_bounds;  // interval hull of the layer input
};

/// Over-approximates σ(H) neuron by neuron: input bounds from the hull of each
/// projection, a fitted line per neuron, and one fresh generator per neuron for
/// the approximation error.
inline ActivationEnclosure enclose_activation(ActivationKind kind, const Zonotope& input,
                                              const ApproximationConfig& config = {}) {
  const IntervalVector bounds = interval_hull(input);
  const Index n = input.dim();
  Vector c = input.center();
  Matrix g = input.generators();
  Vector error_lower(n);
  Vector error_upper(n);
  for (Index i = 0; i < n; ++i) {
    const auto approx = approximate_neuron(kind, bounds.lower()(i), bounds.upper()(i), config);
    c(i) = approx.slope * c(i) + approx.intercept;
    g.row(i) *= approx.slope;
    error_lower(i) = approx.error_lower;
    error_upper(i) = approx.error_upper;
  }
  Zonotope mapped(std::move(c), std::move(g));
  return {add_interval(mapped, IntervalVector(std::move(error_lower), std::move(error_upper))), bounds};
}

inline ActivationEnclosure enclose_activation(const ActivationLayer& layer, const Zonotope& input,
                                              const ApproximationConfig& config = {}) {
  detail::require_same_dim(layer.width, input.dim(), "enclose_activation");
  return enclose_activation(layer.kind, input, config);
}

}  // namespace zonomerge

#endif  // ZONOMERGE_ENCLOSURE_HPP

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

#ifndef ZONOMERGE_REDUCTION_HPP
#define ZONOMERGE_REDUCTION_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "zonomerge/activation.hpp"
#include "zonomerge/interval.hpp"

namespace zonomerge {

/// Membership test slack for I(w) ⊆ [y - δ, y + δ]. Only affects which
/// neurons are grouped; the merged constant uses the members' own bounds.
inline constexpr double kBucketSlack = 1e-12;

enum class BucketMode { Static, Dynamic, None };

inline std::string_view to_string(BucketMode mode) {
  switch (mode) {
    case BucketMode::Static:
      return "static";
    case BucketMode::Dynamic:
      return "dynamic";
    case BucketMode::None:
      return "none";
  }
  return "?";
}

inline BucketMode parse_bucket_mode(std::string_view name) {
  if (name == "static") return BucketMode::Static;
  if (name == "dynamic") return BucketMode::Dynamic;
  if (name == "none") return BucketMode::None;
  throw Error("unknown bucket mode '" + std::string(name) + "'");
}

/// Neurons of one layer whose output bounds all lie in [center - tolerance,
/// center + tolerance]. Members are 0-based and sorted.
struct MergeBucket {
  std::size_t layer = 0;
  double center = 0.0;
  double tolerance = 0.0;
  std::vector<Index> members;
};

/// Pairwise-disjoint buckets of a single layer.
using BucketSet = std::vector<MergeBucket>;

inline bool fits_bucket(const IntervalVector& bounds, Index w, double center, double tolerance) {
  return bounds.lower()(w) >= center - tolerance - kBucketSlack &&
         bounds.upper()(w) <= center + tolerance + kBucketSlack;
}

/// Asymptotic values used as fixed bucket centers, ascending.
inline std::vector<double> static_centers(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Sigmoid:
      return {0.0, 1.0};
    case ActivationKind::Tanh:
      return {-1.0, 1.0};
    case ActivationKind::ReLU:
      return {0.0};
  }
  return {};
}

/// Static buckets before the |B| > 1 filter: one entry per center, possibly
/// empty or singleton. A neuron that fits several centers goes to the nearest,
/// ties to the smaller center.
inline BucketSet static_bucket_candidates(ActivationKind kind, const IntervalVector& bounds, double tolerance,
                                          std::size_t layer = 0) {
  if (tolerance < 0.0) throw Error("static_buckets: negative tolerance");
  const auto centers = static_centers(kind);
  BucketSet buckets;
  for (double y : centers) buckets.push_back({layer, y, tolerance, {}});
  for (Index w = 0; w < bounds.dim(); ++w) {
    const double mid = (bounds.lower()(w) + bounds.upper()(w)) / 2.0;
    std::optional<std::size_t> best;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (!fits_bucket(bounds, w, centers[c], tolerance)) continue;
      if (!best || std::abs(mid - centers[c]) < std::abs(mid - centers[*best])) best = c;
    }
    if (best) buckets[*best].members.push_back(w);
  }
  return buckets;
}

inline BucketSet drop_singletons(BucketSet buckets) {
  std::erase_if(buckets, [](const MergeBucket& b) { return b.members.size() <= 1; });
  return buckets;
}

inline BucketSet static_buckets(ActivationKind kind, const IntervalVector& bounds, double tolerance,
                                std::size_t layer = 0) {
  return drop_singletons(static_bucket_candidates(kind, bounds, tolerance, layer));
}

/// Buckets centered at bound midpoints. Neurons are scanned in index order;
/// each still-unassigned neuron seeds a bucket at its own midpoint that
/// collects every later unassigned neuron fitting within the tolerance.
inline BucketSet dynamic_buckets(const IntervalVector& bounds, double tolerance, std::size_t layer = 0) {
  if (tolerance < 0.0) throw Error("dynamic_buckets: negative tolerance");
  const Index n = bounds.dim();
  std::vector<bool> assigned(static_cast<std::size_t>(n), false);
  BucketSet buckets;
  for (Index w = 0; w < n; ++w) {
    if (assigned[static_cast<std::size_t>(w)]) continue;
    const double y = (bounds.lower()(w) + bounds.upper()(w)) / 2.0;
    MergeBucket bucket{layer, y, tolerance, {}};
    for (Index v = w; v < n; ++v) {
      if (assigned[static_cast<std::size_t>(v)] || !fits_bucket(bounds, v, y, tolerance)) continue;
      assigned[static_cast<std::size_t>(v)] = true;
      bucket.members.push_back(v);
    }
    if (bucket.members.size() > 1) buckets.push_back(std::move(bucket));
  }
  return buckets;
}

/// Linear layers around a merged activation layer.
struct MergeResult {
  Matrix prev_weights;
  IntervalVector prev_bias;
  Matrix next_weights;
  IntervalVector next_bias;    // includes the merged neurons' contribution
  std::vector<Index> kept;     // surviving neuron indices of the merged layer
  std::vector<Index> removed;  // union of all bucket members, sorted
};

/// Removes every bucket member from the activation layer between
/// (prev_weights, prev_bias) and (next_weights, next_bias). The merged
/// neurons' outputs are replaced by their bounds and folded into the next
/// bias: next_bias ⊕ W_next(·, B)·bounds(B).
inline MergeResult merge(const Matrix& prev_weights, const IntervalVector& prev_bias, const Matrix& next_weights,
                         const IntervalVector& next_bias, const IntervalVector& bounds, const BucketSet& buckets) {
  const Index width = prev_weights.rows();
  detail::require_same_dim(prev_bias.dim(), width, "merge (previous bias)");
  detail::require_same_dim(next_weights.cols(), width, "merge (next weights)");
  detail::require_same_dim(next_bias.dim(), next_weights.rows(), "merge (next bias)");
  detail::require_same_dim(bounds.dim(), width, "merge (bounds)");

  std::vector<bool> in_bucket(static_cast<std::size_t>(width), false);
  for (const auto& bucket : buckets) {
    if (bucket.members.size() <= 1) continue;
    for (Index w : bucket.members) {
      if (w < 0 || w >= width) throw IndexOutOfRange("merge: neuron index " + std::to_string(w));
      if (in_bucket[static_cast<std::size_t>(w)]) {
        throw BucketOverlap("merge: neuron " + std::to_string(w) + " belongs to more than one bucket");
      }
      in_bucket[static_cast<std::size_t>(w)] = true;
    }
  }

  MergeResult result{Matrix{}, IntervalVector{}, Matrix{}, IntervalVector{}, {}, {}};
  for (Index w = 0; w < width; ++w) {
    (in_bucket[static_cast<std::size_t>(w)] ? result.removed : result.kept).push_back(w);
  }
  if (result.removed.empty()) {
    result.prev_weights = prev_weights;
    result.prev_bias = prev_bias;
    result.next_weights = next_weights;
    result.next_bias = next_bias;
    return result;
  }

  result.prev_weights = prev_weights(result.kept, Eigen::all);
  result.prev_bias = prev_bias.select(result.kept);
  result.next_weights = next_weights(Eigen::all, result.kept);
  const Matrix merged_columns = next_weights(Eigen::all, result.removed);
  result.next_bias = affine_map(merged_columns, next_bias, bounds.select(result.removed));
  return result;
}

inline MergeResult merge(const Matrix& prev_weights, const Vector& prev_bias, const Matrix& next_weights,
                         const Vector& next_bias, const IntervalVector& bounds, const BucketSet& buckets) {
  return merge(prev_weights, IntervalVector::point(prev_bias), next_weights, IntervalVector::point(next_bias), bounds,
               buckets);
}

}  // namespace zonomerge

#endif  // ZONOMERGE_REDUCTION_HPP

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

#ifndef ZONOMERGE_INTERVAL_HPP
#define ZONOMERGE_INTERVAL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <span>
#include <cmath>
#include <string>

#include "zonomerge/activation.hpp"
#include "zonomerge/errors.hpp"

namespace zonomerge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Components that are empty by at most this much collapse to their midpoint
/// in intersect(); anything worse is reported as EmptyIntersection.
inline constexpr double kIntersectionSlack = 1e-9;

/// Axis-aligned box [lower, upper] in R^n.
class IntervalVector {
 public:
  IntervalVector() = default;

  IntervalVector(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    detail::require_same_dim(lower_.size(), upper_.size(), "IntervalVector");
    for (Index i = 0; i < lower_.size(); ++i) {
      if (!(lower_(i) <= upper_(i))) {
        throw Error("IntervalVector: lower bound exceeds upper bound in component " +
                    std::to_string(i));
      }
    }
  }

  static IntervalVector point(const Vector& value) { return IntervalVector(value, value); }

  static IntervalVector from_center_radius(const Vector& center, const Vector& radius) {
    return IntervalVector(center - radius, center + radius);
  }

  Index dim() const noexcept { return lower_.size(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

  Vector radius() const { return (upper_ - lower_) / 2.0; }

  bool is_point() const { return lower_ == upper_; }

  bool contains(const Vector& x, double slack = 0.0) const {
    detail::require_same_dim(x.size(), dim(), "IntervalVector::contains");
    return ((x.array() >= lower_.array() - slack) && (x.array() <= upper_.array() + slack)).all();
  }

  IntervalVector select(std::span<const Index> rows) const;

  friend bool operator==(const IntervalVector&, const IntervalVector&) = default;

 private:
  Vector lower_;
  Vector upper_;
};

inline Vector center(const IntervalVector& box) { return (box.lower() + box.upper()) / 2.0; }

/// Minkowski sum of two boxes.
inline IntervalVector operator+(const IntervalVector& a, const IntervalVector& b) {
  detail::require_same_dim(a.dim(), b.dim(), "interval addition");
  return IntervalVector(a.lower() + b.lower(), a.upper() + b.upper());
}

inline IntervalVector intersect(const IntervalVector& a, const IntervalVector& b) {
  detail::require_same_dim(a.dim(), b.dim(), "intersect");
  Vector lower = a.lower().cwiseMax(b.lower());
  Vector upper = a.upper().cwiseMin(b.upper());
  for (Index i = 0; i < lower.size(); ++i) {
    if (lower(i) <= upper(i)) continue;
    if (lower(i) - upper(i) > kIntersectionSlack) {
      throw EmptyIntersection("intersect: component " + std::to_string(i) + " is empty ([" +
                              std::to_string(lower(i)) + ", " + std::to_string(upper(i)) + "])");
    }
    const double mid = (lower(i) + upper(i)) / 2.0;
    lower(i) = mid;
    upper(i) = mid;
  }
  return IntervalVector(std::move(lower), std::move(upper));
}

/// Image of a box under x -> Wx + b.
inline IntervalVector affine_map(const Matrix& weights, const Vector& bias, const IntervalVector& box) {
  detail::require_same_dim(weights.cols(), box.dim(), "affine_map (columns vs input)");
  detail::require_same_dim(weights.rows(), bias.size(), "affine_map (rows vs bias)");
  const Vector mid = weights * center(box) + bias;
  const Vector rad = weights.cwiseAbs() * box.radius();
  return IntervalVector(mid - rad, mid + rad);
}

/// As above with an interval-valued bias, i.e. W·box ⊕ bias.
inline IntervalVector affine_map(const Matrix& weights, const IntervalVector& bias,
                                 const IntervalVector& box) {
  if (bias.is_point()) return affine_map(weights, bias.lower(), box);
  detail::require_same_dim(weights.cols(), box.dim(), "affine_map (columns vs input)");
  detail::require_same_dim(weights.rows(), bias.dim(), "affine_map (rows vs bias)");
  const Vector mid = weights * center(box) + center(bias);
  const Vector rad = weights.cwiseAbs() * box.radius() + bias.radius();
  return IntervalVector(mid - rad, mid + rad);
}

/// Element-wise activation; exact because every supported kind is monotone.
inline IntervalVector activation_map(ActivationKind kind, const IntervalVector& box) {
  Vector lower(box.dim());
  Vector upper(box.dim());
  for (Index i = 0; i < box.dim(); ++i) {
    lower(i) = activate(kind, box.lower()(i));
    upper(i) = activate(kind, box.upper()(i));
  }
  return IntervalVector(std::move(lower), std::move(upper));
}

inline IntervalVector IntervalVector::select(std::span<const Index> rows) const {
  Vector lower(static_cast<Index>(rows.size()));
  Vector upper(static_cast<Index>(rows.size()));
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j] < 0 || rows[j] >= dim()) {
      throw IndexOutOfRange("IntervalVector::select: index " + std::to_string(rows[j]));
    }
    lower(static_cast<Index>(j)) = lower_(rows[j]);
    upper(static_cast<Index>(j)) = upper_(rows[j]);
  }
  return IntervalVector(std::move(lower), std::move(upper));
}

}  // namespace zonomerge

#endif  // ZONOMERGE_INTERVAL_HPP

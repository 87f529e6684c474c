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

#ifndef ZONOMERGE_ZONOTOPE_HPP
#define ZONOMERGE_ZONOTOPE_HPP

#include <string>

#include "zonomerge/interval.hpp"

namespace zonomerge {

/// Zonotope <c, G> = { c + G·β : β ∈ [-1, 1]^q }.
///
/// Generators are stored densely, one per column. q may be zero, in which case
/// the set is the single point c.
class Zonotope {
 public:
  Zonotope() = default;

  Zonotope(Vector center, Matrix generators)
      : center_(std::move(center)), generators_(std::move(generators)) {
    if (generators_.rows() != center_.size()) {
      if (generators_.size() == 0) {
        generators_.resize(center_.size(), 0);
      } else {
        detail::require_same_dim(generators_.rows(), center_.size(), "Zonotope (generators vs center)");
      }
    }
  }

  static Zonotope point(const Vector& c) { return Zonotope(c, Matrix(c.size(), 0)); }

  Index dim() const noexcept { return center_.size(); }
  Index num_generators() const noexcept { return generators_.cols(); }
  const Vector& center() const noexcept { return center_; }
  const Matrix& generators() const noexcept { return generators_; }

  /// c + G·β for a coefficient vector β (not checked against [-1, 1]).
  Vector at(const Vector& beta) const {
    detail::require_same_dim(beta.size(), num_generators(), "Zonotope::at");
    return center_ + generators_ * beta;
  }

  friend bool operator==(const Zonotope& a, const Zonotope& b) {
    return a.center_.size() == b.center_.size() && a.generators_.rows() == b.generators_.rows() &&
           a.generators_.cols() == b.generators_.cols() && a.center_ == b.center_ &&
           a.generators_ == b.generators_;
  }

 private:
  Vector center_;
  Matrix generators_;
};

inline IntervalVector interval_hull(const Zonotope& z) {
  const Vector delta = z.generators().cwiseAbs().rowwise().sum();
  return IntervalVector(z.center() - delta, z.center() + delta);
}

/// Z ⊕ box. One diagonal generator column is appended per dimension, including
/// zero-width ones; use prune_zero_generators() to drop them.
inline Zonotope add_interval(const Zonotope& z, const IntervalVector& box) {
  detail::require_same_dim(box.dim(), z.dim(), "add_interval");
  const Vector box_center = center(box);
  Matrix generators(z.dim(), z.num_generators() + box.dim());
  generators.leftCols(z.num_generators()) = z.generators();
  generators.rightCols(box.dim()) = (box.upper() - box_center).asDiagonal();
  return Zonotope(z.center() + box_center, std::move(generators));
}

/// Exact image under x -> Wx + b.
inline Zonotope linear_map(const Matrix& weights, const Vector& bias, const Zonotope& z) {
  detail::require_same_dim(weights.cols(), z.dim(), "linear_map (columns vs zonotope)");
  detail::require_same_dim(weights.rows(), bias.size(), "linear_map (rows vs bias)");
  Vector c = weights * z.center() + bias;
  Matrix g = weights * z.generators();
  return Zonotope(std::move(c), std::move(g));
}

/// One-dimensional projection onto coordinate i (0-based).
inline Zonotope project(const Zonotope& z, Index i) {
  if (i < 0 || i >= z.dim()) {
    throw IndexOutOfRange("project: index " + std::to_string(i) + " outside dimension " +
                          std::to_string(z.dim()));
  }
  return Zonotope(Vector::Constant(1, z.center()(i)), z.generators().row(i));
}

/// min over y ∈ Z of a·y.
inline double halfspace_lower_bound(const Vector& a, const Zonotope& z) {
  detail::require_same_dim(a.size(), z.dim(), "halfspace_lower_bound");
  const double spread = z.num_generators() == 0 ? 0.0 : (a.transpose() * z.generators()).cwiseAbs().sum();
  return a.dot(z.center()) - spread;
}

/// Drops generator columns that are identically zero. Keeps column order.
inline Zonotope prune_zero_generators(const Zonotope& z) {
  const Matrix& g = z.generators();
  Index kept = 0;
  for (Index j = 0; j < g.cols(); ++j) {
    if (!g.col(j).isZero(0.0)) ++kept;
  }
  if (kept == g.cols()) return z;
  Matrix pruned(g.rows(), kept);
  Index out = 0;
  for (Index j = 0; j < g.cols(); ++j) {
    if (!g.col(j).isZero(0.0)) pruned.col(out++) = g.col(j);
  }
  return Zonotope(z.center(), std::move(pruned));
}

}  // namespace zonomerge

#endif  // ZONOMERGE_ZONOTOPE_HPP

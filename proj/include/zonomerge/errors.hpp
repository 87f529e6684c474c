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

#ifndef ZONOMERGE_ERRORS_HPP
#define ZONOMERGE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace zonomerge {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Two enclosures of the same set did not overlap, even after allowing for
/// floating-point jitter.
class EmptyIntersection : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Structural problem in a network; carries the offending layer index.
class ShapeError : public Error {
 public:
  ShapeError(std::size_t layer, const std::string& what, const std::string& context = {})
      : Error((context.empty() ? std::string{} : context + ": ") + "layer " + std::to_string(layer) + ": " +
              what),
        layer_(layer),
        detail_(what) {}

  std::size_t layer() const noexcept { return layer_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t layer_;
  std::string detail_;
};

class UnknownActivation : public Error {
 public:
  using Error::Error;
};

class BucketOverlap : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require_same_dim(std::ptrdiff_t a, std::ptrdiff_t b, const char* context) {
  if (a != b) {
    throw DimensionMismatch(std::string(context) + ": dimension " + std::to_string(a) +
                            " does not match " + std::to_string(b));
  }
}

}  // namespace detail
}  // namespace zonomerge

#endif  // ZONOMERGE_ERRORS_HPP

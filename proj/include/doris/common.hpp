// Copyright 2026 The Doris Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DORIS_COMMON_HPP_
#define DORIS_COMMON_HPP_

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace doris {

class DorisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatchError : public DorisError {
 public:
  using DorisError::DorisError;
};

class NonFiniteRewardError : public DorisError {
 public:
  using DorisError::DorisError;
};

class EmptyConfidenceSetError : public DorisError {
 public:
  using DorisError::DorisError;
};

class MissingSlaterSlackError : public DorisError {
 public:
  using DorisError::DorisError;
};

class ConvergenceFailureError : public DorisError {
 public:
  using DorisError::DorisError;
};

class NotAStochasticEmbeddingError : public DorisError {
 public:
  using DorisError::DorisError;
};

class ConfigError : public DorisError {
 public:
  using DorisError::DorisError;
};

// log(sum_i exp(x_i)), stable for large-magnitude inputs. Returns -inf for
// an empty span.
inline double LogSumExp(std::span<const double> x) {
  if (x.empty()) return -std::numeric_limits<double>::infinity();
  double m = x[0];
  for (double v : x) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

inline double SquaredNorm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

inline double Norm(std::span<const double> x) { return std::sqrt(SquaredNorm(x)); }

inline double Dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatchError("dot: size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double PositivePart(double x) { return x > 0.0 ? x : 0.0; }

// Static block partition of [0, n) over at most `threads` workers. Each index
// is computed exactly once into caller-owned slots, so results cannot depend
// on the thread count.
void ParallelFor(int n, int threads, const std::function<void(int)>& body);

}  // namespace doris

#endif  // DORIS_COMMON_HPP_

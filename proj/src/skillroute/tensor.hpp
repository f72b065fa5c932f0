// Copyright 2026 The SkillRoute Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "skillroute/rng.hpp"

namespace skillroute {

/// Non-owning view of one parameter tensor (and its gradient, if any).
/// Data is Eigen's column-major storage.
struct TensorRef {
  std::string name;
  std::vector<std::size_t> shape;
  double* data = nullptr;
  double* grad = nullptr;
  std::size_t size = 0;
};

inline TensorRef tensor_ref(std::string name, Eigen::MatrixXd& m, Eigen::MatrixXd* g) {
  return {std::move(name),
          {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
          m.data(),
          g ? g->data() : nullptr,
          static_cast<std::size_t>(m.size())};
}

inline TensorRef tensor_ref(std::string name, Eigen::VectorXd& v, Eigen::VectorXd* g) {
  return {std::move(name), {static_cast<std::size_t>(v.size())}, v.data(), g ? g->data() : nullptr,
          static_cast<std::size_t>(v.size())};
}

inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

inline double gelu_grad(double x) {
  const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
  const double pdf = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return cdf + x * pdf;
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

/// Uniform(-bound, bound) fill.
inline void fill_uniform(double* data, std::size_t n, double bound, Rng& rng) {
  for (std::size_t i = 0; i < n; ++i) data[i] = (2.0 * rng.uniform01() - 1.0) * bound;
}

}  // namespace skillroute

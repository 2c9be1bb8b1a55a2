//
// Copyright 2026 The dpp Authors
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
//

#include "dpp/analytic_gaussian.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpp {
namespace {

constexpr int kBisectionIterations = 80;
constexpr double kSearchUpper = 1e12;

// B+(v) = Phi(sqrt(eps v)) - e^eps Phi(-sqrt(eps (v + 2))), increasing in v.
double DeltaPlus(double epsilon, double v) {
  return StandardNormalCdf(std::sqrt(epsilon * v)) -
         std::exp(epsilon) * StandardNormalCdf(-std::sqrt(epsilon * (v + 2)));
}

// B-(u) = Phi(-sqrt(eps u)) - e^eps Phi(-sqrt(eps (u + 2))), decreasing in u.
double DeltaMinus(double epsilon, double u) {
  return StandardNormalCdf(-std::sqrt(epsilon * u)) -
         std::exp(epsilon) * StandardNormalCdf(-std::sqrt(epsilon * (u + 2)));
}

}  // namespace

double StandardNormalCdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double GaussianMechanismDelta(double epsilon, double sensitivity,
                              double sigma) {
  const double a = sensitivity / (2.0 * sigma);
  const double b = epsilon * sigma / sensitivity;
  return StandardNormalCdf(a - b) -
         std::exp(epsilon) * StandardNormalCdf(-a - b);
}

double AnalyticGaussianDeltaZero(double epsilon) {
  return StandardNormalCdf(0.0) -
         std::exp(epsilon) * StandardNormalCdf(-std::sqrt(2.0 * epsilon));
}

absl::StatusOr<double> AnalyticGaussianAlpha(double epsilon, double delta) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  const double delta_zero = AnalyticGaussianDeltaZero(epsilon);
  double lo = 0.0;
  double hi = kSearchUpper;
  if (delta >= delta_zero) {
    // v* = sup{v >= 0 : B+(v) <= delta}; B+(0) = delta_zero <= delta.
    if (DeltaPlus(epsilon, hi) <= delta) {
      return absl::InternalError("upper bracket does not exceed delta");
    }
    for (int i = 0; i < kBisectionIterations; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (DeltaPlus(epsilon, mid) <= delta) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    // lo keeps B+(lo) <= delta, so sigma is never below the exact solution.
    return std::sqrt(1.0 + lo / 2.0) - std::sqrt(lo / 2.0);
  }
  // u* = inf{u >= 0 : B-(u) <= delta}; B-(0) = delta_zero > delta.
  if (DeltaMinus(epsilon, hi) > delta) {
    return absl::InternalError(absl::StrCat(
        "delta ", delta, " too small to bracket at epsilon ", epsilon));
  }
  for (int i = 0; i < kBisectionIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (DeltaMinus(epsilon, mid) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return std::sqrt(1.0 + hi / 2.0) + std::sqrt(hi / 2.0);
}

absl::StatusOr<double> AnalyticGaussianSigma(double epsilon, double delta,
                                             double sensitivity) {
  if (!(sensitivity > 0.0)) {
    return absl::InvalidArgumentError("sensitivity must be positive");
  }
  auto alpha = AnalyticGaussianAlpha(epsilon, delta);
  if (!alpha.ok()) return alpha.status();
  return *alpha * sensitivity / std::sqrt(2.0 * epsilon);
}

}  // namespace dpp

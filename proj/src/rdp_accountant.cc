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

#include "dpp/rdp_accountant.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpp {
namespace {

double LogAddExp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

absl::StatusOr<double> RdpSubsampledGaussian(double q, double sigma,
                                             double order) {
  if (!(q > 0.0 && q <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sampling rate must lie in (0, 1], got ", q));
  }
  if (!(sigma > 0.0)) {
    return absl::InvalidArgumentError("noise multiplier must be positive");
  }
  if (!(order >= kMinRdpOrder)) {
    return absl::InvalidArgumentError(
        absl::StrCat("RDP order must be >= 2, got ", order));
  }
  if (order != std::floor(order)) {
    return absl::UnimplementedError(
        absl::StrCat("only integer RDP orders are supported, got ", order));
  }
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  if (q == 1.0) return order * inv_two_var;

  const int a = static_cast<int>(order);
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  double log_sum = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= a; ++k) {
    const double term = LogBinomial(a, k) + (a - k) * log_1mq + k * log_q +
                        (static_cast<double>(k) * k - k) * inv_two_var;
    log_sum = LogAddExp(log_sum, term);
  }
  // The exact value is >= 0; clamp rounding noise at tiny q.
  return std::max(0.0, log_sum / (a - 1));
}

absl::StatusOr<RdpCurve> SubsampledGaussianCurve(double q, double sigma) {
  RdpCurve curve;
  for (int order = kMinRdpOrder; order <= kMaxRdpOrder; ++order) {
    auto rdp = RdpSubsampledGaussian(q, sigma, order);
    if (!rdp.ok()) return rdp.status();
    curve.orders.push_back(order);
    curve.eps_at_order.push_back(*rdp);
  }
  return curve;
}

absl::StatusOr<double> RdpToEpsilon(const RdpCurve& per_step, int steps,
                                    double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError("delta must lie in (0, 1)");
  }
  if (steps < 1) return absl::InvalidArgumentError("steps must be positive");
  if (per_step.orders.empty() ||
      per_step.orders.size() != per_step.eps_at_order.size()) {
    return absl::InvalidArgumentError("malformed RDP curve");
  }
  const double log_inv_delta = std::log(1.0 / delta);
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < per_step.orders.size(); ++i) {
    const double eps = steps * per_step.eps_at_order[i] +
                       log_inv_delta / (per_step.orders[i] - 1.0);
    best = std::min(best, eps);
  }
  return best;
}

absl::StatusOr<double> DpSgdEpsilon(double q, double sigma, int steps,
                                    double delta) {
  auto curve = SubsampledGaussianCurve(q, sigma);
  if (!curve.ok()) return curve.status();
  return RdpToEpsilon(*curve, steps, delta);
}

}  // namespace dpp

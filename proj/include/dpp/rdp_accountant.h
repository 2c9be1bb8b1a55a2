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

// Renyi-DP accounting for the subsampled Gaussian mechanism used by DP-SGD.
// Only integer orders are supported.

#ifndef DPP_RDP_ACCOUNTANT_H_
#define DPP_RDP_ACCOUNTANT_H_

#include <vector>

#include "absl/status/statusor.h"

namespace dpp {

inline constexpr int kMinRdpOrder = 2;
inline constexpr int kMaxRdpOrder = 64;

// RDP of one step at each order of the grid.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> eps_at_order;
};

// RDP at integer `order` of the Gaussian mechanism with noise multiplier
// `sigma`, applied to a batch sampled with rate `q`:
//   q = 1:  order / (2 sigma^2)
//   q < 1:  log(sum_k C(order,k) (1-q)^(order-k) q^k e^{(k^2-k)/(2 sigma^2)})
//             / (order - 1)
// Errors: InvalidArgument for q outside (0, 1], sigma <= 0, order < 2;
// Unimplemented for non-integer orders.
absl::StatusOr<double> RdpSubsampledGaussian(double q, double sigma,
                                             double order);

// Per-step curve over the default order grid {2, ..., 64}.
absl::StatusOr<RdpCurve> SubsampledGaussianCurve(double q, double sigma);

// Smallest epsilon over the grid for `steps` compositions at the given delta:
//   min_order  steps * rdp(order) + log(1/delta) / (order - 1).
absl::StatusOr<double> RdpToEpsilon(const RdpCurve& per_step, int steps,
                                    double delta);

// Convenience: epsilon spent by `steps` DP-SGD updates.
absl::StatusOr<double> DpSgdEpsilon(double q, double sigma, int steps,
                                    double delta);

}  // namespace dpp

#endif  // DPP_RDP_ACCOUNTANT_H_

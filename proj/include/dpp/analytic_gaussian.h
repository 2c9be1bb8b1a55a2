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

// Analytic Gaussian mechanism calibration (Balle & Wang, 2018).
//
// A Gaussian mechanism with L2 sensitivity `sens` and standard deviation
// `sigma` is (epsilon, delta)-DP exactly when
//   Phi(sens/(2 sigma) - epsilon sigma/sens)
//     - e^epsilon Phi(-sens/(2 sigma) - epsilon sigma/sens) <= delta.
// The calibration returns the scale factor alpha such that
// sigma = alpha * sens / sqrt(2 epsilon) is the smallest such sigma.

#ifndef DPP_ANALYTIC_GAUSSIAN_H_
#define DPP_ANALYTIC_GAUSSIAN_H_

#include "absl/status/statusor.h"

namespace dpp {

// Standard normal CDF, accurate in both tails.
double StandardNormalCdf(double x);

// Left-hand side of the exact (epsilon, delta) condition above.
double GaussianMechanismDelta(double epsilon, double sensitivity,
                              double sigma);

// Threshold that selects the search branch: Phi(0) - e^eps Phi(-sqrt(2 eps)).
double AnalyticGaussianDeltaZero(double epsilon);

// Errors: InvalidArgument unless epsilon > 0 and 0 < delta < 1; Internal if
// the bisection fails to bracket the solution.
absl::StatusOr<double> AnalyticGaussianAlpha(double epsilon, double delta);

// alpha * sensitivity / sqrt(2 epsilon).
absl::StatusOr<double> AnalyticGaussianSigma(double epsilon, double delta,
                                             double sensitivity);

}  // namespace dpp

#endif  // DPP_ANALYTIC_GAUSSIAN_H_

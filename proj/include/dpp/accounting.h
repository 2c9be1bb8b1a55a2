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

// Noise calibration for the five mechanisms.
//
// Every function here is pure. Calibrations that only exist for one noise
// family reject the other with FailedPrecondition ("wrong variant"): the
// radial-exponential ones need delta == 0, the Gaussian ones need delta > 0.

#ifndef DPP_ACCOUNTING_H_
#define DPP_ACCOUNTING_H_

#include <algorithm>
#include <cstdint>
#include <string>

#include "absl/status/statusor.h"
#include "dpp/core_math.h"

namespace dpp {

// Target (epsilon, delta) guarantee over `budget` answered queries.
struct PrivacySpec {
  double epsilon = 1.0;
  double delta = 0.0;
  int64_t budget = 1;

  absl::Status Validate() const;
};

struct ProblemDims {
  int64_t n_train = 1;
  double lambda = 1.0;
  int n_classes = 2;
  LossConstants loss = kMultiClassLogistic;

  absl::Status Validate() const;

  // L2 sensitivity 2K / (N lambda) of the regularized ERM minimizer.
  double MinimizerSensitivity() const;
};

struct DpSgdConfig {
  double clip = 0.1;
  int64_t batch_size = 1;
  int64_t steps = 1;
  double sample_rate = 1.0;  // batch_size / N

  static absl::StatusOr<DpSgdConfig> Create(double clip, int64_t batch_size,
                                            int64_t steps, int64_t n_train);
  absl::Status Validate() const;
};

// N lambda epsilon / (2K).
absl::StatusOr<double> ModelSensitivityBeta(const ProblemDims& dims,
                                            const PrivacySpec& spec);

// 2K alpha / (N lambda sqrt(2 epsilon)), alpha from the analytic Gaussian
// calibration.
absl::StatusOr<double> GaussianModelSigma(const ProblemDims& dims,
                                          const PrivacySpec& spec);

struct LossPerturbation {
  double beta = 0.0;  // unused by the Gaussian variant
  double sigma = 0.0;  // unused by the radial-exponential variant
  double rho = 0.0;
};

// beta = epsilon / (2K), rho = 2 L C / epsilon (the smallest admissible).
absl::StatusOr<LossPerturbation> LossPerturbationParams(
    const ProblemDims& dims, const PrivacySpec& spec);

// sigma = (K / epsilon) sqrt(8 ln(2/delta) + 4 epsilon), same rho.
absl::StatusOr<LossPerturbation> GaussianLossParams(const ProblemDims& dims,
                                                    const PrivacySpec& spec);

// N lambda epsilon / (2 K B).
absl::StatusOr<double> PredictionSensitivityBeta(const ProblemDims& dims,
                                                 const PrivacySpec& spec);

// Both candidate per-query sigmas of the Gaussian prediction-sensitivity
// method.
struct PredictionSigmaCandidates {
  double standard = 0.0;  // epsilon/B, delta/B per query
  double advanced = 0.0;  // best over the delta' grid; +inf if grid empty
  double best_delta_prime = 0.0;
  double sigma() const { return std::min(standard, advanced); }
};

inline constexpr int kDeltaPrimeGridPoints = 200;

absl::StatusOr<PredictionSigmaCandidates> GaussianPredictionSigmaCandidates(
    const ProblemDims& dims, const PrivacySpec& spec);

absl::StatusOr<double> GaussianPredictionSigma(const ProblemDims& dims,
                                               const PrivacySpec& spec);

// Inverse temperature of the noisy vote: epsilon / B for delta == 0, else
// max(epsilon / B, sqrt(2/B) (sqrt(ln(1/delta) + epsilon) - sqrt(ln(1/delta)))).
absl::StatusOr<double> SubsampleBeta(const PrivacySpec& spec);

// The advanced-composition term on its own.
double AdvancedCompositionBeta(double epsilon, double delta, int64_t budget);

inline constexpr double kDpSgdSigmaMin = 0.01;
inline constexpr double kDpSgdSigmaMax = 1e4;

// Smallest noise multiplier in [kDpSgdSigmaMin, kDpSgdSigmaMax] for which
// `cfg.steps` subsampled Gaussian updates are (epsilon, delta)-DP under the
// RDP accountant. OutOfRange if no sigma in the interval suffices.
absl::StatusOr<double> DpSgdSigmaForTarget(const PrivacySpec& spec,
                                           const DpSgdConfig& cfg);

// Audit record for one calibration.
struct CalibrationReport {
  std::string mechanism;
  PrivacySpec privacy;
  std::string noise;  // "radial_exponential", "gaussian" or "exponential_mechanism"
  std::string scale_name;  // "beta" or "sigma"
  double scale = 0.0;
  double rho = 0.0;

  std::string ToJson() const;
};

}  // namespace dpp

#endif  // DPP_ACCOUNTING_H_

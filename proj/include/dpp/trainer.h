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

// Deterministic minimization of the regularized multi-class logistic
// objective with L-BFGS and a strong-Wolfe line search.

#ifndef DPP_TRAINER_H_
#define DPP_TRAINER_H_

#include <functional>
#include <optional>
#include <string>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpp/dataset.h"

namespace dpp {

// Random linear term and extra ridge of the objective-perturbed variant.
struct Perturbation {
  ParamMatrix noise;
  double rho = 0.0;
};

struct TrainConfig {
  double lambda = 1e-2;
  int max_iterations = 500;
  double grad_tolerance = 1e-8;
  int history = 10;
  // When set, the trainer minimizes
  //   mean loss + (lambda/2) ||theta||^2 + (1/N) tr(B^T theta)
  //     + (rho/(2N)) ||theta||^2,
  // i.e. the perturbed objective with its lambda argument set to N * lambda,
  // so a zero perturbation reproduces the plain objective exactly.
  std::optional<Perturbation> perturbation;
};

struct TrainResult {
  ParamMatrix theta;
  double objective = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
};

// Starts at theta = 0 and stops once ||grad J||_F <= grad_tolerance.
// Errors: InvalidArgument for bad config or perturbation shape; Aborted when
// max_iterations is reached, with the last gradient norm in the message.
absl::StatusOr<TrainResult> MinimizeErmDetailed(const LabeledDataset& data,
                                                const TrainConfig& cfg);

absl::StatusOr<ParamMatrix> MinimizeErm(const LabeledDataset& data,
                                        const TrainConfig& cfg);

// theta^T x.
absl::StatusOr<Eigen::VectorXd> PredictLogits(const ParamMatrix& theta,
                                              const Eigen::VectorXd& x);

// Argmax of theta^T x, ties to the lowest index.
int PredictClass(const ParamMatrix& theta, const Eigen::VectorXd& x);

// Fraction of examples whose argmax prediction equals the label.
double Accuracy(const ParamMatrix& theta, const LabeledDataset& data);

// Generic smooth minimizer used by the trainer. `fn` returns the value and
// writes the gradient.
using SmoothObjective =
    std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct LbfgsOptions {
  int max_iterations = 500;
  double grad_tolerance = 1e-8;
  int history = 10;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

LbfgsResult MinimizeLbfgs(const SmoothObjective& fn, Eigen::VectorXd x0,
                          const LbfgsOptions& options);

// Parameter file: a text header "DPPARAM 1 <D> <C> <endianness>" followed by
// D*C values in row-major order, printed with round-trip precision.
absl::Status WriteParamFile(const std::string& path, const ParamMatrix& theta);
absl::StatusOr<ParamMatrix> ReadParamFile(const std::string& path);

}  // namespace dpp

#endif  // DPP_TRAINER_H_

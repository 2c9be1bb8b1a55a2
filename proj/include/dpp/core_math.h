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

// Multi-class logistic loss, its derivatives and the regularized objectives
// minimized by the trainer.
//
// The loss is written in its minimization form,
//   loss(a, y) = -sum_i y_i log softmax(a)_i = logsumexp(a) - y.a,
// whose gradient p - y has L2 norm at most sqrt(2) and whose Hessian
// diag(p) - p p^T has eigenvalues at most 1/2.

#ifndef DPP_CORE_MATH_H_
#define DPP_CORE_MATH_H_

#include <cmath>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpp/dataset.h"

namespace dpp {

// Bounds the privacy calibrations depend on.
struct LossConstants {
  double lipschitz_K;
  double hessian_bound_L;
};

inline const LossConstants kMultiClassLogistic = {std::sqrt(2.0), 0.5};

absl::StatusOr<Eigen::VectorXd> Softmax(const Eigen::VectorXd& logits);

absl::StatusOr<double> LogisticLoss(const Eigen::VectorXd& logits,
                                    const Eigen::VectorXd& one_hot);

// Gradient with respect to the logits: softmax(a) - y.
absl::StatusOr<Eigen::VectorXd> LogisticGradient(
    const Eigen::VectorXd& logits, const Eigen::VectorXd& one_hot);

// Hessian with respect to the logits: diag(p) - p p^T. Independent of y.
absl::StatusOr<Eigen::MatrixXd> LogisticHessian(const Eigen::VectorXd& logits);

struct ObjectiveValue {
  double value = 0.0;
  ParamMatrix gradient;
};

// J(theta) = (1/N) sum_n loss(theta^T x_n, y_n) + lambda * 0.5 ||theta||_F^2.
absl::StatusOr<ObjectiveValue> ErmObjective(const ParamMatrix& theta,
                                            const LabeledDataset& data,
                                            double lambda);

// Objective-perturbed variant
//   (1/N) sum_n loss + (lambda/N) 0.5 ||theta||^2 + (1/N) tr(B^T theta)
//     + (rho/(2N)) ||theta||^2.
// All regularization terms carry the 1/N factor.
absl::StatusOr<ObjectiveValue> PerturbedObjective(const ParamMatrix& theta,
                                                  const LabeledDataset& data,
                                                  double lambda,
                                                  const ParamMatrix& noise,
                                                  double rho);

// Mean loss and its gradient without any regularizer. Shapes are not
// validated; callers go through the two objectives above.
ObjectiveValue MeanLogisticLoss(const ParamMatrix& theta,
                                const LabeledDataset& data);

}  // namespace dpp

#endif  // DPP_CORE_MATH_H_

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

#include "dpp/core_math.h"

#include <algorithm>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpp {
namespace {

absl::Status CheckLogits(const Eigen::VectorXd& logits) {
  if (logits.size() == 0) {
    return absl::InvalidArgumentError("logit vector is empty");
  }
  if (!logits.allFinite()) {
    return absl::InvalidArgumentError("logit vector has non-finite entries");
  }
  return absl::OkStatus();
}

absl::Status CheckOneHot(const Eigen::VectorXd& logits,
                         const Eigen::VectorXd& one_hot) {
  if (one_hot.size() != logits.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("label has ", one_hot.size(), " classes, logits have ",
                     logits.size()));
  }
  int ones = 0;
  for (Eigen::Index i = 0; i < one_hot.size(); ++i) {
    if (one_hot(i) == 1.0) {
      ++ones;
    } else if (one_hot(i) != 0.0) {
      return absl::InvalidArgumentError("label is not one-hot");
    }
  }
  if (ones != 1) return absl::InvalidArgumentError("label is not one-hot");
  return absl::OkStatus();
}

Eigen::VectorXd SoftmaxUnchecked(const Eigen::VectorXd& logits) {
  Eigen::VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

double LogSumExp(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  return m + std::log((logits.array() - m).exp().sum());
}

absl::Status CheckObjectiveInputs(const ParamMatrix& theta,
                                  const LabeledDataset& data, double lambda) {
  if (theta.rows() != data.dim() || theta.cols() != data.num_classes()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "theta is ", theta.rows(), "x", theta.cols(), ", data needs ",
        data.dim(), "x", data.num_classes()));
  }
  if (!(lambda >= 0.0)) {
    return absl::InvalidArgumentError("lambda must be nonnegative");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Eigen::VectorXd> Softmax(const Eigen::VectorXd& logits) {
  if (auto s = CheckLogits(logits); !s.ok()) return s;
  return SoftmaxUnchecked(logits);
}

absl::StatusOr<double> LogisticLoss(const Eigen::VectorXd& logits,
                                    const Eigen::VectorXd& one_hot) {
  if (auto s = CheckLogits(logits); !s.ok()) return s;
  if (auto s = CheckOneHot(logits, one_hot); !s.ok()) return s;
  // Clamped so the saturated case returns an exact zero rather than -0 or a
  // rounding-level negative value.
  return std::max(0.0, LogSumExp(logits) - one_hot.dot(logits));
}

absl::StatusOr<Eigen::VectorXd> LogisticGradient(
    const Eigen::VectorXd& logits, const Eigen::VectorXd& one_hot) {
  if (auto s = CheckLogits(logits); !s.ok()) return s;
  if (auto s = CheckOneHot(logits, one_hot); !s.ok()) return s;
  return SoftmaxUnchecked(logits) - one_hot;
}

absl::StatusOr<Eigen::MatrixXd> LogisticHessian(
    const Eigen::VectorXd& logits) {
  if (auto s = CheckLogits(logits); !s.ok()) return s;
  const Eigen::VectorXd p = SoftmaxUnchecked(logits);
  Eigen::MatrixXd h = -p * p.transpose();
  h.diagonal() += p;
  return h;
}

ObjectiveValue MeanLogisticLoss(const ParamMatrix& theta,
                                const LabeledDataset& data) {
  const int n_examples = data.size();
  const Eigen::MatrixXd logits = data.inputs() * theta;  // N x C
  Eigen::MatrixXd residual(logits.rows(), logits.cols());
  double total = 0.0;
  for (int n = 0; n < n_examples; ++n) {
    const Eigen::VectorXd a = logits.row(n).transpose();
    const double m = a.maxCoeff();
    const Eigen::ArrayXd e = (a.array() - m).exp();
    const double z = e.sum();
    total += m + std::log(z) - a(data.label(n));
    residual.row(n) = (e / z).matrix().transpose();
    residual(n, data.label(n)) -= 1.0;
  }
  ObjectiveValue out;
  out.value = total / n_examples;
  out.gradient = data.inputs().transpose() * residual / n_examples;
  return out;
}

absl::StatusOr<ObjectiveValue> ErmObjective(const ParamMatrix& theta,
                                            const LabeledDataset& data,
                                            double lambda) {
  if (auto s = CheckObjectiveInputs(theta, data, lambda); !s.ok()) return s;
  ObjectiveValue out = MeanLogisticLoss(theta, data);
  out.value += 0.5 * lambda * theta.squaredNorm();
  out.gradient += lambda * theta;
  return out;
}

absl::StatusOr<ObjectiveValue> PerturbedObjective(const ParamMatrix& theta,
                                                  const LabeledDataset& data,
                                                  double lambda,
                                                  const ParamMatrix& noise,
                                                  double rho) {
  if (auto s = CheckObjectiveInputs(theta, data, lambda); !s.ok()) return s;
  if (noise.rows() != theta.rows() || noise.cols() != theta.cols()) {
    return absl::InvalidArgumentError("noise matrix shape differs from theta");
  }
  if (!(rho >= 0.0)) {
    return absl::InvalidArgumentError("rho must be nonnegative");
  }
  const double inv_n = 1.0 / data.size();
  const double ridge = (lambda + rho) * inv_n;
  ObjectiveValue out = MeanLogisticLoss(theta, data);
  // tr(B^T theta) is the Frobenius inner product.
  out.value += 0.5 * ridge * theta.squaredNorm() +
               inv_n * (noise.array() * theta.array()).sum();
  out.gradient += ridge * theta + inv_n * noise;
  return out;
}

}  // namespace dpp

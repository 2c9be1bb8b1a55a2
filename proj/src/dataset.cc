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

#include "dpp/dataset.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpp {

absl::StatusOr<LabeledDataset> LabeledDataset::CreateUnchecked(
    Eigen::MatrixXd inputs, std::vector<int> labels, int num_classes) {
  if (labels.empty()) {
    return absl::InvalidArgumentError("dataset is empty");
  }
  if (static_cast<size_t>(inputs.rows()) != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("input rows (", inputs.rows(), ") != label count (",
                     labels.size(), ")"));
  }
  if (num_classes < 1) {
    return absl::InvalidArgumentError("num_classes must be positive");
  }
  if (!inputs.allFinite()) {
    return absl::InvalidArgumentError("inputs contain non-finite values");
  }
  for (size_t n = 0; n < labels.size(); ++n) {
    if (labels[n] < 0 || labels[n] >= num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", labels[n], " of example ", n,
                       " outside [0, ", num_classes, ")"));
    }
  }
  return LabeledDataset(std::move(inputs), std::move(labels), num_classes);
}

absl::StatusOr<LabeledDataset> LabeledDataset::Create(Eigen::MatrixXd inputs,
                                                      std::vector<int> labels,
                                                      int num_classes) {
  auto data =
      CreateUnchecked(std::move(inputs), std::move(labels), num_classes);
  if (!data.ok()) return data.status();
  for (int n = 0; n < data->size(); ++n) {
    const double norm = data->inputs_.row(n).norm();
    if (norm > 1.0 + kUnitBallSlack) {
      return absl::InvalidArgumentError(absl::StrCat(
          "example ", n, " has norm ", norm, " outside the unit ball"));
    }
  }
  return data;
}

Eigen::VectorXd LabeledDataset::OneHot(int n) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(num_classes_);
  y(labels_[n]) = 1.0;
  return y;
}

LabeledDataset LabeledDataset::Subset(std::span<const int> indices) const {
  Eigen::MatrixXd inputs(indices.size(), inputs_.cols());
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (size_t i = 0; i < indices.size(); ++i) {
    inputs.row(i) = inputs_.row(indices[i]);
    labels.push_back(labels_[indices[i]]);
  }
  return LabeledDataset(std::move(inputs), std::move(labels), num_classes_);
}

absl::StatusOr<LabeledDataset> LabeledDataset::WithReplaced(
    int n, const Eigen::VectorXd& x, int y) const {
  if (n < 0 || n >= size()) {
    return absl::OutOfRangeError(absl::StrCat("no example ", n));
  }
  if (x.size() != dim()) {
    return absl::InvalidArgumentError("replacement has wrong dimension");
  }
  Eigen::MatrixXd inputs = inputs_;
  std::vector<int> labels = labels_;
  inputs.row(n) = x.transpose();
  labels[n] = y;
  return Create(std::move(inputs), std::move(labels), num_classes_);
}

double LabeledDataset::MaxRowNorm() const {
  return inputs_.rowwise().norm().maxCoeff();
}

}  // namespace dpp

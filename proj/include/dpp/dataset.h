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

#ifndef DPP_DATASET_H_
#define DPP_DATASET_H_

#include <span>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace dpp {

// Model parameters, D x C: one column of logit weights per class.
using ParamMatrix = Eigen::MatrixXd;

// Rows further than this from the unit ball are rejected.
inline constexpr double kUnitBallSlack = 1e-9;

// A labeled training or test set. Inputs are stored row-major by example
// (N x D) and labels as class indices; the one-hot encoding over
// `num_classes()` classes is implied by construction.
class LabeledDataset {
 public:
  // Validates that every row lies in the unit L2 ball (up to kUnitBallSlack),
  // that labels are in [0, num_classes) and that the set is nonempty.
  static absl::StatusOr<LabeledDataset> Create(Eigen::MatrixXd inputs,
                                               std::vector<int> labels,
                                               int num_classes);

  // Same as Create but allows rows outside the unit ball. Used for raw test
  // data before projection; training code never accepts these.
  static absl::StatusOr<LabeledDataset> CreateUnchecked(
      Eigen::MatrixXd inputs, std::vector<int> labels, int num_classes);

  int size() const { return static_cast<int>(labels_.size()); }
  int dim() const { return static_cast<int>(inputs_.cols()); }
  int num_classes() const { return num_classes_; }

  const Eigen::MatrixXd& inputs() const { return inputs_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(int n) const { return labels_[n]; }
  Eigen::VectorXd OneHot(int n) const;

  // Rows selected by `indices`, in that order.
  LabeledDataset Subset(std::span<const int> indices) const;

  // Copy with example `n` replaced by (x, y). Used to build neighboring
  // datasets.
  absl::StatusOr<LabeledDataset> WithReplaced(int n, const Eigen::VectorXd& x,
                                              int y) const;

  double MaxRowNorm() const;

 private:
  LabeledDataset(Eigen::MatrixXd inputs, std::vector<int> labels,
                 int num_classes)
      : inputs_(std::move(inputs)),
        labels_(std::move(labels)),
        num_classes_(num_classes) {}

  Eigen::MatrixXd inputs_;
  std::vector<int> labels_;
  int num_classes_ = 0;
};

}  // namespace dpp

#endif  // DPP_DATASET_H_

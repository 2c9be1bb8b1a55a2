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

// Dataset ingestion and preprocessing. Every transform is fit on the
// training split and then applied unchanged to the test split.

#ifndef DPP_DATA_H_
#define DPP_DATA_H_

#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpp/dataset.h"
#include "dpp/noise.h"

namespace dpp {

struct RawDataset {
  Eigen::MatrixXd features;  // N x D_raw
  std::vector<int> labels;
  int num_classes = 0;

  absl::Status Validate() const;
};

// Reads an IDX image file (unsigned bytes, rank >= 2) and the matching IDX
// label file (rank 1). Either may be gzip-compressed. Pixels map to [0, 1].
// Errors carry the byte offset of the first malformed field.
absl::StatusOr<RawDataset> LoadIdx(const std::string& images_path,
                                   const std::string& labels_path);

// CSV with header f0,...,f{D-1},label.
absl::StatusOr<RawDataset> LoadCsv(const std::string& path);

// Labeled view of raw data without any norm check (for test sets before
// projection, and as input to the transforms below).
absl::StatusOr<LabeledDataset> ToLabeled(const RawDataset& raw);

struct TrainTestSplit {
  LabeledDataset train;
  LabeledDataset test;
};

// Seeded shuffle, then the first round(N * test_fraction) examples become
// the test set.
absl::StatusOr<TrainTestSplit> SplitTrainTest(const LabeledDataset& data,
                                              double test_fraction,
                                              RngStream& rng);

// One global scale factor 1 / max_n ||x_n|| fit on the training split.
struct UnitBallScaler {
  double factor = 1.0;

  static absl::StatusOr<UnitBallScaler> Fit(const LabeledDataset& train);

  // Multiplies every row by `factor`; rows still outside the ball (test rows
  // only) are projected onto it.
  absl::StatusOr<LabeledDataset> Apply(const LabeledDataset& data) const;
};

// Fits the scaler on `train` and applies it.
absl::StatusOr<LabeledDataset> NormalizeUnitBall(const LabeledDataset& train);

struct PcaModel {
  Eigen::VectorXd mean;         // D_raw
  Eigen::MatrixXd projection;   // D_raw x D, orthonormal columns
  UnitBallScaler rescale;       // fit on the projected training data

  // Centers, projects, rescales and projects onto the unit ball.
  absl::StatusOr<LabeledDataset> Transform(const LabeledDataset& data) const;
};

struct PcaResult {
  PcaModel model;
  LabeledDataset train;
};

// Top `target_dim` principal directions of the training covariance. Each
// direction is signed so its largest-magnitude component is positive.
absl::StatusOr<PcaResult> PcaFitTransform(const LabeledDataset& train,
                                          int target_dim);

// Keeps examples with label < keep_classes; errors if a kept class has no
// examples.
absl::StatusOr<LabeledDataset> FilterClasses(const LabeledDataset& data,
                                             int keep_classes);

// Uniform subset of size target_n without replacement.
absl::StatusOr<LabeledDataset> SubsampleTrain(const LabeledDataset& data,
                                              int target_n, RngStream& rng);

// Gaussian clusters (unit per-coordinate spread) around `num_classes` random
// anchor directions scaled by `separation`, globally rescaled to the unit
// ball. Labels are grouped by class.
absl::StatusOr<LabeledDataset> SynthBlobs(int n_per_class, int num_classes,
                                          int dim, double separation,
                                          RngStream& rng);

}  // namespace dpp

#endif  // DPP_DATA_H_

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

// Sweep configuration: a flat JSON object. Example:
//
//   {
//     "source": "synth",
//     "synth_n_per_class": 500, "synth_classes": 4, "synth_dim": 10,
//     "synth_separation": 2.0,
//     "mechanisms": ["non_private", "loss_perturbation",
//                    "subsample_aggregate"],
//     "epsilon": [0.1, 1.0], "delta": [0.0], "budget": [10, 100],
//     "lambda": [0.01], "ensemble": [64],
//     "trials": 20, "base_seed": 1
//   }
//
// Grid axes "n_train", "dim" and "classes" default to [0], meaning "use the
// dataset as loaded"; a nonzero dim applies PCA, a nonzero classes keeps the
// first classes, a nonzero n_train subsamples the training split.

#ifndef DPP_SWEEP_CONFIG_H_
#define DPP_SWEEP_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpp/mechanisms.h"

namespace dpp {

// Name of the non-private baseline pseudo-mechanism in sweeps.
inline constexpr char kNonPrivateName[] = "non_private";

enum class DataSourceKind { kSynth, kIdx, kCsv };

// How prediction-side mechanisms are scored.
enum class PredictionEval {
  // B test points drawn per trial (without replacement when B does not exceed
  // the test set); exactly B queries are issued.
  kSampled,
  // The full test set, answered by consecutive fresh predictors of budget B.
  kFullTest,
};

struct SweepConfig {
  DataSourceKind source = DataSourceKind::kSynth;
  std::string path;         // IDX images or CSV file
  std::string labels_path;  // IDX labels
  // Optional held-out test files in the same format; when absent the
  // loaded data is split with test_fraction.
  std::string test_path;
  std::string test_labels_path;
  int synth_n_per_class = 500;
  int synth_classes = 4;
  int synth_dim = 10;
  double synth_separation = 2.0;
  double test_fraction = 0.2;

  std::vector<std::string> mechanisms;
  std::vector<double> epsilon = {1.0};
  std::vector<double> delta = {0.0};
  std::vector<int64_t> budget = {1};
  std::vector<int> n_train = {0};
  std::vector<int> dim = {0};
  std::vector<int> classes = {0};
  std::vector<double> lambda = {1e-2};
  std::vector<int> ensemble = {256};

  DpSgdOptions dpsgd;
  int max_iterations = 500;
  double grad_tolerance = 1e-8;

  // Optional non-private selection on a validation fold of the training
  // split; its privacy cost is not accounted. Empty grid disables it.
  std::vector<double> lambda_selection_grid;
  std::vector<double> clip_selection_grid;
  double validation_fraction = 0.2;

  PredictionEval prediction_eval = PredictionEval::kSampled;
  int trials = 100;
  uint64_t base_seed = 0;
  int threads = 1;
  // When false the wall_time_s column is written as 0 so that output files
  // are byte-identical across runs.
  bool record_timing = true;

  absl::Status Validate() const;
};

absl::StatusOr<SweepConfig> ParseSweepConfig(const std::string& json_text);
absl::StatusOr<SweepConfig> LoadSweepConfig(const std::string& path);

}  // namespace dpp

#endif  // DPP_SWEEP_CONFIG_H_

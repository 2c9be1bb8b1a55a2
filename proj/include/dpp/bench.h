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

// Experiment harness: repeated trials over parameter grids, summaries and
// CSV emission.
//
// Trial t of every configuration draws from RngStream(base_seed, t), so
// configurations that differ only in epsilon, delta or B see the same
// randomness (common random numbers), and results do not depend on the
// number of worker threads.

#ifndef DPP_BENCH_H_
#define DPP_BENCH_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpp/dataset.h"
#include "dpp/sweep_config.h"

namespace dpp {

struct TrialRecord {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  int64_t budget = 0;
  int n_train = 0;
  int dim = 0;
  int classes = 0;
  double lambda = 0.0;
  int ensemble = 0;  // T for subsample-and-aggregate, 0 otherwise
  int trial = 0;
  uint64_t seed = 0;
  double accuracy = 0.0;  // NaN for a failed trial
  double wall_time_s = 0.0;
  std::string error;  // empty unless the trial failed; not written to CSV

  bool failed() const { return !error.empty(); }
};

struct SummaryRecord {
  std::string mechanism;
  double epsilon = 0.0;
  double delta = 0.0;
  int64_t budget = 0;
  int n_train = 0;
  int dim = 0;
  int classes = 0;
  double lambda = 0.0;
  int ensemble = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // n - 1 denominator; 0 for a single trial
  int n_trials = 0;           // successful trials
};

// One fixed train/test split after the grid's preprocessing.
struct PreparedData {
  int n_train_axis = 0;  // grid values, 0 = as loaded
  int dim_axis = 0;
  int classes_axis = 0;
  LabeledDataset train;
  LabeledDataset test;
};

// Loads the configured source, splits it once and applies every
// (n_train, dim, classes) preprocessing combination.
absl::StatusOr<std::vector<PreparedData>> PrepareSweepData(
    const SweepConfig& cfg);

// Non-private lambda selection on a validation fold of `train`; ties go to
// the smaller lambda.
absl::StatusOr<double> SelectLambda(const LabeledDataset& train,
                                    const std::vector<double>& grid,
                                    double validation_fraction,
                                    const SweepConfig& cfg);

// Runs every grid point and trial. Mechanism errors become failed rows;
// only configuration and data errors abort the sweep. Records come back in
// canonical order: data configuration, mechanism, lambda, epsilon, delta,
// budget, ensemble, then trial.
absl::StatusOr<std::vector<TrialRecord>> RunSweep(const SweepConfig& cfg);

// Groups by every column except trial, seed and time. Failed trials are left
// out; a group without a successful trial is omitted and reported in
// `warnings` if non-null.
std::vector<SummaryRecord> Summarize(const std::vector<TrialRecord>& records,
                                     std::vector<std::string>* warnings);

inline constexpr char kTrialCsvHeader[] =
    "mechanism,epsilon,delta,budget,n_train,dim,classes,lambda,ensemble,"
    "trial,seed,accuracy,wall_time_s";
inline constexpr char kSummaryCsvHeader[] =
    "mechanism,epsilon,delta,budget,n_train,dim,classes,lambda,ensemble,"
    "mean_accuracy,std_accuracy,n_trials";

// Locale-independent shortest round-trip formatting; NaN is written "nan".
std::string FormatDouble(double v);

void WriteTrialCsv(const std::vector<TrialRecord>& records, std::ostream& out);
void WriteSummaryCsv(const std::vector<SummaryRecord>& rows,
                     std::ostream& out);
absl::Status EmitCsv(const std::vector<TrialRecord>& records,
                     const std::string& path);
absl::Status EmitSummaryCsv(const std::vector<SummaryRecord>& rows,
                            const std::string& path);

absl::StatusOr<std::vector<TrialRecord>> ParseTrialCsv(
    const std::string& text);

}  // namespace dpp

#endif  // DPP_BENCH_H_

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

// The five private prediction pipelines.
//
// Training-side mechanisms (model sensitivity, loss perturbation, DP-SGD)
// release a private model and answer any number of queries. Prediction-side
// mechanisms (prediction sensitivity, subsample-and-aggregate) keep
// non-private state and charge one unit of the inference budget per query;
// query B + 1 is refused with ResourceExhausted.

#ifndef DPP_MECHANISMS_H_
#define DPP_MECHANISMS_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dpp/accounting.h"
#include "dpp/budget.h"
#include "dpp/dataset.h"
#include "dpp/noise.h"
#include "dpp/trainer.h"

namespace dpp {

enum class MechanismKind {
  kModelSensitivity,
  kLossPerturbation,
  kDpSgd,
  kPredictionSensitivity,
  kSubsampleAggregate,
};

inline constexpr MechanismKind kAllMechanisms[] = {
    MechanismKind::kModelSensitivity, MechanismKind::kLossPerturbation,
    MechanismKind::kDpSgd, MechanismKind::kPredictionSensitivity,
    MechanismKind::kSubsampleAggregate};

std::string_view MechanismName(MechanismKind kind);
absl::StatusOr<MechanismKind> ParseMechanism(std::string_view name);
bool IsPredictionSide(MechanismKind kind);

struct DpSgdOptions {
  double clip = 0.1;
  int batch_size = 64;
  int steps = 500;
  double learning_rate = 1.0;
};

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kModelSensitivity;
  PrivacySpec privacy;
  double lambda = 1e-2;
  int ensemble_size = 256;  // T, subsample-and-aggregate only
  DpSgdOptions dpsgd;
  int max_iterations = 500;
  double grad_tolerance = 1e-8;
  uint64_t seed = 0;
  uint64_t stream_id = 0;
  // Replaces every noise draw by zero (and rho by 0). Destroys the privacy
  // guarantee; exists only for reduction tests.
  bool unsafe_disable_noise = false;

  absl::Status Validate() const;
  TrainConfig MakeTrainConfig() const;
};

enum class NoiseFamily { kNone, kRadialExponential, kGaussian };
std::string_view NoiseFamilyName(NoiseFamily family);

// Everything a predictor holds. For prediction-side kinds `models` are the
// NON-private parameters: treat the state as secret.
struct PredictorState {
  MechanismKind kind = MechanismKind::kModelSensitivity;
  PrivacySpec privacy;
  int64_t n_train = 0;
  double lambda = 0.0;
  // Per-query logit noise for prediction sensitivity.
  NoiseFamily query_noise = NoiseFamily::kNone;
  double query_noise_scale = 0.0;  // beta or sigma
  // Inverse temperature of the vote for subsample-and-aggregate.
  double vote_beta = 0.0;
  // One model, or T ensemble members.
  std::vector<ParamMatrix> models;
  BudgetState budget = BudgetState::Unlimited();
  RngStream rng{0, 0};
  bool unsafe_disable_noise = false;
};

class PrivatePredictor {
 public:
  explicit PrivatePredictor(PredictorState state);

  PrivatePredictor(PrivatePredictor&&) = default;
  PrivatePredictor& operator=(PrivatePredictor&&) = default;

  MechanismKind kind() const { return state_.kind; }
  const PrivacySpec& privacy() const { return state_.privacy; }
  const BudgetState& budget() const { return state_.budget; }
  const PredictorState& state() const { return state_; }

  // The released model of a training-side mechanism; FailedPrecondition for
  // prediction-side kinds.
  absl::StatusOr<ParamMatrix> ReleasedModel() const;

  // Logits: theta^T x for training-side kinds, theta^T x + fresh noise for
  // prediction sensitivity (one budget unit). Subsample-and-aggregate only
  // answers labels and returns FailedPrecondition here.
  absl::StatusOr<Eigen::VectorXd> PredictLogits(const Eigen::VectorXd& x);

  // Label: argmax of PredictLogits, or a noisy vote for
  // subsample-and-aggregate. One budget unit for prediction-side kinds.
  absl::StatusOr<int> PredictLabel(const Eigen::VectorXd& x);

 private:
  absl::Status CheckInput(const Eigen::VectorXd& x) const;

  PredictorState state_;
  std::unique_ptr<std::mutex> rng_mu_ = std::make_unique<std::mutex>();
};

// Builders. Each draws all its randomness from RngStream(spec.seed,
// spec.stream_id); the same stream then serves per-query noise.
absl::StatusOr<PrivatePredictor> TrainModelSensitivity(
    const LabeledDataset& data, const MechanismSpec& spec);
absl::StatusOr<PrivatePredictor> TrainLossPerturbation(
    const LabeledDataset& data, const MechanismSpec& spec);
absl::StatusOr<PrivatePredictor> TrainDpSgd(const LabeledDataset& data,
                                            const MechanismSpec& spec);
absl::StatusOr<PrivatePredictor> BuildPredictionSensitivity(
    const LabeledDataset& data, const MechanismSpec& spec);
absl::StatusOr<PrivatePredictor> BuildSubsampleEnsemble(
    const LabeledDataset& data, const MechanismSpec& spec);

// Dispatches on spec.kind.
absl::StatusOr<PrivatePredictor> BuildPredictor(const LabeledDataset& data,
                                                const MechanismSpec& spec);

// Variants of the two mechanisms that only perturb the non-private
// minimizer, for callers that already trained it (`n_train` is its N).
absl::StatusOr<PrivatePredictor> ModelSensitivityFromMinimizer(
    const ParamMatrix& minimizer, int64_t n_train, int n_classes,
    const MechanismSpec& spec);
absl::StatusOr<PrivatePredictor> PredictionSensitivityFromMinimizer(
    const ParamMatrix& minimizer, int64_t n_train, int n_classes,
    const MechanismSpec& spec);
// Same for a trained ensemble.
absl::StatusOr<PrivatePredictor> SubsampleFromEnsemble(
    std::vector<ParamMatrix> ensemble, int64_t n_train,
    const MechanismSpec& spec);

// ---- DP-SGD building blocks ----

// Fixed-size batch drawn uniformly without replacement.
std::vector<int> SampleBatch(int n, int batch_size, RngStream& rng);

// g / max(1, ||g||_F / clip).
ParamMatrix ClipGradient(const ParamMatrix& gradient, double clip);

// Sum over the batch of clipped per-example loss gradients x_n (p_n - y_n)^T
// plus N(0, (noise_multiplier * clip)^2) per coordinate; noise is skipped
// when noise_multiplier == 0. This is the bracketed sum before division by
// the batch size.
ParamMatrix NoisyClippedGradientSum(const ParamMatrix& theta,
                                    const LabeledDataset& data,
                                    std::span<const int> batch, double clip,
                                    double noise_multiplier, RngStream& rng);

// ---- Subsample-and-aggregate building blocks ----

// Seeded shuffle split into T disjoint parts of floor(N / T) indices; the
// remaining N mod T examples are dropped. InvalidArgument if T > N.
absl::StatusOr<std::vector<std::vector<int>>> PartitionIndices(int n, int t,
                                                               RngStream& rng);

// Stream used for the partition shuffle of an ensemble built from `spec`,
// kept apart from the query-noise stream RngStream(seed, stream_id).
RngStream EnsemblePartitionStream(const MechanismSpec& spec);

// Trains one model per part with the spec's lambda.
absl::StatusOr<std::vector<ParamMatrix>> TrainEnsemble(
    const LabeledDataset& data, const MechanismSpec& spec, RngStream& rng);

// counts[c] = number of models whose argmax (lowest index on ties) is c.
std::vector<int> CountVotes(std::span<const ParamMatrix> models,
                            const Eigen::VectorXd& x);

// P(c) proportional to exp(beta * counts[c]).
std::vector<double> VoteProbabilities(std::span<const int> counts,
                                      double beta);

// Inverse-CDF draw from VoteProbabilities with one uniform.
int SampleVote(std::span<const int> counts, double beta, RngStream& rng);

// Calibrated scale of a spec for a given N and C, for audit reports.
absl::StatusOr<CalibrationReport> Calibrate(const MechanismSpec& spec,
                                            int64_t n_train, int n_classes);

}  // namespace dpp

#endif  // DPP_MECHANISMS_H_

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

#include "dpp/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dpp {
namespace {

ProblemDims MakeDims(int64_t n_train, int n_classes, double lambda) {
  ProblemDims dims;
  dims.n_train = n_train;
  dims.lambda = lambda;
  dims.n_classes = n_classes;
  return dims;
}

PredictorState BaseState(const MechanismSpec& spec, int64_t n_train) {
  PredictorState state;
  state.kind = spec.kind;
  state.privacy = spec.privacy;
  state.n_train = n_train;
  state.lambda = spec.lambda;
  state.rng = RngStream(spec.seed, spec.stream_id);
  state.unsafe_disable_noise = spec.unsafe_disable_noise;
  return state;
}

absl::StatusOr<BudgetState> PredictionBudget(const MechanismSpec& spec) {
  return BudgetState::Limited(spec.privacy.budget);
}

absl::Status CheckKind(const MechanismSpec& spec, MechanismKind expected) {
  if (spec.kind != expected) {
    return absl::InvalidArgumentError(
        absl::StrCat("spec is for ", std::string(MechanismName(spec.kind)),
                     ", not ", std::string(MechanismName(expected))));
  }
  return spec.Validate();
}

}  // namespace

std::string_view MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kModelSensitivity:
      return "model_sensitivity";
    case MechanismKind::kLossPerturbation:
      return "loss_perturbation";
    case MechanismKind::kDpSgd:
      return "dpsgd";
    case MechanismKind::kPredictionSensitivity:
      return "prediction_sensitivity";
    case MechanismKind::kSubsampleAggregate:
      return "subsample_aggregate";
  }
  return "unknown";
}

absl::StatusOr<MechanismKind> ParseMechanism(std::string_view name) {
  for (MechanismKind kind : kAllMechanisms) {
    if (MechanismName(kind) == name) return kind;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mechanism '", std::string(name), "'"));
}

bool IsPredictionSide(MechanismKind kind) {
  return kind == MechanismKind::kPredictionSensitivity ||
         kind == MechanismKind::kSubsampleAggregate;
}

std::string_view NoiseFamilyName(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kNone:
      return "none";
    case NoiseFamily::kRadialExponential:
      return "radial_exponential";
    case NoiseFamily::kGaussian:
      return "gaussian";
  }
  return "unknown";
}

absl::Status MechanismSpec::Validate() const {
  if (auto s = privacy.Validate(); !s.ok()) return s;
  if (!(lambda > 0.0)) {
    return absl::InvalidArgumentError("lambda must be positive");
  }
  if (kind == MechanismKind::kDpSgd) {
    if (privacy.delta == 0.0) {
      return absl::FailedPreconditionError(
          "DP-SGD does not support delta == 0");
    }
    if (!(dpsgd.clip > 0.0) || dpsgd.batch_size < 1 || dpsgd.steps < 1 ||
        !(dpsgd.learning_rate > 0.0)) {
      return absl::InvalidArgumentError(
          "DP-SGD clip, batch size, steps and learning rate must be positive");
    }
  }
  if (kind == MechanismKind::kSubsampleAggregate && ensemble_size < 1) {
    return absl::InvalidArgumentError("ensemble size must be positive");
  }
  return absl::OkStatus();
}

TrainConfig MechanismSpec::MakeTrainConfig() const {
  TrainConfig cfg;
  cfg.lambda = lambda;
  cfg.max_iterations = max_iterations;
  cfg.grad_tolerance = grad_tolerance;
  return cfg;
}

PrivatePredictor::PrivatePredictor(PredictorState state)
    : state_(std::move(state)) {}

absl::StatusOr<ParamMatrix> PrivatePredictor::ReleasedModel() const {
  if (IsPredictionSide(state_.kind)) {
    return absl::FailedPreconditionError(absl::StrCat(
        std::string(MechanismName(state_.kind)),
        " does not release a private model"));
  }
  return state_.models.front();
}

absl::Status PrivatePredictor::CheckInput(const Eigen::VectorXd& x) const {
  const ParamMatrix& first = state_.models.front();
  if (x.size() != first.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input has dimension ", x.size(), ", model expects ", first.rows()));
  }
  if (!x.allFinite()) return absl::InvalidArgumentError("non-finite input");
  if (x.norm() > 1.0 + kUnitBallSlack) {
    return absl::InvalidArgumentError(
        absl::StrCat("input norm ", x.norm(), " outside the unit ball"));
  }
  return absl::OkStatus();
}

absl::StatusOr<Eigen::VectorXd> PrivatePredictor::PredictLogits(
    const Eigen::VectorXd& x) {
  if (state_.kind == MechanismKind::kSubsampleAggregate) {
    return absl::FailedPreconditionError(
        "subsample_aggregate answers labels only");
  }
  if (auto s = CheckInput(x); !s.ok()) return s;
  Eigen::VectorXd logits = state_.models.front().transpose() * x;
  if (state_.kind != MechanismKind::kPredictionSensitivity) return logits;

  if (auto s = state_.budget.Consume(); !s.ok()) return s;
  if (state_.unsafe_disable_noise) return logits;
  const NoiseShape shape{static_cast<int>(logits.size()), 1};
  std::lock_guard<std::mutex> lock(*rng_mu_);
  absl::StatusOr<Eigen::MatrixXd> noise =
      state_.query_noise == NoiseFamily::kGaussian
          ? SampleGaussian(shape, state_.query_noise_scale, state_.rng)
          : SampleRadialExponential(shape, state_.query_noise_scale,
                                    state_.rng);
  if (!noise.ok()) return noise.status();
  return Eigen::VectorXd(logits + noise->col(0));
}

absl::StatusOr<int> PrivatePredictor::PredictLabel(const Eigen::VectorXd& x) {
  if (state_.kind != MechanismKind::kSubsampleAggregate) {
    auto logits = PredictLogits(x);
    if (!logits.ok()) return logits.status();
    Eigen::Index best = 0;
    logits->maxCoeff(&best);
    return static_cast<int>(best);
  }
  if (auto s = CheckInput(x); !s.ok()) return s;
  if (auto s = state_.budget.Consume(); !s.ok()) return s;
  const std::vector<int> counts = CountVotes(state_.models, x);
  if (state_.unsafe_disable_noise) {
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) -
                            counts.begin());
  }
  std::lock_guard<std::mutex> lock(*rng_mu_);
  return SampleVote(counts, state_.vote_beta, state_.rng);
}

absl::StatusOr<PrivatePredictor> ModelSensitivityFromMinimizer(
    const ParamMatrix& minimizer, int64_t n_train, int n_classes,
    const MechanismSpec& spec) {
  if (auto s = CheckKind(spec, MechanismKind::kModelSensitivity); !s.ok()) {
    return s;
  }
  PredictorState state = BaseState(spec, n_train);
  const ProblemDims dims = MakeDims(n_train, n_classes, spec.lambda);
  const NoiseShape shape{static_cast<int>(minimizer.rows()),
                         static_cast<int>(minimizer.cols())};
  ParamMatrix released = minimizer;
  if (!spec.unsafe_disable_noise) {
    absl::StatusOr<Eigen::MatrixXd> noise;
    if (spec.privacy.delta == 0.0) {
      auto beta = ModelSensitivityBeta(dims, spec.privacy);
      if (!beta.ok()) return beta.status();
      noise = SampleRadialExponential(shape, *beta, state.rng);
    } else {
      auto sigma = GaussianModelSigma(dims, spec.privacy);
      if (!sigma.ok()) return sigma.status();
      noise = SampleGaussian(shape, *sigma, state.rng);
    }
    if (!noise.ok()) return noise.status();
    released += *noise;
  }
  state.models.push_back(std::move(released));
  return PrivatePredictor(std::move(state));
}

absl::StatusOr<PrivatePredictor> TrainModelSensitivity(
    const LabeledDataset& data, const MechanismSpec& spec) {
  if (auto s = CheckKind(spec, MechanismKind::kModelSensitivity); !s.ok()) {
    return s;
  }
  auto theta = MinimizeErm(data, spec.MakeTrainConfig());
  if (!theta.ok()) return theta.status();
  return ModelSensitivityFromMinimizer(*theta, data.size(),
                                       data.num_classes(), spec);
}

absl::StatusOr<PrivatePredictor> TrainLossPerturbation(
    const LabeledDataset& data, const MechanismSpec& spec) {
  if (auto s = CheckKind(spec, MechanismKind::kLossPerturbation); !s.ok()) {
    return s;
  }
  PredictorState state = BaseState(spec, data.size());
  const ProblemDims dims =
      MakeDims(data.size(), data.num_classes(), spec.lambda);
  const NoiseShape shape{data.dim(), data.num_classes()};

  Perturbation perturbation;
  if (spec.unsafe_disable_noise) {
    perturbation.noise = ParamMatrix::Zero(shape.rows, shape.cols);
    perturbation.rho = 0.0;
  } else if (spec.privacy.delta == 0.0) {
    auto params = LossPerturbationParams(dims, spec.privacy);
    if (!params.ok()) return params.status();
    auto noise = SampleRadialExponential(shape, params->beta, state.rng);
    if (!noise.ok()) return noise.status();
    perturbation.noise = *std::move(noise);
    perturbation.rho = params->rho;
  } else {
    auto params = GaussianLossParams(dims, spec.privacy);
    if (!params.ok()) return params.status();
    auto noise = SampleGaussian(shape, params->sigma, state.rng);
    if (!noise.ok()) return noise.status();
    perturbation.noise = *std::move(noise);
    perturbation.rho = params->rho;
  }
  TrainConfig cfg = spec.MakeTrainConfig();
  cfg.perturbation = std::move(perturbation);
  auto theta = MinimizeErm(data, cfg);
  if (!theta.ok()) return theta.status();
  state.models.push_back(*std::move(theta));
  return PrivatePredictor(std::move(state));
}

std::vector<int> SampleBatch(int n, int batch_size, RngStream& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const int b = std::min(n, batch_size);
  for (int i = 0; i < b; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng.engine())]);
  }
  idx.resize(b);
  return idx;
}

ParamMatrix ClipGradient(const ParamMatrix& gradient, double clip) {
  const double norm = gradient.norm();
  return gradient / std::max(1.0, norm / clip);
}

ParamMatrix NoisyClippedGradientSum(const ParamMatrix& theta,
                                    const LabeledDataset& data,
                                    std::span<const int> batch, double clip,
                                    double noise_multiplier, RngStream& rng) {
  ParamMatrix sum = ParamMatrix::Zero(theta.rows(), theta.cols());
  for (int n : batch) {
    const Eigen::VectorXd x = data.inputs().row(n).transpose();
    const Eigen::VectorXd a = theta.transpose() * x;
    Eigen::VectorXd residual = (a.array() - a.maxCoeff()).exp();
    residual /= residual.sum();
    residual(data.label(n)) -= 1.0;
    sum += ClipGradient(x * residual.transpose(), clip);
  }
  if (noise_multiplier > 0.0) {
    const double stddev = noise_multiplier * clip;
    for (Eigen::Index i = 0; i < sum.size(); ++i) {
      sum.data()[i] += stddev * rng.StandardNormal();
    }
  }
  return sum;
}

absl::StatusOr<PrivatePredictor> TrainDpSgd(const LabeledDataset& data,
                                            const MechanismSpec& spec) {
  if (auto s = CheckKind(spec, MechanismKind::kDpSgd); !s.ok()) return s;
  PredictorState state = BaseState(spec, data.size());
  auto cfg = DpSgdConfig::Create(spec.dpsgd.clip, spec.dpsgd.batch_size,
                                 spec.dpsgd.steps, data.size());
  if (!cfg.ok()) return cfg.status();
  double noise_multiplier = 0.0;
  if (!spec.unsafe_disable_noise) {
    auto sigma = DpSgdSigmaForTarget(spec.privacy, *cfg);
    if (!sigma.ok()) return sigma.status();
    noise_multiplier = *sigma;
  }
  ParamMatrix theta = ParamMatrix::Zero(data.dim(), data.num_classes());
  for (int step = 0; step < spec.dpsgd.steps; ++step) {
    const std::vector<int> batch =
        SampleBatch(data.size(), spec.dpsgd.batch_size, state.rng);
    const ParamMatrix sum = NoisyClippedGradientSum(
        theta, data, batch, spec.dpsgd.clip, noise_multiplier, state.rng);
    theta -= spec.dpsgd.learning_rate / static_cast<double>(batch.size()) *
             sum;
  }
  state.models.push_back(std::move(theta));
  return PrivatePredictor(std::move(state));
}

absl::StatusOr<PrivatePredictor> PredictionSensitivityFromMinimizer(
    const ParamMatrix& minimizer, int64_t n_train, int n_classes,
    const MechanismSpec& spec) {
  if (auto s = CheckKind(spec, MechanismKind::kPredictionSensitivity);
      !s.ok()) {
    return s;
  }
  PredictorState state = BaseState(spec, n_train);
  auto budget = PredictionBudget(spec);
  if (!budget.ok()) return budget.status();
  state.budget = *budget;
  const ProblemDims dims = MakeDims(n_train, n_classes, spec.lambda);
  if (spec.privacy.delta == 0.0) {
    auto beta = PredictionSensitivityBeta(dims, spec.privacy);
    if (!beta.ok()) return beta.status();
    state.query_noise = NoiseFamily::kRadialExponential;
    state.query_noise_scale = *beta;
  } else {
    auto sigma = GaussianPredictionSigma(dims, spec.privacy);
    if (!sigma.ok()) return sigma.status();
    state.query_noise = NoiseFamily::kGaussian;
    state.query_noise_scale = *sigma;
  }
  state.models.push_back(minimizer);
  return PrivatePredictor(std::move(state));
}

absl::StatusOr<PrivatePredictor> BuildPredictionSensitivity(
    const LabeledDataset& data, const MechanismSpec& spec) {
  if (auto s = CheckKind(spec, MechanismKind::kPredictionSensitivity);
      !s.ok()) {
    return s;
  }
  auto theta = MinimizeErm(data, spec.MakeTrainConfig());
  if (!theta.ok()) return theta.status();
  return PredictionSensitivityFromMinimizer(*theta, data.size(),
                                            data.num_classes(), spec);
}

absl::StatusOr<std::vector<std::vector<int>>> PartitionIndices(
    int n, int t, RngStream& rng) {
  if (t < 1 || t > n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot partition ", n, " examples into ", t, " nonempty subsets"));
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng.engine());
  const int part_size = n / t;
  std::vector<std::vector<int>> parts(t);
  for (int i = 0; i < t; ++i) {
    parts[i].assign(order.begin() + i * part_size,
                    order.begin() + (i + 1) * part_size);
  }
  return parts;
}

RngStream EnsemblePartitionStream(const MechanismSpec& spec) {
  return RngStream(spec.seed, spec.stream_id ^ 0x5a5a5a5a5a5a5a5aULL);
}

absl::StatusOr<std::vector<ParamMatrix>> TrainEnsemble(
    const LabeledDataset& data, const MechanismSpec& spec, RngStream& rng) {
  auto parts = PartitionIndices(data.size(), spec.ensemble_size, rng);
  if (!parts.ok()) return parts.status();
  const TrainConfig cfg = spec.MakeTrainConfig();
  std::vector<ParamMatrix> models;
  models.reserve(parts->size());
  for (const std::vector<int>& part : *parts) {
    auto theta = MinimizeErm(data.Subset(part), cfg);
    if (!theta.ok()) return theta.status();
    models.push_back(*std::move(theta));
  }
  return models;
}

absl::StatusOr<PrivatePredictor> SubsampleFromEnsemble(
    std::vector<ParamMatrix> ensemble, int64_t n_train,
    const MechanismSpec& spec) {
  if (auto s = CheckKind(spec, MechanismKind::kSubsampleAggregate); !s.ok()) {
    return s;
  }
  if (ensemble.empty()) return absl::InvalidArgumentError("empty ensemble");
  PredictorState state = BaseState(spec, n_train);
  auto budget = PredictionBudget(spec);
  if (!budget.ok()) return budget.status();
  state.budget = *budget;
  auto beta = SubsampleBeta(spec.privacy);
  if (!beta.ok()) return beta.status();
  state.vote_beta = *beta;
  state.models = std::move(ensemble);
  return PrivatePredictor(std::move(state));
}

absl::StatusOr<PrivatePredictor> BuildSubsampleEnsemble(
    const LabeledDataset& data, const MechanismSpec& spec) {
  if (auto s = CheckKind(spec, MechanismKind::kSubsampleAggregate); !s.ok()) {
    return s;
  }
  RngStream partition_rng = EnsemblePartitionStream(spec);
  auto ensemble = TrainEnsemble(data, spec, partition_rng);
  if (!ensemble.ok()) return ensemble.status();
  return SubsampleFromEnsemble(*std::move(ensemble), data.size(), spec);
}

absl::StatusOr<PrivatePredictor> BuildPredictor(const LabeledDataset& data,
                                                const MechanismSpec& spec) {
  switch (spec.kind) {
    case MechanismKind::kModelSensitivity:
      return TrainModelSensitivity(data, spec);
    case MechanismKind::kLossPerturbation:
      return TrainLossPerturbation(data, spec);
    case MechanismKind::kDpSgd:
      return TrainDpSgd(data, spec);
    case MechanismKind::kPredictionSensitivity:
      return BuildPredictionSensitivity(data, spec);
    case MechanismKind::kSubsampleAggregate:
      return BuildSubsampleEnsemble(data, spec);
  }
  return absl::InvalidArgumentError("unknown mechanism");
}

std::vector<int> CountVotes(std::span<const ParamMatrix> models,
                            const Eigen::VectorXd& x) {
  std::vector<int> counts(models.empty() ? 0 : models.front().cols(), 0);
  for (const ParamMatrix& theta : models) ++counts[PredictClass(theta, x)];
  return counts;
}

std::vector<double> VoteProbabilities(std::span<const int> counts,
                                      double beta) {
  std::vector<double> p(counts.size());
  if (counts.empty()) return p;
  const int top = *std::max_element(counts.begin(), counts.end());
  double z = 0.0;
  for (size_t c = 0; c < counts.size(); ++c) {
    p[c] = std::exp(beta * (counts[c] - top));
    z += p[c];
  }
  for (double& v : p) v /= z;
  return p;
}

int SampleVote(std::span<const int> counts, double beta, RngStream& rng) {
  const std::vector<double> p = VoteProbabilities(counts, beta);
  const double u = rng.Uniform();
  double cumulative = 0.0;
  for (size_t c = 0; c + 1 < p.size(); ++c) {
    cumulative += p[c];
    if (u < cumulative) return static_cast<int>(c);
  }
  return static_cast<int>(p.size()) - 1;
}

absl::StatusOr<CalibrationReport> Calibrate(const MechanismSpec& spec,
                                            int64_t n_train, int n_classes) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  const ProblemDims dims = MakeDims(n_train, n_classes, spec.lambda);
  const bool pure = spec.privacy.delta == 0.0;
  CalibrationReport report;
  report.mechanism = std::string(MechanismName(spec.kind));
  report.privacy = spec.privacy;
  report.noise = pure ? "radial_exponential" : "gaussian";
  report.scale_name = pure ? "beta" : "sigma";
  absl::StatusOr<double> scale;
  switch (spec.kind) {
    case MechanismKind::kModelSensitivity:
      scale = pure ? ModelSensitivityBeta(dims, spec.privacy)
                   : GaussianModelSigma(dims, spec.privacy);
      break;
    case MechanismKind::kLossPerturbation: {
      auto params = pure ? LossPerturbationParams(dims, spec.privacy)
                         : GaussianLossParams(dims, spec.privacy);
      if (!params.ok()) return params.status();
      scale = pure ? params->beta : params->sigma;
      report.rho = params->rho;
      break;
    }
    case MechanismKind::kDpSgd: {
      auto cfg = DpSgdConfig::Create(spec.dpsgd.clip, spec.dpsgd.batch_size,
                                     spec.dpsgd.steps, n_train);
      if (!cfg.ok()) return cfg.status();
      report.noise = "gaussian";
      report.scale_name = "noise_multiplier";
      scale = DpSgdSigmaForTarget(spec.privacy, *cfg);
      break;
    }
    case MechanismKind::kPredictionSensitivity:
      scale = pure ? PredictionSensitivityBeta(dims, spec.privacy)
                   : GaussianPredictionSigma(dims, spec.privacy);
      break;
    case MechanismKind::kSubsampleAggregate:
      report.noise = "exponential_mechanism";
      report.scale_name = "beta";
      scale = SubsampleBeta(spec.privacy);
      break;
  }
  if (!scale.ok()) return scale.status();
  report.scale = *scale;
  return report;
}

}  // namespace dpp

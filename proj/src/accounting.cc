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

#include "dpp/accounting.h"

#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpp/analytic_gaussian.h"
#include "dpp/rdp_accountant.h"
#include "json.hpp"

namespace dpp {
namespace {

constexpr int kSigmaSearchIterations = 100;

absl::Status CheckInputs(const ProblemDims& dims, const PrivacySpec& spec) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  return dims.Validate();
}

absl::Status RequirePure(const PrivacySpec& spec, const char* what) {
  if (spec.delta != 0.0) {
    return absl::FailedPreconditionError(absl::StrCat(
        what, " uses radial-exponential noise and needs delta == 0"));
  }
  return absl::OkStatus();
}

absl::Status RequireApproximate(const PrivacySpec& spec, const char* what) {
  if (spec.delta == 0.0) {
    return absl::FailedPreconditionError(
        absl::StrCat(what, " uses Gaussian noise and needs delta > 0"));
  }
  return absl::OkStatus();
}

double MinimumRho(const ProblemDims& dims, const PrivacySpec& spec) {
  return 2.0 * dims.loss.hessian_bound_L * dims.n_classes / spec.epsilon;
}

}  // namespace

absl::Status PrivacySpec::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1), got ", delta));
  }
  if (budget < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("inference budget must be >= 1, got ", budget));
  }
  return absl::OkStatus();
}

absl::Status ProblemDims::Validate() const {
  if (n_train < 1) return absl::InvalidArgumentError("N must be positive");
  if (!(lambda > 0.0)) {
    return absl::InvalidArgumentError("lambda must be positive");
  }
  if (n_classes < 1) return absl::InvalidArgumentError("C must be positive");
  if (!(loss.lipschitz_K > 0.0) || !(loss.hessian_bound_L > 0.0)) {
    return absl::InvalidArgumentError("loss constants must be positive");
  }
  return absl::OkStatus();
}

double ProblemDims::MinimizerSensitivity() const {
  return 2.0 * loss.lipschitz_K / (static_cast<double>(n_train) * lambda);
}

absl::StatusOr<DpSgdConfig> DpSgdConfig::Create(double clip,
                                                int64_t batch_size,
                                                int64_t steps,
                                                int64_t n_train) {
  if (n_train < 1) return absl::InvalidArgumentError("N must be positive");
  DpSgdConfig cfg;
  cfg.clip = clip;
  cfg.batch_size = batch_size;
  cfg.steps = steps;
  cfg.sample_rate = static_cast<double>(batch_size) / n_train;
  if (auto s = cfg.Validate(); !s.ok()) return s;
  return cfg;
}

absl::Status DpSgdConfig::Validate() const {
  if (!(clip > 0.0)) return absl::InvalidArgumentError("clip must be positive");
  if (batch_size < 1) {
    return absl::InvalidArgumentError("batch size must be positive");
  }
  if (steps < 1) return absl::InvalidArgumentError("steps must be positive");
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sample rate must lie in (0, 1], got ", sample_rate,
        " (batch larger than the dataset?)"));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> ModelSensitivityBeta(const ProblemDims& dims,
                                            const PrivacySpec& spec) {
  if (auto s = CheckInputs(dims, spec); !s.ok()) return s;
  if (auto s = RequirePure(spec, "model sensitivity"); !s.ok()) return s;
  return static_cast<double>(dims.n_train) * dims.lambda * spec.epsilon /
         (2.0 * dims.loss.lipschitz_K);
}

absl::StatusOr<double> GaussianModelSigma(const ProblemDims& dims,
                                          const PrivacySpec& spec) {
  if (auto s = CheckInputs(dims, spec); !s.ok()) return s;
  if (auto s = RequireApproximate(spec, "Gaussian model sensitivity");
      !s.ok()) {
    return s;
  }
  return AnalyticGaussianSigma(spec.epsilon, spec.delta,
                               dims.MinimizerSensitivity());
}

absl::StatusOr<LossPerturbation> LossPerturbationParams(
    const ProblemDims& dims, const PrivacySpec& spec) {
  if (auto s = CheckInputs(dims, spec); !s.ok()) return s;
  if (auto s = RequirePure(spec, "loss perturbation"); !s.ok()) return s;
  LossPerturbation out;
  out.beta = spec.epsilon / (2.0 * dims.loss.lipschitz_K);
  out.rho = MinimumRho(dims, spec);
  return out;
}

absl::StatusOr<LossPerturbation> GaussianLossParams(const ProblemDims& dims,
                                                    const PrivacySpec& spec) {
  if (auto s = CheckInputs(dims, spec); !s.ok()) return s;
  if (auto s = RequireApproximate(spec, "Gaussian loss perturbation");
      !s.ok()) {
    return s;
  }
  LossPerturbation out;
  out.sigma = dims.loss.lipschitz_K / spec.epsilon *
              std::sqrt(8.0 * std::log(2.0 / spec.delta) + 4.0 * spec.epsilon);
  out.rho = MinimumRho(dims, spec);
  return out;
}

absl::StatusOr<double> PredictionSensitivityBeta(const ProblemDims& dims,
                                                 const PrivacySpec& spec) {
  if (auto s = CheckInputs(dims, spec); !s.ok()) return s;
  if (auto s = RequirePure(spec, "prediction sensitivity"); !s.ok()) return s;
  return static_cast<double>(dims.n_train) * dims.lambda * spec.epsilon /
         (2.0 * dims.loss.lipschitz_K * static_cast<double>(spec.budget));
}

absl::StatusOr<PredictionSigmaCandidates> GaussianPredictionSigmaCandidates(
    const ProblemDims& dims, const PrivacySpec& spec) {
  if (auto s = CheckInputs(dims, spec); !s.ok()) return s;
  if (auto s = RequireApproximate(spec, "Gaussian prediction sensitivity");
      !s.ok()) {
    return s;
  }
  const double sensitivity = dims.MinimizerSensitivity();
  const double budget = static_cast<double>(spec.budget);

  PredictionSigmaCandidates out;
  auto standard = AnalyticGaussianSigma(spec.epsilon / budget,
                                        spec.delta / budget, sensitivity);
  if (!standard.ok()) return standard.status();
  out.standard = *standard;
  out.advanced = std::numeric_limits<double>::infinity();

  // Geometric grid over delta' in [delta 1e-6, delta (1 - 1/B)]; empty for
  // B == 1, in which case only the standard candidate exists.
  const double lo = spec.delta * 1e-6;
  const double hi = spec.delta * (1.0 - 1.0 / budget);
  if (hi <= lo) return out;
  const double log_ratio = std::log(hi / lo);
  for (int i = 0; i < kDeltaPrimeGridPoints; ++i) {
    const double delta_prime =
        lo * std::exp(log_ratio * i / (kDeltaPrimeGridPoints - 1));
    const double log_inv = std::log(1.0 / delta_prime);
    const double eps_star =
        std::sqrt(2.0 / budget) *
        (std::sqrt(log_inv + spec.epsilon) - std::sqrt(log_inv));
    const double delta_star = (spec.delta - delta_prime) / budget;
    if (!(eps_star > 0.0) || !(delta_star > 0.0)) continue;
    auto sigma = AnalyticGaussianSigma(eps_star, delta_star, sensitivity);
    if (!sigma.ok()) continue;
    if (*sigma < out.advanced) {
      out.advanced = *sigma;
      out.best_delta_prime = delta_prime;
    }
  }
  return out;
}

absl::StatusOr<double> GaussianPredictionSigma(const ProblemDims& dims,
                                               const PrivacySpec& spec) {
  auto candidates = GaussianPredictionSigmaCandidates(dims, spec);
  if (!candidates.ok()) return candidates.status();
  return candidates->sigma();
}

double AdvancedCompositionBeta(double epsilon, double delta, int64_t budget) {
  const double log_inv = std::log(1.0 / delta);
  return std::sqrt(2.0 / static_cast<double>(budget)) *
         (std::sqrt(log_inv + epsilon) - std::sqrt(log_inv));
}

absl::StatusOr<double> SubsampleBeta(const PrivacySpec& spec) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  const double standard = spec.epsilon / static_cast<double>(spec.budget);
  if (spec.delta == 0.0) return standard;
  return std::max(standard,
                  AdvancedCompositionBeta(spec.epsilon, spec.delta,
                                          spec.budget));
}

absl::StatusOr<double> DpSgdSigmaForTarget(const PrivacySpec& spec,
                                           const DpSgdConfig& cfg) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  if (auto s = cfg.Validate(); !s.ok()) return s;
  if (spec.delta == 0.0) {
    return absl::FailedPreconditionError("DP-SGD does not support delta == 0");
  }
  auto epsilon_at = [&](double sigma) {
    return DpSgdEpsilon(cfg.sample_rate, sigma, static_cast<int>(cfg.steps),
                        spec.delta);
  };
  auto at_max = epsilon_at(kDpSgdSigmaMax);
  if (!at_max.ok()) return at_max.status();
  if (*at_max > spec.epsilon) {
    return absl::OutOfRangeError(absl::StrCat(
        "epsilon ", spec.epsilon, " unreachable with sigma <= ",
        kDpSgdSigmaMax, " (best ", *at_max, ")"));
  }
  auto at_min = epsilon_at(kDpSgdSigmaMin);
  if (!at_min.ok()) return at_min.status();
  if (*at_min <= spec.epsilon) return kDpSgdSigmaMin;

  // Bisection in log(sigma); hi always satisfies the target.
  double lo = std::log(kDpSgdSigmaMin);
  double hi = std::log(kDpSgdSigmaMax);
  double feasible = kDpSgdSigmaMax;
  for (int i = 0; i < kSigmaSearchIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double sigma = std::exp(mid);
    auto eps = epsilon_at(sigma);
    if (!eps.ok()) return eps.status();
    if (*eps <= spec.epsilon) {
      hi = mid;
      feasible = sigma;
    } else {
      lo = mid;
    }
  }
  return feasible;
}

std::string CalibrationReport::ToJson() const {
  nlohmann::ordered_json j;
  j["mechanism"] = mechanism;
  j["epsilon"] = privacy.epsilon;
  j["delta"] = privacy.delta;
  j["budget"] = privacy.budget;
  j["noise"] = noise;
  j[scale_name.empty() ? "scale" : scale_name] = scale;
  if (rho > 0.0) j["rho"] = rho;
  return j.dump();
}

}  // namespace dpp

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
#include "dpp/analytic_gaussian.h"
#include "dpp/rdp_accountant.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpp {
namespace {

// Reference values computed with 50-digit arithmetic by
// tests/oracles/calibration_oracles.py.
constexpr double kModelBetaN60000 = 1060.6601717798212866;
constexpr double kDeltaZeroEps1 = 0.28620821192209649779;
constexpr double kAlphaEps1Delta05 = 0.71709824451896814360;
constexpr double kAlphaEps1Delta1e5 = 5.2759098541748165048;
constexpr double kGaussianModelSigma = 1.0551819708349633010;
constexpr double kGaussianLossSigma = 14.258231388516697083;
constexpr double kPredictionBetaB100 = 2.1213203435596425732;
constexpr double kAdvancedBetaB100 = 0.020405851288067087703;
constexpr double kAdvancedBetaB1 = 0.20405851288067087703;
constexpr double kRdpQuadratureOrder16 = 3.0878507836962445937;
constexpr double kDpSgdSigmaFullBatch = 4.9015143150760632484;
constexpr double kClassicGaussianSigma = 4.8448052626053894213;

ProblemDims Dims(int64_t n, double lambda, int classes) {
  ProblemDims dims;
  dims.n_train = n;
  dims.lambda = lambda;
  dims.n_classes = classes;
  return dims;
}

PrivacySpec Privacy(double epsilon, double delta, int64_t budget) {
  PrivacySpec spec;
  spec.epsilon = epsilon;
  spec.delta = delta;
  spec.budget = budget;
  return spec;
}

TEST(ModelSensitivityTest, BetaMatchesReference) {
  ASSERT_OK_AND_ASSIGN(double beta, ModelSensitivityBeta(Dims(60000, 0.1, 10),
                                                         Privacy(0.5, 0, 1)));
  EXPECT_NEAR(beta, kModelBetaN60000, 1e-12 * kModelBetaN60000);
}

TEST(ModelSensitivityTest, MinimizerSensitivity) {
  EXPECT_DOUBLE_EQ(Dims(1000, 0.01, 3).MinimizerSensitivity(),
                   2.0 * std::sqrt(2.0) / 10.0);
}

TEST(ModelSensitivityTest, RejectsApproximateSpec) {
  EXPECT_STATUS_CODE(
      ModelSensitivityBeta(Dims(100, 0.1, 2), Privacy(1.0, 1e-5, 1)),
      absl::StatusCode::kFailedPrecondition);
  EXPECT_STATUS_CODE(
      GaussianModelSigma(Dims(100, 0.1, 2), Privacy(1.0, 0.0, 1)),
      absl::StatusCode::kFailedPrecondition);
}

TEST(ModelSensitivityTest, GaussianSigmaMatchesReference) {
  ASSERT_OK_AND_ASSIGN(double sigma, GaussianModelSigma(Dims(1000, 0.01, 4),
                                                        Privacy(1, 1e-5, 1)));
  EXPECT_NEAR(sigma, kGaussianModelSigma, 1e-8);
}

TEST(PrivacySpecTest, RejectsBadValues) {
  EXPECT_FALSE(Privacy(0.0, 0.0, 1).Validate().ok());
  EXPECT_FALSE(Privacy(-1.0, 0.0, 1).Validate().ok());
  EXPECT_FALSE(Privacy(1.0, 1.0, 1).Validate().ok());
  EXPECT_FALSE(Privacy(1.0, -1e-9, 1).Validate().ok());
  EXPECT_FALSE(Privacy(1.0, 0.0, 0).Validate().ok());
  EXPECT_FALSE(
      Privacy(std::numeric_limits<double>::infinity(), 0.0, 1).Validate().ok());
  EXPECT_TRUE(Privacy(1.0, 1e-5, 10).Validate().ok());
}

TEST(AnalyticGaussianTest, DeltaAtZeroNoise) {
  EXPECT_NEAR(AnalyticGaussianDeltaZero(1.0), kDeltaZeroEps1, 1e-14);
}

TEST(AnalyticGaussianTest, AlphaMatchesReference) {
  ASSERT_OK_AND_ASSIGN(double a1, AnalyticGaussianAlpha(1.0, 0.5));
  EXPECT_NEAR(a1, kAlphaEps1Delta05, 1e-9);
  ASSERT_OK_AND_ASSIGN(double a2, AnalyticGaussianAlpha(1.0, 1e-5));
  EXPECT_NEAR(a2, kAlphaEps1Delta1e5, 1e-9);
}

TEST(AnalyticGaussianTest, SigmaIsTight) {
  for (double eps : {0.1, 1.0, 4.0}) {
    for (double delta : {1e-3, 1e-6, 1e-9}) {
      ASSERT_OK_AND_ASSIGN(double sigma, AnalyticGaussianSigma(eps, delta, 2.0));
      EXPECT_LE(GaussianMechanismDelta(eps, 2.0, sigma), delta * (1 + 1e-9));
      EXPECT_GT(GaussianMechanismDelta(eps, 2.0, 0.99 * sigma), delta);
    }
  }
}

TEST(AnalyticGaussianTest, RejectsDeltaZero) {
  EXPECT_FALSE(AnalyticGaussianSigma(1.0, 0.0, 1.0).ok());
}

TEST(LossPerturbationTest, RadialParams) {
  ASSERT_OK_AND_ASSIGN(LossPerturbation lp,
                       LossPerturbationParams(Dims(1000, 0.01, 3),
                                              Privacy(1.0, 0.0, 1)));
  EXPECT_DOUBLE_EQ(lp.beta, 1.0 / (2.0 * std::sqrt(2.0)));
  EXPECT_GE(lp.rho, 0.0);
}

TEST(LossPerturbationTest, GaussianSigmaMatchesReference) {
  ASSERT_OK_AND_ASSIGN(LossPerturbation lp,
                       GaussianLossParams(Dims(1000, 0.01, 3),
                                          Privacy(1.0, 1e-5, 1)));
  EXPECT_NEAR(lp.sigma, kGaussianLossSigma, 1e-10);
}

TEST(LossPerturbationTest, RhoIsNonIncreasingInN) {
  double previous = std::numeric_limits<double>::infinity();
  for (int64_t n : {10, 100, 1000, 10000}) {
    ASSERT_OK_AND_ASSIGN(LossPerturbation lp,
                         LossPerturbationParams(Dims(n, 1e-3, 10),
                                                Privacy(0.5, 0.0, 1)));
    EXPECT_LE(lp.rho, previous);
    previous = lp.rho;
  }
}

TEST(PredictionSensitivityTest, BetaMatchesReference) {
  ASSERT_OK_AND_ASSIGN(double beta,
                       PredictionSensitivityBeta(Dims(60000, 0.01, 10),
                                                 Privacy(1.0, 0.0, 100)));
  EXPECT_NEAR(beta, kPredictionBetaB100, 1e-12);
}

TEST(PredictionSensitivityTest, GaussianTakesBetterCandidate) {
  ASSERT_OK_AND_ASSIGN(
      PredictionSigmaCandidates c,
      GaussianPredictionSigmaCandidates(Dims(1000, 0.01, 4),
                                        Privacy(1.0, 1e-5, 1000)));
  EXPECT_GT(c.standard, 0.0);
  EXPECT_DOUBLE_EQ(c.sigma(), std::min(c.standard, c.advanced));
  ASSERT_OK_AND_ASSIGN(double sigma,
                       GaussianPredictionSigma(Dims(1000, 0.01, 4),
                                               Privacy(1.0, 1e-5, 1000)));
  EXPECT_DOUBLE_EQ(sigma, c.sigma());
}

TEST(PredictionSensitivityTest, SingleQueryHasOnlyStandardCandidate) {
  ASSERT_OK_AND_ASSIGN(
      PredictionSigmaCandidates c,
      GaussianPredictionSigmaCandidates(Dims(1000, 0.01, 4),
                                        Privacy(1.0, 1e-5, 1)));
  EXPECT_TRUE(std::isinf(c.advanced));
  ASSERT_OK_AND_ASSIGN(double model_sigma,
                       GaussianModelSigma(Dims(1000, 0.01, 4),
                                          Privacy(1.0, 1e-5, 1)));
  EXPECT_DOUBLE_EQ(c.standard, model_sigma);
}

TEST(SubsampleBetaTest, AdvancedCompositionMatchesReference) {
  EXPECT_NEAR(AdvancedCompositionBeta(1.0, 1e-5, 100), kAdvancedBetaB100,
              1e-15);
  EXPECT_NEAR(AdvancedCompositionBeta(1.0, 1e-5, 1), kAdvancedBetaB1, 1e-14);
}

TEST(SubsampleBetaTest, PureSplitsEvenly) {
  ASSERT_OK_AND_ASSIGN(double beta, SubsampleBeta(Privacy(2.0, 0.0, 8)));
  EXPECT_DOUBLE_EQ(beta, 0.25);
}

TEST(SubsampleBetaTest, ApproximateTakesLarger) {
  ASSERT_OK_AND_ASSIGN(double beta, SubsampleBeta(Privacy(1.0, 1e-5, 10000)));
  EXPECT_DOUBLE_EQ(beta, std::max(1e-4, AdvancedCompositionBeta(1.0, 1e-5,
                                                                 10000)));
  EXPECT_GT(beta, 1e-4);
}

TEST(RdpAccountantTest, MatchesQuadrature) {
  ASSERT_OK_AND_ASSIGN(double rdp, RdpSubsampledGaussian(0.01, 1.0, 16));
  EXPECT_NEAR(rdp, kRdpQuadratureOrder16, 1e-8 * kRdpQuadratureOrder16);
}

TEST(RdpAccountantTest, FullBatchIsPlainGaussian) {
  for (int order : {2, 5, 32}) {
    ASSERT_OK_AND_ASSIGN(double rdp, RdpSubsampledGaussian(1.0, 3.0, order));
    EXPECT_NEAR(rdp, order / (2.0 * 9.0), 1e-12);
  }
}

TEST(RdpAccountantTest, EpsilonGrowsWithSteps) {
  ASSERT_OK_AND_ASSIGN(double e1, DpSgdEpsilon(0.01, 1.0, 100, 1e-5));
  ASSERT_OK_AND_ASSIGN(double e2, DpSgdEpsilon(0.01, 1.0, 1000, 1e-5));
  EXPECT_LT(e1, e2);
}

TEST(DpSgdSigmaTest, FullBatchSingleStepMatchesReference) {
  ASSERT_OK_AND_ASSIGN(DpSgdConfig cfg, DpSgdConfig::Create(1.0, 100, 1, 100));
  ASSERT_OK_AND_ASSIGN(double sigma,
                       DpSgdSigmaForTarget(Privacy(1.0, 1e-5, 1), cfg));
  EXPECT_NEAR(sigma, kDpSgdSigmaFullBatch, 1e-6 * kDpSgdSigmaFullBatch);
  // The RDP accountant is slightly looser than the classical single-release
  // Gaussian bound; both agree within 2%.
  EXPECT_NEAR(sigma / kClassicGaussianSigma, 1.0, 0.02);
}

TEST(DpSgdSigmaTest, RejectsDeltaZero) {
  ASSERT_OK_AND_ASSIGN(DpSgdConfig cfg, DpSgdConfig::Create(1.0, 10, 10, 100));
  EXPECT_STATUS_CODE(DpSgdSigmaForTarget(Privacy(1.0, 0.0, 1), cfg),
                     absl::StatusCode::kFailedPrecondition);
}

TEST(DpSgdSigmaTest, UnreachableTargetIsOutOfRange) {
  ASSERT_OK_AND_ASSIGN(DpSgdConfig cfg, DpSgdConfig::Create(1.0, 10, 10, 100));
  // ln(1/delta) / 63 > epsilon: no order in range can certify the target.
  EXPECT_STATUS_CODE(DpSgdSigmaForTarget(Privacy(0.1, 1e-5, 1), cfg),
                     absl::StatusCode::kOutOfRange);
}

TEST(DpSgdSigmaTest, AchievesTarget) {
  ASSERT_OK_AND_ASSIGN(DpSgdConfig cfg,
                       DpSgdConfig::Create(1.0, 50, 300, 800));
  for (double eps : {0.5, 1.0, 5.0}) {
    ASSERT_OK_AND_ASSIGN(double sigma,
                         DpSgdSigmaForTarget(Privacy(eps, 1e-5, 1), cfg));
    ASSERT_OK_AND_ASSIGN(double achieved,
                         DpSgdEpsilon(cfg.sample_rate, sigma, 300, 1e-5));
    EXPECT_LE(achieved, eps * (1 + 1e-9));
  }
}

TEST(DpSgdConfigTest, RejectsBatchLargerThanData) {
  EXPECT_FALSE(DpSgdConfig::Create(1.0, 101, 1, 100).ok());
  EXPECT_FALSE(DpSgdConfig::Create(0.0, 10, 1, 100).ok());
  ASSERT_OK_AND_ASSIGN(DpSgdConfig cfg, DpSgdConfig::Create(1.0, 25, 4, 100));
  EXPECT_DOUBLE_EQ(cfg.sample_rate, 0.25);
}

TEST(CalibrationReportTest, JsonHasFields) {
  CalibrationReport report;
  report.mechanism = "model_sensitivity";
  report.noise = "radial_exponential";
  report.scale_name = "beta";
  report.scale = 2.5;
  const std::string json = report.ToJson();
  EXPECT_NE(json.find("\"mechanism\":\"model_sensitivity\""), std::string::npos);
  EXPECT_NE(json.find("2.5"), std::string::npos);
}

}  // namespace
}  // namespace dpp

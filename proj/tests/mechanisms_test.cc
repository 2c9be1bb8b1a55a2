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

#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "absl/status/status.h"
#include "dpp/accounting.h"
#include "dpp/core_math.h"
#include "dpp/trainer.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpp {
namespace {

MechanismSpec Spec(MechanismKind kind, double epsilon, double delta,
                   int64_t budget) {
  MechanismSpec spec;
  spec.kind = kind;
  spec.privacy.epsilon = epsilon;
  spec.privacy.delta = delta;
  spec.privacy.budget = budget;
  spec.lambda = 0.05;
  spec.ensemble_size = 10;
  spec.dpsgd.clip = 1.0;
  spec.dpsgd.batch_size = 20;
  spec.dpsgd.steps = 50;
  spec.seed = 1234;
  return spec;
}

Eigen::VectorXd Query(int dim) {
  return Eigen::VectorXd::Constant(dim, 0.5 / std::sqrt(dim));
}

TEST(MechanismNameTest, RoundTrips) {
  for (MechanismKind kind : kAllMechanisms) {
    ASSERT_OK_AND_ASSIGN(MechanismKind parsed,
                         ParseMechanism(MechanismName(kind)));
    EXPECT_EQ(parsed, kind);
  }
  EXPECT_STATUS_CODE(ParseMechanism("bogus"),
                     absl::StatusCode::kInvalidArgument);
  EXPECT_TRUE(IsPredictionSide(MechanismKind::kPredictionSensitivity));
  EXPECT_TRUE(IsPredictionSide(MechanismKind::kSubsampleAggregate));
  EXPECT_FALSE(IsPredictionSide(MechanismKind::kDpSgd));
}

TEST(MechanismSpecTest, DpSgdRequiresDelta) {
  const LabeledDataset data = MakeBlobs(100, 3, 2, 1);
  EXPECT_STATUS_CODE(
      TrainDpSgd(data, Spec(MechanismKind::kDpSgd, 1.0, 0.0, 1)),
      absl::StatusCode::kFailedPrecondition);
}

TEST(MechanismSpecTest, KindMismatchIsRejected) {
  const LabeledDataset data = MakeBlobs(50, 3, 2, 1);
  EXPECT_FALSE(
      TrainDpSgd(data, Spec(MechanismKind::kModelSensitivity, 1, 0, 1)).ok());
}

// ---- Noise-free reductions ----

TEST(ReductionTest, ModelSensitivityWithoutNoiseIsTheMinimizer) {
  const LabeledDataset data = MakeBlobs(120, 4, 3, 2);
  MechanismSpec spec = Spec(MechanismKind::kModelSensitivity, 1.0, 0.0, 1);
  spec.unsafe_disable_noise = true;
  ASSERT_OK_AND_ASSIGN(PrivatePredictor p, TrainModelSensitivity(data, spec));
  ASSERT_OK_AND_ASSIGN(ParamMatrix released, p.ReleasedModel());
  ASSERT_OK_AND_ASSIGN(ParamMatrix theta,
                       MinimizeErm(data, spec.MakeTrainConfig()));
  EXPECT_EQ(released, theta);
}

TEST(ReductionTest, LossPerturbationWithoutNoiseIsTheMinimizer) {
  const LabeledDataset data = MakeBlobs(120, 4, 3, 2);
  MechanismSpec spec = Spec(MechanismKind::kLossPerturbation, 1.0, 0.0, 1);
  spec.unsafe_disable_noise = true;
  spec.grad_tolerance = 1e-10;
  ASSERT_OK_AND_ASSIGN(PrivatePredictor p, TrainLossPerturbation(data, spec));
  ASSERT_OK_AND_ASSIGN(ParamMatrix released, p.ReleasedModel());
  ASSERT_OK_AND_ASSIGN(ParamMatrix theta,
                       MinimizeErm(data, spec.MakeTrainConfig()));
  EXPECT_LT((released - theta).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(ReductionTest, DpSgdWithoutNoiseOrClippingIsPlainSgd) {
  const LabeledDataset data = MakeBlobs(100, 4, 3, 5);
  MechanismSpec spec = Spec(MechanismKind::kDpSgd, 1.0, 1e-5, 1);
  spec.unsafe_disable_noise = true;
  spec.dpsgd.clip = 1e6;
  spec.dpsgd.learning_rate = 0.5;
  ASSERT_OK_AND_ASSIGN(PrivatePredictor p, TrainDpSgd(data, spec));
  ASSERT_OK_AND_ASSIGN(ParamMatrix released, p.ReleasedModel());

  RngStream rng(spec.seed, spec.stream_id);
  ParamMatrix theta = ParamMatrix::Zero(4, 3);
  for (int step = 0; step < spec.dpsgd.steps; ++step) {
    const std::vector<int> batch =
        SampleBatch(data.size(), spec.dpsgd.batch_size, rng);
    ParamMatrix grad = ParamMatrix::Zero(4, 3);
    for (int n : batch) {
      const Eigen::VectorXd x = data.inputs().row(n).transpose();
      ASSERT_OK_AND_ASSIGN(Eigen::VectorXd g,
                           LogisticGradient(theta.transpose() * x,
                                            data.OneHot(n)));
      grad += x * g.transpose();
    }
    theta -= 0.5 / batch.size() * grad;
  }
  EXPECT_LT((released - theta).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ReductionTest, PredictionSensitivityWithoutNoiseAnswersMinimizer) {
  const LabeledDataset data = MakeBlobs(80, 3, 2, 3);
  MechanismSpec spec =
      Spec(MechanismKind::kPredictionSensitivity, 1.0, 0.0, 5);
  spec.unsafe_disable_noise = true;
  ASSERT_OK_AND_ASSIGN(PrivatePredictor p,
                       BuildPredictionSensitivity(data, spec));
  ASSERT_OK_AND_ASSIGN(ParamMatrix theta,
                       MinimizeErm(data, spec.MakeTrainConfig()));
  ASSERT_OK_AND_ASSIGN(Eigen::VectorXd logits, p.PredictLogits(Query(3)));
  EXPECT_LT((logits - theta.transpose() * Query(3)).cwiseAbs().maxCoeff(),
            1e-15);
}

// ---- DP-SGD building blocks ----

TEST(ClipGradientTest, Examples) {
  ParamMatrix g(1, 2);
  g << 3.0, 4.0;  // Frobenius norm 5
  ParamMatrix c = ClipGradient(g, 1.0);
  EXPECT_NEAR(c(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(c(0, 1), 0.8, 1e-15);
  EXPECT_EQ(ClipGradient(g, 5.0), g);
  EXPECT_EQ(ClipGradient(g, 10.0), g);
  EXPECT_NEAR(ClipGradient(g, 0.1).norm(), 0.1, 1e-15);
  EXPECT_EQ(ClipGradient(ParamMatrix::Zero(2, 2), 1.0),
            ParamMatrix::Zero(2, 2));
}

TEST(SampleBatchTest, DistinctIndicesInRange) {
  RngStream rng(1, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<int> batch = SampleBatch(50, 17, rng);
    ASSERT_EQ(batch.size(), 17u);
    std::set<int> seen(batch.begin(), batch.end());
    EXPECT_EQ(seen.size(), 17u);
    EXPECT_GE(*seen.begin(), 0);
    EXPECT_LT(*seen.rbegin(), 50);
  }
}

TEST(NoisyClippedGradientSumTest, EachTermIsClipped) {
  const LabeledDataset data = MakeBlobs(40, 3, 2, 8);
  ParamMatrix theta = ParamMatrix::Constant(3, 2, 4.0);
  std::vector<int> batch(40);
  std::iota(batch.begin(), batch.end(), 0);
  RngStream rng(0, 0);
  const ParamMatrix sum =
      NoisyClippedGradientSum(theta, data, batch, 0.01, 0.0, rng);
  EXPECT_LE(sum.norm(), 40 * 0.01 + 1e-12);
}

TEST(NoisyClippedGradientSumTest, NoiseHasRequestedScale) {
  const LabeledDataset data = MakeBlobs(10, 20, 5, 8);
  const ParamMatrix theta = ParamMatrix::Zero(20, 5);
  const std::vector<int> batch = {0};
  RngStream rng(3, 0);
  const ParamMatrix clean =
      NoisyClippedGradientSum(theta, data, batch, 0.5, 0.0, rng);
  double sq = 0.0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    sq += (NoisyClippedGradientSum(theta, data, batch, 0.5, 2.0, rng) - clean)
              .squaredNorm();
  }
  const double var = sq / (reps * 100.0);
  EXPECT_NEAR(var, 1.0, 0.05);  // (2.0 * 0.5)^2
}

// ---- Subsample-and-aggregate building blocks ----

TEST(PartitionIndicesTest, FloorSizedDisjointParts) {
  RngStream rng(4, 0);
  ASSERT_OK_AND_ASSIGN(auto parts, PartitionIndices(1000, 256, rng));
  ASSERT_EQ(parts.size(), 256u);
  std::set<int> seen;
  for (const auto& part : parts) {
    EXPECT_EQ(part.size(), 3u);
    seen.insert(part.begin(), part.end());
  }
  EXPECT_EQ(seen.size(), 768u);  // 232 examples dropped
  EXPECT_STATUS_CODE(PartitionIndices(10, 11, rng),
                     absl::StatusCode::kInvalidArgument);
}

TEST(PartitionIndicesTest, SeededShuffleReproduces) {
  RngStream a(9, 1), b(9, 1);
  ASSERT_OK_AND_ASSIGN(auto pa, PartitionIndices(100, 7, a));
  ASSERT_OK_AND_ASSIGN(auto pb, PartitionIndices(100, 7, b));
  EXPECT_EQ(pa, pb);
}

TEST(VoteTest, CountVotesUsesLowestIndexOnTies) {
  std::vector<ParamMatrix> models;
  ParamMatrix tie = ParamMatrix::Zero(2, 3);
  ParamMatrix second = ParamMatrix::Zero(2, 3);
  second(0, 2) = 1.0;
  models = {tie, tie, second};
  Eigen::VectorXd x(2);
  x << 0.5, 0.0;
  EXPECT_EQ(CountVotes(models, x), (std::vector<int>{2, 0, 1}));
}

TEST(VoteTest, ProbabilitiesForLn2) {
  const std::vector<int> counts = {2, 1, 0};
  const std::vector<double> p = VoteProbabilities(counts, std::log(2.0));
  EXPECT_NEAR(p[0], 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(p[1], 2.0 / 7.0, 1e-15);
  EXPECT_NEAR(p[2], 1.0 / 7.0, 1e-15);
}

TEST(VoteTest, ProbabilitiesStableForLargeBeta) {
  const std::vector<int> counts = {1000, 999};
  const std::vector<double> p = VoteProbabilities(counts, 50.0);
  EXPECT_TRUE(std::isfinite(p[0]));
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
  EXPECT_NEAR(p[1] / p[0], std::exp(-50.0), 1e-25);
}

TEST(VoteTest, SampleVoteFrequencies) {
  const std::vector<int> counts = {2, 1, 0};
  RngStream rng(6, 0);
  std::vector<int> hits(3, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) ++hits[SampleVote(counts, std::log(2.0), rng)];
  const double expected[] = {4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0};
  for (int c = 0; c < 3; ++c) {
    const double se = std::sqrt(expected[c] * (1 - expected[c]) / draws);
    EXPECT_NEAR(hits[c] / static_cast<double>(draws), expected[c], 4 * se);
  }
}

TEST(SubsampleEnsembleTest, TrainsOneModelPerPart) {
  const LabeledDataset data = MakeBlobs(200, 3, 2, 4);
  MechanismSpec spec = Spec(MechanismKind::kSubsampleAggregate, 1.0, 0.0, 3);
  ASSERT_OK_AND_ASSIGN(PrivatePredictor p, BuildSubsampleEnsemble(data, spec));
  EXPECT_EQ(p.state().models.size(), 10u);
  EXPECT_DOUBLE_EQ(p.state().vote_beta, 1.0 / 3.0);
  EXPECT_STATUS_CODE(p.PredictLogits(Query(3)),
                     absl::StatusCode::kFailedPrecondition);
  EXPECT_STATUS_CODE(p.ReleasedModel(), absl::StatusCode::kFailedPrecondition);
}

// ---- Budget enforcement ----

class BudgetTest : public ::testing::TestWithParam<MechanismKind> {};

TEST_P(BudgetTest, QueryBudgetPlusOneIsRefused) {
  const LabeledDataset data = MakeBlobs(200, 3, 2, 4);
  const MechanismKind kind = GetParam();
  const double delta = kind == MechanismKind::kDpSgd ? 1e-5 : 0.0;
  ASSERT_OK_AND_ASSIGN(PrivatePredictor p,
                       BuildPredictor(data, Spec(kind, 1.0, delta, 7)));
  for (int i = 0; i < 7; ++i) ASSERT_OK(p.PredictLabel(Query(3)));
  const absl::Status eighth = p.PredictLabel(Query(3)).status();
  if (IsPredictionSide(kind)) {
    EXPECT_TRUE(IsBudgetExhausted(eighth)) << eighth;
    EXPECT_EQ(p.budget().used(), 7);
  } else {
    EXPECT_OK(eighth);
    EXPECT_TRUE(p.budget().unlimited());
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllMechanisms, BudgetTest, ::testing::ValuesIn(kAllMechanisms),
    [](const ::testing::TestParamInfo<MechanismKind>& info) {
      return std::string(MechanismName(info.param));
    });

TEST(BudgetEnforcementTest, InvalidInputDoesNotConsume) {
  const LabeledDataset data = MakeBlobs(100, 3, 2, 4);
  ASSERT_OK_AND_ASSIGN(
      PrivatePredictor p,
      BuildPredictor(data, Spec(MechanismKind::kPredictionSensitivity, 1, 0,
                                2)));
  EXPECT_STATUS_CODE(p.PredictLabel(Eigen::VectorXd::Ones(3)),
                     absl::StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(p.PredictLabel(Eigen::VectorXd::Zero(4)),
                     absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(p.budget().used(), 0);
}

TEST(BudgetEnforcementTest, ConcurrentQueriesNeverExceedBudget) {
  const LabeledDataset data = MakeBlobs(100, 3, 2, 4);
  ASSERT_OK_AND_ASSIGN(
      PrivatePredictor p,
      BuildPredictor(data, Spec(MechanismKind::kPredictionSensitivity, 1, 0,
                                500)));
  std::atomic<int> answered{0}, refused{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 200; ++i) {
        const absl::Status s = p.PredictLabel(Query(3)).status();
        if (s.ok()) {
          ++answered;
        } else if (IsBudgetExhausted(s)) {
          ++refused;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(answered.load(), 500);
  EXPECT_EQ(refused.load(), 300);
}

// ---- Calibration ----

TEST(CalibrateTest, ReportsScaleForEachMechanism) {
  for (MechanismKind kind : kAllMechanisms) {
    const double delta = kind == MechanismKind::kDpSgd ? 1e-5 : 0.0;
    ASSERT_OK_AND_ASSIGN(CalibrationReport report,
                         Calibrate(Spec(kind, 1.0, delta, 10), 1000, 4));
    EXPECT_EQ(report.mechanism, MechanismName(kind));
    EXPECT_GT(report.scale, 0.0);
  }
  ASSERT_OK_AND_ASSIGN(
      CalibrationReport ms,
      Calibrate(Spec(MechanismKind::kModelSensitivity, 0.5, 0.0, 1), 60000,
                10));
  EXPECT_EQ(ms.scale_name, "beta");
  EXPECT_NEAR(ms.scale, 60000 * 0.05 * 0.5 / (2 * std::sqrt(2.0)), 1e-9);
}

}  // namespace
}  // namespace dpp

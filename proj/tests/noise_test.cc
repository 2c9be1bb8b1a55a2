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


#include "dpp/noise.h"

#include <cmath>

#include "absl/status/status.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpp {
namespace {

TEST(RngStreamTest, SameSeedAndStreamReproduce) {
  RngStream a(42, 3), b(42, 3);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(a.StandardNormal(), b.StandardNormal());
    EXPECT_EQ(a.Uniform(), b.Uniform());
  }
}

TEST(RngStreamTest, StreamsDiffer) {
  RngStream a(42, 3), b(42, 4), c(43, 3);
  const double x = a.Uniform();
  EXPECT_NE(x, b.Uniform());
  EXPECT_NE(x, c.Uniform());
}

TEST(RngStreamTest, UniformInUnitInterval) {
  RngStream rng(1, 1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.Uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RngStreamTest, SerializeRestoreContinuesSequence) {
  RngStream rng(9, 2);
  for (int i = 0; i < 17; ++i) rng.StandardNormal();
  const std::string state = rng.SerializeState();
  RngStream copy(0, 0);
  ASSERT_OK(copy.RestoreState(state));
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(rng.StandardNormal(), copy.StandardNormal());
  }
}

TEST(RngStreamTest, RejectsMalformedState) {
  RngStream rng(0, 0);
  EXPECT_STATUS_CODE(rng.RestoreState("not a state"),
                     absl::StatusCode::kInvalidArgument);
}

TEST(RngStreamTest, FillMatchesRepeatedDraws) {
  RngStream a(5, 5), b(5, 5);
  std::vector<double> bulk(64);
  a.FillStandardNormal(bulk.data(), 64);
  for (double v : bulk) EXPECT_EQ(v, b.StandardNormal());
}

TEST(SampleGaussianTest, ShapeAndMoments) {
  RngStream rng(3, 0);
  ASSERT_OK_AND_ASSIGN(Eigen::MatrixXd z, SampleGaussian({200, 100}, 2.0, rng));
  EXPECT_EQ(z.rows(), 200);
  EXPECT_EQ(z.cols(), 100);
  const double n = static_cast<double>(z.size());
  const double mean = z.mean();
  const double var = (z.array() - mean).square().sum() / (n - 1);
  EXPECT_NEAR(mean, 0.0, 5 * 2.0 / std::sqrt(n));
  EXPECT_NEAR(var, 4.0, 0.05 * 4.0);
}

TEST(SampleRadialExponentialTest, NormHasGammaMean) {
  // ||b|| ~ Gamma(n, 1 / beta): mean n / beta, variance n / beta^2.
  RngStream rng(4, 0);
  const int n = 12;
  const double beta = 2.0;
  const int draws = 20000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    ASSERT_OK_AND_ASSIGN(Eigen::MatrixXd b,
                         SampleRadialExponential({3, 4}, beta, rng));
    sum += b.norm();
  }
  const double se = std::sqrt(n) / beta / std::sqrt(draws);
  EXPECT_NEAR(sum / draws, n / beta, 4 * se);
}

TEST(SampleRadialExponentialTest, DirectionIsIsotropic) {
  RngStream rng(8, 0);
  Eigen::Vector3d mean_direction = Eigen::Vector3d::Zero();
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    ASSERT_OK_AND_ASSIGN(Eigen::MatrixXd b,
                         SampleRadialExponential({3, 1}, 1.0, rng));
    mean_direction += b.col(0).normalized();
  }
  mean_direction /= draws;
  // Each coordinate of a uniform unit vector in R^3 has variance 1/3.
  EXPECT_LT(mean_direction.cwiseAbs().maxCoeff(),
            4 * std::sqrt(1.0 / 3.0 / draws));
}

TEST(SamplerTest, RejectsBadArguments) {
  RngStream rng(0, 0);
  EXPECT_STATUS_CODE(SampleGaussian({0, 3}, 1.0, rng),
                     absl::StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(SampleGaussian({2, 3}, -1.0, rng),
                     absl::StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(SampleRadialExponential({2, 3}, 0.0, rng),
                     absl::StatusCode::kInvalidArgument);
  EXPECT_STATUS_CODE(
      SampleRadialExponential({2, 3}, std::numeric_limits<double>::infinity(),
                              rng),
      absl::StatusCode::kInvalidArgument);
}

}  // namespace
}  // namespace dpp

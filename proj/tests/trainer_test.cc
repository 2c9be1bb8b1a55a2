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


#include "dpp/trainer.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "absl/status/status.h"
#include "dpp/core_math.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpp {
namespace {

TEST(LbfgsTest, MinimizesQuadratic) {
  Eigen::VectorXd target(3);
  target << 1.0, -2.0, 0.5;
  Eigen::VectorXd scales(3);
  scales << 1.0, 10.0, 100.0;
  SmoothObjective fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const Eigen::VectorXd d = x - target;
    *grad = scales.cwiseProduct(d);
    return 0.5 * d.dot(scales.cwiseProduct(d));
  };
  LbfgsOptions options;
  options.grad_tolerance = 1e-10;
  LbfgsResult r = MinimizeLbfgs(fn, Eigen::VectorXd::Zero(3), options);
  EXPECT_TRUE(r.converged);
  EXPECT_LT((r.x - target).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(MinimizeErmTest, GradientVanishesAtMinimizer) {
  const LabeledDataset data = MakeBlobs(200, 6, 4, 21);
  TrainConfig cfg;
  cfg.lambda = 0.01;
  ASSERT_OK_AND_ASSIGN(TrainResult r, MinimizeErmDetailed(data, cfg));
  ASSERT_OK_AND_ASSIGN(ObjectiveValue v, ErmObjective(r.theta, data, 0.01));
  EXPECT_LT(v.gradient.norm(), 1e-7);
  EXPECT_NEAR(v.value, r.objective, 1e-12);
  EXPECT_GT(Accuracy(r.theta, data), 0.5);  // chance is 0.25
}

TEST(MinimizeErmTest, ZeroPerturbationReducesToPlainErm) {
  const LabeledDataset data = MakeBlobs(150, 5, 3, 4);
  TrainConfig plain;
  plain.lambda = 0.02;
  plain.grad_tolerance = 1e-10;
  TrainConfig perturbed = plain;
  perturbed.perturbation = Perturbation{ParamMatrix::Zero(5, 3), 0.0};
  ASSERT_OK_AND_ASSIGN(ParamMatrix a, MinimizeErm(data, plain));
  ASSERT_OK_AND_ASSIGN(ParamMatrix b, MinimizeErm(data, perturbed));
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(MinimizeErmTest, LinearNoiseShiftsMinimizer) {
  const LabeledDataset data = MakeBlobs(150, 5, 3, 4);
  TrainConfig cfg;
  cfg.lambda = 0.02;
  ParamMatrix noise = ParamMatrix::Constant(5, 3, 5.0);
  cfg.perturbation = Perturbation{noise, 0.5};
  ASSERT_OK_AND_ASSIGN(ParamMatrix theta, MinimizeErm(data, cfg));
  ASSERT_OK_AND_ASSIGN(
      ObjectiveValue v,
      PerturbedObjective(theta, data, 0.02 * data.size(), noise, 0.5));
  EXPECT_LT(v.gradient.norm(), 1e-6);
}

TEST(MinimizeErmTest, RejectsBadConfig) {
  const LabeledDataset data = MakeBlobs(20, 2, 2, 1);
  TrainConfig cfg;
  cfg.lambda = -1.0;
  EXPECT_STATUS_CODE(MinimizeErm(data, cfg),
                     absl::StatusCode::kInvalidArgument);
  cfg.lambda = 0.1;
  cfg.perturbation = Perturbation{ParamMatrix::Zero(3, 2), 0.0};
  EXPECT_STATUS_CODE(MinimizeErm(data, cfg),
                     absl::StatusCode::kInvalidArgument);
}

TEST(MinimizeErmTest, NonConvergenceIsAborted) {
  const LabeledDataset data = MakeBlobs(100, 5, 3, 2);
  TrainConfig cfg;
  cfg.lambda = 1e-4;
  cfg.max_iterations = 1;
  cfg.grad_tolerance = 1e-14;
  EXPECT_STATUS_CODE(MinimizeErm(data, cfg), absl::StatusCode::kAborted);
}

TEST(PredictTest, LogitsAndArgmax) {
  ParamMatrix theta(2, 3);
  theta << 1.0, 0.0, -1.0,
           0.0, 2.0, 0.0;
  Eigen::VectorXd x(2);
  x << 0.5, 0.5;
  ASSERT_OK_AND_ASSIGN(Eigen::VectorXd a, PredictLogits(theta, x));
  EXPECT_DOUBLE_EQ(a(0), 0.5);
  EXPECT_DOUBLE_EQ(a(1), 1.0);
  EXPECT_DOUBLE_EQ(a(2), -0.5);
  EXPECT_EQ(PredictClass(theta, x), 1);
  EXPECT_STATUS_CODE(PredictLogits(theta, Eigen::VectorXd::Zero(3)),
                     absl::StatusCode::kInvalidArgument);
}

TEST(PredictTest, TiesGoToLowestIndex) {
  ParamMatrix theta = ParamMatrix::Zero(2, 4);
  EXPECT_EQ(PredictClass(theta, Eigen::VectorXd::Ones(2)), 0);
}

TEST(ParamFileTest, RoundTrip) {
  ParamMatrix theta(3, 2);
  theta << 1.0, -2.5, 1e-300, 3.141592653589793, -0.0, 1e10;
  const std::string path =
      (std::filesystem::temp_directory_path() / "dpp_param_test.txt").string();
  ASSERT_OK(WriteParamFile(path, theta));
  ASSERT_OK_AND_ASSIGN(ParamMatrix back, ReadParamFile(path));
  EXPECT_EQ(back, theta);
  std::remove(path.c_str());
}

TEST(ParamFileTest, MissingAndCorruptFiles) {
  EXPECT_STATUS_CODE(ReadParamFile("/nonexistent/dpp/params.txt"),
                     absl::StatusCode::kNotFound);
  const std::string path =
      (std::filesystem::temp_directory_path() / "dpp_param_bad.txt").string();
  {
    std::ofstream out(path);
    out << "garbage\n";
  }
  EXPECT_STATUS_CODE(ReadParamFile(path), absl::StatusCode::kDataLoss);
  std::remove(path.c_str());
}

}  // namespace
}  // namespace dpp

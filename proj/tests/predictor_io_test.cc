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


#include "dpp/predictor_io.h"

#include <cstdio>
#include <filesystem>

#include "absl/status/status.h"
#include "dpp/mechanisms.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace dpp {
namespace {

MechanismSpec Spec(MechanismKind kind, double delta, int64_t budget) {
  MechanismSpec spec;
  spec.kind = kind;
  spec.privacy.epsilon = 1.0;
  spec.privacy.delta = delta;
  spec.privacy.budget = budget;
  spec.lambda = 0.05;
  spec.ensemble_size = 8;
  spec.dpsgd.batch_size = 10;
  spec.dpsgd.steps = 20;
  spec.seed = 77;
  spec.stream_id = 5;
  return spec;
}

class PredictorIoTest : public ::testing::TestWithParam<MechanismKind> {};

TEST_P(PredictorIoTest, RoundTripPreservesStateAndNoiseStream) {
  const LabeledDataset data = MakeBlobs(120, 3, 2, 6);
  const MechanismKind kind = GetParam();
  const double delta = kind == MechanismKind::kDpSgd ? 1e-5 : 0.0;
  ASSERT_OK_AND_ASSIGN(PrivatePredictor original,
                       BuildPredictor(data, Spec(kind, delta, 10)));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.3);
  ASSERT_OK(original.PredictLabel(x));

  ASSERT_OK_AND_ASSIGN(PrivatePredictor copy,
                       DeserializePredictor(SerializePredictor(original)));
  EXPECT_EQ(copy.kind(), original.kind());
  EXPECT_EQ(copy.privacy().epsilon, original.privacy().epsilon);
  EXPECT_EQ(copy.privacy().delta, original.privacy().delta);
  EXPECT_EQ(copy.budget().used(), original.budget().used());
  EXPECT_EQ(copy.budget().remaining(), original.budget().remaining());
  EXPECT_EQ(copy.state().query_noise_scale, original.state().query_noise_scale);
  EXPECT_EQ(copy.state().vote_beta, original.state().vote_beta);
  ASSERT_EQ(copy.state().models.size(), original.state().models.size());
  for (size_t i = 0; i < copy.state().models.size(); ++i) {
    EXPECT_EQ(copy.state().models[i], original.state().models[i]);
  }
  // The restored stream continues where the original left off.
  for (int i = 0; i < 5; ++i) {
    ASSERT_OK_AND_ASSIGN(int a, original.PredictLabel(x));
    ASSERT_OK_AND_ASSIGN(int b, copy.PredictLabel(x));
    EXPECT_EQ(a, b);
  }
}

INSTANTIATE_TEST_SUITE_P(
    AllMechanisms, PredictorIoTest, ::testing::ValuesIn(kAllMechanisms),
    [](const ::testing::TestParamInfo<MechanismKind>& info) {
      return std::string(MechanismName(info.param));
    });

TEST(PredictorFileTest, ExhaustedBudgetSurvivesReload) {
  const LabeledDataset data = MakeBlobs(100, 3, 2, 6);
  ASSERT_OK_AND_ASSIGN(
      PrivatePredictor p,
      BuildPredictor(data, Spec(MechanismKind::kPredictionSensitivity, 0, 2)));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.3);
  ASSERT_OK(p.PredictLabel(x));
  ASSERT_OK(p.PredictLabel(x));
  const std::string path =
      (std::filesystem::temp_directory_path() / "dpp_predictor.json").string();
  ASSERT_OK(SavePredictor(p, path));
  ASSERT_OK_AND_ASSIGN(PrivatePredictor reloaded, LoadPredictor(path));
  EXPECT_TRUE(IsBudgetExhausted(reloaded.PredictLabel(x).status()));
  std::remove(path.c_str());
}

TEST(PredictorFileTest, RejectsForeignOrCorruptInput) {
  EXPECT_FALSE(DeserializePredictor("not json").ok());
  EXPECT_FALSE(DeserializePredictor("{}").ok());
  EXPECT_FALSE(
      DeserializePredictor(R"({"format":"other","version":1})").ok());
  EXPECT_FALSE(LoadPredictor("/nonexistent/dpp/predictor.json").ok());
}

TEST(PredictorFileTest, TamperedModelShapeIsRejected) {
  const LabeledDataset data = MakeBlobs(100, 3, 2, 6);
  ASSERT_OK_AND_ASSIGN(
      PrivatePredictor p,
      BuildPredictor(data, Spec(MechanismKind::kModelSensitivity, 0, 1)));
  nlohmann::json j = nlohmann::json::parse(SerializePredictor(p));
  j["models"][0]["rows"] = 4;
  EXPECT_FALSE(DeserializePredictor(j.dump()).ok());
}

}  // namespace
}  // namespace dpp

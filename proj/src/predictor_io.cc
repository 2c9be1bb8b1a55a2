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
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace dpp {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

Json MatrixToJson(const ParamMatrix& m) {
  std::vector<double> values;
  values.reserve(m.size());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) values.push_back(m(r, c));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", values}};
}

absl::StatusOr<ParamMatrix> MatrixFromJson(const Json& j) {
  const int64_t rows = j.at("rows").get<int64_t>();
  const int64_t cols = j.at("cols").get<int64_t>();
  const std::vector<double> values = j.at("values").get<std::vector<double>>();
  if (rows < 1 || cols < 1 ||
      static_cast<int64_t>(values.size()) != rows * cols) {
    return absl::InvalidArgumentError("parameter matrix has the wrong size");
  }
  ParamMatrix m(rows, cols);
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  }
  return m;
}

absl::StatusOr<NoiseFamily> ParseNoiseFamily(const std::string& name) {
  for (NoiseFamily f : {NoiseFamily::kNone, NoiseFamily::kRadialExponential,
                        NoiseFamily::kGaussian}) {
    if (NoiseFamilyName(f) == name) return f;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown noise family '", name, "'"));
}

absl::StatusOr<PrivatePredictor> FromJson(const Json& j) {
  if (j.at("format").get<std::string>() != "dpp-predictor" ||
      j.at("version").get<int>() != kFormatVersion) {
    return absl::InvalidArgumentError("not a dpp predictor file");
  }
  PredictorState state;
  auto kind = ParseMechanism(j.at("mechanism").get<std::string>());
  if (!kind.ok()) return kind.status();
  state.kind = *kind;
  const Json& privacy = j.at("privacy");
  state.privacy.epsilon = privacy.at("epsilon").get<double>();
  state.privacy.delta = privacy.at("delta").get<double>();
  state.privacy.budget = privacy.at("budget").get<int64_t>();
  if (auto s = state.privacy.Validate(); !s.ok()) return s;
  state.n_train = j.at("n_train").get<int64_t>();
  state.lambda = j.at("lambda").get<double>();
  auto family = ParseNoiseFamily(j.at("query_noise").get<std::string>());
  if (!family.ok()) return family.status();
  state.query_noise = *family;
  state.query_noise_scale = j.at("query_noise_scale").get<double>();
  state.vote_beta = j.at("vote_beta").get<double>();
  for (const Json& m : j.at("models")) {
    auto theta = MatrixFromJson(m);
    if (!theta.ok()) return theta.status();
    if (!state.models.empty() &&
        (theta->rows() != state.models.front().rows() ||
         theta->cols() != state.models.front().cols())) {
      return absl::InvalidArgumentError("ensemble members differ in shape");
    }
    state.models.push_back(*std::move(theta));
  }
  if (state.models.empty()) {
    return absl::InvalidArgumentError("predictor has no parameters");
  }
  if (IsPredictionSide(state.kind)) {
    auto budget = BudgetState::Limited(state.privacy.budget,
                                       j.at("budget_used").get<int64_t>());
    if (!budget.ok()) return budget.status();
    state.budget = *budget;
  }
  const Json& rng = j.at("rng");
  state.rng = RngStream(rng.at("seed").get<uint64_t>(),
                        rng.at("stream_id").get<uint64_t>());
  if (auto s = state.rng.RestoreState(rng.at("state").get<std::string>());
      !s.ok()) {
    return s;
  }
  state.unsafe_disable_noise = j.value("unsafe_disable_noise", false);
  return PrivatePredictor(std::move(state));
}

}  // namespace

std::string SerializePredictor(const PrivatePredictor& predictor) {
  const PredictorState& s = predictor.state();
  Json j;
  j["format"] = "dpp-predictor";
  j["version"] = kFormatVersion;
  j["mechanism"] = std::string(MechanismName(s.kind));
  j["privacy"] = Json{{"epsilon", s.privacy.epsilon},
                      {"delta", s.privacy.delta},
                      {"budget", s.privacy.budget}};
  j["n_train"] = s.n_train;
  j["lambda"] = s.lambda;
  j["query_noise"] = std::string(NoiseFamilyName(s.query_noise));
  j["query_noise_scale"] = s.query_noise_scale;
  j["vote_beta"] = s.vote_beta;
  j["budget_used"] = s.budget.unlimited() ? 0 : s.budget.used();
  j["budget_remaining"] = s.budget.unlimited() ? -1 : s.budget.remaining();
  Json models = Json::array();
  for (const ParamMatrix& m : s.models) models.push_back(MatrixToJson(m));
  j["models"] = std::move(models);
  j["rng"] = Json{{"seed", s.rng.seed()},
                  {"stream_id", s.rng.stream_id()},
                  {"state", s.rng.SerializeState()}};
  if (s.unsafe_disable_noise) j["unsafe_disable_noise"] = true;
  return j.dump(1);
}

absl::StatusOr<PrivatePredictor> DeserializePredictor(const std::string& text) {
  try {
    return FromJson(Json::parse(text));
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed predictor: ", e.what()));
  }
}

absl::Status SavePredictor(const PrivatePredictor& predictor,
                           const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", tmp));
    out << SerializePredictor(predictor) << '\n';
    if (!out) return absl::DataLossError(absl::StrCat("write failed: ", tmp));
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    return absl::UnavailableError(absl::StrCat("cannot replace ", path));
  }
  return absl::OkStatus();
}

absl::StatusOr<PrivatePredictor> LoadPredictor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return DeserializePredictor(buf.str());
}

}  // namespace dpp

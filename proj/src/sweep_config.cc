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

#include "dpp/sweep_config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "json.hpp"

namespace dpp {
namespace {

using Json = nlohmann::json;

const std::set<std::string>& KnownKeys() {
  static const auto* keys = new std::set<std::string>{
      "source", "path", "labels_path", "test_path", "test_labels_path",
      "synth_n_per_class", "synth_classes",
      "synth_dim", "synth_separation", "test_fraction", "mechanisms",
      "epsilon", "delta", "budget", "n_train", "dim", "classes", "lambda",
      "ensemble", "dpsgd_clip", "dpsgd_batch_size", "dpsgd_steps",
      "dpsgd_learning_rate", "max_iterations", "grad_tolerance",
      "lambda_selection_grid", "clip_selection_grid", "validation_fraction",
      "prediction_eval", "trials", "base_seed", "threads", "record_timing"};
  return *keys;
}

template <typename T>
void Read(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

template <typename T>
absl::Status CheckGrid(const std::vector<T>& grid, const char* name) {
  if (grid.empty()) {
    return absl::InvalidArgumentError(absl::StrCat("grid '", name,
                                                   "' is empty"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status SweepConfig::Validate() const {
  if (source != DataSourceKind::kSynth && path.empty()) {
    return absl::InvalidArgumentError("dataset path is required");
  }
  if (source == DataSourceKind::kIdx && labels_path.empty()) {
    return absl::InvalidArgumentError("IDX sources need labels_path");
  }
  if (source == DataSourceKind::kIdx && !test_path.empty() &&
      test_labels_path.empty()) {
    return absl::InvalidArgumentError("IDX test_path needs test_labels_path");
  }
  if (source == DataSourceKind::kSynth &&
      (synth_n_per_class < 1 || synth_classes < 2 || synth_dim < 1 ||
       !(synth_separation >= 0.0))) {
    return absl::InvalidArgumentError("invalid synthetic data parameters");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    return absl::InvalidArgumentError("test_fraction must be in (0, 1)");
  }
  for (auto s : {CheckGrid(mechanisms, "mechanisms"),
                 CheckGrid(epsilon, "epsilon"), CheckGrid(delta, "delta"),
                 CheckGrid(budget, "budget"), CheckGrid(n_train, "n_train"),
                 CheckGrid(dim, "dim"), CheckGrid(classes, "classes"),
                 CheckGrid(lambda, "lambda"), CheckGrid(ensemble, "ensemble")}) {
    if (!s.ok()) return s;
  }
  for (const std::string& m : mechanisms) {
    if (m == kNonPrivateName) continue;
    if (auto kind = ParseMechanism(m); !kind.ok()) return kind.status();
  }
  for (double e : epsilon) {
    if (!(e > 0.0)) return absl::InvalidArgumentError("epsilon must be > 0");
  }
  for (double d : delta) {
    if (!(d >= 0.0 && d < 1.0)) {
      return absl::InvalidArgumentError("delta must be in [0, 1)");
    }
  }
  for (int64_t b : budget) {
    if (b < 1) return absl::InvalidArgumentError("budget must be >= 1");
  }
  for (double l : lambda) {
    if (!(l > 0.0)) return absl::InvalidArgumentError("lambda must be > 0");
  }
  for (int t : ensemble) {
    if (t < 1) return absl::InvalidArgumentError("ensemble must be >= 1");
  }
  for (int v : n_train) {
    if (v < 0) return absl::InvalidArgumentError("n_train must be >= 0");
  }
  for (int v : dim) {
    if (v < 0) return absl::InvalidArgumentError("dim must be >= 0");
  }
  for (int v : classes) {
    if (v != 0 && v < 2) {
      return absl::InvalidArgumentError("classes must be 0 or >= 2");
    }
  }
  for (double l : lambda_selection_grid) {
    if (!(l > 0.0)) {
      return absl::InvalidArgumentError("lambda_selection_grid must be > 0");
    }
  }
  for (double c : clip_selection_grid) {
    if (!(c > 0.0)) {
      return absl::InvalidArgumentError("clip_selection_grid must be > 0");
    }
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    return absl::InvalidArgumentError("validation_fraction must be in (0, 1)");
  }
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  if (threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  if (!(dpsgd.clip > 0.0) || dpsgd.batch_size < 1 || dpsgd.steps < 1 ||
      !(dpsgd.learning_rate > 0.0)) {
    return absl::InvalidArgumentError("invalid DP-SGD options");
  }
  return absl::OkStatus();
}

absl::StatusOr<SweepConfig> ParseSweepConfig(const std::string& json_text) {
  SweepConfig cfg;
  try {
    const Json j = Json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    if (!j.is_object()) {
      return absl::InvalidArgumentError("sweep config must be a JSON object");
    }
    std::vector<std::string> unknown;
    for (const auto& [key, value] : j.items()) {
      if (!KnownKeys().count(key)) unknown.push_back(key);
    }
    if (!unknown.empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown sweep config keys: ", absl::StrJoin(unknown, ", ")));
    }
    std::string source = "synth";
    Read(j, "source", source);
    if (source == "synth") {
      cfg.source = DataSourceKind::kSynth;
    } else if (source == "idx") {
      cfg.source = DataSourceKind::kIdx;
    } else if (source == "csv") {
      cfg.source = DataSourceKind::kCsv;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown source '", source, "'"));
    }
    Read(j, "path", cfg.path);
    Read(j, "labels_path", cfg.labels_path);
    Read(j, "test_path", cfg.test_path);
    Read(j, "test_labels_path", cfg.test_labels_path);
    Read(j, "synth_n_per_class", cfg.synth_n_per_class);
    Read(j, "synth_classes", cfg.synth_classes);
    Read(j, "synth_dim", cfg.synth_dim);
    Read(j, "synth_separation", cfg.synth_separation);
    Read(j, "test_fraction", cfg.test_fraction);
    Read(j, "mechanisms", cfg.mechanisms);
    Read(j, "epsilon", cfg.epsilon);
    Read(j, "delta", cfg.delta);
    Read(j, "budget", cfg.budget);
    Read(j, "n_train", cfg.n_train);
    Read(j, "dim", cfg.dim);
    Read(j, "classes", cfg.classes);
    Read(j, "lambda", cfg.lambda);
    Read(j, "ensemble", cfg.ensemble);
    Read(j, "dpsgd_clip", cfg.dpsgd.clip);
    Read(j, "dpsgd_batch_size", cfg.dpsgd.batch_size);
    Read(j, "dpsgd_steps", cfg.dpsgd.steps);
    Read(j, "dpsgd_learning_rate", cfg.dpsgd.learning_rate);
    Read(j, "max_iterations", cfg.max_iterations);
    Read(j, "grad_tolerance", cfg.grad_tolerance);
    Read(j, "lambda_selection_grid", cfg.lambda_selection_grid);
    Read(j, "clip_selection_grid", cfg.clip_selection_grid);
    Read(j, "validation_fraction", cfg.validation_fraction);
    std::string eval = "sampled";
    Read(j, "prediction_eval", eval);
    if (eval == "sampled") {
      cfg.prediction_eval = PredictionEval::kSampled;
    } else if (eval == "full_test") {
      cfg.prediction_eval = PredictionEval::kFullTest;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown prediction_eval '", eval, "'"));
    }
    Read(j, "trials", cfg.trials);
    Read(j, "base_seed", cfg.base_seed);
    Read(j, "threads", cfg.threads);
    Read(j, "record_timing", cfg.record_timing);
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed sweep config: ", e.what()));
  }
  if (auto s = cfg.Validate(); !s.ok()) return s;
  return cfg;
}

absl::StatusOr<SweepConfig> LoadSweepConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseSweepConfig(buf.str());
}

}  // namespace dpp

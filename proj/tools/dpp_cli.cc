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

// Command-line front end.
//
//   dpp_cli train     --mechanism M [data flags] [privacy flags] --out P.json
//   dpp_cli predict   --predictor P.json --inputs X.csv [--out answers.jsonl]
//   dpp_cli sweep     --config sweep.json --out trials.csv [--summary S.csv]
//   dpp_cli verify    [--criteria 1,2,...] [--skip-slow]
//   dpp_cli calibrate --mechanism M --n-train N --classes C [privacy flags]
//
// Every status the tools report is one JSON object per line on stdout, with
// a "status" field: "ok", "refused" (inference budget exhausted) or "error".

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_split.h"
#include "dpp/accounting.h"
#include "dpp/bench.h"
#include "dpp/budget.h"
#include "dpp/mechanisms.h"
#include "dpp/predictor_io.h"
#include "dpp/sweep_config.h"
#include "dpp/trainer.h"
#include "dpp/verify.h"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

std::string StatusCodeName(const absl::Status& status) {
  return absl::StatusCodeToString(status.code());
}

void PrintStatusLine(const absl::Status& status, Json extra = Json::object()) {
  Json j;
  j["status"] = dpp::IsBudgetExhausted(status) ? "refused"
                : status.ok()                   ? "ok"
                                                : "error";
  if (!status.ok()) {
    j["code"] = StatusCodeName(status);
    j["message"] = std::string(status.message());
  }
  for (auto& [k, v] : extra.items()) j[k] = v;
  std::cout << j.dump() << std::endl;
}

int Fail(const absl::Status& status) {
  PrintStatusLine(status);
  return kExitError;
}

struct PrivacyFlags {
  double epsilon = 1.0;
  double delta = 0.0;
  int64_t budget = 1;
  double lambda = 1e-2;
  int ensemble = 256;
  dpp::DpSgdOptions dpsgd;
  uint64_t seed = 0;

  void Register(CLI::App* app) {
    app->add_option("--epsilon", epsilon, "Privacy parameter epsilon");
    app->add_option("--delta", delta, "Privacy parameter delta (0 = pure)");
    app->add_option("--budget", budget, "Inference budget B");
    app->add_option("--lambda", lambda, "L2 regularization strength");
    app->add_option("--ensemble", ensemble,
                    "Number of sub-models T (subsample_aggregate)");
    app->add_option("--clip", dpsgd.clip, "DP-SGD clipping norm");
    app->add_option("--batch-size", dpsgd.batch_size, "DP-SGD batch size");
    app->add_option("--steps", dpsgd.steps, "DP-SGD steps");
    app->add_option("--learning-rate", dpsgd.learning_rate,
                    "DP-SGD learning rate");
    app->add_option("--seed", seed, "Random seed");
  }

  dpp::MechanismSpec MakeSpec(dpp::MechanismKind kind) const {
    dpp::MechanismSpec spec;
    spec.kind = kind;
    spec.privacy = {epsilon, delta, budget};
    spec.lambda = lambda;
    spec.ensemble_size = ensemble;
    spec.dpsgd = dpsgd;
    spec.seed = seed;
    return spec;
  }
};

struct DataFlags {
  std::string source = "synth";
  std::string path;
  std::string labels_path;
  std::string test_path;
  std::string test_labels_path;
  int n_train = 0;
  int dim = 0;
  int classes = 0;
  double test_fraction = 0.2;
  int synth_n_per_class = 500;
  int synth_classes = 4;
  int synth_dim = 10;
  double synth_separation = 2.0;

  void Register(CLI::App* app) {
    app->add_option("--source", source, "synth, csv or idx")
        ->check(CLI::IsMember({"synth", "csv", "idx"}));
    app->add_option("--path", path, "CSV file or IDX image file");
    app->add_option("--labels", labels_path, "IDX label file");
    app->add_option("--test-path", test_path, "Held-out test file");
    app->add_option("--test-labels", test_labels_path,
                    "Held-out IDX label file");
    app->add_option("--n-train", n_train, "Subsample the training split");
    app->add_option("--dim", dim, "PCA dimension (0 = none)");
    app->add_option("--classes", classes, "Keep the first classes");
    app->add_option("--test-fraction", test_fraction, "Test split fraction");
    app->add_option("--synth-n-per-class", synth_n_per_class);
    app->add_option("--synth-classes", synth_classes);
    app->add_option("--synth-dim", synth_dim);
    app->add_option("--synth-separation", synth_separation);
  }

  dpp::SweepConfig MakeConfig(uint64_t seed) const {
    dpp::SweepConfig cfg;
    cfg.source = source == "idx"   ? dpp::DataSourceKind::kIdx
                 : source == "csv" ? dpp::DataSourceKind::kCsv
                                   : dpp::DataSourceKind::kSynth;
    cfg.path = path;
    cfg.labels_path = labels_path;
    cfg.test_path = test_path;
    cfg.test_labels_path = test_labels_path;
    cfg.n_train = {n_train};
    cfg.dim = {dim};
    cfg.classes = {classes};
    cfg.test_fraction = test_fraction;
    cfg.synth_n_per_class = synth_n_per_class;
    cfg.synth_classes = synth_classes;
    cfg.synth_dim = synth_dim;
    cfg.synth_separation = synth_separation;
    cfg.mechanisms = {dpp::kNonPrivateName};
    cfg.base_seed = seed;
    return cfg;
  }
};

int RunTrain(const std::string& mechanism, const DataFlags& data_flags,
             const PrivacyFlags& privacy, const std::string& out,
             const std::string& params_out) {
  auto kind = dpp::ParseMechanism(mechanism);
  if (!kind.ok()) return Fail(kind.status());
  auto data = dpp::PrepareSweepData(data_flags.MakeConfig(privacy.seed));
  if (!data.ok()) return Fail(data.status());
  const dpp::PreparedData& d = data->front();
  const dpp::MechanismSpec spec = privacy.MakeSpec(*kind);
  auto predictor = dpp::BuildPredictor(d.train, spec);
  if (!predictor.ok()) return Fail(predictor.status());
  if (auto s = dpp::SavePredictor(*predictor, out); !s.ok()) return Fail(s);

  Json extra;
  extra["mechanism"] = mechanism;
  extra["predictor"] = out;
  extra["n_train"] = d.train.size();
  extra["dim"] = d.train.dim();
  extra["classes"] = d.train.num_classes();
  auto report = dpp::Calibrate(spec, d.train.size(), d.train.num_classes());
  if (report.ok()) extra["calibration"] = Json::parse(report->ToJson());
  if (auto released = predictor->ReleasedModel(); released.ok()) {
    extra["test_accuracy"] = dpp::Accuracy(*released, d.test);
    if (!params_out.empty()) {
      if (auto s = dpp::WriteParamFile(params_out, *released); !s.ok()) {
        return Fail(s);
      }
      extra["params"] = params_out;
    }
  }
  PrintStatusLine(absl::OkStatus(), extra);
  return 0;
}

// Reads query rows from a CSV whose header names the feature columns
// f0..f{D-1}; a trailing "label" column is allowed and ignored.
absl::StatusOr<std::vector<Eigen::VectorXd>> ReadInputs(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    return absl::InvalidArgumentError(path + ": empty file");
  }
  std::vector<std::string> header = absl::StrSplit(line, ',');
  size_t dim = header.size();
  if (!header.empty() && header.back() == "label") --dim;
  std::vector<Eigen::VectorXd> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = absl::StrSplit(line, ',');
    if (fields.size() != header.size()) {
      return absl::InvalidArgumentError(path + ": line " +
                                        std::to_string(line_no) +
                                        " has the wrong number of fields");
    }
    Eigen::VectorXd x(dim);
    for (size_t i = 0; i < dim; ++i) {
      try {
        x(i) = std::stod(fields[i]);
      } catch (const std::exception&) {
        return absl::InvalidArgumentError(path + ": line " +
                                          std::to_string(line_no) +
                                          ": bad number '" + fields[i] + "'");
      }
    }
    rows.push_back(std::move(x));
  }
  return rows;
}

int RunPredict(const std::string& predictor_path, const std::string& inputs,
               const std::string& out_path, bool logits) {
  auto predictor = dpp::LoadPredictor(predictor_path);
  if (!predictor.ok()) return Fail(predictor.status());
  auto rows = ReadInputs(inputs);
  if (!rows.ok()) return Fail(rows.status());

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::trunc);
    if (!file) return Fail(absl::UnavailableError("cannot write " + out_path));
  }
  std::ostream& out = out_path.empty() ? std::cout : file;
  int refused = 0;
  for (size_t i = 0; i < rows->size(); ++i) {
    Json j;
    j["index"] = i;
    absl::Status status;
    if (logits && predictor->kind() !=
                      dpp::MechanismKind::kSubsampleAggregate) {
      auto l = predictor->PredictLogits((*rows)[i]);
      status = l.status();
      if (l.ok()) {
        Eigen::Index best = 0;
        l->maxCoeff(&best);
        j["label"] = best;
        j["logits"] = std::vector<double>(l->data(), l->data() + l->size());
      }
    } else {
      auto label = predictor->PredictLabel((*rows)[i]);
      status = label.status();
      if (label.ok()) j["label"] = *label;
    }
    if (dpp::IsBudgetExhausted(status)) ++refused;
    Json line;
    line["status"] = dpp::IsBudgetExhausted(status) ? "refused"
                     : status.ok()                   ? "ok"
                                                     : "error";
    if (!status.ok()) {
      line["code"] = StatusCodeName(status);
      line["message"] = std::string(status.message());
    }
    for (auto& [k, v] : j.items()) line[k] = v;
    out << line.dump() << '\n';
  }
  out.flush();
  // The predictor file doubles as the budget ledger.
  if (auto s = dpp::SavePredictor(*predictor, predictor_path); !s.ok()) {
    return Fail(s);
  }
  Json summary;
  summary["queries"] = rows->size();
  summary["refused"] = refused;
  const dpp::BudgetState& budget = predictor->budget();
  summary["budget_remaining"] = budget.unlimited() ? -1 : budget.remaining();
  PrintStatusLine(absl::OkStatus(), summary);
  return 0;
}

int RunSweepCommand(const std::string& config_path, const std::string& out,
                    const std::string& summary_path, CLI::App* sweep,
                    uint64_t seed, int trials, int threads, bool no_timing) {
  auto cfg = dpp::LoadSweepConfig(config_path);
  if (!cfg.ok()) return Fail(cfg.status());
  if (sweep->count("--seed")) cfg->base_seed = seed;
  if (sweep->count("--trials")) cfg->trials = trials;
  if (sweep->count("--threads")) cfg->threads = threads;
  if (no_timing) cfg->record_timing = false;
  if (auto s = cfg->Validate(); !s.ok()) return Fail(s);
  auto records = dpp::RunSweep(*cfg);
  if (!records.ok()) return Fail(records.status());
  if (auto s = dpp::EmitCsv(*records, out); !s.ok()) return Fail(s);
  std::vector<std::string> warnings;
  const auto summary = dpp::Summarize(*records, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';
  if (!summary_path.empty()) {
    if (auto s = dpp::EmitSummaryCsv(summary, summary_path); !s.ok()) {
      return Fail(s);
    }
  }
  int failed = 0;
  for (const auto& r : *records) failed += r.failed() ? 1 : 0;
  Json extra;
  extra["records"] = records->size();
  extra["failed_records"] = failed;
  extra["out"] = out;
  if (!summary_path.empty()) extra["summary"] = summary_path;
  PrintStatusLine(absl::OkStatus(), extra);
  return 0;
}

int RunVerify(const std::string& criteria, bool skip_slow) {
  std::vector<int> ids;
  if (!criteria.empty()) {
    for (const std::string& part :
         std::vector<std::string>(absl::StrSplit(criteria, ','))) {
      try {
        ids.push_back(std::stoi(part));
      } catch (const std::exception&) {
        return Fail(absl::InvalidArgumentError("bad criterion id " + part));
      }
    }
  }
  dpp::VerifyOptions options;
  options.skip_slow = skip_slow;
  bool all_passed = true;
  for (const dpp::CheckResult& r : dpp::RunChecks(ids, options)) {
    Json j;
    j["status"] = r.skipped ? "skipped" : r.passed ? "pass" : "fail";
    j["id"] = r.id;
    j["name"] = r.name;
    j["detail"] = r.detail;
    j["seconds"] = r.seconds;
    std::cout << j.dump() << std::endl;
    if (!r.skipped && !r.passed) all_passed = false;
  }
  return all_passed ? 0 : kExitCheckFailed;
}

int RunCalibrate(const std::string& mechanism, const PrivacyFlags& privacy,
                 int64_t n_train, int classes) {
  auto kind = dpp::ParseMechanism(mechanism);
  if (!kind.ok()) return Fail(kind.status());
  auto report = dpp::Calibrate(privacy.MakeSpec(*kind), n_train, classes);
  if (!report.ok()) return Fail(report.status());
  PrintStatusLine(absl::OkStatus(),
                  Json{{"calibration", Json::parse(report->ToJson())}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private linear classifiers"};
  app.require_subcommand(1);

  std::string mechanism;
  std::string out;
  std::string params_out;
  DataFlags data_flags;
  PrivacyFlags privacy;
  CLI::App* train = app.add_subcommand("train", "Train a private predictor");
  train->add_option("--mechanism", mechanism, "Mechanism name")->required();
  train->add_option("--out", out, "Predictor output file")->required();
  train->add_option("--params-out", params_out,
                    "Also write the released parameters (training-side)");
  data_flags.Register(train);
  privacy.Register(train);

  std::string predictor_path;
  std::string inputs;
  bool logits = false;
  CLI::App* predict =
      app.add_subcommand("predict", "Answer queries with a saved predictor");
  predict->add_option("--predictor", predictor_path, "Predictor file")
      ->required();
  predict->add_option("--inputs", inputs, "CSV of query rows")->required();
  predict->add_option("--out", out, "Answer file (default stdout)");
  predict->add_flag("--logits", logits, "Also report the (noisy) logits");

  std::string config_path;
  std::string summary_path;
  uint64_t seed = 0;
  int trials = 1;
  int threads = 1;
  bool no_timing = false;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("--config", config_path, "Sweep config (JSON)")
      ->required();
  sweep->add_option("--out", out, "Per-trial CSV")->required();
  sweep->add_option("--summary", summary_path, "Summary CSV");
  sweep->add_option("--seed", seed, "Override base_seed");
  sweep->add_option("--trials", trials, "Override trials");
  sweep->add_option("--threads", threads, "Override threads");
  sweep->add_flag("--no-timing", no_timing,
                  "Write wall_time_s as 0 for byte-identical output");

  std::string criteria;
  bool skip_slow = false;
  CLI::App* verify = app.add_subcommand("verify", "Run the invariant suites");
  verify->add_option("--criteria", criteria, "Comma-separated check ids");
  verify->add_flag("--skip-slow", skip_slow, "Skip the sweep reproduction");

  int64_t n_train = 0;
  int classes = 0;
  PrivacyFlags cal_privacy;
  std::string cal_mechanism;
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "Print the calibrated noise scale");
  calibrate->add_option("--mechanism", cal_mechanism, "Mechanism name")
      ->required();
  calibrate->add_option("--n-train", n_train, "Training set size")
      ->required();
  calibrate->add_option("--classes", classes, "Number of classes")
      ->required();
  cal_privacy.Register(calibrate);

  CLI11_PARSE(app, argc, argv);

  if (*train) return RunTrain(mechanism, data_flags, privacy, out, params_out);
  if (*predict) return RunPredict(predictor_path, inputs, out, logits);
  if (*sweep) {
    return RunSweepCommand(config_path, out, summary_path, sweep, seed, trials,
                           threads, no_timing);
  }
  if (*verify) return RunVerify(criteria, skip_slow);
  if (*calibrate) {
    return RunCalibrate(cal_mechanism, cal_privacy, n_train, classes);
  }
  return kExitError;
}

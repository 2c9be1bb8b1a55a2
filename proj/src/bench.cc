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

#include "dpp/bench.h"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "dpp/data.h"
#include "dpp/mechanisms.h"
#include "dpp/trainer.h"

namespace dpp {
namespace {

// Stream ids above every trial index, reserved for harness randomness.
constexpr uint64_t kDataStream = uint64_t{1} << 62;
constexpr uint64_t kSubsampleStream = kDataStream + 1;
constexpr uint64_t kValidationStream = kDataStream + 2;
constexpr uint64_t kQueryTag = uint64_t{1} << 61;
constexpr uint64_t kChunkShift = 32;

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

absl::StatusOr<LabeledDataset> LoadLabeled(const SweepConfig& cfg,
                                           const std::string& path,
                                           const std::string& labels_path) {
  absl::StatusOr<RawDataset> raw = cfg.source == DataSourceKind::kIdx
                                       ? LoadIdx(path, labels_path)
                                       : LoadCsv(path);
  if (!raw.ok()) return raw.status();
  return ToLabeled(*raw);
}

absl::StatusOr<TrainTestSplit> LoadSplit(const SweepConfig& cfg) {
  RngStream rng(cfg.base_seed, kDataStream);
  if (cfg.source == DataSourceKind::kSynth) {
    auto data = SynthBlobs(cfg.synth_n_per_class, cfg.synth_classes,
                           cfg.synth_dim, cfg.synth_separation, rng);
    if (!data.ok()) return data.status();
    return SplitTrainTest(*data, cfg.test_fraction, rng);
  }
  auto data = LoadLabeled(cfg, cfg.path, cfg.labels_path);
  if (!data.ok()) return data.status();
  if (cfg.test_path.empty()) {
    return SplitTrainTest(*data, cfg.test_fraction, rng);
  }
  auto test = LoadLabeled(cfg, cfg.test_path, cfg.test_labels_path);
  if (!test.ok()) return test.status();
  if (test->dim() != data->dim()) {
    return absl::InvalidArgumentError("train and test files differ in width");
  }
  const int classes = std::max(data->num_classes(), test->num_classes());
  auto train = LabeledDataset::CreateUnchecked(data->inputs(), data->labels(),
                                               classes);
  if (!train.ok()) return train.status();
  auto held = LabeledDataset::CreateUnchecked(test->inputs(), test->labels(),
                                              classes);
  if (!held.ok()) return held.status();
  return TrainTestSplit{*std::move(train), *std::move(held)};
}

absl::StatusOr<PreparedData> Preprocess(const TrainTestSplit& split,
                                        int n_train, int dim, int classes,
                                        uint64_t base_seed) {
  LabeledDataset train = split.train;
  LabeledDataset test = split.test;
  if (classes > 0) {
    auto tr = FilterClasses(train, classes);
    if (!tr.ok()) return tr.status();
    auto te = FilterClasses(test, classes);
    if (!te.ok()) return te.status();
    train = *std::move(tr);
    test = *std::move(te);
  }
  if (n_train > 0) {
    RngStream rng(base_seed, kSubsampleStream);
    auto sub = SubsampleTrain(train, n_train, rng);
    if (!sub.ok()) return sub.status();
    train = *std::move(sub);
  }
  if (dim > 0) {
    auto pca = PcaFitTransform(train, dim);
    if (!pca.ok()) return pca.status();
    auto te = pca->model.Transform(test);
    if (!te.ok()) return te.status();
    return PreparedData{n_train, dim, classes, std::move(pca->train),
                        *std::move(te)};
  }
  auto scaler = UnitBallScaler::Fit(train);
  if (!scaler.ok()) return scaler.status();
  auto tr = scaler->Apply(train);
  if (!tr.ok()) return tr.status();
  auto te = scaler->Apply(test);
  if (!te.ok()) return te.status();
  return PreparedData{n_train, dim, classes, *std::move(tr), *std::move(te)};
}

// Draws the B query points of one (trial, B) pair. Prediction-side
// mechanisms at the same trial and B see the same points.
std::vector<int> SampleQueries(int n_test, int64_t budget, uint64_t base_seed,
                               int trial) {
  RngStream rng(base_seed ^ (static_cast<uint64_t>(budget) *
                             0x9e3779b97f4a7c15ULL),
                kQueryTag | static_cast<uint64_t>(trial));
  std::vector<int> out;
  out.reserve(budget);
  if (budget <= n_test) {
    std::vector<int> idx(n_test);
    std::iota(idx.begin(), idx.end(), 0);
    for (int64_t i = 0; i < budget; ++i) {
      std::uniform_int_distribution<int> pick(static_cast<int>(i), n_test - 1);
      std::swap(idx[i], idx[pick(rng.engine())]);
      out.push_back(idx[i]);
    }
  } else {
    std::uniform_int_distribution<int> pick(0, n_test - 1);
    for (int64_t i = 0; i < budget; ++i) out.push_back(pick(rng.engine()));
  }
  return out;
}

// Scores `queries` with predictors produced by `make`, each answering at
// most `budget` of them.
template <typename MakePredictor>
absl::StatusOr<double> ScorePredictionSide(const LabeledDataset& test,
                                           const std::vector<int>& queries,
                                           int64_t budget,
                                           MakePredictor make) {
  int correct = 0;
  std::optional<PrivatePredictor> predictor;
  for (size_t i = 0; i < queries.size(); ++i) {
    if (i % budget == 0) {
      auto p = make(static_cast<uint64_t>(i / budget));
      if (!p.ok()) return p.status();
      predictor.emplace(*std::move(p));
    }
    const int n = queries[i];
    auto label = predictor->PredictLabel(test.inputs().row(n).transpose());
    if (!label.ok()) return label.status();
    if (*label == test.label(n)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(queries.size());
}

// Index of each record along the canonical axes, for the final sort.
using SortKey = std::array<int, 8>;

struct KeyedRecord {
  SortKey key;
  TrialRecord record;
};

struct DataLambda {
  int data = 0;
  int lambda_index = 0;
  double lambda = 0.0;
  ParamMatrix minimizer;
  absl::Status status;
};

class SweepRunner {
 public:
  SweepRunner(const SweepConfig& cfg, const std::vector<PreparedData>& data)
      : cfg_(cfg), data_(data) {}

  absl::StatusOr<std::vector<TrialRecord>> Run();

 private:
  struct Unit {
    const DataLambda* point;
    int trial;
  };

  absl::Status PrepareLambdas();
  absl::Status SelectClips();
  void RunUnit(const Unit& unit, std::vector<KeyedRecord>& out) const;
  void EmitTrainingSide(const Unit& unit, int mech_index,
                        const std::string& name, int eps_index,
                        int delta_index, double accuracy, double seconds,
                        const absl::Status& status,
                        std::vector<KeyedRecord>& out) const;
  TrialRecord BaseRecord(const Unit& unit, const std::string& name) const;

  MechanismSpec MakeSpec(MechanismKind kind, const Unit& unit, double eps,
                         double delta, int64_t budget) const;

  const SweepConfig& cfg_;
  const std::vector<PreparedData>& data_;
  std::vector<DataLambda> points_;
  // (point index, eps index, delta index) -> clip.
  std::map<std::tuple<int, int, int>, double> clips_;
};

absl::Status SweepRunner::PrepareLambdas() {
  for (size_t d = 0; d < data_.size(); ++d) {
    std::vector<double> lambdas = cfg_.lambda;
    if (!cfg_.lambda_selection_grid.empty()) {
      auto best = SelectLambda(data_[d].train, cfg_.lambda_selection_grid,
                               cfg_.validation_fraction, cfg_);
      if (!best.ok()) return best.status();
      lambdas = {*best};
    }
    for (size_t l = 0; l < lambdas.size(); ++l) {
      DataLambda p;
      p.data = static_cast<int>(d);
      p.lambda_index = static_cast<int>(l);
      p.lambda = lambdas[l];
      points_.push_back(std::move(p));
    }
  }
  // The non-private minimizer is shared by every trial of a point.
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < points_.size(); i = next++) {
      DataLambda& p = points_[i];
      TrainConfig tc;
      tc.lambda = p.lambda;
      tc.max_iterations = cfg_.max_iterations;
      tc.grad_tolerance = cfg_.grad_tolerance;
      auto theta = MinimizeErm(data_[p.data].train, tc);
      if (theta.ok()) {
        p.minimizer = *std::move(theta);
      } else {
        p.status = theta.status();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(cfg_.threads, points_.size());
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return absl::OkStatus();
}

absl::Status SweepRunner::SelectClips() {
  if (cfg_.clip_selection_grid.empty()) return absl::OkStatus();
  if (std::find(cfg_.mechanisms.begin(), cfg_.mechanisms.end(),
                MechanismName(MechanismKind::kDpSgd)) ==
      cfg_.mechanisms.end()) {
    return absl::OkStatus();
  }
  for (size_t i = 0; i < points_.size(); ++i) {
    const PreparedData& d = data_[points_[i].data];
    RngStream split_rng(cfg_.base_seed, kValidationStream);
    auto folds = SplitTrainTest(d.train, cfg_.validation_fraction, split_rng);
    if (!folds.ok()) return folds.status();
    for (size_t e = 0; e < cfg_.epsilon.size(); ++e) {
      for (size_t dl = 0; dl < cfg_.delta.size(); ++dl) {
        double best_clip = cfg_.dpsgd.clip;
        double best_acc = -1.0;
        for (double clip : cfg_.clip_selection_grid) {
          MechanismSpec spec;
          spec.kind = MechanismKind::kDpSgd;
          spec.privacy = {cfg_.epsilon[e], cfg_.delta[dl], 1};
          spec.lambda = points_[i].lambda;
          spec.dpsgd = cfg_.dpsgd;
          spec.dpsgd.clip = clip;
          spec.seed = cfg_.base_seed;
          spec.stream_id = kValidationStream;
          auto p = TrainDpSgd(folds->train, spec);
          if (!p.ok()) continue;
          const double acc = Accuracy(*p->ReleasedModel(), folds->test);
          if (acc > best_acc) {
            best_acc = acc;
            best_clip = clip;
          }
        }
        clips_[{static_cast<int>(i), static_cast<int>(e),
                static_cast<int>(dl)}] = best_clip;
      }
    }
  }
  return absl::OkStatus();
}

TrialRecord SweepRunner::BaseRecord(const Unit& unit,
                                    const std::string& name) const {
  const PreparedData& d = data_[unit.point->data];
  TrialRecord r;
  r.mechanism = name;
  r.n_train = d.train.size();
  r.dim = d.train.dim();
  r.classes = d.train.num_classes();
  r.lambda = unit.point->lambda;
  r.trial = unit.trial;
  r.seed = cfg_.base_seed;
  return r;
}

MechanismSpec SweepRunner::MakeSpec(MechanismKind kind, const Unit& unit,
                                    double eps, double delta,
                                    int64_t budget) const {
  MechanismSpec spec;
  spec.kind = kind;
  spec.privacy = {eps, delta, budget};
  spec.lambda = unit.point->lambda;
  spec.dpsgd = cfg_.dpsgd;
  spec.max_iterations = cfg_.max_iterations;
  spec.grad_tolerance = cfg_.grad_tolerance;
  spec.seed = cfg_.base_seed;
  spec.stream_id = static_cast<uint64_t>(unit.trial);
  return spec;
}

// Training-side results do not depend on B; one trained model is scored
// once and replicated along the budget axis.
void SweepRunner::EmitTrainingSide(const Unit& unit, int mech_index,
                                   const std::string& name, int eps_index,
                                   int delta_index, double accuracy,
                                   double seconds, const absl::Status& status,
                                   std::vector<KeyedRecord>& out) const {
  for (size_t b = 0; b < cfg_.budget.size(); ++b) {
    TrialRecord r = BaseRecord(unit, name);
    r.epsilon = cfg_.epsilon[eps_index];
    r.delta = cfg_.delta[delta_index];
    r.budget = cfg_.budget[b];
    r.wall_time_s = cfg_.record_timing ? seconds : 0.0;
    if (status.ok()) {
      r.accuracy = accuracy;
    } else {
      r.accuracy = std::numeric_limits<double>::quiet_NaN();
      r.error = std::string(status.message());
      if (r.error.empty()) r.error = status.ToString();
    }
    out.push_back({{unit.point->data, mech_index, unit.point->lambda_index,
                    eps_index, delta_index, static_cast<int>(b), 0,
                    unit.trial},
                   std::move(r)});
  }
}

void SweepRunner::RunUnit(const Unit& unit,
                          std::vector<KeyedRecord>& out) const {
  const PreparedData& d = data_[unit.point->data];
  const ParamMatrix& minimizer = unit.point->minimizer;
  const absl::Status& minimizer_status = unit.point->status;
  const int n_train = d.train.size();
  const int classes = d.train.num_classes();
  const int n_eps = static_cast<int>(cfg_.epsilon.size());
  const int n_delta = static_cast<int>(cfg_.delta.size());

  for (size_t m = 0; m < cfg_.mechanisms.size(); ++m) {
    const std::string& name = cfg_.mechanisms[m];
    const int mi = static_cast<int>(m);

    if (name == kNonPrivateName) {
      const double acc = minimizer_status.ok() ? Accuracy(minimizer, d.test)
                                               : 0.0;
      for (int e = 0; e < n_eps; ++e) {
        for (int dl = 0; dl < n_delta; ++dl) {
          EmitTrainingSide(unit, mi, name, e, dl, acc, 0.0, minimizer_status,
                           out);
        }
      }
      continue;
    }
    const MechanismKind kind = *ParseMechanism(name);

    if (!IsPredictionSide(kind)) {
      for (int e = 0; e < n_eps; ++e) {
        for (int dl = 0; dl < n_delta; ++dl) {
          const auto start = Clock::now();
          MechanismSpec spec =
              MakeSpec(kind, unit, cfg_.epsilon[e], cfg_.delta[dl], 1);
          absl::StatusOr<PrivatePredictor> p;
          if (kind == MechanismKind::kModelSensitivity) {
            p = minimizer_status.ok()
                    ? ModelSensitivityFromMinimizer(minimizer, n_train,
                                                    classes, spec)
                    : absl::StatusOr<PrivatePredictor>(minimizer_status);
          } else {
            if (kind == MechanismKind::kDpSgd) {
              auto it = clips_.find({static_cast<int>(unit.point - points_.data()),
                                     e, dl});
              if (it != clips_.end()) spec.dpsgd.clip = it->second;
            }
            p = BuildPredictor(d.train, spec);
          }
          double acc = 0.0;
          absl::Status status = p.status();
          if (p.ok()) acc = Accuracy(*p->ReleasedModel(), d.test);
          EmitTrainingSide(unit, mi, name, e, dl, acc, Seconds(start), status,
                           out);
        }
      }
      continue;
    }

    // Prediction-side: every (eps, delta, B) is its own predictor. For
    // subsample-and-aggregate the ensemble of a (trial, T) is trained once.
    const std::vector<int> ensemble_axis =
        kind == MechanismKind::kSubsampleAggregate ? cfg_.ensemble
                                                   : std::vector<int>{0};
    for (size_t t = 0; t < ensemble_axis.size(); ++t) {
      const int ensemble_size = ensemble_axis[t];
      absl::StatusOr<std::vector<ParamMatrix>> ensemble =
          std::vector<ParamMatrix>{};
      double ensemble_seconds = 0.0;
      if (kind == MechanismKind::kSubsampleAggregate) {
        const auto start = Clock::now();
        MechanismSpec spec = MakeSpec(kind, unit, 1.0, 0.0, 1);
        spec.ensemble_size = ensemble_size;
        RngStream partition_rng = EnsemblePartitionStream(spec);
        ensemble = TrainEnsemble(d.train, spec, partition_rng);
        ensemble_seconds = Seconds(start);
      }
      for (int e = 0; e < n_eps; ++e) {
        for (int dl = 0; dl < n_delta; ++dl) {
          for (size_t b = 0; b < cfg_.budget.size(); ++b) {
            const auto start = Clock::now();
            const int64_t budget = cfg_.budget[b];
            MechanismSpec spec =
                MakeSpec(kind, unit, cfg_.epsilon[e], cfg_.delta[dl], budget);
            spec.ensemble_size = std::max(1, ensemble_size);
            std::vector<int> queries;
            if (cfg_.prediction_eval == PredictionEval::kSampled) {
              queries = SampleQueries(d.test.size(), budget, cfg_.base_seed,
                                      unit.trial);
            } else {
              queries.resize(d.test.size());
              std::iota(queries.begin(), queries.end(), 0);
            }
            auto make = [&](uint64_t chunk)
                -> absl::StatusOr<PrivatePredictor> {
              MechanismSpec s = spec;
              s.stream_id |= chunk << kChunkShift;
              if (kind == MechanismKind::kSubsampleAggregate) {
                if (!ensemble.ok()) return ensemble.status();
                return SubsampleFromEnsemble(*ensemble, n_train, s);
              }
              if (!minimizer_status.ok()) return minimizer_status;
              return PredictionSensitivityFromMinimizer(minimizer, n_train,
                                                        classes, s);
            };
            absl::StatusOr<double> acc =
                ScorePredictionSide(d.test, queries, budget, make);
            TrialRecord r = BaseRecord(unit, name);
            r.epsilon = cfg_.epsilon[e];
            r.delta = cfg_.delta[dl];
            r.budget = budget;
            r.ensemble = ensemble_size;
            r.wall_time_s =
                cfg_.record_timing ? Seconds(start) + ensemble_seconds : 0.0;
            if (acc.ok()) {
              r.accuracy = *acc;
            } else {
              r.accuracy = std::numeric_limits<double>::quiet_NaN();
              r.error = std::string(acc.status().message());
            }
            out.push_back({{unit.point->data, mi, unit.point->lambda_index, e,
                            dl, static_cast<int>(b), static_cast<int>(t),
                            unit.trial},
                           std::move(r)});
          }
        }
      }
    }
  }
}

absl::StatusOr<std::vector<TrialRecord>> SweepRunner::Run() {
  if (auto s = PrepareLambdas(); !s.ok()) return s;
  if (auto s = SelectClips(); !s.ok()) return s;

  std::vector<Unit> units;
  for (const DataLambda& p : points_) {
    for (int trial = 0; trial < cfg_.trials; ++trial) {
      units.push_back({&p, trial});
    }
  }
  std::vector<std::vector<KeyedRecord>> results(units.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < units.size(); i = next++) {
      RunUnit(units[i], results[i]);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(cfg_.threads, units.size());
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<KeyedRecord> all;
  for (auto& r : results) {
    std::move(r.begin(), r.end(), std::back_inserter(all));
  }
  std::sort(all.begin(), all.end(),
            [](const KeyedRecord& a, const KeyedRecord& b) {
              return a.key < b.key;
            });
  std::vector<TrialRecord> out;
  out.reserve(all.size());
  for (auto& k : all) out.push_back(std::move(k.record));
  return out;
}

bool SameGroup(const TrialRecord& a, const SummaryRecord& s) {
  return a.mechanism == s.mechanism && a.epsilon == s.epsilon &&
         a.delta == s.delta && a.budget == s.budget &&
         a.n_train == s.n_train && a.dim == s.dim && a.classes == s.classes &&
         a.lambda == s.lambda && a.ensemble == s.ensemble;
}

template <typename T>
absl::Status ParseNumber(std::string_view field, T& out) {
  if constexpr (std::is_floating_point_v<T>) {
    if (field == "nan") {
      out = std::numeric_limits<T>::quiet_NaN();
      return absl::OkStatus();
    }
  }
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad numeric field '", std::string(field), "'"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::vector<PreparedData>> PrepareSweepData(
    const SweepConfig& cfg) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  auto split = LoadSplit(cfg);
  if (!split.ok()) return split.status();
  std::vector<PreparedData> out;
  for (int n : cfg.n_train) {
    for (int dim : cfg.dim) {
      for (int c : cfg.classes) {
        auto prepared = Preprocess(*split, n, dim, c, cfg.base_seed);
        if (!prepared.ok()) {
          return absl::Status(
              prepared.status().code(),
              absl::StrCat("n_train=", n, " dim=", dim, " classes=", c, ": ",
                           prepared.status().message()));
        }
        out.push_back(*std::move(prepared));
      }
    }
  }
  return out;
}

absl::StatusOr<double> SelectLambda(const LabeledDataset& train,
                                    const std::vector<double>& grid,
                                    double validation_fraction,
                                    const SweepConfig& cfg) {
  if (grid.empty()) return absl::InvalidArgumentError("empty lambda grid");
  RngStream rng(cfg.base_seed, kValidationStream);
  auto folds = SplitTrainTest(train, validation_fraction, rng);
  if (!folds.ok()) return folds.status();
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  double best = sorted.front();
  double best_acc = -1.0;
  for (double lambda : sorted) {
    TrainConfig tc;
    tc.lambda = lambda;
    tc.max_iterations = cfg.max_iterations;
    tc.grad_tolerance = cfg.grad_tolerance;
    auto theta = MinimizeErm(folds->train, tc);
    if (!theta.ok()) continue;
    const double acc = Accuracy(*theta, folds->test);
    if (acc > best_acc) {
      best_acc = acc;
      best = lambda;
    }
  }
  if (best_acc < 0.0) {
    return absl::AbortedError("no lambda in the grid converged");
  }
  return best;
}

absl::StatusOr<std::vector<TrialRecord>> RunSweep(const SweepConfig& cfg) {
  auto data = PrepareSweepData(cfg);
  if (!data.ok()) return data.status();
  SweepRunner runner(cfg, *data);
  return runner.Run();
}

std::vector<SummaryRecord> Summarize(const std::vector<TrialRecord>& records,
                                     std::vector<std::string>* warnings) {
  std::vector<SummaryRecord> groups;
  std::vector<std::vector<double>> values;
  for (const TrialRecord& r : records) {
    size_t g = 0;
    while (g < groups.size() && !SameGroup(r, groups[g])) ++g;
    if (g == groups.size()) {
      SummaryRecord s;
      s.mechanism = r.mechanism;
      s.epsilon = r.epsilon;
      s.delta = r.delta;
      s.budget = r.budget;
      s.n_train = r.n_train;
      s.dim = r.dim;
      s.classes = r.classes;
      s.lambda = r.lambda;
      s.ensemble = r.ensemble;
      groups.push_back(s);
      values.emplace_back();
    }
    if (!r.failed() && std::isfinite(r.accuracy)) {
      values[g].push_back(r.accuracy);
    }
  }
  std::vector<SummaryRecord> out;
  for (size_t g = 0; g < groups.size(); ++g) {
    const std::vector<double>& v = values[g];
    SummaryRecord s = groups[g];
    if (v.empty()) {
      if (warnings != nullptr) {
        warnings->push_back(absl::StrCat(
            "no successful trials for ", s.mechanism, " epsilon=",
            FormatDouble(s.epsilon), " delta=", FormatDouble(s.delta),
            " budget=", s.budget, "; group omitted"));
      }
      continue;
    }
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    s.mean_accuracy = mean;
    s.std_accuracy = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.n_trials = static_cast<int>(v.size());
    out.push_back(s);
  }
  return out;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void WriteTrialCsv(const std::vector<TrialRecord>& records,
                   std::ostream& out) {
  out << kTrialCsvHeader << '\n';
  for (const TrialRecord& r : records) {
    out << r.mechanism << ',' << FormatDouble(r.epsilon) << ','
        << FormatDouble(r.delta) << ',' << r.budget << ',' << r.n_train << ','
        << r.dim << ',' << r.classes << ',' << FormatDouble(r.lambda) << ','
        << r.ensemble << ',' << r.trial << ',' << r.seed << ','
        << FormatDouble(r.accuracy) << ',' << FormatDouble(r.wall_time_s)
        << '\n';
  }
}

void WriteSummaryCsv(const std::vector<SummaryRecord>& rows,
                     std::ostream& out) {
  out << kSummaryCsvHeader << '\n';
  for (const SummaryRecord& s : rows) {
    out << s.mechanism << ',' << FormatDouble(s.epsilon) << ','
        << FormatDouble(s.delta) << ',' << s.budget << ',' << s.n_train << ','
        << s.dim << ',' << s.classes << ',' << FormatDouble(s.lambda) << ','
        << s.ensemble << ',' << FormatDouble(s.mean_accuracy) << ','
        << FormatDouble(s.std_accuracy) << ',' << s.n_trials << '\n';
  }
}

namespace {

template <typename Writer>
absl::Status WriteFile(const std::string& path, Writer write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  write(out);
  out.flush();
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

}  // namespace

absl::Status EmitCsv(const std::vector<TrialRecord>& records,
                     const std::string& path) {
  return WriteFile(path,
                   [&](std::ostream& out) { WriteTrialCsv(records, out); });
}

absl::Status EmitSummaryCsv(const std::vector<SummaryRecord>& rows,
                            const std::string& path) {
  return WriteFile(path,
                   [&](std::ostream& out) { WriteSummaryCsv(rows, out); });
}

absl::StatusOr<std::vector<TrialRecord>> ParseTrialCsv(
    const std::string& text) {
  std::vector<std::string> lines =
      absl::StrSplit(text, '\n', absl::SkipEmpty());
  if (lines.empty() || lines.front() != kTrialCsvHeader) {
    return absl::InvalidArgumentError("missing trial CSV header");
  }
  std::vector<TrialRecord> out;
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> f = absl::StrSplit(lines[i], ',');
    if (f.size() != 13) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", i + 1, " has ", f.size(), " fields"));
    }
    TrialRecord r;
    r.mechanism = f[0];
    for (auto s : {ParseNumber(f[1], r.epsilon), ParseNumber(f[2], r.delta),
                   ParseNumber(f[3], r.budget), ParseNumber(f[4], r.n_train),
                   ParseNumber(f[5], r.dim), ParseNumber(f[6], r.classes),
                   ParseNumber(f[7], r.lambda), ParseNumber(f[8], r.ensemble),
                   ParseNumber(f[9], r.trial), ParseNumber(f[10], r.seed),
                   ParseNumber(f[11], r.accuracy),
                   ParseNumber(f[12], r.wall_time_s)}) {
      if (!s.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat("line ", i + 1, ": ", s.message()));
      }
    }
    if (std::isnan(r.accuracy)) r.error = "failed";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dpp

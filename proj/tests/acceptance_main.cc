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


// Acceptance run: executes every release check and prints one line per
// check, then exits non-zero if any check failed. Check 10 needs the MNIST
// IDX files; point DPP_MNIST_DIR at a directory holding them (gzipped or
// not) to run it, otherwise it is reported as skipped.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dpp/data.h"
#include "dpp/trainer.h"
#include "dpp/verify.h"

namespace {

std::string FindIdx(const std::filesystem::path& dir, const std::string& stem) {
  for (const char* suffix : {"", ".gz"}) {
    const std::filesystem::path p = dir / (stem + suffix);
    if (std::filesystem::exists(p)) return p.string();
  }
  return "";
}

// Non-private multi-class logistic regression on the full training set,
// scored on the 10000 test images; passes at >= 0.90 accuracy.
void RunMnistBaseline(int& failed) {
  const char* dir = std::getenv("DPP_MNIST_DIR");
  if (dir == nullptr) {
    std::printf(
        "CRITERION 10 SKIP: full MNIST baseline -- set DPP_MNIST_DIR to a "
        "directory with the four MNIST IDX files to run it\n");
    return;
  }
  const auto start = std::chrono::steady_clock::now();
  const std::string paths[] = {FindIdx(dir, "train-images-idx3-ubyte"),
                               FindIdx(dir, "train-labels-idx1-ubyte"),
                               FindIdx(dir, "t10k-images-idx3-ubyte"),
                               FindIdx(dir, "t10k-labels-idx1-ubyte")};
  for (const std::string& p : paths) {
    if (p.empty()) {
      std::printf("CRITERION 10 FAIL: full MNIST baseline -- missing IDX "
                  "files in %s\n", dir);
      ++failed;
      return;
    }
  }
  auto fail = [&](const absl::Status& s) {
    std::printf("CRITERION 10 FAIL: full MNIST baseline -- %s\n",
                s.ToString().c_str());
    ++failed;
  };
  auto train_raw = dpp::LoadIdx(paths[0], paths[1]);
  if (!train_raw.ok()) return fail(train_raw.status());
  auto test_raw = dpp::LoadIdx(paths[2], paths[3]);
  if (!test_raw.ok()) return fail(test_raw.status());
  auto train = dpp::ToLabeled(*train_raw);
  if (!train.ok()) return fail(train.status());
  auto test = dpp::ToLabeled(*test_raw);
  if (!test.ok()) return fail(test.status());
  auto scaler = dpp::UnitBallScaler::Fit(*train);
  if (!scaler.ok()) return fail(scaler.status());
  auto train_scaled = scaler->Apply(*train);
  if (!train_scaled.ok()) return fail(train_scaled.status());
  auto test_scaled = scaler->Apply(*test);
  if (!test_scaled.ok()) return fail(test_scaled.status());
  dpp::TrainConfig cfg;
  cfg.lambda = 1e-5;
  cfg.max_iterations = 1000;
  cfg.grad_tolerance = 1e-6;
  auto theta = dpp::MinimizeErm(*train_scaled, cfg);
  if (!theta.ok()) return fail(theta.status());
  const double accuracy = dpp::Accuracy(*theta, *test_scaled);
  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - start)
                             .count();
  const bool passed = accuracy >= 0.90;
  if (!passed) ++failed;
  std::printf("CRITERION 10 %s: full MNIST baseline (%.2f s) -- test "
              "accuracy %.4f (threshold 0.90)\n",
              passed ? "PASS" : "FAIL", seconds, accuracy);
}

}  // namespace

int main() {
  dpp::VerifyOptions options;
  const std::vector<dpp::CheckResult> results =
      dpp::RunChecks({1, 2, 3, 4, 5, 6, 7, 8, 9}, options);
  int failed = 0;
  for (const dpp::CheckResult& r : results) {
    const char* verdict = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
    if (!r.skipped && !r.passed) ++failed;
    std::printf("CRITERION %d %s: %s (%.2f s, limit %.0f s) -- %s\n", r.id,
                verdict, r.name.c_str(), r.seconds, r.time_limit_s,
                r.detail.c_str());
  }
  RunMnistBaseline(failed);
  std::printf("%d check(s) failed\n", failed);
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}

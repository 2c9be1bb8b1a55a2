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

// End-to-end invariant suites: loss constants, sensitivity, calibration,
// samplers, vote sampling, accounting, composition, budget enforcement and
// the qualitative privacy/accuracy trade-off sweep. Each check has a fixed
// seed, so its verdict is reproducible.

#ifndef DPP_VERIFY_H_
#define DPP_VERIFY_H_

#include <string>
#include <vector>

#include "dpp/bench.h"
#include "dpp/sweep_config.h"

namespace dpp {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
  double time_limit_s = 0.0;  // exceeded limits fail the check
};

struct VerifyOptions {
  bool skip_slow = false;  // skips the trade-off sweep
  int threads = 1;
};

// 1: loss gradient/Hessian bounds and finite differences.
CheckResult CheckLossConstants();
// 2: empirical minimizer sensitivity on neighboring datasets.
CheckResult CheckEmpiricalSensitivity();
// 3: tightness of the analytic Gaussian calibration.
CheckResult CheckCalibrationTightness();
// 4: radial-exponential and Gaussian norm distributions.
CheckResult CheckSamplerDistributions();
// 5: vote sampling frequencies against closed form.
CheckResult CheckVoteSampling();
// 6: accountant round trip, q = 1 reduction and monotonicity.
CheckResult CheckAccountant();
// 7: per-query beta scaling with B.
CheckResult CheckCompositionScaling();
// 8: budget enforcement for every mechanism.
CheckResult CheckBudgetEnforcement();
// 9: accuracy trends over epsilon and B on synthetic data.
CheckResult CheckTradeoffSweep(const VerifyOptions& options);

// The sweep behind check 9.
SweepConfig TradeoffSweepConfig();

// Trend assertions of check 9 on summarized sweep output; appends one line
// per violated property to `failures`.
void AnalyzeTradeoff(const std::vector<SummaryRecord>& summary,
                     std::vector<std::string>& failures);

// Runs the checks with the given ids (all when empty).
std::vector<CheckResult> RunChecks(const std::vector<int>& ids,
                                   const VerifyOptions& options);

// Kolmogorov-Smirnov statistic and asymptotic p-value of `samples` against a
// continuous CDF.
struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};
template <typename Cdf>
KsResult KolmogorovSmirnov(std::vector<double> samples, Cdf cdf);
double KolmogorovPValue(double statistic, size_t n);

}  // namespace dpp

#include "dpp/verify_inl.h"  // IWYU pragma: export

#endif  // DPP_VERIFY_H_

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

#ifndef DPP_BUDGET_H_
#define DPP_BUDGET_H_

#include <atomic>
#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dpp {

// Counts answered queries against an inference budget. Consume() is atomic:
// concurrent callers observe a total order and at most `budget` of them
// succeed. Once exhausted every further call is refused and the counter stays
// at `budget`.
class BudgetState {
 public:
  static BudgetState Unlimited() { return BudgetState(); }
  static absl::StatusOr<BudgetState> Limited(int64_t budget,
                                             int64_t used = 0);

  BudgetState(const BudgetState& other);
  BudgetState& operator=(const BudgetState& other);

  // Ok, or ResourceExhausted when no budget is left.
  absl::Status Consume();

  bool unlimited() const { return budget_ < 0; }
  int64_t budget() const { return budget_; }
  int64_t used() const { return used_.load(); }
  int64_t remaining() const;

 private:
  BudgetState() = default;
  BudgetState(int64_t budget, int64_t used) : budget_(budget), used_(used) {}

  int64_t budget_ = -1;
  std::atomic<int64_t> used_{0};
};

// True for the refusal status returned by Consume().
bool IsBudgetExhausted(const absl::Status& status);

}  // namespace dpp

#endif  // DPP_BUDGET_H_

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

#include "dpp/budget.h"

#include "absl/strings/str_cat.h"

namespace dpp {

absl::StatusOr<BudgetState> BudgetState::Limited(int64_t budget,
                                                 int64_t used) {
  if (budget < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("inference budget must be >= 1, got ", budget));
  }
  if (used < 0 || used > budget) {
    return absl::InvalidArgumentError(
        absl::StrCat("used count ", used, " outside [0, ", budget, "]"));
  }
  return BudgetState(budget, used);
}

BudgetState::BudgetState(const BudgetState& other)
    : budget_(other.budget_), used_(other.used_.load()) {}

BudgetState& BudgetState::operator=(const BudgetState& other) {
  budget_ = other.budget_;
  used_.store(other.used_.load());
  return *this;
}

absl::Status BudgetState::Consume() {
  if (unlimited()) {
    used_.fetch_add(1);
    return absl::OkStatus();
  }
  int64_t current = used_.load();
  while (current < budget_) {
    if (used_.compare_exchange_weak(current, current + 1)) {
      return absl::OkStatus();
    }
  }
  return absl::ResourceExhaustedError(
      absl::StrCat("inference budget of ", budget_, " queries exhausted"));
}

int64_t BudgetState::remaining() const {
  if (unlimited()) return -1;
  return budget_ - used_.load();
}

bool IsBudgetExhausted(const absl::Status& status) {
  return absl::IsResourceExhausted(status);
}

}  // namespace dpp

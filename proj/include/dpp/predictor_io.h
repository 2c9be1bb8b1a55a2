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

// JSON persistence of a PrivatePredictor: kind, privacy spec, parameters,
// noise calibration, budget used so far and the RNG position. Loading a saved
// predictor and querying it continues exactly where the saved one stopped.
// The file is the budget ledger: callers must write it back after every
// session, and reloading a stale copy would replay spent budget.

#ifndef DPP_PREDICTOR_IO_H_
#define DPP_PREDICTOR_IO_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpp/mechanisms.h"

namespace dpp {

std::string SerializePredictor(const PrivatePredictor& predictor);
absl::StatusOr<PrivatePredictor> DeserializePredictor(const std::string& text);

absl::Status SavePredictor(const PrivatePredictor& predictor,
                           const std::string& path);
absl::StatusOr<PrivatePredictor> LoadPredictor(const std::string& path);

}  // namespace dpp

#endif  // DPP_PREDICTOR_IO_H_

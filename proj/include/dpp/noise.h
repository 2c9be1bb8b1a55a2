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

// Noise samplers shared by every mechanism.
//
// None of these samplers are hardened against floating-point side channels;
// they are meant for experiments, not for deployment.

#ifndef DPP_NOISE_H_
#define DPP_NOISE_H_

#include <cstdint>
#include <random>
#include <string>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace dpp {

struct NoiseShape {
  int rows = 1;
  int cols = 1;
};

// A reproducible random stream. Identical (seed, stream_id) pairs produce
// identical sequences; distinct stream ids give statistically independent
// sequences for parallel trials.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }
  std::mt19937_64& engine() { return engine_; }

  double Uniform();        // [0, 1)
  double StandardNormal();
  // Same sequence as n calls to StandardNormal().
  void FillStandardNormal(double* out, int64_t n);

  // Full engine state, for persisting a predictor between invocations.
  std::string SerializeState() const;
  absl::Status RestoreState(const std::string& state);

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  std::mt19937_64 engine_;
};

// Samples B with density proportional to exp(-beta ||B||_F) as r * U, where
// r ~ Gamma(rows * cols, rate beta) and U is uniform on the unit sphere.
// The radius is drawn as Gamma(n, 1) / beta, so for a fixed stream the sample
// scales exactly as 1 / beta.
absl::StatusOr<Eigen::MatrixXd> SampleRadialExponential(NoiseShape shape,
                                                        double beta,
                                                        RngStream& rng);

// i.i.d. N(0, sigma^2) entries.
absl::StatusOr<Eigen::MatrixXd> SampleGaussian(NoiseShape shape, double sigma,
                                               RngStream& rng);

}  // namespace dpp

#endif  // DPP_NOISE_H_

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

#include "dpp/noise.h"

#include <cmath>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "boost/random/normal_distribution.hpp"

namespace dpp {
namespace {

std::seed_seq MakeSeedSeq(uint64_t seed, uint64_t stream_id) {
  return std::seed_seq{static_cast<uint32_t>(seed),
                       static_cast<uint32_t>(seed >> 32),
                       static_cast<uint32_t>(stream_id),
                       static_cast<uint32_t>(stream_id >> 32),
                       0x9e3779b9u};
}

absl::Status CheckShape(NoiseShape shape) {
  if (shape.rows < 1 || shape.cols < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "noise shape ", shape.rows, "x", shape.cols, " is empty"));
  }
  return absl::OkStatus();
}

}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::seed_seq seq = MakeSeedSeq(seed, stream_id);
  engine_.seed(seq);
}

double RngStream::Uniform() {
  return std::generate_canonical<double, 53>(engine_);
}

// Ziggurat sampler: stateless between calls, so the engine alone is the
// stream position.
double RngStream::StandardNormal() {
  boost::random::normal_distribution<double> normal;
  return normal(engine_);
}

void RngStream::FillStandardNormal(double* out, int64_t n) {
  boost::random::normal_distribution<double> normal;
  for (int64_t i = 0; i < n; ++i) out[i] = normal(engine_);
}

std::string RngStream::SerializeState() const {
  std::ostringstream out;
  out << engine_;
  return out.str();
}

absl::Status RngStream::RestoreState(const std::string& state) {
  std::istringstream in(state);
  std::mt19937_64 engine;
  in >> engine;
  if (in.fail()) {
    return absl::InvalidArgumentError("malformed RNG state");
  }
  engine_ = engine;
  return absl::OkStatus();
}

absl::StatusOr<Eigen::MatrixXd> SampleRadialExponential(NoiseShape shape,
                                                        double beta,
                                                        RngStream& rng) {
  if (auto s = CheckShape(shape); !s.ok()) return s;
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be positive and finite, got ", beta));
  }
  const int n = shape.rows * shape.cols;
  Eigen::MatrixXd direction(shape.rows, shape.cols);
  double norm = 0.0;
  // A zero vector has probability zero but is cheap to rule out.
  while (norm == 0.0) {
    rng.FillStandardNormal(direction.data(), n);
    norm = direction.norm();
  }
  std::gamma_distribution<double> radius_dist(static_cast<double>(n), 1.0);
  const double radius = radius_dist(rng.engine()) / beta;
  return direction * (radius / norm);
}

absl::StatusOr<Eigen::MatrixXd> SampleGaussian(NoiseShape shape, double sigma,
                                               RngStream& rng) {
  if (auto s = CheckShape(shape); !s.ok()) return s;
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be positive and finite, got ", sigma));
  }
  Eigen::MatrixXd out(shape.rows, shape.cols);
  rng.FillStandardNormal(out.data(), out.size());
  out *= sigma;
  return out;
}

}  // namespace dpp

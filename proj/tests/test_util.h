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


// Status helpers shared by the unit tests.

#ifndef DPP_TESTS_TEST_UTIL_H_
#define DPP_TESTS_TEST_UTIL_H_

#include <string>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpp/dataset.h"
#include "dpp/noise.h"
#include "gtest/gtest.h"

#define DPP_CONCAT_INNER_(a, b) a##b
#define DPP_CONCAT_(a, b) DPP_CONCAT_INNER_(a, b)

#define ASSERT_OK(expr)                                  \
  do {                                                   \
    const absl::Status dpp_status_ = ::dpp::ToStatus(expr); \
    ASSERT_TRUE(dpp_status_.ok()) << dpp_status_;        \
  } while (0)

#define EXPECT_OK(expr) EXPECT_TRUE(::dpp::ToStatus(expr).ok()) << ::dpp::ToStatus(expr)

#define ASSERT_OK_AND_ASSIGN(lhs, rexpr) \
  ASSERT_OK_AND_ASSIGN_IMPL_(DPP_CONCAT_(dpp_statusor_, __LINE__), lhs, rexpr)

#define ASSERT_OK_AND_ASSIGN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                               \
  ASSERT_TRUE(statusor.ok()) << statusor.status();       \
  lhs = *std::move(statusor)

#define EXPECT_STATUS_CODE(expr, expected_code) \
  EXPECT_EQ(::dpp::ToStatus(expr).code(), (expected_code)) << ::dpp::ToStatus(expr)

namespace dpp {

inline absl::Status ToStatus(const absl::Status& status) { return status; }

template <typename T>
absl::Status ToStatus(const absl::StatusOr<T>& status_or) {
  return status_or.status();
}

// Gaussian blobs inside the unit ball, labels c = n mod C.
inline LabeledDataset MakeBlobs(int n, int dim, int classes, uint64_t seed) {
  RngStream rng(seed, 0);
  Eigen::MatrixXd anchors(classes, dim);
  for (int c = 0; c < classes; ++c) {
    for (int j = 0; j < dim; ++j) anchors(c, j) = rng.StandardNormal();
    anchors.row(c).normalize();
  }
  Eigen::MatrixXd x(n, dim);
  std::vector<int> y(n);
  for (int i = 0; i < n; ++i) {
    y[i] = i % classes;
    for (int j = 0; j < dim; ++j) {
      x(i, j) = 0.5 * anchors(y[i], j) + 0.3 * rng.StandardNormal();
    }
    const double norm = x.row(i).norm();
    if (norm > 1.0) x.row(i) /= norm;
  }
  return *LabeledDataset::Create(std::move(x), std::move(y), classes);
}

inline std::string TestDataPath(const std::string& name) {
  return std::string(DPP_TEST_DATA_DIR) + "/" + name;
}

}  // namespace dpp

#endif  // DPP_TESTS_TEST_UTIL_H_

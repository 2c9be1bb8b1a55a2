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

#include "dpp/data.h"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "Eigen/Eigenvalues"
#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace dpp {
namespace {

constexpr uint8_t kIdxUnsignedByte = 0x08;

// Whole file, transparently gunzipped.
absl::StatusOr<std::vector<uint8_t>> ReadMaybeGzip(const std::string& path) {
  gzFile file = gzopen(path.c_str(), "rb");
  if (file == nullptr) {
    return absl::NotFoundError(absl::StrCat("cannot open ", path));
  }
  std::vector<uint8_t> bytes;
  uint8_t buffer[1 << 16];
  int n = 0;
  while ((n = gzread(file, buffer, sizeof(buffer))) > 0) {
    bytes.insert(bytes.end(), buffer, buffer + n);
  }
  const bool failed = n < 0;
  gzclose(file);
  if (failed) return absl::DataLossError(absl::StrCat("read error in ", path));
  return bytes;
}

struct IdxHeader {
  std::vector<uint32_t> dims;
  size_t payload_offset = 0;
};

absl::StatusOr<IdxHeader> ParseIdxHeader(const std::vector<uint8_t>& bytes,
                                         const std::string& path) {
  if (bytes.size() < 4) {
    return absl::DataLossError(
        absl::StrCat(path, ": truncated IDX magic at byte offset 0"));
  }
  if (bytes[0] != 0 || bytes[1] != 0) {
    return absl::DataLossError(
        absl::StrCat(path, ": bad IDX magic at byte offset 0"));
  }
  if (bytes[2] != kIdxUnsignedByte) {
    return absl::DataLossError(absl::StrCat(
        path, ": unsupported IDX element type ", static_cast<int>(bytes[2]),
        " at byte offset 2"));
  }
  const int rank = bytes[3];
  if (rank < 1) {
    return absl::DataLossError(
        absl::StrCat(path, ": IDX rank 0 at byte offset 3"));
  }
  IdxHeader header;
  size_t offset = 4;
  for (int i = 0; i < rank; ++i) {
    if (offset + 4 > bytes.size()) {
      return absl::DataLossError(absl::StrCat(
          path, ": truncated IDX dimension at byte offset ", offset));
    }
    const uint32_t dim = (uint32_t{bytes[offset]} << 24) |
                         (uint32_t{bytes[offset + 1]} << 16) |
                         (uint32_t{bytes[offset + 2]} << 8) |
                         uint32_t{bytes[offset + 3]};
    header.dims.push_back(dim);
    offset += 4;
  }
  header.payload_offset = offset;
  if (header.dims[0] == 0) {
    return absl::DataLossError(
        absl::StrCat(path, ": IDX file holds zero items (byte offset 4)"));
  }
  uint64_t expected = 1;
  for (uint32_t d : header.dims) expected *= d;
  if (bytes.size() - offset < expected) {
    return absl::DataLossError(absl::StrCat(
        path, ": truncated IDX payload at byte offset ", bytes.size(),
        ", expected ", offset + expected, " bytes"));
  }
  return header;
}

std::vector<int> Iota(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<int> Shuffled(int n, RngStream& rng) {
  std::vector<int> v = Iota(n);
  std::shuffle(v.begin(), v.end(), rng.engine());
  return v;
}

}  // namespace

absl::Status RawDataset::Validate() const {
  if (labels.empty()) return absl::InvalidArgumentError("dataset is empty");
  if (static_cast<size_t>(features.rows()) != labels.size()) {
    return absl::InvalidArgumentError("feature and label counts differ");
  }
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("label ", y, " outside [0, ", num_classes, ")"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<RawDataset> LoadIdx(const std::string& images_path,
                                   const std::string& labels_path) {
  auto image_bytes = ReadMaybeGzip(images_path);
  if (!image_bytes.ok()) return image_bytes.status();
  auto label_bytes = ReadMaybeGzip(labels_path);
  if (!label_bytes.ok()) return label_bytes.status();

  auto images = ParseIdxHeader(*image_bytes, images_path);
  if (!images.ok()) return images.status();
  auto labels = ParseIdxHeader(*label_bytes, labels_path);
  if (!labels.ok()) return labels.status();
  if (images->dims.size() < 2) {
    return absl::DataLossError(
        absl::StrCat(images_path, ": image file must have rank >= 2"));
  }
  if (labels->dims.size() != 1) {
    return absl::DataLossError(
        absl::StrCat(labels_path, ": label file must have rank 1"));
  }
  const uint32_t n = images->dims[0];
  if (labels->dims[0] != n) {
    return absl::InvalidArgumentError(
        absl::StrCat(images_path, " holds ", n, " images but ", labels_path,
                     " holds ", labels->dims[0], " labels"));
  }
  size_t dim = 1;
  for (size_t i = 1; i < images->dims.size(); ++i) dim *= images->dims[i];

  RawDataset raw;
  raw.features.resize(n, static_cast<Eigen::Index>(dim));
  const uint8_t* pixels = image_bytes->data() + images->payload_offset;
  for (uint32_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < dim; ++c) {
      raw.features(r, c) = pixels[r * dim + c] / 255.0;
    }
  }
  const uint8_t* label_data = label_bytes->data() + labels->payload_offset;
  raw.labels.assign(label_data, label_data + n);
  raw.num_classes = *std::max_element(raw.labels.begin(), raw.labels.end()) + 1;
  return raw;
}

absl::StatusOr<RawDataset> LoadCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::string line;
  if (!std::getline(in, line)) {
    return absl::DataLossError(absl::StrCat(path, ": missing header"));
  }
  std::vector<std::string> header =
      absl::StrSplit(absl::StripSuffix(line, "\r"), ',');
  if (header.size() < 2 || header.back() != "label") {
    return absl::DataLossError(
        absl::StrCat(path, ": header must be f0,...,f{D-1},label"));
  }
  const size_t dim = header.size() - 1;
  for (size_t i = 0; i < dim; ++i) {
    if (header[i] != absl::StrCat("f", i)) {
      return absl::DataLossError(absl::StrCat(
          path, ": header column ", i, " is '", header[i], "', expected f", i));
    }
  }
  std::vector<double> values;
  RawDataset raw;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view row = absl::StripSuffix(line, "\r");
    if (row.empty()) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(row, ',');
    if (cells.size() != dim + 1) {
      return absl::DataLossError(absl::StrCat(path, ":", line_no, ": expected ",
                                              dim + 1, " columns, got ",
                                              cells.size()));
    }
    for (size_t i = 0; i < dim; ++i) {
      double v = 0.0;
      if (!absl::SimpleAtod(cells[i], &v) || !std::isfinite(v)) {
        return absl::DataLossError(
            absl::StrCat(path, ":", line_no, ": bad number '", cells[i], "'"));
      }
      values.push_back(v);
    }
    int y = 0;
    if (!absl::SimpleAtoi(cells[dim], &y) || y < 0) {
      return absl::DataLossError(
          absl::StrCat(path, ":", line_no, ": bad label '", cells[dim], "'"));
    }
    raw.labels.push_back(y);
  }
  if (raw.labels.empty()) {
    return absl::DataLossError(absl::StrCat(path, ": no data rows"));
  }
  raw.features = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic,
                                          Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), raw.labels.size(), dim);
  raw.num_classes = *std::max_element(raw.labels.begin(), raw.labels.end()) + 1;
  return raw;
}

absl::StatusOr<LabeledDataset> ToLabeled(const RawDataset& raw) {
  if (auto s = raw.Validate(); !s.ok()) return s;
  return LabeledDataset::CreateUnchecked(raw.features, raw.labels,
                                         raw.num_classes);
}

absl::StatusOr<TrainTestSplit> SplitTrainTest(const LabeledDataset& data,
                                              double test_fraction,
                                              RngStream& rng) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    return absl::InvalidArgumentError("test fraction must lie in (0, 1)");
  }
  const int n_test =
      static_cast<int>(std::lround(data.size() * test_fraction));
  if (n_test < 1 || n_test >= data.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("split of ", data.size(), " examples leaves an empty side"));
  }
  const std::vector<int> order = Shuffled(data.size(), rng);
  const std::span<const int> all(order);
  return TrainTestSplit{data.Subset(all.subspan(n_test)),
                        data.Subset(all.first(n_test))};
}

absl::StatusOr<UnitBallScaler> UnitBallScaler::Fit(
    const LabeledDataset& train) {
  const double max_norm = train.MaxRowNorm();
  if (!(max_norm > 0.0)) {
    return absl::InvalidArgumentError(
        "cannot normalize: every training row is zero");
  }
  return UnitBallScaler{1.0 / max_norm};
}

absl::StatusOr<LabeledDataset> UnitBallScaler::Apply(
    const LabeledDataset& data) const {
  Eigen::MatrixXd inputs = data.inputs() * factor;
  for (Eigen::Index n = 0; n < inputs.rows(); ++n) {
    const double norm = inputs.row(n).norm();
    if (norm > 1.0) inputs.row(n) /= norm;
  }
  return LabeledDataset::Create(std::move(inputs), data.labels(),
                                data.num_classes());
}

absl::StatusOr<LabeledDataset> NormalizeUnitBall(const LabeledDataset& train) {
  auto scaler = UnitBallScaler::Fit(train);
  if (!scaler.ok()) return scaler.status();
  return scaler->Apply(train);
}

absl::StatusOr<LabeledDataset> PcaModel::Transform(
    const LabeledDataset& data) const {
  if (data.dim() != mean.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("PCA model expects dimension ", mean.size(), ", got ",
                     data.dim()));
  }
  Eigen::MatrixXd projected =
      (data.inputs().rowwise() - mean.transpose()) * projection;
  auto unscaled = LabeledDataset::CreateUnchecked(
      std::move(projected), data.labels(), data.num_classes());
  if (!unscaled.ok()) return unscaled.status();
  return rescale.Apply(*unscaled);
}

absl::StatusOr<PcaResult> PcaFitTransform(const LabeledDataset& train,
                                          int target_dim) {
  const int max_dim = std::min(train.size(), train.dim());
  if (target_dim < 1 || target_dim > max_dim) {
    return absl::InvalidArgumentError(absl::StrCat(
        "PCA target dimension ", target_dim, " outside [1, ", max_dim, "]"));
  }
  PcaModel model;
  model.mean = train.inputs().colwise().mean().transpose();
  const Eigen::MatrixXd centered =
      train.inputs().rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / std::max(1, train.size() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("covariance eigendecomposition failed");
  }
  // Eigenvalues ascend; take the last target_dim columns in reverse.
  const int d_raw = train.dim();
  model.projection.resize(d_raw, target_dim);
  for (int k = 0; k < target_dim; ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(d_raw - 1 - k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    model.projection.col(k) = v;
  }

  Eigen::MatrixXd projected = centered * model.projection;
  auto unscaled = LabeledDataset::CreateUnchecked(projected, train.labels(),
                                                  train.num_classes());
  if (!unscaled.ok()) return unscaled.status();
  auto scaler = UnitBallScaler::Fit(*unscaled);
  if (!scaler.ok()) return scaler.status();
  model.rescale = *scaler;
  auto scaled = model.rescale.Apply(*unscaled);
  if (!scaled.ok()) return scaled.status();
  return PcaResult{std::move(model), *std::move(scaled)};
}

absl::StatusOr<LabeledDataset> FilterClasses(const LabeledDataset& data,
                                             int keep_classes) {
  if (keep_classes < 2 || keep_classes > data.num_classes()) {
    return absl::InvalidArgumentError(
        absl::StrCat("keep_classes ", keep_classes, " outside [2, ",
                     data.num_classes(), "]"));
  }
  std::vector<int> kept;
  std::vector<int> counts(keep_classes, 0);
  for (int n = 0; n < data.size(); ++n) {
    if (data.label(n) < keep_classes) {
      kept.push_back(n);
      ++counts[data.label(n)];
    }
  }
  for (int c = 0; c < keep_classes; ++c) {
    if (counts[c] == 0) {
      return absl::FailedPreconditionError(
          absl::StrCat("class ", c, " has no examples after filtering"));
    }
  }
  const LabeledDataset subset = data.Subset(kept);
  return LabeledDataset::CreateUnchecked(subset.inputs(), subset.labels(),
                                         keep_classes);
}

absl::StatusOr<LabeledDataset> SubsampleTrain(const LabeledDataset& data,
                                              int target_n, RngStream& rng) {
  if (target_n < 1 || target_n > data.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "cannot subsample ", target_n, " of ", data.size(), " examples"));
  }
  std::vector<int> order = Shuffled(data.size(), rng);
  order.resize(target_n);
  return data.Subset(order);
}

absl::StatusOr<LabeledDataset> SynthBlobs(int n_per_class, int num_classes,
                                          int dim, double separation,
                                          RngStream& rng) {
  if (n_per_class < 1 || num_classes < 2 || dim < 1) {
    return absl::InvalidArgumentError(
        "n_per_class, dim must be positive and num_classes >= 2");
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    return absl::InvalidArgumentError("separation must be finite and >= 0");
  }
  Eigen::MatrixXd anchors(num_classes, dim);
  for (int c = 0; c < num_classes; ++c) {
    Eigen::VectorXd v(dim);
    do {
      for (int i = 0; i < dim; ++i) v(i) = rng.StandardNormal();
    } while (v.norm() == 0.0);
    anchors.row(c) = separation * v.normalized().transpose();
  }
  const int n = n_per_class * num_classes;
  Eigen::MatrixXd inputs(n, dim);
  std::vector<int> labels(n);
  for (int c = 0; c < num_classes; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      const int row = c * n_per_class + i;
      for (int j = 0; j < dim; ++j) {
        inputs(row, j) = anchors(c, j) + rng.StandardNormal();
      }
      labels[row] = c;
    }
  }
  auto raw = LabeledDataset::CreateUnchecked(std::move(inputs),
                                             std::move(labels), num_classes);
  if (!raw.ok()) return raw.status();
  return NormalizeUnitBall(*raw);
}

}  // namespace dpp

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

#include "dpp/trainer.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "dpp/core_math.h"

namespace dpp {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;
constexpr int kMaxBracketSteps = 30;
constexpr int kMaxZoomSteps = 40;

struct Point {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative
  Eigen::VectorXd x;
  Eigen::VectorXd grad;
};

class LineSearch {
 public:
  LineSearch(const SmoothObjective& fn, const Eigen::VectorXd& x0,
             const Eigen::VectorXd& direction, double value0, double slope0)
      : fn_(fn),
        x0_(x0),
        direction_(direction),
        value0_(value0),
        slope0_(slope0),
        // Values within rounding of f(x0) count as a decrease so the search
        // can still follow the gradient once f has flattened out.
        value_slack_(1e-14 * (1.0 + std::abs(value0))) {}

  // Strong-Wolfe step; nullopt when no acceptable step was found.
  std::optional<Point> Run(double alpha_init) {
    Point prev{0.0, value0_, slope0_, x0_, {}};
    double alpha = alpha_init;
    for (int i = 0; i < kMaxBracketSteps; ++i) {
      Point cur = Evaluate(alpha);
      if (!std::isfinite(cur.value)) {
        alpha = 0.5 * (prev.alpha + alpha);
        continue;
      }
      if (!SufficientDecrease(cur) || (i > 0 && cur.value >= prev.value)) {
        return Zoom(prev, cur);
      }
      if (std::abs(cur.slope) <= -kCurvature * slope0_) return cur;
      if (cur.slope >= 0.0) return Zoom(cur, prev);
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return std::nullopt;
  }

 private:
  Point Evaluate(double alpha) const {
    Point p;
    p.alpha = alpha;
    p.x = x0_ + alpha * direction_;
    p.value = fn_(p.x, &p.grad);
    p.slope = p.grad.dot(direction_);
    return p;
  }

  bool SufficientDecrease(const Point& p) const {
    return p.value <= value0_ + kArmijo * p.alpha * slope0_ + value_slack_;
  }

  std::optional<Point> Zoom(Point lo, Point hi) const {
    for (int i = 0; i < kMaxZoomSteps; ++i) {
      const double alpha = Interpolate(lo, hi);
      Point cur = Evaluate(alpha);
      if (!std::isfinite(cur.value) || !SufficientDecrease(cur) ||
          cur.value >= lo.value) {
        hi = std::move(cur);
        continue;
      }
      if (std::abs(cur.slope) <= -kCurvature * slope0_) return cur;
      if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
      lo = std::move(cur);
    }
    // lo always satisfies sufficient decrease; accept it if it moved.
    if (lo.alpha > 0.0) return lo;
    return std::nullopt;
  }

  // Minimizer of the cubic through (lo, hi), safeguarded to the middle 80%
  // of the bracket; bisection if the cubic is degenerate.
  static double Interpolate(const Point& lo, const Point& hi) {
    const double a = lo.alpha;
    const double b = hi.alpha;
    const double width = b - a;
    double t = 0.5;
    if (std::isfinite(hi.value)) {
      const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
      const double disc = d1 * d1 - lo.slope * hi.slope;
      if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b - a);
        const double denom = hi.slope - lo.slope + 2.0 * d2;
        if (denom != 0.0) {
          const double cand = b - (b - a) * (hi.slope + d2 - d1) / denom;
          if (std::isfinite(cand)) t = (cand - a) / width;
        }
      }
    }
    t = std::clamp(t, 0.1, 0.9);
    return a + t * width;
  }

  const SmoothObjective& fn_;
  const Eigen::VectorXd& x0_;
  const Eigen::VectorXd& direction_;
  double value0_;
  double slope0_;
  double value_slack_;
};

// Armijo backtracking along -grad, used when the Wolfe search fails.
std::optional<Point> Backtrack(const SmoothObjective& fn,
                               const Eigen::VectorXd& x,
                               const Eigen::VectorXd& grad, double value) {
  const Eigen::VectorXd direction = -grad;
  const double slope = -grad.squaredNorm();
  const double slack = 1e-14 * (1.0 + std::abs(value));
  double alpha = 1.0 / std::max(1.0, grad.norm());
  for (int i = 0; i < 60; ++i) {
    Point p;
    p.alpha = alpha;
    p.x = x + alpha * direction;
    p.value = fn(p.x, &p.grad);
    p.slope = p.grad.dot(direction);
    if (std::isfinite(p.value) &&
        p.value <= value + kArmijo * alpha * slope + slack &&
        p.grad.norm() < grad.norm() * 1.5) {
      return p;
    }
    alpha *= 0.5;
  }
  return std::nullopt;
}

}  // namespace

LbfgsResult MinimizeLbfgs(const SmoothObjective& fn, Eigen::VectorXd x0,
                          const LbfgsOptions& options) {
  LbfgsResult result;
  result.x = std::move(x0);
  Eigen::VectorXd grad;
  result.value = fn(result.x, &grad);
  result.grad_norm = grad.norm();

  std::deque<Eigen::VectorXd> s_hist;
  std::deque<Eigen::VectorXd> y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (result.grad_norm <= options.grad_tolerance) {
      result.converged = true;
      return result;
    }
    result.iterations = iter + 1;

    // Two-loop recursion.
    Eigen::VectorXd q = grad;
    std::vector<double> alphas(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alphas[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alphas[i] * y_hist[i];
    }
    double initial_step = 1.0;
    if (!s_hist.empty()) {
      q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    } else {
      initial_step = 1.0 / std::max(1.0, result.grad_norm);
    }
    for (size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alphas[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd direction = -q;
    double slope = grad.dot(direction);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -grad;
      slope = -grad.squaredNorm();
      initial_step = 1.0 / std::max(1.0, result.grad_norm);
    }

    LineSearch search(fn, result.x, direction, result.value, slope);
    std::optional<Point> step = search.Run(initial_step);
    if (!step.has_value()) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      step = Backtrack(fn, result.x, grad, result.value);
      if (!step.has_value()) return result;
    }

    Eigen::VectorXd s = step->x - result.x;
    Eigen::VectorXd y = step->grad - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    result.x = std::move(step->x);
    grad = std::move(step->grad);
    result.value = step->value;
    result.grad_norm = grad.norm();
  }
  result.converged = result.grad_norm <= options.grad_tolerance;
  return result;
}

absl::StatusOr<TrainResult> MinimizeErmDetailed(const LabeledDataset& data,
                                                const TrainConfig& cfg) {
  if (!(cfg.lambda >= 0.0)) {
    return absl::InvalidArgumentError("lambda must be nonnegative");
  }
  if (cfg.max_iterations < 1 || !(cfg.grad_tolerance > 0.0) ||
      cfg.history < 1) {
    return absl::InvalidArgumentError(
        "max_iterations, grad_tolerance and history must be positive");
  }
  const int rows = data.dim();
  const int cols = data.num_classes();
  if (cfg.perturbation.has_value()) {
    const Perturbation& p = *cfg.perturbation;
    if (p.noise.rows() != rows || p.noise.cols() != cols) {
      return absl::InvalidArgumentError(absl::StrCat(
          "perturbation noise is ", p.noise.rows(), "x", p.noise.cols(),
          ", model is ", rows, "x", cols));
    }
    if (!(p.rho >= 0.0)) {
      return absl::InvalidArgumentError("rho must be nonnegative");
    }
  }

  const double scaled_lambda = cfg.lambda * data.size();
  SmoothObjective fn = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
    const Eigen::Map<const ParamMatrix> theta(x.data(), rows, cols);
    absl::StatusOr<ObjectiveValue> v =
        cfg.perturbation.has_value()
            ? PerturbedObjective(theta, data, scaled_lambda,
                                 cfg.perturbation->noise,
                                 cfg.perturbation->rho)
            : ErmObjective(theta, data, cfg.lambda);
    // Shapes were validated above; the objectives cannot fail here.
    *grad = Eigen::Map<const Eigen::VectorXd>(v->gradient.data(),
                                              v->gradient.size());
    return v->value;
  };

  LbfgsOptions options;
  options.max_iterations = cfg.max_iterations;
  options.grad_tolerance = cfg.grad_tolerance;
  options.history = cfg.history;
  LbfgsResult r = MinimizeLbfgs(
      fn, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows) * cols),
      options);
  if (!r.converged) {
    return absl::AbortedError(absl::StrCat(
        "training did not converge after ", r.iterations,
        " iterations; gradient norm ", r.grad_norm, " > tolerance ",
        cfg.grad_tolerance));
  }
  TrainResult out;
  out.theta = Eigen::Map<const ParamMatrix>(r.x.data(), rows, cols);
  out.objective = r.value;
  out.grad_norm = r.grad_norm;
  out.iterations = r.iterations;
  return out;
}

absl::StatusOr<ParamMatrix> MinimizeErm(const LabeledDataset& data,
                                        const TrainConfig& cfg) {
  auto r = MinimizeErmDetailed(data, cfg);
  if (!r.ok()) return r.status();
  return std::move(r->theta);
}

absl::StatusOr<Eigen::VectorXd> PredictLogits(const ParamMatrix& theta,
                                              const Eigen::VectorXd& x) {
  if (x.size() != theta.rows()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "input has dimension ", x.size(), ", model expects ", theta.rows()));
  }
  return theta.transpose() * x;
}

int PredictClass(const ParamMatrix& theta, const Eigen::VectorXd& x) {
  const Eigen::VectorXd logits = theta.transpose() * x;
  Eigen::Index best = 0;
  logits.maxCoeff(&best);  // first maximal index
  return static_cast<int>(best);
}

double Accuracy(const ParamMatrix& theta, const LabeledDataset& data) {
  const Eigen::MatrixXd logits = data.inputs() * theta;
  int correct = 0;
  for (int n = 0; n < data.size(); ++n) {
    Eigen::Index best = 0;
    logits.row(n).maxCoeff(&best);
    if (best == data.label(n)) ++correct;
  }
  return static_cast<double>(correct) / data.size();
}

absl::Status WriteParamFile(const std::string& path,
                            const ParamMatrix& theta) {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "DPPARAM 1 " << theta.rows() << ' ' << theta.cols() << ' '
      << (std::endian::native == std::endian::little ? "little" : "big")
      << '\n';
  for (Eigen::Index r = 0; r < theta.rows(); ++r) {
    for (Eigen::Index c = 0; c < theta.cols(); ++c) {
      out << theta(r, c) << (c + 1 == theta.cols() ? '\n' : ' ');
    }
  }
  if (!out) return absl::DataLossError(absl::StrCat("write failed: ", path));
  return absl::OkStatus();
}

absl::StatusOr<ParamMatrix> ReadParamFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  in.imbue(std::locale::classic());
  std::string magic, endianness;
  int version = 0;
  long rows = 0, cols = 0;
  in >> magic >> version >> rows >> cols >> endianness;
  if (!in || magic != "DPPARAM" || version != 1 || rows < 1 || cols < 1 ||
      (endianness != "little" && endianness != "big")) {
    return absl::DataLossError(absl::StrCat("bad parameter header in ", path));
  }
  ParamMatrix theta(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!(in >> theta(r, c))) {
        return absl::DataLossError(absl::StrCat(
            "truncated parameter file ", path, " at entry ", r * cols + c));
      }
    }
  }
  return theta;
}

}  // namespace dpp

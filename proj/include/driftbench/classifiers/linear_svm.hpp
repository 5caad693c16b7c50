#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "driftbench/classifiers/model.hpp"
#include "driftbench/rng.hpp"

namespace driftbench {

struct LinearSvmParams {
  double alpha = 1e-4;
  int max_epochs = 1000;
  double tol = 1e-3;
  int n_iter_no_change = 5;
};

/// Linear SVM trained by plain SGD on the hinge loss with L2 penalty and the
/// "optimal" step schedule eta_t = 1 / (alpha (t0 + t)). Features are
/// standardized with the training mean and standard deviation first.
class LinearSvmModel : public Model {
 public:
  LinearSvmModel(Encoder enc, IndexRange range, const Dataset& data, const LinearSvmParams& p,
                 std::uint64_t seed)
      : Model(Algorithm::linear_svm, std::move(enc), range) {
    const std::size_t d = data.dim;
    const std::size_t n = data.size();
    mean_.assign(d, 0.0);
    scale_.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < d; ++f) mean_[f] += data.at(i, f);
    for (auto& m : mean_) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < d; ++f) scale_[f] += (data.at(i, f) - mean_[f]) * (data.at(i, f) - mean_[f]);
    for (auto& s : scale_) {
      s = std::sqrt(s / static_cast<double>(n));
      if (s == 0.0) s = 1.0;
    }
    std::vector<double> z(n * d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < d; ++f) z[i * d + f] = (data.at(i, f) - mean_[f]) / scale_[f];

    w_.assign(d, 0.0);
    const double typw = std::sqrt(1.0 / std::sqrt(p.alpha));
    const double t0 = 1.0 / (typw * p.alpha);
    double t = 1.0;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Xoshiro256 rng(seed);
    double best_loss = std::numeric_limits<double>::infinity();
    int no_improvement = 0;
    for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
      for (std::size_t k = n; k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
      double sum_loss = 0.0;
      for (std::size_t i : order) {
        const double* x = z.data() + i * d;
        const double y = data.y[i] ? 1.0 : -1.0;
        const double margin = y * (dot(x) + b_);
        const double eta = 1.0 / (p.alpha * (t0 + t - 1.0));
        if (margin < 1.0) sum_loss += 1.0 - margin;
        if (margin <= 1.0) {
          for (std::size_t f = 0; f < d; ++f) w_[f] += eta * y * x[f];
          b_ += eta * y;
        }
        const double shrink = std::max(0.0, 1.0 - eta * p.alpha);
        for (auto& wf : w_) wf *= shrink;
        t += 1.0;
      }
      epochs_ = epoch + 1;
      if (sum_loss > best_loss - p.tol * static_cast<double>(n)) {
        ++no_improvement;
      } else {
        no_improvement = 0;
      }
      best_loss = std::min(best_loss, sum_loss);
      if (no_improvement >= p.n_iter_no_change) break;
    }
  }

  double decision(const double* x) const {
    double s = b_;
    for (std::size_t f = 0; f < w_.size(); ++f) s += w_[f] * (x[f] - mean_[f]) / scale_[f];
    return s;
  }

  Label predict_row(const double* x) const override { return decision(x) > 0.0 ? 1 : 0; }

  int epochs() const { return epochs_; }

 private:
  double dot(const double* x) const {
    double s = 0.0;
    for (std::size_t f = 0; f < w_.size(); ++f) s += w_[f] * x[f];
    return s;
  }

  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<double> w_;
  double b_ = 0.0;
  int epochs_ = 0;
};

}  // namespace driftbench

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "driftbench/classifiers/model.hpp"

namespace driftbench {

/// Gaussian naive Bayes. Per-class variances are the population variances
/// plus a smoothing term of 1e-9 times the largest feature variance.
class NaiveBayesModel : public Model {
 public:
  NaiveBayesModel(Encoder enc, IndexRange range, const Dataset& data)
      : Model(Algorithm::naive_bayes, std::move(enc), range) {
    const std::size_t d = data.dim;
    const std::size_t n = data.size();
    std::array<double, 2> count{0.0, 0.0};
    for (auto& m : mean_) m.assign(d, 0.0);
    for (auto& v : var_) v.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const int c = data.y[i];
      count[c] += 1.0;
      for (std::size_t f = 0; f < d; ++f) mean_[c][f] += data.at(i, f);
    }
    for (int c = 0; c < 2; ++c)
      for (auto& m : mean_[c]) m /= count[c];
    for (std::size_t i = 0; i < n; ++i) {
      const int c = data.y[i];
      for (std::size_t f = 0; f < d; ++f) {
        const double diff = data.at(i, f) - mean_[c][f];
        var_[c][f] += diff * diff;
      }
    }
    // smoothing uses the variance of each feature over the whole slice
    double max_var = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
      double mu = 0.0;
      for (std::size_t i = 0; i < n; ++i) mu += data.at(i, f);
      mu /= static_cast<double>(n);
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) v += (data.at(i, f) - mu) * (data.at(i, f) - mu);
      max_var = std::max(max_var, v / static_cast<double>(n));
    }
    const double eps = 1e-9 * max_var;
    for (int c = 0; c < 2; ++c) {
      log_prior_[c] = std::log(count[c] / static_cast<double>(n));
      for (auto& v : var_[c]) v = v / count[c] + eps;
    }
  }

  double joint_log_likelihood(const double* x, int c) const {
    double s = log_prior_[c];
    for (std::size_t f = 0; f < mean_[c].size(); ++f) {
      const double diff = x[f] - mean_[c][f];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * var_[c][f]) + 0.5 * diff * diff / var_[c][f];
    }
    return s;
  }

  Label predict_row(const double* x) const override {
    return joint_log_likelihood(x, 1) > joint_log_likelihood(x, 0) ? 1 : 0;
  }

 private:
  std::array<std::vector<double>, 2> mean_;
  std::array<std::vector<double>, 2> var_;
  std::array<double, 2> log_prior_{};
};

}  // namespace driftbench

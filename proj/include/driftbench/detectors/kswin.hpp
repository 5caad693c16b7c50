#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

#include "driftbench/detectors/detector.hpp"
#include "driftbench/detectors/ks_test.hpp"
#include "driftbench/rng.hpp"

namespace driftbench {

struct KswinParams {
  double alpha = 0.005;
  std::size_t window_size = 100;
  std::size_t stat_size = 30;
  std::uint32_t seed = 0;  // seeds the comparison-sample draws
  double min_statistic = 0.1;
};

/// Kolmogorov-Smirnov windowing. Once the window is full, each update drops
/// the oldest value and compares the newest `stat_size` values with
/// `stat_size` draws (with replacement) from the rest of the window. On drift
/// the window keeps only the recent block. The incoming value is appended
/// after the test, so the test at update t sees values up to t - 1.
class Kswin final : public DetectorBase<Kswin> {
 public:
  explicit Kswin(KswinParams params = {}) : params_(params), sampler_(params.seed) {
    if (params_.alpha < 0.0 || params_.alpha > 1.0) {
      throw std::invalid_argument("kswin: alpha must lie in [0, 1]");
    }
    if (params_.stat_size == 0 || params_.window_size <= params_.stat_size) {
      throw std::invalid_argument("kswin: window_size must exceed stat_size");
    }
  }

  DetectorKind kind() const override { return DetectorKind::kswin; }
  const KswinParams& params() const { return params_; }
  double last_p_value() const { return p_value_; }
  double last_statistic() const { return statistic_; }
  const std::deque<double>& window() const { return window_; }

  /// The two samples compared by the most recent test.
  const std::vector<double>& last_reference_sample() const { return reference_; }
  const std::vector<double>& last_recent_sample() const { return recent_; }

 protected:
  DriftStatus do_update(double value) override {
    bool drift = false;
    if (window_.size() >= params_.window_size) {
      window_.pop_front();
      const std::size_t pool = window_.size() - params_.stat_size;
      reference_.resize(params_.stat_size);
      for (auto& x : reference_) {
        x = window_[sampler_.below(static_cast<std::uint32_t>(pool))];
      }
      recent_.assign(window_.end() - static_cast<std::ptrdiff_t>(params_.stat_size), window_.end());
      const auto result = ks::two_sample(reference_, recent_);
      add_work(4 * params_.stat_size + params_.stat_size * ceil_log2(params_.stat_size));
      statistic_ = result.statistic;
      p_value_ = result.p_value;
      if (p_value_ <= params_.alpha && statistic_ > params_.min_statistic) {
        drift = true;
        window_.erase(window_.begin(), window_.end() - static_cast<std::ptrdiff_t>(params_.stat_size));
      }
    }
    add_work(1);
    window_.push_back(value);
    return drift ? DriftStatus::drift : DriftStatus::stable;
  }

  void do_reset() override {
    window_.clear();
    reference_.clear();
    recent_.clear();
    p_value_ = 0.0;
    statistic_ = 0.0;
    sampler_.seed(params_.seed);
  }

 private:
  static std::size_t ceil_log2(std::size_t n) {
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    return bits;
  }

  KswinParams params_;
  NumpyLegacyIndexSampler sampler_;
  std::deque<double> window_;
  std::vector<double> reference_;
  std::vector<double> recent_;
  double p_value_ = 0.0;
  double statistic_ = 0.0;
};

}  // namespace driftbench

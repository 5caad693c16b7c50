#pragma once

#include <algorithm>
#include <cstdint>

#include "driftbench/detectors/detector.hpp"

namespace driftbench {

struct PageHinkleyParams {
  std::int64_t min_instances = 30;
  double delta = 0.005;
  double threshold = 50.0;
  double alpha = 1.0 - 0.0001;  // forgetting factor on the cumulative sum
};

/// Page-Hinkley test: sum = max(0, alpha * sum + (x - mean - delta)), drift
/// once the sum exceeds the threshold.
class PageHinkley final : public DetectorBase<PageHinkley> {
 public:
  explicit PageHinkley(PageHinkleyParams params = {}) : params_(params) {}

  DetectorKind kind() const override { return DetectorKind::page_hinkley; }
  const PageHinkleyParams& params() const { return params_; }
  double cumulative_sum() const { return sum_; }
  double mean() const { return mean_; }

 protected:
  DriftStatus do_update(double x) override {
    add_work(1);
    if (in_drift_) restart();
    mean_ = mean_ + (x - mean_) / static_cast<double>(sample_count_);
    sum_ = std::max(0.0, params_.alpha * sum_ + (x - mean_ - params_.delta));
    ++sample_count_;
    in_drift_ = false;
    if (sample_count_ < params_.min_instances) return DriftStatus::stable;
    if (sum_ > params_.threshold) in_drift_ = true;
    return in_drift_ ? DriftStatus::drift : DriftStatus::stable;
  }

  void do_reset() override {
    restart();
    in_drift_ = false;
  }

 private:
  void restart() {
    sample_count_ = 1;
    mean_ = 0.0;
    sum_ = 0.0;
  }

  PageHinkleyParams params_;
  std::int64_t sample_count_ = 1;
  double mean_ = 0.0;
  double sum_ = 0.0;
  bool in_drift_ = false;
};

}  // namespace driftbench

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "driftbench/detectors/detector.hpp"

namespace driftbench {

struct DdmParams {
  std::int64_t min_instances = 30;
  double warning_level = 2.0;
  double out_control_level = 3.0;
};

/// Drift Detection Method: running error rate p with sd s = sqrt(p(1-p)/n),
/// compared against the (p, s) pair that minimised p + s so far.
class Ddm final : public DetectorBase<Ddm> {
 public:
  explicit Ddm(DdmParams params = {}) : params_(params) { restart(); }

  DetectorKind kind() const override { return DetectorKind::ddm; }
  const DdmParams& params() const { return params_; }
  double error_rate() const { return miss_prob_; }

 protected:
  DriftStatus do_update(double error) override {
    add_work(1);
    if (in_drift_) restart();
    const double n = static_cast<double>(sample_count_);
    miss_prob_ = miss_prob_ + (error - miss_prob_) / n;
    miss_std_ = std::sqrt(miss_prob_ * (1.0 - miss_prob_) / n);
    ++sample_count_;
    in_drift_ = false;
    in_warning_ = false;
    if (sample_count_ < params_.min_instances) return DriftStatus::stable;

    if (miss_prob_ + miss_std_ <= prob_sd_min_) {
      prob_min_ = miss_prob_;
      sd_min_ = miss_std_;
      prob_sd_min_ = miss_prob_ + miss_std_;
    }
    if (miss_prob_ + miss_std_ > prob_min_ + params_.out_control_level * sd_min_) {
      in_drift_ = true;
    } else if (miss_prob_ + miss_std_ > prob_min_ + params_.warning_level * sd_min_) {
      in_warning_ = true;
    }
    return in_drift_ ? DriftStatus::drift : in_warning_ ? DriftStatus::warning : DriftStatus::stable;
  }

  void do_reset() override {
    restart();
    in_drift_ = false;
    in_warning_ = false;
  }

 private:
  void restart() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    sample_count_ = 1;
    miss_prob_ = 1.0;
    miss_std_ = 0.0;
    prob_sd_min_ = inf;
    prob_min_ = inf;
    sd_min_ = inf;
  }

  DdmParams params_;
  std::int64_t sample_count_ = 1;
  double miss_prob_ = 1.0;
  double miss_std_ = 0.0;
  double prob_sd_min_ = 0.0;
  double prob_min_ = 0.0;
  double sd_min_ = 0.0;
  bool in_drift_ = false;
  bool in_warning_ = false;
};

}  // namespace driftbench

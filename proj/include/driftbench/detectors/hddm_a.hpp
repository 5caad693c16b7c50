#pragma once

#include <cmath>

#include "driftbench/detectors/detector.hpp"

namespace driftbench {

struct HddmAParams {
  double drift_confidence = 0.001;
  double warning_confidence = 0.005;
  // The reference enables the decrease test by default; it restarts the
  // statistics on a significant decrease without raising an alarm.
  bool two_sided = true;
};

/// Hoeffding-bound drift detector, A-test: compares the running mean against
/// the mean recorded at the point where (mean + bound) was smallest.
class HddmA final : public DetectorBase<HddmA> {
 public:
  explicit HddmA(HddmAParams params = {}) : params_(params) {}

  DetectorKind kind() const override { return DetectorKind::hddm_a; }
  const HddmAParams& params() const { return params_; }
  double estimation() const { return estimation_; }

 protected:
  DriftStatus do_update(double value) override {
    add_work(1);
    total_n_ += 1.0;
    total_c_ += value;
    if (n_min_ == 0.0) {
      n_min_ = total_n_;
      c_min_ = total_c_;
    }
    if (n_max_ == 0.0) {
      n_max_ = total_n_;
      c_max_ = total_c_;
    }

    const double log_drift = std::log(1.0 / params_.drift_confidence);
    double cota = std::sqrt(1.0 / (2.0 * n_min_) * log_drift);
    const double cota1 = std::sqrt(1.0 / (2.0 * total_n_) * log_drift);
    if (c_min_ / n_min_ + cota >= total_c_ / total_n_ + cota1) {
      c_min_ = total_c_;
      n_min_ = total_n_;
    }
    cota = std::sqrt(1.0 / (2.0 * n_max_) * log_drift);
    if (c_max_ / n_max_ - cota <= total_c_ / total_n_ - cota1) {
      c_max_ = total_c_;
      n_max_ = total_n_;
    }

    DriftStatus status = DriftStatus::stable;
    if (mean_increased(params_.drift_confidence)) {
      n_estimation_ = total_n_ - n_min_;
      c_estimation_ = total_c_ - c_min_;
      clear_window();
      status = DriftStatus::drift;
    } else if (mean_increased(params_.warning_confidence)) {
      status = DriftStatus::warning;
    }
    if (params_.two_sided && mean_decreased()) {
      n_estimation_ = total_n_ - n_max_;
      c_estimation_ = total_c_ - c_max_;
      clear_window();
    }
    update_estimation();
    return status;
  }

  void do_reset() override { *this = HddmA(params_); }

 private:
  bool mean_increased(double confidence) const {
    if (n_min_ == total_n_) return false;
    const double m = (total_n_ - n_min_) / n_min_ * (1.0 / total_n_);
    const double cota = std::sqrt(m / 2.0 * std::log(2.0 / confidence));
    return total_c_ / total_n_ - c_min_ / n_min_ >= cota;
  }

  bool mean_decreased() const {
    if (n_max_ == total_n_) return false;
    const double m = (total_n_ - n_max_) / n_max_ * (1.0 / total_n_);
    const double cota = std::sqrt(m / 2.0 * std::log(2.0 / params_.drift_confidence));
    return c_max_ / n_max_ - total_c_ / total_n_ >= cota;
  }

  void clear_window() {
    n_min_ = n_max_ = total_n_ = 0.0;
    c_min_ = c_max_ = total_c_ = 0.0;
  }

  void update_estimation() {
    if (total_n_ >= n_estimation_) {
      c_estimation_ = n_estimation_ = 0.0;
      estimation_ = total_c_ / total_n_;
    } else {
      estimation_ = c_estimation_ / n_estimation_;
    }
  }

  HddmAParams params_;
  double n_min_ = 0.0;
  double c_min_ = 0.0;
  double total_n_ = 0.0;
  double total_c_ = 0.0;
  double n_max_ = 0.0;
  double c_max_ = 0.0;
  double n_estimation_ = 0.0;
  double c_estimation_ = 0.0;
  double estimation_ = 0.0;
};

}  // namespace driftbench

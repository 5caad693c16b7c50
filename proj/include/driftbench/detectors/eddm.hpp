#pragma once

#include <cmath>
#include <cstdint>

#include "driftbench/detectors/detector.hpp"

namespace driftbench {

struct EddmParams {
  double warning_ratio = 0.95;
  double out_control_ratio = 0.9;
  std::int64_t min_instances = 30;
  std::int64_t min_errors = 30;
};

/// Early Drift Detection Method. Tracks the mean and standard deviation of
/// the distance (in updates) between consecutive errors and signals when
/// mean + 2 sd falls below a fraction of its historical maximum.
class Eddm final : public DetectorBase<Eddm> {
 public:
  explicit Eddm(EddmParams params = {}) : params_(params) {}

  DetectorKind kind() const override { return DetectorKind::eddm; }
  const EddmParams& params() const { return params_; }
  std::int64_t errors_seen() const { return num_errors_; }
  double mean_distance() const { return mean_; }

 protected:
  DriftStatus do_update(double error) override {
    add_work(1);
    if (in_drift_) restart();
    in_drift_ = false;
    ++n_;
    if (error == 1.0) {
      in_warning_ = false;
      ++num_errors_;
      last_d_ = d_;
      d_ = n_ - 1;
      const auto distance = static_cast<double>(d_ - last_d_);
      const double old_mean = mean_;
      mean_ = mean_ + (distance - mean_) / static_cast<double>(num_errors_);
      std_temp_ = std_temp_ + (distance - mean_) * (distance - old_mean);
      const double sd = std::sqrt(std_temp_ / static_cast<double>(num_errors_));
      const double m2s = mean_ + 2.0 * sd;
      if (n_ >= params_.min_instances) {
        if (m2s > m2s_max_) {
          m2s_max_ = m2s;
        } else {
          const double p = m2s / m2s_max_;
          const bool enough = num_errors_ > params_.min_errors;
          if (enough && p < params_.out_control_ratio) {
            in_drift_ = true;
          } else if (enough && p < params_.warning_ratio) {
            in_warning_ = true;
          } else {
            in_warning_ = false;
          }
        }
      }
    }
    return in_drift_ ? DriftStatus::drift : in_warning_ ? DriftStatus::warning : DriftStatus::stable;
  }

  void do_reset() override {
    restart();
    in_drift_ = false;
  }

 private:
  void restart() {
    in_warning_ = false;
    n_ = 1;
    num_errors_ = 0;
    d_ = 0;
    last_d_ = 0;
    mean_ = 0.0;
    std_temp_ = 0.0;
    m2s_max_ = 0.0;
  }

  EddmParams params_;
  std::int64_t n_ = 1;
  std::int64_t num_errors_ = 0;
  std::int64_t d_ = 0;
  std::int64_t last_d_ = 0;
  double mean_ = 0.0;
  double std_temp_ = 0.0;
  double m2s_max_ = 0.0;
  bool in_drift_ = false;
  bool in_warning_ = false;
};

}  // namespace driftbench

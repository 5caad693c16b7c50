#pragma once

#include <cmath>
#include <limits>

#include "driftbench/detectors/detector.hpp"

namespace driftbench {

struct HddmWParams {
  double drift_confidence = 0.001;
  double warning_confidence = 0.005;
  double lambda = 0.05;
  bool two_sided = true;
};

/// Hoeffding-bound drift detector, W-test: exponentially weighted moving
/// averages with McDiarmid bounds on the weighted sums.
///
/// With lambda = 1 every EWMA collapses to the latest value and the bounded
/// condition sums stay at 1.
class HddmW final : public DetectorBase<HddmW> {
 public:
  explicit HddmW(HddmWParams params = {}) : params_(params) {}

  DetectorKind kind() const override { return DetectorKind::hddm_w; }
  const HddmWParams& params() const { return params_; }
  double estimation() const { return estimation_; }
  double ewma() const { return total_.ewma; }
  double bounded_condition_sum() const { return total_.condition_sum; }

 protected:
  DriftStatus do_update(double value) override {
    add_work(1);
    const double decay = 1.0 - params_.lambda;
    ++width_;
    if (total_.ewma < 0.0) {
      total_.ewma = value;
      total_.condition_sum = 1.0;
    } else {
      total_.ewma = params_.lambda * value + decay * total_.ewma;
      total_.condition_sum =
          params_.lambda * params_.lambda + decay * decay * total_.condition_sum;
    }

    update_incr(value, params_.drift_confidence);
    DriftStatus status = DriftStatus::stable;
    if (mean_increment(incr1_, incr2_, params_.drift_confidence)) {
      restart();
      return DriftStatus::drift;
    }
    if (mean_increment(incr1_, incr2_, params_.warning_confidence)) {
      status = DriftStatus::warning;
    }
    update_decr(value, params_.drift_confidence);
    if (params_.two_sided && mean_increment(decr2_, decr1_, params_.drift_confidence)) {
      restart();
      status = DriftStatus::stable;
    }
    estimation_ = total_.ewma;
    return status;
  }

  void do_reset() override { *this = HddmW(params_); }

 private:
  struct Sample {
    double ewma = -1.0;
    double condition_sum = 0.0;
  };

  static bool mean_increment(const Sample& s1, const Sample& s2, double confidence) {
    if (s1.ewma < 0.0 || s2.ewma < 0.0) return false;
    const double bound =
        std::sqrt((s1.condition_sum + s2.condition_sum) * std::log(1.0 / confidence) / 2.0);
    return s2.ewma - s1.ewma > bound;
  }

  void accumulate(Sample& s, double value) const {
    const double decay = 1.0 - params_.lambda;
    if (s.ewma < 0.0) {
      s.ewma = value;
      s.condition_sum = 1.0;
    } else {
      s.ewma = params_.lambda * value + decay * s.ewma;
      s.condition_sum = params_.lambda * params_.lambda + decay * decay * s.condition_sum;
    }
  }

  void update_incr(double value, double confidence) {
    const double bound = std::sqrt(total_.condition_sum * std::log(1.0 / confidence) / 2.0);
    if (total_.ewma + bound < incr_cutpoint_) {
      incr_cutpoint_ = total_.ewma + bound;
      incr1_ = total_;
      incr2_ = Sample{};
    } else {
      accumulate(incr2_, value);
    }
  }

  void update_decr(double value, double confidence) {
    const double epsilon = std::sqrt(total_.condition_sum * std::log(1.0 / confidence) / 2.0);
    if (total_.ewma - epsilon > decr_cutpoint_) {
      decr_cutpoint_ = total_.ewma - epsilon;
      decr1_ = total_;
      decr2_ = Sample{};
    } else {
      accumulate(decr2_, value);
    }
  }

  void restart() {
    total_ = incr1_ = incr2_ = decr1_ = decr2_ = Sample{};
    incr_cutpoint_ = std::numeric_limits<double>::infinity();
    decr_cutpoint_ = std::numeric_limits<double>::infinity();
    width_ = 0;
  }

  HddmWParams params_;
  Sample total_;
  Sample incr1_;
  Sample incr2_;
  Sample decr1_;
  Sample decr2_;
  double incr_cutpoint_ = std::numeric_limits<double>::infinity();
  double decr_cutpoint_ = std::numeric_limits<double>::infinity();
  long width_ = 0;
  double estimation_ = 0.0;
};

}  // namespace driftbench

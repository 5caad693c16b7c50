#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <deque>

#include "driftbench/detectors/detector.hpp"

namespace driftbench {

struct AdwinParams {
  double delta = 0.002;
  int clock = 32;                  // cut points are checked every `clock` updates
  std::int64_t min_window_longitude = 10;
  std::int64_t min_sub_window = 5;
};

/// Adaptive windowing over an exponential histogram of buckets.
///
/// Arithmetic follows the scikit-multiflow implementation step by step so
/// alarm traces agree exactly, including two of its quirks: only the first
/// `size - 1` buckets of each row are visited as cut points, and merging two
/// buckets keeps the variance of the newer one plus the merge term.
class Adwin final : public DetectorBase<Adwin> {
 public:
  static constexpr int kMaxBuckets = 5;

  explicit Adwin(AdwinParams params = {}) : params_(params) {}

  DetectorKind kind() const override { return DetectorKind::adwin; }

  const AdwinParams& params() const { return params_; }
  std::int64_t width() const { return width_; }
  double total() const { return total_; }
  double estimation() const { return width_ == 0 ? 0.0 : total_ / static_cast<double>(width_); }
  double variance() const { return variance_ / static_cast<double>(width_); }
  std::size_t bucket_rows() const { return rows_.size(); }
  std::uint64_t detections() const { return detections_; }

 protected:
  DriftStatus do_update(double value) override {
    insert(value);
    return check_cut() ? DriftStatus::drift : DriftStatus::stable;
  }

  void do_reset() override { *this = Adwin(params_); }

 private:
  struct Row {
    std::array<double, kMaxBuckets + 1> total{};
    std::array<double, kMaxBuckets + 1> variance{};
    int size = 0;

    void push(double t, double v) {
      total[size] = t;
      variance[size] = v;
      ++size;
    }
    void drop_front(int n) {
      for (int i = n; i <= kMaxBuckets; ++i) {
        total[i - n] = total[i];
        variance[i - n] = variance[i];
      }
      for (int i = 1; i <= n; ++i) {
        total[kMaxBuckets - i + 1] = 0.0;
        variance[kMaxBuckets - i + 1] = 0.0;
      }
      size -= n;
    }
  };

  static std::int64_t bucket_size(int row) { return std::int64_t{1} << row; }

  void insert(double value) {
    ++width_;
    rows_.front().push(value, 0.0);
    double incremental = 0.0;
    if (width_ > 1) {
      const double w1 = static_cast<double>(width_ - 1);
      const double dev = value - total_ / w1;
      incremental = w1 * dev * dev / static_cast<double>(width_);
    }
    variance_ += incremental;
    total_ += value;
    compress();
  }

  void compress() {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      add_work(1);
      Row& row = rows_[i];
      if (row.size != kMaxBuckets + 1) break;
      if (i + 1 == rows_.size()) {
        rows_.emplace_back();
        ++last_row_;
      }
      Row& cursor = rows_[i];
      Row& next = rows_[i + 1];
      const std::int64_t n = bucket_size(static_cast<int>(i));
      const double u1 = cursor.total[0] / static_cast<double>(n);
      const double u2 = cursor.total[1] / static_cast<double>(n);
      const double incremental =
          static_cast<double>(n * n) * ((u1 - u2) * (u1 - u2)) / static_cast<double>(n + n);
      next.push(cursor.total[0] + cursor.total[1], cursor.variance[1] + incremental);
      cursor.drop_front(2);
      if (next.size <= kMaxBuckets) break;
    }
  }

  std::int64_t delete_oldest() {
    Row& node = rows_.back();
    const std::int64_t n1 = bucket_size(last_row_);
    width_ -= n1;
    total_ -= node.total[0];
    const double u1 = node.total[0] / static_cast<double>(n1);
    const double dev = u1 - total_ / static_cast<double>(width_);
    const double incremental = node.variance[0] + static_cast<double>(n1 * width_) * dev * dev /
                                                      static_cast<double>(n1 + width_);
    variance_ -= incremental;
    node.drop_front(1);
    if (node.size == 0) {
      rows_.pop_back();
      --last_row_;
    }
    return n1;
  }

  bool cut_expression(std::int64_t n0, std::int64_t n1, double abs_value) const {
    const double n = static_cast<double>(width_);
    const double dd = std::log(2.0 * std::log(n) / params_.delta);
    const double v = variance();
    const double m = 1.0 / static_cast<double>(n0 - params_.min_sub_window + 1) +
                     1.0 / static_cast<double>(n1 - params_.min_sub_window + 1);
    const double epsilon = std::sqrt(2.0 * m * v * dd) + 1.0 * 2.0 / 3.0 * dd * m;
    return std::fabs(abs_value) > epsilon;
  }

  bool check_cut() {
    bool change = false;
    ++time_;
    if (time_ % params_.clock == 0 && width_ > params_.min_window_longitude) {
      bool reduce = true;
      while (reduce) {
        reduce = false;
        bool exit = false;
        std::int64_t n0 = 0;
        std::int64_t n1 = width_;
        double u0 = 0.0;
        double u1 = total_;
        int i = last_row_;
        for (int r = static_cast<int>(rows_.size()) - 1; !exit && r >= 0; --r, --i) {
          const Row& cursor = rows_[r];
          for (int k = 0; k < cursor.size - 1; ++k) {
            add_work(1);
            const std::int64_t n2 = bucket_size(i);
            n0 += n2;
            n1 -= n2;
            u0 += cursor.total[k];
            u1 -= cursor.total[k];
            const double abs_value =
                1.0 * (u0 / static_cast<double>(n0) - u1 / static_cast<double>(n1));
            if (n1 >= params_.min_sub_window && n0 >= params_.min_sub_window &&
                cut_expression(n0, n1, abs_value)) {
              reduce = true;
              change = true;
              if (width_ > 0) {
                n0 -= delete_oldest();
                exit = true;
                break;
              }
            }
          }
        }
      }
    }
    if (change) ++detections_;
    return change;
  }

  AdwinParams params_;
  std::deque<Row> rows_ = std::deque<Row>(1);
  int last_row_ = 0;
  double total_ = 0.0;
  double variance_ = 0.0;
  std::int64_t width_ = 0;
  std::int64_t time_ = 0;
  std::uint64_t detections_ = 0;
};

}  // namespace driftbench

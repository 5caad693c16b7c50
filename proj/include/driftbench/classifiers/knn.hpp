#pragma once

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

#include "driftbench/classifiers/model.hpp"

namespace driftbench {

/// Brute-force k-nearest neighbours with Euclidean distance and majority
/// vote. Neighbours at equal distance are ordered by training index, so the
/// lowest-index points win ties at the k-th place.
class KnnModel : public Model {
 public:
  KnnModel(Encoder enc, IndexRange range, Dataset data, std::size_t k)
      : Model(Algorithm::knn, std::move(enc), range), data_(std::move(data)), k_(k) {
    if (k_ == 0) throw std::invalid_argument("knn: k must be positive");
  }

  std::size_t k() const { return k_; }

  /// Training indices of the k nearest neighbours, nearest first.
  std::vector<std::size_t> neighbours(const double* x) const {
    const std::size_t k = std::min(k_, data_.size());
    // max-heap on (distance, index); top is the current worst neighbour
    std::vector<std::pair<double, std::size_t>> heap;
    heap.reserve(k + 1);
    const std::size_t d = data_.dim;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const double* r = data_.row(i);
      double dist = 0.0;
      for (std::size_t f = 0; f < d; ++f) {
        const double diff = r[f] - x[f];
        dist += diff * diff;
      }
      if (heap.size() < k) {
        heap.emplace_back(dist, i);
        std::push_heap(heap.begin(), heap.end());
      } else if (dist < heap.front().first) {
        // equal distance never displaces: the incumbent has the lower index
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = {dist, i};
        std::push_heap(heap.begin(), heap.end());
      }
    }
    std::sort_heap(heap.begin(), heap.end());
    std::vector<std::size_t> out;
    for (const auto& [dist, i] : heap) out.push_back(i);
    return out;
  }

  Label predict_row(const double* x) const override {
    std::size_t ones = 0;
    const auto nn = neighbours(x);
    for (std::size_t i : nn) ones += data_.y[i];
    return 2 * ones > nn.size() ? 1 : 0;
  }

 private:
  Dataset data_;
  std::size_t k_;
};

}  // namespace driftbench

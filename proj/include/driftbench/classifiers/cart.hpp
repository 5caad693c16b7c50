#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "driftbench/classifiers/model.hpp"
#include "driftbench/rng.hpp"

namespace driftbench {

struct CartParams {
  int max_depth = -1;        // -1: grow until pure
  std::size_t max_features = 0;  // 0: all features
};

/// Weighted binary CART tree with Gini impurity.
///
/// Features are scanned in a seeded random order and the first strictly best
/// split wins, so ties between equally good splits are broken by the seed.
/// With `max_features` set, the scan stops after that many non-constant
/// features (constant ones are skipped without counting).
class CartTree {
 public:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double p1 = 0.0;  // weighted fraction of class 1 at this node
  };

  /// Zero weights exclude a sample.
  void fit(const Dataset& data, const std::vector<double>& weights, const CartParams& params,
           Xoshiro256& rng) {
    data_ = &data;
    w_ = &weights;
    params_ = params;
    rng_ = &rng;
    nodes_.clear();
    idx_.clear();
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (weights[i] > 0.0) idx_.push_back(i);
    }
    if (idx_.empty()) throw std::invalid_argument("CartTree: no samples with positive weight");
    order_.resize(data.dim);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    build(0, idx_.size(), 0);
    data_ = nullptr;
    w_ = nullptr;
    rng_ = nullptr;
    idx_.clear();
    idx_.shrink_to_fit();
    scratch_.clear();
    scratch_.shrink_to_fit();
  }

  double proba1(const double* x) const {
    int at = 0;
    while (nodes_[at].feature >= 0) {
      const Node& n = nodes_[at];
      at = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes_[at].p1;
  }

  Label predict(const double* x) const { return proba1(x) > 0.5 ? 1 : 0; }

  const std::vector<Node>& nodes() const { return nodes_; }

  int depth() const { return nodes_.empty() ? 0 : depth_from(0); }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = -1.0;
  };

  int build(std::size_t lo, std::size_t hi, int depth) {
    double w0 = 0.0;
    double w1 = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = idx_[k];
      (data_->y[i] ? w1 : w0) += (*w_)[i];
    }
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[index].p1 = w1 / (w0 + w1);

    const bool pure = w0 == 0.0 || w1 == 0.0;
    if (pure || hi - lo < 2 || depth == params_.max_depth) return index;

    const Split split = best_split(lo, hi, w0, w1);
    if (split.feature < 0) return index;

    const auto mid = std::partition(idx_.begin() + lo, idx_.begin() + hi, [&](std::size_t i) {
      return data_->at(i, split.feature) <= split.threshold;
    });
    const std::size_t m = static_cast<std::size_t>(mid - idx_.begin());
    nodes_[index].feature = split.feature;
    nodes_[index].threshold = split.threshold;
    const int l = build(lo, m, depth + 1);
    const int r = build(m, hi, depth + 1);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  // Maximizes sum over children of (w0^2 + w1^2) / w, which is equivalent to
  // minimizing the weighted Gini impurity of the children.
  Split best_split(std::size_t lo, std::size_t hi, double w0, double w1) {
    Split best;
    const std::size_t dim = data_->dim;
    for (std::size_t k = 0; k + 1 < dim; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng_->below(dim - k));
      std::swap(order_[k], order_[j]);
    }
    const std::size_t budget = params_.max_features == 0 ? dim : params_.max_features;
    std::size_t visited = 0;
    const double total = w0 + w1;
    for (std::size_t fi = 0; fi < dim && visited < budget; ++fi) {
      const std::size_t f = order_[fi];
      scratch_.clear();
      for (std::size_t k = lo; k < hi; ++k) scratch_.emplace_back(data_->at(idx_[k], f), idx_[k]);
      std::sort(scratch_.begin(), scratch_.end());
      if (scratch_.front().first == scratch_.back().first) continue;
      ++visited;
      double l0 = 0.0;
      double l1 = 0.0;
      for (std::size_t p = 0; p + 1 < scratch_.size(); ++p) {
        const std::size_t i = scratch_[p].second;
        (data_->y[i] ? l1 : l0) += (*w_)[i];
        const double v = scratch_[p].first;
        const double next = scratch_[p + 1].first;
        if (!(v < next)) continue;
        const double lw = l0 + l1;
        const double rw = total - lw;
        const double r0 = w0 - l0;
        const double r1 = w1 - l1;
        const double score = (l0 * l0 + l1 * l1) / lw + (r0 * r0 + r1 * r1) / rw;
        if (score > best.score) {
          double t = v + (next - v) / 2.0;
          if (!(t < next)) t = v;
          best = {static_cast<int>(f), t, score};
        }
      }
    }
    return best;
  }

  int depth_from(int at) const {
    const Node& n = nodes_[at];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth_from(n.left), depth_from(n.right));
  }

  std::vector<Node> nodes_;

  // build state
  const Dataset* data_ = nullptr;
  const std::vector<double>* w_ = nullptr;
  CartParams params_;
  Xoshiro256* rng_ = nullptr;
  std::vector<std::size_t> idx_;
  std::vector<std::size_t> order_;
  std::vector<std::pair<double, std::size_t>> scratch_;
};

class DecisionTreeModel : public Model {
 public:
  DecisionTreeModel(Encoder enc, IndexRange range, CartTree tree)
      : Model(Algorithm::decision_tree, std::move(enc), range), tree_(std::move(tree)) {}

  Label predict_row(const double* x) const override { return tree_.predict(x); }
  const CartTree& tree() const { return tree_; }

 private:
  CartTree tree_;
};

inline std::unique_ptr<Model> fit_decision_tree(const Encoder& enc, const Dataset& data, IndexRange range,
                                                std::uint64_t seed) {
  detail::require_both_classes(data);
  Xoshiro256 rng(seed);
  CartTree tree;
  tree.fit(data, std::vector<double>(data.size(), 1.0), CartParams{}, rng);
  return std::make_unique<DecisionTreeModel>(enc, range, std::move(tree));
}

}  // namespace driftbench

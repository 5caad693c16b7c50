#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <vector>

#include "driftbench/classifiers/model.hpp"

namespace driftbench {

struct HoeffdingTreeParams {
  double grace_period = 200.0;
  double split_confidence = 1e-7;
  double tie_threshold = 0.05;
  double min_branch_fraction = 0.01;
  int split_points = 10;
};

namespace hoeffding {

/// Weighted running mean and variance of one attribute for one class.
struct GaussianEstimator {
  double weight = 0.0;
  double mean = 0.0;
  double var_sum = 0.0;

  void add(double v, double w) {
    if (weight > 0.0) {
      weight += w;
      const double last = mean;
      mean += w * (v - last) / weight;
      var_sum += w * (v - last) * (v - mean);
    } else {
      mean = v;
      weight = w;
    }
  }
  double variance() const { return weight > 1.0 ? var_sum / (weight - 1.0) : 0.0; }
  double sd() const { return std::sqrt(variance()); }

  double density(double v) const {
    if (weight > 0.0) {
      const double s = sd();
      if (s > 0.0) {
        const double d = v - mean;
        return std::exp(-(d * d) / (2.0 * s * s)) / (std::sqrt(2.0 * std::numbers::pi) * s);
      }
      if (v == mean) return 1.0;
    }
    return 0.0;
  }

  /// Estimated weight at or below `v` and strictly above it.
  std::array<double, 2> split_weights(double v) const {
    const double eq = density(v) * weight;
    const double s = sd();
    double lt = 0.0;
    if (s > 0.0) {
      lt = 0.5 * std::erfc(-((v - mean) / s) / std::numbers::sqrt2) * weight - eq;
    } else if (v < mean) {
      lt = weight - eq;
    }
    const double gt = std::max(0.0, weight - eq - lt);
    return {lt + eq, gt};
  }
};

/// Class distribution with key presence, mirroring a sparse class -> weight map.
struct ClassDist {
  std::array<double, 2> w{0.0, 0.0};
  std::array<bool, 2> present{false, false};

  void add(int c, double weight) {
    w[c] += weight;
    present[c] = true;
  }
  double total() const { return w[0] + w[1]; }
  bool pure() const { return (w[0] > 0.0 ? 1 : 0) + (w[1] > 0.0 ? 1 : 0) < 2; }
  bool empty() const { return !present[0] && !present[1]; }
  // first present class with maximal weight
  int argmax() const {
    int best = -1;
    for (int c = 0; c < 2; ++c) {
      if (present[c] && (best < 0 || w[c] > w[best])) best = c;
    }
    return best;
  }
};

struct AttributeObserver {
  std::array<GaussianEstimator, 2> est;
  std::array<double, 2> min{0.0, 0.0};
  std::array<double, 2> max{0.0, 0.0};
  std::array<bool, 2> seen{false, false};

  void observe(double v, int c, double w) {
    if (!seen[c]) {
      seen[c] = true;
      min[c] = v;
      max[c] = v;
    } else {
      min[c] = std::min(min[c], v);
      max[c] = std::max(max[c], v);
    }
    est[c].add(v, w);
  }

  double density(double v, int c) const { return seen[c] ? est[c].density(v) : 0.0; }

  std::array<ClassDist, 2> split_dists(double t) const {
    std::array<ClassDist, 2> out;
    for (int c = 0; c < 2; ++c) {
      if (!seen[c]) continue;
      if (t < min[c]) {
        out[1].add(c, est[c].weight);
      } else if (t >= max[c]) {
        out[0].add(c, est[c].weight);
      } else {
        const auto lr = est[c].split_weights(t);
        out[0].add(c, lr[0]);
        out[1].add(c, lr[1]);
      }
    }
    return out;
  }
};

inline double entropy(const ClassDist& d) {
  const double total = d.total();
  if (total <= 0.0) return 0.0;
  double e = 0.0;
  for (double w : d.w) {
    if (w > 0.0) e -= w * std::log2(w);
  }
  return (e + total * std::log2(total)) / total;
}

inline double info_gain(const ClassDist& pre, const std::array<ClassDist, 2>& post, double min_frac) {
  const double total = post[0].total() + post[1].total();
  int branches = 0;
  if (total > 0.0) {
    for (const auto& d : post) branches += d.total() / total > min_frac ? 1 : 0;
  }
  if (branches < 2) return -std::numeric_limits<double>::infinity();
  double post_entropy = 0.0;
  for (const auto& d : post) post_entropy += d.total() * entropy(d);
  return entropy(pre) - post_entropy / total;
}

}  // namespace hoeffding

/// Hoeffding tree (VFDT) with Gaussian numeric observers, information gain
/// and naive-Bayes-adaptive leaves. Learns one instance at a time; batch
/// fitting is a single sequential pass.
class HoeffdingTree {
 public:
  explicit HoeffdingTree(std::size_t dim, HoeffdingTreeParams params = {}) : dim_(dim), params_(params) {
    nodes_.push_back(new_leaf({}));
  }

  void learn(const double* x, Label y, double weight = 1.0) {
    const int at = leaf_for(x);
    Node& leaf = nodes_[at];
    if (!leaf.active) {
      leaf.dist.add(y, weight);
      return;
    }
    // track which leaf predictor would have been right
    const int mc = leaf.dist.empty() ? 0 : leaf.dist.argmax();
    if (mc == y) leaf.mc_correct += weight;
    if (nb_argmax(leaf, x) == y) leaf.nb_correct += weight;

    leaf.dist.add(y, weight);
    if (leaf.observers.empty()) leaf.observers.resize(dim_);
    for (std::size_t f = 0; f < dim_; ++f) leaf.observers[f].observe(x[f], y, weight);

    const double seen = leaf.dist.total();
    if (seen - leaf.weight_at_last_eval >= params_.grace_period) {
      attempt_split(at);
      nodes_[at].weight_at_last_eval = seen;
    }
  }

  std::array<double, 2> votes(const double* x) const {
    const Node& leaf = nodes_[leaf_for(x)];
    if (!leaf.active || leaf.mc_correct > leaf.nb_correct) return leaf.dist.w;
    return nb_votes(leaf, x);
  }

  Label predict(const double* x) const {
    const auto v = votes(x);
    return v[1] > v[0] ? 1 : 0;
  }

  std::size_t leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.feature < 0; }));
  }
  std::size_t split_count() const { return nodes_.size() - leaf_count(); }

 private:
  struct Node {
    int feature = -1;  // -1: leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    // leaf state
    hoeffding::ClassDist dist;
    double weight_at_last_eval = 0.0;
    double mc_correct = 0.0;
    double nb_correct = 0.0;
    bool active = true;
    std::vector<hoeffding::AttributeObserver> observers;
  };

  static Node new_leaf(const hoeffding::ClassDist& initial) {
    Node n;
    n.dist = initial;
    n.weight_at_last_eval = initial.total();
    return n;
  }

  int leaf_for(const double* x) const {
    int at = 0;
    while (nodes_[at].feature >= 0) {
      const Node& n = nodes_[at];
      at = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return at;
  }

  std::array<double, 2> nb_votes(const Node& leaf, const double* x) const {
    std::array<double, 2> v{0.0, 0.0};
    const double total = leaf.dist.total();
    if (leaf.dist.empty() || total == 0.0) return v;
    for (int c = 0; c < 2; ++c) {
      if (!leaf.dist.present[c]) continue;
      v[c] = leaf.dist.w[c] / total;
      for (std::size_t f = 0; f < leaf.observers.size(); ++f) v[c] *= leaf.observers[f].density(x[f], c);
    }
    return v;
  }

  int nb_argmax(const Node& leaf, const double* x) const {
    if (leaf.dist.empty() || leaf.dist.total() == 0.0) return 0;
    const auto v = nb_votes(leaf, x);
    int best = -1;
    for (int c = 0; c < 2; ++c) {
      if (leaf.dist.present[c] && (best < 0 || v[c] > v[best])) best = c;
    }
    return best;
  }

  struct Candidate {
    int feature = -1;  // -1: the null split
    double threshold = 0.0;
    double merit = 0.0;
    std::array<hoeffding::ClassDist, 2> post;
  };

  void attempt_split(int at) {
    const Node& leaf = nodes_[at];
    if (leaf.dist.pure()) return;
    const auto& pre = leaf.dist;

    std::vector<Candidate> cands;
    cands.push_back({-1, 0.0, -std::numeric_limits<double>::infinity(), {}});
    for (std::size_t f = 0; f < leaf.observers.size(); ++f) {
      const auto& obs = leaf.observers[f];
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < 2; ++c) {
        if (!obs.seen[c]) continue;
        lo = std::min(lo, obs.min[c]);
        hi = std::max(hi, obs.max[c]);
      }
      if (!(lo < std::numeric_limits<double>::infinity())) continue;
      const double bin = (hi - lo) / (params_.split_points + 1.0);
      std::vector<double> points;
      for (int i = 0; i < params_.split_points; ++i) {
        const double t = lo + bin * (i + 1);
        if (t > lo && t < hi) points.push_back(t);
      }
      std::sort(points.begin(), points.end());
      points.erase(std::unique(points.begin(), points.end()), points.end());
      bool have = false;
      Candidate best;
      for (double t : points) {
        auto post = obs.split_dists(t);
        const double merit = hoeffding::info_gain(pre, post, params_.min_branch_fraction);
        if (!have || merit > best.merit) {
          best = {static_cast<int>(f), t, merit, post};
          have = true;
        }
      }
      if (have) cands.push_back(best);
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.merit < b.merit; });

    bool should_split = false;
    if (cands.size() < 2) {
      should_split = !cands.empty();
    } else {
      const double range = 1.0;  // log2 of the number of classes
      const double n = pre.total();
      const double bound = std::sqrt(range * range * std::log(1.0 / params_.split_confidence) / (2.0 * n));
      const auto& best = cands[cands.size() - 1];
      const auto& second = cands[cands.size() - 2];
      should_split = best.merit - second.merit > bound || bound < params_.tie_threshold;
    }
    if (!should_split) return;

    const Candidate& decision = cands.back();
    if (decision.feature < 0) {
      Node& n = nodes_[at];
      n.active = false;
      n.observers.clear();
      return;
    }
    const int l = static_cast<int>(nodes_.size());
    nodes_.push_back(new_leaf(decision.post[0]));
    nodes_.push_back(new_leaf(decision.post[1]));
    Node& n = nodes_[at];
    n.feature = decision.feature;
    n.threshold = decision.threshold;
    n.left = l;
    n.right = l + 1;
    n.observers.clear();
    n.observers.shrink_to_fit();
  }

  std::size_t dim_;
  HoeffdingTreeParams params_;
  std::vector<Node> nodes_;
};

class HoeffdingTreeModel : public Model {
 public:
  HoeffdingTreeModel(Encoder enc, IndexRange range, const Dataset& data, HoeffdingTreeParams params = {})
      : Model(Algorithm::hoeffding_tree, std::move(enc), range), tree_(data.dim, params) {
    for (std::size_t i = 0; i < data.size(); ++i) tree_.learn(data.row(i), data.y[i]);
  }

  Label predict_row(const double* x) const override { return tree_.predict(x); }
  const HoeffdingTree& tree() const { return tree_; }

 private:
  HoeffdingTree tree_;
};

}  // namespace driftbench

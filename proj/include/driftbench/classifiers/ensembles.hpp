#pragma once

#include <cmath>
#include <vector>

#include "driftbench/classifiers/cart.hpp"
#include "driftbench/rng.hpp"

namespace driftbench {

/// Seed of the t-th member of an ensemble fitted with `seed`.
inline std::uint64_t ensemble_member_seed(std::uint64_t seed, std::size_t t) {
  return SplitMix64(seed ^ (0x9e3779b97f4a7c15ULL * (t + 1))).next();
}

/// Averages member class-1 probabilities; ties go to class 0.
class VotingTreesModel : public Model {
 public:
  VotingTreesModel(Algorithm algorithm, Encoder enc, IndexRange range, std::vector<CartTree> trees)
      : Model(algorithm, std::move(enc), range), trees_(std::move(trees)) {}

  double proba1(const double* x) const {
    double s = 0.0;
    for (const auto& t : trees_) s += t.proba1(x);
    return s / static_cast<double>(trees_.size());
  }

  Label predict_row(const double* x) const override { return proba1(x) > 0.5 ? 1 : 0; }
  const std::vector<CartTree>& trees() const { return trees_; }

 private:
  std::vector<CartTree> trees_;
};

/// Bootstrap counts drawn with replacement become integer sample weights.
inline std::vector<double> bootstrap_weights(std::size_t n, Xoshiro256& rng) {
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[rng.below(n)] += 1.0;
  return w;
}

inline std::vector<CartTree> fit_tree_ensemble(const Dataset& data, std::size_t n_trees, bool bootstrap,
                                               const CartParams& params, std::uint64_t seed) {
  std::vector<CartTree> trees(n_trees);
  for (std::size_t t = 0; t < n_trees; ++t) {
    Xoshiro256 rng(ensemble_member_seed(seed, t));
    auto w = bootstrap ? bootstrap_weights(data.size(), rng) : std::vector<double>(data.size(), 1.0);
    trees[t].fit(data, w, params, rng);
  }
  return trees;
}

/// Random forest: bootstrap samples and sqrt(d) candidate features per split.
inline std::unique_ptr<Model> fit_random_forest(const Encoder& enc, const Dataset& data, IndexRange range,
                                                std::uint64_t seed, std::size_t n_trees = 100) {
  detail::require_both_classes(data);
  CartParams params;
  params.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(data.dim))));
  return std::make_unique<VotingTreesModel>(Algorithm::random_forest, enc, range,
                                            fit_tree_ensemble(data, n_trees, true, params, seed));
}

inline std::unique_ptr<Model> fit_bagging(const Encoder& enc, const Dataset& data, IndexRange range,
                                          std::uint64_t seed, std::size_t n_trees = 10, bool bootstrap = true) {
  detail::require_both_classes(data);
  return std::make_unique<VotingTreesModel>(Algorithm::bagging, enc, range,
                                            fit_tree_ensemble(data, n_trees, bootstrap, CartParams{}, seed));
}

/// Discrete AdaBoost (SAMME, two classes) over depth-1 CART stumps.
class AdaBoostModel : public Model {
 public:
  struct Member {
    CartTree stump;
    double alpha = 0.0;
  };

  AdaBoostModel(Encoder enc, IndexRange range, const Dataset& data, std::size_t n_estimators, std::uint64_t seed)
      : Model(Algorithm::adaboost, std::move(enc), range) {
    const std::size_t n = data.size();
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    CartParams params;
    params.max_depth = 1;
    for (std::size_t m = 0; m < n_estimators; ++m) {
      double sum = 0.0;
      for (double v : w) sum += v;
      for (double& v : w) v /= sum;

      Xoshiro256 rng(ensemble_member_seed(seed, m));
      CartTree stump;
      stump.fit(data, w, params, rng);
      std::vector<bool> wrong(n);
      double err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        wrong[i] = stump.predict(data.row(i)) != data.y[i];
        if (wrong[i]) err += w[i];
      }
      if (err <= 0.0) {
        members_.push_back({std::move(stump), 1.0});
        break;
      }
      if (err >= 0.5) {
        // no better than chance: stop, but never leave the ensemble empty
        if (members_.empty()) members_.push_back({std::move(stump), 1.0});
        break;
      }
      const double alpha = std::log((1.0 - err) / err);
      members_.push_back({std::move(stump), alpha});
      if (m + 1 < n_estimators) {
        const double boost = std::exp(alpha);
        for (std::size_t i = 0; i < n; ++i) {
          if (wrong[i]) w[i] *= boost;
        }
      }
    }
  }

  /// Total alpha voting for class 1 minus total alpha voting for class 0.
  double margin(const double* x) const {
    double s = 0.0;
    for (const auto& m : members_) s += m.stump.predict(x) ? m.alpha : -m.alpha;
    return s;
  }

  Label predict_row(const double* x) const override { return margin(x) > 0.0 ? 1 : 0; }
  const std::vector<Member>& members() const { return members_; }

 private:
  std::vector<Member> members_;
};

}  // namespace driftbench

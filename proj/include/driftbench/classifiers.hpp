#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>

#include "driftbench/classifiers/cart.hpp"
#include "driftbench/classifiers/ensembles.hpp"
#include "driftbench/classifiers/hoeffding_tree.hpp"
#include "driftbench/classifiers/knn.hpp"
#include "driftbench/classifiers/linear_svm.hpp"
#include "driftbench/classifiers/model.hpp"
#include "driftbench/classifiers/naive_bayes.hpp"

namespace driftbench {

struct FitOptions {
  std::uint64_t seed = 0;
  // Unset fields take each algorithm's default: 100 forest trees, 50 boosting
  // rounds, 10 bagged trees, k = 5.
  std::optional<std::size_t> n_estimators{};
  bool bootstrap = true;  // bagging only
  std::size_t k = 5;
  // Stream range the slice was taken from; defaults to [0, slice size).
  std::optional<IndexRange> trained_on{};
};

inline std::unique_ptr<Model> fit(Algorithm algorithm, const Schema& schema, std::span<const Instance> slice,
                                  const FitOptions& opt = {}) {
  Encoder enc(schema);
  const Dataset data = Dataset::encode(enc, slice);
  detail::require_both_classes(data);
  const IndexRange range = opt.trained_on.value_or(IndexRange{0, slice.size()});
  switch (algorithm) {
    case Algorithm::naive_bayes: return std::make_unique<NaiveBayesModel>(enc, range, data);
    case Algorithm::decision_tree: return fit_decision_tree(enc, data, range, opt.seed);
    case Algorithm::hoeffding_tree: return std::make_unique<HoeffdingTreeModel>(enc, range, data);
    case Algorithm::knn: return std::make_unique<KnnModel>(enc, range, data, opt.k);
    case Algorithm::random_forest: return fit_random_forest(enc, data, range, opt.seed, opt.n_estimators.value_or(100));
    case Algorithm::adaboost:
      return std::make_unique<AdaBoostModel>(enc, range, data, opt.n_estimators.value_or(50), opt.seed);
    case Algorithm::bagging:
      return fit_bagging(enc, data, range, opt.seed, opt.n_estimators.value_or(10), opt.bootstrap);
    case Algorithm::linear_svm: return std::make_unique<LinearSvmModel>(enc, range, data, LinearSvmParams{}, opt.seed);
  }
  throw std::invalid_argument("fit: unknown algorithm");
}

/// Fits on `stream[range.begin, range.end)` and records the range.
inline std::unique_ptr<Model> fit_range(Algorithm algorithm, const LabeledStream& stream, IndexRange range,
                                        FitOptions opt = {}) {
  if (range.end > stream.size() || range.begin > range.end) throw std::out_of_range("fit_range: bad range");
  opt.trained_on = range;
  return fit(algorithm, stream.schema,
             std::span<const Instance>(stream.instances).subspan(range.begin, range.end - range.begin), opt);
}

/// Fraction of correctly predicted instances.
inline double accuracy(const Model& model, std::span<const Instance> slice) {
  if (slice.empty()) throw std::invalid_argument("accuracy: empty slice");
  std::size_t correct = 0;
  for (const auto& inst : slice) correct += model.predict(inst) == inst.label;
  return static_cast<double>(correct) / static_cast<double>(slice.size());
}

}  // namespace driftbench

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "driftbench/streamgen.hpp"

namespace driftbench {

enum class Algorithm { naive_bayes, decision_tree, hoeffding_tree, knn, random_forest, adaboost, bagging, linear_svm };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::naive_bayes, Algorithm::decision_tree,
                                               Algorithm::hoeffding_tree, Algorithm::knn,
                                               Algorithm::random_forest, Algorithm::adaboost,
                                               Algorithm::bagging, Algorithm::linear_svm};

// The six-model roster used by the default experiment preset.
inline constexpr Algorithm kDefaultAlgorithms[] = {Algorithm::linear_svm, Algorithm::hoeffding_tree,
                                                   Algorithm::knn, Algorithm::random_forest,
                                                   Algorithm::adaboost, Algorithm::bagging};

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::naive_bayes: return "naive_bayes";
    case Algorithm::decision_tree: return "decision_tree";
    case Algorithm::hoeffding_tree: return "hoeffding_tree";
    case Algorithm::knn: return "knn";
    case Algorithm::random_forest: return "random_forest";
    case Algorithm::adaboost: return "adaboost";
    case Algorithm::bagging: return "bagging";
    case Algorithm::linear_svm: return "linear_svm";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view name) {
  for (auto a : kAllAlgorithms) {
    if (name == to_string(a)) return a;
  }
  throw std::invalid_argument("unknown classifier: " + std::string(name));
}

/// Half-open range of stream indices.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool operator==(const IndexRange&) const = default;
};

/// Maps instances to dense numeric rows. Numbers pass through, booleans
/// become 0/1 and categories are one-hot encoded.
class Encoder {
 public:
  Encoder() = default;
  explicit Encoder(Schema schema) : schema_(std::move(schema)) {
    for (const auto& f : schema_) dim_ += f.kind == FeatureKind::categorical ? f.levels.size() : 1;
  }

  const Schema& schema() const { return schema_; }
  std::size_t dim() const { return dim_; }

  void encode(const std::vector<FeatureValue>& features, double* out) const {
    std::size_t at = 0;
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      const auto& v = features[i];
      switch (schema_[i].kind) {
        case FeatureKind::numeric: out[at++] = std::get<double>(v); break;
        case FeatureKind::boolean: out[at++] = std::get<bool>(v) ? 1.0 : 0.0; break;
        case FeatureKind::categorical: {
          const std::size_t levels = schema_[i].levels.size();
          const std::size_t hot = std::get<Category>(v).level;
          for (std::size_t l = 0; l < levels; ++l) out[at + l] = l == hot ? 1.0 : 0.0;
          at += levels;
          break;
        }
      }
    }
  }

 private:
  Schema schema_;
  std::size_t dim_ = 0;
};

/// Row-major encoded training data.
struct Dataset {
  std::size_t dim = 0;
  std::vector<double> x;
  std::vector<Label> y;

  std::size_t size() const { return y.size(); }
  const double* row(std::size_t i) const { return x.data() + i * dim; }
  double at(std::size_t i, std::size_t f) const { return x[i * dim + f]; }

  static Dataset encode(const Encoder& enc, std::span<const Instance> instances) {
    Dataset d;
    d.dim = enc.dim();
    d.x.resize(instances.size() * d.dim);
    d.y.reserve(instances.size());
    for (std::size_t i = 0; i < instances.size(); ++i) {
      check_schema(enc.schema(), instances[i]);
      enc.encode(instances[i].features, d.x.data() + i * d.dim);
      d.y.push_back(instances[i].label);
    }
    return d;
  }
};

/// A fitted binary classifier. Immutable after construction.
class Model {
 public:
  Model(Algorithm algorithm, Encoder encoder, IndexRange trained_on)
      : algorithm_(algorithm), encoder_(std::move(encoder)), trained_on_(trained_on) {}
  virtual ~Model() = default;

  Algorithm algorithm() const { return algorithm_; }
  const Schema& schema() const { return encoder_.schema(); }
  const Encoder& encoder() const { return encoder_; }
  IndexRange trained_on() const { return trained_on_; }

  Label predict(const Instance& instance) const {
    check_features(encoder_.schema(), instance.features);
    thread_local std::vector<double> buf;
    buf.resize(encoder_.dim());
    encoder_.encode(instance.features, buf.data());
    return predict_row(buf.data());
  }

  /// Prediction on an already encoded row of `encoder().dim()` values.
  virtual Label predict_row(const double* x) const = 0;

 private:
  Algorithm algorithm_;
  Encoder encoder_;
  IndexRange trained_on_;
};

namespace detail {

inline void require_both_classes(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("fit: empty training slice");
  bool seen[2] = {false, false};
  for (Label y : d.y) seen[y] = true;
  if (!(seen[0] && seen[1])) throw std::invalid_argument("fit: training slice contains a single class");
}

}  // namespace detail
}  // namespace driftbench

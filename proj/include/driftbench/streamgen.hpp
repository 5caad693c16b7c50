#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "driftbench/rng.hpp"

namespace driftbench {

enum class Generator { sine, stagger, mixed, sea, rt };
enum class DriftType { abrupt, gradual };

inline constexpr Generator kAllGenerators[] = {Generator::sine, Generator::stagger, Generator::mixed,
                                               Generator::sea, Generator::rt};
inline constexpr DriftType kAllDriftTypes[] = {DriftType::abrupt, DriftType::gradual};

inline std::string_view to_string(Generator g) {
  switch (g) {
    case Generator::sine: return "sine";
    case Generator::stagger: return "stagger";
    case Generator::mixed: return "mixed";
    case Generator::sea: return "sea";
    case Generator::rt: return "rt";
  }
  return "?";
}

inline std::string_view to_string(DriftType d) {
  return d == DriftType::abrupt ? "abrupt" : "gradual";
}

inline Generator parse_generator(std::string_view name) {
  for (auto g : kAllGenerators) {
    if (name == to_string(g)) return g;
  }
  if (name == "RT") return Generator::rt;
  throw std::invalid_argument("unknown generator: " + std::string(name));
}

inline DriftType parse_drift_type(std::string_view name) {
  for (auto d : kAllDriftTypes) {
    if (name == to_string(d)) return d;
  }
  throw std::invalid_argument("unknown drift type: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Instances and schemas

enum class FeatureKind { numeric, boolean, categorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::numeric;
  std::vector<std::string> levels;  // categorical only

  bool operator==(const FeatureSpec&) const = default;
};

using Schema = std::vector<FeatureSpec>;

struct Category {
  std::uint8_t level = 0;
  bool operator==(const Category&) const = default;
};

using FeatureValue = std::variant<double, bool, Category>;

using Label = std::uint8_t;

struct Instance {
  std::vector<FeatureValue> features;
  Label label = 0;

  bool operator==(const Instance&) const = default;
};

inline FeatureKind kind_of(const FeatureValue& v) {
  switch (v.index()) {
    case 0: return FeatureKind::numeric;
    case 1: return FeatureKind::boolean;
    default: return FeatureKind::categorical;
  }
}

/// Throws if the feature vector does not fit the schema (arity, kinds, levels).
inline void check_features(const Schema& schema, const std::vector<FeatureValue>& features) {
  if (features.size() != schema.size()) {
    throw std::invalid_argument("instance has " + std::to_string(features.size()) +
                                " features, schema expects " + std::to_string(schema.size()));
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (kind_of(features[i]) != schema[i].kind) {
      throw std::invalid_argument("feature " + schema[i].name + " has the wrong kind");
    }
    if (schema[i].kind == FeatureKind::categorical &&
        std::get<Category>(features[i]).level >= schema[i].levels.size()) {
      throw std::invalid_argument("feature " + schema[i].name + " level out of range");
    }
  }
}

inline void check_schema(const Schema& schema, const Instance& instance) {
  check_features(schema, instance.features);
  if (instance.label > 1) throw std::invalid_argument("label must be 0 or 1");
}

// ---------------------------------------------------------------------------
// Drift schedules

struct DriftSchedule {
  std::vector<std::size_t> positions;
  std::size_t width = 0;
  std::size_t total_length = 0;

  bool operator==(const DriftSchedule&) const = default;

  static DriftSchedule abrupt_preset() { return {{10000, 20000, 30000}, 0, 40000}; }
  static DriftSchedule gradual_preset() { return {{9500, 20000, 30500}, 1000, 41000}; }
  static DriftSchedule preset(DriftType type) {
    return type == DriftType::abrupt ? abrupt_preset() : gradual_preset();
  }

  void validate() const {
    if (total_length == 0) throw std::invalid_argument("drift schedule: empty stream");
    for (std::size_t k = 0; k < positions.size(); ++k) {
      if (k + 1 < positions.size() && !(positions[k] + width < positions[k + 1])) {
        throw std::invalid_argument("drift schedule: positions must be increasing and windows disjoint");
      }
    }
    if (!positions.empty() && !(positions.back() + width < total_length)) {
      throw std::invalid_argument("drift schedule: last drift must end before the stream does");
    }
  }

  /// End (exclusive) of the concept that starts at positions[k].
  std::size_t concept_end(std::size_t k) const {
    return k + 1 < positions.size() ? positions[k + 1] : total_length;
  }

  /// Number of drifts fully in effect at index i, plus the drift whose
  /// transition window contains i if `ramp_draw` falls under the linear
  /// mixing probability (i - p) / width.
  unsigned parity_at(std::size_t i, double ramp_draw) const {
    unsigned count = 0;
    for (std::size_t p : positions) {
      if (i >= p + width) {
        ++count;
      } else if (i >= p) {
        const double mix = static_cast<double>(i - p) / static_cast<double>(width);
        if (ramp_draw < mix) ++count;
      }
    }
    return count;
  }
};

struct StreamSpec {
  Generator generator = Generator::sine;
  DriftType drift_type = DriftType::abrupt;
  std::uint64_t seed = 0;
  DriftSchedule schedule = DriftSchedule::abrupt_preset();

  bool operator==(const StreamSpec&) const = default;

  static StreamSpec make(Generator g, DriftType d, std::uint64_t seed) {
    return {g, d, seed, DriftSchedule::preset(d)};
  }
};

// ---------------------------------------------------------------------------
// Base concepts

inline Label sine_concept(double x1, double x2) { return x2 < std::sin(x1) ? 1 : 0; }

enum class StaggerSize : std::uint8_t { small, medium, large };
enum class StaggerColor : std::uint8_t { red, green, blue };
enum class StaggerShape : std::uint8_t { circle, square, triangle };

/// First STAGGER concept: size = small and color = red.
inline Label stagger_concept(StaggerSize size, StaggerColor color, StaggerShape /*shape*/) {
  return size == StaggerSize::small && color == StaggerColor::red ? 1 : 0;
}

/// At least two of {x3, x4, x2 < 0.5 + 0.3 sin(3 pi x1)}.
inline Label mixed_concept(double x1, double x2, bool x3, bool x4) {
  const bool below = x2 < 0.5 + 0.3 * std::sin(3.0 * std::numbers::pi * x1);
  return (int{x3} + int{x4} + int{below}) >= 2 ? 1 : 0;
}

inline Label sea_concept(double x1, double x2, double /*x3*/, double threshold = 8.0) {
  return x1 + x2 <= threshold ? 1 : 0;
}

/// Axis-aligned random decision tree over the unit square.
class RandomTree {
 public:
  static constexpr int kMaxDepth = 5;

  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    Label label = 0;
  };

  /// Random tree of depth <= kMaxDepth; rebuilt until both labels occur.
  static RandomTree random(std::uint64_t tree_seed) {
    Xoshiro256 rng(tree_seed);
    for (;;) {
      RandomTree tree;
      std::array<double, 2> lo{0.0, 0.0};
      std::array<double, 2> hi{1.0, 1.0};
      tree.grow(rng, 0, lo, hi);
      if (!tree.degenerate()) return tree;
    }
  }

  /// Single split on `feature` at `threshold`; values below go left.
  static RandomTree stump(int feature, double threshold, Label left, Label right) {
    RandomTree t;
    t.nodes_.push_back({feature, threshold, 1, 2, 0});
    t.nodes_.push_back({-1, 0.0, -1, -1, left});
    t.nodes_.push_back({-1, 0.0, -1, -1, right});
    return t;
  }

  Label classify(double x1, double x2) const {
    const double x[2] = {x1, x2};
    int at = 0;
    while (nodes_[at].feature >= 0) {
      const Node& n = nodes_[at];
      at = x[n.feature] < n.threshold ? n.left : n.right;
    }
    return nodes_[at].label;
  }

  int depth() const { return depth_from(0); }
  const std::vector<Node>& nodes() const { return nodes_; }

  bool degenerate() const {
    bool seen[2] = {false, false};
    for (const auto& n : nodes_) {
      if (n.feature < 0) seen[n.label] = true;
    }
    return !(seen[0] && seen[1]);
  }

 private:
  int grow(Xoshiro256& rng, int depth, std::array<double, 2> lo, std::array<double, 2> hi) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const bool leaf = depth >= kMaxDepth || (depth >= 2 && rng.uniform() < 0.25);
    if (leaf) {
      nodes_[index].label = static_cast<Label>(rng.below(2));
      return index;
    }
    const int f = static_cast<int>(rng.below(2));
    const double t = lo[f] + (hi[f] - lo[f]) * rng.uniform(0.2, 0.8);
    nodes_[index].feature = f;
    nodes_[index].threshold = t;
    auto left_hi = hi;
    left_hi[f] = t;
    auto right_lo = lo;
    right_lo[f] = t;
    const int l = grow(rng, depth + 1, lo, left_hi);
    const int r = grow(rng, depth + 1, right_lo, hi);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  int depth_from(int at) const {
    const Node& n = nodes_[at];
    if (n.feature < 0) return 0;
    return 1 + std::max(depth_from(n.left), depth_from(n.right));
  }

  std::vector<Node> nodes_;
};

inline Label rt_concept(double x1, double x2, const RandomTree& tree) { return tree.classify(x1, x2); }

inline Schema schema_for(Generator g) {
  const auto num = [](std::string n) { return FeatureSpec{std::move(n), FeatureKind::numeric, {}}; };
  const auto flag = [](std::string n) { return FeatureSpec{std::move(n), FeatureKind::boolean, {}}; };
  switch (g) {
    case Generator::sine: return {num("x1"), num("x2")};
    case Generator::stagger:
      return {FeatureSpec{"size", FeatureKind::categorical, {"small", "medium", "large"}},
              FeatureSpec{"color", FeatureKind::categorical, {"red", "green", "blue"}},
              FeatureSpec{"shape", FeatureKind::categorical, {"circle", "square", "triangle"}}};
    case Generator::mixed: return {num("x1"), num("x2"), flag("x3"), flag("x4")};
    case Generator::sea: return {num("x1"), num("x2"), num("x3")};
    case Generator::rt: return {num("x1"), num("x2")};
  }
  throw std::invalid_argument("schema_for: unknown generator");
}

/// Seed of the random tree behind an RT stream.
inline std::uint64_t rt_tree_seed(std::uint64_t stream_seed) {
  return SplitMix64(stream_seed ^ 0x52545f545245450aULL).next();
}

// ---------------------------------------------------------------------------
// Streams

struct LabeledStream {
  StreamSpec spec;
  Schema schema;
  std::vector<Instance> instances;

  std::size_t size() const { return instances.size(); }
  const Instance& operator[](std::size_t i) const { return instances[i]; }
};

/// Sequential instance source for one StreamSpec.
///
/// Every instance consumes the same draws regardless of drift type: the
/// features, then one uniform used only inside gradual transition windows.
/// Abrupt and gradual streams with the same seed therefore share their
/// feature values index by index.
class StreamGenerator {
 public:
  explicit StreamGenerator(StreamSpec spec) : spec_(std::move(spec)), rng_(spec_.seed) {
    spec_.schedule.validate();
    if (spec_.generator == Generator::rt) tree_ = RandomTree::random(rt_tree_seed(spec_.seed));
  }

  const StreamSpec& spec() const { return spec_; }
  bool done() const { return index_ >= spec_.schedule.total_length; }
  std::size_t index() const { return index_; }
  const std::optional<RandomTree>& tree() const { return tree_; }

  Instance next() {
    if (done()) throw std::out_of_range("stream exhausted");
    Instance inst;
    Label base = 0;
    switch (spec_.generator) {
      case Generator::sine: {
        const double x1 = rng_.uniform();
        const double x2 = rng_.uniform();
        inst.features = {x1, x2};
        base = sine_concept(x1, x2);
        break;
      }
      case Generator::stagger: {
        const auto size = static_cast<std::uint8_t>(rng_.below(3));
        const auto color = static_cast<std::uint8_t>(rng_.below(3));
        const auto shape = static_cast<std::uint8_t>(rng_.below(3));
        inst.features = {Category{size}, Category{color}, Category{shape}};
        base = stagger_concept(StaggerSize{size}, StaggerColor{color}, StaggerShape{shape});
        break;
      }
      case Generator::mixed: {
        const double x1 = rng_.uniform();
        const double x2 = rng_.uniform();
        const bool x3 = rng_.bernoulli(0.5);
        const bool x4 = rng_.bernoulli(0.5);
        inst.features = {x1, x2, x3, x4};
        base = mixed_concept(x1, x2, x3, x4);
        break;
      }
      case Generator::sea: {
        const double x1 = rng_.uniform(0.0, 10.0);
        const double x2 = rng_.uniform(0.0, 10.0);
        const double x3 = rng_.uniform(0.0, 10.0);
        inst.features = {x1, x2, x3};
        base = sea_concept(x1, x2, x3);
        break;
      }
      case Generator::rt: {
        const double x1 = rng_.uniform();
        const double x2 = rng_.uniform();
        inst.features = {x1, x2};
        base = rt_concept(x1, x2, *tree_);
        break;
      }
    }
    const double ramp_draw = rng_.uniform();
    const unsigned parity = spec_.schedule.parity_at(index_, ramp_draw);
    inst.label = static_cast<Label>(base ^ (parity & 1u));
    ++index_;
    return inst;
  }

 private:
  StreamSpec spec_;
  Xoshiro256 rng_;
  std::optional<RandomTree> tree_;
  std::size_t index_ = 0;
};

inline LabeledStream generate_stream(const StreamSpec& spec) {
  StreamGenerator gen(spec);
  LabeledStream out{gen.spec(), schema_for(spec.generator), {}};
  out.instances.reserve(spec.schedule.total_length);
  while (!gen.done()) out.instances.push_back(gen.next());
  return out;
}

/// Label of the unmodified base concept for an instance of generator `g`.
/// RT needs the stream's tree.
inline Label base_label(Generator g, const Instance& inst, const RandomTree* tree = nullptr) {
  const auto num = [&](std::size_t i) { return std::get<double>(inst.features[i]); };
  switch (g) {
    case Generator::sine: return sine_concept(num(0), num(1));
    case Generator::stagger:
      return stagger_concept(StaggerSize{std::get<Category>(inst.features[0]).level},
                             StaggerColor{std::get<Category>(inst.features[1]).level},
                             StaggerShape{std::get<Category>(inst.features[2]).level});
    case Generator::mixed:
      return mixed_concept(num(0), num(1), std::get<bool>(inst.features[2]),
                           std::get<bool>(inst.features[3]));
    case Generator::sea: return sea_concept(num(0), num(1), num(2));
    case Generator::rt:
      if (tree == nullptr) throw std::invalid_argument("base_label: RT needs its tree");
      return rt_concept(num(0), num(1), *tree);
  }
  return 0;
}

}  // namespace driftbench

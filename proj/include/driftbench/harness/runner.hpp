#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "driftbench/classifiers.hpp"
#include "driftbench/detectors.hpp"
#include "driftbench/energy.hpp"
#include "driftbench/harness/config.hpp"
#include "driftbench/harness/results.hpp"
#include "driftbench/metrics.hpp"
#include "driftbench/rng.hpp"
#include "driftbench/streamgen.hpp"

namespace driftbench {

using DetectorFactory = std::function<std::unique_ptr<DriftDetector>(DetectorKind, std::uint32_t seed)>;

inline DetectorFactory default_detector_factory() {
  return [](DetectorKind kind, std::uint32_t seed) { return make_detector(kind, seed); };
}

/// Executes iterations for one configuration. Streams and initial fits are
/// cached for the most recent (stream, classifier) so consecutive detectors
/// reuse them. All energy regions go through the one meter, sequentially.
class Runner {
 public:
  Runner(ExperimentConfig config, std::unique_ptr<EnergySource> source,
         DetectorFactory factory = default_detector_factory())
      : config_(std::move(config)), meter_(std::move(source)), factory_(std::move(factory)) {
    config_.validate();
    if (!factory_) throw std::invalid_argument("Runner needs a detector factory");
  }

  const ExperimentConfig& config() const { return config_; }
  Meter& meter() { return meter_; }

  const LabeledStream& stream(Generator g, DriftType d, unsigned repetition) {
    const StreamSpec spec = StreamSpec::make(g, d, config_.stream_seed(repetition));
    if (!stream_ || !(stream_->spec == spec)) stream_ = std::make_shared<LabeledStream>(generate_stream(spec));
    return *stream_;
  }

  /// One iteration in first-alarm mode.
  IterationResult iteration(const Combo& combo, unsigned repetition) {
    const auto& s = stream(combo.generator, combo.drift_type, repetition);
    const auto& init = initial_fit(combo, repetition);
    IterationResult r = start_result(combo, repetition, init);

    // steps 3-5: only the detector update loop is inside the measured region
    const std::size_t begin = config_.initial_train_len;
    auto detector = factory_(combo.detector, detector_seed(repetition));
    auto [hit, sample] = meter_.measure([&]() -> std::optional<std::size_t> {
      for (std::size_t i = begin; i < s.size(); ++i) {
        if (detector->update(init.errors[i - begin]) == DriftStatus::drift) return i;
      }
      return std::nullopt;
    });
    r.detection_energy = sample;
    r.alarm = classify_alarm(hit, s.spec.schedule, 0);
    if (hit) finish_after_alarm(r, combo, repetition, *hit, config_.eval_start, *init.model);
    return r;
  }

  /// Continuous mode: the stream is split at the concept ends into one
  /// segment per drift and the first alarm in each segment is scored. After
  /// it the model is refit on everything before the alarm, the detector
  /// restarts, and monitoring continues with the new model; later alarms in
  /// the same segment are not scored. Detection energy of a row covers both
  /// update loops of its segment.
  std::vector<IterationResult> continuous_iterations(const Combo& combo, unsigned repetition) {
    const auto& s = stream(combo.generator, combo.drift_type, repetition);
    const auto& schedule = s.spec.schedule;
    const auto& init = initial_fit(combo, repetition);
    std::shared_ptr<const Model> model = init.model;
    std::vector<std::uint8_t> errors = init.errors;
    std::size_t errors_from = config_.initial_train_len;
    auto detector = factory_(combo.detector, detector_seed(repetition));

    std::vector<IterationResult> out;
    std::size_t seg_begin = config_.initial_train_len;
    for (std::size_t k = 0; k < schedule.positions.size(); ++k) {
      const std::size_t seg_end = schedule.concept_end(k);
      IterationResult r = start_result(combo, repetition, init);
      r.drift_k = k;
      auto [hit, sample] = meter_.measure([&]() -> std::optional<std::size_t> {
        for (std::size_t i = seg_begin; i < seg_end; ++i) {
          if (detector->update(errors[i - errors_from]) == DriftStatus::drift) return i;
        }
        return std::nullopt;
      });
      r.detection_energy = sample;
      r.alarm = classify_alarm(hit, schedule, k);
      if (hit) {
        const std::size_t acc_from = k == 0 ? config_.eval_start : schedule.positions[k];
        model = finish_after_alarm(r, combo, repetition, *hit, acc_from, *model);
        errors_from = *hit + 1;
        errors = error_signal(*model, s, errors_from);
        detector = factory_(combo.detector, detector_seed(repetition));
        const auto tail = meter_.measure([&] {
          for (std::size_t i = errors_from; i < seg_end; ++i) detector->update(errors[i - errors_from]);
        });
        r.detection_energy.joules += tail.joules;
        r.detection_energy.duration_s += tail.duration_s;
        r.detection_energy.counter_wraps += tail.counter_wraps;
      }
      out.push_back(r);
      seg_begin = seg_end;
    }
    return out;
  }

  std::vector<IterationResult> run(const Combo& combo, unsigned repetition) {
    if (config_.alarm_mode == AlarmMode::first_alarm) return {iteration(combo, repetition)};
    return continuous_iterations(combo, repetition);
  }

  /// Per-instance errors (1 = misprediction) of `model` on stream[from, end).
  static std::vector<std::uint8_t> error_signal(const Model& model, const LabeledStream& s, std::size_t from) {
    std::vector<std::uint8_t> e;
    e.reserve(s.size() - std::min(from, s.size()));
    for (std::size_t i = from; i < s.size(); ++i) e.push_back(model.predict(s[i]) != s[i].label);
    return e;
  }

 private:
  struct InitialFit {
    Combo key;  // detector field unused
    unsigned repetition = 0;
    std::shared_ptr<const Model> model;
    EnergySample energy;
    double accuracy = 0.0;
    std::vector<std::uint8_t> errors;  // from initial_train_len to the stream end
  };

  std::uint32_t detector_seed(unsigned repetition) const {
    return static_cast<std::uint32_t>(SplitMix64(config_.stream_seed(repetition)).next());
  }

  FitOptions fit_options(unsigned repetition) const {
    FitOptions opt;
    opt.seed = config_.stream_seed(repetition);
    return opt;
  }

  // steps 1-2
  const InitialFit& initial_fit(const Combo& combo, unsigned repetition) {
    const bool cached = fit_ && config_.share_initial_fit && fit_->repetition == repetition &&
                        fit_->key.generator == combo.generator && fit_->key.drift_type == combo.drift_type &&
                        fit_->key.classifier == combo.classifier;
    if (cached) return *fit_;
    const auto& s = stream(combo.generator, combo.drift_type, repetition);
    auto fresh = std::make_unique<InitialFit>();
    fresh->key = combo;
    fresh->repetition = repetition;
    const IndexRange train{0, config_.initial_train_len};
    auto [model, sample] = meter_.measure(
        [&] { return std::shared_ptr<const Model>(fit_range(combo.classifier, s, train, fit_options(repetition))); });
    fresh->model = std::move(model);
    fresh->energy = sample;
    // held out: from the end of training to the first drift or eval_start, whichever is earlier
    const std::size_t acc_end = std::min(config_.eval_start, s.spec.schedule.positions.front());
    const auto all = std::span<const Instance>(s.instances);
    fresh->accuracy = accuracy(*fresh->model, all.subspan(train.end, acc_end - train.end));
    fresh->errors = error_signal(*fresh->model, s, train.end);
    fit_ = std::move(fresh);
    return *fit_;
  }

  IterationResult start_result(const Combo& combo, unsigned repetition, const InitialFit& init) const {
    IterationResult r;
    r.combo = combo;
    r.repetition = repetition;
    r.train_energy = init.energy;
    r.train_accuracy = init.accuracy;
    return r;
  }

  // steps 6-7
  std::shared_ptr<const Model> finish_after_alarm(IterationResult& r, const Combo& combo, unsigned repetition,
                                                  std::size_t detected, std::size_t acc_from, const Model& current) {
    const auto& s = stream(combo.generator, combo.drift_type, repetition);
    const auto all = std::span<const Instance>(s.instances);
    if (detected > acc_from) {
      r.pre_retrain_accuracy = accuracy(current, all.subspan(acc_from, detected - acc_from));
    }
    auto [model, sample] = meter_.measure([&] {
      return std::shared_ptr<const Model>(fit_range(combo.classifier, s, {0, detected}, fit_options(repetition)));
    });
    r.retrain_energy = sample;
    const std::size_t end = std::min(detected + config_.retrain_eval_len, s.size());
    r.retrain_accuracy = accuracy(*model, all.subspan(detected, end - detected));
    return model;
  }

  ExperimentConfig config_;
  Meter meter_;
  DetectorFactory factory_;
  std::shared_ptr<LabeledStream> stream_;
  std::unique_ptr<InitialFit> fit_;
};

/// Single iteration with a fresh proxy-metered runner.
inline IterationResult run_iteration(const Combo& combo, unsigned repetition, const ExperimentConfig& config,
                                     DetectorFactory factory = default_detector_factory()) {
  Runner runner(config, std::make_unique<CpuTimeProxySource>(config.energy.proxy_watts), std::move(factory));
  return runner.iteration(combo, repetition);
}

// ---------------------------------------------------------------------------
// Full experiment

/// Iteration order: generator, drift type, repetition, classifier, detector
/// (innermost, so detectors sharing an initial fit run back to back).
inline std::vector<std::pair<Combo, unsigned>> iteration_plan(const ExperimentConfig& c) {
  std::vector<std::pair<Combo, unsigned>> plan;
  for (auto g : c.generators) {
    for (auto d : c.drift_types) {
      for (unsigned rep = 0; rep < c.repetitions; ++rep) {
        for (auto cls : c.classifiers) {
          for (auto det : c.detectors) plan.push_back({Combo{det, g, d, cls}, rep});
        }
      }
    }
  }
  return plan;
}

struct RunOptions {
  DetectorFactory factory = default_detector_factory();
  std::unique_ptr<EnergySource> source;  // default: make_energy_source(config.energy)
  Logger log = log_to_stderr;
  std::optional<std::size_t> stop_after_iterations;  // simulate an interruption
  std::function<void()> on_warm_up;
};

struct RunSummary {
  std::filesystem::path results_path;
  std::size_t rows_total = 0;
  std::size_t rows_resumed = 0;  // rows already present when the run started
  std::size_t rows_written = 0;
  Provider provider = Provider::cpu_time_proxy;
  double warm_up_s = 0.0;
};

namespace detail {

/// Number of complete data rows in an existing results file, after checking
/// that it was produced under the same design. Drops any trailing partial
/// line and any rows of an unfinished iteration.
inline std::size_t resume_point(const std::filesystem::path& path, const std::string& preamble,
                                std::size_t rows_per_iteration) {
  std::string content;
  {
    auto in = open_for_read(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    content = ss.str();
  }
  if (content.rfind(preamble, 0) != 0) {
    throw IoError(path, "existing results were written with a different design or schema; refusing to resume");
  }
  std::string body = content.substr(preamble.size());
  body.erase(body.rfind('\n') == std::string::npos ? 0 : body.rfind('\n') + 1);  // partial last line
  std::size_t rows = static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n'));
  const std::size_t keep = rows - rows % rows_per_iteration;
  if (keep != rows || preamble.size() + body.size() != content.size()) {
    std::size_t cut = 0;
    for (std::size_t n = 0; n < keep; ++n) cut = body.find('\n', cut) + 1;
    auto out = open_for_write(path);
    out << preamble << body.substr(0, cut);
    if (!out) throw IoError(path, "rewrite failed");
  }
  return keep;
}

}  // namespace detail

/// Warm-up once, then every planned iteration in order, appending rows and
/// sleeping the cooldown between iterations. Resumes an interrupted file.
inline RunSummary run_experiment(const ExperimentConfig& config, RunOptions options = {}) {
  config.validate();
  RunSummary summary;
  summary.results_path = config.results_path();
  summary.rows_total = config.expected_rows();
  const std::string preamble = results_preamble(design_to_json(config).dump());
  const std::size_t rpi = config.rows_per_iteration();

  std::size_t done_iterations = 0;
  if (std::filesystem::exists(summary.results_path)) {
    summary.rows_resumed = detail::resume_point(summary.results_path, preamble, rpi);
    done_iterations = summary.rows_resumed / rpi;
  } else {
    auto out = open_for_write(summary.results_path);
    out << preamble;
  }
  const auto plan = iteration_plan(config);
  if (done_iterations > plan.size()) throw IoError(summary.results_path, "more rows than the design has");
  if (done_iterations == plan.size()) return summary;

  auto source = options.source ? std::move(options.source) : make_energy_source(config.energy, options.log);
  summary.provider = source->provider();
  Runner runner(config, std::move(source), std::move(options.factory));
  auto out = open_for_write(summary.results_path, true);

  summary.warm_up_s = warm_up(config.energy.warm_up_s, options.on_warm_up);
  for (std::size_t it = done_iterations; it < plan.size(); ++it) {
    if (options.stop_after_iterations && it - done_iterations >= *options.stop_after_iterations) break;
    const auto& [combo, rep] = plan[it];
    for (const auto& r : runner.run(combo, rep)) {
      out << csv::join(to_cells(ResultRow::from(r))) << '\n';
      ++summary.rows_written;
    }
    out.flush();
    if (!out) throw IoError(summary.results_path, "write failed");
    cooldown_sleep(config.energy.cooldown_s);
  }
  return summary;
}

}  // namespace driftbench

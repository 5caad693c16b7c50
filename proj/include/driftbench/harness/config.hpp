#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "driftbench/classifiers/model.hpp"
#include "driftbench/csv.hpp"
#include "driftbench/detectors/detector.hpp"
#include "driftbench/energy.hpp"
#include "driftbench/streamgen.hpp"

namespace driftbench {

enum class AlarmMode { first_alarm, continuous };

inline std::string_view to_string(AlarmMode m) { return m == AlarmMode::first_alarm ? "first_alarm" : "continuous"; }

inline AlarmMode parse_alarm_mode(std::string_view s) {
  if (s == "first_alarm") return AlarmMode::first_alarm;
  if (s == "continuous") return AlarmMode::continuous;
  throw std::invalid_argument("unknown alarm mode: " + std::string(s));
}

struct ExperimentConfig {
  std::vector<DetectorKind> detectors{std::begin(kAllDetectors), std::end(kAllDetectors)};
  std::vector<Generator> generators{std::begin(kAllGenerators), std::end(kAllGenerators)};
  std::vector<DriftType> drift_types{std::begin(kAllDriftTypes), std::end(kAllDriftTypes)};
  std::vector<Algorithm> classifiers{std::begin(kDefaultAlgorithms), std::end(kDefaultAlgorithms)};
  unsigned repetitions = 10;
  std::size_t initial_train_len = 8500;
  std::size_t eval_start = 10000;
  std::size_t retrain_eval_len = 1500;  // held-out instances scored after a refit
  std::uint64_t seed = 42;
  AlarmMode alarm_mode = AlarmMode::first_alarm;
  bool fixed_data = false;         // every repetition reuses the repetition-0 stream
  bool share_initial_fit = true;   // one initial fit per (stream, classifier), reused by all detectors
  EnergySettings energy;
  std::filesystem::path output_dir = "results";

  std::size_t rows_per_iteration() const {
    return alarm_mode == AlarmMode::first_alarm ? 1 : DriftSchedule::abrupt_preset().positions.size();
  }

  std::size_t expected_rows() const {
    return detectors.size() * generators.size() * drift_types.size() * classifiers.size() * repetitions *
           rows_per_iteration();
  }

  std::uint64_t stream_seed(unsigned repetition) const { return fixed_data ? seed : seed ^ repetition; }

  std::filesystem::path results_path() const { return output_dir / "results.csv"; }

  void validate() const {
    if (detectors.empty() || generators.empty() || drift_types.empty() || classifiers.empty()) {
      throw std::invalid_argument("config: every factor needs at least one level");
    }
    if (repetitions < 1) throw std::invalid_argument("config: repetitions must be at least 1");
    if (initial_train_len == 0) throw std::invalid_argument("config: initial_train_len must be positive");
    if (retrain_eval_len == 0) throw std::invalid_argument("config: retrain_eval_len must be positive");
    for (auto d : drift_types) {
      const auto schedule = DriftSchedule::preset(d);
      if (!(initial_train_len < schedule.positions.front())) {
        throw std::invalid_argument("config: initial_train_len must precede the first drift of the " +
                                    std::string(to_string(d)) + " schedule");
      }
      if (!(eval_start < schedule.total_length)) throw std::invalid_argument("config: eval_start beyond the stream");
    }
    if (!(energy.proxy_watts > 0.0)) throw std::invalid_argument("config: proxy_watts must be positive");
    if (energy.warm_up_s < 0.0 || energy.cooldown_s < 0.0) {
      throw std::invalid_argument("config: warm-up and cooldown must be non-negative");
    }
  }
};

// ---------------------------------------------------------------------------
// Presets

/// 7 detectors x 5 generators x 2 drift types x 6 classifiers x 10 repetitions.
inline ExperimentConfig default_preset() { return {}; }

/// One cell, one repetition; short warm-up and no cooldown.
inline ExperimentConfig smoke_preset() {
  ExperimentConfig c;
  c.detectors = {DetectorKind::kswin};
  c.generators = {Generator::sine};
  c.drift_types = {DriftType::abrupt};
  c.classifiers = {Algorithm::hoeffding_tree};
  c.repetitions = 1;
  c.energy.warm_up_s = 1.0;
  c.energy.cooldown_s = 0.0;
  return c;
}

/// All detectors and drift types on 2 generators x 2 classifiers x 3 repetitions.
inline ExperimentConfig reduced_preset() {
  ExperimentConfig c;
  c.generators = {Generator::sine, Generator::stagger};
  c.classifiers = {Algorithm::linear_svm, Algorithm::hoeffding_tree};
  c.repetitions = 3;
  c.energy.warm_up_s = 2.0;
  c.energy.cooldown_s = 0.25;
  return c;
}

inline ExperimentConfig preset(std::string_view name) {
  if (name == "default") return default_preset();
  if (name == "smoke") return smoke_preset();
  if (name == "reduced") return reduced_preset();
  throw std::invalid_argument("unknown preset: " + std::string(name));
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

template <class E>
nlohmann::json names(const std::vector<E>& values) {
  nlohmann::json out = nlohmann::json::array();
  for (auto v : values) out.push_back(std::string(to_string(v)));
  return out;
}

template <class E, class Parse>
std::vector<E> parse_names(const nlohmann::json& j, Parse parse) {
  if (!j.is_array()) throw std::invalid_argument("config: expected a list of names");
  std::vector<E> out;
  for (const auto& v : j) out.push_back(parse(v.get<std::string>()));
  return out;
}

}  // namespace detail

/// The fields that determine row content; resume refuses a file written under a different design.
inline nlohmann::json design_to_json(const ExperimentConfig& c) {
  return {{"detectors", detail::names(c.detectors)},
          {"generators", detail::names(c.generators)},
          {"drift_types", detail::names(c.drift_types)},
          {"classifiers", detail::names(c.classifiers)},
          {"repetitions", c.repetitions},
          {"initial_train_len", c.initial_train_len},
          {"eval_start", c.eval_start},
          {"retrain_eval_len", c.retrain_eval_len},
          {"seed", c.seed},
          {"alarm_mode", std::string(to_string(c.alarm_mode))},
          {"fixed_data", c.fixed_data}};
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  auto j = design_to_json(c);
  j["share_initial_fit"] = c.share_initial_fit;
  j["output_dir"] = c.output_dir.string();
  j["energy"] = {{"provider", c.energy.provider},
                 {"proxy_watts", c.energy.proxy_watts},
                 {"warm_up_s", c.energy.warm_up_s},
                 {"cooldown_s", c.energy.cooldown_s},
                 {"powercap_root", c.energy.powercap_root.string()}};
  return j;
}

/// Missing keys keep their defaults (or the named "preset"'s); unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected an object");
  ExperimentConfig c = j.contains("preset") ? preset(j["preset"].get<std::string>()) : ExperimentConfig{};
  for (const auto& [key, v] : j.items()) {
    if (key == "preset") continue;
    if (key == "detectors") c.detectors = detail::parse_names<DetectorKind>(v, parse_detector);
    else if (key == "generators") c.generators = detail::parse_names<Generator>(v, parse_generator);
    else if (key == "drift_types") c.drift_types = detail::parse_names<DriftType>(v, parse_drift_type);
    else if (key == "classifiers") c.classifiers = detail::parse_names<Algorithm>(v, parse_algorithm);
    else if (key == "repetitions") c.repetitions = v.get<unsigned>();
    else if (key == "initial_train_len") c.initial_train_len = v.get<std::size_t>();
    else if (key == "eval_start") c.eval_start = v.get<std::size_t>();
    else if (key == "retrain_eval_len") c.retrain_eval_len = v.get<std::size_t>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "alarm_mode") c.alarm_mode = parse_alarm_mode(v.get<std::string>());
    else if (key == "fixed_data") c.fixed_data = v.get<bool>();
    else if (key == "share_initial_fit") c.share_initial_fit = v.get<bool>();
    else if (key == "output_dir") c.output_dir = v.get<std::string>();
    else if (key == "energy") {
      for (const auto& [ek, ev] : v.items()) {
        if (ek == "provider") c.energy.provider = ev.get<std::string>();
        else if (ek == "proxy_watts") c.energy.proxy_watts = ev.get<double>();
        else if (ek == "warm_up_s") c.energy.warm_up_s = ev.get<double>();
        else if (ek == "cooldown_s") c.energy.cooldown_s = ev.get<double>();
        else if (ek == "powercap_root") c.energy.powercap_root = ev.get<std::string>();
        else throw std::invalid_argument("config: unknown energy key '" + ek + "'");
      }
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  auto in = open_for_read(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, e.what());
  }
  return config_from_json(j);
}

}  // namespace driftbench

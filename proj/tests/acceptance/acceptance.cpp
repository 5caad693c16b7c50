// Acceptance checks. Prints one PASS/FAIL line per criterion, preceded by the
// individual checks that make it up. Exit status is nonzero if any selected
// criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "driftbench/detectors.hpp"
#include "driftbench/harness.hpp"
#include "driftbench/stats.hpp"
#include "harness_fixtures.hpp"
#include "test_support.hpp"

namespace {

using namespace driftbench;
namespace fs = std::filesystem;

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

/// Collects the sub-checks of one criterion.
class Verdict {
 public:
  void check(bool ok, const std::string& what, const std::string& detail = {}) {
    std::cout << "    " << (ok ? "ok  " : "FAIL") << "  " << what;
    if (!detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << '\n';
    ++total_;
    if (!ok) ++failed_;
  }
  bool passed() const { return failed_ == 0 && total_ > 0; }
  std::size_t failed() const { return failed_; }
  std::size_t total() const { return total_; }

 private:
  std::size_t total_ = 0;
  std::size_t failed_ = 0;
};

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count(); }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------
// 1. detector traces

void detector_conformance(Verdict& v) {
  Stopwatch sw;
  const auto doc = testing::load_json("detector_traces.json");
  std::size_t corpus = 0;
  for (const auto& s : doc["streams"]) corpus += s["corpus"].get<bool>() ? 1 : 0;
  v.check(corpus >= 100, "reference corpus size", std::to_string(corpus) + " corpus streams");
  for (auto kind : kAllDetectors) {
    std::size_t streams = 0, mismatched = 0;
    std::string first_bad;
    for (const auto& s : doc["streams"]) {
      std::vector<int> bits;
      for (char c : s["bits"].get<std::string>()) bits.push_back(c - '0');
      auto det = make_detector(kind, s["kswin_seed"].get<std::uint32_t>());
      const auto got = alarm_trace(*det, bits);
      const auto want = s["alarms"][std::string(to_string(kind))].get<std::vector<std::size_t>>();
      ++streams;
      if (got != want) {
        ++mismatched;
        if (first_bad.empty()) first_bad = s["name"].get<std::string>();
      }
    }
    v.check(mismatched == 0, std::string(display_name(kind)) + " traces",
            std::to_string(streams - mismatched) + "/" + std::to_string(streams) + " exact" +
                (first_bad.empty() ? "" : ", first mismatch " + first_bad));
  }
  v.check(sw.seconds() < 60.0, "runtime < 1 min", fmt(sw.seconds(), 1) + " s");
}

// ---------------------------------------------------------------------------
// 2 and 3 share one experiment run

struct ExperimentRun {
  std::string preset;
  std::vector<ResultRow> rows;
  AnalysisReport report;
  double seconds = 0.0;
};

const ExperimentRun& experiment(const std::string& preset_name, const std::optional<fs::path>& keep) {
  static std::map<std::string, ExperimentRun> cache;
  if (auto it = cache.find(preset_name); it != cache.end()) return it->second;
  std::optional<testing::TempDir> scratch;
  ExperimentConfig c = preset(preset_name);
  if (keep) {
    c.output_dir = *keep / preset_name;
    std::filesystem::remove(c.results_path());
  } else {
    scratch.emplace();
    c.output_dir = scratch->path();
  }
  c.energy.provider = "cpu_time_proxy";
  std::cout << "  running the " << preset_name << " preset (" << c.expected_rows()
            << " rows, proxy energy provider)\n"
            << std::flush;
  RunOptions opt;
  opt.log = {};
  Stopwatch sw;
  run_experiment(c, std::move(opt));
  ExperimentRun run;
  run.preset = preset_name;
  run.seconds = sw.seconds();
  run.rows = read_results(c.results_path());
  run.report = analyze(run.rows);
  if (keep) write_report(run.report, c.output_dir / "analysis");
  return cache.emplace(preset_name, std::move(run)).first->second;
}

const AlarmRow* alarm_row(const AnalysisReport& rep, std::string_view det, std::string_view drift) {
  for (const auto& a : rep.alarms) {
    if (a.detector == det && a.drift_type == drift) return &a;
  }
  return nullptr;
}

std::string pct_text(const AlarmRow* a) {
  if (!a) return "no rows";
  return fmt(a->aggregate.true_alarm_pct, 1) + "% (" + std::to_string(a->aggregate.true_count) + "/" +
         std::to_string(a->aggregate.total()) + ")";
}

void accuracy_table(Verdict& v, const ExperimentRun& run) {
  const auto& rep = run.report;
  const double budget = run.preset == "default" ? 2.5 * 3600 : 600.0;
  v.check(run.seconds <= budget, "runtime of the " + run.preset + " preset", fmt(run.seconds, 1) + " s");

  std::cout << "    alarm table (true % / mean closeness):\n";
  for (const auto& a : rep.alarms) {
    std::cout << "      " << a.detector << ' ' << a.drift_type << ": " << pct_text(&a) << ", closeness "
              << (a.aggregate.mean_closeness ? fmt(*a.aggregate.mean_closeness, 3) : "n/a") << '\n';
  }

  const auto* kswin = alarm_row(rep, "KSWIN", "abrupt");
  v.check(kswin && kswin->aggregate.true_alarm_pct >= 80.0, "KSWIN abrupt true alarms >= 80%", pct_text(kswin));
  for (const char* d : {"abrupt", "gradual"}) {
    const auto* a = alarm_row(rep, "HDDM_W", d);
    v.check(a && std::abs(a->aggregate.true_alarm_pct - 60.0) <= 15.0,
            std::string("HDDM_W ") + d + " true alarms within 60 +- 15%", pct_text(a));
  }
  for (const char* det : {"HDDM_A", "PageHinkley", "DDM", "EDDM"}) {
    for (const char* d : {"abrupt", "gradual"}) {
      const auto* a = alarm_row(rep, det, d);
      v.check(a && a->aggregate.true_alarm_pct <= 15.0, std::string(det) + " " + d + " true alarms <= 15%",
              pct_text(a));
    }
  }
  v.check(kswin && kswin->aggregate.mean_closeness && *kswin->aggregate.mean_closeness >= 0.95,
          "KSWIN abrupt mean closeness >= 0.95",
          kswin && kswin->aggregate.mean_closeness ? fmt(*kswin->aggregate.mean_closeness, 4) : "n/a");
  for (const char* d : {"abrupt", "gradual"}) {
    const auto* eddm = alarm_row(rep, "EDDM", d);
    std::string lowest = "none";
    double low = 2.0;
    for (const auto& a : rep.alarms) {
      if (a.drift_type != d || !a.aggregate.mean_closeness) continue;
      if (*a.aggregate.mean_closeness < low) {
        low = *a.aggregate.mean_closeness;
        lowest = a.detector;
      }
    }
    v.check(lowest == "EDDM", std::string("EDDM has the lowest mean closeness (") + d + ")",
            "lowest is " + lowest + " at " + fmt(low, 3) + ", EDDM " +
                (eddm && eddm->aggregate.mean_closeness ? fmt(*eddm->aggregate.mean_closeness, 3) : "n/a"));
  }
}

void energy_ordering(Verdict& v, const ExperimentRun& run) {
  std::map<std::string, double> median;
  for (const auto& e : run.report.energy) median[e.detector] = e.detect_median;
  std::cout << "    median detection energy per iteration (J):\n";
  for (const auto& [det, m] : median) std::cout << "      " << det << ": " << fmt(m, 6) << '\n';
  v.check(median.size() == std::size(kAllDetectors), "all detectors present", std::to_string(median.size()));
  if (median.size() != std::size(kAllDetectors)) return;
  v.check(median["KSWIN"] > median["ADWIN"], "KSWIN > ADWIN",
          fmt(median["KSWIN"], 6) + " vs " + fmt(median["ADWIN"], 6));
  for (const char* det : {"DDM", "EDDM", "HDDM_A", "HDDM_W", "PageHinkley"}) {
    v.check(median["ADWIN"] > median[det], std::string("ADWIN > ") + det,
            fmt(median["ADWIN"], 6) + " vs " + fmt(median[det], 6));
  }
  const TwoSampleTest* pair = nullptr;
  for (const auto& t : run.report.detector_pairs) {
    const std::set<std::string> labels{t.label_a, t.label_b};
    if (labels == std::set<std::string>{"KSWIN", "PageHinkley"}) pair = &t;
  }
  v.check(pair && pair->pct_difference && *pair->pct_difference >= 40.0, "KSWIN vs PageHinkley pct_difference >= 40%",
          pair && pair->pct_difference ? fmt(*pair->pct_difference, 1) + "%, d = " +
                                              (pair->cohens_d ? fmt(std::abs(*pair->cohens_d), 2) : "n/a")
                                        : "n/a");
}

// ---------------------------------------------------------------------------
// 4. statistics

std::vector<double> as_vector(const nlohmann::json& j) { return j.get<std::vector<double>>(); }

std::vector<double> draw(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> out(n);
  for (double& x : out) x = ties ? std::round(z(rng) * 2.0) : z(rng);
  return out;
}

void statistics(Verdict& v) {
  using namespace driftbench::stats;
  Stopwatch sw;

  {
    bool ok = true;
    const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
    const auto r = mann_whitney_u(a, b);
    ok &= r.statistic == 0.0 && r.exact && r.p_value == 0.1;
    const std::vector<double> c{1, 4, 5, 8}, d{2, 3, 6, 7};
    ok &= mann_whitney_u(c, d).p_value == 1.0;
    double total = 0;
    for (double x : mann_whitney_null_counts(4, 5)) total += x;
    ok &= total == 126.0;
    ok &= holm_bonferroni(std::vector<double>{0.01, 0.04}) == std::vector<double>{0.02, 0.04};
    ok &= std::abs(cohens_d(std::vector<double>{2, 4}, std::vector<double>{0, 2}) - std::sqrt(2.0)) < 1e-15;
    ok &= pct_difference(2, 1) == 50.0 && pct_difference(1, 2) == 50.0;
    ok &= rankdata(std::vector<double>{10, 20, 10, 30, 20, 20}) == std::vector<double>{1.5, 4, 1.5, 6, 4, 4};
    const std::vector<double> x{0.3, 1.2, -4, 8, 2.5};
    std::vector<double> up;
    for (double t : x) up.push_back(std::exp(t));
    const auto s = spearman(x, up);
    ok &= s.statistic == 1.0 && s.p_value == 0.0;
    v.check(ok, "hand and enumeration values");
  }

  const auto doc = testing::load_json("stats_fixtures.json");
  {
    std::size_t bad = 0, n = 0;
    double worst = 0;
    for (const auto& c : doc["mann_whitney_u"]) {
      const auto r = mann_whitney_u(as_vector(c["a"]), as_vector(c["b"]));
      const double err = std::abs(r.p_value - c["p"].get<double>());
      worst = std::max(worst, err);
      bad += (r.exact != c["exact"].get<bool>() || r.statistic != c["u"].get<double>() || err > 1e-6) ? 1 : 0;
      ++n;
    }
    v.check(bad == 0 && n > 0, "Mann-Whitney U vs oracle (p within 1e-6)",
            std::to_string(n) + " cases, max |dp| " + std::to_string(worst));
  }
  {
    std::size_t bad = 0, n = 0;
    for (const auto& c : doc["spearman"]) {
      const auto r = spearman(as_vector(c["a"]), as_vector(c["b"]));
      bad += (std::abs(r.statistic - c["rho"].get<double>()) > 1e-9 || std::abs(r.p_value - c["p"].get<double>()) > 1e-6)
                 ? 1
                 : 0;
      ++n;
    }
    v.check(bad == 0 && n > 0, "Spearman vs oracle (rho 1e-9, p 1e-6)", std::to_string(n) + " cases");
  }
  {
    std::size_t bad = 0, n = 0;
    for (const auto& c : doc["shapiro_wilk"]) {
      const auto r = shapiro_wilk(as_vector(c["x"]));
      bad += (std::abs(r.statistic - c["w"].get<double>()) > 1e-6 || std::abs(r.p_value - c["p"].get<double>()) > 1e-6)
                 ? 1
                 : 0;
      ++n;
    }
    v.check(bad == 0 && n > 0, "Shapiro-Wilk vs oracle (W and p 1e-6)", std::to_string(n) + " cases");
  }
  {
    std::size_t bad = 0, n = 0;
    for (const auto& c : doc["holm"]) {
      const auto adj = holm_bonferroni(as_vector(c["p"]));
      const auto want = as_vector(c["adjusted"]);
      bool ok = adj.size() == want.size();
      for (std::size_t i = 0; ok && i < adj.size(); ++i) ok = std::abs(adj[i] - want[i]) <= 1e-12;
      bad += ok ? 0 : 1;
      ++n;
    }
    v.check(bad == 0 && n > 0, "Holm vs oracle (1e-12)", std::to_string(n) + " cases");
  }

  {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> p(1 + rng() % 30);
      for (double& x : p) x = std::pow(u(rng), 3);
      const auto adj = holm_bonferroni(p);
      std::vector<std::size_t> order(p.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return p[a] < p[b]; });
      bool ok = true;
      for (std::size_t k = 0; k < p.size(); ++k) {
        ok &= adj[order[k]] >= p[order[k]] && adj[order[k]] <= 1.0;
        if (k > 0) ok &= adj[order[k]] >= adj[order[k - 1]];
      }
      bad += ok ? 0 : 1;
    }
    v.check(bad == 0, "Holm monotonicity, 1000 random cases", std::to_string(bad) + " violations");
  }
  {
    std::mt19937_64 rng(8);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const bool ties = trial % 2 == 0;
      const auto a = draw(rng, 1 + rng() % 15, ties);
      const auto b = draw(rng, 1 + rng() % 15, ties);
      auto map = [](std::vector<double> x) {
        for (double& t : x) t = std::exp(t) * 3.0 + 1.0;
        return x;
      };
      const auto r0 = mann_whitney_u(a, b);
      const auto r1 = mann_whitney_u(map(a), map(b));
      bad += (r0.statistic == r1.statistic && r0.p_value == r1.p_value && r0.p_value >= 0 && r0.p_value <= 1) ? 0 : 1;
    }
    v.check(bad == 0, "Mann-Whitney monotone-transform invariance, 1000 cases", std::to_string(bad) + " violations");
  }
  {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    std::size_t bad = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const auto a = draw(rng, 2 + rng() % 20, false);
      const auto b = draw(rng, 2 + rng() % 20, false);
      const double shift = u(rng), scale = std::exp(u(rng) / 2.0);
      auto tf = [&](std::vector<double> x) {
        for (double& t : x) t = t * scale + shift;
        return x;
      };
      const double d = cohens_d(a, b);
      bad += std::abs(cohens_d(tf(a), tf(b)) - d) <= 1e-9 * std::max(1.0, std::abs(d)) ? 0 : 1;
    }
    v.check(bad == 0, "Cohen's d shift/scale invariance, 1000 cases", std::to_string(bad) + " violations");
  }
  v.check(sw.seconds() < 60.0, "runtime < 1 min", fmt(sw.seconds(), 1) + " s");
}

// ---------------------------------------------------------------------------
// 5. pipeline invariants

std::vector<ResultRow> stripped(const std::vector<ResultRow>& rows) {
  std::vector<ResultRow> out;
  for (const auto& r : rows) out.push_back(testing::without_energy(r));
  return out;
}

void pipeline(Verdict& v) {
  Stopwatch sw;
  testing::TempDir a, b, c;
  auto config_in = [](const fs::path& dir) {
    auto cfg = smoke_preset();
    cfg.energy.provider = "cpu_time_proxy";
    cfg.output_dir = dir;
    return cfg;
  };
  auto quiet = [] {
    RunOptions o;
    o.log = {};
    return o;
  };
  const auto ca = config_in(a.path()), cb = config_in(b.path()), cc = config_in(c.path());

  bool busy = false;
  std::string error;
  try {
    run_experiment(ca, quiet());
    run_experiment(cb, quiet());
  } catch (const MeterBusyError&) {
    busy = true;
  } catch (const std::exception& e) {
    error = e.what();
  }
  v.check(!busy && error.empty(), "meter occupancy guard never trips", busy ? "MeterBusyError" : error);
  if (busy || !error.empty()) return;

  const auto ra = read_results(ca.results_path());
  const auto rb = read_results(cb.results_path());
  v.check(ra.size() == ca.expected_rows(), "row conservation",
          std::to_string(ra.size()) + " of " + std::to_string(ca.expected_rows()) + " rows");

  bool partition = true;
  const std::size_t per_cell = ca.generators.size() * ca.classifiers.size() * ca.repetitions;
  for (auto det : ca.detectors) {
    for (auto d : ca.drift_types) {
      std::size_t t = 0, f = 0, m = 0;
      for (const auto& r : ra) {
        if (r.detector != det || r.drift_type != d) continue;
        (r.alarm_kind == AlarmKind::true_alarm ? t : r.alarm_kind == AlarmKind::false_alarm ? f : m)++;
      }
      partition &= t + f + m == per_cell;
    }
  }
  v.check(partition, "alarm partition sums to runs per cell", std::to_string(per_cell) + " per cell");
  v.check(stripped(ra) == stripped(rb), "repeated runs agree outside the energy columns");

  // interrupted run: preamble plus a torn row, then resume
  {
    std::ofstream out(cc.results_path());
    out << results_preamble(design_to_json(cc).dump()) << "kswin,sine,abr";
  }
  const auto resumed = run_experiment(cc, quiet());
  const auto rc = read_results(cc.results_path());
  v.check(resumed.rows_resumed == 0 && stripped(rc) == stripped(ra), "resume after a torn write equals a clean run");
  const auto again = run_experiment(cc, quiet());
  v.check(again.rows_written == 0 && read_results(cc.results_path()) == rc, "resume of a finished file is a no-op");

  bool determinism = true;
  for (auto g : kAllGenerators) {
    for (auto d : kAllDriftTypes) {
      const auto spec = StreamSpec::make(g, d, ca.stream_seed(0));
      determinism &= generate_stream(spec).instances == generate_stream(spec).instances;
    }
  }
  v.check(determinism, "stream determinism (all generators and drift types)");
  v.check(sw.seconds() < 300.0, "runtime < 5 min", fmt(sw.seconds(), 1) + " s");
}

// ---------------------------------------------------------------------------
// 6. analysis fixtures

void analysis_fixtures(Verdict& v) {
  const auto rep = analyze(testing::double_energy_fixture());
  const TwoSampleTest* t = rep.detector_pairs.size() == 1 ? &rep.detector_pairs[0] : nullptr;
  v.check(t && t->pct_difference && std::abs(*t->pct_difference - 50.0) <= 0.1, "2x fixture pct_difference = 50.0 +- 0.1",
          t && t->pct_difference ? fmt(*t->pct_difference, 6) : "n/a");
  v.check(t && t->p_holm && *t->p_holm < 0.05, "2x fixture Holm-adjusted p < 0.05",
          t && t->p_holm ? std::to_string(*t->p_holm) : "n/a");

  const auto rep2 = analyze(testing::alarm_table_fixture());
  const auto* a = alarm_row(rep2, "KSWIN", "abrupt");
  const double pct = a ? std::round(a->aggregate.true_alarm_pct * 10.0) / 10.0 : -1.0;
  v.check(a && pct == 93.0, "alarm-table fixture true alarms = 93.0%", a ? fmt(a->aggregate.true_alarm_pct, 4) : "n/a");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<int> selected;
  std::string preset_name = "reduced";
  std::optional<fs::path> keep;
  app.add_option("-c,--criterion", selected, "Criteria to run (default: all)")->check(CLI::Range(1, 6));
  app.add_option("-p,--preset", preset_name, "Experiment preset for criteria 2 and 3")->capture_default_str();
  app.add_option("--keep", keep, "Keep results and analysis under this directory");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6};

  const std::map<int, std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {1, {"detector conformance", detector_conformance}},
      {2, {"accuracy table (" + preset_name + " preset)",
           [&](Verdict& v) { accuracy_table(v, experiment(preset_name, keep)); }}},
      {3, {"energy ordering (" + preset_name + " preset)",
           [&](Verdict& v) { energy_ordering(v, experiment(preset_name, keep)); }}},
      {4, {"statistics conformance", statistics}},
      {5, {"pipeline invariants (smoke preset)", pipeline}},
      {6, {"analysis fixtures", analysis_fixtures}},
  };

  std::vector<std::string> summary;
  bool all = true;
  for (int k : selected) {
    const auto& [name, fn] = criteria.at(k);
    std::cout << "criterion " << k << ": " << name << '\n';
    Verdict v;
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.check(false, "completed without error", e.what());
    }
    const std::string line = std::string(v.passed() ? "PASS" : "FAIL") + "  criterion " + std::to_string(k) + ": " +
                             name + " (" + std::to_string(v.total() - v.failed()) + "/" +
                             std::to_string(v.total()) + " checks)";
    std::cout << line << "\n\n";
    summary.push_back(line);
    all &= v.passed();
  }
  if (selected.size() > 1) {
    std::cout << "summary\n";
    for (const auto& l : summary) std::cout << l << '\n';
  }
  return all ? 0 : 1;
}

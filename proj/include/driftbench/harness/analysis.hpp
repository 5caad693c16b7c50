#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "driftbench/csv.hpp"
#include "driftbench/harness/results.hpp"
#include "driftbench/metrics.hpp"
#include "driftbench/stats.hpp"

namespace driftbench {

enum class EnergyMeasure { detection, retrain, combined };

inline std::string_view to_string(EnergyMeasure m) {
  switch (m) {
    case EnergyMeasure::detection: return "detection";
    case EnergyMeasure::retrain: return "retrain";
    case EnergyMeasure::combined: return "combined";
  }
  return "?";
}

inline EnergyMeasure parse_energy_measure(std::string_view s) {
  for (auto m : {EnergyMeasure::detection, EnergyMeasure::retrain, EnergyMeasure::combined}) {
    if (s == to_string(m)) return m;
  }
  throw std::invalid_argument("unknown energy measure: " + std::string(s));
}

/// Value of `m` for a row; retrain energy is absent for missed alarms.
inline std::optional<double> energy_of(const ResultRow& r, EnergyMeasure m) {
  switch (m) {
    case EnergyMeasure::detection: return r.detect_energy_j;
    case EnergyMeasure::retrain: return r.retrain_energy_j;
    case EnergyMeasure::combined: return r.combined_energy_j();
  }
  return std::nullopt;
}

struct AnalysisOptions {
  EnergyMeasure measure = EnergyMeasure::detection;  // for the pairwise and drift-type tests
  std::size_t min_rows = 2;                          // per sample; smaller cells are flagged
};

/// Cell status values.
inline constexpr const char* kOk = "ok";
inline constexpr const char* kInsufficientRows = "insufficient_rows";
inline constexpr const char* kDegenerate = "degenerate";

struct TwoSampleTest {
  std::string group;  // detector for drift-type tests, empty for detector pairs
  std::string label_a;
  std::string label_b;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  std::optional<double> mean_a;
  std::optional<double> mean_b;
  std::optional<double> pct_difference;
  std::optional<double> cohens_d;
  std::optional<double> u_statistic;
  std::optional<double> p_value;
  std::optional<double> p_holm;
  std::string status = kOk;
};

struct AlarmRow {
  std::string detector;
  std::string drift_type;
  AlarmAggregate aggregate;
};

struct EnergySummaryRow {
  std::string detector;
  std::size_t n = 0;
  double detect_mean = 0, detect_median = 0;
  std::size_t retrain_n = 0;
  std::optional<double> retrain_mean;
  double combined_mean = 0, combined_median = 0;
  double train_mean = 0;
};

struct CorrelationRow {
  std::string detector;
  std::string target;  // detect_energy_j or closeness
  std::size_t n = 0;
  std::optional<double> rho;
  std::optional<double> p_value;
  std::string status = kOk;
};

struct NormalityRow {
  std::string measure;
  std::size_t n = 0;
  std::optional<double> w;
  std::optional<double> p_value;
  std::string status = kOk;
};

struct AnalysisReport {
  std::string measure = "detection";
  std::size_t rows = 0;
  std::vector<TwoSampleTest> detector_pairs;
  std::vector<TwoSampleTest> drift_types;
  std::vector<AlarmRow> alarms;
  std::vector<EnergySummaryRow> energy;
  std::vector<CorrelationRow> classifier_correlation;
  std::vector<NormalityRow> normality;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline TwoSampleTest two_sample(const std::vector<double>& a, const std::vector<double>& b, std::size_t min_rows) {
  TwoSampleTest t;
  t.n_a = a.size();
  t.n_b = b.size();
  if (a.size() < min_rows || b.size() < min_rows || a.empty() || b.empty()) {
    t.status = kInsufficientRows;
    return t;
  }
  t.mean_a = mean_of(a);
  t.mean_b = mean_of(b);
  const auto mw = stats::mann_whitney_u(a, b);
  t.u_statistic = mw.statistic;
  t.p_value = mw.p_value;
  if (*t.mean_a > 0 && *t.mean_b > 0) t.pct_difference = stats::pct_difference(*t.mean_a, *t.mean_b);
  try {
    t.cohens_d = stats::cohens_d(a, b);
  } catch (const std::exception&) {
    t.status = kDegenerate;  // zero spread or too few values: d undefined
  }
  return t;
}

inline void apply_holm(std::vector<TwoSampleTest>& tests) {
  std::vector<double> p;
  for (const auto& t : tests) {
    if (t.p_value) p.push_back(*t.p_value);
  }
  const auto adj = stats::holm_bonferroni(p);
  std::size_t k = 0;
  for (auto& t : tests) {
    if (t.p_value) t.p_holm = adj[k++];
  }
}

template <class E, std::size_t N>
std::vector<E> present(const E (&all)[N], const std::vector<ResultRow>& rows, E ResultRow::*field) {
  std::vector<E> out;
  for (E e : all) {
    if (std::any_of(rows.begin(), rows.end(), [&](const ResultRow& r) { return r.*field == e; })) out.push_back(e);
  }
  return out;
}

}  // namespace detail

inline AnalysisReport analyze(const std::vector<ResultRow>& rows, const AnalysisOptions& opt = {}) {
  AnalysisReport rep;
  rep.measure = std::string(to_string(opt.measure));
  rep.rows = rows.size();
  const auto detectors = detail::present(kAllDetectors, rows, &ResultRow::detector);
  const auto drift_types = detail::present(kAllDriftTypes, rows, &ResultRow::drift_type);

  auto energies = [&](auto pred) {
    std::vector<double> v;
    for (const auto& r : rows) {
      if (!pred(r)) continue;
      if (auto e = energy_of(r, opt.measure)) v.push_back(*e);
    }
    return v;
  };

  // pairwise detector energy
  for (std::size_t i = 0; i < detectors.size(); ++i) {
    for (std::size_t j = i + 1; j < detectors.size(); ++j) {
      auto t = detail::two_sample(energies([&](const ResultRow& r) { return r.detector == detectors[i]; }),
                                  energies([&](const ResultRow& r) { return r.detector == detectors[j]; }),
                                  opt.min_rows);
      t.label_a = display_name(detectors[i]);
      t.label_b = display_name(detectors[j]);
      rep.detector_pairs.push_back(std::move(t));
    }
  }
  detail::apply_holm(rep.detector_pairs);

  // abrupt vs gradual per detector
  for (auto det : detectors) {
    auto side = [&](DriftType d) {
      return energies([&](const ResultRow& r) { return r.detector == det && r.drift_type == d; });
    };
    auto t = detail::two_sample(side(DriftType::abrupt), side(DriftType::gradual), opt.min_rows);
    t.group = display_name(det);
    t.label_a = "abrupt";
    t.label_b = "gradual";
    rep.drift_types.push_back(std::move(t));
  }
  detail::apply_holm(rep.drift_types);

  // alarm aggregates
  for (auto det : detectors) {
    for (auto d : drift_types) {
      std::size_t counts[3] = {0, 0, 0};
      double cs = 0;
      for (const auto& r : rows) {
        if (r.detector != det || r.drift_type != d) continue;
        ++counts[static_cast<int>(r.alarm_kind)];
        if (r.alarm_kind == AlarmKind::true_alarm) cs += *r.closeness;
      }
      if (counts[0] + counts[1] + counts[2] == 0) continue;
      std::optional<double> mc;
      if (counts[0]) mc = cs / static_cast<double>(counts[0]);
      rep.alarms.push_back({std::string(display_name(det)), std::string(to_string(d)),
                            aggregate_counts(counts[0], counts[1], counts[2], mc)});
    }
  }

  // energy summary under all three readings
  for (auto det : detectors) {
    EnergySummaryRow s;
    s.detector = display_name(det);
    std::vector<double> detect, retrain, combined, train;
    for (const auto& r : rows) {
      if (r.detector != det) continue;
      detect.push_back(r.detect_energy_j);
      combined.push_back(r.combined_energy_j());
      train.push_back(r.train_energy_j);
      if (r.retrain_energy_j) retrain.push_back(*r.retrain_energy_j);
    }
    s.n = detect.size();
    s.detect_mean = detail::mean_of(detect);
    s.detect_median = detail::median_of(detect);
    s.retrain_n = retrain.size();
    if (!retrain.empty()) s.retrain_mean = detail::mean_of(retrain);
    s.combined_mean = detail::mean_of(combined);
    s.combined_median = detail::median_of(combined);
    s.train_mean = detail::mean_of(train);
    rep.energy.push_back(s);
  }

  // classifier (label-encoded by enumeration index) vs detection energy and closeness
  for (auto det : detectors) {
    for (std::string target : {"detect_energy_j", "closeness"}) {
      std::vector<double> code, value;
      for (const auto& r : rows) {
        if (r.detector != det) continue;
        const std::optional<double> v = target == "closeness" ? r.closeness : std::optional<double>(r.detect_energy_j);
        if (!v) continue;
        code.push_back(static_cast<double>(static_cast<int>(r.classifier)));
        value.push_back(*v);
      }
      CorrelationRow c;
      c.detector = display_name(det);
      c.target = target;
      c.n = code.size();
      if (code.size() < std::max<std::size_t>(3, opt.min_rows)) {
        c.status = kInsufficientRows;
      } else {
        try {
          const auto s = stats::spearman(code, value);
          c.rho = s.statistic;
          c.p_value = s.p_value;
        } catch (const stats::DegenerateInput&) {
          c.status = kDegenerate;  // a single classifier or constant values
        }
      }
      rep.classifier_correlation.push_back(c);
    }
  }

  // normality of the pooled energy distributions
  for (auto m : {EnergyMeasure::detection, EnergyMeasure::retrain, EnergyMeasure::combined}) {
    NormalityRow n;
    n.measure = to_string(m);
    std::vector<double> values;
    for (const auto& r : rows) {
      if (auto e = energy_of(r, m)) values.push_back(*e);
    }
    n.n = values.size();
    if (values.size() < 3) {
      n.status = kInsufficientRows;
    } else if (values.size() > 5000) {
      n.status = "n_above_5000";
    } else {
      try {
        const auto s = stats::shapiro_wilk(values);
        n.w = s.statistic;
        n.p_value = s.p_value;
      } catch (const stats::DegenerateInput&) {
        n.status = kDegenerate;
      }
    }
    rep.normality.push_back(n);
  }
  return rep;
}

inline AnalysisReport analyze_file(const std::filesystem::path& results, const AnalysisOptions& opt = {}) {
  return analyze(read_results(results), opt);
}

// ---------------------------------------------------------------------------
// Tables (exact values) and markdown (rounded for reading)

namespace detail {

inline std::string cell(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }
inline std::string cell(double v) { return csv::format_double(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }

inline std::optional<double> opt_num(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return csv::parse_double(s);
}

inline std::size_t count_of(const std::string& s) { return static_cast<std::size_t>(csv::parse_int(s)); }

}  // namespace detail

struct ReportTables {
  csv::Table detector_pairs;
  csv::Table drift_types;
  csv::Table alarms;
  csv::Table energy;
  csv::Table classifier_correlation;
  csv::Table normality;

  bool operator==(const ReportTables&) const = default;
};

inline const std::vector<std::string>& two_sample_header() {
  static const std::vector<std::string> h = {"group",   "a",       "b",      "n_a",    "n_b",
                                             "mean_a_j", "mean_b_j", "pct_difference", "cohens_d", "u_statistic",
                                             "p_value", "p_holm",  "status"};
  return h;
}

inline ReportTables to_tables(const AnalysisReport& rep) {
  using detail::cell;
  ReportTables t;
  auto two = [&](const std::vector<TwoSampleTest>& tests) {
    csv::Table table{two_sample_header(), {}};
    for (const auto& x : tests) {
      table.rows.push_back({x.group, x.label_a, x.label_b, cell(x.n_a), cell(x.n_b), cell(x.mean_a), cell(x.mean_b),
                            cell(x.pct_difference), cell(x.cohens_d), cell(x.u_statistic), cell(x.p_value),
                            cell(x.p_holm), x.status});
    }
    return table;
  };
  t.detector_pairs = two(rep.detector_pairs);
  t.drift_types = two(rep.drift_types);
  t.alarms.header = {"detector", "drift_type", "runs", "true", "false", "missed", "true_alarm_pct", "mean_closeness"};
  for (const auto& a : rep.alarms) {
    const auto& g = a.aggregate;
    t.alarms.rows.push_back({a.detector, a.drift_type, cell(g.total()), cell(g.true_count), cell(g.false_count),
                             cell(g.missed_count), cell(g.true_alarm_pct), cell(g.mean_closeness)});
  }
  t.energy.header = {"detector",       "n",
                     "detect_mean_j",  "detect_median_j",
                     "retrain_n",      "retrain_mean_j",
                     "combined_mean_j", "combined_median_j",
                     "train_mean_j"};
  for (const auto& e : rep.energy) {
    t.energy.rows.push_back({e.detector, cell(e.n), cell(e.detect_mean), cell(e.detect_median), cell(e.retrain_n),
                             cell(e.retrain_mean), cell(e.combined_mean), cell(e.combined_median),
                             cell(e.train_mean)});
  }
  t.classifier_correlation.header = {"detector", "target", "n", "rho", "p_value", "status"};
  for (const auto& c : rep.classifier_correlation) {
    t.classifier_correlation.rows.push_back({c.detector, c.target, cell(c.n), cell(c.rho), cell(c.p_value), c.status});
  }
  t.normality.header = {"measure", "n", "w", "p_value", "status"};
  for (const auto& n : rep.normality) {
    t.normality.rows.push_back({n.measure, cell(n.n), cell(n.w), cell(n.p_value), n.status});
  }
  return t;
}

inline const char* const kTableFiles[] = {"energy_pairs.csv",           "drift_type_energy.csv", "alarms.csv",
                                          "energy_summary.csv",         "classifier_correlation.csv",
                                          "normality.csv"};

inline void write_tables(const ReportTables& t, const std::filesystem::path& dir) {
  csv::write_table(t.detector_pairs, dir / kTableFiles[0]);
  csv::write_table(t.drift_types, dir / kTableFiles[1]);
  csv::write_table(t.alarms, dir / kTableFiles[2]);
  csv::write_table(t.energy, dir / kTableFiles[3]);
  csv::write_table(t.classifier_correlation, dir / kTableFiles[4]);
  csv::write_table(t.normality, dir / kTableFiles[5]);
}

inline ReportTables read_tables(const std::filesystem::path& dir) {
  ReportTables t;
  t.detector_pairs = csv::read_table(dir / kTableFiles[0]);
  t.drift_types = csv::read_table(dir / kTableFiles[1]);
  t.alarms = csv::read_table(dir / kTableFiles[2]);
  t.energy = csv::read_table(dir / kTableFiles[3]);
  t.classifier_correlation = csv::read_table(dir / kTableFiles[4]);
  t.normality = csv::read_table(dir / kTableFiles[5]);
  return t;
}

namespace detail {

/// Fixed decimals for the markdown view; empty cells become "n/a".
inline std::string fmt(const std::string& exact, int decimals) {
  if (exact.empty()) return "n/a";
  const double v = csv::parse_double(exact);
  char buf[64];
  if (v != 0.0 && std::abs(v) < std::pow(10.0, -decimals)) {
    std::snprintf(buf, sizeof buf, "%.2e", v);
  } else {
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  }
  return buf;
}

inline void md_table(std::ostringstream& md, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  md << '|';
  for (const auto& h : header) md << ' ' << h << " |";
  md << "\n|";
  for (std::size_t i = 0; i < header.size(); ++i) md << "---|";
  md << '\n';
  for (const auto& r : rows) {
    md << '|';
    for (const auto& c : r) md << ' ' << c << " |";
    md << '\n';
  }
  md << '\n';
}

}  // namespace detail

/// Markdown rendering of the tables; every table keeps its header when empty.
inline std::string render_markdown(const ReportTables& t) {
  using detail::fmt;
  std::ostringstream md;
  md << "# Drift detector benchmark report\n\n";

  md << "## Detection energy by detector pair\n\n"
     << "Mann-Whitney U, Holm-Bonferroni adjusted over all pairs. Difference is 100 |mA - mB| / max(mA, mB).\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    const auto& tb = t.detector_pairs;
    for (const auto& r : tb.rows) {
      rows.push_back({r[tb.column("a")], r[tb.column("b")], fmt(r[tb.column("mean_a_j")], 4),
                      fmt(r[tb.column("mean_b_j")], 4), fmt(r[tb.column("pct_difference")], 1),
                      fmt(r[tb.column("cohens_d")], 2), fmt(r[tb.column("p_holm")], 4), r[tb.column("status")]});
    }
    detail::md_table(md, {"Detector A", "Detector B", "Mean A (J)", "Mean B (J)", "Difference (%)", "Cohen's d",
                          "Adjusted p", "Status"},
                     rows);
  }

  md << "## Alarms by detector and drift type\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    const auto& tb = t.alarms;
    for (const auto& r : tb.rows) {
      rows.push_back({r[tb.column("detector")], r[tb.column("drift_type")], r[tb.column("true")],
                      r[tb.column("false")], r[tb.column("missed")], fmt(r[tb.column("true_alarm_pct")], 1),
                      fmt(r[tb.column("mean_closeness")], 3)});
    }
    detail::md_table(md, {"Detector", "Drift", "True", "False", "Missed", "True alarms (%)", "Closeness"}, rows);
  }

  md << "## Abrupt vs gradual detection energy\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    const auto& tb = t.drift_types;
    for (const auto& r : tb.rows) {
      rows.push_back({r[tb.column("group")], fmt(r[tb.column("mean_a_j")], 4), fmt(r[tb.column("mean_b_j")], 4),
                      fmt(r[tb.column("pct_difference")], 1), fmt(r[tb.column("cohens_d")], 2),
                      fmt(r[tb.column("p_value")], 4), fmt(r[tb.column("p_holm")], 4), r[tb.column("status")]});
    }
    detail::md_table(md, {"Detector", "Abrupt (J)", "Gradual (J)", "Difference (%)", "Cohen's d", "p",
                          "Adjusted p", "Status"},
                     rows);
  }

  md << "## Energy summary\n\nCombined = detection + retraining (zero when no alarm fired).\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    const auto& tb = t.energy;
    for (const auto& r : tb.rows) {
      rows.push_back({r[tb.column("detector")], r[tb.column("n")], fmt(r[tb.column("detect_mean_j")], 6),
                      fmt(r[tb.column("detect_median_j")], 6), fmt(r[tb.column("retrain_mean_j")], 4),
                      fmt(r[tb.column("combined_mean_j")], 4), fmt(r[tb.column("train_mean_j")], 4)});
    }
    detail::md_table(md, {"Detector", "Runs", "Detection mean (J)", "Detection median (J)", "Retrain mean (J)",
                          "Combined mean (J)", "Initial fit mean (J)"},
                     rows);
  }

  md << "## Base classifier correlation (Spearman)\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    const auto& tb = t.classifier_correlation;
    for (const auto& r : tb.rows) {
      rows.push_back({r[tb.column("detector")], r[tb.column("target")], r[tb.column("n")],
                      fmt(r[tb.column("rho")], 3), fmt(r[tb.column("p_value")], 4), r[tb.column("status")]});
    }
    detail::md_table(md, {"Detector", "Against", "n", "rho", "p", "Status"}, rows);
  }

  md << "## Normality (Shapiro-Wilk)\n\n";
  {
    std::vector<std::vector<std::string>> rows;
    const auto& tb = t.normality;
    for (const auto& r : tb.rows) {
      rows.push_back({r[tb.column("measure")], r[tb.column("n")], fmt(r[tb.column("w")], 4),
                      r[tb.column("p_value")].empty() ? "n/a" : r[tb.column("p_value")], r[tb.column("status")]});
    }
    detail::md_table(md, {"Energy", "n", "W", "p", "Status"}, rows);
  }
  return md.str();
}

/// Writes the CSV tables and report.md into `dir`.
inline void write_report(const AnalysisReport& rep, const std::filesystem::path& dir) {
  const auto tables = to_tables(rep);
  write_tables(tables, dir);
  auto out = open_for_write(dir / "report.md");
  out << render_markdown(tables);
  if (!out) throw IoError(dir / "report.md", "write failed");
}

}  // namespace driftbench

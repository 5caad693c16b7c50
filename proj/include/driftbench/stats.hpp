#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace driftbench::stats {

enum class Method { shapiro_wilk, mann_whitney_u, spearman };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::shapiro_wilk: return "shapiro_wilk";
    case Method::mann_whitney_u: return "mann_whitney_u";
    case Method::spearman: return "spearman";
  }
  return "?";
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Method method = Method::mann_whitney_u;
  bool exact = false;  // Mann-Whitney only: exact null distribution used
};

/// Thrown for inputs where a statistic is undefined (zero variance etc.).
class DegenerateInput : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline double norm_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

inline double norm_ppf(double p) { return boost::math::quantile(boost::math::normal_distribution<>(), p); }

inline double clip01(double p) { return std::clamp(p, 0.0, 1.0); }

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sample_variance(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Horner evaluation of c[0] + c[1] x + ... as laid out in AS R94.
inline double poly(const double* c, int n, double x) {
  double r = c[0];
  if (n > 1) {
    double p = x * c[n - 1];
    for (int j = n - 2; j > 0; --j) p = (p + c[j]) * x;
    r += p;
  }
  return r;
}

}  // namespace detail

/// 1-based average ranks (ties share the mean of their positions).
inline std::vector<double> rankdata(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i + j) + 2.0) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk (Royston's AS R94 algorithm)

inline TestResult shapiro_wilk(std::span<const double> sample) {
  const std::size_t n = sample.size();
  if (n < 3) throw std::invalid_argument("shapiro_wilk: need at least 3 values");
  if (n > 5000) throw std::invalid_argument("shapiro_wilk: n > 5000 is outside the approximation's range");
  for (double v : sample) {
    if (!std::isfinite(v)) throw std::invalid_argument("shapiro_wilk: non-finite value");
  }

  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const double shift = sample[n / 2];  // any central value; improves conditioning
  for (double& v : x) v -= shift;

  static constexpr double small = 1e-19;
  static constexpr double g[2] = {-2.273, .459};
  static constexpr double c1[6] = {0., .221157, -.147981, -2.07119, 4.434685, -2.706056};
  static constexpr double c2[6] = {0., .042981, -.293762, -1.752461, 5.682633, -3.582633};
  static constexpr double c3[4] = {.544, -.39978, .025054, -6.714e-4};
  static constexpr double c4[4] = {1.3822, -.77857, .062767, -.0020322};
  static constexpr double c5[4] = {-1.5861, -.31082, -.083751, .0038915};
  static constexpr double c6[3] = {-.4803, -.082676, .0030302};

  const std::size_t nn2 = n / 2;
  std::vector<double> a(nn2 + 1);  // 1-based
  const double an = static_cast<double>(n);
  if (n == 3) {
    a[1] = std::sqrt(0.5);
  } else {
    const double an25 = an + .25;
    double summ2 = 0.0;
    for (std::size_t i = 1; i <= nn2; ++i) {
      a[i] = detail::norm_ppf((static_cast<double>(i) - .375) / an25);
      summ2 += a[i] * a[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = detail::poly(c1, 6, rsn) - a[1] / ssumm2;
    std::size_t i1 = 0;
    double fac = 0.0;
    if (n > 5) {
      i1 = 3;
      const double a2 = -a[2] / ssumm2 + detail::poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * (a[1] * a[1]) - 2.0 * (a[2] * a[2])) / (1.0 - 2.0 * (a1 * a1) - 2.0 * (a2 * a2)));
      a[2] = a2;
    } else {
      i1 = 2;
      fac = std::sqrt((summ2 - 2.0 * (a[1] * a[1])) / (1.0 - 2.0 * (a1 * a1)));
    }
    a[1] = a1;
    for (std::size_t i = i1; i <= nn2; ++i) a[i] /= -fac;
  }

  const double range = x[n - 1] - x[0];
  if (range < small) throw DegenerateInput("shapiro_wilk: sample has zero range");

  // sa and sx are the means of the coefficient and scaled-data vectors
  double xx = x[0] / range;
  double sx = xx;
  double sa = -a[1];
  for (std::size_t i = 1, j = n - 1; i < n; --j) {
    const double xi = x[i] / range;
    sx += xi;
    ++i;
    if (i != j) {
      const double sgn = i > j ? 1.0 : (i < j ? -1.0 : 0.0);
      sa += sgn * a[std::min(i, j)];
    }
    xx = xi;
  }
  sa /= an;
  sx /= an;
  double ssa = 0.0;
  double ssx = 0.0;
  double sax = 0.0;
  for (std::size_t i = 0, j = n - 1; i < n; ++i, --j) {
    double asa = 0.0;
    if (i != j) {
      const double sgn = i > j ? 1.0 : -1.0;
      asa = sgn * a[1 + std::min(i, j)] - sa;
    } else {
      asa = -sa;
    }
    const double xsx = x[i] / range - sx;
    ssa += asa * asa;
    ssx += xsx * xsx;
    sax += asa * xsx;
  }
  // 1 - W, computed this way to keep precision when W is close to 1
  const double ssassx = std::sqrt(ssa * ssx);
  const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
  const double w = 1.0 - w1;

  TestResult r{w, 1.0, Method::shapiro_wilk, false};
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6 / pi
    constexpr double stqr = 1.04719755119660;  // pi / 3
    r.p_value = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
    return r;
  }
  double y = std::log(w1);
  const double lxx = std::log(an);
  double m = 0.0;
  double s = 0.0;
  if (n <= 11) {
    const double gamma = detail::poly(g, 2, an);
    if (y >= gamma) {
      r.p_value = 1e-99;
      return r;
    }
    y = -std::log(gamma - y);
    m = detail::poly(c3, 4, an);
    s = std::exp(detail::poly(c4, 4, an));
  } else {
    m = detail::poly(c5, 4, lxx);
    s = std::exp(detail::poly(c6, 3, lxx));
  }
  r.p_value = detail::clip01(detail::norm_sf((y - m) / s));
  return r;
}

// ---------------------------------------------------------------------------
// Mann-Whitney U

/// Number of ways each U value arises when n1 of n1+n2 distinct ranks go to
/// the first sample; index u in [0, n1 n2].
inline std::vector<double> mann_whitney_null_counts(std::size_t n1, std::size_t n2) {
  // f[i][j][u]: arrangements of i first-sample and j second-sample items
  // with statistic u; built over the largest item.
  const std::size_t umax = n1 * n2;
  std::vector<std::vector<std::vector<double>>> f(
      n1 + 1, std::vector<std::vector<double>>(n2 + 1, std::vector<double>(umax + 1, 0.0)));
  for (std::size_t i = 0; i <= n1; ++i) {
    for (std::size_t j = 0; j <= n2; ++j) {
      if (i == 0 || j == 0) {
        f[i][j][0] = 1.0;
        continue;
      }
      for (std::size_t u = 0; u <= i * j; ++u) {
        // largest item in sample 1 beats all j of sample 2
        const double from1 = u >= j ? f[i - 1][j][u - j] : 0.0;
        const double from2 = f[i][j - 1][u];
        f[i][j][u] = from1 + from2;
      }
    }
  }
  return f[n1][n2];
}

/// Two-sided test; the statistic is U for the first sample.
inline TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("mann_whitney_u: empty sample");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  for (double v : all) {
    if (std::isnan(v)) throw std::invalid_argument("mann_whitney_u: NaN input");
  }
  const auto ranks = rankdata(all);
  double r1 = 0.0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  const double d1 = static_cast<double>(n1);
  const double d2 = static_cast<double>(n2);
  const double u1 = r1 - d1 * (d1 + 1.0) / 2.0;
  const double u2 = d1 * d2 - u1;
  const double u = std::max(u1, u2);

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    if (t > 1) ties = true;
    tie_term += t * t * t - t;
    i = j + 1;
  }

  TestResult r{u1, 1.0, Method::mann_whitney_u, false};
  if (n1 + n2 <= 12 && !ties) {
    const auto counts = mann_whitney_null_counts(n1, n2);
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    double upper = 0.0;
    for (std::size_t k = static_cast<std::size_t>(std::lround(u)); k < counts.size(); ++k) upper += counts[k];
    r.p_value = detail::clip01(2.0 * upper / total);
    r.exact = true;
    return r;
  }
  const double n = d1 + d2;
  const double mu = d1 * d2 / 2.0;
  const double sd = std::sqrt(d1 * d2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0))));
  if (sd == 0.0) {
    r.p_value = 1.0;  // every value tied: no evidence either way
    return r;
  }
  const double z = (u - mu - 0.5) / sd;
  r.p_value = detail::clip01(2.0 * detail::norm_sf(z));
  return r;
}

// ---------------------------------------------------------------------------
// Multiple comparisons and effect sizes

/// Holm step-down adjusted p-values, in input order.
inline std::vector<double> holm_bonferroni(std::span<const double> p) {
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("holm_bonferroni: p-value outside [0, 1]");
  }
  const std::size_t m = p.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
  std::vector<double> adjusted(m);
  double running = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double v = std::min(1.0, static_cast<double>(m - k) * p[order[k]]);
    running = std::max(running, v);
    adjusted[order[k]] = running;
  }
  return adjusted;
}

/// (mean(a) - mean(b)) / pooled standard deviation.
inline double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("cohens_d: each sample needs at least 2 values");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled =
      std::sqrt(((na - 1.0) * detail::sample_variance(a) + (nb - 1.0) * detail::sample_variance(b)) / (na + nb - 2.0));
  if (!(pooled > 0.0)) throw DegenerateInput("cohens_d: zero pooled standard deviation");
  return (detail::mean(a) - detail::mean(b)) / pooled;
}

/// 100 |m1 - m2| / max(m1, m2).
inline double pct_difference(double m1, double m2) {
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw std::invalid_argument("pct_difference: means must be positive");
  return 100.0 * std::abs(m1 - m2) / std::max(m1, m2);
}

// ---------------------------------------------------------------------------
// Spearman rank correlation

inline double pearson(std::span<const double> x, std::span<const double> y) {
  const double mx = detail::mean(x);
  const double my = detail::mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateInput("correlation undefined for constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// rho with a two-sided p-value from the t distribution with n - 2 degrees of freedom.
inline TestResult spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  if (a.size() < 3) throw std::invalid_argument("spearman: need at least 3 pairs");
  const auto ra = rankdata(a);
  const auto rb = rankdata(b);
  const double rho = pearson(ra, rb);
  TestResult r{rho, 0.0, Method::spearman, false};
  const double df = static_cast<double>(a.size()) - 2.0;
  if (std::abs(rho) < 1.0) {
    const double t = rho * std::sqrt(df / ((1.0 - rho) * (1.0 + rho)));
    boost::math::students_t_distribution<> dist(df);
    r.p_value = detail::clip01(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  }
  return r;
}

}  // namespace driftbench::stats

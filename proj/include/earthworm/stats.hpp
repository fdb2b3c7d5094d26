#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "earthworm/error.hpp"
#include "earthworm/sweep.hpp"

namespace earthworm {

struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
  double slope_stderr = std::numeric_limits<double>::quiet_NaN();  // needs >= 3 points
};

// Ordinary least squares y = intercept + slope * x.
inline RegressionFit ols(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw EstimationError("x and y differ in length");
  const std::size_t m = x.size();
  if (m < 2) throw EstimationError("regression needs at least 2 distinct abscissae");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw EstimationError("regression needs at least 2 distinct abscissae");

  RegressionFit fit;
  fit.points = m;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    sse += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  if (m >= 3) fit.slope_stderr = std::sqrt(sse / static_cast<double>(m - 2) / sxx);
  return fit;
}

// Fits ln(mean) = intercept + slope * ln(n).
inline RegressionFit ols_loglog(std::span<const std::pair<double, double>> pairs) {
  std::vector<double> lx, ly;
  for (const auto& [n, mean] : pairs) {
    if (!(n > 0.0)) throw EstimationError("log-log regression needs positive n");
    if (!(mean > 0.0)) throw EstimationError("log-log regression needs positive means");
    lx.push_back(std::log(n));
    ly.push_back(std::log(mean));
  }
  return ols(lx, ly);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Asymptotic Kolmogorov survival function Q(x) = P(K > x) by the
// alternating series 2 * sum_k (-1)^(k-1) exp(-2 k^2 x^2), stopped at the
// first term below 1e-12.
inline double kolmogorov_q_alternating(double x) {
  if (!(x > 0.0)) return 1.0;
  double sum = 0.0;
  for (int k = 1; k < 1000000; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

// Q(x) for any x. Below x = 1 the alternating series needs many terms, so the
// equivalent theta-function form 1 - sqrt(2 pi)/x * sum_k exp(-(2k-1)^2 pi^2 / (8 x^2))
// is used there.
inline double kolmogorov_q(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x >= 1.0) return kolmogorov_q_alternating(x);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double sum = 0.0;
  for (int k = 1;; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double term = std::exp(-odd * odd * pi2 / (8.0 * x * x));
    sum += term;
    if (term == 0.0 || term < 1e-16 * sum) break;
  }
  return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * sum, 0.0, 1.0);
}

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t m = 0;
};

// One-sample KS test of the standardized sample against N(0,1). The sample is
// standardized by its own mean and (n-1) standard deviation; no Lilliefors
// correction is applied, so the p-value is conservative.
inline KsResult ks_normal(std::span<const double> samples) {
  const std::size_t m = samples.size();
  if (m < 2) throw EstimationError("KS test needs at least 2 samples");
  double mean = 0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  if (!(sd > 0.0)) throw EstimationError("KS test needs a nonzero standard deviation");

  std::vector<double> z(samples.begin(), samples.end());
  for (double& v : z) v = (v - mean) / sd;
  std::sort(z.begin(), z.end());

  double d = 0.0;
  const double dm = static_cast<double>(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double f = normal_cdf(z[i]);
    d = std::max({d, static_cast<double>(i + 1) / dm - f, f - static_cast<double>(i) / dm});
  }
  return KsResult{d, kolmogorov_q(std::sqrt(dm) * d), m};
}

struct PaleyZygmundCheck {
  double empirical_prob = 0.0;
  double bound = 0.0;
  bool holds() const { return empirical_prob >= bound; }
};

// Fraction of samples strictly above theta times the sample mean, against the
// second-moment lower bound (1 - theta)^2 / 2.
inline PaleyZygmundCheck paley_zygmund_check(std::span<const double> samples, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("theta must lie in (0, 1)");
  if (samples.empty()) throw ParameterError("paley-zygmund check needs samples");
  double mean = 0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(samples.size());
  const auto above = std::count_if(samples.begin(), samples.end(), [&](double v) { return v > theta * mean; });
  return PaleyZygmundCheck{static_cast<double>(above) / static_cast<double>(samples.size()),
                           (1.0 - theta) * (1.0 - theta) / 2.0};
}

// Fraction of samples with S_n >= delta * n^{3/4}.
inline double theorem_fraction(std::span<const double> samples, std::uint64_t n, double delta) {
  if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  if (samples.empty()) return 0.0;
  const double threshold = delta * std::pow(static_cast<double>(n), 0.75);
  const auto hits = std::count_if(samples.begin(), samples.end(), [&](double v) { return v >= threshold; });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

// Per-grid-point tan-point frequency: mean over replicas of tan_total / n.
inline std::vector<std::pair<double, double>> tan_point_frequencies(const SampleTable& table) {
  std::vector<std::pair<double, double>> out;
  for (std::uint64_t n : table.grid()) {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& r : table.rows) {
      if (r.n != n || r.error) continue;
      if (!r.tan_total) throw EstimationError("table rows carry no tan-point counts");
      if (n == 0) continue;
      sum += static_cast<double>(*r.tan_total) / static_cast<double>(n);
      ++count;
    }
    if (count > 0) out.emplace_back(static_cast<double>(n), sum / static_cast<double>(count));
  }
  return out;
}

// Log-log slope of the tan-point frequency against n.
inline RegressionFit tan_point_exponent(const SampleTable& table) {
  const auto freq = tan_point_frequencies(table);
  return ols_loglog(freq);
}

}  // namespace earthworm

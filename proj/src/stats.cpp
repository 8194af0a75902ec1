#include "addcoal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "addcoal/core.hpp"

namespace addcoal {

namespace {

constexpr double kSeriesCutoff = 1e-12;

TestReport finish(double statistic, double p, std::size_t n, double alpha) {
  TestReport r;
  r.statistic = statistic;
  r.p_value = std::clamp(p, 0.0, 1.0);
  r.sample_size = n;
  r.alpha = alpha;
  r.pass = r.p_value > alpha;
  return r;
}

// Stephens' effective-size correction to the asymptotic law.
double ks_p_value(double d, double effective_n) {
  const double rn = std::sqrt(effective_n);
  return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);
}

}  // namespace

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-theta form converges fast for small lambda.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1;; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * lambda * lambda));
      cdf += term;
      if (term < kSeriesCutoff) break;
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k < 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < kSeriesCutoff) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf, double alpha) {
  if (samples.empty()) throw InvalidArgument("ks_test: empty sample");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return finish(d, ks_p_value(d, n), x.size(), alpha);
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.empty() || b.empty()) throw InvalidArgument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return finish(d, ks_p_value(d, na * nb / (na + nb)), x.size() + y.size(), alpha);
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(a, x);
}

TestReport chi_square_counts(std::span<const double> observed, std::span<const double> expected,
                             std::size_t constraints, double alpha) {
  if (observed.size() != expected.size()) throw InvalidArgument("chi_square: category count mismatch");
  if (observed.size() <= constraints) throw InvalidArgument("chi_square: no degrees of freedom");
  double stat = 0.0;
  bool sparse = false;
  double n = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    n += observed[i];
    if (expected[i] < 5.0) sparse = true;
    if (expected[i] <= 0.0) {
      if (observed[i] > 0.0) return finish(std::numeric_limits<double>::infinity(), 0.0, 0, alpha);
      continue;
    }
    const double diff = observed[i] - expected[i];
    stat += diff * diff / expected[i];
  }
  const double dof = static_cast<double>(observed.size() - constraints);
  auto r = finish(stat, gamma_q(0.5 * dof, 0.5 * stat), static_cast<std::size_t>(n), alpha);
  r.sparse = sparse;
  return r;
}

TestReport chi_square_test(std::span<const double> observed, std::span<const double> expected_probs,
                           double alpha) {
  if (observed.size() != expected_probs.size()) throw InvalidArgument("chi_square: category count mismatch");
  const double total_p = std::accumulate(expected_probs.begin(), expected_probs.end(), 0.0);
  if (std::abs(total_p - 1.0) > 1e-9) throw InvalidArgument("chi_square: expected probabilities must sum to 1");
  const double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  std::vector<double> expected(expected_probs.size());
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] = n * expected_probs[i];
  return chi_square_counts(observed, expected, 1, alpha);
}

TestReport chi_square_two_sample(std::span<const double> counts_a, std::span<const double> counts_b, double alpha,
                                 double min_cell) {
  if (counts_a.size() != counts_b.size()) throw InvalidArgument("chi_square_two_sample: category count mismatch");
  std::vector<double> a;
  std::vector<double> b;
  double pooled_a = 0.0;
  double pooled_b = 0.0;
  for (std::size_t i = 0; i < counts_a.size(); ++i) {
    if (counts_a[i] + counts_b[i] < min_cell) {
      pooled_a += counts_a[i];
      pooled_b += counts_b[i];
    } else {
      a.push_back(counts_a[i]);
      b.push_back(counts_b[i]);
    }
  }
  if (pooled_a + pooled_b > 0.0) {
    a.push_back(pooled_a);
    b.push_back(pooled_b);
  }
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  if (na == 0.0 || nb == 0.0) throw InvalidArgument("chi_square_two_sample: empty sample");
  const auto n = static_cast<std::size_t>(na + nb);
  if (a.size() < 2) return finish(0.0, 1.0, n, alpha);
  const double ka = std::sqrt(nb / na);
  const double kb = std::sqrt(na / nb);
  double stat = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = ka * a[i] - kb * b[i];
    stat += diff * diff / (a[i] + b[i]);
  }
  const double dof = static_cast<double>(a.size() - 1);
  return finish(stat, gamma_q(0.5 * dof, 0.5 * stat), n, alpha);
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("pearson_correlation: size mismatch");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace addcoal

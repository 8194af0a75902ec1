#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace addcoal {

/// Outcome of a goodness-of-fit test. `pass` means p_value > alpha.
struct TestReport {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t sample_size = 0;
  double alpha = 1e-3;
  bool pass = true;
  // Some expected cell count fell below 5.
  bool sparse = false;
};

inline constexpr double kDefaultAlpha = 1e-3;

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// One-sample Kolmogorov-Smirnov test against a continuous cdf.
TestReport ks_test(std::span<const double> samples, const std::function<double(double)>& cdf,
                   double alpha = kDefaultAlpha);

/// Two-sample Kolmogorov-Smirnov test.
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = kDefaultAlpha);

/// Pearson goodness-of-fit with k-1 degrees of freedom.
TestReport chi_square_test(std::span<const double> observed, std::span<const double> expected_probs,
                           double alpha = kDefaultAlpha);

/// Pearson goodness-of-fit against expected counts that need not come from a
/// single probability vector (e.g. summed over heterogeneous trials).
/// `constraints` is subtracted from the cell count to give the degrees of freedom.
TestReport chi_square_counts(std::span<const double> observed, std::span<const double> expected,
                             std::size_t constraints = 1, double alpha = kDefaultAlpha);

/// Two-sample chi-square homogeneity test on category counts. Cells whose
/// combined count is below `min_cell` are pooled into one cell.
TestReport chi_square_two_sample(std::span<const double> counts_a, std::span<const double> counts_b,
                                 double alpha = kDefaultAlpha, double min_cell = 10.0);

/// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// Counts of two samples over arbitrary ordered category keys.
template <class Key>
class PairedCounts {
 public:
  void add(int sample, const Key& key) { cells_[key][static_cast<std::size_t>(sample)] += 1.0; }

  TestReport test(double alpha = kDefaultAlpha) const {
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& [key, c] : cells_) {
      a.push_back(c[0]);
      b.push_back(c[1]);
    }
    return chi_square_two_sample(a, b, alpha);
  }

  std::size_t categories() const { return cells_.size(); }

 private:
  std::map<Key, std::array<double, 2>> cells_;
};

}  // namespace addcoal

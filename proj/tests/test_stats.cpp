#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "addcoal/rng.hpp"
#include "addcoal/stats.hpp"
#include "support.hpp"

using namespace addcoal;

namespace {

double exp_cdf(double rate, double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); }

}  // namespace

TEST(Kolmogorov, SurvivalMatchesReference) {
  EXPECT_NEAR(kolmogorov_survival(1.0), 0.26999967167735456, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(0.5), 0.9639452436648751, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(1.5), 0.022217962616525127, 1e-10);
  EXPECT_NEAR(kolmogorov_survival(0.3), 0.9999906941986655, 1e-10);
  EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
}

TEST(Kolmogorov, SurvivalMonotone) {
  double prev = 1.0;
  for (double x = 0.05; x < 4.0; x += 0.05) {
    const double q = kolmogorov_survival(x);
    EXPECT_LE(q, prev + 1e-15);
    EXPECT_GE(q, 0.0);
    prev = q;
  }
}

TEST(KsTest, StatisticMatchesHandComputation) {
  const std::vector<double> x{0.1, 0.4, 0.7, 1.3, 2.2};
  const auto r = ks_test(x, [](double v) { return exp_cdf(1.0, v); });
  EXPECT_NEAR(r.statistic, 0.12967995396436066, 1e-12);
  EXPECT_EQ(r.sample_size, 5u);
}

TEST(KsTest, PerfectQuantilesPass) {
  const std::size_t n = 2000;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = -std::log1p(-static_cast<double>(i + 1) / static_cast<double>(n + 1));
  const auto r = ks_test(x, [](double v) { return exp_cdf(1.0, v); });
  EXPECT_GT(r.p_value, 0.99);
  EXPECT_TRUE(r.pass);
}

TEST(KsTest, DegenerateSampleFails) {
  const std::vector<double> x(50, 0.0);
  const auto r = ks_test(x, [](double v) { return exp_cdf(1.0, v); });
  EXPECT_LT(r.p_value, 1e-6);
  EXPECT_FALSE(r.pass);
}

TEST(KsTest, EmptySampleRejected) {
  EXPECT_THROW(ks_test(std::vector<double>{}, [](double v) { return v; }), InvalidArgument);
}

TEST(KsTest, PValuesUniformUnderNull) {
  RngStream master(2024, 0);
  std::vector<double> p(100);
  for (std::size_t s = 0; s < p.size(); ++s) {
    RngStream rng = master.split(s);
    const auto x = test_support::exponential_samples(rng, 10000, 3.0);
    p[s] = ks_test(x, [](double v) { return exp_cdf(3.0, v); }).p_value;
    ASSERT_GE(p[s], 0.0);
    ASSERT_LE(p[s], 1.0);
  }
  const auto second = ks_test(p, [](double u) { return std::clamp(u, 0.0, 1.0); });
  EXPECT_GT(second.p_value, 1e-3) << "D=" << second.statistic;
}

TEST(KsTwoSample, SameLawPassesDifferentLawFails) {
  RngStream rng(8, 0);
  const auto a = test_support::exponential_samples(rng, 2000, 1.0);
  const auto b = test_support::exponential_samples(rng, 2000, 1.0);
  const auto c = test_support::exponential_samples(rng, 2000, 1.3);
  EXPECT_GT(ks_two_sample(a, b).p_value, 1e-3);
  EXPECT_LT(ks_two_sample(a, c).p_value, 1e-3);
}

TEST(KsTwoSample, StatisticOfDisjointSamplesIsOne) {
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 5, 6, 7};
  EXPECT_DOUBLE_EQ(ks_two_sample(a, b).statistic, 1.0);
}

TEST(ChiSquare, HandComputedStatistic) {
  const std::vector<double> obs{70, 30};
  const std::vector<double> p{0.5, 0.5};
  const auto r = chi_square_test(obs, p);
  EXPECT_DOUBLE_EQ(r.statistic, 16.0);
  EXPECT_NEAR(r.p_value, 6.334248366623988e-05, 1e-12);
}

TEST(ChiSquare, ExactFitHasUnitPValue) {
  const std::vector<double> obs{20, 30, 50};
  const std::vector<double> p{0.2, 0.3, 0.5};
  const auto r = chi_square_test(obs, p);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(ChiSquare, InvariantUnderRelabeling) {
  const std::vector<double> obs{12, 40, 25, 23};
  const std::vector<double> p{0.1, 0.4, 0.3, 0.2};
  const std::vector<double> obs_perm{23, 12, 25, 40};
  const std::vector<double> p_perm{0.2, 0.1, 0.3, 0.4};
  EXPECT_DOUBLE_EQ(chi_square_test(obs, p).statistic, chi_square_test(obs_perm, p_perm).statistic);
}

TEST(ChiSquare, MultinomialNoisePasses) {
  RngStream rng(31, 0);
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  std::vector<double> obs(4, 0.0);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    obs[u < 0.1 ? 0 : u < 0.3 ? 1 : u < 0.6 ? 2 : 3] += 1.0;
  }
  EXPECT_GT(chi_square_test(obs, p).p_value, 1e-3);
}

TEST(ChiSquare, RejectsBadInput) {
  const std::vector<double> obs{1, 2};
  EXPECT_THROW(chi_square_test(obs, std::vector<double>{0.5, 0.4}), InvalidArgument);
  EXPECT_THROW(chi_square_test(obs, std::vector<double>{1.0}), InvalidArgument);
}

TEST(ChiSquare, SparseCellsFlagged) {
  const std::vector<double> obs{3, 97};
  const std::vector<double> p{0.02, 0.98};
  EXPECT_TRUE(chi_square_test(obs, p).sparse);
}

TEST(ChiSquareTwoSample, PoolsRareCellsAndDetectsShift) {
  const std::vector<double> a{500, 300, 200, 2, 1};
  const std::vector<double> b{498, 305, 195, 1, 3};
  EXPECT_GT(chi_square_two_sample(a, b).p_value, 0.5);
  const std::vector<double> c{400, 400, 200, 1, 1};
  EXPECT_LT(chi_square_two_sample(a, c).p_value, 1e-3);
}

TEST(GammaQ, MatchesReference) {
  EXPECT_NEAR(gamma_q(2.5, 3.0), 0.30621891841327875, 1e-12);
  EXPECT_NEAR(gamma_q(0.5, 0.1), 0.6547208460185768, 1e-12);
  EXPECT_NEAR(gamma_q(10.0, 12.0), 0.24239216167051245, 1e-12);
}

TEST(Pearson, PerfectAndDegenerate) {
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{2, 4, 6, 8};
  const std::vector<double> c{5, 5, 5, 5};
  EXPECT_NEAR(pearson_correlation(a, b), 1.0, 1e-15);
  EXPECT_EQ(pearson_correlation(a, c), 0.0);
}

TEST(PairedCounts, IdenticalSamplesPass) {
  PairedCounts<int> counts;
  for (int i = 0; i < 300; ++i) {
    counts.add(0, i % 3);
    counts.add(1, (i + 1) % 3);
  }
  EXPECT_EQ(counts.categories(), 3u);
  EXPECT_NEAR(counts.test().p_value, 1.0, 1e-12);
}

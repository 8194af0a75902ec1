#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "addcoal/core.hpp"
#include "addcoal/smoluchowski.hpp"

using namespace addcoal;

TEST(BrownianDensity, ReferenceValue) {
  EXPECT_NEAR(brownian_density(0.0, 1.0), 0.24197072451914337, 1e-15);
  EXPECT_NEAR(brownian_density(0.0, 1.0), std::exp(-0.5) / std::sqrt(2 * std::numbers::pi), 1e-15);
  EXPECT_THROW(brownian_density(0.0, 0.0), InvalidArgument);
  EXPECT_THROW(brownian_density(0.0, -1.0), InvalidArgument);
}

TEST(BrownianDensity, SmallMassSingularity) {
  // x^{3/2} f(t, x) -> e^{-t} / sqrt(2 pi) as x -> 0.
  for (double t : {-1.0, 0.0, 1.0}) {
    const double x = 1e-10;
    EXPECT_NEAR(std::pow(x, 1.5) * brownian_density(t, x), std::exp(-t) / std::sqrt(2 * std::numbers::pi), 1e-9);
  }
}

TEST(BrownianDensity, UnitMass) {
  for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
    const double mass = integrate_half_line([t](double x) { return x * brownian_density(t, x); });
    EXPECT_NEAR(mass, 1.0, 1e-8) << "t=" << t;
  }
}

TEST(BrownianDensity, SizeBiasedCdfMatchesQuadrature) {
  using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (double t : {-1.0, 0.0, 1.0}) {
    for (double x : {0.1, 1.0, 4.0}) {
      // int_0^x y f(t, y) dy with y = x w^2, which is smooth in w.
      const double by_quad = Quad::integrate(
          [&](double w) { return w > 0 ? 2 * x * x * w * w * w * brownian_density(t, x * w * w) : 0.0; }, 0.0, 1.0);
      EXPECT_NEAR(brownian_size_biased_cdf(t, x), by_quad, 1e-10);
    }
    EXPECT_EQ(brownian_size_biased_cdf(t, 0.0), 0.0);
  }
  EXPECT_NEAR(brownian_size_biased_cdf(0.0, 1.0), std::erf(std::sqrt(0.5)), 1e-15);
}

TEST(LaplaceFunctional, Examples) {
  const auto sol = EternalSolution::brownian();
  EXPECT_EQ(laplace_functional(sol, 0.0, 0.3), 0.0);
  EXPECT_NEAR(laplace_functional(sol, 4.0, 0.0), 2.0, 1e-12);
}

TEST(LaplaceIdentity, HoldsForClosedFormDensity) {
  const std::vector<double> q{0.0, 0.5, 1.0, 2.0, 5.0};
  for (double t : {-1.0, 0.0, 1.0}) EXPECT_LE(verify_laplace_identity(t, q), 1e-6) << "t=" << t;
}

TEST(LaplaceIdentity, DetectsOnePercentPerturbation) {
  const std::vector<double> q{0.5, 1.0, 2.0, 5.0};
  const auto perturbed = [](double t, double x) { return 1.01 * brownian_density(t, x); };
  for (double t : {-1.0, 0.0, 1.0}) {
    EXPECT_GT(verify_laplace_identity(t, q, perturbed), 5e-3);
    EXPECT_GT(verify_laplace_identity(t, q, perturbed), 1e3 * verify_laplace_identity(t, q));
  }
  const std::vector<double> negative{-1.0};
  EXPECT_THROW(verify_laplace_identity(0.0, negative), InvalidArgument);
}

TEST(PdeResidual, BrownianSolution) {
  const auto sol = EternalSolution::brownian();
  for (double t : {-1.0, 0.0, 1.0}) {
    for (double q : {0.5, 1.0, 2.0}) EXPECT_LE(pde_residual(sol, t, q), 1e-4) << t << " " << q;
    EXPECT_LE(pde_residual(sol, t, 0.0), 1e-4);
  }
}

TEST(PdeResidual, AtomicSpecWithGaussianPart) {
  const EternalSolution sol(LevySpec(0.7, {{1.0, 2.0}, {0.3, 5.0}}));
  EXPECT_FALSE(sol.has_closed_form_density());
  EXPECT_THROW(sol.density(0.0, 1.0), InvalidArgument);
  for (double t : {-1.0, 0.0, 1.0}) {
    for (double q : {0.5, 1.0, 2.0}) EXPECT_LE(pde_residual(sol, t, q), 1e-4) << t << " " << q;
  }
}

TEST(PdeResidual, WrongSolutionFails) {
  // Phi(q, e^t) of a different time shift does not solve the equation at t.
  const auto sol = EternalSolution::brownian();
  const double h = 1e-4;
  const double t = 0.0;
  const double q = 1.0;
  auto value = [&](double qq, double tt) { return laplace_functional(sol, qq, 2.0 * tt); };
  const double d_t = (value(q, t + h) - value(q, t - h)) / (2 * h);
  const double d_q = (value(q + h, t) - value(q - h, t)) / (2 * h);
  EXPECT_GT(std::abs(d_t + value(q, t) * (1 - d_q)), 1e-2);
}

TEST(EternalSolution, LaplaceFunctionalMonotoneInTime) {
  // Mass moves to larger clusters, so int (1 - e^{-qx}) mu_t(dx) decreases.
  const auto sol = EternalSolution::brownian();
  for (double q : {0.5, 2.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double t = -2.0; t <= 2.0; t += 0.25) {
      const double v = laplace_functional(sol, q, t);
      EXPECT_LT(v, prev);
      prev = v;
    }
  }
}

TEST(MeanField, ConvergesWithSystemSize) {
  RngStream rng(51, 0);
  MeanFieldOptions opts;
  opts.samples = 400;
  opts.volume = 100.0;
  const auto small = mean_field_check(100, 0.0, rng, opts);
  const auto large = mean_field_check(10000, 0.0, rng, opts);
  EXPECT_GT(small.statistic, large.statistic);
  EXPECT_LT(large.statistic, 0.1);
}

TEST(MeanField, UnitVolumeComparesWholeSystem) {
  // With volume 1 every sampled mass is at most 1, while x mu_0(dx) puts
  // 1 - erf(sqrt(1/2)) of its mass above 1: the KS distance cannot fall below that.
  RngStream rng(51, 1);
  MeanFieldOptions opts;
  opts.samples = 200;
  const auto r = mean_field_check(1000, 0.0, rng, opts);
  EXPECT_GE(r.statistic, 1.0 - std::erf(std::sqrt(0.5)) - 1e-12);
}

TEST(MeanField, RejectsBadOptions) {
  RngStream rng(51, 2);
  MeanFieldOptions opts;
  opts.samples = 0;
  EXPECT_THROW(mean_field_check(1000, 0.0, rng, opts), InvalidArgument);
  opts.samples = 10;
  opts.volume = 2000.0;
  EXPECT_THROW(mean_field_check(1000, 0.0, rng, opts), InvalidArgument);
  opts.volume = 1.0;
  EXPECT_THROW(mean_field_check(1000, -10.0, rng, opts), InvalidArgument);
}

TEST(Quadrature, ReportsNonConvergence) {
  EXPECT_NEAR(integrate_half_line([](double x) { return std::exp(-x); }), 1.0, 1e-12);
  EXPECT_THROW(integrate_half_line([](double x) { return 1.0 / (1.0 + x); }), NumericalError);
}

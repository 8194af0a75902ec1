#include "addcoal/smoluchowski.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "addcoal/coalescent.hpp"
#include "addcoal/core.hpp"

namespace addcoal {


EternalSolution::EternalSolution(LevySpec spec) : spec_(std::move(spec)) {}

bool EternalSolution::has_closed_form_density() const { return spec_.is_brownian() && spec_.sigma2() == 1.0; }

double EternalSolution::density(double t, double x) const {
  if (!has_closed_form_density()) throw InvalidArgument("EternalSolution: no closed-form density for this exponent");
  return brownian_density(t, x);
}

double laplace_functional(const EternalSolution& sol, double q, double t) {
  return phi(sol.spec(), q, std::exp(t));
}

double brownian_density(double t, double x) {
  if (!(x > 0.0)) throw InvalidArgument("brownian_density: x must be positive");
  return std::exp(-t - 0.5 * x * std::exp(-2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * x * x * x);
}

double brownian_size_biased_cdf(double t, double x) {
  // x mu_t(dx) is the law of e^{2t} times a chi-square variable with one degree of freedom.
  if (x <= 0.0) return 0.0;
  return std::erf(std::sqrt(0.5 * x * std::exp(-2.0 * t)));
}

double integrate_half_line(const std::function<double(double)>& f, double abs_tol) {
  // The Boost 1.74 overload for [a, b] is callable only on a non-const object.
  thread_local boost::math::quadrature::tanh_sinh<double> quad;
  // Abscissas crowd the origin down to ~1e-300, where factors like x^{-3/2}
  // overflow. An integrable singularity contributes nothing measurable below 1e-100.
  auto g = [&f](double x) { return x < 1e-100 ? 0.0 : f(x); };
  double error = 0.0;
  double l1 = 0.0;
  const double value = quad.integrate(g, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &error, &l1);
  if (!(error <= abs_tol) || !std::isfinite(value)) {
    throw NumericalError("integrate_half_line: error estimate " + std::to_string(error) + " above tolerance");
  }
  return value;
}

double verify_laplace_identity(double t, std::span<const double> q_grid,
                               const std::function<double(double, double)>& density) {
  const auto sol = EternalSolution::brownian();
  double worst = 0.0;
  for (double q : q_grid) {
    if (!(q >= 0.0)) throw InvalidArgument("verify_laplace_identity: q must be non-negative");
    if (q == 0.0) continue;  // both sides vanish
    const double lhs = integrate_half_line([&](double x) { return -std::expm1(-q * x) * density(t, x); });
    const double rhs = laplace_functional(sol, q, t);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  return worst;
}

double pde_residual(const EternalSolution& sol, double t, double q, double h) {
  if (q < 0.0) throw InvalidArgument("pde_residual: q must be non-negative");
  auto value = [&](double qq, double tt) { return laplace_functional(sol, qq, tt); };
  const double phi_0 = value(q, t);
  const double d_t = (value(q, t + h) - value(q, t - h)) / (2.0 * h);
  // One-sided near q = 0 where Phi is not defined for negative arguments.
  const double d_q = q >= h ? (value(q + h, t) - value(q - h, t)) / (2.0 * h)
                            : (-3.0 * phi_0 + 4.0 * value(q + h, t) - value(q + 2.0 * h, t)) / (2.0 * h);
  return std::abs(d_t + phi_0 * (1.0 - d_q));
}

TestReport mean_field_check(std::size_t n, double t, RngStream& rng, const MeanFieldOptions& options) {
  if (options.samples == 0) throw InvalidArgument("mean_field_check: need at least one sample");
  if (!(options.volume > 0.0) || options.volume > static_cast<double>(n)) {
    throw InvalidArgument("mean_field_check: volume must lie in (0, n]");
  }
  // n particles of mass volume/n; standard time t is reached after
  // t + log(n / volume) / 2.
  const double elapsed = t + 0.5 * std::log(static_cast<double>(n) / options.volume);
  if (elapsed < 0.0) throw InvalidArgument("mean_field_check: standard time precedes the start");
  const auto initial = monodisperse(n);
  std::vector<double> masses(options.samples);
  for (std::size_t r = 0; r < options.samples; ++r) {
    RngStream stream = rng.split(r);
    AdditiveCoalescent run(initial);
    run.run_until(elapsed, stream);
    masses[r] = options.volume * run.sample_size_biased_mass(stream);
  }
  return ks_test(masses, [t](double x) { return brownian_size_biased_cdf(t, x); }, options.alpha);
}

}  // namespace addcoal

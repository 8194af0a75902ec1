#pragma once

#include <cstddef>
#include <functional>
#include <span>

#include "addcoal/levy.hpp"
#include "addcoal/rng.hpp"
#include "addcoal/stats.hpp"

namespace addcoal {

/// Eternal solution (mu_t) of the additive-kernel coagulation equation with
/// unit total mass, accessed through its Laplace functional
/// Phi(q, e^t) = int (1 - e^{-qx}) mu_t(dx).
class EternalSolution {
 public:
  explicit EternalSolution(LevySpec spec);

  static EternalSolution brownian() { return EternalSolution(LevySpec::brownian()); }

  const LevySpec& spec() const { return spec_; }
  bool has_closed_form_density() const;
  /// Only available for the standard Brownian spec.
  double density(double t, double x) const;

 private:
  LevySpec spec_;
};

double laplace_functional(const EternalSolution& sol, double q, double t);

/// e^{-t} (2 pi x^3)^{-1/2} exp(-x e^{-2t} / 2)
double brownian_density(double t, double x);

/// CDF of the size-biased law x mu_t(dx) in the Brownian case.
double brownian_size_biased_cdf(double t, double x);

/// int_0^inf f(x) dx by tanh-sinh quadrature; copes with integrable
/// singularities at the origin.
/// Throws NumericalError if the error estimate exceeds `abs_tol`.
double integrate_half_line(const std::function<double(double)>& f, double abs_tol = 1e-10);

/// Worst relative gap between the quadrature of int (1 - e^{-qx}) mu_t(dx)
/// using `density` and the Laplace functional, over `q_grid`.
double verify_laplace_identity(double t, std::span<const double> q_grid,
                               const std::function<double(double, double)>& density = brownian_density);

/// |d/dt Phi + Phi (1 - d/dq Phi)| at (q, e^t), derivatives by central differences of step h.
double pde_residual(const EternalSolution& sol, double t, double q, double h = 1e-4);

struct MeanFieldOptions {
  std::size_t samples = 1000;
  // Total mass of the particle system in units of the eternal solution. With
  // volume 1 the coalescent is compared at the scale of the whole system.
  double volume = 1.0;
  double alpha = kDefaultAlpha;
};

/// Runs the n-cluster monodisperse coalescent to standard time t and compares
/// size-biased cluster masses against x mu_t(dx) with a KS test.
TestReport mean_field_check(std::size_t n, double t, RngStream& rng, const MeanFieldOptions& options = {});

}  // namespace addcoal

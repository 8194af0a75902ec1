#include "addcoal/levy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "addcoal/core.hpp"

namespace addcoal {

namespace {

constexpr int kMaxRootIterations = 200;
constexpr double kRootTolerance = 1e-12;

// e^{-y} - 1 + y without cancellation for small y.
double compensated_exp(double y) {
  if (y >= 0.1) return std::expm1(-y) + y;
  // sum_{k>=2} (-y)^k / k!; 16 terms leave a remainder far below rounding.
  double term = 0.5 * y * y;
  double sum = term;
  for (int k = 3; k < 18; ++k) {
    term *= -y / k;
    sum += term;
  }
  return sum;
}

template <class F>
double integrate_density(const LevyDensity& d, F&& integrand) {
  using Quad = boost::math::quadrature::gauss<double, 10>;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
    total += Quad::integrate([&](double x) { return integrand(x) * d.density(x); }, d.grid[i], d.grid[i + 1]);
  }
  return total;
}

}  // namespace

LevySpec::LevySpec(double sigma2, std::vector<LevyAtom> atoms, std::optional<LevyDensity> density)
    : sigma2_(sigma2), atoms_(std::move(atoms)), density_(std::move(density)) {
  if (!(sigma2_ >= 0.0)) throw InvalidArgument("LevySpec: sigma2 must be non-negative");
  for (const auto& a : atoms_) {
    if (!(a.size > 0.0) || !(a.rate > 0.0)) throw InvalidArgument("LevySpec: atoms need positive size and rate");
  }
  if (density_) {
    const auto& g = density_->grid;
    if (g.size() < 2 || !(g.front() > 0.0) || !std::is_sorted(g.begin(), g.end()) || !density_->density) {
      throw InvalidArgument("LevySpec: density grid must be sorted, positive, with at least one cell");
    }
  }
}

std::vector<LevyAtom> LevySpec::discretized_atoms() const {
  std::vector<LevyAtom> out = atoms_;
  if (density_) {
    using Quad = boost::math::quadrature::gauss<double, 10>;
    const auto& g = density_->grid;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
      const double mass = Quad::integrate(density_->density, g[i], g[i + 1]);
      if (mass > 0.0) out.push_back({0.5 * (g[i] + g[i + 1]), mass});
    }
  }
  return out;
}

double psi(const LevySpec& spec, double q) {
  if (q < 0.0) throw InvalidArgument("psi: q must be non-negative");
  double value = 0.5 * spec.sigma2() * q * q;
  for (const auto& a : spec.atoms()) value += a.rate * compensated_exp(q * a.size);
  if (spec.density()) {
    value += integrate_density(*spec.density(), [q](double x) { return compensated_exp(q * x); });
  }
  return value;
}

double psi_derivative(const LevySpec& spec, double q) {
  if (q < 0.0) throw InvalidArgument("psi_derivative: q must be non-negative");
  double value = spec.sigma2() * q;
  for (const auto& a : spec.atoms()) value += a.rate * a.size * -std::expm1(-q * a.size);
  if (spec.density()) {
    value += integrate_density(*spec.density(), [q](double x) { return x * -std::expm1(-q * x); });
  }
  return value;
}

double phi(const LevySpec& spec, double q, double s) {
  if (q < 0.0) throw InvalidArgument("phi: q must be non-negative");
  if (!(s > 0.0)) throw InvalidArgument("phi: s must be positive");
  if (q == 0.0) return 0.0;

  // g(r) = Psi(s r) + r - q is increasing and convex with g(0) = -q and
  // g(q) = Psi(s q) >= 0. Newton started from the right end descends
  // monotonically onto the root; bisection guards against rounding.
  auto g = [&](double r) { return psi(spec, s * r) + r - q; };
  double lo = 0.0;
  double hi = q;
  double r = hi;
  for (int it = 0; it < kMaxRootIterations; ++it) {
    const double value = g(r);
    if (value == 0.0) return r;
    if (value > 0.0) hi = r; else lo = r;
    const double slope = s * psi_derivative(spec, s * r) + 1.0;
    double next = r - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - r) <= kRootTolerance * std::max(next, 1e-300) || hi - lo <= kRootTolerance * hi) {
      return next;
    }
    r = next;
  }
  throw NumericalError("phi: no convergence after " + std::to_string(kMaxRootIterations) +
                       " iterations (q=" + std::to_string(q) + ", s=" + std::to_string(s) +
                       ", bracket=[" + std::to_string(lo) + ", " + std::to_string(hi) + "])");
}

double DiscretePath::at(double r) const {
  if (values.empty()) throw InvalidArgument("DiscretePath: empty path");
  const double x = std::max(0.0, r / step);
  const auto k = static_cast<std::size_t>(x);
  if (k + 1 >= values.size()) return values.back();
  const double frac = x - static_cast<double>(k);
  return values[k] + frac * (values[k + 1] - values[k]);
}

DiscretePath simulate_path(const LevySpec& spec, double horizon, double h, RngStream& rng) {
  if (!(horizon > 0.0) || !(h > 0.0)) throw InvalidArgument("simulate_path: horizon and step must be positive");
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / h)));
  const auto atoms = spec.discretized_atoms();
  double compensator = 0.0;
  for (const auto& a : atoms) compensator += a.rate * a.size;
  const double gauss_scale = std::sqrt(spec.sigma2() * h);

  DiscretePath path;
  path.step = h;
  path.values.resize(n);
  path.values[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    double inc = compensator * h;
    if (gauss_scale > 0.0) inc += gauss_scale * rng.normal();
    for (const auto& a : atoms) inc -= a.size * static_cast<double>(rng.poisson(a.rate * h));
    path.values[k] = path.values[k - 1] + inc;
  }
  return path;
}

std::vector<std::size_t> record_set(const DiscretePath& path, double s) {
  if (!(s > 0.0)) throw InvalidArgument("record_set: s must be positive");
  std::vector<std::size_t> out;
  double best = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double v = s * path.values[k] + static_cast<double>(k) * path.step;
    if (k == 0 || v > best) {
      out.push_back(k);
      best = v;
    }
  }
  return out;
}

bool check_nesting(const DiscretePath& path, double s, double s_prime) {
  if (!(s_prime > 0.0 && s_prime < s)) throw InvalidArgument("check_nesting: requires 0 < s_prime < s");
  const auto coarse = record_set(path, s);
  const auto fine = record_set(path, s_prime);
  return std::includes(fine.begin(), fine.end(), coarse.begin(), coarse.end());
}

std::vector<IndexRun> record_gaps(const DiscretePath& path, double s) {
  const auto records = record_set(path, s);
  std::vector<IndexRun> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::size_t first = records[i] + 1;
    const std::size_t next = i + 1 < records.size() ? records[i + 1] : path.size();
    if (first < next) out.push_back({first, next - 1});
  }
  return out;
}

std::vector<std::vector<double>> interval_aggregation(const DiscretePath& path, std::span<const double> s_values) {
  if (!std::is_sorted(s_values.begin(), s_values.end()) ||
      std::adjacent_find(s_values.begin(), s_values.end()) != s_values.end()) {
    throw InvalidArgument("interval_aggregation: s values must be strictly increasing");
  }
  std::vector<std::vector<double>> out;
  out.reserve(s_values.size());
  for (double s : s_values) {
    std::vector<double> lengths;
    for (const auto& run : record_gaps(path, s)) {
      lengths.push_back(static_cast<double>(run.last - run.first + 1) * path.step);
    }
    std::sort(lengths.begin(), lengths.end(), std::greater<>());
    out.push_back(std::move(lengths));
  }
  return out;
}

}  // namespace addcoal

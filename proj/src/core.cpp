#include "addcoal/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace addcoal {

namespace {

void check_positive(const std::vector<double>& masses) {
  if (masses.empty()) throw InvalidArgument("invalid configuration: no masses");
  for (double x : masses) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw InvalidArgument("invalid configuration: non-positive mass " + std::to_string(x));
    }
  }
}

}  // namespace

double RankedMassVector::sum() const { return std::accumulate(masses_.begin(), masses_.end(), 0.0); }

RankedMassVector rank(std::vector<double> masses) {
  check_positive(masses);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw InvalidArgument("invalid configuration: masses sum to " + std::to_string(total));
  }
  std::stable_sort(masses.begin(), masses.end(), std::greater<>());
  return RankedMassVector(std::move(masses));
}

RankedMassVector rank_normalized(std::vector<double> masses) {
  check_positive(masses);
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  for (double& x : masses) x /= total;
  std::stable_sort(masses.begin(), masses.end(), std::greater<>());
  return RankedMassVector(std::move(masses));
}

RankedMassVector monodisperse(std::size_t n) {
  if (n == 0) throw InvalidArgument("monodisperse: n must be positive");
  return rank_normalized(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

std::string to_string(const RankedMassVector& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ')';
  return os.str();
}

}  // namespace addcoal

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hashecon/common/error.hpp"
#include "hashecon/stats.hpp"

namespace hashecon::stats {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// P(a, x) by the power series; converges quickly for x < a + 1.
double lower_series(double a, double x, double log_prefactor) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(log_prefactor);
}

// Q(a, x) by the modified Lentz continued fraction; converges for x > a + 1.
double upper_fraction(double a, double x, double log_prefactor) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(log_prefactor) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw DomainError("incomplete gamma needs a > 0");
  if (!(x >= 0.0)) throw DomainError("incomplete gamma needs x >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) return 1.0 - lower_series(a, x, log_prefactor);
  return upper_fraction(a, x, log_prefactor);
}

double chi2_sf(double x, int df) {
  if (df < 1) throw DomainError(fmt::format("chi-square df must be >= 1, got {}", df));
  if (!(x >= 0.0)) throw DomainError(fmt::format("chi-square statistic must be >= 0, got {}", x));
  if (x == 0.0) return 1.0;
  double q = regularized_gamma_q(0.5 * df, 0.5 * x);
  return std::clamp(q, 0.0, 1.0);
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace hashecon::stats

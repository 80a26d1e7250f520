#include "cogmc/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace cogmc::special {

namespace {

// Above this point erfc(x) drops below 1e-273 and the direct product loses
// its normal range; the continued fraction is used instead.
constexpr double kContinuedFractionStart = 25.0;

// exp(x*x) with the rounding error of x*x carried into a second factor.
double exp_square(double x) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(hi) * std::exp(lo);
}

// Laplace continued fraction
//   erfcx(x) = 1/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated bottom-up; 24 levels reach full precision for x >= 25.
double erfcx_continued_fraction(double x) {
  double tail = x;
  for (int k = 24; k >= 1; --k) tail = x + 0.5 * k / tail;
  return 1.0 / (std::sqrt(std::numbers::pi) * tail);
}

}  // namespace

double erfc(double x) { return std::erfc(x); }

double erfcx(double x) {
  if (std::isnan(x)) return x;
  if (x < 0.0) {
    const double e = exp_square(x);
    if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
    return 2.0 * e - erfcx(-x);
  }
  if (x < kContinuedFractionStart) return exp_square(x) * std::erfc(x);
  return erfcx_continued_fraction(x);
}

double exp_erfc(double c, double x) {
  if (x <= 0.0) return std::exp(c) * std::erfc(x);
  // exp(c - x^2) with the square split the same way as exp_square.
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return erfcx(x) * std::exp(c - hi) * std::exp(-lo);
}

}  // namespace cogmc::special

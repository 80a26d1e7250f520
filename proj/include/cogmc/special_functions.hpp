#pragma once

namespace cogmc::special {

/// Complementary error function. Relative error below 1e-14 on the range
/// used by the hitting-probability series (|x| <= 26).
double erfc(double x);

/// Scaled complementary error function exp(x^2) * erfc(x).
///
/// Finite for every x > -26.6; returns +inf below that. For large positive x
/// it behaves as 1 / (x * sqrt(pi)), so products such as
/// exp(c) * erfc(x) can be formed as erfcx(x) * exp(c - x^2) without
/// overflowing the intermediate exponential.
double erfcx(double x);

/// exp(c) * erfc(x) evaluated without forming exp(c) on its own.
double exp_erfc(double c, double x);

}  // namespace cogmc::special

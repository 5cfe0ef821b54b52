#pragma once

#include <span>

namespace zpsync {

/// Scaled complementary error function exp(x^2) erfc(x). Relative error
/// below 1e-13 over the representable range; returns +inf once the result
/// overflows (x < about -26.6).
double erfcx(double x);

/// log(erfcx(x)), finite for every finite x.
double log_erfcx(double x);

/// exp(x*x) with the square split into an exact head and tail.
double exp_square(double x);

/// log(exp(a) + exp(b)).
double log_add_exp(double a, double b);

/// log(sum exp(v_i)); -inf for an empty span.
double log_sum_exp(std::span<const double> values);

} // namespace zpsync

#include "zpsync/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace zpsync {

namespace {

constexpr double kInvSqrtPi = 0.56418958354775628695;  // 1/sqrt(pi)
constexpr double kContinuedFractionStart = 26.0;

// Laplace continued fraction
//   erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
// evaluated bottom-up; for x >= 26 twenty levels are far past convergence.
double erfcx_continued_fraction(double x) {
    double f = x;
    for (int k = 20; k >= 1; --k) f = x + (0.5 * k) / f;
    return kInvSqrtPi / f;
}

} // namespace

double exp_square(double x) {
    const double hi = x * x;
    const double lo = std::fma(x, x, -hi);
    return std::exp(hi) * (1.0 + lo);
}

double erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x >= kContinuedFractionStart) return erfcx_continued_fraction(x);
    if (x < -26.7) return std::numeric_limits<double>::infinity();
    return exp_square(x) * std::erfc(x);
}

double log_erfcx(double x) {
    if (std::isnan(x)) return x;
    if (x >= 0.0) return std::log(erfcx(x));
    // erfc(x) lies in (1, 2] for x < 0.
    return x * x + std::log(std::erfc(x));
}

double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (a == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

double log_sum_exp(std::span<const double> values) {
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double peak = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(peak)) return peak;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - peak);
    return peak + std::log(sum);
}

} // namespace zpsync

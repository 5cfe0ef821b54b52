#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "zpsync/special.hpp"

using namespace zpsync;

namespace {

struct Frozen {
    double x;
    double value;
    double log_value;
};

// exp(x^2) erfc(x) at 40 digits (mpmath).
const Frozen kErfcx[] = {
    {-26.0, 7.6577249314905683515e+293, 676.69314718055994531},
    {-5.0, 144009798674.66104041, 25.69314718055917658},
    {-1.0, 5.0089800807622834663, 1.6112323176780704946},
    {-0.5, 1.9523604891825570933, 0.66903914777555958036},
    {0.0, 1.0, 0.0},
    {1e-8, 0.99999998871620842904, -1.1283791634617103315e-8},
    {0.3, 0.73459933456765515237, -0.30843005144008527593},
    {1.0, 0.42758357615580700441, -0.84960550993324824858},
    {2.5, 0.21080636406114358065, -1.5568152727272643589},
    {5.0, 0.11070463773306862637, -2.2008895455374344224},
    {10.0, 0.056140992743822585858, -2.8798890248448885748},
    {26.6, 0.021195178159166128515, -3.8539815684961327305},
    {50.0, 0.0112815362653237725, -4.484587848451371873},
    {1000.0, 0.0005641893014533876542, -7.4801207219062121407},
    {1000000.0, 5.6418958354747419216e-7, -14.387875500889474191},
};

} // namespace

TEST_CASE("erfcx matches high precision values") {
    for (const auto& f : kErfcx) {
        CAPTURE(f.x);
        CHECK(std::abs(erfcx(f.x) / f.value - 1.0) < 1e-13);
        const double tol = std::max(1e-13 * std::abs(f.log_value), 1e-21);
        CHECK(std::abs(log_erfcx(f.x) - f.log_value) < std::max(tol, 1e-13));
    }
}

TEST_CASE("erfcx overflows to infinity while its log stays finite") {
    CHECK(std::isinf(erfcx(-30.0)));
    CHECK(log_erfcx(-30.0) == doctest::Approx(900.0 + std::log(2.0)).epsilon(1e-15));
    CHECK(log_erfcx(-1e3) == doctest::Approx(1e6 + std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("erfcx agrees with exp(x^2) erfc(x) where the product is safe") {
    for (double x = -3.0; x <= 3.0; x += 0.01) {
        const double direct = std::exp(x * x) * std::erfc(x);
        CHECK(std::abs(erfcx(x) / direct - 1.0) < 1e-12);
    }
}

TEST_CASE("erfcx reflection identity erfcx(-x) = 2 exp(x^2) - erfcx(x)") {
    for (double x = 0.0; x <= 5.0; x += 0.125) {
        const double lhs = erfcx(-x);
        const double rhs = 2.0 * std::exp(x * x) - erfcx(x);
        CHECK(std::abs(lhs / rhs - 1.0) < 1e-13);
    }
}

TEST_CASE("exp_square is exact to rounding for large arguments") {
    CHECK(exp_square(0.0) == 1.0);
    CHECK(exp_square(2.0) == doctest::Approx(std::exp(4.0)).epsilon(1e-15));
    const double x = 26.1234567;
    const long double ref = std::exp(static_cast<long double>(x) * x);
    CHECK(std::abs(exp_square(x) / static_cast<double>(ref) - 1.0) < 4e-15);
}

TEST_CASE("log_add_exp and log_sum_exp are stable") {
    CHECK(log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)));
    CHECK(log_add_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
    CHECK(log_add_exp(-1000.0, -1e9) == doctest::Approx(-1000.0));
    const double ninf = -std::numeric_limits<double>::infinity();
    CHECK(log_add_exp(ninf, 3.0) == 3.0);
    CHECK(log_add_exp(ninf, ninf) == ninf);
    const std::vector<double> v{-800.0, -801.0, -802.0};
    const double ref = -800.0 + std::log(1.0 + std::exp(-1.0) + std::exp(-2.0));
    CHECK(log_sum_exp(v) == doctest::Approx(ref).epsilon(1e-15));
    CHECK(log_sum_exp(std::vector<double>{}) == ninf);
}

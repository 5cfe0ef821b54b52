#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "zpsync/analytic_pdf.hpp"
#include "zpsync/diagnostics.hpp"
#include "zpsync/errors.hpp"

using namespace zpsync;

namespace {

std::vector<double> normal_draws(std::size_t n, double sd, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, sd);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

double normal_pdf(double y, double sd) {
    return std::exp(-0.5 * y * y / (sd * sd)) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

} // namespace

TEST_CASE("moments of standard normal draws") {
    const auto v = normal_draws(1'000'000, 1.0, 1);
    const auto m = empirical_moments(v);
    CHECK(std::abs(m.kurtosis - 3.0) < 0.05);
    CHECK(std::abs(m.skewness) < 0.01);
    CHECK(std::abs(m.variance - 1.0) < 0.01);
    CHECK(m.count == v.size());
}

TEST_CASE("moments of Laplace draws") {
    Rng rng(2);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(1'000'000);
    for (auto& x : v) x = e(rng) - e(rng);
    CHECK(std::abs(empirical_moments(v).kurtosis - 6.0) < 0.1);
}

TEST_CASE("moments reject degenerate samples") {
    CHECK_THROWS_AS(empirical_moments(std::vector<double>(10, 2.5)), ArgumentError);
    CHECK_THROWS_AS(empirical_moments(std::vector<double>{1.0, 2.0, 3.0}), ArgumentError);
}

TEST_CASE("sample kurtosis is at least one") {
    Rng rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = std::uniform_int_distribution<int>(4, 40)(rng);
        std::vector<double> v(static_cast<std::size_t>(n));
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& x : v) x = std::pow(u(rng), 3);
        CHECK(empirical_moments(v).kurtosis >= 1.0 - 1e-12);
    }
    CHECK(empirical_moments(std::vector<double>{-1, 1, -1, 1}).kurtosis == doctest::Approx(1.0));
}

TEST_CASE("quadrature moments of known densities") {
    const auto lap = density_moments([](double y) { return 0.5 * std::exp(-std::abs(y)); });
    CHECK(lap.mass == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lap.variance == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(lap.kurtosis == doctest::Approx(6.0).epsilon(1e-9));
    const auto gauss = density_moments([](double y) { return normal_pdf(y, 0.3); });
    CHECK(gauss.variance == doctest::Approx(0.09).epsilon(1e-10));
    CHECK(gauss.kurtosis == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("numeric CDF of a normal density") {
    const NumericCdf cdf([](double y) { return normal_pdf(y, 0.5); }, 0.5);
    for (double y = -3.0; y <= 3.0; y += 0.0137) {
        CHECK(std::abs(cdf(y) - 0.5 * std::erfc(-y / (0.5 * std::sqrt(2.0)))) < 1e-9);
    }
    CHECK(cdf(-100.0) == 0.0);
    CHECK(std::abs(cdf(100.0) - 1.0) < 1e-14);
}

TEST_CASE("KS distance of samples from their own density") {
    const auto v = normal_draws(1'000'000, 0.7, 4);
    CHECK(ks_distance(v, [](double y) { return normal_pdf(y, 0.7); }, 0.7) < 0.005);
}

TEST_CASE("KS distance separates Gaussian samples from the heavy-tailed density") {
    SystemConfig cfg;
    cfg.ebn0_db = 15.0;
    const auto pdp = make_pdp(cfg);
    const SignalDensity d(*tap_range(1, cfg), pdp, 1.0, noise_variance_from_ebn0(cfg, pdp));
    const double sd = std::sqrt(d.variance());
    const auto v = normal_draws(1'000'000, sd, 5);
    CHECK(ks_distance(v, [&](double y) { return d.pdf(y); }, sd) > 0.01);
}

TEST_CASE("KS distance is permutation invariant and rejects empty input") {
    auto v = normal_draws(5000, 1.0, 6);
    const NumericCdf cdf([](double y) { return normal_pdf(y, 1.0); }, 1.0);
    const double a = ks_distance(v, cdf);
    Rng rng(7);
    std::shuffle(v.begin(), v.end(), rng);
    CHECK(ks_distance(v, cdf) == a);
    std::reverse(v.begin(), v.end());
    CHECK(ks_distance(v, cdf) == a);
    CHECK_THROWS_AS(ks_distance(std::vector<double>{}, cdf), ArgumentError);
}

TEST_CASE("Pearson correlation") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const std::vector<double> b{2, 4, 6, 8, 10};
    const std::vector<double> c{5, 4, 3, 2, 1};
    CHECK(pearson_correlation(a, b) == doctest::Approx(1.0));
    CHECK(pearson_correlation(a, c) == doctest::Approx(-1.0));
    CHECK_THROWS_AS(pearson_correlation(a, std::vector<double>{1, 2}), ArgumentError);
    CHECK_THROWS_AS(pearson_correlation(a, std::vector<double>(5, 1.0)), ArgumentError);
}

TEST_CASE("correlation checks on received samples") {
    SystemConfig cfg;
    cfg.ebn0_db = 25.0;
    const auto pdp = make_pdp(cfg);
    CHECK(correlation_check(cfg, pdp, 10, 100, 0, 2000, 1) == doctest::Approx(1.0));
    CHECK(std::abs(correlation_check(cfg, pdp, 10, 100, 1, 100000, 2)) < 0.03);
    CHECK(std::abs(iq_correlation_check(cfg, pdp, 10, 100, 100000, 3)) < 0.03);
    CHECK_THROWS_AS(correlation_check(cfg, pdp, 0, 0, -1, 10, 1), ArgumentError);
}

TEST_CASE("component samples are reproducible and have the model variance") {
    SystemConfig cfg;
    cfg.source_model = SourceModel::GaussianIid;
    const auto pdp = make_pdp(cfg);
    const auto a = component_samples(cfg, pdp, 1, 64, 50000, 9);
    const auto b = component_samples(cfg, pdp, 1, 64, 50000, 9);
    CHECK(a == b);
    const SignalDensity d(*tap_range(64, cfg), pdp, 1.0, noise_variance_from_ebn0(cfg, pdp));
    CHECK(std::abs(empirical_moments(a).variance / d.variance() - 1.0) < 0.03);
}

TEST_CASE("histogram is normalized over the sample") {
    const auto v = normal_draws(100000, 1.0, 10);
    const auto h = histogram(v, 80, -4.0, 4.0, [](double y) { return normal_pdf(y, 1.0); });
    REQUIRE(h.size() == 80);
    double mass = 0.0;
    for (const auto& r : h) mass += r.empirical * 0.1;
    const auto inside = std::count_if(v.begin(), v.end(), [](double x) { return x >= -4.0 && x < 4.0; });
    CHECK(mass == doctest::Approx(double(inside) / double(v.size())));
    CHECK(h[40].model == doctest::Approx(normal_pdf(0.05, 1.0)));
    CHECK(std::abs(h[40].empirical - h[40].model) < 0.02);
    CHECK_THROWS_AS(histogram(v, 0, 0.0, 1.0, [](double) { return 0.0; }), ArgumentError);
}

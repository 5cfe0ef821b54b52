#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "zpsync/analytic_pdf.hpp"
#include "zpsync/diagnostics.hpp"
#include "zpsync/errors.hpp"

using namespace zpsync;

namespace {

struct Setup {
    SystemConfig cfg;
    PowerDelayProfile pdp;
    double nv;

    explicit Setup(double ebn0_db = 15.0) {
        cfg.ebn0_db = ebn0_db;
        pdp = make_pdp(cfg);
        nv = noise_variance_from_ebn0(cfg, pdp);
    }

    SignalDensity density(int m) const { return SignalDensity(*tap_range(m, cfg), pdp, cfg.sigma_x2, nv); }

    std::vector<long double> lambdas(int m) const {
        const auto r = *tap_range(m, cfg);
        std::vector<double> taps(pdp.variances().begin() + r.first, pdp.variances().begin() + r.last + 1);
        return oracle::rates(taps, cfg.sigma_x2);
    }
};

} // namespace

TEST_CASE("tap ranges follow the three cases and the noise-only region") {
    const SystemConfig cfg;
    CHECK(*tap_range(0, cfg) == TapRange{0, 0});
    CHECK(*tap_range(5, cfg) == TapRange{0, 5});
    CHECK(*tap_range(9, cfg) == TapRange{0, 9});
    CHECK(*tap_range(64, cfg) == TapRange{0, 9});
    CHECK(*tap_range(127, cfg) == TapRange{0, 9});
    CHECK(*tap_range(128, cfg) == TapRange{1, 9});
    CHECK(*tap_range(130, cfg) == TapRange{3, 9});
    CHECK(*tap_range(136, cfg) == TapRange{9, 9});
    for (int m = 137; m <= 142; ++m) CHECK_FALSE(tap_range(m, cfg).has_value());
    CHECK_THROWS_AS(tap_range(-1, cfg), ArgumentError);
    CHECK_THROWS_AS(tap_range(143, cfg), ArgumentError);
}

TEST_CASE("noise log density") {
    CHECK(log_pdf_noise(0.0, 1.0) == doctest::Approx(-0.57236494292470008707).epsilon(1e-15));
    const double nv = 0.37;
    const double s = std::sqrt(nv);
    CHECK(log_pdf_noise(s, nv) == doctest::Approx(-1.0 - 0.5 * std::log(std::numbers::pi * nv)));
    const double mass = integrate_density([&](double y) { return std::exp(log_pdf_noise(y, nv)); });
    CHECK(std::abs(mass - 1.0) < 1e-10);
}

TEST_CASE("signal density is exactly symmetric") {
    const Setup s;
    Rng rng(1);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int m : {0, 1, 64, 130, 136}) {
        const auto d = s.density(m);
        for (int k = 0; k < 200; ++k) {
            const double y = u(rng);
            CHECK(d.log_pdf(y) == d.log_pdf(-y));
            CHECK(d.log_pdf_v(y) == d.log_pdf_v(-y));
        }
    }
}

TEST_CASE("signal density integrates to one") {
    for (double db : {0.0, 15.0, 40.0}) {
        const Setup s(db);
        for (int m : {0, 1, 5, 64, 130}) {
            CAPTURE(db);
            CAPTURE(m);
            const auto d = s.density(m);
            CHECK(std::abs(integrate_density([&](double y) { return d.pdf(y); }) - 1.0) < 1e-6);
            CHECK(std::abs(integrate_density([&](double v) { return d.pdf_v(v); }) - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("signal density matches the convolution oracle in the bulk") {
    const Setup s;
    for (int m : {0, 1, 5, 64, 130}) {
        const auto d = s.density(m);
        const auto lambda = s.lambdas(m);
        const double sd = std::sqrt(d.variance());
        for (int k = -25; k <= 25; ++k) {
            const double y = 5.0 * sd * k / 25.0;
            const double ref = oracle::received_density(y, lambda, s.nv);
            CHECK(std::abs(d.pdf(y) / ref - 1.0) < 1e-8);
        }
    }
}

TEST_CASE("signal part density matches the literal double sum") {
    const Setup s;
    for (int m : {1, 5, 64, 130}) {
        const auto d = s.density(m);
        const auto lambda = s.lambdas(m);
        for (double v : {0.0, 0.01, 0.2, 0.7, 1.5, 3.0, 6.0}) {
            const long double ref = oracle::signal_part_density(v, lambda);
            CHECK(std::abs(d.pdf_v(v) / static_cast<double>(ref) - 1.0) < 1e-11);
        }
    }
}

TEST_CASE("excluding n in the second product is the reading that matches the convolution") {
    const Setup s;
    const auto lambda = s.lambdas(5);
    for (double v : {0.0, 0.3, 1.1, 2.5}) {
        const double conv = oracle::signal_part_density_by_quadrature(v, lambda);
        CHECK(std::abs(static_cast<double>(oracle::signal_part_density(v, lambda)) / conv - 1.0) < 1e-8);
    }
    // Excluding j instead leaves the factor (lambda_n - lambda_n) = 0 for every n != j.
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        for (std::size_t n = 0; n < lambda.size(); ++n) {
            if (n == j) continue;
            long double prod = 1.0L;
            for (std::size_t u = 0; u < lambda.size(); ++u) {
                if (u != j) prod *= lambda[u] - lambda[n];
            }
            CHECK(prod == 0.0L);
        }
    }
}

TEST_CASE("single tap signal part is Laplace") {
    const PowerDelayProfile pdp({0.3});
    const SignalDensity d(TapRange{0, 0}, pdp, 1.0, 0.01);
    const double lambda = 2.0 / std::sqrt(0.3);
    for (double v : {0.0, 0.1, 1.0, 4.0}) {
        CHECK(d.pdf_v(v) == doctest::Approx(0.5 * lambda * std::exp(-lambda * v)).epsilon(1e-14));
    }
}

TEST_CASE("coefficients are consistent") {
    const Setup s;
    const auto d = s.density(64);
    const auto& c = d.coefficients();
    double mass = 0.0;
    for (std::size_t j = 0; j < c.rates.size(); ++j) {
        double row = 0.0;
        for (std::size_t n = 0; n < c.rates.size(); ++n) row += c.pair_weight(int(j), int(n));
        CHECK(row == doctest::Approx(c.rate_weights[j]).epsilon(1e-9));
        mass += 2.0 * c.rate_weights[j] / c.rates[j];
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("density moments at 15 dB for m = 1") {
    const Setup s;
    const auto d = s.density(1);
    const auto dm = density_moments([&](double y) { return d.pdf(y); });
    CHECK(std::abs(dm.variance - 0.3205) <= 5e-4);
    CHECK(std::abs(dm.kurtosis - 4.5653) <= 0.01);
    CHECK(dm.variance == doctest::Approx(d.variance()).epsilon(1e-9));
}

TEST_CASE("tails are heavier than the Gaussian of equal variance") {
    const Setup s;
    for (int m : {1, 64, 130}) {
        const auto d = s.density(m);
        const double var = d.variance();
        const double sd = std::sqrt(var);
        for (double k = 4.0; k <= 10.0; k += 0.5) {
            const double y = k * sd;
            const double gauss = -0.5 * y * y / var - 0.5 * std::log(2.0 * std::numbers::pi * var);
            CHECK(d.log_pdf(y) > gauss);
        }
    }
}

TEST_CASE("vanishing taps reduce to the noise density") {
    const PowerDelayProfile pdp({1e-14, 4e-15, 1.6e-15});
    const double nv = 0.02;
    const SignalDensity d(TapRange{0, 2}, pdp, 1.0, nv);
    for (double y : {0.0, 0.05, 0.2, 0.4}) {
        CHECK(std::abs(d.log_pdf(y) - log_pdf_noise(y, nv)) < 1e-6);
    }
}

TEST_CASE("far tails stay finite") {
    const Setup s(40.0);
    for (int m : {0, 64, 136}) {
        const auto d = s.density(m);
        for (double y : {5.0, 20.0, 100.0, 1e3}) {
            CHECK(std::isfinite(d.log_pdf(y)));
            CHECK(std::isfinite(d.log_pdf_v(y)));
        }
    }
}

TEST_CASE("duplicate rates are rejected unless perturbation is requested") {
    const PowerDelayProfile pdp({0.5, 0.5, 0.25});
    CHECK_THROWS_AS(SignalDensity(TapRange{0, 2}, pdp, 1.0, 0.01), DegeneratePdpError);
    PdfOptions opt;
    opt.perturb_duplicate_rates = true;
    const SignalDensity d(TapRange{0, 2}, pdp, 1.0, 0.01, opt);
    CHECK(std::abs(integrate_density([&](double y) { return d.pdf(y); }) - 1.0) < 1e-6);
    CHECK_NOTHROW(SignalDensity(TapRange{1, 2}, pdp, 1.0, 0.01));
}

TEST_CASE("wrappers keyed by index") {
    const Setup s;
    CHECK(log_pdf_signal(0.3, 64, s.cfg, s.pdp, s.nv) == s.density(64).log_pdf(0.3));
    CHECK(log_pdf_v(0.3, 64, s.cfg, s.pdp) == s.density(64).log_pdf_v(0.3));
    CHECK_THROWS_AS(log_pdf_signal(0.3, 140, s.cfg, s.pdp, s.nv), ArgumentError);
    Rng rng(1);
    CHECK_THROWS_AS(sample_v(140, s.cfg, s.pdp, rng), ArgumentError);
}

TEST_CASE("signal part draws have the right moments") {
    const Setup s;
    const auto d = s.density(64);
    Rng rng(31);
    std::vector<double> v(1'000'000);
    for (auto& x : v) x = d.sample_v(rng);
    const auto m = empirical_moments(v);
    double var = 0.0;
    for (double r : d.coefficients().rates) var += 2.0 / (r * r);
    CHECK(std::abs(m.mean) < 3.0 * std::sqrt(var) / 1e3);
    CHECK(std::abs(m.variance / var - 1.0) < 0.02);
    CHECK(ks_distance(v, [&](double x) { return d.pdf_v(x); }, std::sqrt(var)) < 0.005);
}

TEST_CASE("unit rate single tap draws are Laplace(1)") {
    const PowerDelayProfile pdp({4.0});
    const SignalDensity d(TapRange{0, 0}, pdp, 1.0, 0.01);
    REQUIRE(d.coefficients().rates[0] == doctest::Approx(1.0));
    Rng rng(32);
    std::vector<double> v(1'000'000);
    for (auto& x : v) x = d.sample_v(rng);
    CHECK(std::abs(empirical_moments(v).kurtosis - 6.0) < 0.1);
}

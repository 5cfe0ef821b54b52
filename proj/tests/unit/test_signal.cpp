#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <utility>

#include "doctest.h"
#include "zpsync/diagnostics.hpp"
#include "zpsync/errors.hpp"
#include "zpsync/signal.hpp"

using namespace zpsync;

namespace {

// O(n^2) unitary inverse DFT.
std::vector<cplx> naive_idft(const std::vector<cplx>& x) {
    const std::size_t n = x.size();
    std::vector<cplx> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        cplx acc{};
        for (std::size_t k = 0; k < n; ++k) {
            acc += x[k] * std::polar(1.0, 2.0 * std::numbers::pi * double(k * t % n) / double(n));
        }
        out[t] = acc / std::sqrt(double(n));
    }
    return out;
}

std::vector<double> real_parts(const std::vector<std::vector<cplx>>& blocks) {
    std::vector<double> v;
    for (const auto& b : blocks) {
        for (const auto& s : b) v.push_back(s.real());
    }
    return v;
}

} // namespace

TEST_CASE("QAM alphabets have the right size, unit energy and distinct points") {
    for (int m : {2, 4, 16, 32, 64, 128, 256, 512, 1024}) {
        CAPTURE(m);
        const auto a = qam_constellation(m);
        REQUIRE(static_cast<int>(a.size()) == m);
        double e = 0.0;
        std::set<std::pair<long, long>> seen;
        for (const auto& p : a) {
            e += std::norm(p);
            seen.insert({std::lround(p.real() * 1e9), std::lround(p.imag() * 1e9)});
        }
        CHECK(e / m == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(static_cast<int>(seen.size()) == m);
    }
    CHECK_THROWS_AS(qam_constellation(8), ConfigError);
    CHECK_THROWS_AS(qam_constellation(12), ConfigError);
}

TEST_CASE("128-QAM cross constellation is symmetric with 12 rows") {
    const auto a = qam_constellation(128);
    std::set<long> re;
    for (const auto& p : a) re.insert(std::lround(p.real() * 1e6));
    CHECK(re.size() == 12);
    double mean_re = 0.0;
    for (const auto& p : a) mean_re += p.real();
    CHECK(std::abs(mean_re) < 1e-12);
}

TEST_CASE("OFDM modulation matches a direct inverse DFT and is unitary") {
    Rng rng(7);
    std::normal_distribution<double> g;
    for (int n : {1, 2, 8, 64, 128}) {
        std::vector<cplx> x(static_cast<std::size_t>(n));
        for (auto& v : x) v = {g(rng), g(rng)};
        const auto y = ofdm_modulate(x);
        const auto ref = naive_idft(x);
        double ex = 0.0, ey = 0.0, err = 0.0;
        for (int k = 0; k < n; ++k) {
            ex += std::norm(x[k]);
            ey += std::norm(y[k]);
            err = std::max(err, std::abs(y[k] - ref[k]));
        }
        CHECK(err < 1e-12);
        CHECK(ey == doctest::Approx(ex).epsilon(1e-12));
    }
    const std::vector<cplx> zeros(128);
    for (const auto& v : ofdm_modulate(zeros)) CHECK(v == cplx{});
}

TEST_CASE("zero padding") {
    const std::vector<cplx> ab{{1, 2}, {3, 4}};
    const auto p = zero_pad(ab, 1);
    REQUIRE(p.size() == 3);
    CHECK(p[0] == ab[0]);
    CHECK(p[1] == ab[1]);
    CHECK(p[2] == cplx{});
    CHECK(zero_pad(ab, 0) == ab);

    const SystemConfig cfg;
    Rng rng(1);
    const auto block = generate_symbols(cfg, 1, rng).front();
    const auto padded = zero_pad(block, cfg.n_z);
    CHECK(padded.size() == 143);
    CHECK(std::all_of(padded.end() - 15, padded.end(), [](cplx v) { return v == cplx{}; }));
    CHECK_THROWS_AS(zero_pad(ab, -1), ArgumentError);
}

TEST_CASE("Gaussian source has the configured sample variance") {
    SystemConfig cfg;
    cfg.source_model = SourceModel::GaussianIid;
    cfg.sigma_x2 = 2.0;
    Rng rng(11);
    const auto blocks = generate_symbols(cfg, 1'000'000 / cfg.n_x, rng);
    double power = 0.0;
    std::size_t n = 0;
    for (const auto& b : blocks) {
        for (const auto& s : b) {
            power += std::norm(s);
            ++n;
        }
    }
    CHECK(std::abs(power / double(n) / cfg.sigma_x2 - 1.0) < 0.005);
}

TEST_CASE("QAM through the inverse DFT is close to Gaussian") {
    const SystemConfig cfg;
    Rng rng(12);
    const auto blocks = generate_symbols(cfg, 1'000'000 / cfg.n_x, rng);
    const auto re = real_parts(blocks);
    const auto m = empirical_moments(re);
    CHECK(std::abs(m.kurtosis - 3.0) < 0.05);
    CHECK(std::abs(2.0 * m.variance - cfg.sigma_x2) < 0.01);
}

TEST_CASE("static channel is constant in time") {
    SystemConfig cfg;
    cfg.max_doppler_hz = 0.0;
    const auto pdp = make_pdp(cfg);
    Rng rng(3);
    const auto r = generate_channel(cfg, pdp, 500, rng);
    for (int l = 0; l < cfg.n_h; ++l) {
        for (std::int64_t t = 1; t < 500; ++t) CHECK(r.at(t, l) == r.at(0, l));
    }
}

TEST_CASE("tap power matches the profile over realizations") {
    const SystemConfig cfg;
    const auto pdp = make_pdp(cfg);
    std::vector<double> power(static_cast<std::size_t>(cfg.n_h), 0.0);
    double cross = 0.0;
    const int draws = 10000;
    for (int k = 0; k < draws; ++k) {
        Rng rng = make_stream(5, {static_cast<std::uint64_t>(k)});
        const auto ch = FadingChannel::draw(cfg, pdp, rng);
        for (int l = 0; l < cfg.n_h; ++l) power[l] += std::norm(ch.tap(1000, l));
        cross += (ch.tap(1000, 0) * std::conj(ch.tap(1000, 1))).real();
    }
    for (int l = 0; l < cfg.n_h; ++l) {
        CAPTURE(l);
        CHECK(std::abs(power[l] / draws / pdp.variance(l) - 1.0) < 0.03);
    }
    const double rho = cross / draws / std::sqrt(pdp.variance(0) * pdp.variance(1));
    CHECK(std::abs(rho) < 0.03);
}

TEST_CASE("Doppler autocorrelation follows J0(2 pi f_D tau)") {
    SystemConfig cfg;
    cfg.max_doppler_hz = 5.0;
    cfg.sample_period_s = 1e-6;
    const PowerDelayProfile pdp(std::vector<double>(10, 0.1));
    const std::int64_t lag_half = 100000;  // 2 pi f_D tau = pi
    const std::int64_t lag_one = std::llround(1.0 / (2.0 * std::numbers::pi * 5.0) / 1e-6);
    double c_half = 0.0, c_one = 0.0, p = 0.0;
    for (int k = 0; k < 2000; ++k) {
        Rng rng = make_stream(6, {static_cast<std::uint64_t>(k)});
        const auto ch = FadingChannel::draw(cfg, pdp, rng);
        for (int l = 0; l < 10; ++l) {
            const cplx h0 = ch.tap(0, l);
            c_half += (h0 * std::conj(ch.tap(lag_half, l))).real();
            c_one += (h0 * std::conj(ch.tap(lag_one, l))).real();
            p += std::norm(h0);
        }
    }
    CHECK(std::abs(c_half / p - std::cyl_bessel_j(0.0, std::numbers::pi)) < 0.05);
    CHECK(std::abs(c_one / p - std::cyl_bessel_j(0.0, 1.0)) < 0.05);
}

TEST_CASE("realize matches pointwise tap evaluation") {
    const SystemConfig cfg;
    const auto pdp = make_pdp(cfg);
    Rng rng(9);
    const auto ch = FadingChannel::draw(cfg, pdp, rng);
    const auto r = ch.realize(-20, 3000);
    for (std::int64_t t = -20; t < 2980; t += 137) {
        for (int l = 0; l < cfg.n_h; ++l) CHECK(std::abs(r.at(t, l) - ch.tap(t, l)) < 1e-12);
    }
    SystemConfig neg = cfg;
    neg.max_doppler_hz = -1.0;
    CHECK_THROWS_AS(FadingChannel::draw(neg, pdp, rng), ConfigError);
}

TEST_CASE("noiseless identity channel returns the padded stream") {
    SystemConfig cfg;
    cfg.n_h = 1;
    cfg.n_z = 4;
    cfg.num_symbols = 3;
    const PowerDelayProfile pdp({1.0});
    const auto ch = FadingChannel::fixed({cplx{1.0, 0.0}});
    ReceptionOptions opt;
    opt.channel = &ch;
    opt.noise_var = 0.0;

    Rng rng(21);
    Rng copy = rng;
    const auto w = simulate_reception(cfg, pdp, 0, rng, opt);
    Rng source = fork(copy, Stream::Source);
    std::vector<cplx> stream;
    for (const auto& b : generate_symbols(cfg, cfg.num_symbols + 1, source)) {
        const auto p = zero_pad(b, cfg.n_z);
        stream.insert(stream.end(), p.begin(), p.end());
    }
    REQUIRE(w.size() == static_cast<std::size_t>(cfg.window_length()));
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.samples[i] == stream[i]);
}

TEST_CASE("timing offset shifts the window along the stream") {
    SystemConfig cfg;
    cfg.n_h = 1;
    cfg.n_z = 4;
    cfg.num_symbols = 3;
    const PowerDelayProfile pdp({1.0});
    const auto ch = FadingChannel::fixed({cplx{0.6, -0.8}});
    ReceptionOptions opt;
    opt.channel = &ch;
    opt.noise_var = 0.0;
    Rng r0(22), r3(22), rm(22);
    const auto w0 = simulate_reception(cfg, pdp, 0, r0, opt);
    const auto w3 = simulate_reception(cfg, pdp, 3, r3, opt);
    const auto wm = simulate_reception(cfg, pdp, -5, rm, opt);
    CHECK(w3.true_d == 3);
    for (std::size_t i = 0; i + 3 < w0.size(); ++i) CHECK(w3.samples[i] == w0.samples[i + 3]);
    for (std::size_t i = 0; i < 5; ++i) CHECK(wm.samples[i] == cplx{});
    for (std::size_t i = 5; i < wm.size(); ++i) CHECK(wm.samples[i] == w0.samples[i - 5]);
}

TEST_CASE("samples before the packet carry noise power only") {
    const SystemConfig cfg;
    const auto pdp = make_pdp(cfg);
    const double nv = noise_variance_from_ebn0(cfg, pdp);
    double p = 0.0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_stream(23, {static_cast<std::uint64_t>(t)});
        const auto w = simulate_reception(cfg, pdp, -5, rng);
        for (int i = 0; i < 5; ++i) p += std::norm(w.samples[i]);
    }
    CHECK(std::abs(p / (5.0 * trials) / nv - 1.0) < 0.05);
}

TEST_CASE("reception rejects offsets outside the range and is deterministic") {
    const SystemConfig cfg;
    const auto pdp = make_pdp(cfg);
    Rng rng(1);
    CHECK_THROWS_AS(simulate_reception(cfg, pdp, 31, rng), ArgumentError);
    CHECK_THROWS_AS(simulate_reception(cfg, pdp, -31, rng), ArgumentError);
    Rng a(99), b(99);
    const auto wa = simulate_reception(cfg, pdp, 7, a);
    const auto wb = simulate_reception(cfg, pdp, 7, b);
    CHECK(wa.samples == wb.samples);
}

TEST_CASE("symbol energy is preserved by a unit power channel") {
    SystemConfig cfg;
    cfg.max_doppler_hz = 0.0;
    const auto pdp = make_pdp(cfg);
    ReceptionOptions opt;
    opt.noise_var = 0.0;
    double e = 0.0;
    const int trials = 3000;
    for (int t = 0; t < trials; ++t) {
        Rng rng = make_stream(24, {static_cast<std::uint64_t>(t)});
        const auto w = simulate_reception(cfg, pdp, 0, rng, opt);
        for (int i = cfg.n_s(); i < 2 * cfg.n_s(); ++i) e += std::norm(w.samples[i]);
    }
    const double expected = cfg.n_x * cfg.sigma_x2 * pdp.total_power();
    CHECK(std::abs(e / trials / expected - 1.0) < 0.03);
}

TEST_CASE("simulate_samples agrees in distribution with full windows") {
    SystemConfig cfg;
    cfg.source_model = SourceModel::GaussianIid;
    const auto pdp = make_pdp(cfg);
    const double nv = noise_variance_from_ebn0(cfg, pdp);
    const std::int64_t positions[] = {cfg.n_s() * 2 + 1, cfg.n_s() * 2 + 140};
    double p_sig = 0.0, p_noise = 0.0;
    const int trials = 20000;
    Rng rng(25);
    for (int t = 0; t < trials; ++t) {
        const auto y = simulate_samples(cfg, pdp, positions, nv, rng);
        p_sig += std::norm(y[0]);
        p_noise += std::norm(y[1]);
    }
    const double expected = nv + cfg.sigma_x2 * (pdp.variance(0) + pdp.variance(1));
    CHECK(std::abs(p_sig / trials / expected - 1.0) < 0.03);
    CHECK(std::abs(p_noise / trials / nv - 1.0) < 0.03);
}

#include <benchmark/benchmark.h>

#include <random>

#include "zpsync/harness.hpp"
#include "zpsync/special.hpp"

using namespace zpsync;

namespace {

struct Fixture {
    SystemConfig cfg;
    PowerDelayProfile pdp;
    double noise_var;
    SignalDensity interior;
    std::vector<double> ys;

    Fixture()
        : pdp(make_pdp(cfg)),
          noise_var(noise_variance_from_ebn0(cfg, pdp)),
          interior(*tap_range(64, cfg), pdp, cfg.sigma_x2, noise_var) {
        Rng rng(7);
        for (int k = 0; k < 1024; ++k) ys.push_back(interior.sample_v(rng) + 0.05 * std::normal_distribution<>()(rng));
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

void BM_LogErfcx(benchmark::State& state) {
    double x = -3.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_erfcx(x));
        x = x > 30.0 ? -3.0 : x + 0.37;
    }
}
BENCHMARK(BM_LogErfcx);

void BM_AnalyticLogPdf(benchmark::State& state) {
    const Fixture& f = fixture();
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.interior.log_pdf(f.ys[k++ & 1023]));
    }
}
BENCHMARK(BM_AnalyticLogPdf);

void BM_McsLogPdf(benchmark::State& state) {
    const Fixture& f = fixture();
    Rng rng(3);
    const auto mcs = KernelMixtureDensity::sampled(f.interior, static_cast<int>(state.range(0)), rng);
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mcs.log_pdf(f.ys[k++ & 1023]));
    }
}
BENCHMARK(BM_McsLogPdf)->Arg(100)->Arg(10000)->Arg(100000);

void BM_McsLogPdfDirect(benchmark::State& state) {
    const Fixture& f = fixture();
    Rng rng(3);
    const auto mcs = KernelMixtureDensity::sampled(f.interior, 10000, rng);
    std::size_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mcs.log_pdf_direct(f.ys[k++ & 1023]));
    }
}
BENCHMARK(BM_McsLogPdfDirect);

void BM_SimulateTrial(benchmark::State& state) {
    const Fixture& f = fixture();
    std::int64_t t = 0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_trial(f.cfg, f.pdp, t++));
}
BENCHMARK(BM_SimulateTrial)->Unit(benchmark::kMicrosecond);

void BM_ExhaustiveSearch(benchmark::State& state) {
    const Fixture& f = fixture();
    const auto mode = static_cast<PdfMode>(state.range(0));
    Rng rng = make_stream(1, {static_cast<std::uint64_t>(Stream::Mcs)});
    const PdfTable table = mode == PdfMode::Mcs ? build_mcs_table(f.cfg, f.pdp, f.noise_var, 10000, rng)
                                                : build_pdf_table(f.cfg, f.pdp, f.noise_var, mode);
    std::vector<ObservationWindow> windows;
    for (int t = 0; t < 8; ++t) windows.push_back(simulate_trial(f.cfg, f.pdp, t));
    std::size_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(ml_exhaustive(windows[k++ % 8], table, f.cfg.to_range).d_hat);
    state.SetLabel(std::string(to_string(mode)));
}
BENCHMARK(BM_ExhaustiveSearch)
    ->Arg(static_cast<int>(PdfMode::Analytic))
    ->Arg(static_cast<int>(PdfMode::Mcs))
    ->Arg(static_cast<int>(PdfMode::GaussianApprox))
    ->Unit(benchmark::kMillisecond);

void BM_GoldenSearch(benchmark::State& state) {
    const Fixture& f = fixture();
    const PdfTable table = build_pdf_table(f.cfg, f.pdp, f.noise_var, PdfMode::Analytic);
    std::vector<ObservationWindow> windows;
    for (int t = 0; t < 8; ++t) windows.push_back(simulate_trial(f.cfg, f.pdp, t));
    std::size_t k = 0;
    for (auto _ : state) {
        Rng rng = make_stream(1, k, Stream::Golden);
        benchmark::DoNotOptimize(ml_golden(windows[k++ % 8], table, f.cfg.to_range, rng).d_hat);
    }
}
BENCHMARK(BM_GoldenSearch)->Unit(benchmark::kMillisecond);

void BM_TransitionMetric(benchmark::State& state) {
    const Fixture& f = fixture();
    const ObservationWindow w = simulate_trial(f.cfg, f.pdp, 0);
    for (auto _ : state) benchmark::DoNotOptimize(transition_metric(w, f.cfg, f.cfg.to_range).d_hat);
}
BENCHMARK(BM_TransitionMetric)->Unit(benchmark::kMicrosecond);

void BM_BuildAnalyticTable(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(build_pdf_table(f.cfg, f.pdp, f.noise_var, PdfMode::Analytic));
}
BENCHMARK(BM_BuildAnalyticTable)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

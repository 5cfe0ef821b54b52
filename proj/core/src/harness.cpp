#include "zpsync/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "zpsync/errors.hpp"

namespace zpsync {

namespace {

using Clock = std::chrono::steady_clock;

bool uses_analytic(Method m) { return m == Method::MlExhaustive || m == Method::MlGolden; }
bool uses_mcs(Method m) { return m == Method::McsExhaustive || m == Method::McsGolden; }

struct Tables {
    std::optional<PdfTable> analytic;
    std::optional<PdfTable> mcs;
    std::optional<PdfTable> gaussian;
};

Tables build_tables(const SystemConfig& cfg, const PowerDelayProfile& pdp, double noise_var,
                    const std::vector<Method>& methods, Rng& mcs_rng) {
    Tables t;
    const bool any_analytic = std::any_of(methods.begin(), methods.end(), uses_analytic);
    const bool any_mcs = std::any_of(methods.begin(), methods.end(), uses_mcs);
    const bool any_gauss =
        std::find(methods.begin(), methods.end(), Method::GaussianMl) != methods.end();
    if (any_analytic) t.analytic = build_pdf_table(cfg, pdp, noise_var, PdfMode::Analytic);
    if (any_mcs) t.mcs = build_mcs_table(cfg, pdp, noise_var, cfg.mcs_samples, mcs_rng);
    if (any_gauss) t.gaussian = build_pdf_table(cfg, pdp, noise_var, PdfMode::GaussianApprox);
    return t;
}

struct TrialOutcome {
    int true_d = 0;
    std::vector<int> d_hat;
    std::vector<double> elapsed;
    std::vector<int> evaluations;
    std::int64_t redraws = 0;
    std::string error;
};

EstimateResult run_method(Method method, const ObservationWindow& w, const SystemConfig& cfg,
                          const Tables& tables, std::int64_t trial) {
    switch (method) {
    case Method::MlExhaustive: return ml_exhaustive(w, *tables.analytic, cfg.to_range);
    case Method::McsExhaustive: return ml_exhaustive(w, *tables.mcs, cfg.to_range);
    case Method::MlGolden:
    case Method::McsGolden: {
        Rng rng = make_stream(cfg.trial_seed, static_cast<std::uint64_t>(trial), Stream::Golden);
        const PdfTable& table = method == Method::MlGolden ? *tables.analytic : *tables.mcs;
        return ml_golden(w, table, cfg.to_range, rng);
    }
    case Method::TransitionMetric: return transition_metric(w, cfg, cfg.to_range);
    case Method::GaussianMl: return ml_exhaustive(w, *tables.gaussian, cfg.to_range);
    }
    throw ArgumentError("unknown method");
}

template <typename Fn>
void parallel_for(std::int64_t count, int workers, Fn&& fn) {
    if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<std::int64_t>(workers, std::max<std::int64_t>(count, 1)));
    std::atomic<std::int64_t> next{0};
    auto body = [&] {
        for (std::int64_t i = next++; i < count; i = next++) fn(i);
    };
    if (workers == 1) {
        body();
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int k = 0; k < workers; ++k) pool.emplace_back(body);
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void run_point(const SweepSpec& spec, double value, std::vector<PointSummary>& rows) {
    const std::size_t first_row = rows.size();
    for (Method m : spec.methods) {
        PointSummary row;
        row.axis_value = value;
        row.method = m;
        rows.push_back(row);
    }
    auto fail_all = [&](const std::string& why) {
        for (std::size_t r = first_row; r < rows.size(); ++r) {
            PointSummary failed;
            failed.axis_value = value;
            failed.method = rows[r].method;
            failed.failure = why;
            rows[r] = failed;
        }
    };

    const bool alpha_axis = spec.axis == SweepAxis::PdpAlpha;
    const double alpha = alpha_axis ? value : 0.0;
    SystemConfig cfg;
    PowerDelayProfile pdp;
    double noise_var = 0.0;
    Tables shared;
    try {
        cfg = point_config(spec.base, spec.axis, value);
        pdp = make_pdp(cfg);
        noise_var = noise_variance_from_ebn0(cfg, pdp);
        Rng mcs_rng = make_stream(cfg.trial_seed, {static_cast<std::uint64_t>(Stream::Mcs)});
        if (alpha == 0.0) shared = build_tables(cfg, pdp, noise_var, spec.methods, mcs_rng);
    } catch (const Error& e) {
        fail_all(e.what());
        return;
    }

    const std::int64_t trials = spec.trials_per_point;
    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
    parallel_for(trials, spec.workers, [&](std::int64_t t) {
        TrialOutcome& out = outcomes[static_cast<std::size_t>(t)];
        try {
            out.true_d = draw_true_offset(cfg, t);
            const ObservationWindow w = simulate_trial(cfg, pdp, t);
            Tables own;
            const Tables* tables = &shared;
            if (alpha != 0.0) {
                Rng err_rng = make_stream(cfg.trial_seed, static_cast<std::uint64_t>(t), Stream::PdpError);
                const PowerDelayProfile estimate = perturbed_pdp(pdp, alpha, err_rng, &out.redraws);
                Rng mcs_rng = make_stream(cfg.trial_seed, static_cast<std::uint64_t>(t), Stream::Mcs);
                own = build_tables(cfg, estimate, noise_var, spec.methods, mcs_rng);
                tables = &own;
            }
            for (Method m : spec.methods) {
                const EstimateResult r = run_method(m, w, cfg, *tables, t);
                out.d_hat.push_back(r.d_hat);
                out.elapsed.push_back(r.elapsed_s);
                out.evaluations.push_back(r.evaluations);
            }
        } catch (const Error& e) {
            out.error = e.what();
        }
    });

    for (const TrialOutcome& o : outcomes) {
        if (!o.error.empty()) {
            fail_all(o.error);
            return;
        }
    }
    for (std::size_t k = 0; k < spec.methods.size(); ++k) {
        PointSummary& row = rows[first_row + k];
        std::map<int, std::int64_t> counts;
        double elapsed = 0.0;
        double evals = 0.0;
        for (const TrialOutcome& o : outcomes) {
            ++counts[o.d_hat[k] - o.true_d];
            elapsed += o.elapsed[k];
            evals += o.evaluations[k];
            row.pdp_redraws += o.redraws;
        }
        row.trials = static_cast<int>(trials);
        for (const auto& [e, c] : counts) {
            row.pmf[e] = static_cast<double>(c) / static_cast<double>(trials);
        }
        row.lock_in = row.pmf.count(0) ? row.pmf.at(0) : 0.0;
        row.mse = 0.0;
        for (const auto& [e, p] : row.pmf) row.mse += static_cast<double>(e) * e * p;
        row.mean_elapsed_s = elapsed / static_cast<double>(trials);
        row.mean_evaluations = evals / static_cast<double>(trials);
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::EbN0: return "ebn0";
    case SweepAxis::Doppler: return "doppler";
    case SweepAxis::NumSymbols: return "num_symbols";
    case SweepAxis::NumTaps: return "num_taps";
    case SweepAxis::PdpAlpha: return "pdp_alpha";
    }
    return "unknown";
}

SweepAxis parse_axis(std::string_view text) {
    for (SweepAxis a : {SweepAxis::EbN0, SweepAxis::Doppler, SweepAxis::NumSymbols,
                        SweepAxis::NumTaps, SweepAxis::PdpAlpha}) {
        if (to_string(a) == text) return a;
    }
    throw ConfigError("unknown sweep axis '" + std::string(text) +
                      "' (ebn0, doppler, num_symbols, num_taps, pdp_alpha)");
}

void SweepSpec::validate() const {
    if (points.empty()) throw ConfigError("sweep: no points");
    if (trials_per_point < 1) throw ConfigError("sweep: trials per point must be >= 1");
    if (methods.empty()) throw ConfigError("sweep: no methods");
    auto integral = [](double v) { return std::floor(v) == v; };
    for (double p : points) {
        if (!std::isfinite(p) && axis != SweepAxis::EbN0) throw ConfigError("sweep: non-finite point");
        if ((axis == SweepAxis::NumSymbols || axis == SweepAxis::NumTaps) && !integral(p)) {
            throw ConfigError("sweep: integer axis with a fractional point");
        }
        if (axis == SweepAxis::PdpAlpha && !(p >= 0.0 && p <= 1.0)) {
            throw ConfigError("sweep: pdp_alpha points must lie in [0, 1]");
        }
    }
    base.validate();
}

const PointSummary& ExperimentSummary::at(double axis_value, Method method) const {
    for (const auto& r : rows) {
        if (r.axis_value == axis_value && r.method == method) return r;
    }
    throw ArgumentError("no summary row for the requested point and method");
}

SystemConfig point_config(const SystemConfig& base, SweepAxis axis, double value) {
    SystemConfig cfg = base;
    switch (axis) {
    case SweepAxis::EbN0: cfg.ebn0_db = value; break;
    case SweepAxis::Doppler: cfg.max_doppler_hz = value; break;
    case SweepAxis::NumSymbols: cfg.num_symbols = static_cast<int>(value); break;
    case SweepAxis::NumTaps: cfg.n_h = static_cast<int>(value); break;
    case SweepAxis::PdpAlpha: break;
    }
    cfg.validate();
    return cfg;
}

int draw_true_offset(const SystemConfig& cfg, std::int64_t trial) {
    Rng rng = make_stream(cfg.trial_seed, static_cast<std::uint64_t>(trial), Stream::TrueOffset);
    std::uniform_int_distribution<int> pick(cfg.to_range.min, cfg.to_range.max);
    return pick(rng);
}

ObservationWindow simulate_trial(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                 std::int64_t trial) {
    Rng rng = make_stream(cfg.trial_seed, static_cast<std::uint64_t>(trial), Stream::Source);
    return simulate_reception(cfg, pdp, draw_true_offset(cfg, trial), rng);
}

PowerDelayProfile perturbed_pdp(const PowerDelayProfile& truth, double alpha, Rng& rng,
                                std::int64_t* redraws) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ArgumentError("pdp error alpha must lie in [0, 1]");
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<double> v = truth.variances();
        for (double& s : v) s *= 1.0 + alpha * u(rng);
        bool ok = std::all_of(v.begin(), v.end(), [](double s) { return s > 0.0; });
        for (std::size_t j = 0; ok && j < v.size(); ++j) {
            for (std::size_t k = 0; ok && k < j; ++k) {
                ok = std::abs(v[j] - v[k]) > 1e-8 * std::max(v[j], v[k]);
            }
        }
        if (ok) return PowerDelayProfile(std::move(v));
        if (redraws) ++*redraws;
    }
    throw NumericalFailure("could not draw a valid perturbed power delay profile");
}

ExperimentSummary run_sweep(const SweepSpec& spec) {
    spec.validate();
    ExperimentSummary summary;
    summary.axis = spec.axis;
    summary.timed = spec.record_timing;
    for (double value : spec.points) run_point(spec, value, summary.rows);
    return summary;
}

ExperimentSummary pdp_sensitivity(const SweepSpec& spec) {
    if (spec.axis != SweepAxis::PdpAlpha) throw ConfigError("pdp_sensitivity needs the pdp_alpha axis");
    return run_sweep(spec);
}

std::string pmf_json(const std::map<int, double>& pmf) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [e, p] : pmf) j[std::to_string(e)] = p;
    return j.dump();
}

void write_csv(std::ostream& out, const ExperimentSummary& summary) {
    auto quoted = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    };
    out << "axis_value,method,trials,lock_in,mse,pmf_json,mean_elapsed_s\n";
    for (const auto& r : summary.rows) {
        out << format_real(r.axis_value) << ',' << to_string(r.method) << ',';
        if (r.failed()) {
            nlohmann::json err = {{"error", r.failure}};
            out << "0,,," << quoted(err.dump()) << ",\n";
            continue;
        }
        out << r.trials << ',' << format_real(r.lock_in) << ',' << format_real(r.mse) << ','
            << quoted(pmf_json(r.pmf)) << ',';
        if (summary.timed) out << format_real(r.mean_elapsed_s);
        out << '\n';
    }
}

std::vector<RaetPoint> bench_raet(const SystemConfig& base, const RaetOptions& options) {
    if (options.trials < 1 || options.repetitions < 1) throw ArgumentError("bench: bad trial counts");
    std::vector<RaetPoint> out;
    for (int n_x : options.n_x_values) {
        SystemConfig cfg = base;
        cfg.n_x = n_x;
        cfg.mcs_samples = options.mcs_draws;
        cfg.validate();
        const PowerDelayProfile pdp = make_pdp(cfg);
        const double noise_var = noise_variance_from_ebn0(cfg, pdp);
        const PdfTable analytic = build_pdf_table(cfg, pdp, noise_var, PdfMode::Analytic);
        Rng mcs_rng = make_stream(cfg.trial_seed, {static_cast<std::uint64_t>(Stream::Mcs)});
        const PdfTable mcs = build_mcs_table(cfg, pdp, noise_var, options.mcs_draws, mcs_rng);

        std::vector<ObservationWindow> windows;
        for (int t = 0; t < options.trials; ++t) windows.push_back(simulate_trial(cfg, pdp, t));

        std::vector<double> theo_times, mcs_times;
        int agree = 0;
        for (int rep = 0; rep < options.repetitions; ++rep) {
            std::vector<int> theo_hat, mcs_hat;
            auto start = Clock::now();
            for (const auto& w : windows) theo_hat.push_back(ml_exhaustive(w, analytic, cfg.to_range).d_hat);
            theo_times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
            start = Clock::now();
            for (const auto& w : windows) mcs_hat.push_back(ml_exhaustive(w, mcs, cfg.to_range).d_hat);
            mcs_times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
            if (rep == 0) {
                for (std::size_t k = 0; k < windows.size(); ++k) agree += theo_hat[k] == mcs_hat[k];
            }
        }
        RaetPoint p;
        p.n_x = n_x;
        p.trials = options.trials;
        p.theoretical_s = median(theo_times) / options.trials;
        p.mcs_s = median(mcs_times) / options.trials;
        p.ratio = p.mcs_s / p.theoretical_s;
        p.agreement = static_cast<double>(agree) / options.trials;
        out.push_back(p);
    }
    return out;
}

} // namespace zpsync

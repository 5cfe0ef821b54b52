#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zpsync/errors.hpp"
#include "zpsync/harness.hpp"
#include "zpsync/window_io.hpp"

using namespace zpsync;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::int64_t seed = -1;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--set", c.overrides, "override one key, e.g. --set ebn0_db=5")->take_all();
    cmd->add_option("--seed", c.seed, "trial seed (overrides the config)");
    cmd->add_option("--out", c.out, "output file (default stdout)");
}

SystemConfig load(const Common& c) {
    SystemConfig cfg = c.config_path.empty() ? SystemConfig{} : load_config(c.config_path);
    for (const std::string& kv : c.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + kv + "'");
        apply_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (c.seed >= 0) cfg.trial_seed = static_cast<std::uint64_t>(c.seed);
    cfg.validate();
    return cfg;
}

// stdout unless a path was given
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw ArgumentError("cannot open " + path + " for writing");
    }
    std::ostream& get() { return file_ ? *file_ : std::cout; }
    void close(const std::string& path) {
        get().flush();
        if (!get()) throw ArgumentError("failed writing " + (path.empty() ? "stdout" : path));
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<Method> methods_from(const std::vector<std::string>& names) {
    std::vector<Method> out;
    for (const auto& n : names) out.push_back(parse_method(n));
    return out;
}

PdfMode mode_from(const std::string& name) {
    if (name == "analytic") return PdfMode::Analytic;
    if (name == "mcs") return PdfMode::Mcs;
    if (name == "gaussian") return PdfMode::GaussianApprox;
    throw ArgumentError("unknown pdf mode '" + name + "' (analytic, mcs, gaussian)");
}

PdfTable table_for(PdfMode mode, const SystemConfig& cfg, const PowerDelayProfile& pdp, double noise_var) {
    if (mode == PdfMode::Mcs) {
        Rng rng = make_stream(cfg.trial_seed, {static_cast<std::uint64_t>(Stream::Mcs)});
        return build_mcs_table(cfg, pdp, noise_var, cfg.mcs_samples, rng);
    }
    return build_pdf_table(cfg, pdp, noise_var, mode);
}

struct SimulateArgs {
    Common common;
    std::int64_t trial = 0;
    std::string window_path;
    std::string mode = "analytic";
};

void run_simulate(const SimulateArgs& a) {
    const SystemConfig cfg = load(a.common);
    const PowerDelayProfile pdp = make_pdp(cfg);
    const double noise_var = noise_variance_from_ebn0(cfg, pdp);
    const ObservationWindow w = simulate_trial(cfg, pdp, a.trial);
    if (!a.window_path.empty()) write_window(a.window_path, w);
    const PdfTable table = table_for(mode_from(a.mode), cfg, pdp, noise_var);
    const HypothesisScores s = score_all(w, table, cfg.to_range);
    Output out(a.common.out);
    out.get() << "d,log_likelihood\n";
    for (std::size_t k = 0; k < s.d_values.size(); ++k) {
        out.get() << s.d_values[k] << ',' << real(s.log_like[k]) << '\n';
    }
    out.close(a.common.out);
    std::cerr << "trial " << a.trial << ": true_d " << w.true_d << ", d_hat " << s.argmax_d << '\n';
}

struct SweepArgs {
    Common common;
    std::string axis = "ebn0";
    std::vector<double> points;
    int trials = kDeskTrials;
    bool full_scale = false;
    std::vector<std::string> methods{"ml_exhaustive"};
    int workers = 0;
    bool timing = false;
};

SweepSpec sweep_spec(const SweepArgs& a) {
    SweepSpec spec;
    spec.axis = parse_axis(a.axis);
    spec.points = a.points;
    spec.trials_per_point = a.full_scale ? kFullScaleTrials : a.trials;
    spec.methods = methods_from(a.methods);
    spec.base = load(a.common);
    spec.workers = a.workers;
    spec.record_timing = a.timing;
    return spec;
}

void run_sweep_cmd(const SweepArgs& a) {
    const SweepSpec spec = sweep_spec(a);
    const ExperimentSummary summary = run_sweep(spec);
    Output out(a.common.out);
    write_csv(out.get(), summary);
    out.close(a.common.out);
    for (const auto& r : summary.rows) {
        if (r.failed()) std::cerr << "point " << r.axis_value << " failed: " << r.failure << '\n';
    }
}

void run_pmf(const SweepArgs& a) {
    SweepArgs point = a;
    point.axis = "ebn0";
    const SystemConfig base = load(a.common);
    point.points = {base.ebn0_db};
    const ExperimentSummary summary = run_sweep(sweep_spec(point));
    Output out(a.common.out);
    out.get() << "method,error,probability\n";
    for (const auto& r : summary.rows) {
        if (r.failed()) throw NumericalFailure(r.failure);
        for (const auto& [e, p] : r.pmf) out.get() << to_string(r.method) << ',' << e << ',' << real(p) << '\n';
    }
    out.close(a.common.out);
}

struct ValidateArgs {
    Common common;
    int m = 1;
    int grid = 201;
    double span = 5.0;
};

void run_validate_pdf(const ValidateArgs& a) {
    if (a.grid < 2) throw ArgumentError("--grid needs at least 2 points");
    if (!(a.span > 0.0)) throw ArgumentError("--span must be positive");
    const SystemConfig cfg = load(a.common);
    if (a.m < 0 || a.m >= cfg.n_s()) throw ArgumentError("--m must lie in [0, n_s - 1]");
    const PowerDelayProfile pdp = make_pdp(cfg);
    const double noise_var = noise_variance_from_ebn0(cfg, pdp);
    const PdfTable analytic = table_for(PdfMode::Analytic, cfg, pdp, noise_var);
    const PdfTable gauss = table_for(PdfMode::GaussianApprox, cfg, pdp, noise_var);
    const PdfTable mcs = table_for(PdfMode::Mcs, cfg, pdp, noise_var);
    const int c = analytic.class_of(a.m);
    const double sd = std::sqrt(gauss.gaussian_variance(gauss.class_of(a.m)));
    Output out(a.common.out);
    out.get() << "y,analytic_pdf,gaussian_pdf,mcs_pdf\n";
    for (int k = 0; k < a.grid; ++k) {
        const double y = -a.span * sd + 2.0 * a.span * sd * k / (a.grid - 1);
        out.get() << real(y) << ',' << real(std::exp(analytic.log_pdf_component(c, y, false))) << ','
                  << real(std::exp(gauss.log_pdf_component(c, y, false))) << ','
                  << real(std::exp(mcs.log_pdf_component(c, y, false))) << '\n';
    }
    out.close(a.common.out);
}

struct BenchArgs {
    Common common;
    std::vector<int> n_x{64, 128, 256};
    int trials = 40;
    int repetitions = 5;
    int draws = 10000;
};

void run_bench(const BenchArgs& a) {
    const SystemConfig cfg = load(a.common);
    RaetOptions o;
    o.n_x_values = a.n_x;
    o.trials = a.trials;
    o.repetitions = a.repetitions;
    o.mcs_draws = a.draws;
    const auto points = bench_raet(cfg, o);
    Output out(a.common.out);
    out.get() << "n_x,theoretical_s,mcs_s,raet,agreement\n";
    for (const auto& p : points) {
        out.get() << p.n_x << ',' << real(p.theoretical_s) << ',' << real(p.mcs_s) << ',' << real(p.ratio)
                  << ',' << real(p.agreement) << '\n';
    }
    out.close(a.common.out);
}

void add_sweep_options(CLI::App* cmd, SweepArgs& a) {
    add_common(cmd, a.common);
    cmd->add_option("--trials", a.trials, "trials per point")->check(CLI::PositiveNumber);
    cmd->add_flag("--paper-scale", a.full_scale, "use 10000 trials per point");
    cmd->add_option("--methods", a.methods, "comma separated method names")->delimiter(',');
    cmd->add_option("--workers", a.workers, "worker threads (0 = all cores)");
    cmd->add_flag("--timing", a.timing, "fill mean_elapsed_s");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ZP-OFDM non-data-aided ML time synchronization simulator"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "one trial: likelihood trace as d,log_likelihood");
    add_common(simulate, sim.common);
    simulate->add_option("--trial", sim.trial, "trial index")->check(CLI::NonNegativeNumber);
    simulate->add_option("--window", sim.window_path, "dump the received window (binary)");
    simulate->add_option("--mode", sim.mode, "analytic, mcs or gaussian");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "lock-in / MSE / PMF sweep to CSV");
    add_sweep_options(sweep, sw);
    sweep->add_option("--axis", sw.axis, "ebn0, doppler, num_symbols, num_taps, pdp_alpha");
    sweep->add_option("--points", sw.points, "comma separated axis values")->delimiter(',')->required();

    SweepArgs pm;
    auto* pmf = app.add_subcommand("pmf", "error PMF at the configured point as method,error,probability");
    add_sweep_options(pmf, pm);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate-pdf", "tabulate densities of index m on a grid");
    add_common(validate, va.common);
    validate->add_option("--m", va.m, "sample index within the symbol period");
    validate->add_option("--grid", va.grid, "number of grid points");
    validate->add_option("--span", va.span, "grid half width in standard deviations");

    BenchArgs be;
    auto* bench = app.add_subcommand("bench", "MCS vs analytic exhaustive-search time ratio");
    add_common(bench, be.common);
    bench->add_option("--nx", be.n_x, "subcarrier counts")->delimiter(',');
    bench->add_option("--trials", be.trials, "windows per point");
    bench->add_option("--reps", be.repetitions, "timing repetitions (median taken)");
    bench->add_option("--draws", be.draws, "Monte Carlo draws L");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) run_simulate(sim);
        else if (*sweep) run_sweep_cmd(sw);
        else if (*pmf) run_pmf(pm);
        else if (*validate) run_validate_pdf(va);
        else if (*bench) run_bench(be);
    } catch (const std::exception& e) {
        std::cerr << "zpsync: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

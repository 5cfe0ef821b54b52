#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "zpsync/estimators.hpp"

namespace zpsync {

enum class SweepAxis { EbN0, Doppler, NumSymbols, NumTaps, PdpAlpha };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_axis(std::string_view text);

inline constexpr int kDeskTrials = 2000;
inline constexpr int kFullScaleTrials = 10000;

struct SweepSpec {
    SweepAxis axis = SweepAxis::EbN0;
    std::vector<double> points;
    int trials_per_point = kDeskTrials;
    std::vector<Method> methods{Method::MlExhaustive};
    SystemConfig base{};
    /// 0 picks std::thread::hardware_concurrency().
    int workers = 0;
    /// Fill mean_elapsed_s. Off by default so repeated runs give identical CSVs.
    bool record_timing = false;

    void validate() const;
};

struct PointSummary {
    double axis_value = 0.0;
    Method method = Method::MlExhaustive;
    int trials = 0;
    double lock_in = 0.0;
    double mse = 0.0;
    std::map<int, double> pmf;  // estimation error -> frequency
    double mean_elapsed_s = 0.0;
    double mean_evaluations = 0.0;
    std::int64_t pdp_redraws = 0;
    std::string failure;  // nonempty for an aborted point

    bool failed() const { return !failure.empty(); }
};

struct ExperimentSummary {
    SweepAxis axis = SweepAxis::EbN0;
    bool timed = false;
    std::vector<PointSummary> rows;  // point-major, methods in spec order

    const PointSummary& at(double axis_value, Method method) const;
};

/// Configuration of one sweep point (the axis value applied to base).
/// PdpAlpha leaves the configuration unchanged.
SystemConfig point_config(const SystemConfig& base, SweepAxis axis, double value);

/// Per-trial inputs with common random numbers across sweep points: trial t
/// always draws its offset, data, channel and noise from streams keyed by
/// (trial_seed, t).
int draw_true_offset(const SystemConfig& cfg, std::int64_t trial);
ObservationWindow simulate_trial(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                 std::int64_t trial);

/// Receiver-side PDP estimate: each tap variance uniform in
/// [(1 - alpha) s, (1 + alpha) s], redrawn until positive with distinct rates.
/// `redraws` counts rejected draws.
PowerDelayProfile perturbed_pdp(const PowerDelayProfile& truth, double alpha, Rng& rng,
                                std::int64_t* redraws = nullptr);

ExperimentSummary run_sweep(const SweepSpec& spec);

/// run_sweep over PdpAlpha points in [0, 1].
ExperimentSummary pdp_sensitivity(const SweepSpec& spec);

/// axis_value,method,trials,lock_in,mse,pmf_json,mean_elapsed_s
void write_csv(std::ostream& out, const ExperimentSummary& summary);
std::string pmf_json(const std::map<int, double>& pmf);

struct RaetPoint {
    int n_x = 0;
    double theoretical_s = 0.0;  // median over repetitions of the mean per-window time
    double mcs_s = 0.0;
    double ratio = 0.0;
    double agreement = 0.0;  // fraction of windows with equal estimates
    int trials = 0;
};

struct RaetOptions {
    std::vector<int> n_x_values{64, 128, 256};
    int trials = 40;
    int repetitions = 5;
    int mcs_draws = 10000;
};

/// Wall-time ratio of exhaustive Monte Carlo over exhaustive analytic ML
/// per subcarrier count; tables are built before timing starts.
std::vector<RaetPoint> bench_raet(const SystemConfig& base, const RaetOptions& options = {});

} // namespace zpsync

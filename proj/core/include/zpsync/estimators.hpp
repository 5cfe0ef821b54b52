#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "zpsync/likelihood.hpp"

namespace zpsync {

enum class Method { MlExhaustive, MlGolden, McsExhaustive, McsGolden, TransitionMetric, GaussianMl };

std::string_view to_string(Method method);
Method parse_method(std::string_view text);
/// All methods in declaration order.
std::vector<Method> all_methods();

struct EstimateResult {
    int d_hat = 0;
    int evaluations = 0;   // distinct hypotheses scored
    double elapsed_s = 0.0;
    Method method = Method::MlExhaustive;
    /// (d, score) for every evaluated hypothesis, ascending d.
    std::vector<int> d_values;
    std::vector<double> scores;
};

/// Argmax of the log-likelihood over the whole range. The method tag follows
/// the table mode (Analytic, Mcs or GaussianApprox).
EstimateResult ml_exhaustive(const ObservationWindow& window, const PdfTable& table, ToRange range);

/// Golden-section search with random restarts of the interior point.
EstimateResult ml_golden(const ObservationWindow& window, const PdfTable& table, ToRange range,
                         Rng& rng);

struct GoldenOutcome {
    int d_hat = 0;
    int evaluations = 0;
};

/// The search itself over integer points [range.min, range.max]; score must
/// be deterministic. Each point is scored at most once.
GoldenOutcome golden_section_argmax(ToRange range, const std::function<double(int)>& score, Rng& rng);

/// Monte Carlo table (L draws per class and component).
PdfTable mcs_table(const SystemConfig& cfg, const PowerDelayProfile& pdp, double noise_var,
                   int draws, Rng& rng);

/// Power ratio between the data part and the ISI-free part of the guard
/// interval, summed over the window for each hypothesis.
/// Throws ConfigError when n_z < n_h (no ISI-free guard samples).
EstimateResult transition_metric(const ObservationWindow& window, const SystemConfig& cfg,
                                 ToRange range);
/// R(d) for every d in range.
std::vector<double> transition_metric_scores(const ObservationWindow& window,
                                             const SystemConfig& cfg, ToRange range);

/// ML with every signal index modeled as a zero-mean Gaussian of the same
/// variance as the exact density.
EstimateResult gaussian_ml(const ObservationWindow& window, const SystemConfig& cfg,
                           const PowerDelayProfile& pdp, double noise_var, ToRange range);

/// True when the scores rise to a single peak and fall after it (no plateaus).
bool is_unimodal(const std::vector<double>& scores);

} // namespace zpsync

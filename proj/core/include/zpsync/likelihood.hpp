#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "zpsync/analytic_pdf.hpp"
#include "zpsync/config.hpp"
#include "zpsync/mcs.hpp"
#include "zpsync/signal.hpp"

namespace zpsync {

enum class PdfMode { Analytic, Mcs, GaussianApprox };

std::string_view to_string(PdfMode mode);

/// Per-index log-density evaluators for one symbol period. Indices that share
/// a tap range share one evaluator ("class"); every noise-only index maps to
/// the noise class. A complex sample scores log f(y_I) + log f(y_Q).
class PdfTable {
public:
    PdfMode mode() const { return mode_; }
    int n_s() const { return static_cast<int>(class_of_.size()); }
    double noise_var() const { return noise_var_; }

    int num_classes() const { return static_cast<int>(ranges_.size()) + 1; }
    int noise_class() const { return static_cast<int>(ranges_.size()); }
    int class_of(int m) const { return class_of_[static_cast<std::size_t>(m)]; }
    /// Tap range of a signal class, nullopt for the noise class.
    std::optional<TapRange> class_range(int c) const;

    /// Class used by window sample i under hypothesis d.
    int class_for(std::int64_t i, int d) const {
        const std::int64_t p = i + d;
        if (p < 0) return noise_class();
        return class_of_[static_cast<std::size_t>(p % n_s())];
    }

    double log_pdf_component(int c, double y, bool quadrature) const;
    double log_pdf(int c, cplx y) const {
        return log_pdf_component(c, y.real(), false) + log_pdf_component(c, y.imag(), true);
    }
    double log_pdf_index(int m, cplx y) const { return log_pdf(class_of(m), y); }
    double log_pdf_noise(cplx y) const { return log_pdf(noise_class(), y); }

    /// Monte Carlo evaluators of a signal class (Mcs mode only).
    const KernelMixtureDensity& mcs_component(int c, bool quadrature) const;
    /// Per-component variance of the Gaussian evaluator of a class.
    double gaussian_variance(int c) const;

private:
    friend struct PdfTableAccess;

    static PdfTable skeleton(const SystemConfig& cfg, double noise_var, PdfMode mode);

    PdfMode mode_ = PdfMode::Analytic;
    double noise_var_ = 0.0;
    std::vector<int> class_of_;
    std::vector<TapRange> ranges_;
    std::vector<SignalDensity> analytic_;
    std::vector<KernelMixtureDensity> mcs_i_;
    std::vector<KernelMixtureDensity> mcs_q_;
    std::vector<double> gauss_var_;
    std::vector<double> gauss_log_norm_;
};

/// Analytic or GaussianApprox table. Mcs mode needs draws; use build_mcs_table.
PdfTable build_pdf_table(const SystemConfig& cfg, const PowerDelayProfile& pdp, double noise_var,
                         PdfMode mode, const PdfOptions& options = {});

/// Mcs table: L draws of the signal part per class and per component.
PdfTable build_mcs_table(const SystemConfig& cfg, const PowerDelayProfile& pdp, double noise_var,
                         int draws, Rng& rng, const PdfOptions& options = {});

/// Mcs table from explicit draws, one vector per signal class (in class order).
PdfTable mcs_table_from_draws(const SystemConfig& cfg, double noise_var,
                              std::vector<std::vector<double>> draws_i,
                              std::vector<std::vector<double>> draws_q);

/// Sum over window samples of the log density selected by the index rule:
/// sample i uses the noise evaluator when i + d < 0 and the evaluator of
/// index (i + d) mod n_s otherwise. Throws NumericalFailure on NaN.
double log_likelihood(const ObservationWindow& window, int d, const PdfTable& table);

struct HypothesisScores {
    std::vector<int> d_values;
    std::vector<double> log_like;
    int argmax_d = 0;
};

/// Memoizes per-sample log densities by class, so each (sample, class) pair
/// is evaluated once no matter how many hypotheses revisit it, and each
/// hypothesis is scored once.
class LikelihoodEvaluator {
public:
    LikelihoodEvaluator(const ObservationWindow& window, const PdfTable& table);

    double operator()(int d);
    bool evaluated(int d) const;
    /// Number of distinct hypotheses scored so far.
    int evaluations() const { return static_cast<int>(scores_.size()); }
    const std::vector<std::pair<int, double>>& history() const { return history_; }

private:
    double sample_term(std::size_t i, int c);

    const ObservationWindow& window_;
    const PdfTable& table_;
    std::vector<double> cache_;  // [c * size + i], NaN when not yet computed
    std::vector<std::pair<int, double>> scores_;  // sorted by d
    std::vector<std::pair<int, double>> history_;  // evaluation order
};

/// Scores every d in range; argmax ties go to the smallest d.
HypothesisScores score_all(const ObservationWindow& window, const PdfTable& table, ToRange range);
HypothesisScores score_all(LikelihoodEvaluator& evaluator, ToRange range);

void check_window(const ObservationWindow& window, const PdfTable& table);

} // namespace zpsync

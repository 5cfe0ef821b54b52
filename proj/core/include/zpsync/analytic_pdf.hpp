#pragma once

#include <optional>
#include <vector>

#include "zpsync/config.hpp"
#include "zpsync/rng.hpp"

namespace zpsync {

/// Inclusive range [first, last] of channel taps whose convolution with the
/// data samples reaches in-symbol index m.
struct TapRange {
    int first = 0;
    int last = 0;

    int size() const { return last - first + 1; }
    bool operator==(const TapRange&) const = default;
};

/// Tap range for in-symbol index m under a zero timing offset, or nullopt
/// when sample m carries noise only (m >= n_x + n_h - 1).
/// Throws ArgumentError for m outside [0, n_s - 1].
std::optional<TapRange> tap_range(int m, const SystemConfig& cfg);

/// log of the N(0, sigma_w^2 / 2) density of one real noise component.
double log_pdf_noise(double y, double noise_var);

struct PdfOptions {
    /// Nudge coinciding rates apart by a relative 1e-6 instead of throwing
    /// DegeneratePdpError. Prints one warning line to stderr.
    bool perturb_duplicate_rates = false;
};

/// Partial-fraction weights of the signal part V = sum_k (E_k - E'_k),
/// E_k, E'_k ~ Exp(rate_k), over one tap range.
///
/// pair_weights(j, n) = (prod_i rate_i)^2
///     / [prod_{k != j}(rate_k - rate_j) * prod_{p != n}(rate_p - rate_n) * (rate_j + rate_n)]
///
/// and f_V(v) = sum_j rate_weights[j] * exp(-rate_j |v|) with
/// rate_weights[j] = sum_n pair_weights(j, n).
struct PdfCoefficients {
    TapRange range;
    std::vector<double> rates;
    std::vector<double> pair_weights;  // row-major, rates.size()^2
    std::vector<double> rate_weights;

    double pair_weight(int j, int n) const {
        return pair_weights[static_cast<std::size_t>(j) * rates.size() +
                            static_cast<std::size_t>(n)];
    }
};

PdfCoefficients make_coefficients(TapRange range, const PowerDelayProfile& pdp, double sigma_x2,
                                  const PdfOptions& options = {});

/// Density of one real component (I or Q) of a received sample whose signal
/// part spans `range`: Gaussian noise of variance sigma_w^2/2 convolved with
/// the Laplace-mixture density of V. Evaluated through the scaled
/// complementary error function so nothing overflows for small noise.
class SignalDensity {
public:
    SignalDensity(TapRange range, const PowerDelayProfile& pdp, double sigma_x2, double noise_var,
                  const PdfOptions& options = {});

    double log_pdf(double y) const;
    double pdf(double y) const;

    /// Density of the signal part alone.
    double log_pdf_v(double v) const;
    double pdf_v(double v) const;

    /// One draw of V.
    double sample_v(Rng& rng) const;

    /// Variance of one real component: sigma_w^2/2 + sum 2/rate^2.
    double variance() const;
    double noise_var() const { return noise_var_; }
    const PdfCoefficients& coefficients() const { return coef_; }

private:
    double log_pdf_log_domain(double y) const;

    PdfCoefficients coef_;
    double noise_var_;
    double sigma_w_;
    double inv_sigma_w_;
    std::vector<double> half_rate_sigma_;  // rate_j * sigma_w / 2
    std::vector<double> exp_half_sq_;      // exp((rate_j sigma_w / 2)^2) or 0 when it overflows
};

/// Convenience wrappers keyed by in-symbol index m. Throw ArgumentError when
/// m is a noise-only index.
double log_pdf_signal(double y, int m, const SystemConfig& cfg, const PowerDelayProfile& pdp,
                      double noise_var);
double log_pdf_v(double v, int m, const SystemConfig& cfg, const PowerDelayProfile& pdp);
double sample_v(int m, const SystemConfig& cfg, const PowerDelayProfile& pdp, Rng& rng);

} // namespace zpsync

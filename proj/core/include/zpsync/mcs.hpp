#pragma once

#include <span>
#include <vector>

#include "zpsync/analytic_pdf.hpp"
#include "zpsync/rng.hpp"

namespace zpsync {

/// Monte Carlo approximation of one real received-sample component:
///   f(y) = (1/L) sum_l (pi sigma_w^2)^(-1/2) exp(-(y - v_l)^2 / sigma_w^2)
/// for L stored draws v_l of the signal part.
///
/// In units of the noise standard deviation the kernel sum is
/// F(x) = sum_l exp(-(x - z_l)^2). The real line around the draws is cut into
/// unit cells; for each cell center c the constructor stores
///   log F(c + t) = A + a t - t^2 + log sum_k m_k t^k,   |t| <= 1/2,
/// with A = log F(c) and a = F'(c)/F(c). The tilt by a makes the polynomial
/// at least 1 on the cell (Jensen), so its truncation and rounding errors are
/// relative errors near 1e-15. An evaluation is one Horner pass and one log.
/// Targets beyond the covered range are summed directly over the draws in
/// reach.
class KernelMixtureDensity {
public:
    static constexpr int kTerms = 24;
    /// Cells extend this far (in noise standard deviations) past the draws.
    static constexpr double kReach = 64.0;

    KernelMixtureDensity(std::vector<double> draws, double noise_var);

    /// L draws of V for the given tap range.
    static KernelMixtureDensity sampled(const SignalDensity& signal, int count, Rng& rng);

    double log_pdf(double y) const;
    /// Plain log-sum-exp over all draws; reference for the expansion.
    double log_pdf_direct(double y) const;

    int size() const { return static_cast<int>(draws_.size()); }
    double noise_var() const { return noise_var_; }
    /// Draws in ascending order, in noise standard deviations.
    std::span<const double> scaled_draws() const { return draws_; }
    bool expansion_enabled() const { return !log_value_.empty(); }

private:
    /// log F(x) summed over the draws within reach (exp(-60) cutoff).
    double log_sum_window(double x) const;
    /// Expansion of log F in cell j at offset t; NaN for cells that fall back.
    double cell_log_sum(std::size_t j, double t) const;

    std::vector<double> draws_;  // sorted, scaled by 1/sigma_w
    double noise_var_;
    double inv_sigma_;
    double log_norm_;  // -log L - 0.5 log(pi sigma_w^2)

    double origin_ = 0.0;         // left edge of cell 0
    std::vector<double> log_value_;   // A per cell
    std::vector<double> log_slope_;   // a per cell
    std::vector<double> coeffs_;      // kTerms per cell
};

} // namespace zpsync

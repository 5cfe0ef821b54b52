#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "zpsync/config.hpp"
#include "zpsync/rng.hpp"

namespace zpsync {

using cplx = std::complex<double>;

/// Unit average energy M-QAM alphabet: BPSK for M = 2, square grids for even
/// log2 M, cross constellations (square grid with the corners removed) for
/// odd log2 M >= 5. Throws ConfigError for M = 8 or non powers of two.
std::vector<cplx> qam_constellation(int modulation_order);

/// Unitary inverse DFT (scale 1/sqrt(n)).
std::vector<cplx> ofdm_modulate(std::span<const cplx> subcarrier_symbols);

/// `count` data blocks of n_x time samples each, variance sigma_x2 per sample.
std::vector<std::vector<cplx>> generate_symbols(const SystemConfig& cfg, int count, Rng& rng);

/// Appends n_z zeros to the block.
std::vector<cplx> zero_pad(std::span<const cplx> block, int n_z);

/// Channel taps sampled on [start, start + span) (stream sample indices).
struct ChannelRealization {
    std::int64_t start = 0;
    std::int64_t span = 0;
    int n_h = 0;
    double max_doppler_hz = 0.0;
    std::vector<cplx> taps;  // taps[(t - start) * n_h + l]

    cplx at(std::int64_t t, int l) const {
        return taps[static_cast<std::size_t>((t - start) * n_h + l)];
    }
};

/// Rayleigh fading taps, each a sum of sinusoids with random complex
/// Gaussian amplitudes and uniform arrival angles:
///   h_l(t) = sigma_l sum_k g_k exp(j 2 pi f_D cos(theta_k) t T_sa),  g_k ~ CN(0, 1/K).
/// Every h_l(t) is exactly CN(0, sigma_l^2); the autocorrelation is J0(2 pi f_D tau)
/// on average over realizations. f_D = 0 gives one static draw per tap.
class FadingChannel {
public:
    static constexpr int kSinusoids = 16;

    static FadingChannel draw(const SystemConfig& cfg, const PowerDelayProfile& pdp, Rng& rng);
    /// Draws only taps with used[l] set; the others stay identically zero.
    static FadingChannel draw(const SystemConfig& cfg, const PowerDelayProfile& pdp, Rng& rng,
                              const std::vector<bool>& used);
    /// Time-invariant channel with the given taps.
    static FadingChannel fixed(std::vector<cplx> taps);

    int n_h() const { return n_h_; }
    double max_doppler_hz() const { return f_d_; }
    cplx tap(std::int64_t t, int l) const;
    ChannelRealization realize(std::int64_t start, std::int64_t span) const;

private:
    int n_h_ = 0;
    int terms_ = 1;
    double f_d_ = 0.0;
    std::vector<cplx> gains_;   // [l * terms_ + k]
    std::vector<double> omega_;  // rad/sample, same layout
};

ChannelRealization generate_channel(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                    std::int64_t span, Rng& rng);

struct ObservationWindow {
    std::vector<cplx> samples;
    int true_d = 0;
    int num_symbols = 0;
    int n_s = 0;

    std::size_t size() const { return samples.size(); }
};

struct ReceptionOptions {
    /// Replaces the random channel draw (tests and noiseless checks).
    const FadingChannel* channel = nullptr;
    /// Overrides the noise variance derived from ebn0_db; 0 means noiseless.
    double noise_var = -1.0;
};

/// Simulates the received window for timing offset true_d. The packet starts
/// at stream index 0; the window covers stream indices
/// [true_d, true_d + N n_s), so for true_d < 0 its first |true_d| samples are
/// noise only. Data, channel and noise draw from separate streams forked
/// from rng. Throws ArgumentError when true_d is outside cfg.to_range.
ObservationWindow simulate_reception(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                     int true_d, Rng& rng, const ReceptionOptions& options = {});

/// Received samples at the given stream positions (all >= 0) for one packet,
/// generating only the data, taps and noise these positions touch. Used for
/// ensemble statistics at a fixed index where full windows would be wasteful.
std::vector<cplx> simulate_samples(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                   std::span<const std::int64_t> positions, double noise_var,
                                   Rng& rng);

} // namespace zpsync

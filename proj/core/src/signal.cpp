#include "zpsync/signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <unordered_map>

#include "zpsync/errors.hpp"

namespace zpsync {

namespace {

cplx complex_normal(Rng& rng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5 * variance));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

// FFTW planning is not thread safe; execution with the new-array interface is.
class PlanCache {
public:
    ~PlanCache() {
        for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
    }

    fftw_plan backward(int n) {
        std::lock_guard lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
        fftw_plan plan = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        fftw_free(buf);
        plans_.emplace(n, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<int, fftw_plan> plans_;
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

struct FftwDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

std::vector<cplx> data_block(const SystemConfig& cfg, const std::vector<cplx>& alphabet,
                             Rng& rng) {
    const auto n_x = static_cast<std::size_t>(cfg.n_x);
    std::vector<cplx> out(n_x);
    if (cfg.source_model == SourceModel::GaussianIid) {
        for (auto& x : out) x = complex_normal(rng, cfg.sigma_x2);
        return out;
    }
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    const double scale = std::sqrt(cfg.sigma_x2);
    for (auto& x : out) x = scale * alphabet[pick(rng)];
    return ofdm_modulate(out);
}

std::vector<cplx> alphabet_for(const SystemConfig& cfg) {
    if (cfg.source_model == SourceModel::QamIfft) return qam_constellation(cfg.modulation_order);
    return {};
}

double resolve_noise_var(const SystemConfig& cfg, const PowerDelayProfile& pdp, double override) {
    if (override >= 0.0) return override;
    return noise_variance_from_ebn0(cfg, pdp);
}

} // namespace

std::vector<cplx> qam_constellation(int modulation_order) {
    const int M = modulation_order;
    if (M < 2 || !std::has_single_bit(static_cast<unsigned>(M))) {
        throw ConfigError("modulation order must be a power of two >= 2, got " + std::to_string(M));
    }
    std::vector<cplx> points;
    const int bits = std::countr_zero(static_cast<unsigned>(M));
    if (M == 2) {
        points = {{-1.0, 0.0}, {1.0, 0.0}};
    } else if (bits % 2 == 0) {
        const int side = 1 << (bits / 2);
        for (int i = 0; i < side; ++i) {
            for (int q = 0; q < side; ++q) points.emplace_back(2 * i - side + 1, 2 * q - side + 1);
        }
    } else if (bits >= 5) {
        const int side = 3 << ((bits - 3) / 2);
        const int corner = side / 6;
        const int limit = 2 * (side / 2 - corner) - 1;
        for (int i = 0; i < side; ++i) {
            for (int q = 0; q < side; ++q) {
                const int re = 2 * i - side + 1;
                const int im = 2 * q - side + 1;
                if (std::abs(re) > limit && std::abs(im) > limit) continue;
                points.emplace_back(re, im);
            }
        }
    } else {
        throw ConfigError("no square or cross QAM constellation with M = 8");
    }
    double energy = 0.0;
    for (const auto& p : points) energy += std::norm(p);
    const double scale = 1.0 / std::sqrt(energy / static_cast<double>(points.size()));
    for (auto& p : points) p *= scale;
    return points;
}

std::vector<cplx> ofdm_modulate(std::span<const cplx> subcarrier_symbols) {
    const int n = static_cast<int>(subcarrier_symbols.size());
    if (n == 0) return {};
    fftw_plan plan = plan_cache().backward(n);
    std::unique_ptr<fftw_complex, FftwDeleter> buf(fftw_alloc_complex(static_cast<std::size_t>(n)));
    for (int k = 0; k < n; ++k) {
        buf.get()[k][0] = subcarrier_symbols[k].real();
        buf.get()[k][1] = subcarrier_symbols[k].imag();
    }
    fftw_execute_dft(plan, buf.get(), buf.get());
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<cplx> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[k] = {buf.get()[k][0] * scale, buf.get()[k][1] * scale};
    return out;
}

std::vector<std::vector<cplx>> generate_symbols(const SystemConfig& cfg, int count, Rng& rng) {
    const auto alphabet = alphabet_for(cfg);
    std::vector<std::vector<cplx>> blocks;
    blocks.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int b = 0; b < count; ++b) blocks.push_back(data_block(cfg, alphabet, rng));
    return blocks;
}

std::vector<cplx> zero_pad(std::span<const cplx> block, int n_z) {
    if (n_z < 0) throw ArgumentError("zero_pad: negative pad length");
    std::vector<cplx> out(block.begin(), block.end());
    out.resize(block.size() + static_cast<std::size_t>(n_z), cplx{});
    return out;
}

FadingChannel FadingChannel::draw(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                  Rng& rng) {
    return draw(cfg, pdp, rng, std::vector<bool>(static_cast<std::size_t>(pdp.size()), true));
}

FadingChannel FadingChannel::draw(const SystemConfig& cfg, const PowerDelayProfile& pdp, Rng& rng,
                                  const std::vector<bool>& used) {
    if (cfg.max_doppler_hz < 0.0) throw ConfigError("max_doppler_hz must be >= 0");
    FadingChannel ch;
    ch.n_h_ = pdp.size();
    ch.f_d_ = cfg.max_doppler_hz;
    ch.terms_ = cfg.max_doppler_hz > 0.0 ? kSinusoids : 1;
    const auto terms = static_cast<std::size_t>(ch.terms_);
    ch.gains_.resize(static_cast<std::size_t>(ch.n_h_) * terms);
    ch.omega_.assign(ch.gains_.size(), 0.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double w_max = 2.0 * std::numbers::pi * cfg.max_doppler_hz * cfg.sample_period_s;
    for (int l = 0; l < ch.n_h_; ++l) {
        if (!used.at(static_cast<std::size_t>(l))) continue;
        const double var = pdp.variance(l) / static_cast<double>(terms);
        for (std::size_t k = 0; k < terms; ++k) {
            const std::size_t idx = static_cast<std::size_t>(l) * terms + k;
            ch.gains_[idx] = complex_normal(rng, var);
            if (ch.terms_ > 1) ch.omega_[idx] = w_max * std::cos(angle(rng));
        }
    }
    return ch;
}

FadingChannel FadingChannel::fixed(std::vector<cplx> taps) {
    FadingChannel ch;
    ch.n_h_ = static_cast<int>(taps.size());
    ch.terms_ = 1;
    ch.gains_ = std::move(taps);
    ch.omega_.assign(ch.gains_.size(), 0.0);
    return ch;
}

cplx FadingChannel::tap(std::int64_t t, int l) const {
    const auto terms = static_cast<std::size_t>(terms_);
    const std::size_t base = static_cast<std::size_t>(l) * terms;
    if (terms_ == 1 && omega_[base] == 0.0) return gains_[base];
    cplx sum{};
    const double td = static_cast<double>(t);
    for (std::size_t k = 0; k < terms; ++k) {
        sum += gains_[base + k] * std::polar(1.0, omega_[base + k] * td);
    }
    return sum;
}

ChannelRealization FadingChannel::realize(std::int64_t start, std::int64_t span) const {
    ChannelRealization r;
    r.start = start;
    r.span = std::max<std::int64_t>(span, 0);
    r.n_h = n_h_;
    r.max_doppler_hz = f_d_;
    r.taps.assign(static_cast<std::size_t>(r.span) * static_cast<std::size_t>(n_h_), cplx{});
    const auto terms = static_cast<std::size_t>(terms_);
    for (int l = 0; l < n_h_; ++l) {
        for (std::size_t k = 0; k < terms; ++k) {
            const std::size_t idx = static_cast<std::size_t>(l) * terms + k;
            const double w = omega_[idx];
            cplx phasor = gains_[idx] * std::polar(1.0, w * static_cast<double>(start));
            const cplx step = std::polar(1.0, w);
            for (std::int64_t t = 0; t < r.span; ++t) {
                r.taps[static_cast<std::size_t>(t * n_h_ + l)] += phasor;
                phasor *= step;
            }
        }
    }
    return r;
}

ChannelRealization generate_channel(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                    std::int64_t span, Rng& rng) {
    return FadingChannel::draw(cfg, pdp, rng).realize(0, span);
}

ObservationWindow simulate_reception(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                     int true_d, Rng& rng, const ReceptionOptions& options) {
    if (!cfg.to_range.contains(true_d)) {
        throw ArgumentError("true_d = " + std::to_string(true_d) + " outside the configured range");
    }
    const int n_s = cfg.n_s();
    const std::int64_t length = cfg.window_length();
    const std::int64_t reach = length + std::max(true_d, 0);
    const std::int64_t blocks = (reach + n_s - 1) / n_s + 1;

    Rng source_rng = fork(rng, Stream::Source);
    Rng channel_rng = fork(rng, Stream::Channel);
    Rng noise_rng = fork(rng, Stream::Noise);

    std::vector<cplx> stream;
    stream.reserve(static_cast<std::size_t>(blocks * n_s));
    for (const auto& block : generate_symbols(cfg, static_cast<int>(blocks), source_rng)) {
        const auto padded = zero_pad(block, cfg.n_z);
        stream.insert(stream.end(), padded.begin(), padded.end());
    }

    const FadingChannel channel =
        options.channel ? *options.channel : FadingChannel::draw(cfg, pdp, channel_rng);
    const int n_h = channel.n_h();
    const std::int64_t first = std::max<std::int64_t>(true_d, 0);
    const std::int64_t last = true_d + length;  // exclusive
    const ChannelRealization taps = channel.realize(first, std::max<std::int64_t>(last - first, 0));

    const double noise_var = resolve_noise_var(cfg, pdp, options.noise_var);
    std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * noise_var));

    ObservationWindow w;
    w.true_d = true_d;
    w.num_symbols = cfg.num_symbols;
    w.n_s = n_s;
    w.samples.resize(static_cast<std::size_t>(length));
    for (std::int64_t i = 0; i < length; ++i) {
        const std::int64_t p = i + true_d;
        cplx y{};
        if (p >= 0) {
            const int lmax = static_cast<int>(std::min<std::int64_t>(n_h - 1, p));
            for (int l = 0; l <= lmax; ++l) y += taps.at(p, l) * stream[static_cast<std::size_t>(p - l)];
        }
        if (noise_var > 0.0) {
            const double re = noise(noise_rng);
            const double im = noise(noise_rng);
            y += cplx{re, im};
        }
        w.samples[static_cast<std::size_t>(i)] = y;
    }
    return w;
}

std::vector<cplx> simulate_samples(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                   std::span<const std::int64_t> positions, double noise_var,
                                   Rng& rng) {
    // One engine for everything: this runs once per packet in million-trial
    // ensembles, where seeding three sub-streams would dominate the cost.
    Rng& source_rng = rng;
    Rng& noise_rng = rng;
    const int n_s = cfg.n_s();
    std::vector<bool> used(static_cast<std::size_t>(pdp.size()), false);
    for (std::int64_t p : positions) {
        for (int l = 0; l < pdp.size() && l <= p; ++l) {
            if ((p - l) % n_s < cfg.n_x) used[static_cast<std::size_t>(l)] = true;
        }
    }
    const FadingChannel channel = FadingChannel::draw(cfg, pdp, rng, used);
    const auto alphabet = alphabet_for(cfg);

    std::unordered_map<std::int64_t, cplx> data;
    std::unordered_map<std::int64_t, std::vector<cplx>> blocks;
    auto stream_value = [&](std::int64_t q) -> cplx {
        if (q < 0 || q % n_s >= cfg.n_x) return {};
        if (cfg.source_model == SourceModel::GaussianIid) {
            auto [it, fresh] = data.try_emplace(q);
            if (fresh) it->second = complex_normal(source_rng, cfg.sigma_x2);
            return it->second;
        }
        auto [it, fresh] = blocks.try_emplace(q / n_s);
        if (fresh) it->second = data_block(cfg, alphabet, source_rng);
        return it->second[static_cast<std::size_t>(q % n_s)];
    };

    std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * std::max(noise_var, 0.0)));
    std::vector<cplx> out;
    out.reserve(positions.size());
    std::unordered_map<std::int64_t, cplx> received;
    for (std::int64_t p : positions) {
        if (p < 0) throw ArgumentError("simulate_samples: negative stream position");
        if (auto it = received.find(p); it != received.end()) {
            out.push_back(it->second);
            continue;
        }
        cplx y{};
        for (int l = 0; l < channel.n_h() && l <= p; ++l) {
            const cplx x = stream_value(p - l);
            if (x != cplx{}) y += channel.tap(p, l) * x;
        }
        if (noise_var > 0.0) {
            const double re = noise(noise_rng);
            const double im = noise(noise_rng);
            y += cplx{re, im};
        }
        received.emplace(p, y);
        out.push_back(y);
    }
    return out;
}

} // namespace zpsync

#include "zpsync/analytic_pdf.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <string>

#include "zpsync/errors.hpp"
#include "zpsync/special.hpp"

namespace zpsync {

namespace {

constexpr double kDuplicateRelGap = 1e-9;
constexpr double kPerturbation = 1e-6;
// Below this argument erfc(u) is still a normal double.
constexpr double kErfcDirectLimit = 25.0;
constexpr double kHalfLog2 = -0.69314718055994530942;

bool close_rates(double a, double b) {
    return std::abs(a - b) <= kDuplicateRelGap * std::max(std::abs(a), std::abs(b));
}

bool has_duplicates(const std::vector<double>& rates) {
    for (std::size_t j = 0; j < rates.size(); ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            if (close_rates(rates[j], rates[k])) return true;
        }
    }
    return false;
}

// log of one of the two half-line convolution terms
//   exp(u^2 - a^2) erfc(u),   u = h -/+ a,   u^2 - a^2 = h^2 -/+ rate |y|.
double log_half_term(double u, double a, double exponent) {
    if (u < kErfcDirectLimit) return exponent + std::log(std::erfc(u));
    return -a * a + log_erfcx(u);
}

} // namespace

std::optional<TapRange> tap_range(int m, const SystemConfig& cfg) {
    if (m < 0 || m >= cfg.n_s()) {
        throw ArgumentError("tap_range: index " + std::to_string(m) + " outside [0, " +
                            std::to_string(cfg.n_s() - 1) + "]");
    }
    const int n_x = cfg.n_x;
    const int n_h = cfg.n_h;
    if (m >= n_x + n_h - 1) return std::nullopt;
    // The three overlapping regions of the linear convolution with a data block
    // of length n_x; clamping covers the short-block case n_x < n_h too.
    const int first = std::max(0, m - n_x + 1);
    const int last = std::min(m, n_h - 1);
    return TapRange{first, last};
}

double log_pdf_noise(double y, double noise_var) {
    if (!(noise_var > 0.0)) throw ArgumentError("log_pdf_noise: noise variance must be positive");
    return -y * y / noise_var - 0.5 * std::log(std::numbers::pi * noise_var);
}

PdfCoefficients make_coefficients(TapRange range, const PowerDelayProfile& pdp, double sigma_x2,
                                  const PdfOptions& options) {
    if (range.first < 0 || range.last >= pdp.size() || range.first > range.last) {
        throw ArgumentError("make_coefficients: tap range outside the power delay profile");
    }
    const auto all_rates = pdp.rates(sigma_x2);
    PdfCoefficients c;
    c.range = range;
    c.rates.assign(all_rates.begin() + range.first, all_rates.begin() + range.last + 1);

    if (has_duplicates(c.rates)) {
        if (!options.perturb_duplicate_rates) {
            throw DegeneratePdpError(
                "pdp: two taps share the same rate parameter; the closed-form density is singular");
        }
        std::cerr << "warning: perturbing coinciding tap rates by a relative " << kPerturbation
                  << '\n';
        for (std::size_t j = 1; j < c.rates.size(); ++j) {
            for (int guard = 0; guard < 64; ++guard) {
                bool clash = false;
                for (std::size_t k = 0; k < j; ++k) clash = clash || close_rates(c.rates[j], c.rates[k]);
                if (!clash) break;
                c.rates[j] *= 1.0 + kPerturbation;
            }
        }
    }

    const std::size_t n = c.rates.size();
    const auto& r = c.rates;
    // Hypoexponential weights: f_{sum E_k}(x) = sum_j hypo[j] exp(-r_j x).
    std::vector<double> hypo(n);
    for (std::size_t j = 0; j < n; ++j) {
        double w = r[j];
        for (std::size_t k = 0; k < n; ++k) {
            if (k != j) w *= r[k] / (r[k] - r[j]);
        }
        hypo[j] = w;
    }
    c.pair_weights.resize(n * n);
    c.rate_weights.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t m = 0; m < n; ++m) {
            c.pair_weights[j * n + m] = hypo[j] * hypo[m] / (r[j] + r[m]);
        }
        // sum_n hypo[n] / (r_j + r_n) is the Laplace transform of the
        // hypoexponential at r_j, i.e. prod_k r_k / (r_k + r_j).
        double laplace = 1.0;
        for (std::size_t k = 0; k < n; ++k) laplace *= r[k] / (r[k] + r[j]);
        c.rate_weights[j] = hypo[j] * laplace;
    }
    for (double w : c.rate_weights) {
        if (!std::isfinite(w)) throw NumericalFailure("pdp: non-finite partial-fraction weight");
    }
    return c;
}

SignalDensity::SignalDensity(TapRange range, const PowerDelayProfile& pdp, double sigma_x2,
                             double noise_var, const PdfOptions& options)
    : coef_(make_coefficients(range, pdp, sigma_x2, options)), noise_var_(noise_var) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
        throw ArgumentError("SignalDensity: noise variance must be positive and finite");
    }
    sigma_w_ = std::sqrt(noise_var);
    inv_sigma_w_ = 1.0 / sigma_w_;
    half_rate_sigma_.reserve(coef_.rates.size());
    exp_half_sq_.reserve(coef_.rates.size());
    for (double rate : coef_.rates) {
        const double h = 0.5 * rate * sigma_w_;
        half_rate_sigma_.push_back(h);
        exp_half_sq_.push_back(h < 20.0 ? std::exp(h * h) : 0.0);
    }
}

double SignalDensity::pdf(double y) const {
    const double ay = std::abs(y);
    const double a = ay * inv_sigma_w_;
    const double gauss = std::exp(-a * a);
    double sum = 0.0;
    for (std::size_t j = 0; j < coef_.rates.size(); ++j) {
        const double rate = coef_.rates[j];
        const double h = half_rate_sigma_[j];
        const double um = h - a;
        const double up = h + a;
        double t1;
        double t2;
        if (exp_half_sq_[j] > 0.0) {
            const double grow = std::exp(rate * ay);
            t1 = um < kErfcDirectLimit ? exp_half_sq_[j] / grow * std::erfc(um)
                                       : gauss * erfcx(um);
            t2 = up < kErfcDirectLimit ? exp_half_sq_[j] * grow * std::erfc(up)
                                       : gauss * erfcx(up);
        } else {
            t1 = um < kErfcDirectLimit ? std::exp(h * h - rate * ay) * std::erfc(um)
                                       : gauss * erfcx(um);
            t2 = up < kErfcDirectLimit ? std::exp(h * h + rate * ay) * std::erfc(up)
                                       : gauss * erfcx(up);
        }
        sum += coef_.rate_weights[j] * 0.5 * (t1 + t2);
    }
    if (std::isfinite(sum) && sum > 1e-280) return sum;
    return std::exp(log_pdf_log_domain(y));
}

double SignalDensity::log_pdf(double y) const {
    const double ay = std::abs(y);
    const double a = ay * inv_sigma_w_;
    const double gauss = std::exp(-a * a);
    double sum = 0.0;
    for (std::size_t j = 0; j < coef_.rates.size(); ++j) {
        const double rate = coef_.rates[j];
        const double h = half_rate_sigma_[j];
        const double e = exp_half_sq_[j];
        if (e == 0.0) return log_pdf_log_domain(y);
        const double um = h - a;
        const double up = h + a;
        const double grow = std::exp(rate * ay);
        const double t1 = um < kErfcDirectLimit ? e / grow * std::erfc(um) : gauss * erfcx(um);
        const double t2 = up < kErfcDirectLimit ? e * grow * std::erfc(up) : gauss * erfcx(up);
        sum += coef_.rate_weights[j] * (t1 + t2);
    }
    sum *= 0.5;
    if (std::isfinite(sum) && sum > 1e-280) return std::log(sum);
    return log_pdf_log_domain(y);
}

double SignalDensity::log_pdf_log_domain(double y) const {
    const double ay = std::abs(y);
    const double a = ay * inv_sigma_w_;
    const std::size_t n = coef_.rates.size();
    std::vector<double> logs(n);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double rate = coef_.rates[j];
        const double h = half_rate_sigma_[j];
        const double l1 = log_half_term(h - a, a, h * h - rate * ay);
        const double l2 = log_half_term(h + a, a, h * h + rate * ay);
        logs[j] = kHalfLog2 + log_add_exp(l1, l2) + std::log(std::abs(coef_.rate_weights[j]));
        peak = std::max(peak, logs[j]);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double sign = coef_.rate_weights[j] < 0.0 ? -1.0 : 1.0;
        s += sign * std::exp(logs[j] - peak);
    }
    if (!(s > 0.0) || !std::isfinite(s) || !std::isfinite(peak)) {
        throw NumericalFailure("log_pdf_signal: cancellation left a non-positive density at y = " +
                               std::to_string(y));
    }
    return peak + std::log(s);
}

double SignalDensity::pdf_v(double v) const {
    const double av = std::abs(v);
    double sum = 0.0;
    for (std::size_t j = 0; j < coef_.rates.size(); ++j) {
        sum += coef_.rate_weights[j] * std::exp(-coef_.rates[j] * av);
    }
    return sum;
}

double SignalDensity::log_pdf_v(double v) const {
    const double direct = pdf_v(v);
    if (std::isfinite(direct) && direct > 1e-280) return std::log(direct);
    const double av = std::abs(v);
    const std::size_t n = coef_.rates.size();
    std::vector<double> logs(n);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        logs[j] = std::log(std::abs(coef_.rate_weights[j])) - coef_.rates[j] * av;
        peak = std::max(peak, logs[j]);
    }
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        s += (coef_.rate_weights[j] < 0.0 ? -1.0 : 1.0) * std::exp(logs[j] - peak);
    }
    if (!(s > 0.0)) throw NumericalFailure("log_pdf_v: non-positive density");
    return peak + std::log(s);
}

double SignalDensity::sample_v(Rng& rng) const {
    std::exponential_distribution<double> unit(1.0);
    double v = 0.0;
    for (double rate : coef_.rates) {
        const double e1 = unit(rng);
        const double e2 = unit(rng);
        v += (e1 - e2) / rate;
    }
    return v;
}

double SignalDensity::variance() const {
    double v = 0.5 * noise_var_;
    for (double rate : coef_.rates) v += 2.0 / (rate * rate);
    return v;
}

namespace {

TapRange require_signal_range(int m, const SystemConfig& cfg) {
    auto range = tap_range(m, cfg);
    if (!range) {
        throw ArgumentError("index " + std::to_string(m) + " carries noise only");
    }
    return *range;
}

} // namespace

double log_pdf_signal(double y, int m, const SystemConfig& cfg, const PowerDelayProfile& pdp,
                      double noise_var) {
    return SignalDensity(require_signal_range(m, cfg), pdp, cfg.sigma_x2, noise_var).log_pdf(y);
}

double log_pdf_v(double v, int m, const SystemConfig& cfg, const PowerDelayProfile& pdp) {
    // The signal part does not depend on the noise level; any positive value works.
    return SignalDensity(require_signal_range(m, cfg), pdp, cfg.sigma_x2, 1.0).log_pdf_v(v);
}

double sample_v(int m, const SystemConfig& cfg, const PowerDelayProfile& pdp, Rng& rng) {
    return SignalDensity(require_signal_range(m, cfg), pdp, cfg.sigma_x2, 1.0).sample_v(rng);
}

} // namespace zpsync

#include "zpsync/mcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "zpsync/errors.hpp"

namespace zpsync {

namespace {

constexpr std::size_t kMinExpansionDraws = 16;
// Draws whose kernel is below exp(-kNeglect) of the nearest one are dropped.
constexpr double kNeglect = 60.0;

// Index range [lo, hi) of sorted draws within reach of x, plus the squared
// distance to the nearest draw.
struct Reach {
    std::size_t lo;
    std::size_t hi;
    double nearest_sq;
};

Reach draws_in_reach(const std::vector<double>& z, double x, double pad) {
    const auto it = std::lower_bound(z.begin(), z.end(), x);
    const std::size_t mid = static_cast<std::size_t>(it - z.begin());
    double nearest = std::numeric_limits<double>::infinity();
    if (mid < z.size()) nearest = z[mid] - x;
    if (mid > 0) nearest = std::min(nearest, x - z[mid - 1]);
    const double radius = std::sqrt(nearest * nearest + kNeglect) + pad;
    std::size_t lo = mid;
    while (lo > 0 && x - z[lo - 1] <= radius) --lo;
    std::size_t hi = mid;
    while (hi < z.size() && z[hi] - x <= radius) ++hi;
    return {lo, hi, nearest * nearest};
}

} // namespace

KernelMixtureDensity::KernelMixtureDensity(std::vector<double> draws, double noise_var)
    : draws_(std::move(draws)), noise_var_(noise_var) {
    if (draws_.empty()) throw ArgumentError("Monte Carlo density needs at least one draw");
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
        throw ArgumentError("Monte Carlo density: noise variance must be positive and finite");
    }
    inv_sigma_ = 1.0 / std::sqrt(noise_var);
    log_norm_ = -std::log(static_cast<double>(draws_.size())) -
                0.5 * std::log(std::numbers::pi * noise_var);
    for (double& v : draws_) {
        if (!std::isfinite(v)) throw ArgumentError("Monte Carlo density: non-finite draw");
        v *= inv_sigma_;
    }
    std::sort(draws_.begin(), draws_.end());
    if (draws_.size() < kMinExpansionDraws) return;

    origin_ = std::floor(draws_.front() - kReach);
    const auto cells = static_cast<std::size_t>(std::ceil(draws_.back() + kReach - origin_));
    log_value_.resize(cells);
    log_slope_.resize(cells);
    coeffs_.assign(cells * kTerms, 0.0);
    std::vector<double> weight;
    std::vector<double> tilt;
    for (std::size_t j = 0; j < cells; ++j) {
        const double c = origin_ + static_cast<double>(j) + 0.5;
        // The pad of 1 keeps every draw that matters anywhere in the cell.
        const Reach r = draws_in_reach(draws_, c, 1.0);
        weight.clear();
        tilt.clear();
        double total = 0.0;
        double slope = 0.0;
        for (std::size_t s = r.lo; s < r.hi; ++s) {
            const double u = c - draws_[s];
            const double w = std::exp(r.nearest_sq - u * u);
            weight.push_back(w);
            tilt.push_back(-2.0 * u);
            total += w;
            slope += w * (-2.0 * u);
        }
        slope /= total;
        log_value_[j] = std::log(total) - r.nearest_sq;
        log_slope_[j] = slope;
        double* m = &coeffs_[j * kTerms];
        for (std::size_t s = 0; s < weight.size(); ++s) {
            const double b = tilt[s] - slope;
            double term = weight[s] / total;
            for (int k = 0; k < kTerms; ++k) {
                m[k] += term;
                term *= b / static_cast<double>(k + 1);
            }
        }
        // Wide gaps between draws (high SNR tails) can make the series too short.
        for (double edge : {-0.5, 0.5}) {
            const double expanded = cell_log_sum(j, edge);
            const double exact = log_sum_window(c + edge);
            if (!(std::abs(expanded - exact) <= 1e-11)) {
                log_slope_[j] = std::numeric_limits<double>::quiet_NaN();
                break;
            }
        }
    }
}

double KernelMixtureDensity::cell_log_sum(std::size_t j, double t) const {
    const double* m = &coeffs_[j * kTerms];
    double poly = m[kTerms - 1];
    for (int k = kTerms - 2; k >= 0; --k) poly = poly * t + m[k];
    if (!(poly > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return log_value_[j] + t * (log_slope_[j] - t) + std::log(poly);
}

KernelMixtureDensity KernelMixtureDensity::sampled(const SignalDensity& signal, int count,
                                                   Rng& rng) {
    if (count < 1) throw ArgumentError("Monte Carlo density needs L >= 1");
    std::vector<double> draws(static_cast<std::size_t>(count));
    for (double& v : draws) v = signal.sample_v(rng);
    return KernelMixtureDensity(std::move(draws), signal.noise_var());
}

double KernelMixtureDensity::log_pdf(double y) const {
    const double x = y * inv_sigma_;
    const double pos = x - origin_;
    if (log_value_.empty() || !(pos >= 0.0) || pos >= static_cast<double>(log_value_.size())) {
        return log_sum_window(x) + log_norm_;
    }
    const auto j = static_cast<std::size_t>(pos);
    const double value = cell_log_sum(j, pos - static_cast<double>(j) - 0.5);
    if (std::isnan(value)) return log_sum_window(x) + log_norm_;
    return value + log_norm_;
}

double KernelMixtureDensity::log_pdf_direct(double y) const {
    const double x = y * inv_sigma_;
    double peak = -std::numeric_limits<double>::infinity();
    for (double z : draws_) peak = std::max(peak, -(x - z) * (x - z));
    double sum = 0.0;
    for (double z : draws_) sum += std::exp(-(x - z) * (x - z) - peak);
    return peak + std::log(sum) + log_norm_;
}

double KernelMixtureDensity::log_sum_window(double x) const {
    const Reach r = draws_in_reach(draws_, x, 0.0);
    double sum = 0.0;
    for (std::size_t s = r.lo; s < r.hi; ++s) {
        const double d = x - draws_[s];
        sum += std::exp(r.nearest_sq - d * d);
    }
    return std::log(sum) - r.nearest_sq;
}

} // namespace zpsync

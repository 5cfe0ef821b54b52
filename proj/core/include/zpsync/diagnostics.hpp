#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "zpsync/config.hpp"

namespace zpsync {

struct MomentReport {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double kurtosis = 0.0;  // normalized, 3 for a Gaussian
    std::size_t count = 0;
};

/// Plug-in central moment ratios. Throws ArgumentError for fewer than 4
/// samples or zero variance.
MomentReport empirical_moments(std::span<const double> samples);

/// Moments of a zero-mean symmetric density by adaptive quadrature.
struct DensityMoments {
    double mass = 0.0;
    double variance = 0.0;
    double kurtosis = 0.0;
};
DensityMoments density_moments(const std::function<double(double)>& pdf);

/// Integral of pdf over the real line (adaptive Gauss-Kronrod).
double integrate_density(const std::function<double(double)>& pdf, double tolerance = 1e-12);

/// CDF of a density tabulated on a grid: interval integrals by Gauss-Kronrod,
/// cubic Hermite interpolation in between (the density gives the slopes).
class NumericCdf {
public:
    /// `scale` sets the grid extent (+/- 40 scale); nodes are uniform.
    NumericCdf(std::function<double(double)> pdf, double scale, int intervals = 4000);

    double operator()(double y) const;

private:
    std::function<double(double)> pdf_;
    double lo_;
    double step_;
    std::vector<double> cdf_;
    std::vector<double> density_;
};

/// sup |F_empirical - F|. Throws ArgumentError for an empty sample.
double ks_distance(std::span<const double> samples, const NumericCdf& cdf);
double ks_distance(std::span<const double> samples, const std::function<double(double)>& pdf,
                   double scale);

double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// In-phase component of y_n[m] over independent packets (one channel,
/// data and noise draw each). Noise level from cfg.ebn0_db.
std::vector<double> component_samples(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                      int symbol, int m, std::int64_t count, std::uint64_t seed);

/// Correlation across packets between the in-phase parts of y_n[m] and
/// y_n[m + lag] (lag may run into the next symbol).
double correlation_check(const SystemConfig& cfg, const PowerDelayProfile& pdp, int symbol, int m,
                         int lag, std::int64_t trials, std::uint64_t seed);

/// Correlation across packets between the in-phase and quadrature parts of y_n[m].
double iq_correlation_check(const SystemConfig& cfg, const PowerDelayProfile& pdp, int symbol,
                            int m, std::int64_t trials, std::uint64_t seed);

struct HistogramRow {
    double y = 0.0;
    double empirical = 0.0;
    double model = 0.0;
};

/// Normalized histogram of samples on [lo, hi) with the model density at bin centers.
std::vector<HistogramRow> histogram(std::span<const double> samples, int bins, double lo,
                                    double hi, const std::function<double(double)>& pdf);

} // namespace zpsync

#include "zpsync/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "zpsync/errors.hpp"
#include "zpsync/rng.hpp"
#include "zpsync/signal.hpp"

namespace zpsync {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();

double half_line(const std::function<double(double)>& f, double tolerance) {
    // Integrate f over [0, inf) and (-inf, 0]; the signal-part density has a
    // cusp at the origin so the split point matters.
    double err = 0.0;
    const double right = gauss_kronrod<double, 61>::integrate(f, 0.0, kInf, 20, tolerance, &err);
    const double left = gauss_kronrod<double, 61>::integrate(f, -kInf, 0.0, 20, tolerance, &err);
    return left + right;
}

} // namespace

MomentReport empirical_moments(std::span<const double> samples) {
    if (samples.size() < 4) throw ArgumentError("empirical_moments needs at least 4 samples");
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) throw ArgumentError("empirical_moments: zero variance");
    MomentReport r;
    r.mean = mean;
    r.variance = m2;
    r.skewness = m3 / std::pow(m2, 1.5);
    r.kurtosis = m4 / (m2 * m2);
    r.count = samples.size();
    return r;
}

double integrate_density(const std::function<double(double)>& pdf, double tolerance) {
    return half_line(pdf, tolerance);
}

DensityMoments density_moments(const std::function<double(double)>& pdf) {
    DensityMoments m;
    m.mass = half_line(pdf, 1e-13);
    const double m2 = half_line([&](double y) { return y * y * pdf(y); }, 1e-13);
    const double m4 = half_line([&](double y) { return y * y * y * y * pdf(y); }, 1e-13);
    m.variance = m2 / m.mass;
    m.kurtosis = m4 * m.mass / (m2 * m2);
    return m;
}

NumericCdf::NumericCdf(std::function<double(double)> pdf, double scale, int intervals)
    : pdf_(std::move(pdf)) {
    if (!(scale > 0.0) || intervals < 2) throw ArgumentError("NumericCdf: bad grid");
    lo_ = -40.0 * scale;
    step_ = 80.0 * scale / intervals;
    cdf_.resize(static_cast<std::size_t>(intervals) + 1);
    density_.resize(cdf_.size());
    double err = 0.0;
    cdf_[0] = gauss_kronrod<double, 61>::integrate(pdf_, -kInf, lo_, 20, 1e-12, &err);
    density_[0] = pdf_(lo_);
    for (int k = 1; k <= intervals; ++k) {
        const double a = lo_ + (k - 1) * step_;
        const double b = lo_ + k * step_;
        cdf_[static_cast<std::size_t>(k)] =
            cdf_[static_cast<std::size_t>(k - 1)] +
            gauss_kronrod<double, 31>::integrate(pdf_, a, b, 8, 1e-12, &err);
        density_[static_cast<std::size_t>(k)] = pdf_(b);
    }
}

double NumericCdf::operator()(double y) const {
    const double hi = lo_ + step_ * static_cast<double>(cdf_.size() - 1);
    if (y <= lo_) {
        double err = 0.0;
        return std::clamp(gauss_kronrod<double, 61>::integrate(pdf_, -kInf, y, 20, 1e-12, &err), 0.0, 1.0);
    }
    if (y >= hi) {
        double err = 0.0;
        return std::min(1.0, cdf_.back() + gauss_kronrod<double, 61>::integrate(pdf_, hi, y, 20, 1e-12, &err));
    }
    const double pos = (y - lo_) / step_;
    const auto k = std::min(static_cast<std::size_t>(pos), cdf_.size() - 2);
    const double t = pos - static_cast<double>(k);
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return std::clamp(h00 * cdf_[k] + h10 * step_ * density_[k] + h01 * cdf_[k + 1] +
                          h11 * step_ * density_[k + 1],
                      0.0, 1.0);
}

double ks_distance(std::span<const double> samples, const NumericCdf& cdf) {
    if (samples.empty()) throw ArgumentError("ks_distance: empty sample");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        sup = std::max({sup, std::abs(f - static_cast<double>(i) / n),
                        std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return sup;
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& pdf,
                   double scale) {
    if (samples.empty()) throw ArgumentError("ks_distance: empty sample");
    return ks_distance(samples, NumericCdf(pdf, scale));
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw ArgumentError("pearson_correlation: need two equal-length samples");
    }
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (!(saa > 0.0) || !(sbb > 0.0)) throw ArgumentError("pearson_correlation: zero variance");
    return sab / std::sqrt(saa * sbb);
}

namespace {

template <typename Visit>
void for_each_packet(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                     std::span<const std::int64_t> positions, std::int64_t trials,
                     std::uint64_t seed, Visit&& visit) {
    if (trials < 1) throw ArgumentError("diagnostics need at least one trial");
    const double noise_var = noise_variance_from_ebn0(cfg, pdp);
    constexpr std::int64_t kChunk = 4096;
    for (std::int64_t chunk = 0; chunk * kChunk < trials; ++chunk) {
        Rng rng = make_stream(seed, static_cast<std::uint64_t>(chunk), Stream::Diagnostics);
        const std::int64_t end = std::min(trials, (chunk + 1) * kChunk);
        for (std::int64_t t = chunk * kChunk; t < end; ++t) {
            visit(simulate_samples(cfg, pdp, positions, noise_var, rng));
        }
    }
}

std::int64_t stream_position(const SystemConfig& cfg, int symbol, int m) {
    if (symbol < 0 || m < 0) throw ArgumentError("diagnostics: negative symbol or index");
    return static_cast<std::int64_t>(symbol) * cfg.n_s() + m;
}

} // namespace

std::vector<double> component_samples(const SystemConfig& cfg, const PowerDelayProfile& pdp,
                                      int symbol, int m, std::int64_t count, std::uint64_t seed) {
    const std::int64_t pos[] = {stream_position(cfg, symbol, m)};
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(count, 0)));
    for_each_packet(cfg, pdp, pos, count, seed, [&](const std::vector<cplx>& y) {
        out.push_back(y[0].real());
    });
    return out;
}

double correlation_check(const SystemConfig& cfg, const PowerDelayProfile& pdp, int symbol, int m,
                         int lag, std::int64_t trials, std::uint64_t seed) {
    const std::int64_t first = stream_position(cfg, symbol, m);
    const std::int64_t pos[] = {first, first + lag};
    if (pos[1] < 0) throw ArgumentError("correlation_check: lag reaches before the packet");
    std::vector<double> a, b;
    a.reserve(static_cast<std::size_t>(trials));
    b.reserve(static_cast<std::size_t>(trials));
    for_each_packet(cfg, pdp, pos, trials, seed, [&](const std::vector<cplx>& y) {
        a.push_back(y[0].real());
        b.push_back(y[1].real());
    });
    return pearson_correlation(a, b);
}

double iq_correlation_check(const SystemConfig& cfg, const PowerDelayProfile& pdp, int symbol,
                            int m, std::int64_t trials, std::uint64_t seed) {
    const std::int64_t pos[] = {stream_position(cfg, symbol, m)};
    std::vector<double> a, b;
    a.reserve(static_cast<std::size_t>(trials));
    b.reserve(static_cast<std::size_t>(trials));
    for_each_packet(cfg, pdp, pos, trials, seed, [&](const std::vector<cplx>& y) {
        a.push_back(y[0].real());
        b.push_back(y[0].imag());
    });
    return pearson_correlation(a, b);
}

std::vector<HistogramRow> histogram(std::span<const double> samples, int bins, double lo,
                                    double hi, const std::function<double(double)>& pdf) {
    if (bins < 1 || !(hi > lo)) throw ArgumentError("histogram: bad binning");
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    const double width = (hi - lo) / bins;
    for (double x : samples) {
        if (x < lo || x >= hi) continue;
        const auto k = std::min(static_cast<std::size_t>((x - lo) / width),
                                static_cast<std::size_t>(bins - 1));
        ++counts[k];
    }
    std::vector<HistogramRow> rows;
    rows.reserve(counts.size());
    const double norm = samples.empty() ? 0.0 : 1.0 / (static_cast<double>(samples.size()) * width);
    for (int k = 0; k < bins; ++k) {
        const double y = lo + (k + 0.5) * width;
        rows.push_back({y, static_cast<double>(counts[static_cast<std::size_t>(k)]) * norm,
                        pdf ? pdf(y) : 0.0});
    }
    return rows;
}

} // namespace zpsync

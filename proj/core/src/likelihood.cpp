#include "zpsync/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "zpsync/errors.hpp"

namespace zpsync {

struct PdfTableAccess {
    static PdfTable& mutate(PdfTable& t) { return t; }
    static PdfTable skeleton(const SystemConfig& cfg, double noise_var, PdfMode mode) {
        return PdfTable::skeleton(cfg, noise_var, mode);
    }
    static std::vector<TapRange>& ranges(PdfTable& t) { return t.ranges_; }
    static std::vector<SignalDensity>& analytic(PdfTable& t) { return t.analytic_; }
    static std::vector<KernelMixtureDensity>& mcs_i(PdfTable& t) { return t.mcs_i_; }
    static std::vector<KernelMixtureDensity>& mcs_q(PdfTable& t) { return t.mcs_q_; }
    static std::vector<double>& gauss_var(PdfTable& t) { return t.gauss_var_; }
    static std::vector<double>& gauss_log_norm(PdfTable& t) { return t.gauss_log_norm_; }
};

std::string_view to_string(PdfMode mode) {
    switch (mode) {
    case PdfMode::Analytic: return "analytic";
    case PdfMode::Mcs: return "mcs";
    case PdfMode::GaussianApprox: return "gaussian";
    }
    return "unknown";
}

PdfTable PdfTable::skeleton(const SystemConfig& cfg, double noise_var, PdfMode mode) {
    cfg.validate();
    if (!(noise_var > 0.0) || !std::isfinite(noise_var)) {
        throw ArgumentError("likelihood tables need a positive, finite noise variance");
    }
    PdfTable t;
    t.mode_ = mode;
    t.noise_var_ = noise_var;
    t.class_of_.resize(static_cast<std::size_t>(cfg.n_s()));
    std::vector<int> pending;
    for (int m = 0; m < cfg.n_s(); ++m) {
        const auto range = tap_range(m, cfg);
        if (!range) {
            pending.push_back(m);
            continue;
        }
        auto it = std::find(t.ranges_.begin(), t.ranges_.end(), *range);
        if (it == t.ranges_.end()) {
            t.ranges_.push_back(*range);
            it = t.ranges_.end() - 1;
        }
        t.class_of_[static_cast<std::size_t>(m)] = static_cast<int>(it - t.ranges_.begin());
    }
    for (int m : pending) t.class_of_[static_cast<std::size_t>(m)] = t.noise_class();
    return t;
}

std::optional<TapRange> PdfTable::class_range(int c) const {
    if (c == noise_class()) return std::nullopt;
    return ranges_.at(static_cast<std::size_t>(c));
}

double PdfTable::log_pdf_component(int c, double y, bool quadrature) const {
    if (c == noise_class()) return zpsync::log_pdf_noise(y, noise_var_);
    const auto k = static_cast<std::size_t>(c);
    switch (mode_) {
    case PdfMode::Analytic: return analytic_[k].log_pdf(y);
    case PdfMode::Mcs: return (quadrature ? mcs_q_[k] : mcs_i_[k]).log_pdf(y);
    case PdfMode::GaussianApprox: return gauss_log_norm_[k] - 0.5 * y * y / gauss_var_[k];
    }
    return std::numeric_limits<double>::quiet_NaN();
}

const KernelMixtureDensity& PdfTable::mcs_component(int c, bool quadrature) const {
    if (mode_ != PdfMode::Mcs || c == noise_class()) {
        throw ArgumentError("mcs_component: not a Monte Carlo signal class");
    }
    return (quadrature ? mcs_q_ : mcs_i_).at(static_cast<std::size_t>(c));
}

double PdfTable::gaussian_variance(int c) const {
    if (c == noise_class()) return 0.5 * noise_var_;
    if (mode_ == PdfMode::GaussianApprox) return gauss_var_.at(static_cast<std::size_t>(c));
    if (mode_ == PdfMode::Analytic) return analytic_.at(static_cast<std::size_t>(c)).variance();
    throw ArgumentError("gaussian_variance: not available for Monte Carlo tables");
}

PdfTable build_pdf_table(const SystemConfig& cfg, const PowerDelayProfile& pdp, double noise_var,
                         PdfMode mode, const PdfOptions& options) {
    if (mode == PdfMode::Mcs) {
        throw ArgumentError("build_pdf_table: Monte Carlo tables need draws, use build_mcs_table");
    }
    if (pdp.size() != cfg.n_h) throw ConfigError("power delay profile length differs from n_h");
    PdfTable t = PdfTableAccess::skeleton(cfg, noise_var, mode);
    for (const TapRange& r : PdfTableAccess::ranges(t)) {
        if (mode == PdfMode::Analytic) {
            PdfTableAccess::analytic(t).emplace_back(r, pdp, cfg.sigma_x2, noise_var, options);
        } else {
            double var = 0.5 * noise_var;
            for (int l = r.first; l <= r.last; ++l) var += 0.5 * cfg.sigma_x2 * pdp.variance(l);
            PdfTableAccess::gauss_var(t).push_back(var);
            PdfTableAccess::gauss_log_norm(t).push_back(-0.5 * std::log(2.0 * std::numbers::pi * var));
        }
    }
    return t;
}

PdfTable build_mcs_table(const SystemConfig& cfg, const PowerDelayProfile& pdp, double noise_var,
                         int draws, Rng& rng, const PdfOptions& options) {
    if (draws < 1) throw ArgumentError("Monte Carlo table needs L >= 1");
    if (pdp.size() != cfg.n_h) throw ConfigError("power delay profile length differs from n_h");
    PdfTable t = PdfTableAccess::skeleton(cfg, noise_var, PdfMode::Mcs);
    for (const TapRange& r : PdfTableAccess::ranges(t)) {
        const SignalDensity signal(r, pdp, cfg.sigma_x2, noise_var, options);
        PdfTableAccess::mcs_i(t).push_back(KernelMixtureDensity::sampled(signal, draws, rng));
        PdfTableAccess::mcs_q(t).push_back(KernelMixtureDensity::sampled(signal, draws, rng));
    }
    return t;
}

PdfTable mcs_table_from_draws(const SystemConfig& cfg, double noise_var,
                              std::vector<std::vector<double>> draws_i,
                              std::vector<std::vector<double>> draws_q) {
    PdfTable t = PdfTableAccess::skeleton(cfg, noise_var, PdfMode::Mcs);
    const std::size_t classes = PdfTableAccess::ranges(t).size();
    if (draws_i.size() != classes || draws_q.size() != classes) {
        throw ArgumentError("mcs_table_from_draws: expected " + std::to_string(classes) +
                            " draw vectors per component");
    }
    for (std::size_t c = 0; c < classes; ++c) {
        PdfTableAccess::mcs_i(t).emplace_back(std::move(draws_i[c]), noise_var);
        PdfTableAccess::mcs_q(t).emplace_back(std::move(draws_q[c]), noise_var);
    }
    return t;
}

void check_window(const ObservationWindow& window, const PdfTable& table) {
    if (window.n_s != table.n_s()) {
        throw ArgumentError("window symbol length " + std::to_string(window.n_s) +
                            " differs from the table's " + std::to_string(table.n_s()));
    }
    if (window.samples.size() !=
        static_cast<std::size_t>(window.num_symbols) * static_cast<std::size_t>(window.n_s)) {
        throw ArgumentError("window holds " + std::to_string(window.samples.size()) +
                            " samples, expected N * n_s");
    }
}

double log_likelihood(const ObservationWindow& window, int d, const PdfTable& table) {
    check_window(window, table);
    double sum = 0.0;
    for (std::size_t i = 0; i < window.samples.size(); ++i) {
        sum += table.log_pdf(table.class_for(static_cast<std::int64_t>(i), d), window.samples[i]);
    }
    if (std::isnan(sum)) throw NumericalFailure("log-likelihood is NaN at d = " + std::to_string(d));
    return sum;
}

LikelihoodEvaluator::LikelihoodEvaluator(const ObservationWindow& window, const PdfTable& table)
    : window_(window), table_(table) {
    check_window(window, table);
    cache_.assign(static_cast<std::size_t>(table.num_classes()) * window.samples.size(),
                  std::numeric_limits<double>::quiet_NaN());
}

double LikelihoodEvaluator::sample_term(std::size_t i, int c) {
    double& slot = cache_[static_cast<std::size_t>(c) * window_.samples.size() + i];
    if (std::isnan(slot)) {
        slot = table_.log_pdf(c, window_.samples[i]);
        if (std::isnan(slot)) {
            throw NumericalFailure("log density is NaN at sample " + std::to_string(i));
        }
    }
    return slot;
}

bool LikelihoodEvaluator::evaluated(int d) const {
    const auto it = std::lower_bound(scores_.begin(), scores_.end(), d,
                                     [](const auto& e, int key) { return e.first < key; });
    return it != scores_.end() && it->first == d;
}

double LikelihoodEvaluator::operator()(int d) {
    auto it = std::lower_bound(scores_.begin(), scores_.end(), d,
                               [](const auto& e, int key) { return e.first < key; });
    if (it != scores_.end() && it->first == d) return it->second;
    double sum = 0.0;
    for (std::size_t i = 0; i < window_.samples.size(); ++i) {
        sum += sample_term(i, table_.class_for(static_cast<std::int64_t>(i), d));
    }
    scores_.insert(it, {d, sum});
    history_.emplace_back(d, sum);
    return sum;
}

HypothesisScores score_all(LikelihoodEvaluator& evaluator, ToRange range) {
    if (range.min > range.max) throw ArgumentError("empty hypothesis range");
    HypothesisScores s;
    s.d_values.reserve(static_cast<std::size_t>(range.size()));
    s.log_like.reserve(static_cast<std::size_t>(range.size()));
    double best = -std::numeric_limits<double>::infinity();
    s.argmax_d = range.min;
    for (int d = range.min; d <= range.max; ++d) {
        const double v = evaluator(d);
        s.d_values.push_back(d);
        s.log_like.push_back(v);
        if (v > best) {
            best = v;
            s.argmax_d = d;
        }
    }
    return s;
}

HypothesisScores score_all(const ObservationWindow& window, const PdfTable& table, ToRange range) {
    LikelihoodEvaluator evaluator(window, table);
    return score_all(evaluator, range);
}

} // namespace zpsync

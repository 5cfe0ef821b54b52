#include "zpsync/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "zpsync/errors.hpp"

namespace zpsync {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Method exhaustive_method(PdfMode mode) {
    switch (mode) {
    case PdfMode::Analytic: return Method::MlExhaustive;
    case PdfMode::Mcs: return Method::McsExhaustive;
    case PdfMode::GaussianApprox: return Method::GaussianMl;
    }
    return Method::MlExhaustive;
}

void fill_scores(EstimateResult& r, const LikelihoodEvaluator& ev) {
    auto history = ev.history();
    std::sort(history.begin(), history.end());
    for (const auto& [d, s] : history) {
        r.d_values.push_back(d);
        r.scores.push_back(s);
    }
}

} // namespace

std::string_view to_string(Method method) {
    switch (method) {
    case Method::MlExhaustive: return "ml_exhaustive";
    case Method::MlGolden: return "ml_golden";
    case Method::McsExhaustive: return "mcs_exhaustive";
    case Method::McsGolden: return "mcs_golden";
    case Method::TransitionMetric: return "transition_metric";
    case Method::GaussianMl: return "gaussian_ml";
    }
    return "unknown";
}

Method parse_method(std::string_view text) {
    for (Method m : all_methods()) {
        if (to_string(m) == text) return m;
    }
    throw ConfigError("unknown method '" + std::string(text) + "'");
}

std::vector<Method> all_methods() {
    return {Method::MlExhaustive, Method::MlGolden, Method::McsExhaustive,
            Method::McsGolden, Method::TransitionMetric, Method::GaussianMl};
}

EstimateResult ml_exhaustive(const ObservationWindow& window, const PdfTable& table, ToRange range) {
    const auto start = Clock::now();
    LikelihoodEvaluator ev(window, table);
    const HypothesisScores s = score_all(ev, range);
    EstimateResult r;
    r.d_hat = s.argmax_d;
    r.evaluations = ev.evaluations();
    r.method = exhaustive_method(table.mode());
    r.d_values = s.d_values;
    r.scores = s.log_like;
    r.elapsed_s = seconds_since(start);
    return r;
}

GoldenOutcome golden_section_argmax(ToRange range, const std::function<double(int)>& score,
                                    Rng& rng) {
    if (range.min > range.max) throw ArgumentError("golden-section search over an empty range");
    std::map<int, double> memo;
    auto L = [&](int d) {
        auto it = memo.find(d);
        if (it != memo.end()) return it->second;
        const double v = score(d);
        memo.emplace(d, v);
        return v;
    };
    auto outcome = [&](int d) { return GoldenOutcome{d, static_cast<int>(memo.size())}; };

    constexpr double kRatio = 0.381966;
    int init = range.min;
    int last = range.max;
    if (init == last) return outcome(init);
    auto step = [&] { return static_cast<int>(std::floor(kRatio * (last - init))); };

    // Interior candidates not yet rejected; the endpoints are the other two
    // members of the candidate set.
    std::vector<int> interior;
    for (int d = init + 1; d < last; ++d) interior.push_back(d);

    int c = init + step();
    while (L(c) < L(init) || L(c) < L(last)) {
        auto pos = std::find(interior.begin(), interior.end(), c);
        if (pos != interior.end()) interior.erase(pos);
        if (interior.empty()) return outcome(L(init) >= L(last) ? init : last);
        std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
        c = interior[pick(rng)];
    }

    while (last - init >= 4) {
        if (last - c >= c - init) {
            const int d = c + step();
            if (L(d) < L(c)) {
                last = d;
            } else {
                init = c;
                c = d;
            }
        } else {
            const int d = c - step();
            if (L(d) < L(c)) {
                init = d;
            } else {
                last = c;
                c = d;
            }
        }
    }
    int best = init;
    double best_v = L(init);
    for (int d = init + 1; d <= last; ++d) {
        const double v = L(d);
        if (v > best_v) {
            best_v = v;
            best = d;
        }
    }
    return outcome(best);
}

EstimateResult ml_golden(const ObservationWindow& window, const PdfTable& table, ToRange range,
                         Rng& rng) {
    const auto start = Clock::now();
    LikelihoodEvaluator ev(window, table);
    const GoldenOutcome g = golden_section_argmax(range, [&](int d) { return ev(d); }, rng);
    EstimateResult r;
    r.d_hat = g.d_hat;
    r.evaluations = g.evaluations;
    r.method = table.mode() == PdfMode::Mcs ? Method::McsGolden : Method::MlGolden;
    fill_scores(r, ev);
    r.elapsed_s = seconds_since(start);
    return r;
}

PdfTable mcs_table(const SystemConfig& cfg, const PowerDelayProfile& pdp, double noise_var,
                   int draws, Rng& rng) {
    return build_mcs_table(cfg, pdp, noise_var, draws, rng);
}

std::vector<double> transition_metric_scores(const ObservationWindow& window,
                                             const SystemConfig& cfg, ToRange range) {
    if (cfg.n_z < cfg.n_h) {
        throw ConfigError("transition metric needs n_z >= n_h (ISI-free guard samples)");
    }
    if (window.n_s != cfg.n_s()) throw ArgumentError("window does not match the configuration");
    const int n_s = cfg.n_s();
    const int guard_start = cfg.n_x + cfg.n_h - 1;
    const auto length = static_cast<std::int64_t>(window.samples.size());
    std::vector<double> power(window.samples.size());
    for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::norm(window.samples[i]);

    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(range.size()));
    for (int d = range.min; d <= range.max; ++d) {
        // Symbol blocks touched by the window; block -1 holds pre-packet samples.
        const std::int64_t first_block = d < 0 ? -1 : d / n_s;
        const std::int64_t last_block = (length - 1 + d) / n_s;
        const auto blocks = static_cast<std::size_t>(last_block - first_block + 1);
        std::vector<double> data_sum(blocks, 0.0), guard_sum(blocks, 0.0);
        std::vector<int> data_n(blocks, 0), guard_n(blocks, 0);
        for (std::int64_t i = 0; i < length; ++i) {
            const std::int64_t p = i + d;
            if (p < 0) {
                guard_sum[0] += power[static_cast<std::size_t>(i)];
                ++guard_n[0];
                continue;
            }
            const auto b = static_cast<std::size_t>(p / n_s - first_block);
            const auto m = static_cast<int>(p % n_s);
            if (m < cfg.n_x) {
                data_sum[b] += power[static_cast<std::size_t>(i)];
                ++data_n[b];
            } else if (m >= guard_start) {
                guard_sum[b] += power[static_cast<std::size_t>(i)];
                ++guard_n[b];
            }
        }
        double num = 0.0;
        double den = 0.0;
        for (std::size_t b = 0; b < blocks; ++b) {
            if (data_n[b] > 0) num += data_sum[b] / data_n[b];
            if (guard_n[b] > 0) den += guard_sum[b] / guard_n[b];
        }
        out.push_back(num / (den + 1e-12));
    }
    return out;
}

EstimateResult transition_metric(const ObservationWindow& window, const SystemConfig& cfg,
                                 ToRange range) {
    const auto start = Clock::now();
    const auto scores = transition_metric_scores(window, cfg, range);
    EstimateResult r;
    r.method = Method::TransitionMetric;
    r.evaluations = range.size();
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < range.size(); ++k) {
        r.d_values.push_back(range.min + k);
        if (scores[static_cast<std::size_t>(k)] > best) {
            best = scores[static_cast<std::size_t>(k)];
            r.d_hat = range.min + k;
        }
    }
    r.scores = scores;
    r.elapsed_s = seconds_since(start);
    return r;
}

EstimateResult gaussian_ml(const ObservationWindow& window, const SystemConfig& cfg,
                           const PowerDelayProfile& pdp, double noise_var, ToRange range) {
    const auto start = Clock::now();
    const PdfTable table = build_pdf_table(cfg, pdp, noise_var, PdfMode::GaussianApprox);
    EstimateResult r = ml_exhaustive(window, table, range);
    r.elapsed_s = seconds_since(start);
    return r;
}

bool is_unimodal(const std::vector<double>& scores) {
    if (scores.empty()) return false;
    std::size_t k = 0;
    while (k + 1 < scores.size() && scores[k + 1] > scores[k]) ++k;
    while (k + 1 < scores.size() && scores[k + 1] < scores[k]) ++k;
    return k + 1 == scores.size();
}

} // namespace zpsync

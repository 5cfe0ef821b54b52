#include "zpsync/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <sstream>

#include "zpsync/errors.hpp"

namespace zpsync {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    T value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    if (!text.empty() && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config: cannot parse value '" + std::string(text) + "' for key '" +
                          std::string(key) + "'");
    }
    return value;
}

double parse_real(std::string_view key, std::string_view text) {
    const auto t = trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    return parse_number<double>(key, t);
}

bool parse_bool(std::string_view key, std::string_view text) {
    const auto t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("config: expected boolean for key '" + std::string(key) + "'");
}

ToRange parse_range(std::string_view key, std::string_view text) {
    auto t = trim(text);
    auto sep = t.find_first_of(", ");
    if (sep == std::string_view::npos) {
        throw ConfigError("config: to_range expects two integers 'min, max'");
    }
    ToRange r;
    r.min = parse_number<int>(key, t.substr(0, sep));
    auto rest = trim(t.substr(sep + 1));
    if (!rest.empty() && rest.front() == ',') rest = trim(rest.substr(1));
    r.max = parse_number<int>(key, rest);
    return r;
}

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

} // namespace

std::string_view to_string(SourceModel model) {
    switch (model) {
    case SourceModel::GaussianIid: return "GaussianIID";
    case SourceModel::QamIfft: return "QamIfft";
    }
    return "?";
}

SourceModel parse_source_model(std::string_view text) {
    const auto t = trim(text);
    if (t == "GaussianIID" || t == "gaussian") return SourceModel::GaussianIid;
    if (t == "QamIfft" || t == "qam") return SourceModel::QamIfft;
    throw ConfigError("config: unknown source_model '" + std::string(t) + "'");
}

void SystemConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
    if (n_x < 1) fail("n_x must be positive");
    if (n_z < 0) fail("n_z must be nonnegative");
    if (n_h < 1) fail("n_h must be positive");
    if (num_symbols < 1) fail("N must be positive");
    if (n_z < n_h - 1) fail("n_z must be at least n_h - 1 (no inter-symbol interference)");
    if (!(sample_period_s > 0.0)) fail("T_sa must be positive");
    if (!(sigma_x2 > 0.0) || !std::isfinite(sigma_x2)) fail("sigma_x2 must be positive");
    if (modulation_order < 2 || !is_power_of_two(modulation_order)) {
        fail("modulation_order must be a power of two >= 2");
    }
    if (std::isnan(ebn0_db)) fail("ebn0_db must be a number");
    if (!(max_doppler_hz >= 0.0) || !std::isfinite(max_doppler_hz)) {
        fail("max_doppler_hz must be finite and nonnegative");
    }
    if (to_range.min > to_range.max) fail("to_range must satisfy min <= max");
    if (to_range.min < -n_s() + 1 || to_range.max > n_s() - 1) {
        fail("to_range must lie within [-n_s+1, n_s-1]");
    }
    if (mcs_samples < 1) fail("mcs_samples must be positive");
    if (!(pdp_beta > 0.0) || !std::isfinite(pdp_beta)) fail("pdp_beta must be positive");
}

PowerDelayProfile::PowerDelayProfile(std::vector<double> variances)
    : variances_(std::move(variances)) {
    if (variances_.empty()) throw ConfigError("pdp: at least one tap is required");
    for (double v : variances_) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError("pdp: tap variances must be finite and strictly positive");
        }
    }
}

double PowerDelayProfile::total_power() const {
    return std::accumulate(variances_.begin(), variances_.end(), 0.0);
}

std::vector<double> PowerDelayProfile::rates(double sigma_x2) const {
    if (!(sigma_x2 > 0.0)) throw ArgumentError("pdp: sigma_x2 must be positive");
    const double sigma_x = std::sqrt(sigma_x2);
    std::vector<double> out;
    out.reserve(variances_.size());
    for (double v : variances_) out.push_back(2.0 / (std::sqrt(v) * sigma_x));
    return out;
}

PowerDelayProfile exponential_pdp(int n_h, double beta, bool normalize) {
    if (n_h < 1) throw ConfigError("pdp: n_h must be positive");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("pdp: beta must be positive");
    std::vector<double> v(static_cast<std::size_t>(n_h));
    for (int l = 0; l < n_h; ++l) v[static_cast<std::size_t>(l)] = std::exp(-beta * l);
    if (normalize) {
        const double sum = std::accumulate(v.begin(), v.end(), 0.0);
        for (double& x : v) x /= sum;
    }
    return PowerDelayProfile(std::move(v));
}

PowerDelayProfile make_pdp(const SystemConfig& cfg) {
    return exponential_pdp(cfg.n_h, cfg.pdp_beta, cfg.pdp_normalize);
}

double noise_variance_from_ebn0(double ebn0_db, int modulation_order, double sigma_x2,
                                double total_power) {
    if (std::isnan(ebn0_db)) throw ArgumentError("ebn0_db must be a number");
    if (modulation_order < 2) throw ArgumentError("modulation order must be >= 2");
    const double bits = std::log2(static_cast<double>(modulation_order));
    const double snr = std::pow(10.0, ebn0_db / 10.0) * bits;
    return sigma_x2 * total_power / snr;
}

double noise_variance_from_ebn0(const SystemConfig& cfg, const PowerDelayProfile& pdp) {
    return noise_variance_from_ebn0(cfg.ebn0_db, cfg.modulation_order, cfg.sigma_x2,
                                    pdp.total_power());
}

void apply_config_value(SystemConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    if (key == "n_x") cfg.n_x = parse_number<int>(key, value);
    else if (key == "n_z") cfg.n_z = parse_number<int>(key, value);
    else if (key == "n_h") cfg.n_h = parse_number<int>(key, value);
    else if (key == "N") cfg.num_symbols = parse_number<int>(key, value);
    else if (key == "T_sa") cfg.sample_period_s = parse_real(key, value);
    else if (key == "sigma_x2") cfg.sigma_x2 = parse_real(key, value);
    else if (key == "modulation_order") cfg.modulation_order = parse_number<int>(key, value);
    else if (key == "source_model") cfg.source_model = parse_source_model(value);
    else if (key == "ebn0_db") cfg.ebn0_db = parse_real(key, value);
    else if (key == "max_doppler_hz") cfg.max_doppler_hz = parse_real(key, value);
    else if (key == "to_range") cfg.to_range = parse_range(key, value);
    else if (key == "trial_seed") cfg.trial_seed = parse_number<std::uint64_t>(key, value);
    else if (key == "mcs_samples") cfg.mcs_samples = parse_number<int>(key, value);
    else if (key == "pdp_beta") cfg.pdp_beta = parse_real(key, value);
    else if (key == "pdp_normalize") cfg.pdp_normalize = parse_bool(key, value);
    else throw ConfigError("config: unknown key '" + std::string(key) + "'");
}

SystemConfig parse_config(std::istream& in) {
    SystemConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
        }
        apply_config_value(cfg, view.substr(0, eq), view.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

SystemConfig parse_config_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

SystemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_config(in);
}

std::string to_config_text(const SystemConfig& cfg) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "n_x = " << cfg.n_x << '\n'
        << "n_z = " << cfg.n_z << '\n'
        << "n_h = " << cfg.n_h << '\n'
        << "N = " << cfg.num_symbols << '\n'
        << "T_sa = " << cfg.sample_period_s << '\n'
        << "sigma_x2 = " << cfg.sigma_x2 << '\n'
        << "modulation_order = " << cfg.modulation_order << '\n'
        << "source_model = " << to_string(cfg.source_model) << '\n'
        << "ebn0_db = " << cfg.ebn0_db << '\n'
        << "max_doppler_hz = " << cfg.max_doppler_hz << '\n'
        << "to_range = " << cfg.to_range.min << ", " << cfg.to_range.max << '\n'
        << "trial_seed = " << cfg.trial_seed << '\n'
        << "mcs_samples = " << cfg.mcs_samples << '\n'
        << "pdp_beta = " << cfg.pdp_beta << '\n'
        << "pdp_normalize = " << (cfg.pdp_normalize ? "true" : "false") << '\n';
    return out.str();
}

} // namespace zpsync

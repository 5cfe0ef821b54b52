#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace zpsync {

enum class SourceModel { GaussianIid, QamIfft };

std::string_view to_string(SourceModel model);
SourceModel parse_source_model(std::string_view text);

/// Inclusive range of integer timing-offset hypotheses.
struct ToRange {
    int min = -30;
    int max = 30;

    int size() const { return max - min + 1; }
    bool contains(int d) const { return d >= min && d <= max; }
    bool operator==(const ToRange&) const = default;
};

/// Scenario parameters. Defaults reproduce the reference simulation setup:
/// 128 subcarriers, 15 padded zeros, 10 taps, 10 observed symbols, 128-QAM,
/// 1 us sampling, exponential PDP with beta = 0.5, f_D = 5 Hz.
struct SystemConfig {
    int n_x = 128;
    int n_z = 15;
    int n_h = 10;
    int num_symbols = 10;            // key "N"
    double sample_period_s = 1e-6;   // key "T_sa"
    double sigma_x2 = 1.0;
    int modulation_order = 128;
    SourceModel source_model = SourceModel::QamIfft;
    double ebn0_db = 10.0;
    double max_doppler_hz = 5.0;
    ToRange to_range{};
    std::uint64_t trial_seed = 1;
    int mcs_samples = 10000;         // key "mcs_samples" (L)
    double pdp_beta = 0.5;
    bool pdp_normalize = true;

    int n_s() const { return n_x + n_z; }
    int window_length() const { return num_symbols * n_s(); }

    /// Throws ConfigError on any violated invariant.
    void validate() const;

    bool operator==(const SystemConfig&) const = default;
};

/// Per-tap variances of the Rayleigh channel.
class PowerDelayProfile {
public:
    PowerDelayProfile() = default;
    explicit PowerDelayProfile(std::vector<double> variances);

    const std::vector<double>& variances() const { return variances_; }
    double variance(int l) const { return variances_.at(static_cast<std::size_t>(l)); }
    int size() const { return static_cast<int>(variances_.size()); }
    double total_power() const;

    /// Exponential rates lambda_l = 2 / (sigma_h_l * sigma_x) of the Laplace
    /// components that each tap contributes to one real signal component.
    std::vector<double> rates(double sigma_x2) const;

    bool operator==(const PowerDelayProfile&) const = default;

private:
    std::vector<double> variances_;
};

/// sigma_l^2 = alpha * exp(-beta * l), alpha chosen so the profile sums to 1
/// when normalize is set (alpha = 1 otherwise).
PowerDelayProfile exponential_pdp(int n_h, double beta, bool normalize = true);

/// PDP implied by cfg (n_h, pdp_beta, pdp_normalize).
PowerDelayProfile make_pdp(const SystemConfig& cfg);

/// Complex noise variance sigma_w^2 for a given Eb/N0:
/// sigma_w^2 = sigma_x^2 p_h / (10^(EbN0/10) log2 M).
double noise_variance_from_ebn0(double ebn0_db, int modulation_order, double sigma_x2,
                                double total_power);
double noise_variance_from_ebn0(const SystemConfig& cfg, const PowerDelayProfile& pdp);

/// Line-oriented `key = value` configuration; `#` starts a comment. Keys not
/// present keep their defaults, unknown keys throw ConfigError.
SystemConfig parse_config(std::istream& in);
SystemConfig parse_config_text(std::string_view text);
SystemConfig load_config(const std::string& path);
std::string to_config_text(const SystemConfig& cfg);

/// Applies a single key/value override (same keys as the file format).
void apply_config_value(SystemConfig& cfg, std::string_view key, std::string_view value);

} // namespace zpsync

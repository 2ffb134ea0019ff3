#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slb/balancing.hpp"

namespace slb {

/// Raised for malformed or inconsistent configuration; the CLI maps it to
/// exit code 3.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Minimal INI reader: [section] headers, key = value lines, '#'/';' comments.
class IniFile {
public:
    static IniFile parse_file(const std::string& path);
    static IniFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;
    std::vector<int> get_int_list(const std::string& section, const std::string& key) const;

private:
    std::map<std::string, std::map<std::string, std::string>> data_;
};

struct ExperimentConfig {
    // estimation kernel / ground-truth model
    std::string kernel_kind = "mercer";  // mercer | gaussian
    int dimension = 512;
    double b = 0.5;
    double mu_scale = 1.0;
    int basis_offset = 0;
    double gaussian_width = 0.2;

    // source-condition target
    double r = 0.5;
    double h_decay = 1.0;
    double h_norm = 0.99;
    std::optional<std::uint64_t> h_sign_seed;

    // noise
    std::string noise_kind = "gaussian";  // gaussian | bounded_uniform | rademacher | none
    double noise_scale = 0.1;

    // filter
    std::string filter_kind = "tikhonov";  // tikhonov | iterated_tikhonov | spectral_cutoff | landweber
    int iterated_m = 2;
    double landweber_p = 1.0;

    // experiment
    std::vector<int> n_list;
    int replicates = 1;
    double q = 2.0;
    double eta = 0.1;
    bool eta_sqrt_n = false;  // eta(n) = n^{-1/2}
    ConstantMode constant_mode = ConstantMode::scaled;
    double c_user = 1.0;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency
    double slope_tolerance = 0.12;
    std::string out_dir;

    static ExperimentConfig from_ini(const IniFile& ini);
    static ExperimentConfig from_file(const std::string& path);

    void validate() const;  // throws ConfigError

    double eta_for(int n) const;

    /// "theory" or "scaled:<c>" as given on the CLI.
    void set_constant_mode(const std::string& text);
    std::string constant_mode_text() const;
};

}  // namespace slb

#include "slb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace slb {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

IniFile IniFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

IniFile IniFile::parse_string(const std::string& text) {
    IniFile ini;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        ini.data_[section][key] = value;
    }
    return ini;
}

bool IniFile::has(const std::string& section, const std::string& key) const {
    auto s = data_.find(section);
    return s != data_.end() && s->second.count(key) > 0;
}

std::string IniFile::get(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
    auto s = data_.find(section);
    if (s == data_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double IniFile::get_double(const std::string& section, const std::string& key, double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        size_t pos = 0;
        const double parsed = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config [" + section + "] " + key + ": not a number: " + v);
    }
}

int IniFile::get_int(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        size_t pos = 0;
        const long parsed = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return static_cast<int>(parsed);
    } catch (const std::exception&) {
        throw ConfigError("config [" + section + "] " + key + ": not an integer: " + v);
    }
}

std::uint64_t IniFile::get_u64(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get(section, key, "");
    try {
        size_t pos = 0;
        const unsigned long long parsed = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("config [" + section + "] " + key + ": not an unsigned integer: " + v);
    }
}

std::vector<int> IniFile::get_int_list(const std::string& section, const std::string& key) const {
    std::vector<int> out;
    std::string v = get(section, key, "");
    if (v.empty()) return out;
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream in(v);
    std::string tok;
    while (in >> tok) {
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw ConfigError("config [" + section + "] " + key + ": not an integer: " + tok);
        }
    }
    return out;
}

ExperimentConfig ExperimentConfig::from_ini(const IniFile& ini) {
    ExperimentConfig c;
    c.kernel_kind = ini.get("model", "kind", c.kernel_kind);
    c.dimension = ini.get_int("model", "dimension", c.dimension);
    c.b = ini.get_double("model", "b", c.b);
    c.mu_scale = ini.get_double("model", "mu_scale", c.mu_scale);
    c.basis_offset = ini.get_int("model", "basis_offset", c.basis_offset);
    c.gaussian_width = ini.get_double("model", "gaussian_width", c.gaussian_width);

    c.r = ini.get_double("target", "r", c.r);
    c.h_decay = ini.get_double("target", "h_decay", c.h_decay);
    c.h_norm = ini.get_double("target", "h_norm", c.h_norm);
    if (ini.has("target", "h_sign_seed")) c.h_sign_seed = ini.get_u64("target", "h_sign_seed", 0);

    c.noise_kind = ini.get("noise", "kind", c.noise_kind);
    c.noise_scale = ini.get_double("noise", "scale", c.noise_scale);

    c.filter_kind = ini.get("filter", "kind", c.filter_kind);
    c.iterated_m = ini.get_int("filter", "m", c.iterated_m);
    c.landweber_p = ini.get_double("filter", "p", c.landweber_p);

    c.n_list = ini.get_int_list("experiment", "n");
    c.replicates = ini.get_int("experiment", "replicates", c.replicates);
    c.q = ini.get_double("experiment", "q", c.q);
    const std::string eta = ini.get("experiment", "eta", "0.1");
    if (eta == "sqrt_n") {
        c.eta_sqrt_n = true;
    } else {
        c.eta = ini.get_double("experiment", "eta", c.eta);
    }
    c.set_constant_mode(ini.get("experiment", "constant_mode", "scaled:1.0"));
    c.seed = ini.get_u64("experiment", "seed", c.seed);
    c.threads = ini.get_int("experiment", "threads", c.threads);
    c.slope_tolerance = ini.get_double("experiment", "slope_tolerance", c.slope_tolerance);
    c.out_dir = ini.get("experiment", "out_dir", c.out_dir);
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_ini(IniFile::parse_file(path));
}

void ExperimentConfig::validate() const {
    if (kernel_kind != "mercer" && kernel_kind != "gaussian")
        throw ConfigError("model.kind must be mercer or gaussian");
    if (dimension < 1) throw ConfigError("model.dimension must be >= 1");
    if (!(b > 0.0)) throw ConfigError("model.b must be positive");
    if (!(mu_scale > 0.0)) throw ConfigError("model.mu_scale must be positive");
    if (basis_offset < 0) throw ConfigError("model.basis_offset must be >= 0");
    if (kernel_kind == "gaussian" && !(gaussian_width > 0.0))
        throw ConfigError("model.gaussian_width must be positive");
    if (!(r > 0.0)) throw ConfigError("target.r must be positive");
    if (!(h_norm > 0.0 && h_norm <= 1.0)) throw ConfigError("target.h_norm must lie in (0,1]");
    if (noise_kind != "gaussian" && noise_kind != "bounded_uniform" &&
        noise_kind != "rademacher" && noise_kind != "none")
        throw ConfigError("noise.kind must be gaussian, bounded_uniform, rademacher or none");
    if (noise_scale < 0.0) throw ConfigError("noise.scale must be >= 0");
    if (filter_kind != "tikhonov" && filter_kind != "iterated_tikhonov" &&
        filter_kind != "spectral_cutoff" && filter_kind != "landweber")
        throw ConfigError("filter.kind unknown: " + filter_kind);
    if (filter_kind == "iterated_tikhonov" && iterated_m < 1)
        throw ConfigError("filter.m must be >= 1");
    if (filter_kind == "landweber" && !(landweber_p > 0.0))
        throw ConfigError("filter.p must be positive");
    if (n_list.empty()) throw ConfigError("experiment.n must list at least one sample size");
    for (size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1) throw ConfigError("experiment.n entries must be >= 1");
        if (i > 0 && n_list[i] <= n_list[i - 1])
            throw ConfigError("experiment.n must be strictly increasing");
    }
    if (replicates < 1) throw ConfigError("experiment.replicates must be >= 1");
    if (!(q > 1.0)) throw ConfigError("experiment.q must exceed 1");
    if (!eta_sqrt_n && !(eta > 0.0 && eta < 1.0))
        throw ConfigError("experiment.eta must lie in (0,1)");
    if (constant_mode == ConstantMode::scaled && !(c_user > 0.0))
        throw ConfigError("scaled constant mode requires a positive constant");
    if (threads < 0) throw ConfigError("experiment.threads must be >= 0");
    if (!(slope_tolerance > 0.0)) throw ConfigError("experiment.slope_tolerance must be positive");
}

double ExperimentConfig::eta_for(int n) const {
    return eta_sqrt_n ? 1.0 / std::sqrt(static_cast<double>(n)) : eta;
}

void ExperimentConfig::set_constant_mode(const std::string& text) {
    if (text == "theory") {
        constant_mode = ConstantMode::theory;
        return;
    }
    if (text.rfind("scaled", 0) == 0) {
        constant_mode = ConstantMode::scaled;
        const auto colon = text.find(':');
        if (colon == std::string::npos) {
            c_user = 1.0;
            return;
        }
        try {
            c_user = std::stod(text.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("constant_mode: cannot parse scaled constant in '" + text + "'");
        }
        return;
    }
    throw ConfigError("constant_mode must be 'theory' or 'scaled:<c>', got '" + text + "'");
}

std::string ExperimentConfig::constant_mode_text() const {
    if (constant_mode == ConstantMode::theory) return "theory";
    std::ostringstream s;
    s << "scaled:" << c_user;
    return s.str();
}

}  // namespace slb

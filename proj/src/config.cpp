#include "fpr/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fpr {

double ScenarioConfig::inv_snr() const {
    return std::pow(10.0, -snr_db / 10.0);
}

std::vector<int> ScenarioConfig::effective_k_values() const {
    return k_values.empty() ? default_k_grid(k_max) : k_values;
}

std::vector<int> ScenarioConfig::effective_n_list() const {
    return n_list.empty() ? default_n_list() : n_list;
}

std::string ScenarioConfig::effective_cache_dir() const {
    if (!cache_dir.empty()) return cache_dir;
    if (const char* env = std::getenv("FPR_SIM_CACHE_DIR")) return env;
    return ".fpr-mu-cache";
}

std::vector<int> default_n_list() {
    std::vector<int> out;
    for (int q = 4; q <= 16; ++q) {  // 10^(q/4)
        out.push_back(static_cast<int>(std::llround(std::pow(10.0, q / 4.0))));
    }
    return out;
}

std::vector<int> default_k_grid(int k_max) {
    std::vector<int> out;
    int step = 1;
    for (int k = 1; k <= k_max; k += step) {
        out.push_back(k);
        if (k >= 192) step = 32;
        else if (k >= 96) step = 16;
        else if (k >= 48) step = 8;
        else if (k >= 24) step = 4;
        else if (k >= 12) step = 2;
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<int> int_list(const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v)) out.push_back(std::stoi(s));
    return out;
}

}  // namespace

void apply_config_line(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "tiers") cfg.tiers = std::stoi(value);
    else if (key == "radius") cfg.radius = std::stod(value);
    else if (key == "kappa") cfg.kappa = std::stod(value);
    else if (key == "T") cfg.T = std::stoi(value);
    else if (key == "snr_db") cfg.snr_db = std::stod(value);
    else if (key == "min_dist_fraction") cfg.min_dist_fraction = std::stod(value);
    else if (key == "n_samples") cfg.n_samples = std::stoull(value);
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "beta_set") cfg.beta_set = int_list(value);
    else if (key == "k_max") cfg.k_max = std::stoi(value);
    else if (key == "k_values") cfg.k_values = int_list(value);
    else if (key == "n_list") cfg.n_list = int_list(value);
    else if (key == "oracle_resolution") cfg.oracle_resolution = std::stoi(value);
    else if (key == "cache_dir") cfg.cache_dir = value;
    else if (key == "combiners") {
        cfg.combiners.clear();
        for (const auto& c : split_list(value)) {
            if (c == "mrc" || c == "MRC") cfg.combiners.push_back(Combiner::MRC);
            else if (c == "pzfc" || c == "P-ZFC" || c == "PZFC") cfg.combiners.push_back(Combiner::PZFC);
            else throw std::invalid_argument("config: unknown combiner '" + c + "'");
        }
    } else if (key == "edge_mrc_load_factor") {
        if (value == "printed") cfg.edge_mrc_load_factor = EdgeMrcLoadFactor::Printed;
        else if (value == "symmetric") cfg.edge_mrc_load_factor = EdgeMrcLoadFactor::Symmetric;
        else throw std::invalid_argument("config: edge_mrc_load_factor must be printed|symmetric");
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                        ": expected key = value");
        }
        apply_config_line(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

}  // namespace fpr

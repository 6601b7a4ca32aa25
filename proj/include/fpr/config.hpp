#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fpr/se_model.hpp"

namespace fpr {

// Scenario of record. Built-in defaults follow the reference numerical
// setup: 3 interference tiers, T = 1000, kappa = 3.5, 10 dB SNR, 0.14 r
// minimum distance, 1e6 Monte-Carlo drops.
struct ScenarioConfig {
    int tiers = 3;
    double radius = 1.0;
    double kappa = 3.5;
    int T = 1000;
    double snr_db = 10.0;
    double min_dist_fraction = 0.14;
    std::size_t n_samples = 1000000;
    std::uint64_t seed = 0;
    std::vector<int> beta_set = {1, 3};
    int k_max = 256;
    std::vector<int> k_values;  // empty -> default_k_grid(k_max)
    std::vector<int> n_list;    // empty -> default_n_list()
    std::vector<Combiner> combiners = {Combiner::MRC, Combiner::PZFC};
    EdgeMrcLoadFactor edge_mrc_load_factor = EdgeMrcLoadFactor::Printed;
    int oracle_resolution = 1500;
    std::string cache_dir;  // empty -> FPR_SIM_CACHE_DIR or ".fpr-mu-cache"

    double inv_snr() const;  // sigma^2/rho, linear
    std::vector<int> effective_k_values() const;
    std::vector<int> effective_n_list() const;
    std::string effective_cache_dir() const;
};

// Log-spaced antenna counts over [10, 1e4], quarter-decade steps.
std::vector<int> default_n_list();

// Ascending K grid, unit steps at the bottom and progressively coarser
// above, capped at k_max.
std::vector<int> default_k_grid(int k_max);

// Flat key = value file; '#' starts a comment. Unknown keys are an error.
ScenarioConfig load_config_file(const std::string& path, ScenarioConfig base = {});
void apply_config_line(ScenarioConfig& cfg, const std::string& key, const std::string& value);

}  // namespace fpr

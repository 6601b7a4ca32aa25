#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fpr/geometry.hpp"
#include "fpr/propagation.hpp"

namespace fpr {

struct MuProvenance {
    std::uint64_t seed = 0;
    std::uint64_t grid_hash = 0;
    double kappa = 0.0;
    double min_dist_fraction = 0.0;
};

// Interference moments mu^(gamma) of the relative strength d_0(z)/d_l(z),
// per interfering cell l, measured at the central cell, split into the
// interior group (the beta_f*K users closest to their BS) and the edge
// group (the rest). Interior arrays are empty when beta_f = 0.
struct GroupStatistics {
    int K = 0;
    double beta_f = 0.0;
    int interior_count = 0;  // beta_f * K
    std::size_t n_samples = 0;
    MuProvenance provenance;

    std::vector<double> mu_I_1, mu_I_2, stderr_I_1, stderr_I_2;
    std::vector<double> mu_E_1, mu_E_2, stderr_E_1, stderr_E_2;

    int n_cells() const { return static_cast<int>(mu_E_1.size()); }
};

// Moments for every feasible interior size m in [0, K-1] at a fixed K,
// estimated from one shared set of drops (the per-drop sort gives all
// splits at once via prefix sums).
struct MuTable {
    int K = 0;
    int n_cells = 0;
    std::size_t n_samples = 0;
    MuProvenance provenance;

    // layout: [gamma-1][cell * K + m]; interior entries at m = 0 unused
    std::vector<double> mu_I[2], se_I[2];
    std::vector<double> mu_E[2], se_E[2];

    GroupStatistics slice_m(int m) const;
    GroupStatistics slice(double beta_f) const;
};

enum class Exec { Serial, OpenMP };

// Validates that beta_f*K is an integer in [0, K-1] and returns it.
int interior_count_for(double beta_f, int K);

MuTable estimate_mu_table(const CellGrid& grid, const PropagationModel& model, int K,
                          std::size_t n_samples, double min_dist_fraction, std::uint64_t seed,
                          Exec exec = Exec::OpenMP);

GroupStatistics estimate_mu(const CellGrid& grid, const PropagationModel& model, int K,
                            double beta_f, std::size_t n_samples, double min_dist_fraction,
                            std::uint64_t seed, Exec exec = Exec::OpenMP);

// Deterministic 2-D quadrature oracle for the same moments. The probability
// that a point at distance s from its BS lands in the interior group is a
// binomial tail in the distance CDF of the uniform-on-hexagon-minus-disk
// law. stderr arrays are zero; n_samples is 0.
GroupStatistics quadrature_mu_oracle(const CellGrid& grid, const PropagationModel& model, int K,
                                     double beta_f, double min_dist_fraction, int grid_resolution);

// Distance CDF under the uniform law on hexagon(radius) minus the exclusion
// disk; closed form from circle/hexagon intersection areas. Exposed for tests.
double hexagon_distance_cdf(double s, double radius, double min_dist_fraction);

// CSV export: cell_index, tier, color, group, gamma, mu, stderr.
std::string mu_csv(const CellGrid& grid, const GroupStatistics& stats);

// Content-addressed cache of GroupStatistics.
std::string cache_key(const MuProvenance& prov, int K, int interior_count, std::size_t n_samples);
void store_cached(const std::string& dir, const GroupStatistics& stats);
// Missing file -> nullopt; corrupt file -> checksum_mismatch.
std::optional<GroupStatistics> load_cached(const std::string& dir, const std::string& key);

}  // namespace fpr

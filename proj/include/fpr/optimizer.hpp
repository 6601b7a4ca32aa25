#pragma once

#include <map>
#include <memory>
#include <set>
#include <vector>

#include "fpr/geometry.hpp"
#include "fpr/mu_stats.hpp"
#include "fpr/se_model.hpp"

namespace fpr {

enum class Scheme { FPR, Baseline };

std::string scheme_name(Scheme s);  // "FPR" / "baseline"

struct SearchSpace {
    std::vector<int> k_values;   // ascending
    std::vector<int> beta_set;   // subset of {1, 3, 4, 7}, ascending
    std::vector<int> n_list;     // antenna counts to sweep
    int T = 1000;
    double inv_snr = 0.1;
    EdgeMrcLoadFactor lf = EdgeMrcLoadFactor::Printed;
};

struct SweepRecord {
    int N = 0;
    Combiner combiner = Combiner::MRC;
    Scheme scheme = Scheme::FPR;
    int K = 0;
    int beta = 1;
    double beta_f = 0.0;
    int B = 0;
    double se = 0.0;
    double se_asymptotic = 0.0;
    bool is_optimal = false;
};

struct GainRow {
    int N = 0;
    Combiner combiner = Combiner::MRC;
    double se_fpr = 0.0;
    double se_baseline = 0.0;
    double gain_percent = 0.0;
};

// Source of mu statistics for the inner optimization loop; never recomputes
// Monte Carlo per grid point.
class MuProvider {
  public:
    virtual ~MuProvider() = default;
    virtual const GroupStatistics& get(int K, int interior_count) = 0;
};

// Memory + optional on-disk cache backed by estimate_mu_table: the first
// request for a given K computes all splits at once.
class CachingMuProvider : public MuProvider {
  public:
    CachingMuProvider(CellGrid grid, PropagationModel model, std::size_t n_samples,
                      double min_dist_fraction, std::uint64_t seed, std::string cache_dir = "",
                      Exec exec = Exec::OpenMP);

    const GroupStatistics& get(int K, int interior_count) override;

  private:
    CellGrid grid_;
    PropagationModel model_;
    std::size_t n_samples_;
    double min_dist_fraction_;
    std::uint64_t seed_;
    std::string cache_dir_;
    Exec exec_;
    MuProvenance prov_;
    std::map<std::pair<int, int>, GroupStatistics> mem_;
    std::set<int> table_done_;
};

// Exhaustive search over (K, beta, beta_f) for each N. Baseline restricts
// to beta_f = 0.
class Optimizer {
  public:
    Optimizer(const CellGrid& base_grid, SearchSpace space, MuProvider& provider);

    // argmax of SE over the feasible grid; ties broken by smaller (B, K, beta)
    SweepRecord optimize(int N, Combiner combiner, Scheme scheme) const;
    std::vector<SweepRecord> sweep(Combiner combiner, Scheme scheme) const;
    // SE over the feasible beta_f grid at fixed (N, K, beta)
    std::vector<SweepRecord> beta_f_profile(int N, int K, int beta, Combiner combiner) const;

    SweepRecord evaluate_point(int N, int K, int beta, int interior_count, Combiner combiner,
                               Scheme scheme) const;
    bool feasible(int N, int K, int beta, int interior_count, Combiner combiner) const;
    const std::vector<int>& sharing_set(int beta) const;
    const SearchSpace& space() const { return space_; }

  private:
    SearchSpace space_;
    MuProvider& provider_;
    std::map<int, std::vector<int>> sharing_;  // beta -> L_0
};

std::vector<GainRow> compute_gains(const std::vector<SweepRecord>& fpr_sweep,
                                   const std::vector<SweepRecord>& baseline_sweep);

}  // namespace fpr

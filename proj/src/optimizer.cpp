#include "fpr/optimizer.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include "fpr/errors.hpp"

namespace fpr {

std::string scheme_name(Scheme s) {
    return s == Scheme::FPR ? "FPR" : "baseline";
}

CachingMuProvider::CachingMuProvider(CellGrid grid, PropagationModel model, std::size_t n_samples,
                                     double min_dist_fraction, std::uint64_t seed,
                                     std::string cache_dir, Exec exec)
    : grid_(std::move(grid)),
      model_(model),
      n_samples_(n_samples),
      min_dist_fraction_(min_dist_fraction),
      seed_(seed),
      cache_dir_(std::move(cache_dir)),
      exec_(exec) {
    prov_ = {seed_, grid_geometry_hash(grid_), model_.kappa, min_dist_fraction_};
}

const GroupStatistics& CachingMuProvider::get(int K, int m) {
    const auto key = std::make_pair(K, m);
    if (auto it = mem_.find(key); it != mem_.end()) return it->second;

    if (!cache_dir_.empty()) {
        try {
            if (auto s = load_cached(cache_dir_, cache_key(prov_, K, m, n_samples_))) {
                return mem_.emplace(key, std::move(*s)).first->second;
            }
        } catch (const checksum_mismatch&) {
            // fall through and recompute
        }
    }

    if (table_done_.count(K)) {
        throw std::logic_error("CachingMuProvider: slice missing after table computation");
    }
    MuTable t = estimate_mu_table(grid_, model_, K, n_samples_, min_dist_fraction_, seed_, exec_);
    table_done_.insert(K);
    for (int mm = 0; mm < K; ++mm) {
        GroupStatistics s = t.slice_m(mm);
        if (!cache_dir_.empty()) store_cached(cache_dir_, s);
        mem_.emplace(std::make_pair(K, mm), std::move(s));
    }
    return mem_.at(key);
}

Optimizer::Optimizer(const CellGrid& base_grid, SearchSpace space, MuProvider& provider)
    : space_(std::move(space)), provider_(provider) {
    std::set<int> betas(space_.beta_set.begin(), space_.beta_set.end());
    for (int b : betas) {
        sharing_[b] = pilot_sharing_set(assign_reuse_coloring(base_grid, b));
    }
}

const std::vector<int>& Optimizer::sharing_set(int beta) const {
    auto it = sharing_.find(beta);
    if (it == sharing_.end()) throw std::invalid_argument("beta not in search space");
    return it->second;
}

bool Optimizer::feasible(int N, int K, int beta, int m, Combiner combiner) const {
    const int B = pilot_book_size(K, beta, m);
    if (B < 1 || B > space_.T) return false;
    if (combiner == Combiner::PZFC && N <= B) return false;
    return true;
}

SweepRecord Optimizer::evaluate_point(int N, int K, int beta, int m, Combiner combiner,
                                      Scheme scheme) const {
    const double beta_f = static_cast<double>(m) / K;
    const SystemParams p = make_system_params(N, K, space_.T, beta, beta_f, space_.inv_snr);
    const GroupStatistics& stats = provider_.get(K, m);
    const EvaluationResult r =
        spectral_efficiency(p, stats, sharing_set(beta), combiner, space_.lf);
    SweepRecord rec;
    rec.N = N;
    rec.combiner = combiner;
    rec.scheme = scheme;
    rec.K = K;
    rec.beta = beta;
    rec.beta_f = beta_f;
    rec.B = p.B;
    rec.se = r.se;
    rec.se_asymptotic = r.se_asymptotic;
    return rec;
}

SweepRecord Optimizer::optimize(int N, Combiner combiner, Scheme scheme) const {
    bool found = false;
    SweepRecord best;
    for (int K : space_.k_values) {
        for (int beta : space_.beta_set) {
            const int m_max = scheme == Scheme::Baseline ? 0 : K - 1;
            for (int m = 0; m <= m_max; ++m) {
                if (!feasible(N, K, beta, m, combiner)) continue;
                SweepRecord rec = evaluate_point(N, K, beta, m, combiner, scheme);
                const auto tie = std::make_tuple(rec.B, rec.K, rec.beta);
                const auto best_tie = std::make_tuple(best.B, best.K, best.beta);
                if (!found || rec.se > best.se || (rec.se == best.se && tie < best_tie)) {
                    best = rec;
                    found = true;
                }
            }
        }
    }
    if (!found) throw no_feasible_point("optimize: no feasible (K, beta, beta_f) point");
    best.is_optimal = true;
    return best;
}

std::vector<SweepRecord> Optimizer::sweep(Combiner combiner, Scheme scheme) const {
    std::vector<SweepRecord> out;
    out.reserve(space_.n_list.size());
    for (int N : space_.n_list) out.push_back(optimize(N, combiner, scheme));
    return out;
}

std::vector<SweepRecord> Optimizer::beta_f_profile(int N, int K, int beta,
                                                   Combiner combiner) const {
    std::vector<SweepRecord> out;
    for (int m = 0; m < K; ++m) {
        if (!feasible(N, K, beta, m, combiner)) continue;
        out.push_back(evaluate_point(N, K, beta, m, combiner, Scheme::FPR));
    }
    if (out.empty()) throw no_feasible_point("beta_f_profile: no feasible beta_f");
    auto best = std::max_element(out.begin(), out.end(),
                                 [](const SweepRecord& a, const SweepRecord& b) {
                                     return a.se < b.se;
                                 });
    best->is_optimal = true;
    return out;
}

std::vector<GainRow> compute_gains(const std::vector<SweepRecord>& fpr_sweep,
                                   const std::vector<SweepRecord>& baseline_sweep) {
    std::vector<GainRow> out;
    for (const SweepRecord& f : fpr_sweep) {
        for (const SweepRecord& b : baseline_sweep) {
            if (b.N != f.N || b.combiner != f.combiner) continue;
            GainRow g;
            g.N = f.N;
            g.combiner = f.combiner;
            g.se_fpr = f.se;
            g.se_baseline = b.se;
            g.gain_percent = (f.se - b.se) / b.se * 100.0;
            out.push_back(g);
            break;
        }
    }
    return out;
}

}  // namespace fpr

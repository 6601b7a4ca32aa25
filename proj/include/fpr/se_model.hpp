#pragma once

#include <string>
#include <vector>

#include "fpr/mu_stats.hpp"

namespace fpr {

enum class Combiner { MRC, PZFC };

std::string combiner_name(Combiner c);  // "MRC" / "P-ZFC"

// Reading of the printed K in the MRC edge SINR's middle factor. `Printed`
// keeps K as typeset; `Symmetric` uses (1 - beta_f) K, mirroring the P-ZFC
// edge expression.
enum class EdgeMrcLoadFactor { Printed, Symmetric };

struct SystemParams {
    int N = 0;       // BS antennas
    int K = 0;       // scheduled users per cell
    int T = 0;       // coherence block, channel uses
    int beta = 1;    // integer reuse factor
    double beta_f = 0.0;
    double inv_snr = 0.0;  // sigma^2 / rho
    int B = 0;       // pilot book size, derived
};

// Validates and derives B = K(beta_f + (1 - beta_f) beta); enforces B <= T.
SystemParams make_system_params(int N, int K, int T, int beta, double beta_f, double inv_snr);

// B for a given (K, beta, interior count m); exact integer arithmetic.
int pilot_book_size(int K, int beta, int interior_count);

struct EvaluationResult {
    Combiner combiner = Combiner::MRC;
    double sinr_interior = 0.0;  // 0 when the interior group is empty
    double sinr_edge = 0.0;
    double se = 0.0;             // bits/s/Hz per cell
    double se_asymptotic = 0.0;  // +inf when the interference sum is empty
};

double sinr_mrc_interior(const SystemParams& p, const GroupStatistics& stats);
double sinr_mrc_edge(const SystemParams& p, const GroupStatistics& stats,
                     const std::vector<int>& sharing_set,
                     EdgeMrcLoadFactor lf = EdgeMrcLoadFactor::Printed);
double sinr_pzfc_interior(const SystemParams& p, const GroupStatistics& stats);
double sinr_pzfc_edge(const SystemParams& p, const GroupStatistics& stats,
                      const std::vector<int>& sharing_set);

// SE = K (1 - B/T) (beta_f log2(1 + SINR_I) + (1 - beta_f) log2(1 + SINR_E)).
EvaluationResult spectral_efficiency(const SystemParams& p, const GroupStatistics& stats,
                                     const std::vector<int>& sharing_set, Combiner combiner,
                                     EdgeMrcLoadFactor lf = EdgeMrcLoadFactor::Printed);

// The no-FPR scheme; requires beta_f = 0 and is the same code path.
EvaluationResult baseline_spectral_efficiency(const SystemParams& p, const GroupStatistics& stats,
                                              const std::vector<int>& sharing_set,
                                              Combiner combiner,
                                              EdgeMrcLoadFactor lf = EdgeMrcLoadFactor::Printed);

// Large-antenna limit; combiner-independent. Throws degenerate_unbounded
// when a needed interference sum is empty.
double asymptotic_se(const SystemParams& p, const GroupStatistics& stats,
                     const std::vector<int>& sharing_set);

}  // namespace fpr

#include "fpr/se_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fpr/errors.hpp"

namespace fpr {

namespace {

double log2_1p(double x) {
    return std::log1p(x) / M_LN2;
}

void check_stats(const SystemParams& p, const GroupStatistics& s) {
    if (s.K != p.K) throw std::invalid_argument("stats K does not match system params");
    if (s.interior_count != interior_count_for(p.beta_f, p.K)) {
        throw std::invalid_argument("stats beta_f does not match system params");
    }
}

void check_interior(const GroupStatistics& s) {
    if (s.interior_count <= 0 || s.mu_I_1.empty()) {
        throw std::invalid_argument("interior SINR requested but the interior group is empty");
    }
}

}  // namespace

std::string combiner_name(Combiner c) {
    return c == Combiner::MRC ? "MRC" : "P-ZFC";
}

int pilot_book_size(int K, int beta, int interior_count) {
    // K(beta_f + (1 - beta_f) beta) with beta_f K = interior_count
    return K * beta - interior_count * (beta - 1);
}

SystemParams make_system_params(int N, int K, int T, int beta, double beta_f, double inv_snr) {
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    if (beta < 1) throw std::invalid_argument("beta must be >= 1");
    if (!(inv_snr > 0.0)) throw std::invalid_argument("inv_snr must be > 0");
    const int m = interior_count_for(beta_f, K);
    const int B = pilot_book_size(K, beta, m);
    if (B > T) throw std::invalid_argument("pilot book exceeds coherence block (B > T)");
    SystemParams p;
    p.N = N;
    p.K = K;
    p.T = T;
    p.beta = beta;
    p.beta_f = beta_f;
    p.inv_snr = inv_snr;
    p.B = B;
    return p;
}

double sinr_mrc_interior(const SystemParams& p, const GroupStatistics& s) {
    check_stats(p, s);
    check_interior(s);
    const double N = p.N, B = p.B;
    double cross = 0.0, tot1 = 0.0;
    for (int l = 0; l < s.n_cells(); ++l) {
        tot1 += s.mu_I_1[l];
        if (l != 0) {
            cross += s.mu_I_2[l] + (s.mu_I_2[l] - s.mu_I_1[l] * s.mu_I_1[l]) / N;
        }
    }
    const double denom =
        B * cross + (tot1 * p.K / N + p.inv_snr / N) * (B * tot1 + p.inv_snr);
    return B / denom;
}

double sinr_mrc_edge(const SystemParams& p, const GroupStatistics& s,
                     const std::vector<int>& sharing_set, EdgeMrcLoadFactor lf) {
    check_stats(p, s);
    const double N = p.N, B = p.B;
    double cross = 0.0, tot1 = 0.0;
    for (int l : sharing_set) {
        tot1 += s.mu_E_1[l];
        if (l != 0) {
            cross += s.mu_E_2[l] + (s.mu_E_2[l] - s.mu_E_1[l] * s.mu_E_1[l]) / N;
        }
    }
    const double load =
        lf == EdgeMrcLoadFactor::Printed ? static_cast<double>(p.K) : (1.0 - p.beta_f) * p.K;
    const double denom = B * cross + (tot1 * load / N + p.inv_snr / N) * (B * tot1 + p.inv_snr);
    return B / denom;
}

double sinr_pzfc_interior(const SystemParams& p, const GroupStatistics& s) {
    check_stats(p, s);
    check_interior(s);
    if (p.N <= p.B) throw insufficient_antennas("P-ZFC requires N > B");
    const double NB = p.N - p.B, B = p.B;
    double cross = 0.0, tot1 = 0.0;
    for (int l = 0; l < s.n_cells(); ++l) {
        tot1 += s.mu_I_1[l];
        if (l != 0) {
            cross += s.mu_I_2[l] + (s.mu_I_2[l] - s.mu_I_1[l] * s.mu_I_1[l]) / NB;
        }
    }
    double inner = 0.0;
    for (int l = 0; l < s.n_cells(); ++l) {
        inner += s.mu_I_1[l] * (1.0 - s.mu_I_1[l] / (tot1 + p.inv_snr / B));
    }
    const double denom =
        B * cross + (p.beta_f * p.K / NB) * inner * (B * tot1 + p.inv_snr);
    return B / denom;
}

double sinr_pzfc_edge(const SystemParams& p, const GroupStatistics& s,
                      const std::vector<int>& sharing_set) {
    check_stats(p, s);
    if (p.N <= p.B) throw insufficient_antennas("P-ZFC requires N > B");
    const double NB = p.N - p.B, B = p.B;
    double cross = 0.0, tot1 = 0.0;
    for (int l : sharing_set) {
        tot1 += s.mu_E_1[l];
        if (l != 0) {
            cross += s.mu_E_2[l] + (s.mu_E_2[l] - s.mu_E_1[l] * s.mu_E_1[l]) / NB;
        }
    }
    double inner = 0.0;
    for (int l : sharing_set) {
        inner += s.mu_E_1[l] * (1.0 - s.mu_E_1[l] / (tot1 + p.inv_snr / B));
    }
    const double denom =
        B * cross + ((1.0 - p.beta_f) * p.K / NB) * inner * (B * tot1 + p.inv_snr);
    return B / denom;
}

double asymptotic_se(const SystemParams& p, const GroupStatistics& s,
                     const std::vector<int>& sharing_set) {
    check_stats(p, s);
    const double prelog = p.K * (1.0 - static_cast<double>(p.B) / p.T);
    double se = 0.0;
    if (s.interior_count > 0) {
        double sum = 0.0;
        for (int l = 1; l < s.n_cells(); ++l) sum += s.mu_I_2[l];
        if (sum <= 0.0) throw degenerate_unbounded("asymptotic interior interference sum is empty");
        se += p.beta_f * log2_1p(1.0 / sum);
    }
    double sum = 0.0;
    for (int l : sharing_set) {
        if (l != 0) sum += s.mu_E_2[l];
    }
    if (sum <= 0.0) throw degenerate_unbounded("asymptotic edge interference sum is empty");
    se += (1.0 - p.beta_f) * log2_1p(1.0 / sum);
    return prelog * se;
}

EvaluationResult spectral_efficiency(const SystemParams& p, const GroupStatistics& s,
                                     const std::vector<int>& sharing_set, Combiner combiner,
                                     EdgeMrcLoadFactor lf) {
    check_stats(p, s);
    EvaluationResult r;
    r.combiner = combiner;
    if (s.interior_count > 0) {
        r.sinr_interior = combiner == Combiner::MRC ? sinr_mrc_interior(p, s)
                                                    : sinr_pzfc_interior(p, s);
    } else if (combiner == Combiner::PZFC && p.N <= p.B) {
        throw insufficient_antennas("P-ZFC requires N > B");
    }
    r.sinr_edge = combiner == Combiner::MRC ? sinr_mrc_edge(p, s, sharing_set, lf)
                                            : sinr_pzfc_edge(p, s, sharing_set);
    const double prelog = p.K * (1.0 - static_cast<double>(p.B) / p.T);
    double bits = (1.0 - p.beta_f) * log2_1p(r.sinr_edge);
    if (s.interior_count > 0) bits += p.beta_f * log2_1p(r.sinr_interior);
    r.se = prelog * bits;
    try {
        r.se_asymptotic = asymptotic_se(p, s, sharing_set);
    } catch (const degenerate_unbounded&) {
        r.se_asymptotic = std::numeric_limits<double>::infinity();
    }
    return r;
}

EvaluationResult baseline_spectral_efficiency(const SystemParams& p, const GroupStatistics& s,
                                              const std::vector<int>& sharing_set,
                                              Combiner combiner, EdgeMrcLoadFactor lf) {
    if (p.beta_f != 0.0) {
        throw std::invalid_argument("baseline_spectral_efficiency requires beta_f = 0");
    }
    return spectral_efficiency(p, s, sharing_set, combiner, lf);
}

}  // namespace fpr

#include "fpr/mu_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "fpr/errors.hpp"
#include "fpr/rng.hpp"

namespace fpr {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr std::size_t kChunkDrops = 4096;
constexpr std::size_t kChunksPerBlock = 64;  // bounds partial-accumulator memory

// Per-chunk sums of the per-drop group means, for every split m.
// Layout: [gamma][cell * K + m].
struct ChunkAcc {
    std::vector<double> sum_I[2], sq_I[2], sum_E[2], sq_E[2];

    explicit ChunkAcc(std::size_t n) {
        for (int g = 0; g < 2; ++g) {
            sum_I[g].assign(n, 0.0);
            sq_I[g].assign(n, 0.0);
            sum_E[g].assign(n, 0.0);
            sq_E[g].assign(n, 0.0);
        }
    }
    void add(const ChunkAcc& o) {
        for (int g = 0; g < 2; ++g) {
            for (std::size_t i = 0; i < sum_I[g].size(); ++i) {
                sum_I[g][i] += o.sum_I[g][i];
                sq_I[g][i] += o.sq_I[g][i];
                sum_E[g][i] += o.sum_E[g][i];
                sq_E[g][i] += o.sq_E[g][i];
            }
        }
    }
};

void run_chunk(const CellGrid& grid, const PropagationModel& model, int K,
               double min_dist_fraction, std::uint64_t seed, std::size_t chunk,
               std::size_t n_samples, ChunkAcc& acc, const std::vector<double>& inv) {
    const int n_cells = grid.size();
    const double half_kappa = 0.5 * model.kappa;
    const std::size_t first = chunk * kChunkDrops;
    const std::size_t last = std::min(n_samples, first + kChunkDrops);
    std::mt19937_64 rng = chunk_rng(seed, chunk);

    std::vector<double> d_own2(K), ratio(K), s1(K + 1), s2(K + 1);
    std::vector<int> order(K);

    for (std::size_t drop = first; drop < last; ++drop) {
        // Own cell (l = 0) gives ratio 1 for every user; its moments are
        // filled exactly at finalize time, so no draws are needed for it.
        for (int l = 1; l < n_cells; ++l) {
            for (int k = 0; k < K; ++k) {
                const Vec2 z = sample_user_position(grid, l, min_dist_fraction, rng);
                d_own2[k] = distance2(z, grid.centers[l]);
                const double d_vic2 = distance2(z, grid.centers[0]);
                ratio[k] = std::pow(d_own2[k] / d_vic2, half_kappa);
            }
            std::iota(order.begin(), order.end(), 0);
            // stable: ties (probability zero) keep draw order
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return d_own2[a] < d_own2[b]; });
            s1[0] = s2[0] = 0.0;
            for (int k = 0; k < K; ++k) {
                const double v = ratio[order[k]];
                s1[k + 1] = s1[k] + v;
                s2[k + 1] = s2[k] + v * v;
            }
            const std::size_t base = static_cast<std::size_t>(l) * K;
            for (int m = 0; m < K; ++m) {
                if (m > 0) {
                    const double i1 = s1[m] * inv[m];
                    const double i2 = s2[m] * inv[m];
                    acc.sum_I[0][base + m] += i1;
                    acc.sq_I[0][base + m] += i1 * i1;
                    acc.sum_I[1][base + m] += i2;
                    acc.sq_I[1][base + m] += i2 * i2;
                }
                const double e1 = (s1[K] - s1[m]) * inv[K - m];
                const double e2 = (s2[K] - s2[m]) * inv[K - m];
                acc.sum_E[0][base + m] += e1;
                acc.sq_E[0][base + m] += e1 * e1;
                acc.sum_E[1][base + m] += e2;
                acc.sq_E[1][base + m] += e2 * e2;
            }
        }
    }
}

}  // namespace

int interior_count_for(double beta_f, int K) {
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (beta_f < 0.0 || beta_f >= 1.0) throw invalid_partition("beta_f must be in [0, 1)");
    const double m_real = beta_f * K;
    const long long m = std::llround(m_real);
    if (std::abs(m_real - static_cast<double>(m)) > 1e-9) {
        throw invalid_partition("beta_f * K must be an integer");
    }
    return static_cast<int>(m);
}

MuTable estimate_mu_table(const CellGrid& grid, const PropagationModel& model, int K,
                          std::size_t n_samples, double min_dist_fraction, std::uint64_t seed,
                          Exec exec) {
    if (K < 1) throw std::invalid_argument("estimate_mu_table: K must be >= 1");
    if (n_samples < 1) throw std::invalid_argument("estimate_mu_table: n_samples must be >= 1");
    const int n_cells = grid.size();
    const std::size_t slots = static_cast<std::size_t>(n_cells) * K;

    std::vector<double> inv(K + 1, 0.0);
    for (int i = 1; i <= K; ++i) inv[i] = 1.0 / i;

    ChunkAcc total(slots);
    const std::size_t n_chunks = (n_samples + kChunkDrops - 1) / kChunkDrops;
    const bool parallel = (exec == Exec::OpenMP);

    for (std::size_t block = 0; block < n_chunks; block += kChunksPerBlock) {
        const std::size_t block_n = std::min(kChunksPerBlock, n_chunks - block);
        std::vector<ChunkAcc> partials(block_n, ChunkAcc(slots));
#pragma omp parallel for schedule(dynamic) if (parallel)
        for (long long i = 0; i < static_cast<long long>(block_n); ++i) {
            run_chunk(grid, model, K, min_dist_fraction, seed, block + i, n_samples,
                      partials[i], inv);
        }
        // reduce in chunk order so results are identical for any thread count
        for (std::size_t i = 0; i < block_n; ++i) total.add(partials[i]);
    }

    MuTable t;
    t.K = K;
    t.n_cells = n_cells;
    t.n_samples = n_samples;
    t.provenance = {seed, grid_geometry_hash(grid), model.kappa, min_dist_fraction};
    const double n = static_cast<double>(n_samples);
    for (int g = 0; g < 2; ++g) {
        t.mu_I[g].assign(slots, 0.0);
        t.se_I[g].assign(slots, 0.0);
        t.mu_E[g].assign(slots, 0.0);
        t.se_E[g].assign(slots, 0.0);
    }
    auto finalize = [&](const std::vector<double>& sum, const std::vector<double>& sq,
                        std::size_t i, double& mu, double& se) {
        mu = sum[i] / n;
        if (n_samples > 1) {
            const double var = std::max(0.0, (sq[i] - n * mu * mu) / (n - 1.0));
            se = std::sqrt(var / n);
        }
    };
    for (int l = 0; l < n_cells; ++l) {
        const std::size_t base = static_cast<std::size_t>(l) * K;
        for (int m = 0; m < K; ++m) {
            for (int g = 0; g < 2; ++g) {
                if (l == 0) {
                    if (m > 0) t.mu_I[g][base + m] = 1.0;
                    t.mu_E[g][base + m] = 1.0;
                    continue;
                }
                if (m > 0) {
                    finalize(total.sum_I[g], total.sq_I[g], base + m, t.mu_I[g][base + m],
                             t.se_I[g][base + m]);
                }
                finalize(total.sum_E[g], total.sq_E[g], base + m, t.mu_E[g][base + m],
                         t.se_E[g][base + m]);
            }
        }
    }
    return t;
}

GroupStatistics MuTable::slice_m(int m) const {
    if (m < 0 || m >= K) throw invalid_partition("MuTable::slice_m: m out of [0, K-1]");
    GroupStatistics s;
    s.K = K;
    s.interior_count = m;
    s.beta_f = static_cast<double>(m) / K;
    s.n_samples = n_samples;
    s.provenance = provenance;
    s.mu_E_1.resize(n_cells);
    s.mu_E_2.resize(n_cells);
    s.stderr_E_1.resize(n_cells);
    s.stderr_E_2.resize(n_cells);
    if (m > 0) {
        s.mu_I_1.resize(n_cells);
        s.mu_I_2.resize(n_cells);
        s.stderr_I_1.resize(n_cells);
        s.stderr_I_2.resize(n_cells);
    }
    for (int l = 0; l < n_cells; ++l) {
        const std::size_t i = static_cast<std::size_t>(l) * K + m;
        s.mu_E_1[l] = mu_E[0][i];
        s.mu_E_2[l] = mu_E[1][i];
        s.stderr_E_1[l] = se_E[0][i];
        s.stderr_E_2[l] = se_E[1][i];
        if (m > 0) {
            s.mu_I_1[l] = mu_I[0][i];
            s.mu_I_2[l] = mu_I[1][i];
            s.stderr_I_1[l] = se_I[0][i];
            s.stderr_I_2[l] = se_I[1][i];
        }
    }
    return s;
}

GroupStatistics MuTable::slice(double beta_f) const {
    return slice_m(interior_count_for(beta_f, K));
}

GroupStatistics estimate_mu(const CellGrid& grid, const PropagationModel& model, int K,
                            double beta_f, std::size_t n_samples, double min_dist_fraction,
                            std::uint64_t seed, Exec exec) {
    const int m = interior_count_for(beta_f, K);
    return estimate_mu_table(grid, model, K, n_samples, min_dist_fraction, seed, exec).slice_m(m);
}

double hexagon_distance_cdf(double s, double radius, double min_dist_fraction) {
    const double a = kSqrt3 * 0.5 * radius;
    const double hex_area = 1.5 * kSqrt3 * radius * radius;
    auto disk_cap_area = [&](double d) {  // area of hexagon intersected with disk of radius d
        if (d <= 0.0) return 0.0;
        if (d >= radius) return hex_area;
        if (d <= a) return M_PI * d * d;
        return M_PI * d * d - 6.0 * (d * d * std::acos(a / d) - a * std::sqrt(d * d - a * a));
    };
    const double dmin = min_dist_fraction * radius;
    const double lo = disk_cap_area(dmin);
    const double x = std::clamp(s, dmin, radius);
    return std::clamp((disk_cap_area(x) - lo) / (hex_area - lo), 0.0, 1.0);
}

namespace {

// P[Binomial(trials, p) <= k]
double binom_cdf(int k, int trials, double p) {
    if (k < 0) return 0.0;
    if (k >= trials) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    const double q = 1.0 - p;
    double term = std::pow(q, trials);
    double cdf = term;
    for (int i = 1; i <= k; ++i) {
        term *= static_cast<double>(trials - i + 1) / i * (p / q);
        cdf += term;
    }
    return std::min(cdf, 1.0);
}

}  // namespace

GroupStatistics quadrature_mu_oracle(const CellGrid& grid, const PropagationModel& model, int K,
                                     double beta_f, double min_dist_fraction,
                                     int grid_resolution) {
    const int m = interior_count_for(beta_f, K);
    if (grid_resolution < 8) throw std::invalid_argument("quadrature_mu_oracle: resolution too low");
    const double r = grid.radius;
    const double h = 2.0 * r / grid_resolution;
    if (min_dist_fraction > 0.0 && h > min_dist_fraction * r) {
        throw std::invalid_argument(
            "quadrature_mu_oracle: resolution too coarse to resolve the exclusion disk");
    }
    const double a = kSqrt3 * 0.5 * r;
    const double dmin2 = (min_dist_fraction * r) * (min_dist_fraction * r);
    auto in_region = [&](double x, double y) {
        return x * x + y * y >= dmin2 && inside_hexagon({x, y}, r);
    };

    // Lattice of h x h squares over the bounding box; squares cut by the
    // region boundary get a sub-sampled coverage weight.
    const int nx = grid_resolution;
    const int ny = static_cast<int>(std::ceil(2.0 * a / h));
    struct Pt {
        double x, y, w;
    };
    std::vector<Pt> pts;
    pts.reserve(static_cast<std::size_t>(nx) * ny * 2 / 3);
    for (int j = 0; j < ny; ++j) {
        const double y0 = -a + j * h;
        for (int i = 0; i < nx; ++i) {
            const double x0 = -r + i * h;
            const bool c00 = in_region(x0, y0);
            const bool c10 = in_region(x0 + h, y0);
            const bool c01 = in_region(x0, y0 + h);
            const bool c11 = in_region(x0 + h, y0 + h);
            double w;
            if (c00 && c10 && c01 && c11) {
                w = 1.0;
            } else if (!c00 && !c10 && !c01 && !c11) {
                continue;
            } else {
                int cnt = 0;
                constexpr int S = 16;
                for (int sj = 0; sj < S; ++sj) {
                    for (int si = 0; si < S; ++si) {
                        if (in_region(x0 + (si + 0.5) * h / S, y0 + (sj + 0.5) * h / S)) ++cnt;
                    }
                }
                if (cnt == 0) continue;
                w = static_cast<double>(cnt) / (S * S);
            }
            pts.push_back({x0 + 0.5 * h, y0 + 0.5 * h, w});
        }
    }

    // Interior-inclusion weight: among K i.i.d. uniform points, the one at
    // distance s is in the m closest iff at most m-1 of the other K-1 are
    // closer.
    std::vector<double> w_int(pts.size(), 0.0);
    if (m > 0) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double s = std::sqrt(pts[i].x * pts[i].x + pts[i].y * pts[i].y);
            w_int[i] = binom_cdf(m - 1, K - 1, hexagon_distance_cdf(s, r, min_dist_fraction));
        }
    }

    const int n_cells = grid.size();
    GroupStatistics out;
    out.K = K;
    out.beta_f = static_cast<double>(m) / K;
    out.interior_count = m;
    out.n_samples = 0;
    out.provenance = {0, grid_geometry_hash(grid), model.kappa, min_dist_fraction};
    out.mu_E_1.assign(n_cells, 0.0);
    out.mu_E_2.assign(n_cells, 0.0);
    out.stderr_E_1.assign(n_cells, 0.0);
    out.stderr_E_2.assign(n_cells, 0.0);
    if (m > 0) {
        out.mu_I_1.assign(n_cells, 0.0);
        out.mu_I_2.assign(n_cells, 0.0);
        out.stderr_I_1.assign(n_cells, 0.0);
        out.stderr_I_2.assign(n_cells, 0.0);
    }

    const double half_kappa = 0.5 * model.kappa;
#pragma omp parallel for schedule(dynamic)
    for (int l = 0; l < n_cells; ++l) {
        double nI1 = 0, nI2 = 0, dI = 0, nE1 = 0, nE2 = 0, dE = 0;
        const double cx = grid.centers[l].x, cy = grid.centers[l].y;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double off2 = pts[i].x * pts[i].x + pts[i].y * pts[i].y;
            const double zx = cx + pts[i].x, zy = cy + pts[i].y;
            const double dvic2 = zx * zx + zy * zy;
            const double ratio = std::pow(off2 / dvic2, half_kappa);
            const double wi = pts[i].w * w_int[i];
            const double we = pts[i].w - wi;
            nI1 += wi * ratio;
            nI2 += wi * ratio * ratio;
            dI += wi;
            nE1 += we * ratio;
            nE2 += we * ratio * ratio;
            dE += we;
        }
        if (m > 0) {
            out.mu_I_1[l] = nI1 / dI;
            out.mu_I_2[l] = nI2 / dI;
        }
        out.mu_E_1[l] = nE1 / dE;
        out.mu_E_2[l] = nE2 / dE;
    }
    return out;
}

std::string mu_csv(const CellGrid& grid, const GroupStatistics& stats) {
    std::string out = "cell_index,tier,color,group,gamma,mu,stderr\n";
    char buf[160];
    auto row = [&](int l, const char* group, int gamma, double mu, double se) {
        const int color = grid.colors.empty() ? -1 : grid.colors[l];
        std::snprintf(buf, sizeof(buf), "%d,%d,%d,%s,%d,%.17g,%.17g\n", l, grid.tier_of[l], color,
                      group, gamma, mu, se);
        out += buf;
    };
    for (int l = 0; l < stats.n_cells(); ++l) {
        if (stats.interior_count > 0) {
            row(l, "I", 1, stats.mu_I_1[l], stats.stderr_I_1[l]);
            row(l, "I", 2, stats.mu_I_2[l], stats.stderr_I_2[l]);
        }
        row(l, "E", 1, stats.mu_E_1[l], stats.stderr_E_1[l]);
        row(l, "E", 2, stats.mu_E_2[l], stats.stderr_E_2[l]);
    }
    return out;
}

}  // namespace fpr

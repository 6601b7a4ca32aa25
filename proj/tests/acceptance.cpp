// End-to-end acceptance gate. Each test case prints a "[criterion N] PASS"
// or "FAIL" line so the run can be audited from the log alone. Heavy Monte
// Carlo state (one mu table per K) is shared across criteria through a
// single disk-backed provider.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "fpr/config.hpp"
#include "fpr/geometry.hpp"
#include "fpr/mu_stats.hpp"
#include "fpr/optimizer.hpp"
#include "fpr/propagation.hpp"
#include "fpr/rng.hpp"
#include "fpr/se_model.hpp"
#include "sinr_reference.hpp"

using namespace fpr;

namespace {

constexpr std::size_t kSamples = 100000;

struct Shared {
    ScenarioConfig cfg;
    CellGrid grid;
    PropagationModel model;
    CachingMuProvider provider;

    Shared()
        : cfg(make_cfg()),
          grid(build_hex_grid(cfg.radius, cfg.tiers)),
          model(cfg.kappa),
          provider(grid, model, cfg.n_samples, cfg.min_dist_fraction, cfg.seed,
                   "acceptance-mu-cache") {}

    static ScenarioConfig make_cfg() {
        ScenarioConfig c;
        c.n_samples = kSamples;
        return c;
    }
};

Shared& shared() {
    static Shared s;
    return s;
}

SearchSpace full_space() {
    const ScenarioConfig& c = shared().cfg;
    SearchSpace s;
    s.k_values = c.effective_k_values();
    s.beta_set = c.beta_set;
    s.n_list = c.effective_n_list();
    s.T = c.T;
    s.inv_snr = c.inv_snr();
    return s;
}

struct SweepSet {
    std::vector<SweepRecord> fpr[2], base[2];  // [0]=MRC, [1]=P-ZFC
};

const SweepSet& sweeps() {
    static const SweepSet s = [] {
        SweepSet out;
        const Optimizer opt(shared().grid, full_space(), shared().provider);
        for (int c = 0; c < 2; ++c) {
            const Combiner cb = c ? Combiner::PZFC : Combiner::MRC;
            out.fpr[c] = opt.sweep(cb, Scheme::FPR);
            out.base[c] = opt.sweep(cb, Scheme::Baseline);
        }
        return out;
    }();
    return s;
}

void report(int n, bool pass, const std::string& what) {
    std::printf("[criterion %d] %s - %s\n", n, pass ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
}

// Synthetic mu table with exact own-cell entries, for the formula-level
// criteria that need no Monte Carlo.
GroupStatistics make_stats(int n_cells, int K, int m, std::mt19937_64& rng) {
    GroupStatistics s;
    s.K = K;
    s.interior_count = m;
    s.beta_f = static_cast<double>(m) / K;
    s.n_samples = 1;
    auto fill = [&](std::vector<double>& m1, std::vector<double>& m2) {
        m1.resize(n_cells);
        m2.resize(n_cells);
        m1[0] = m2[0] = 1.0;
        for (int l = 1; l < n_cells; ++l) {
            m1[l] = 0.5 * uniform01(rng) + 1e-6;
            m2[l] = m1[l] * m1[l] * (1.0 + uniform01(rng));
        }
    };
    fill(s.mu_E_1, s.mu_E_2);
    s.stderr_E_1.assign(n_cells, 0.0);
    s.stderr_E_2.assign(n_cells, 0.0);
    if (m > 0) {
        fill(s.mu_I_1, s.mu_I_2);
        s.stderr_I_1.assign(n_cells, 0.0);
        s.stderr_I_2.assign(n_cells, 0.0);
    }
    return s;
}

std::vector<int> all_cells(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

bool rel_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

TEST_CASE("criterion 1: beta_f = 0 collapse is exact") {
    std::mt19937_64 rng(2024);
    bool pass = true;
    for (int trial = 0; trial < 50; ++trial) {
        const int K = 2 + static_cast<int>(uniform01(rng) * 30);
        const int beta = (trial % 2) ? 1 : 3;
        const int n_cells = 37;
        const GroupStatistics s = make_stats(n_cells, K, 0, rng);
        const int N = beta * K + 2 + static_cast<int>(uniform01(rng) * 900);
        const SystemParams p = make_system_params(N, K, 2000, beta, 0.0, 0.1);
        const auto sharing = all_cells(n_cells);
        for (Combiner c : {Combiner::MRC, Combiner::PZFC}) {
            const double a = spectral_efficiency(p, s, sharing, c).se;
            const double b = baseline_spectral_efficiency(p, s, sharing, c).se;
            const bool ok = rel_close(a, b, 1e-12);
            CHECK(ok);
            pass = pass && ok;
        }
    }
    report(1, pass, "FPR at beta_f = 0 equals baseline SE (50 random sets, <= 1e-12 rel)");
}

TEST_CASE("criterion 2: four SINR forms match an independent transcription") {
    std::mt19937_64 rng(777);
    bool pass = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int n_cells = 37;
        const int K = 2 + static_cast<int>(uniform01(rng) * 12);
        const int m = 1 + static_cast<int>(uniform01(rng) * (K - 1));
        const GroupStatistics s = make_stats(n_cells, K, m, rng);
        const int beta = (trial % 3 == 0) ? 1 : 3;
        const double beta_f = static_cast<double>(m) / K;
        const int B = pilot_book_size(K, beta, m);
        const int N = B + 1 + static_cast<int>(uniform01(rng) * 1500);
        const double inv_snr = 0.01 + uniform01(rng);
        const SystemParams p = make_system_params(N, K, 10000, beta, beta_f, inv_snr);
        std::vector<int> sharing{0};
        for (int l = 1; l < n_cells; ++l) {
            if (l % 2 == 0) sharing.push_back(l);
        }
        const sinr_ref::MuColumn mi{s.mu_I_1, s.mu_I_2};
        const sinr_ref::MuColumn me{s.mu_E_1, s.mu_E_2};
        const bool ok =
            rel_close(sinr_mrc_interior(p, s), sinr_ref::mrc_interior(N, B, K, inv_snr, mi),
                      1e-12) &&
            rel_close(sinr_mrc_edge(p, s, sharing),
                      sinr_ref::mrc_edge(N, B, K, inv_snr, me, sharing), 1e-12) &&
            rel_close(sinr_pzfc_interior(p, s),
                      sinr_ref::pzfc_interior(N, B, beta_f, K, inv_snr, mi), 1e-12) &&
            rel_close(sinr_pzfc_edge(p, s, sharing),
                      sinr_ref::pzfc_edge(N, B, beta_f, K, inv_snr, me, sharing), 1e-12);
        CHECK(ok);
        pass = pass && ok;
    }
    report(2, pass, "all four SINR closed forms agree with the scalar transcription "
                    "(100 random mu tables, <= 1e-12 rel)");
}

TEST_CASE("criterion 3: Monte Carlo vs quadrature oracle, K = 10") {
    Shared& sh = shared();
    const GroupStatistics& whole = sh.provider.get(10, 0);
    int total = 0, within = 0;
    bool identity_ok = true;
    for (const int m : {2, 5}) {
        const double beta_f = m / 10.0;
        const GroupStatistics& mc = sh.provider.get(10, m);
        const GroupStatistics qa = quadrature_mu_oracle(sh.grid, sh.model, 10, beta_f,
                                                        sh.cfg.min_dist_fraction,
                                                        sh.cfg.oracle_resolution);
        auto tally = [&](double mu, double se, double q) {
            ++total;
            if (std::abs(mu - q) <= 3.0 * se) ++within;
        };
        for (int l = 1; l < mc.n_cells(); ++l) {
            tally(mc.mu_I_1[l], mc.stderr_I_1[l], qa.mu_I_1[l]);
            tally(mc.mu_I_2[l], mc.stderr_I_2[l], qa.mu_I_2[l]);
            tally(mc.mu_E_1[l], mc.stderr_E_1[l], qa.mu_E_1[l]);
            tally(mc.mu_E_2[l], mc.stderr_E_2[l], qa.mu_E_2[l]);
        }
        // law of total expectation against the whole-cell moments
        auto ident = [&](const std::vector<double>& mi, const std::vector<double>& si,
                         const std::vector<double>& me, const std::vector<double>& se,
                         const std::vector<double>& mw, const std::vector<double>& sw) {
            for (int l = 0; l < mc.n_cells(); ++l) {
                const double lhs = beta_f * mi[l] + (1.0 - beta_f) * me[l];
                const double comb = std::sqrt(beta_f * si[l] * beta_f * si[l] +
                                              (1.0 - beta_f) * se[l] * (1.0 - beta_f) * se[l] +
                                              sw[l] * sw[l]);
                const bool ok = (comb > 0.0) ? std::abs(lhs - mw[l]) <= 3.0 * comb
                                             : lhs == mw[l];
                CHECK(ok);
                identity_ok = identity_ok && ok;
            }
        };
        ident(mc.mu_I_1, mc.stderr_I_1, mc.mu_E_1, mc.stderr_E_1, whole.mu_E_1, whole.stderr_E_1);
        ident(mc.mu_I_2, mc.stderr_I_2, mc.mu_E_2, mc.stderr_E_2, whole.mu_E_2, whole.stderr_E_2);
    }
    const double frac = static_cast<double>(within) / total;
    const bool cover_ok = frac >= 0.95;
    CHECK(cover_ok);
    CHECK(identity_ok);
    std::ostringstream msg;
    msg << "quadrature agreement " << within << "/" << total << " entries within 3 sigma ("
        << 100.0 * frac << "%), total-expectation identity "
        << (identity_ok ? "holds" : "violated");
    report(3, cover_ok && identity_ok, msg.str());
}

TEST_CASE("criterion 4: asymptotic convergence and combiner independence") {
    Shared& sh = shared();
    const GroupStatistics& s = sh.provider.get(10, 2);
    const auto sharing = pilot_sharing_set(assign_reuse_coloring(sh.grid, 3));
    const SystemParams p = make_system_params(100000000, 10, sh.cfg.T, 3, 0.2, sh.cfg.inv_snr());
    const double lim = asymptotic_se(p, s, sharing);
    const double se_mrc = spectral_efficiency(p, s, sharing, Combiner::MRC).se;
    const double se_zfc = spectral_efficiency(p, s, sharing, Combiner::PZFC).se;
    const bool conv_ok = std::abs(se_mrc - lim) / lim < 0.01 && std::abs(se_zfc - lim) / lim < 0.01;
    const bool comb_ok = std::abs(se_mrc - se_zfc) / std::max(se_mrc, se_zfc) < 0.01;
    CHECK(conv_ok);
    CHECK(comb_ok);
    std::ostringstream msg;
    msg << "at N = 1e8: SE_MRC = " << se_mrc << ", SE_P-ZFC = " << se_zfc
        << ", limit = " << lim;
    report(4, conv_ok && comb_ok, msg.str());
}

TEST_CASE("criterion 5: gain table bands at N in {1e1, 1e2, 1e3, 1e4}") {
    const SweepSet& sw = sweeps();
    const std::vector<int> decades{10, 100, 1000, 10000};
    bool pass = true;
    std::ostringstream msg;
    for (int c = 0; c < 2; ++c) {
        const auto gains = compute_gains(sw.fpr[c], sw.base[c]);
        std::vector<double> g;
        for (int N : decades) {
            for (const auto& row : gains) {
                if (row.N == N) g.push_back(row.gain_percent);
            }
        }
        REQUIRE(g.size() == 4);
        msg << (c ? " P-ZFC" : "MRC") << " gains %:";
        for (double v : g) msg << " " << v;
        for (double v : g) {
            CHECK(v > 0.0);
            pass = pass && v > 0.0;
        }
        if (c == 1) {
            for (double v : g) {
                const bool ok = v >= 60.0 && v <= 160.0;
                CHECK(ok);
                pass = pass && ok;
            }
        } else {
            for (std::size_t i = 1; i < g.size(); ++i) {
                CHECK(g[i] >= g[i - 1]);
                pass = pass && g[i] >= g[i - 1];
            }
            const bool ok = g[2] >= 10.0 && g[2] <= 35.0;
            CHECK(ok);
            pass = pass && ok;
        }
        msg << ";";
    }
    report(5, pass, msg.str());
}

TEST_CASE("criterion 6: MRC beta switching point, FPR no later than baseline") {
    const SweepSet& sw = sweeps();
    // smallest N from which beta stays at 1; requires a clean 3 -> 1 switch
    auto transition = [](const std::vector<SweepRecord>& recs) -> long long {
        bool seen_one = false;
        long long t = -1;
        for (const auto& r : recs) {
            if (r.beta == 1 && !seen_one) {
                seen_one = true;
                t = r.N;
            } else if (r.beta == 3 && seen_one) {
                return -2;  // switched back: not monotone
            }
        }
        return t;
    };
    const long long t_fpr = transition(sw.fpr[0]);
    const long long t_base = transition(sw.base[0]);
    const bool starts_at_3 = !sw.fpr[0].empty() && sw.fpr[0].front().beta == 3 &&
                             sw.base[0].front().beta == 3;
    const bool switched = t_fpr > 0 && t_base > 0;
    const bool order_ok = switched && t_fpr <= t_base;
    CHECK(starts_at_3);
    CHECK(switched);
    CHECK(order_ok);
    std::ostringstream msg;
    msg << "MRC switch N: FPR = " << t_fpr << ", baseline = " << t_base;
    report(6, starts_at_3 && switched && order_ok, msg.str());
}

namespace {

// 1-sigma SE uncertainty from the per-entry mu standard errors, by forward
// perturbation of each independent table entry.
double se_sigma(const SystemParams& p, const GroupStatistics& s, const std::vector<int>& sharing,
                Combiner c, double se0) {
    double var = 0.0;
    auto add = [&](std::vector<double> GroupStatistics::*mu,
                   const std::vector<double>& err) {
        for (std::size_t l = 1; l < err.size(); ++l) {
            if (err[l] == 0.0) continue;
            GroupStatistics t = s;
            (t.*mu)[l] += err[l];
            const double d = spectral_efficiency(p, t, sharing, c).se - se0;
            var += d * d;
        }
    };
    add(&GroupStatistics::mu_E_1, s.stderr_E_1);
    add(&GroupStatistics::mu_E_2, s.stderr_E_2);
    if (s.interior_count > 0) {
        add(&GroupStatistics::mu_I_1, s.stderr_I_1);
        add(&GroupStatistics::mu_I_2, s.stderr_I_2);
    }
    return std::sqrt(var);
}

bool unimodal_within(const std::vector<double>& se, const std::vector<double>& sig) {
    const std::size_t imax =
        static_cast<std::size_t>(std::max_element(se.begin(), se.end()) - se.begin());
    for (std::size_t i = 0; i < imax; ++i) {
        if (se[i + 1] < se[i] - 2.0 * std::hypot(sig[i], sig[i + 1])) return false;
    }
    for (std::size_t i = imax; i + 1 < se.size(); ++i) {
        if (se[i + 1] > se[i] + 2.0 * std::hypot(sig[i], sig[i + 1])) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("criterion 7: beta_f profile unimodality at N = 1e3") {
    Shared& sh = shared();
    bool pass = true;
    std::ostringstream msg;
    for (const int beta : {1, 3}) {
        SearchSpace sp = full_space();
        sp.beta_set = {beta};
        const Optimizer opt(sh.grid, sp, sh.provider);
        for (Combiner c : {Combiner::MRC, Combiner::PZFC}) {
            const int K = opt.optimize(1000, c, Scheme::FPR).K;
            const auto profile = opt.beta_f_profile(1000, K, beta, c);
            std::vector<double> se, sig;
            for (const auto& r : profile) {
                const SystemParams p =
                    make_system_params(1000, K, sp.T, beta, r.beta_f, sp.inv_snr);
                const GroupStatistics& s = sh.provider.get(K, static_cast<int>(
                                                                  std::llround(r.beta_f * K)));
                se.push_back(r.se);
                sig.push_back(se_sigma(p, s, opt.sharing_set(beta), c, r.se));
            }
            const bool ok = unimodal_within(se, sig);
            CHECK(ok);
            pass = pass && ok;
            msg << (c == Combiner::MRC ? " MRC" : " P-ZFC") << "/beta=" << beta << " K=" << K
                << " points=" << se.size() << (ok ? " unimodal;" : " NOT unimodal;");
        }
    }
    report(7, pass, msg.str());
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FPRSIM_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("criterion 8: byte-identical CSVs across runs and thread counts") {
    REQUIRE(std::system("rm -rf acceptance-cli && mkdir -p acceptance-cli") == 0);
    for (const char* tag : {"a", "b", "c"}) {
        std::ofstream cfg(std::string("acceptance-cli/cfg_") + tag);
        cfg << "tiers = 2\nn_samples = 20000\ncache_dir = acceptance-cli/cache_" << tag << "\n";
    }
    auto run_set = [&](const std::string& tag, const std::string& extra) {
        const std::string common = "--config acceptance-cli/cfg_" + tag +
                                   " --seed 11 --out-dir acceptance-cli/out_" + tag + " " + extra;
        CHECK(run_cli(common + " estimate-mu --K 6 --beta-f 0.5") == 0);
        CHECK(run_cli(common + " evaluate --N 100 --K 6 --beta 3 --beta-f 0.5 --combiner pzfc") ==
              0);
        CHECK(run_cli(common + " betaf-profile --N 100 --beta 3 --combiner mrc --K 6") == 0);
    };
    run_set("a", "");
    run_set("b", "");
    run_set("c", "--threads 2");

    bool pass = true;
    for (const char* file :
         {"mu_K6_m3.csv", "evaluate.csv", "betaf_profile_mrc_beta3_N100.csv"}) {
        const std::string a = read_file(std::string("acceptance-cli/out_a/") + file);
        const std::string b = read_file(std::string("acceptance-cli/out_b/") + file);
        const std::string c = read_file(std::string("acceptance-cli/out_c/") + file);
        const bool ok = !a.empty() && a == b && a == c;
        CHECK(ok);
        pass = pass && ok;
    }
    report(8, pass, "CSV outputs byte-identical across repeated runs and --threads settings");
}

#include <omp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpr/config.hpp"
#include "fpr/errors.hpp"
#include "fpr/geometry.hpp"
#include "fpr/mu_stats.hpp"
#include "fpr/optimizer.hpp"
#include "fpr/propagation.hpp"
#include "fpr/se_model.hpp"

namespace {

using namespace fpr;

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string file_tag(Combiner c) {
    return c == Combiner::MRC ? "mrc" : "pzfc";
}

std::string sweep_csv(const std::vector<SweepRecord>& recs) {
    std::string out = "N,combiner,scheme,K,beta,beta_f,B,se_bits_per_hz,se_asymptotic\n";
    for (const auto& r : recs) {
        out += std::to_string(r.N) + "," + combiner_name(r.combiner) + "," +
               scheme_name(r.scheme) + "," + std::to_string(r.K) + "," + std::to_string(r.beta) +
               "," + g17(r.beta_f) + "," + std::to_string(r.B) + "," + g17(r.se) + "," +
               g17(r.se_asymptotic) + "\n";
    }
    return out;
}

std::string gains_csv(const std::vector<GainRow>& rows) {
    std::string out = "N,combiner,se_fpr,se_baseline,gain_percent\n";
    for (const auto& g : rows) {
        out += std::to_string(g.N) + "," + combiner_name(g.combiner) + "," + g17(g.se_fpr) + "," +
               g17(g.se_baseline) + "," + g17(g.gain_percent) + "\n";
    }
    return out;
}

struct Session {
    ScenarioConfig cfg;
    std::filesystem::path out_dir;
    CellGrid grid;
    PropagationModel model;
    CachingMuProvider provider;

    explicit Session(const ScenarioConfig& c, const std::string& out)
        : cfg(c),
          out_dir(out),
          grid(build_hex_grid(c.radius, c.tiers)),
          model(c.kappa),
          provider(grid, model, c.n_samples, c.min_dist_fraction, c.seed,
                   c.effective_cache_dir()) {}

    SearchSpace space() const {
        SearchSpace s;
        s.k_values = cfg.effective_k_values();
        s.beta_set = cfg.beta_set;
        s.n_list = cfg.effective_n_list();
        s.T = cfg.T;
        s.inv_snr = cfg.inv_snr();
        s.lf = cfg.edge_mrc_load_factor;
        return s;
    }
};

int cmd_estimate_mu(Session& s, int K, double beta_f) {
    const int m = interior_count_for(beta_f, K);
    const GroupStatistics& stats = s.provider.get(K, m);
    const CellGrid colored = assign_reuse_coloring(s.grid, s.cfg.beta_set.front());
    const auto path = s.out_dir / ("mu_K" + std::to_string(K) + "_m" + std::to_string(m) + ".csv");
    write_file(path, mu_csv(colored, stats));

    double max_rel = 0.0;
    for (int l = 1; l < stats.n_cells(); ++l) {
        max_rel = std::max(max_rel, stats.stderr_E_1[l] / stats.mu_E_1[l]);
        if (m > 0) max_rel = std::max(max_rel, stats.stderr_I_1[l] / stats.mu_I_1[l]);
    }
    std::cout << "mu table: K=" << K << " beta_f=" << g17(stats.beta_f)
              << " n_samples=" << stats.n_samples << " cells=" << stats.n_cells() << "\n";
    for (int l = 0; l < stats.n_cells(); ++l) {
        std::cout << "cell " << l << ": mu_E1=" << g17(stats.mu_E_1[l])
                  << " stderr=" << g17(stats.stderr_E_1[l]);
        if (m > 0) {
            std::cout << " mu_I1=" << g17(stats.mu_I_1[l])
                      << " stderr=" << g17(stats.stderr_I_1[l]);
        }
        std::cout << "\n";
    }
    std::cout << "max relative stderr (gamma=1): " << g17(max_rel) << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_evaluate(Session& s, int N, int K, int beta, double beta_f, const std::string& comb) {
    const Combiner combiner = (comb == "mrc") ? Combiner::MRC : Combiner::PZFC;
    const int m = interior_count_for(beta_f, K);
    const SystemParams p = make_system_params(N, K, s.cfg.T, beta, beta_f, s.cfg.inv_snr());
    const auto sharing = pilot_sharing_set(assign_reuse_coloring(s.grid, beta));
    const GroupStatistics& stats = s.provider.get(K, m);
    const EvaluationResult r =
        spectral_efficiency(p, stats, sharing, combiner, s.cfg.edge_mrc_load_factor);

    SweepRecord rec;
    rec.N = N;
    rec.combiner = combiner;
    rec.scheme = m == 0 ? Scheme::Baseline : Scheme::FPR;
    rec.K = K;
    rec.beta = beta;
    rec.beta_f = beta_f;
    rec.B = p.B;
    rec.se = r.se;
    rec.se_asymptotic = r.se_asymptotic;
    write_file(s.out_dir / "evaluate.csv", sweep_csv({rec}));

    std::cout << combiner_name(combiner) << " N=" << N << " K=" << K << " beta=" << beta
              << " beta_f=" << g17(beta_f) << " B=" << p.B
              << (m == 0 ? " (baseline-equivalent)" : "") << "\n";
    if (m > 0) std::cout << "SINR_interior = " << g17(r.sinr_interior) << "\n";
    std::cout << "SINR_edge = " << g17(r.sinr_edge) << "\n";
    std::cout << "SE = " << g17(r.se) << " bits/s/Hz per cell\n";
    std::cout << "SE_asymptotic = " << g17(r.se_asymptotic) << "\n";
    return 0;
}

int cmd_sweep(Session& s) {
    const Optimizer opt(s.grid, s.space(), s.provider);
    for (Combiner c : s.cfg.combiners) {
        for (Scheme scheme : {Scheme::FPR, Scheme::Baseline}) {
            const auto recs = opt.sweep(c, scheme);
            const auto path =
                s.out_dir / ("sweep_" + file_tag(c) + "_" +
                             (scheme == Scheme::FPR ? std::string("fpr") : "baseline") + ".csv");
            write_file(path, sweep_csv(recs));
            std::cout << "wrote " << path.string() << "\n";
        }
    }
    return 0;
}

int cmd_reproduce_table1(Session& s) {
    SearchSpace space = s.space();
    space.n_list = {10, 100, 1000, 10000};
    const Optimizer opt(s.grid, space, s.provider);
    std::vector<GainRow> all;
    for (Combiner c : s.cfg.combiners) {
        const auto gains = compute_gains(opt.sweep(c, Scheme::FPR), opt.sweep(c, Scheme::Baseline));
        all.insert(all.end(), gains.begin(), gains.end());
    }
    const auto path = s.out_dir / "gains.csv";
    write_file(path, gains_csv(all));

    std::cout << "FPR gain over the pilot-reuse baseline\n";
    std::printf("%8s  %8s  %12s  %12s  %8s\n", "N", "combiner", "SE_FPR", "SE_base", "gain");
    for (const auto& g : all) {
        std::printf("%8d  %8s  %12.4f  %12.4f  %7.1f%%\n", g.N,
                    combiner_name(g.combiner).c_str(), g.se_fpr, g.se_baseline, g.gain_percent);
    }
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_betaf_profile(Session& s, int N, int beta, const std::string& comb, int K) {
    const Combiner combiner = (comb == "mrc") ? Combiner::MRC : Combiner::PZFC;
    SearchSpace space = s.space();
    space.beta_set = {beta};
    const Optimizer opt(s.grid, space, s.provider);
    if (K == 0) K = opt.optimize(N, combiner, Scheme::FPR).K;
    const auto recs = opt.beta_f_profile(N, K, beta, combiner);
    const auto path = s.out_dir / ("betaf_profile_" + file_tag(combiner) + "_beta" +
                                   std::to_string(beta) + "_N" + std::to_string(N) + ".csv");
    write_file(path, sweep_csv(recs));
    std::cout << "K=" << K << ", " << recs.size() << " feasible beta_f points\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_oracle_check(Session& s, int K, double beta_f, int resolution) {
    const int m = interior_count_for(beta_f, K);
    const GroupStatistics& mc = s.provider.get(K, m);
    const GroupStatistics oracle =
        quadrature_mu_oracle(s.grid, s.model, K, beta_f, s.cfg.min_dist_fraction, resolution);

    std::string csv = "cell_index,group,gamma,mu_mc,stderr_mc,mu_quadrature,abs_z\n";
    int total = 0, within = 0;
    auto check = [&](int l, const char* group, int gamma, double mu, double se, double q) {
        const double z = se > 0.0 ? std::abs(mu - q) / se : (mu == q ? 0.0 : 1e300);
        ++total;
        if (z <= 3.0) ++within;
        csv += std::to_string(l) + "," + group + "," + std::to_string(gamma) + "," + g17(mu) + "," +
               g17(se) + "," + g17(q) + "," + g17(z) + "\n";
    };
    for (int l = 0; l < mc.n_cells(); ++l) {
        if (m > 0) {
            check(l, "I", 1, mc.mu_I_1[l], mc.stderr_I_1[l], oracle.mu_I_1[l]);
            check(l, "I", 2, mc.mu_I_2[l], mc.stderr_I_2[l], oracle.mu_I_2[l]);
        }
        check(l, "E", 1, mc.mu_E_1[l], mc.stderr_E_1[l], oracle.mu_E_1[l]);
        check(l, "E", 2, mc.mu_E_2[l], mc.stderr_E_2[l], oracle.mu_E_2[l]);
    }
    const auto path = s.out_dir / "oracle_check.csv";
    write_file(path, csv);
    const double frac = static_cast<double>(within) / total;
    std::cout << within << "/" << total << " entries within 3 standard errors ("
              << g17(100.0 * frac) << "%)\n";
    std::cout << "wrote " << path.string() << "\n";
    return frac >= 0.95 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional pilot reuse simulator for multi-cell massive MIMO uplink"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::int64_t seed = -1, n_samples = -1;
    int threads = 0;
    app.add_option("--config", config_path, "scenario config file (key = value)");
    app.add_option("--seed", seed, "override RNG seed");
    app.add_option("--n-samples", n_samples, "override Monte-Carlo drop count");
    app.add_option("--threads", threads, "cap worker threads (results do not depend on it)");
    app.add_option("--out-dir", out_dir, "output directory for CSV files");

    int K = 0, N = 0, beta = 1, resolution = 0, profile_K = 0;
    double beta_f = 0.0;
    std::string comb = "mrc";

    auto* est = app.add_subcommand("estimate-mu", "estimate mu moments, cache and export CSV");
    est->add_option("--K", K, "users per cell")->required();
    est->add_option("--beta-f", beta_f, "fractional reuse factor")->required();

    auto* ev = app.add_subcommand("evaluate", "evaluate SE at one parameter point");
    ev->add_option("--N", N)->required();
    ev->add_option("--K", K)->required();
    ev->add_option("--beta", beta)->required();
    ev->add_option("--beta-f", beta_f)->required();
    ev->add_option("--combiner", comb)->check(CLI::IsMember({"mrc", "pzfc"}));

    auto* sw = app.add_subcommand("sweep", "optimal records per N for FPR and baseline");

    auto* tab = app.add_subcommand("reproduce-table1", "FPR gain table at N in {10,1e2,1e3,1e4}");

    auto* prof = app.add_subcommand("betaf-profile", "SE as a function of beta_f");
    prof->add_option("--N", N)->required();
    prof->add_option("--beta", beta)->required();
    prof->add_option("--combiner", comb)->check(CLI::IsMember({"mrc", "pzfc"}));
    prof->add_option("--K", profile_K, "fixed K (default: optimal K at this N)");

    auto* orc = app.add_subcommand("oracle-check", "compare Monte Carlo against quadrature");
    orc->add_option("--K", K)->required();
    orc->add_option("--beta-f", beta_f)->required();
    orc->add_option("--resolution", resolution, "quadrature grid resolution");

    CLI11_PARSE(app, argc, argv);

    try {
        ScenarioConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path, cfg);
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (n_samples >= 0) cfg.n_samples = static_cast<std::size_t>(n_samples);
        if (threads > 0) omp_set_num_threads(threads);
        if (resolution == 0) resolution = cfg.oracle_resolution;

        Session session(cfg, out_dir);
        if (est->parsed()) return cmd_estimate_mu(session, K, beta_f);
        if (ev->parsed()) return cmd_evaluate(session, N, K, beta, beta_f, comb);
        if (sw->parsed()) return cmd_sweep(session);
        if (tab->parsed()) return cmd_reproduce_table1(session);
        if (prof->parsed()) return cmd_betaf_profile(session, N, beta, comb, profile_K);
        if (orc->parsed()) return cmd_oracle_check(session, K, beta_f, resolution);
    } catch (const fpr::insufficient_antennas& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 2;
    } catch (const fpr::invalid_partition& e) {
        std::cerr << "invalid partition: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

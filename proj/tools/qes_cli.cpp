// Command-line front end: scenario configs in, reports and CSV files out.
//
// Subcommands:
//   swap          evaluate one channel pair and report branch outcomes
//   sweep         grid experiments over free Schmidt coefficients (CSV)
//   oracle-check  closed-form vs statevector verification (exit 1 on failure)

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qes/check.hpp"
#include "qes/config.hpp"
#include "qes/sweep.hpp"

namespace {

qes::SchmidtChannel channel_from_config(const qes::Config& cfg, bool renormalize) {
    int dim_a = static_cast<int>(cfg.get_int("channel.dim_a"));
    int dim_b = static_cast<int>(cfg.get_int("channel.dim_b"));
    std::vector<double> c = cfg.get_double_list("channel.c");
    std::vector<double> d = cfg.get_double_list("channel.d");
    return qes::make_channel(dim_a, dim_b, std::move(c), std::move(d), renormalize);
}

qes::PolicyObjective objective_from_name(const std::string& name) {
    if (name == "max-avg-e") return qes::PolicyObjective::MaxAvgE;
    if (name == "max-avg-f") return qes::PolicyObjective::MaxAvgF;
    if (name == "threshold-e") return qes::PolicyObjective::ThresholdE;
    if (name == "threshold-f") return qes::PolicyObjective::ThresholdF;
    throw qes::config_error("unknown objective '" + name + "'");
}

const char* strategy_name(qes::Strategy st) {
    switch (st) {
        case qes::Strategy::ME: return "me";
        case qes::Strategy::MC: return "mc";
        default: return "smc";
    }
}

struct SwapOptions {
    std::string config_path;
    std::string out_dir;
    std::string strategy = "all";
    std::string beta_max = "1";
    std::optional<double> threshold_e;
    std::optional<double> threshold_f;
    bool renormalize = false;
};

int cmd_swap(const SwapOptions& opt) {
    qes::Config cfg = qes::Config::parse_file(opt.config_path);
    bool renorm = opt.renormalize || cfg.get_bool("swap.renormalize", false);
    qes::SchmidtChannel ch = channel_from_config(cfg, renorm);
    if (cfg.get_bool("swap.reduce_effective", false)) ch = qes::effective_channel(ch);

    std::string strategy = cfg.has("swap.strategy") && opt.strategy == "all"
                               ? cfg.get_string("swap.strategy")
                               : opt.strategy;
    std::string beta_spec = cfg.has("swap.beta_max") && opt.beta_max == "1"
                                ? cfg.get_string("swap.beta_max")
                                : opt.beta_max;
    std::string objective_name = cfg.get_string("swap.objective", "max-avg-f");
    double threshold = cfg.get_double("swap.threshold", 0.0);
    if (opt.threshold_e) {
        objective_name = "threshold-e";
        threshold = *opt.threshold_e;
    }
    if (opt.threshold_f) {
        objective_name = "threshold-f";
        threshold = *opt.threshold_f;
    }
    cfg.reject_unknown_keys();

    qes::StagePolicy policy;
    if (strategy == "me") {
        policy.beta_max.assign(ch.dim_b, 0);
    } else if (strategy == "mc") {
        policy = qes::fixed_stage_policy(ch, 1);
    } else if (strategy == "smc" || strategy == "all") {
        if (beta_spec == "adaptive")
            policy = qes::adaptive_stage_policy(ch, objective_from_name(objective_name), threshold);
        else
            policy = qes::fixed_stage_policy(ch, static_cast<int>(std::stoll(beta_spec)));
    } else {
        throw qes::config_error("unknown strategy '" + strategy + "'");
    }

    // per-set summary
    std::printf("channel: D_A=%d D_B=%d\n", ch.dim_a, ch.dim_b);
    std::printf("%3s %10s %4s %4s %9s %9s %9s %9s %9s %6s\n", "s", "p_s", "N_s", "n_s",
                "E_ME", "F_ME", "E_MC", "F_MC", "p_succ1", "beta_M");
    for (const qes::SetProfile& prof : qes::all_set_profiles(ch)) {
        qes::SwapOutcome me = qes::me_swap(ch, prof.s, 0);
        qes::SwapOutcome mc = qes::mc_swap(ch, prof.s, 0);
        std::printf("%3d %10.6f %4d %4d %9.6f %9.6f %9.6f %9.6f %9.6f %6d\n", prof.s, prof.p,
                    prof.support_size, prof.distinct_values, me.entanglement, me.fidelity,
                    mc.entanglement, mc.fidelity, qes::initial_stage(prof).p_succ_next,
                    policy.beta_max[prof.s]);
    }

    auto [e_me, f_me] = qes::average_me(ch);
    std::printf("\naverages (ME):  E=%.9f F=%.9f\n", e_me, f_me);
    if (strategy != "me") {
        auto [e_smc, f_smc] = qes::average_smc(ch, policy);
        auto [e_ps, f_ps, p_tot] = qes::postselected_average(ch, policy);
        std::printf("averages (SMC): E=%.9f F=%.9f\n", e_smc, f_smc);
        std::printf("postselected:   E=%.9f F=%.9f p_success=%.9f\n", e_ps, f_ps, p_tot);
    }

    std::vector<qes::SwapOutcome> branches = qes::enumerate_branches(ch, policy);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!opt.out_dir.empty()) {
        std::filesystem::create_directories(opt.out_dir);
        file.open(std::filesystem::path(opt.out_dir) / "branches.csv");
        os = &file;
    } else {
        std::printf("\nbranches:\n");
    }
    *os << "s,m,strategy,beta,success,probability,E,F\n";
    for (const qes::SwapOutcome& b : branches) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%d,%d,%s,%d,%d,%.12g,%.12g,%.12g\n", b.s, b.m,
                      strategy_name(b.strategy), b.beta_used, b.success ? 1 : 0,
                      b.branch_probability, b.entanglement, b.fidelity);
        *os << buf;
    }
    return 0;
}

qes::SweepConfig sweep_from_config(const qes::Config& cfg, int grid_override) {
    qes::SweepConfig sw = qes::reference_sweep_config();
    if (cfg.has("sweep.c") || cfg.has("sweep.d")) {
        auto parse_spec = [&](const std::string& key) {
            qes::CoefficientSpec spec;
            spec.free_index = -1;
            std::vector<std::string> items = cfg.get_list(key);
            spec.fixed.assign(items.size(), 0.0);
            for (int i = 0; i < static_cast<int>(items.size()); ++i) {
                if (items[i] == "free")
                    spec.free_index = i;
                else if (items[i] == "norm")
                    spec.norm_index = i;
                else {
                    try {
                        spec.fixed[i] = std::stod(items[i]);
                    } catch (const std::exception&) {
                        throw qes::config_error(key + ": entry '" + items[i] +
                                                "' is not a number, 'free', or 'norm'");
                    }
                }
            }
            if (spec.free_index < 0 || spec.norm_index < 0)
                throw qes::config_error(key + ": need one 'free' and one 'norm' entry");
            return spec;
        };
        sw.c = parse_spec("sweep.c");
        sw.d = parse_spec("sweep.d");
        sw.dim_a = static_cast<int>(cfg.get_int("sweep.dim_a", sw.c.fixed.size()));
        sw.dim_b = static_cast<int>(cfg.get_int("sweep.dim_b", sw.d.fixed.size()));
    } else {
        cfg.get_int("sweep.dim_a", 4);
        cfg.get_int("sweep.dim_b", 5);
    }
    sw.grid_points = static_cast<int>(cfg.get_int("sweep.grid", 101));
    if (grid_override > 0) sw.grid_points = grid_override;
    sw.c0_min = cfg.get_double("sweep.c0_min", 0.0);
    sw.c0_max = cfg.get_double("sweep.c0_max", -1.0);
    sw.d0_min = cfg.get_double("sweep.d0_min", 0.0);
    sw.d0_max = cfg.get_double("sweep.d0_max", -1.0);
    if (cfg.has("sweep.stage_caps")) {
        sw.stage_caps.clear();
        for (double v : cfg.get_double_list("sweep.stage_caps"))
            sw.stage_caps.push_back(static_cast<int>(v));
    }
    return sw;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir, int grid_override) {
    std::istringstream empty;
    qes::Config cfg =
        config_path.empty() ? qes::Config::parse(empty) : qes::Config::parse_file(config_path);
    std::vector<std::string> modes{"surfaces", "enhancement", "averages-fixed",
                                   "averages-adaptive", "averages-postselected"};
    if (cfg.has("sweep.modes")) modes = cfg.get_list("sweep.modes");
    qes::SweepConfig sw = sweep_from_config(cfg, grid_override);
    cfg.reject_unknown_keys();

    std::filesystem::create_directories(out_dir);
    auto emit = [&](const std::string& name, const std::vector<qes::SweepRecord>& records) {
        std::ofstream out(std::filesystem::path(out_dir) / (name + ".csv"));
        qes::write_csv(out, records);
        std::fprintf(stderr, "wrote %s.csv (%zu rows)\n", name.c_str(), records.size());
    };
    for (const std::string& mode : modes) {
        if (mode == "surfaces")
            emit("surfaces", qes::surface_figures(sw));
        else if (mode == "enhancement")
            emit("enhancement", qes::enhancement_probability_map(sw));
        else if (mode == "averages-fixed")
            emit("averages_fixed", qes::averages_map(sw, qes::SweepMode::AveragesFixed));
        else if (mode == "averages-adaptive")
            emit("averages_adaptive", qes::averages_map(sw, qes::SweepMode::AveragesAdaptive));
        else if (mode == "averages-postselected")
            emit("averages_postselected",
                 qes::averages_map(sw, qes::SweepMode::AveragesPostselected));
        else
            throw qes::config_error("unknown sweep mode '" + mode + "'");
    }
    return 0;
}

int cmd_oracle_check(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                     double tol_override) {
    qes::CheckOptions opt;
    if (!config_path.empty()) {
        qes::Config cfg = qes::Config::parse_file(config_path);
        opt.channels = static_cast<int>(cfg.get_int("check.channels", opt.channels));
        opt.seed = static_cast<std::uint64_t>(cfg.get_int("check.seed", opt.seed));
        opt.tolerance = cfg.get_double("check.tolerance", opt.tolerance);
        opt.max_dim_a = static_cast<int>(cfg.get_int("check.max_dim_a", opt.max_dim_a));
        opt.max_dim_b = static_cast<int>(cfg.get_int("check.max_dim_b", opt.max_dim_b));
        opt.corrupt_recursion = cfg.get_bool("check.corrupt_recursion", false);
        cfg.reject_unknown_keys();
    }
    if (has_seed) opt.seed = seed_override;
    if (tol_override > 0.0) opt.tolerance = tol_override;

    qes::CheckReport report = qes::run_oracle_check(opt);
    std::printf("oracle check: %d channels, seed %llu, tolerance %g\n", opt.channels,
                static_cast<unsigned long long>(opt.seed), opt.tolerance);
    for (const auto& item : report.items)
        std::printf("%-32s max deviation %.3e  %s\n", item.quantity.c_str(), item.max_deviation,
                    item.pass ? "pass" : "FAIL");
    std::printf("overall: %s\n", report.pass ? "pass" : "FAIL");
    return report.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglement swapping of partially entangled qudit pairs"};
    app.require_subcommand(1);

    SwapOptions swap_opt;
    auto* swap = app.add_subcommand("swap", "evaluate one channel pair");
    swap->add_option("--config", swap_opt.config_path, "scenario config file")->required();
    swap->add_option("--out", swap_opt.out_dir, "output directory for branches.csv");
    swap->add_option("--strategy", swap_opt.strategy, "me|mc|smc|all");
    swap->add_option("--beta-max", swap_opt.beta_max, "stage count or 'adaptive'");
    double thr_e = -1.0, thr_f = -1.0;
    swap->add_option("--threshold-e", thr_e, "entanglement threshold policy");
    swap->add_option("--threshold-f", thr_f, "fidelity threshold policy");
    swap->add_flag("--renormalize", swap_opt.renormalize, "rescale near-normalized inputs");

    std::string sweep_config, sweep_out = "sweep-out";
    int grid = 0;
    auto* sweep = app.add_subcommand("sweep", "grid experiments (CSV out)");
    sweep->add_option("--config", sweep_config, "sweep config file");
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--grid", grid, "grid points per axis");

    std::string check_config;
    std::uint64_t seed = 0;
    double check_tol = -1.0;
    auto* check = app.add_subcommand("oracle-check", "closed form vs statevector oracle");
    check->add_option("--config", check_config, "check config file");
    auto* seed_opt = check->add_option("--seed", seed, "RNG seed");
    check->add_option("--tolerance", check_tol, "deviation tolerance");

    try {
        app.parse(argc, argv);
        if (swap->parsed()) {
            if (thr_e >= 0.0) swap_opt.threshold_e = thr_e;
            if (thr_f >= 0.0) swap_opt.threshold_f = thr_f;
            return cmd_swap(swap_opt);
        }
        if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, grid);
        return cmd_oracle_check(check_config, seed, seed_opt->count() > 0, check_tol);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const qes::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const qes::validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qes/protocol.hpp"

namespace qes {

/// One free coefficient scanned over a grid; one coefficient fixed by
/// normalization; the rest pinned.
struct CoefficientSpec {
    std::vector<double> fixed;   // full length; entries at free/norm ignored
    int free_index = 0;
    int norm_index = -1;

    double fixed_square_sum() const {
        double s = 0.0;
        for (int i = 0; i < static_cast<int>(fixed.size()); ++i) {
            if (i == free_index || i == norm_index) continue;
            s += fixed[i] * fixed[i];
        }
        return s;
    }
    double feasible_max() const {
        return std::sqrt(std::max(0.0, 1.0 - fixed_square_sum()));
    }
};

enum class SweepMode { Surfaces, Enhancement, AveragesFixed, AveragesAdaptive, AveragesPostselected };

struct SweepConfig {
    int dim_a = 4;
    int dim_b = 5;
    CoefficientSpec c;
    CoefficientSpec d;
    int grid_points = 101;
    double c0_min = 0.0;
    double c0_max = -1.0;    // < 0: use feasible max
    double d0_min = 0.0;
    double d0_max = -1.0;
    std::vector<int> stage_caps{1, 2, 3};
};

/// The coefficient set of the paper's numerical study: D_A = 4, D_B = 5,
/// c1 = 0.2811, c2 = 0.3790, d1 = 0.3220, d2 = 0.2064, d3 = 0, with c0 and d0
/// free and c3, d4 fixed by normalization.
inline SweepConfig reference_sweep_config() {
    SweepConfig cfg;
    cfg.c.fixed = {0.0, 0.2811, 0.3790, 0.0};
    cfg.c.free_index = 0;
    cfg.c.norm_index = 3;
    cfg.d.fixed = {0.0, 0.3220, 0.2064, 0.0, 0.0};
    cfg.d.free_index = 0;
    cfg.d.norm_index = 4;
    return cfg;
}

/// Long-format output row; unset fields stay empty in the CSV.
struct SweepRecord {
    double c0 = 0.0;
    double d0 = 0.0;
    std::string s;          // outcome index or "avg"
    std::string strategy;
    int beta = 0;
    std::optional<double> e;
    std::optional<double> f;
    std::optional<double> p_succ_cumulative;
    std::optional<double> e_avg;
    std::optional<double> f_avg;
    std::optional<double> e_avg_postselected;
    std::optional<double> f_avg_postselected;
};

namespace detail {

inline std::optional<SchmidtChannel> channel_at(const SweepConfig& cfg, double c0, double d0) {
    auto build = [](const CoefficientSpec& spec, double v) -> std::optional<std::vector<double>> {
        std::vector<double> out = spec.fixed;
        out[spec.free_index] = v;
        double rem = 1.0;
        for (int i = 0; i < static_cast<int>(out.size()); ++i)
            if (i != spec.norm_index) rem -= out[i] * out[i];
        if (rem < -1e-12) return std::nullopt;    // infeasible point
        out[spec.norm_index] = std::sqrt(std::max(0.0, rem));
        return out;
    };
    auto c = build(cfg.c, c0);
    auto d = build(cfg.d, d0);
    if (!c || !d) return std::nullopt;
    return make_channel(cfg.dim_a, cfg.dim_b, std::move(*c), std::move(*d));
}

inline std::vector<double> grid_values(double lo, double hi, int points) {
    std::vector<double> v(points);
    for (int i = 0; i < points; ++i)
        v[i] = points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    return v;
}

inline SweepRecord skip_record(double c0, double d0) {
    SweepRecord rec;
    rec.c0 = c0;
    rec.d0 = d0;
    rec.strategy = "infeasible";
    return rec;
}

template <typename Fn>
void for_each_grid_point(const SweepConfig& cfg, std::vector<SweepRecord>& records, Fn&& fn) {
    double c_hi = cfg.c0_max >= 0.0 ? cfg.c0_max : cfg.c.feasible_max();
    double d_hi = cfg.d0_max >= 0.0 ? cfg.d0_max : cfg.d.feasible_max();
    for (double c0 : grid_values(cfg.c0_min, c_hi, cfg.grid_points))
        for (double d0 : grid_values(cfg.d0_min, d_hi, cfg.grid_points)) {
            std::optional<SchmidtChannel> ch = channel_at(cfg, c0, d0);
            if (!ch) {
                records.push_back(skip_record(c0, d0));
                continue;
            }
            fn(c0, d0, *ch);
        }
}

} // namespace detail

/// Per grid point and per s: the ME surface values and the MC plane values.
inline std::vector<SweepRecord> surface_figures(const SweepConfig& cfg) {
    std::vector<SweepRecord> records;
    detail::for_each_grid_point(cfg, records, [&](double c0, double d0, const SchmidtChannel& ch) {
        for (const SetProfile& prof : all_set_profiles(ch)) {
            SwapOutcome me = me_swap(ch, prof.s, 0);
            SwapOutcome mc = mc_swap(ch, prof.s, 0);
            SweepRecord r;
            r.c0 = c0;
            r.d0 = d0;
            r.s = std::to_string(prof.s);
            r.strategy = "me";
            r.e = me.entanglement;
            r.f = me.fidelity;
            records.push_back(r);
            r.strategy = "mc";
            r.beta = 1;
            r.e = mc.entanglement;
            r.f = mc.fidelity;
            records.push_back(r);
        }
    });
    return records;
}

/// Per grid point and stage cap: the total probability of swapping with
/// strictly higher entanglement (strategy "enhance-e") or fidelity
/// ("enhance-f") than the deterministic protocol yields.
inline std::vector<SweepRecord> enhancement_probability_map(const SweepConfig& cfg) {
    std::vector<SweepRecord> records;
    detail::for_each_grid_point(cfg, records, [&](double c0, double d0, const SchmidtChannel& ch) {
        for (int cap : cfg.stage_caps) {
            double pe = 0.0, pf = 0.0;
            for (const SetProfile& prof : all_set_profiles(ch)) {
                double e_me = detail::me_entanglement(prof.gamma);
                double f_me = detail::me_fidelity(prof.gamma);
                int hi = std::min(cap, allowed_stages(prof));
                SmcLadder ladder = smc_ladder(prof, hi);
                // qualifying stages form a prefix: stage figures decrease
                int be = 0, bf = 0;
                for (std::size_t b = 0; b < ladder.p_succ.size(); ++b) {
                    int n_prev = ladder.stages[b].support_size;
                    if (detail::stage_entanglement(ch.dim_a, n_prev) > e_me + 1e-12)
                        be = static_cast<int>(b) + 1;
                    if (detail::stage_fidelity(ch.dim_a, n_prev) > f_me + 1e-12)
                        bf = static_cast<int>(b) + 1;
                }
                if (be > 0) pe += prof.p * smc_cumulative_success(ladder.p_succ, be);
                if (bf > 0) pf += prof.p * smc_cumulative_success(ladder.p_succ, bf);
            }
            SweepRecord r;
            r.c0 = c0;
            r.d0 = d0;
            r.s = "avg";
            r.beta = cap;
            r.strategy = "enhance-e";
            r.p_succ_cumulative = pe;
            records.push_back(r);
            r.strategy = "enhance-f";
            r.p_succ_cumulative = pf;
            records.push_back(r);
        }
    });
    return records;
}

/// Per grid point: the ME reference averages plus the SMC averages per stage
/// cap, in the requested mode. Adaptive and postselected rows carry the
/// objective in the strategy name; each figure column is read from the rows
/// whose policy optimizes it.
inline std::vector<SweepRecord> averages_map(const SweepConfig& cfg, SweepMode mode) {
    std::vector<SweepRecord> records;
    detail::for_each_grid_point(cfg, records, [&](double c0, double d0, const SchmidtChannel& ch) {
        auto [e_me, f_me] = average_me(ch);
        SweepRecord base;
        base.c0 = c0;
        base.d0 = d0;
        base.s = "avg";
        base.strategy = "me";
        base.e_avg = e_me;
        base.f_avg = f_me;
        records.push_back(base);

        for (int cap : cfg.stage_caps) {
            if (mode == SweepMode::AveragesFixed) {
                auto [e, f] = average_smc(ch, fixed_stage_policy(ch, cap));
                SweepRecord r = base;
                r.strategy = "smc-fixed";
                r.beta = cap;
                r.e_avg = e;
                r.f_avg = f;
                records.push_back(r);
            } else if (mode == SweepMode::AveragesAdaptive) {
                StagePolicy pe = adaptive_stage_policy(ch, PolicyObjective::MaxAvgE, 0.0, cap, false);
                StagePolicy pf = adaptive_stage_policy(ch, PolicyObjective::MaxAvgF, 0.0, cap, false);
                auto [ee, fe] = average_smc(ch, pe);
                auto [ef, ff] = average_smc(ch, pf);
                SweepRecord r = base;
                r.strategy = "smc-adaptive-maxe";
                r.beta = cap;
                r.e_avg = ee;
                r.f_avg = fe;
                records.push_back(r);
                r.strategy = "smc-adaptive-maxf";
                r.e_avg = ef;
                r.f_avg = ff;
                records.push_back(r);
            } else if (mode == SweepMode::AveragesPostselected) {
                StagePolicy pe = adaptive_stage_policy(ch, PolicyObjective::MaxAvgE, 0.0, cap, false);
                StagePolicy pf = adaptive_stage_policy(ch, PolicyObjective::MaxAvgF, 0.0, cap, false);
                auto [ee, fe, pte] = postselected_average(ch, pe);
                auto [ef, ff, ptf] = postselected_average(ch, pf);
                SweepRecord r = base;
                r.e_avg.reset();
                r.f_avg.reset();
                r.beta = cap;
                r.strategy = "smc-post-maxe";
                r.e_avg_postselected = ee;
                r.f_avg_postselected = fe;
                r.p_succ_cumulative = pte;
                records.push_back(r);
                r.strategy = "smc-post-maxf";
                r.e_avg_postselected = ef;
                r.f_avg_postselected = ff;
                r.p_succ_cumulative = ptf;
                records.push_back(r);
            }
        }
    });
    return records;
}

inline void write_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
    auto cell = [](std::optional<double> v) {
        if (!v) return std::string();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", *v);
        return std::string(buf);
    };
    os << "c0,d0,s,strategy,beta,E,F,p_succ_cumulative,E_avg,F_avg,"
          "E_avg_postselected,F_avg_postselected\n";
    for (const SweepRecord& r : records) {
        os << cell(r.c0) << ',' << cell(r.d0) << ',' << r.s << ',' << r.strategy << ','
           << r.beta << ',' << cell(r.e) << ',' << cell(r.f) << ',' << cell(r.p_succ_cumulative)
           << ',' << cell(r.e_avg) << ',' << cell(r.f_avg) << ',' << cell(r.e_avg_postselected)
           << ',' << cell(r.f_avg_postselected) << '\n';
    }
}

} // namespace qes

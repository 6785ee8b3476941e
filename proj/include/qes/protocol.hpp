#pragma once

#include <cmath>
#include <tuple>
#include <vector>

#include "qes/discrimination.hpp"

namespace qes {

enum class Strategy { ME, MC, SMC };

/// One branch of the protocol. state_coeffs are the amplitudes over the
/// generalized Bell basis {|Psi_ls>, l = 0..D_A-1} at the branch's s.
struct SwapOutcome {
    Strategy strategy = Strategy::ME;
    int s = 0;
    int m = 0;
    int beta_used = 0;
    bool success = true;
    double branch_probability = 0.0;
    Vector state_coeffs;
    double entanglement = 0.0;
    double fidelity = 0.0;
};

/// Per-s maximum stage counts and how they were chosen.
struct StagePolicy {
    enum class Mode { Fixed, Adaptive, Threshold };
    Mode mode = Mode::Fixed;
    std::vector<int> beta_max;   // indexed by s; ignored where p_s = 0
};

enum class PolicyObjective { MaxAvgE, MaxAvgF, ThresholdE, ThresholdF };

namespace detail {

inline double me_entanglement(const std::vector<double>& gamma) {
    double dim = static_cast<double>(gamma.size());
    double quartic = 0.0;
    for (double g : gamma) quartic += g * g * g * g;
    return dim / (dim - 1.0) * (1.0 - quartic);
}

inline double me_fidelity(const std::vector<double>& gamma) {
    double sum = 0.0;
    for (double g : gamma) sum += g;
    return sum * sum / static_cast<double>(gamma.size());
}

inline double stage_entanglement(int dim, int support_size) {
    if (support_size <= 1) return 0.0;
    return static_cast<double>(dim) / (dim - 1.0) * (1.0 - 1.0 / support_size);
}

inline double stage_fidelity(int dim, int support_size) {
    return static_cast<double>(support_size) / dim;
}

/// Coefficients over the Psi_ls basis of the post-ME state when system 2
/// carried coefficients `coeffs` (Gamma or the uniform y/sqrt(N) profile).
inline Vector bell_basis_coeffs(const std::vector<double>& coeffs, int m) {
    int dim = static_cast<int>(coeffs.size());
    Vector a(dim);
    double norm = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int l = 0; l < dim; ++l) {
        Complex sum = 0.0;
        for (int n = 0; n < dim; ++n)
            sum += coeffs[n] * root_of_unity(dim, static_cast<long long>(n) * (l - m));
        a[l] = norm * sum;
    }
    return a;
}

inline void check_m(int m, int dim) {
    if (m < 0 || m >= dim)
        throw index_out_of_range_error("measurement outcome m out of range");
}

} // namespace detail

/// Entanglement of a state written in the Psi_ls basis, from the Schmidt
/// coefficients of its (1,4) split.
inline double entanglement_of_coeffs(const Vector& a) {
    int dim = static_cast<int>(a.size());
    double quartic = 0.0;
    for (int q = 0; q < dim; ++q) {
        Complex b = 0.0;
        for (int l = 0; l < dim; ++l)
            b += a[l] * root_of_unity(dim, -static_cast<long long>(q) * l);
        quartic += std::norm(b) * std::norm(b) / (dim * dim);
    }
    return dim / (dim - 1.0) * (1.0 - quartic);
}

/// Deterministic branch: inverse Fourier + projective measurement on system 2.
inline SwapOutcome me_swap(const SchmidtChannel& ch, int s, int m) {
    SetProfile prof = set_profile(ch, s);
    detail::check_m(m, ch.dim_a);
    SwapOutcome out;
    out.strategy = Strategy::ME;
    out.s = s;
    out.m = m;
    out.beta_used = 0;
    out.success = true;
    out.branch_probability = prof.p / ch.dim_a;
    out.state_coeffs = detail::bell_basis_coeffs(prof.gamma, m);
    out.entanglement = detail::me_entanglement(prof.gamma);
    out.fidelity = detail::me_fidelity(prof.gamma);
    return out;
}

/// Conclusive branch of the beta-th MC stage.
inline SwapOutcome smc_swap(const SchmidtChannel& ch, int s, int m, int beta) {
    SetProfile prof = set_profile(ch, s);
    detail::check_m(m, ch.dim_a);
    if (beta < 1 || beta > allowed_stages(prof))
        throw exhausted_stages_error("requested MC stage does not exist for this set");
    SmcLadder ladder = smc_ladder(prof, beta);
    const SmcStage& prev = ladder.stages[beta - 1];

    SwapOutcome out;
    out.strategy = beta == 1 ? Strategy::MC : Strategy::SMC;
    out.s = s;
    out.m = m;
    out.beta_used = beta;
    out.success = true;
    double fail = 1.0;
    for (int b = 0; b + 1 < beta; ++b) fail *= 1.0 - ladder.p_succ[b];
    out.branch_probability = prof.p * fail * prev.p_succ_next / ch.dim_a;

    std::vector<double> uniform(prev.gamma.size(), 0.0);
    double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(prev.support_size));
    for (std::size_t q = 0; q < uniform.size(); ++q)
        if (prev.support[q]) uniform[q] = inv_sqrt_n;
    out.state_coeffs = detail::bell_basis_coeffs(uniform, m);
    out.entanglement = detail::stage_entanglement(ch.dim_a, prev.support_size);
    out.fidelity = detail::stage_fidelity(ch.dim_a, prev.support_size);
    return out;
}

/// Single-stage MC branch (beta = 1).
inline SwapOutcome mc_swap(const SchmidtChannel& ch, int s, int m) {
    return smc_swap(ch, s, m, 1);
}

/// ME applied to the residual states after beta_max failed MC stages.
inline SwapOutcome failed_terminal_me(const SchmidtChannel& ch, int s, int m, int beta_max) {
    if (beta_max == 0) return me_swap(ch, s, m);
    SetProfile prof = set_profile(ch, s);
    detail::check_m(m, ch.dim_a);
    SmcLadder ladder = smc_ladder(prof, beta_max);
    if (!ladder.has_residual(beta_max))
        throw exhausted_stages_error("failure through all stages has zero probability");
    const SmcStage& residual = ladder.stages[beta_max];

    SwapOutcome out;
    out.strategy = Strategy::SMC;
    out.s = s;
    out.m = m;
    out.beta_used = beta_max;
    out.success = false;
    double fail = 1.0;
    for (double p : ladder.p_succ) fail *= 1.0 - p;
    out.branch_probability = prof.p * fail / ch.dim_a;
    out.state_coeffs = detail::bell_basis_coeffs(residual.gamma, m);
    out.entanglement = detail::me_entanglement(residual.gamma);
    out.fidelity = detail::me_fidelity(residual.gamma);
    return out;
}

/// Applies Z_1^m X_4^s, re-expressing the branch so its fidelity target is
/// |Psi_00>. Local unitaries: entanglement and fidelity are unchanged.
inline SwapOutcome local_correction(const SwapOutcome& outcome) {
    int dim = static_cast<int>(outcome.state_coeffs.size());
    SwapOutcome corrected = outcome;
    corrected.s = 0;
    corrected.m = 0;
    for (int l = 0; l < dim; ++l)
        corrected.state_coeffs[l] = outcome.state_coeffs[(l + outcome.m) % dim];
    return corrected;
}

/// Averages of the deterministic protocol over all (m, s).
inline std::pair<double, double> average_me(const SchmidtChannel& ch) {
    double quartic = 0.0;
    double fid = 0.0;
    for (const SetProfile& prof : all_set_profiles(ch)) {
        double q4 = 0.0, sum = 0.0;
        for (double g : prof.gamma) {
            q4 += g * g * g * g;
            sum += g;
        }
        quartic += prof.p * q4;
        fid += prof.p * sum * sum;
    }
    double dim = static_cast<double>(ch.dim_a);
    return {dim / (dim - 1.0) * (1.0 - quartic), fid / dim};
}

inline void validate_policy(const SchmidtChannel& ch, const StagePolicy& policy) {
    if (static_cast<int>(policy.beta_max.size()) != ch.dim_b)
        throw invalid_policy_error("policy must give a stage count for every s");
    for (const SetProfile& prof : all_set_profiles(ch)) {
        int bm = policy.beta_max[prof.s];
        if (bm < 0 || bm > allowed_stages(prof))
            throw invalid_policy_error("stage count out of range for set " + std::to_string(prof.s));
    }
}

/// Averaged figures over the whole SMC strategy tree, including the final
/// failed-attempt ME term.
inline std::pair<double, double> average_smc(const SchmidtChannel& ch, const StagePolicy& policy) {
    validate_policy(ch, policy);
    double e_avg = 0.0, f_avg = 0.0;
    for (const SetProfile& prof : all_set_profiles(ch)) {
        int bm = policy.beta_max[prof.s];
        if (bm == 0) {
            e_avg += prof.p * detail::me_entanglement(prof.gamma);
            f_avg += prof.p * detail::me_fidelity(prof.gamma);
            continue;
        }
        SmcLadder ladder = smc_ladder(prof, bm);
        double fail = 1.0;
        for (std::size_t b = 0; b < ladder.p_succ.size(); ++b) {
            const SmcStage& prev = ladder.stages[b];
            double w = fail * ladder.p_succ[b];
            e_avg += prof.p * w * detail::stage_entanglement(ch.dim_a, prev.support_size);
            f_avg += prof.p * w * detail::stage_fidelity(ch.dim_a, prev.support_size);
            fail *= 1.0 - ladder.p_succ[b];
        }
        if (fail > 0.0 && ladder.has_residual(bm)) {
            const SmcStage& residual = ladder.stages[bm];
            e_avg += prof.p * fail * detail::me_entanglement(residual.gamma);
            f_avg += prof.p * fail * detail::me_fidelity(residual.gamma);
        }
    }
    return {e_avg, f_avg};
}

/// Conditional averages over conclusive branches only, plus the total success
/// probability. The failed-terminal ME term is excluded by construction.
inline std::tuple<double, double, double>
postselected_average(const SchmidtChannel& ch, const StagePolicy& policy) {
    validate_policy(ch, policy);
    double e_num = 0.0, f_num = 0.0, p_total = 0.0;
    for (const SetProfile& prof : all_set_profiles(ch)) {
        int bm = policy.beta_max[prof.s];
        if (bm == 0) {
            // deterministic ME counts as conclusive
            e_num += prof.p * detail::me_entanglement(prof.gamma);
            f_num += prof.p * detail::me_fidelity(prof.gamma);
            p_total += prof.p;
            continue;
        }
        SmcLadder ladder = smc_ladder(prof, bm);
        double fail = 1.0;
        for (std::size_t b = 0; b < ladder.p_succ.size(); ++b) {
            const SmcStage& prev = ladder.stages[b];
            double w = fail * ladder.p_succ[b];
            e_num += prof.p * w * detail::stage_entanglement(ch.dim_a, prev.support_size);
            f_num += prof.p * w * detail::stage_fidelity(ch.dim_a, prev.support_size);
            p_total += prof.p * w;
            fail *= 1.0 - ladder.p_succ[b];
        }
    }
    if (p_total <= 0.0)
        throw zero_success_probability_error("no conclusive branch has nonzero probability");
    return {e_num / p_total, f_num / p_total, p_total};
}

/// Chooses beta_max per s by exhaustive search. max_beta_cap < 0 means no cap.
/// allow_me = false restricts the search to at least one MC stage (the SMC
/// grid maps of the averaged figures use this; plain ME is average-optimal,
/// so an unrestricted search would collapse onto it).
inline StagePolicy adaptive_stage_policy(const SchmidtChannel& ch, PolicyObjective objective,
                                         double threshold = 0.0, int max_beta_cap = -1,
                                         bool allow_me = true) {
    StagePolicy policy;
    policy.mode = (objective == PolicyObjective::ThresholdE || objective == PolicyObjective::ThresholdF)
                      ? StagePolicy::Mode::Threshold
                      : StagePolicy::Mode::Adaptive;
    policy.beta_max.assign(ch.dim_b, 0);

    for (const SetProfile& prof : all_set_profiles(ch)) {
        int hi = allowed_stages(prof);
        if (max_beta_cap >= 0) hi = std::min(hi, max_beta_cap);

        if (policy.mode == StagePolicy::Mode::Threshold) {
            // stage figures are non-increasing in beta; take the deepest
            // stage still meeting the threshold (ties meet it)
            SmcLadder ladder = smc_ladder(prof, hi);
            int best = 0;
            for (std::size_t b = 0; b < ladder.p_succ.size(); ++b) {
                int n_prev = ladder.stages[b].support_size;
                double fig = objective == PolicyObjective::ThresholdE
                                 ? detail::stage_entanglement(ch.dim_a, n_prev)
                                 : detail::stage_fidelity(ch.dim_a, n_prev);
                if (fig >= threshold - 1e-12) best = static_cast<int>(b) + 1;
            }
            policy.beta_max[prof.s] = best;
            continue;
        }

        int best_bm = allow_me ? 0 : 1;
        double best_val = -1.0;
        for (int bm = allow_me ? 0 : 1; bm <= hi; ++bm) {
            StagePolicy trial;
            trial.beta_max.assign(ch.dim_b, 0);
            trial.beta_max[prof.s] = bm;
            // only this set's contribution varies; evaluate it in isolation
            double e = 0.0, f = 0.0;
            if (bm == 0) {
                e = detail::me_entanglement(prof.gamma);
                f = detail::me_fidelity(prof.gamma);
            } else {
                SmcLadder ladder = smc_ladder(prof, bm);
                double fail = 1.0;
                for (std::size_t b = 0; b < ladder.p_succ.size(); ++b) {
                    int n_prev = ladder.stages[b].support_size;
                    e += fail * ladder.p_succ[b] * detail::stage_entanglement(ch.dim_a, n_prev);
                    f += fail * ladder.p_succ[b] * detail::stage_fidelity(ch.dim_a, n_prev);
                    fail *= 1.0 - ladder.p_succ[b];
                }
                if (fail > 0.0 && ladder.has_residual(bm)) {
                    e += fail * detail::me_entanglement(ladder.stages[bm].gamma);
                    f += fail * detail::me_fidelity(ladder.stages[bm].gamma);
                }
            }
            double val = objective == PolicyObjective::MaxAvgE ? e : f;
            // ties: prefer running at least one MC stage, then fewer stages
            bool better = val > best_val + 1e-12 ||
                          (val > best_val - 1e-12 && best_bm == 0 && bm >= 1);
            if (better) {
                best_val = val;
                best_bm = bm;
            }
        }
        policy.beta_max[prof.s] = best_bm;
    }
    return policy;
}

/// Fixed stage count clamped per set to the number of existing stages.
inline StagePolicy fixed_stage_policy(const SchmidtChannel& ch, int beta_max) {
    StagePolicy policy;
    policy.mode = StagePolicy::Mode::Fixed;
    policy.beta_max.assign(ch.dim_b, 0);
    for (const SetProfile& prof : all_set_profiles(ch))
        policy.beta_max[prof.s] = std::min(beta_max, allowed_stages(prof));
    return policy;
}

/// Every branch of the strategy tree for a channel under a policy. Branch
/// probabilities sum to 1.
inline std::vector<SwapOutcome> enumerate_branches(const SchmidtChannel& ch,
                                                   const StagePolicy& policy) {
    validate_policy(ch, policy);
    std::vector<SwapOutcome> out;
    for (const SetProfile& prof : all_set_profiles(ch)) {
        int bm = policy.beta_max[prof.s];
        for (int m = 0; m < ch.dim_a; ++m) {
            if (bm == 0) {
                out.push_back(me_swap(ch, prof.s, m));
                continue;
            }
            SmcLadder ladder = smc_ladder(prof, bm);
            for (std::size_t b = 0; b < ladder.p_succ.size(); ++b)
                out.push_back(smc_swap(ch, prof.s, m, static_cast<int>(b) + 1));
            if (ladder.has_residual(bm))
                out.push_back(failed_terminal_me(ch, prof.s, m, bm));
        }
    }
    return out;
}

} // namespace qes

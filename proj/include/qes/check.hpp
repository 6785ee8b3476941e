#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qes/oracle.hpp"

namespace qes {

struct CheckOptions {
    int channels = 100;
    std::uint64_t seed = 42;
    double tolerance = 1e-9;
    int min_dim_a = 2;
    int max_dim_a = 4;
    int max_dim_b = 5;
    // Self-test hook: perturbs the closed-form stage recursion so the
    // comparison must fail. Used to prove the check can catch regressions.
    bool corrupt_recursion = false;
};

struct CheckReport {
    struct Item {
        std::string quantity;
        double max_deviation = 0.0;
        bool pass = true;
    };
    std::vector<Item> items;
    double tolerance = 0.0;
    bool pass = true;

    Item& item(const std::string& quantity) {
        for (Item& it : items)
            if (it.quantity == quantity) return it;
        items.push_back(Item{quantity});
        return items.back();
    }
    void record(const std::string& quantity, double deviation) {
        Item& it = item(quantity);
        if (deviation > it.max_deviation) it.max_deviation = deviation;
    }
};

/// Random normalized Schmidt channel; occasionally zeroes coefficients so the
/// degenerate (linearly dependent) sets get exercised.
inline SchmidtChannel random_channel(std::mt19937_64& rng, const CheckOptions& opt) {
    std::uniform_int_distribution<int> da_dist(opt.min_dim_a, opt.max_dim_a);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };
    int dim_a = da_dist(rng);
    std::uniform_int_distribution<int> db_dist(dim_a, opt.max_dim_b);
    int dim_b = db_dist(rng);

    auto draw = [&](int n) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        while (norm2 <= 0.0) {
            norm2 = 0.0;
            for (int i = 0; i < n; ++i) {
                double x = uniform();
                if (uniform() < 0.25) x = 0.0;
                v[i] = x;
                norm2 += x * x;
            }
        }
        double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
        // re-normalize exactly enough for the 1e-12 gate
        double s = 0.0;
        for (double x : v) s += x * x;
        inv = 1.0 / std::sqrt(s);
        for (double& x : v) x *= inv;
        return v;
    };
    return make_channel(dim_a, dim_b, draw(dim_a), draw(dim_b));
}

namespace detail {

/// Full (1,4) statevector of a branch expressed in the Psi_ls basis.
inline Vector bell_expansion(const Vector& coeffs, int dim_a, int dim_b, int s) {
    Vector psi = Vector::Zero(dim_a * dim_b);
    for (int l = 0; l < dim_a; ++l)
        psi += coeffs[l] * generalized_bell(dim_a, dim_b, l, s).amplitudes;
    return psi;
}

inline SwapOutcome maybe_corrupt(SwapOutcome out, bool corrupt) {
    if (corrupt && out.beta_used >= 1) {
        out.entanglement = std::min(1.0, out.entanglement + 1e-3);
        out.state_coeffs[0] *= 1.001;
        out.state_coeffs.normalize();
    }
    return out;
}

} // namespace detail

/// Runs every closed-form-vs-oracle comparison on seeded random channels and
/// reports the worst deviation per quantity.
inline CheckReport run_oracle_check(const CheckOptions& opt) {
    CheckReport report;
    report.tolerance = opt.tolerance;
    std::mt19937_64 rng(opt.seed);

    for (int trial = 0; trial < opt.channels; ++trial) {
        SchmidtChannel ch = random_channel(rng, opt);
        std::vector<ConditionalSet> sets = apply_gxor_and_measure3(ch);

        for (ConditionalSet& cs : sets) {
            SetProfile prof = set_profile(ch, cs.s);
            report.record("set_probability", std::abs(cs.probability - prof.p));

            // ME branches for every m
            for (int m = 0; m < ch.dim_a; ++m) {
                Register reg = cs.reg;
                double p_m = run_me_branch(reg, m);
                SwapOutcome out = me_swap(ch, cs.s, m);
                report.record("me_branch_probability",
                              std::abs(cs.probability * p_m - out.branch_probability));
                Vector closed = detail::bell_expansion(out.state_coeffs, ch.dim_a, ch.dim_b, cs.s);
                report.record("me_branch_state", std::abs(1.0 - overlap2(closed, reg.state)));
                report.record("me_entanglement",
                              std::abs(oracle_entanglement(reg, 0) - out.entanglement));
                Vector target = generalized_bell(ch.dim_a, ch.dim_b, m, cs.s).amplitudes;
                report.record("me_fidelity",
                              std::abs(overlap2(target, reg.state) - out.fidelity));

                // local correction: Z_1^m X_4^s must land the fidelity on Psi_00
                if (m == 1 % ch.dim_a) {
                    Register corr = reg;
                    apply_local(corr, phase_op(ch.dim_a, m), {0});
                    apply_local(corr, shift_op(ch.dim_b, cs.s), {1});
                    SwapOutcome fixed = local_correction(out);
                    Vector ref = generalized_bell(ch.dim_a, ch.dim_b, 0, 0).amplitudes;
                    report.record("local_correction_fidelity",
                                  std::abs(overlap2(ref, corr.state) - out.fidelity));
                    Vector closed_fixed =
                        detail::bell_expansion(fixed.state_coeffs, ch.dim_a, ch.dim_b, 0);
                    report.record("local_correction_state",
                                  std::abs(1.0 - overlap2(closed_fixed, corr.state)));
                }
            }

            // SMC branches: every conclusive stage (m = 0), then the terminal
            // failure, exercising the full cascade
            int stages = allowed_stages(prof);
            for (int beta = 1; beta <= stages; ++beta) {
                std::vector<int> bits(beta, 1);
                bits.back() = 0;
                Register reg = cs.reg;
                double p_branch = run_smc_branch(reg, prof, bits, 0);
                SwapOutcome out =
                    detail::maybe_corrupt(smc_swap(ch, cs.s, 0, beta), opt.corrupt_recursion);
                report.record("smc_branch_probability",
                              std::abs(cs.probability * p_branch - out.branch_probability));
                Vector closed = detail::bell_expansion(out.state_coeffs, ch.dim_a, ch.dim_b, cs.s);
                report.record("smc_branch_state", std::abs(1.0 - overlap2(closed, reg.state)));
                report.record("smc_entanglement",
                              std::abs(oracle_entanglement(reg, 0) - out.entanglement));
                Vector target = generalized_bell(ch.dim_a, ch.dim_b, 0, cs.s).amplitudes;
                report.record("smc_fidelity",
                              std::abs(overlap2(target, reg.state) - out.fidelity));
            }

            // terminal ME after every stage failed
            SmcLadder ladder = smc_ladder(prof, stages - 1);
            if (stages >= 2 && ladder.has_residual(stages - 1)) {
                std::vector<int> bits(stages - 1, 1);
                Register reg = cs.reg;
                double p_branch = run_smc_branch(reg, prof, bits, 0);
                SwapOutcome out = detail::maybe_corrupt(
                    failed_terminal_me(ch, cs.s, 0, stages - 1), opt.corrupt_recursion);
                report.record("terminal_branch_probability",
                              std::abs(cs.probability * p_branch - out.branch_probability));
                Vector closed = detail::bell_expansion(out.state_coeffs, ch.dim_a, ch.dim_b, cs.s);
                report.record("terminal_branch_state", std::abs(1.0 - overlap2(closed, reg.state)));
                report.record("terminal_entanglement",
                              std::abs(oracle_entanglement(reg, 0) - out.entanglement));
            }
        }

        // closed-form branch tree must exhaust probability
        StagePolicy policy = fixed_stage_policy(ch, ch.dim_a);
        double total = 0.0;
        for (const SwapOutcome& out : enumerate_branches(ch, policy))
            total += out.branch_probability;
        report.record("strategy_tree_probability_sum", std::abs(total - 1.0));
    }

    report.pass = true;
    for (CheckReport::Item& it : report.items) {
        it.pass = it.max_deviation <= opt.tolerance;
        report.pass = report.pass && it.pass;
    }
    return report;
}

} // namespace qes

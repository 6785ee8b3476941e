#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qes/protocol.hpp"

namespace qes {

/// Full statevector over an ordered list of subsystems, row-major indexing.
/// Starts as systems (1,2,3,4); measured subsystems are removed, MC ancillas
/// are appended lazily one per executed stage.
struct Register {
    std::vector<int> dims;
    Vector state;

    int total_dim() const {
        int n = 1;
        for (int d : dims) n *= d;
        return n;
    }
};

namespace detail {

inline std::vector<int> strides_of(const std::vector<int>& dims) {
    std::vector<int> strides(dims.size());
    int acc = 1;
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        strides[k] = acc;
        acc *= dims[k];
    }
    return strides;
}

} // namespace detail

/// Applies an operator to the listed subsystems (row-major over the targets'
/// dims, in the given order).
inline void apply_local(Register& reg, const Matrix& op, const std::vector<int>& targets) {
    std::vector<int> strides = detail::strides_of(reg.dims);
    int block = 1;
    for (int t : targets) block *= reg.dims[t];
    if (op.rows() != block || op.cols() != block)
        throw length_mismatch_error("operator does not match target dimensions");

    // offsets of each target multi-index within the flat state
    std::vector<int> offsets(block);
    for (int i = 0; i < block; ++i) {
        int rem = i, off = 0;
        for (int k = static_cast<int>(targets.size()) - 1; k >= 0; --k) {
            int d = reg.dims[targets[k]];
            off += (rem % d) * strides[targets[k]];
            rem /= d;
        }
        offsets[i] = off;
    }

    // enumerate bases over the non-target subsystems
    std::vector<int> rest;
    for (int k = 0; k < static_cast<int>(reg.dims.size()); ++k)
        if (std::find(targets.begin(), targets.end(), k) == targets.end()) rest.push_back(k);
    int rest_count = 1;
    for (int k : rest) rest_count *= reg.dims[k];

    Vector x(block), y(block);
    for (int r = 0; r < rest_count; ++r) {
        int rem = r, base = 0;
        for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
            int d = reg.dims[rest[k]];
            base += (rem % d) * strides[rest[k]];
            rem /= d;
        }
        for (int i = 0; i < block; ++i) x[i] = reg.state[base + offsets[i]];
        y.noalias() = op * x;
        for (int i = 0; i < block; ++i) reg.state[base + offsets[i]] = y[i];
    }
}

/// Outcome probabilities of a computational-basis measurement on one subsystem.
inline std::vector<double> measurement_probabilities(const Register& reg, int subsystem) {
    std::vector<int> strides = detail::strides_of(reg.dims);
    std::vector<double> probs(reg.dims[subsystem], 0.0);
    int n = reg.total_dim();
    for (int i = 0; i < n; ++i) {
        int digit = (i / strides[subsystem]) % reg.dims[subsystem];
        probs[digit] += std::norm(reg.state[i]);
    }
    return probs;
}

/// Projects a subsystem onto |outcome>, removes it, and renormalizes.
/// Returns the branch probability (pre-normalization norm squared).
inline double project_out(Register& reg, int subsystem, int outcome) {
    std::vector<int> strides = detail::strides_of(reg.dims);
    int d = reg.dims[subsystem];
    int n = reg.total_dim();
    Vector next(n / d);
    int j = 0;
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        if ((i / strides[subsystem]) % d != outcome) continue;
        next[j] = reg.state[i];
        norm2 += std::norm(reg.state[i]);
        ++j;
    }
    reg.dims.erase(reg.dims.begin() + subsystem);
    if (norm2 > 0.0) next /= std::sqrt(norm2);
    reg.state = std::move(next);
    return norm2;
}

/// Appends a fresh subsystem prepared in |0>.
inline void append_ancilla(Register& reg, int dim = 2) {
    int n = reg.total_dim();
    Vector next = Vector::Zero(n * dim);
    for (int i = 0; i < n; ++i) next[i * dim] = reg.state[i];
    reg.dims.push_back(dim);
    reg.state = std::move(next);
}

/// Density matrix of the kept subsystems (in the given order).
inline Matrix reduced_state(const Register& reg, const std::vector<int>& keep) {
    std::vector<int> strides = detail::strides_of(reg.dims);
    int kd = 1;
    for (int k : keep) kd *= reg.dims[k];

    std::vector<int> keep_offsets(kd);
    for (int i = 0; i < kd; ++i) {
        int rem = i, off = 0;
        for (int k = static_cast<int>(keep.size()) - 1; k >= 0; --k) {
            int d = reg.dims[keep[k]];
            off += (rem % d) * strides[keep[k]];
            rem /= d;
        }
        keep_offsets[i] = off;
    }
    std::vector<int> rest;
    for (int k = 0; k < static_cast<int>(reg.dims.size()); ++k)
        if (std::find(keep.begin(), keep.end(), k) == keep.end()) rest.push_back(k);
    int rest_count = 1;
    for (int k : rest) rest_count *= reg.dims[k];

    Matrix rho = Matrix::Zero(kd, kd);
    for (int r = 0; r < rest_count; ++r) {
        int rem = r, base = 0;
        for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
            int d = reg.dims[rest[k]];
            base += (rem % d) * strides[rest[k]];
            rem /= d;
        }
        for (int i = 0; i < kd; ++i)
            for (int j = 0; j < kd; ++j)
                rho(i, j) += reg.state[base + keep_offsets[i]] *
                             std::conj(reg.state[base + keep_offsets[j]]);
    }
    return rho;
}

/// Linear-entropy entanglement of a pure bipartite register split as
/// (subsystem `first`) vs the rest, normalized by the first subsystem's dim.
inline double oracle_entanglement(const Register& reg, int first) {
    Matrix rho = reduced_state(reg, {first});
    double purity = (rho * rho).trace().real();
    double dim = static_cast<double>(reg.dims[first]);
    return dim / (dim - 1.0) * (1.0 - purity);
}

/// |phi>_A |varphi>_B on systems (1,2,3,4), dims (D_A, D_A, D_B, D_B).
inline Register build_initial_state(const SchmidtChannel& ch) {
    Register reg;
    reg.dims = {ch.dim_a, ch.dim_a, ch.dim_b, ch.dim_b};
    reg.state = Vector::Zero(reg.total_dim());
    std::vector<int> strides = detail::strides_of(reg.dims);
    for (int m = 0; m < ch.dim_a; ++m)
        for (int r = 0; r < ch.dim_b; ++r)
            reg.state[m * strides[0] + m * strides[1] + r * strides[2] + r * strides[3]] =
                ch.c[m] * ch.d[r];
    return reg;
}

struct ConditionalSet {
    int s = 0;
    double probability = 0.0;
    Register reg;    // systems (1,2,4), dims (D_A, D_A, D_B)
};

/// G^XOR on (2,3) followed by the measurement of particle 3; one conditional
/// register per outcome with nonzero probability.
inline std::vector<ConditionalSet> apply_gxor_and_measure3(const SchmidtChannel& ch) {
    Register reg = build_initial_state(ch);
    apply_local(reg, hybrid_gxor(ch.dim_a, ch.dim_b), {1, 2});
    std::vector<double> probs = measurement_probabilities(reg, 2);
    std::vector<ConditionalSet> out;
    for (int s = 0; s < ch.dim_b; ++s) {
        if (probs[s] <= kZeroTol * kZeroTol) continue;   // zero-norm branch, skipped
        ConditionalSet cs;
        cs.s = s;
        cs.reg = reg;
        cs.probability = project_out(cs.reg, 2, s);
        out.push_back(std::move(cs));
    }
    return out;
}

/// Inverse Fourier + measurement of m on system 2. Returns the branch
/// probability (conditioned on s) and leaves systems (1,4) in `reg`.
inline double run_me_branch(Register& reg, int m) {
    int dim = reg.dims[1];
    apply_local(reg, fourier(dim).adjoint(), {1});
    return project_out(reg, 1, m);
}

/// Runs the MC cascade against the conditional register: one embedded unitary
/// and ancilla measurement per bit (0 = conclusive), then, after the last bit,
/// the final ME measurement of m. All-ones sequences end in the terminal ME on
/// the residual states. Returns the probability conditioned on s; `reg` is
/// left with systems (1,4).
inline double run_smc_branch(Register& reg, const SetProfile& prof,
                             const std::vector<int>& bits, int m) {
    SmcLadder ladder = smc_ladder(prof, static_cast<int>(bits.size()));
    double prob = 1.0;
    for (std::size_t b = 0; b < bits.size(); ++b) {
        if (b >= ladder.stages.size())
            throw exhausted_stages_error("bit sequence longer than the reachable cascade");
        Matrix u = embed_mc_unitary(mc_operators(ladder.stages[b]));
        append_ancilla(reg);
        apply_local(reg, u, {1, static_cast<int>(reg.dims.size()) - 1});
        prob *= project_out(reg, static_cast<int>(reg.dims.size()) - 1, bits[b]);
        if (bits[b] == 0) break;   // conclusive; later bits would be unreachable
    }
    prob *= run_me_branch(reg, m);
    return prob;
}

/// Empirical statistics of the sampled strategy tree.
struct MonteCarloStats {
    std::int64_t samples = 0;
    double success_rate = 0.0;
    double success_se = 0.0;
    double e_mean = 0.0;
    double e_se = 0.0;
    double f_mean = 0.0;
    double f_se = 0.0;
};

/// Trajectory sampling of the SMC protocol under a policy. Figures per
/// trajectory come from the closed-form per-branch values, so the statistics
/// validate the averaging formulas. Bit-reproducible for a fixed seed.
inline MonteCarloStats monte_carlo_run(const SchmidtChannel& ch, const StagePolicy& policy,
                                       std::int64_t n_samples, std::uint64_t seed) {
    if (n_samples < 1)
        throw index_out_of_range_error("n_samples must be at least 1");
    validate_policy(ch, policy);

    std::vector<SetProfile> profiles = all_set_profiles(ch);
    std::vector<double> cum;
    double acc = 0.0;
    for (const SetProfile& p : profiles) {
        acc += p.p;
        cum.push_back(acc);
    }
    std::vector<SmcLadder> ladders;
    for (const SetProfile& p : profiles)
        ladders.push_back(smc_ladder(p, policy.beta_max[p.s]));

    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

    double succ = 0.0, e_sum = 0.0, e_sq = 0.0, f_sum = 0.0, f_sq = 0.0;
    for (std::int64_t it = 0; it < n_samples; ++it) {
        double u = uniform() * acc;
        std::size_t idx = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        if (idx >= profiles.size()) idx = profiles.size() - 1;
        const SetProfile& prof = profiles[idx];
        const SmcLadder& ladder = ladders[idx];
        int bm = policy.beta_max[prof.s];

        double e, f;
        bool conclusive = true;
        if (bm == 0) {
            e = detail::me_entanglement(prof.gamma);
            f = detail::me_fidelity(prof.gamma);
        } else {
            conclusive = false;
            e = f = 0.0;
            for (std::size_t b = 0; b < ladder.p_succ.size(); ++b) {
                if (uniform() < ladder.p_succ[b]) {
                    int n_prev = ladder.stages[b].support_size;
                    e = detail::stage_entanglement(ch.dim_a, n_prev);
                    f = detail::stage_fidelity(ch.dim_a, n_prev);
                    conclusive = true;
                    break;
                }
            }
            if (!conclusive) {
                // a near-deterministic final stage may leave no residual
                const SmcStage& residual = ladder.has_residual(bm)
                                               ? ladder.stages[bm]
                                               : ladder.stages.back();
                e = detail::me_entanglement(residual.gamma);
                f = detail::me_fidelity(residual.gamma);
            }
        }
        succ += conclusive ? 1.0 : 0.0;
        e_sum += e;
        e_sq += e * e;
        f_sum += f;
        f_sq += f * f;
    }

    MonteCarloStats stats;
    stats.samples = n_samples;
    double n = static_cast<double>(n_samples);
    stats.success_rate = succ / n;
    stats.success_se = std::sqrt(std::max(0.0, stats.success_rate * (1.0 - stats.success_rate) / n));
    stats.e_mean = e_sum / n;
    stats.e_se = std::sqrt(std::max(0.0, (e_sq / n - stats.e_mean * stats.e_mean) / n));
    stats.f_mean = f_sum / n;
    stats.f_se = std::sqrt(std::max(0.0, (f_sq / n - stats.f_mean * stats.f_mean) / n));
    return stats;
}

} // namespace qes

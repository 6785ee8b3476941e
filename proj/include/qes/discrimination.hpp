#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qes/gates.hpp"

namespace qes {

/// Gram matrix [G]_{jk} = sum_l Gamma_l^2 w^{l(k-j)} of one symmetric set.
/// Circulant and Hermitian with unit diagonal.
inline Matrix gram_matrix(const SetProfile& profile) {
    int dim = static_cast<int>(profile.gamma.size());
    Matrix g = Matrix::Zero(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
            Complex sum = 0.0;
            for (int l = 0; l < dim; ++l)
                sum += profile.gamma[l] * profile.gamma[l] *
                       root_of_unity(dim, static_cast<long long>(l) * (k - j));
            g(j, k) = sum;
        }
    return g;
}

/// Closed-form determinant D^D prod_j Gamma_j^2. Zero iff the set is
/// linearly dependent.
inline double gram_determinant(const SetProfile& profile) {
    int dim = static_cast<int>(profile.gamma.size());
    double det = std::pow(static_cast<double>(dim), dim);
    for (double g : profile.gamma)
        det *= g * g;
    return det;
}

inline bool is_linearly_independent(const SetProfile& profile) {
    return profile.support_size == static_cast<int>(profile.gamma.size());
}

/// ME statistics P(m|l) = |<m|F^-1|nu_ls>|^2. Depends only on m-l mod D_A.
inline std::vector<double> me_outcome_distribution(const SetProfile& profile, int l) {
    int dim = static_cast<int>(profile.gamma.size());
    Vector nu = nu_state(profile, l).amplitudes;
    Vector proj = fourier(dim).adjoint() * nu;
    std::vector<double> out(dim);
    for (int m = 0; m < dim; ++m)
        out[m] = std::norm(proj[m]);
    return out;
}

/// Diagonal Kraus pair of the optimal MC measurement. Completeness
/// A_succ^dag A_succ + A_fail^dag A_fail = 1 holds on the full space: basis
/// directions outside the support are routed to the failure branch.
struct McOperators {
    Matrix a_succ;
    Matrix a_fail;
    double p_succ = 0.0;
};

/// Per-stage discrimination state of the sequential MC cascade.
struct SmcStage {
    int beta = 0;                   // stages already failed
    std::vector<double> gamma;      // current coefficients Gamma^(beta)
    double min_coeff = 0.0;         // gamma^(beta), smallest nonzero coefficient
    std::vector<int> support;       // y^(beta)
    int support_size = 0;           // N^(beta)
    double p_succ_next = 0.0;       // N^(beta) * gamma^(beta)^2
};

namespace detail {

inline SmcStage stage_from_gammas(int beta, std::vector<double> gamma) {
    SmcStage st;
    st.beta = beta;
    st.gamma = std::move(gamma);
    st.support.resize(st.gamma.size());
    double min_nz = std::numeric_limits<double>::infinity();
    for (std::size_t q = 0; q < st.gamma.size(); ++q) {
        if (st.gamma[q] < kZeroTol) st.gamma[q] = 0.0;
        st.support[q] = st.gamma[q] > 0.0 ? 1 : 0;
        st.support_size += st.support[q];
        if (st.support[q]) min_nz = std::min(min_nz, st.gamma[q]);
    }
    if (st.support_size == 0)
        throw empty_support_error("stage has no nonvanishing coefficients");
    st.min_coeff = min_nz;
    st.p_succ_next = std::min(1.0, st.support_size * min_nz * min_nz);
    return st;
}

} // namespace detail

/// Stage beta = 0, i.e. the set as produced by the measurement on particle 3.
inline SmcStage initial_stage(const SetProfile& profile) {
    return detail::stage_from_gammas(0, profile.gamma);
}

inline McOperators mc_operators(const SmcStage& stage) {
    int dim = static_cast<int>(stage.gamma.size());
    McOperators ops;
    ops.a_succ = Matrix::Zero(dim, dim);
    ops.a_fail = Matrix::Zero(dim, dim);
    double g = stage.min_coeff;
    for (int q = 0; q < dim; ++q) {
        if (stage.support[q]) {
            double r = g / stage.gamma[q];
            ops.a_succ(q, q) = r;
            ops.a_fail(q, q) = std::sqrt(std::max(0.0, 1.0 - r * r));
        } else {
            ops.a_fail(q, q) = 1.0;
        }
    }
    ops.p_succ = stage.p_succ_next;
    return ops;
}

inline McOperators mc_operators(const SetProfile& profile) {
    return mc_operators(initial_stage(profile));
}

/// Dilates the Kraus pair to a unitary on system (x) ancilla (dims D_A, 2,
/// row-major): U|q>|0> = A_succ|q>|0> + A_fail|q>|1>. The |1>_a-input block is
/// completed by Gram-Schmidt over the remaining basis columns in index order.
inline Matrix embed_mc_unitary(const McOperators& ops) {
    int dim = static_cast<int>(ops.a_succ.rows());
    int n = 2 * dim;
    Matrix u = Matrix::Zero(n, n);
    for (int q = 0; q < dim; ++q) {
        u(2 * q + 0, 2 * q) = ops.a_succ(q, q);
        u(2 * q + 1, 2 * q) = ops.a_fail(q, q);
    }
    int filled = dim;
    for (int cand = 0; cand < n && filled < n; ++cand) {
        Vector v = Vector::Zero(n);
        v[cand] = 1.0;
        for (int q = 0; q < dim; ++q) {
            Vector col = u.col(2 * q);
            v -= col.dot(v) * col;
        }
        for (int q = 0; q < dim; ++q) {
            if (u.col(2 * q + 1).norm() == 0.0) continue;
            Vector col = u.col(2 * q + 1);
            v -= col.dot(v) * col;
        }
        double nrm = v.norm();
        if (nrm < 1e-8) continue;
        // next free odd column in index order
        int q = 0;
        while (u.col(2 * q + 1).norm() != 0.0) ++q;
        u.col(2 * q + 1) = v / nrm;
        ++filled;
    }
    if (filled != n)
        throw completion_failure_error("could not complete MC unitary");
    return u;
}

/// Result of executing one MC stage: the uniform success profile, the failure
/// stage to continue from, and the stage's conclusive probability.
struct SmcAdvance {
    std::vector<double> success_coeffs;   // |u_ls> amplitude profile (l = 0)
    SmcStage failure_stage;
    double p_succ = 0.0;
};

/// The set admits n_s - 1 further useful stages past the first.
inline int max_useful_stages(const SetProfile& profile) {
    return profile.distinct_values - 1;
}

/// Stages at which a conclusive MC event exists at all: 1..distinct_values.
inline int allowed_stages(const SetProfile& profile) {
    return profile.distinct_values;
}

/// One step of the stage recursion. Success leaves the uniform profile over
/// the current support; failure removes the smallest coefficient class and
/// renormalizes in squared-coefficient space.
inline SmcAdvance smc_advance(const SmcStage& stage) {
    if (stage.support_size < 2)
        throw exhausted_stages_error("support collapsed; no further MC stage is meaningful");

    SmcAdvance adv;
    adv.p_succ = stage.p_succ_next;
    double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(stage.support_size));
    adv.success_coeffs.resize(stage.gamma.size());
    for (std::size_t q = 0; q < stage.gamma.size(); ++q)
        adv.success_coeffs[q] = stage.support[q] ? inv_sqrt_n : 0.0;

    double g2 = stage.min_coeff * stage.min_coeff;
    double denom = 1.0 - stage.support_size * g2;
    if (denom <= kZeroTol)
        throw exhausted_stages_error("stage is deterministic; failure branch does not exist");
    std::vector<double> next(stage.gamma.size(), 0.0);
    for (std::size_t q = 0; q < stage.gamma.size(); ++q) {
        if (!stage.support[q]) continue;
        double num = stage.gamma[q] * stage.gamma[q] - g2;
        // ties with the minimum are one degeneracy class and leave together
        if (num <= kDegeneracyRelTol * g2) num = 0.0;
        if (num < 0.0) num = 0.0;
        next[q] = std::sqrt(num / denom);
    }
    adv.failure_stage = detail::stage_from_gammas(stage.beta + 1, std::move(next));
    return adv;
}

/// Stage coefficient profiles Gamma^(0..beta_max) and stage success
/// probabilities p^(1..beta_max), following the recursion while a failure
/// branch exists. stages[b] carries Gamma^(b); the final residual is present
/// whenever total failure through beta_max stages has nonzero probability.
struct SmcLadder {
    std::vector<SmcStage> stages;
    std::vector<double> p_succ;

    bool has_residual(int beta_max) const {
        return static_cast<int>(stages.size()) > beta_max;
    }
};

inline SmcLadder smc_ladder(const SetProfile& profile, int beta_max) {
    SmcLadder ladder;
    ladder.stages.push_back(initial_stage(profile));
    for (int b = 1; b <= beta_max; ++b) {
        const SmcStage cur = ladder.stages.back();
        ladder.p_succ.push_back(cur.p_succ_next);
        if (cur.p_succ_next >= 1.0 - kZeroTol || cur.support_size < 2)
            break;  // deterministic stage: failure branch unreachable
        ladder.stages.push_back(smc_advance(cur).failure_stage);
    }
    return ladder;
}

/// Eq.-style telescoping total: probability of a conclusive event within the
/// first beta_max stages.
inline double smc_cumulative_success(const std::vector<double>& stage_probs, int beta_max) {
    if (beta_max < 1 || beta_max > static_cast<int>(stage_probs.size()))
        throw index_out_of_range_error("beta_max out of range");
    double total = 0.0;
    double fail = 1.0;
    for (int b = 0; b < beta_max; ++b) {
        total += fail * stage_probs[b];
        fail *= 1.0 - stage_probs[b];
    }
    return total;
}

} // namespace qes

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qes/errors.hpp"

namespace qes {

/// Coefficients below this threshold are treated as exact zeros everywhere
/// (support masks, multiplicities, Gram determinant).
inline constexpr double kZeroTol = 1e-12;

/// Relative tolerance for grouping degenerate squared coefficients.
inline constexpr double kDegeneracyRelTol = 1e-9;

inline constexpr double kNormTol = 1e-12;

/// A pair of partially entangled channels given by their Schmidt data:
/// pair A lives in a dim_a x dim_a space with coefficients c, pair B in
/// dim_b x dim_b with coefficients d. Requires dim_b >= dim_a.
struct SchmidtChannel {
    int dim_a = 0;
    int dim_b = 0;
    std::vector<double> c;
    std::vector<double> d;
};

/// Everything the discrimination machinery needs about one outcome set:
/// fiducial coefficients, support mask, and the multiplicity structure of
/// the distinct coefficient values (ascending).
struct SetProfile {
    int s = 0;
    double p = 0.0;                     // probability of this set
    std::vector<double> gamma;          // fiducial coefficients, length dim_a
    std::vector<int> support;           // 1 where gamma != 0
    int support_size = 0;
    int distinct_values = 0;
    std::vector<int> multiplicities;    // ascending-value order, sums to support_size
};

namespace detail {

inline int mod_sub(int a, int b, int m) {
    int r = (a - b) % m;
    return r < 0 ? r + m : r;
}

} // namespace detail

inline SchmidtChannel make_channel(int dim_a, int dim_b,
                                   std::vector<double> c, std::vector<double> d,
                                   bool renormalize = false) {
    if (dim_a < 2)
        throw dimension_order_error("dim_a must be at least 2");
    if (dim_b < dim_a)
        throw dimension_order_error("dim_b must be >= dim_a");
    if (static_cast<int>(c.size()) != dim_a || static_cast<int>(d.size()) != dim_b)
        throw length_mismatch_error("coefficient lengths must match dimensions");
    for (double v : c)
        if (!std::isfinite(v) || v < 0.0)
            throw negative_coefficient_error("c coefficients must be finite and nonnegative");
    for (double v : d)
        if (!std::isfinite(v) || v < 0.0)
            throw negative_coefficient_error("d coefficients must be finite and nonnegative");

    auto sq_norm = [](const std::vector<double>& v) {
        return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
    };
    double nc = sq_norm(c);
    double nd = sq_norm(d);
    if (renormalize) {
        if (nc <= 0.0 || nd <= 0.0)
            throw non_normalized_error("cannot renormalize a zero vector");
        for (double& v : c) v /= std::sqrt(nc);
        for (double& v : d) v /= std::sqrt(nd);
    } else {
        if (std::abs(nc - 1.0) > kNormTol)
            throw non_normalized_error("c coefficients are not normalized");
        if (std::abs(nd - 1.0) > kNormTol)
            throw non_normalized_error("d coefficients are not normalized");
    }
    return SchmidtChannel{dim_a, dim_b, std::move(c), std::move(d)};
}

/// p_s = sum_m c_m^2 d_{m-s mod dim_b}^2, the chance that the measurement on
/// particle 3 yields outcome s.
inline double outcome_probability(const SchmidtChannel& ch, int s) {
    if (s < 0 || s >= ch.dim_b)
        throw index_out_of_range_error("outcome index s out of range");
    double p = 0.0;
    for (int m = 0; m < ch.dim_a; ++m) {
        double dm = ch.d[detail::mod_sub(m, s, ch.dim_b)];
        p += ch.c[m] * ch.c[m] * dm * dm;
    }
    return p;
}

inline SetProfile set_profile(const SchmidtChannel& ch, int s) {
    double p = outcome_probability(ch, s);
    if (p <= kZeroTol * kZeroTol)
        throw zero_probability_set_error("set has zero probability");

    SetProfile prof;
    prof.s = s;
    prof.p = p;
    prof.gamma.resize(ch.dim_a);
    prof.support.resize(ch.dim_a);
    double root_p = std::sqrt(p);
    for (int q = 0; q < ch.dim_a; ++q) {
        double g = ch.c[q] * ch.d[detail::mod_sub(q, s, ch.dim_b)] / root_p;
        if (g < kZeroTol) g = 0.0;
        prof.gamma[q] = g;
        prof.support[q] = g > 0.0 ? 1 : 0;
        prof.support_size += prof.support[q];
    }

    // Multiplicity bookkeeping: group squared coefficients that agree within
    // a relative tolerance, ascending.
    std::vector<double> nz;
    for (double g : prof.gamma)
        if (g > 0.0) nz.push_back(g * g);
    std::sort(nz.begin(), nz.end());
    for (std::size_t i = 0; i < nz.size();) {
        std::size_t j = i + 1;
        while (j < nz.size() && nz[j] - nz[i] <= kDegeneracyRelTol * nz[j]) ++j;
        prof.multiplicities.push_back(static_cast<int>(j - i));
        i = j;
    }
    prof.distinct_values = static_cast<int>(prof.multiplicities.size());
    return prof;
}

/// All outcome sets with nonzero probability, in ascending s.
inline std::vector<SetProfile> all_set_profiles(const SchmidtChannel& ch) {
    std::vector<SetProfile> out;
    for (int s = 0; s < ch.dim_b; ++s) {
        if (outcome_probability(ch, s) <= kZeroTol * kZeroTol) continue;
        out.push_back(set_profile(ch, s));
    }
    return out;
}

/// Drops Schmidt directions with zero coefficient and reindexes, yielding the
/// effective smaller-dimensional system the experimenter could address with an
/// adapted gate. Optional preprocessing; never applied implicitly.
inline SchmidtChannel effective_channel(const SchmidtChannel& ch) {
    std::vector<double> c, d;
    for (double v : ch.c)
        if (v > kZeroTol) c.push_back(v);
    for (double v : ch.d)
        if (v > kZeroTol) d.push_back(v);
    int dim_a = static_cast<int>(c.size());
    int dim_b = static_cast<int>(d.size());
    return make_channel(dim_a, dim_b, std::move(c), std::move(d));
}

} // namespace qes

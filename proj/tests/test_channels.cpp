#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qes/channels.hpp"

using namespace qes;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

SchmidtChannel maximally_entangled(int dim) {
    std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    return make_channel(dim, dim, v, v);
}

/// Coefficients of the paper's reference study, with c0 and d0 chosen and the
/// trailing entries fixed by normalization.
SchmidtChannel figure_channel(double c0, double d0) {
    std::vector<double> c{c0, 0.2811, 0.3790, 0.0};
    std::vector<double> d{d0, 0.3220, 0.2064, 0.0, 0.0};
    double c3 = 1.0 - c0 * c0 - c[1] * c[1] - c[2] * c[2];
    double d4 = 1.0 - d0 * d0 - d[1] * d[1] - d[2] * d[2];
    REQUIRE(c3 >= 0.0);
    REQUIRE(d4 >= 0.0);
    c[3] = std::sqrt(c3);
    d[4] = std::sqrt(d4);
    return make_channel(4, 5, c, d);
}

SchmidtChannel random_valid_channel(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> da(2, 4);
    int dim_a = da(rng);
    std::uniform_int_distribution<int> db(dim_a, 5);
    int dim_b = db(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw = [&](int n) {
        std::vector<double> v(n);
        double s = 0.0;
        do {
            s = 0.0;
            for (double& x : v) {
                x = u(rng) < 0.2 ? 0.0 : u(rng);
                s += x * x;
            }
        } while (s == 0.0);
        for (double& x : v) x /= std::sqrt(s);
        double t = 0.0;
        for (double x : v) t += x * x;
        for (double& x : v) x /= std::sqrt(t);
        return v;
    };
    return make_channel(dim_a, dim_b, draw(dim_a), draw(dim_b));
}

} // namespace

TEST_CASE("make_channel validates its inputs") {
    CHECK_NOTHROW(make_channel(2, 2, {kInvSqrt2, kInvSqrt2}, {kInvSqrt2, kInvSqrt2}));
    CHECK_NOTHROW(figure_channel(0.5, 0.5));

    CHECK_THROWS_AS(make_channel(3, 2, {0.6, 0.8, 0.0}, {kInvSqrt2, kInvSqrt2}),
                    dimension_order_error);
    CHECK_THROWS_AS(make_channel(2, 2, {0.5, 0.5}, {kInvSqrt2, kInvSqrt2}),
                    non_normalized_error);
    CHECK_THROWS_AS(make_channel(2, 2, {-kInvSqrt2, kInvSqrt2}, {kInvSqrt2, kInvSqrt2}),
                    negative_coefficient_error);
    CHECK_THROWS_AS(make_channel(2, 2, {1.0}, {kInvSqrt2, kInvSqrt2}), length_mismatch_error);
}

TEST_CASE("make_channel renormalize flag rescales instead of rejecting") {
    SchmidtChannel ch = make_channel(2, 2, {0.5, 0.5}, {1.0, 1.0}, true);
    CHECK(ch.c[0] == Catch::Approx(kInvSqrt2).margin(1e-15));
    CHECK(ch.d[1] == Catch::Approx(kInvSqrt2).margin(1e-15));
}

TEST_CASE("outcome_probability") {
    SECTION("maximally entangled is uniform") {
        SchmidtChannel ch = maximally_entangled(3);
        for (int s = 0; s < 3; ++s)
            CHECK(outcome_probability(ch, s) == Catch::Approx(1.0 / 3).margin(1e-14));
    }
    SECTION("direct sum for a 2x2 example") {
        SchmidtChannel ch = make_channel(2, 2, {std::sqrt(0.8), std::sqrt(0.2)},
                                         {std::sqrt(0.5), std::sqrt(0.5)});
        CHECK(outcome_probability(ch, 0) == Catch::Approx(0.5).margin(1e-14));
    }
    SECTION("total probability is 1 on the reference channel") {
        SchmidtChannel ch = figure_channel(0.4, 0.6);
        double total = 0.0;
        for (int s = 0; s < ch.dim_b; ++s) total += outcome_probability(ch, s);
        CHECK(total == Catch::Approx(1.0).margin(1e-12));
    }
    CHECK_THROWS_AS(outcome_probability(maximally_entangled(2), 2), index_out_of_range_error);
}

TEST_CASE("set_profile support counting on the reference channel") {
    SchmidtChannel ch = figure_channel(0.5, 0.5);
    CHECK(set_profile(ch, 1).support_size == 4);   // all four coefficients alive
    CHECK(set_profile(ch, 0).support_size == 3);   // d_3 = 0 kills q = 3
    for (int s : {2, 3, 4}) CHECK(set_profile(ch, s).support_size == 3);
}

TEST_CASE("set_profile multiplicity bookkeeping") {
    std::vector<double> c{std::sqrt(0.4), std::sqrt(0.4), std::sqrt(0.2)};
    std::vector<double> d(3, 1.0 / std::sqrt(3.0));
    SchmidtChannel ch = make_channel(3, 3, c, d);
    SetProfile prof = set_profile(ch, 0);   // Gamma^2 = c^2 = (0.4, 0.4, 0.2)
    CHECK(prof.distinct_values == 2);
    REQUIRE(prof.multiplicities.size() == 2);
    CHECK(prof.multiplicities[0] == 1);    // smallest value 0.2 once
    CHECK(prof.multiplicities[1] == 2);
}

TEST_CASE("zero-probability sets are explicit errors") {
    SchmidtChannel ch = make_channel(2, 2, {1.0, 0.0}, {1.0, 0.0});
    CHECK_THROWS_AS(set_profile(ch, 1), zero_probability_set_error);
    CHECK(all_set_profiles(ch).size() == 1);
}

TEST_CASE("channel invariants on random channels") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        SchmidtChannel ch = random_valid_channel(rng);
        double total = 0.0;
        for (int s = 0; s < ch.dim_b; ++s) total += outcome_probability(ch, s);
        REQUIRE(total == Catch::Approx(1.0).margin(1e-12));

        for (const SetProfile& prof : all_set_profiles(ch)) {
            double g2 = 0.0;
            int support = 0, msum = 0;
            for (int q = 0; q < ch.dim_a; ++q) {
                g2 += prof.gamma[q] * prof.gamma[q];
                support += prof.support[q];
                double prod = ch.c[q] * ch.d[detail::mod_sub(q, prof.s, ch.dim_b)];
                REQUIRE((prof.gamma[q] == 0.0) == (prod < kZeroTol));
            }
            REQUIRE(g2 == Catch::Approx(1.0).margin(1e-12));
            REQUIRE(support == prof.support_size);
            for (int mu : prof.multiplicities) msum += mu;
            REQUIRE(msum == prof.support_size);
        }
    }
}

TEST_CASE("effective_channel drops zero Schmidt directions") {
    SchmidtChannel ch = make_channel(2, 3, {0.6, 0.8}, {kInvSqrt2, kInvSqrt2, 0.0});
    SchmidtChannel eff = effective_channel(ch);
    CHECK(eff.dim_a == 2);
    CHECK(eff.dim_b == 2);
    CHECK(eff.d.size() == 2);
}

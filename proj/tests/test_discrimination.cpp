#include <catch2/catch_amalgamated.hpp>

#include "qes/discrimination.hpp"

using namespace qes;

namespace {

SetProfile profile_of(const std::vector<double>& gamma2) {
    std::vector<double> c(gamma2.size());
    for (std::size_t i = 0; i < gamma2.size(); ++i) c[i] = std::sqrt(gamma2[i]);
    std::vector<double> d(gamma2.size(), 1.0 / std::sqrt(static_cast<double>(gamma2.size())));
    return set_profile(make_channel(static_cast<int>(gamma2.size()),
                                    static_cast<int>(gamma2.size()), c, d), 0);
}

} // namespace

TEST_CASE("Gram matrix structure") {
    SetProfile prof = profile_of({0.8, 0.2});
    Matrix g = gram_matrix(prof);
    // off-diagonal <nu_0|nu_1> = 0.8 - 0.2 = 0.6
    CHECK(std::abs(g(0, 1) - Complex(0.6, 0)) < 1e-14);
    CHECK(std::abs(g(1, 0) - Complex(0.6, 0)) < 1e-14);

    SECTION("uniform set gives identity") {
        Matrix gi = gram_matrix(profile_of({0.25, 0.25, 0.25, 0.25}));
        CHECK((gi - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("circulant, Hermitian, unit diagonal") {
        SetProfile p = profile_of({0.5, 0.3, 0.2});
        Matrix gm = gram_matrix(p);
        CHECK((gm - gm.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
        for (int j = 0; j < 3; ++j) {
            CHECK(std::abs(gm(j, j) - Complex(1, 0)) < 1e-14);
            for (int k = 0; k < 3; ++k)
                CHECK(std::abs(gm(j, k) - gm((j + 1) % 3, (k + 1) % 3)) < 1e-14);
        }
        // matches the direct inner products
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                Complex ip = nu_state(p, j).amplitudes.dot(nu_state(p, k).amplitudes);
                CHECK(std::abs(gm(j, k) - ip) < 1e-13);
            }
    }
}

TEST_CASE("Gram determinant closed form") {
    SetProfile prof = profile_of({0.8, 0.2});
    // 2^2 * 0.8 * 0.2 = 0.64
    CHECK(gram_determinant(prof) == Catch::Approx(0.64).margin(1e-14));
    CHECK(std::abs(gram_matrix(prof).determinant() - Complex(0.64, 0)) < 1e-13);

    SECTION("closed form tracks the direct determinant") {
        for (const auto& g2 : std::vector<std::vector<double>>{
                 {0.5, 0.3, 0.2}, {0.4, 0.4, 0.2}, {0.7, 0.1, 0.1, 0.1}}) {
            SetProfile p = profile_of(g2);
            CHECK(gram_determinant(p) ==
                  Catch::Approx(gram_matrix(p).determinant().real()).margin(1e-12));
        }
    }
    SECTION("vanishing coefficient means linear dependence") {
        SchmidtChannel ch =
            make_channel(2, 3, {0.6, 0.8},
                         {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0});
        CHECK(gram_determinant(set_profile(ch, 0)) > 0.0);
        CHECK(is_linearly_independent(set_profile(ch, 0)));
        for (int s : {1, 2}) {
            SetProfile p = set_profile(ch, s);
            CHECK(gram_determinant(p) == 0.0);
            CHECK_FALSE(is_linearly_independent(p));
        }
    }
}

TEST_CASE("minimum-error outcome statistics") {
    SECTION("uniform set is discriminated perfectly") {
        SetProfile uni = profile_of({1.0 / 3, 1.0 / 3, 1.0 / 3});
        for (int l = 0; l < 3; ++l) {
            std::vector<double> p = me_outcome_distribution(uni, l);
            for (int m = 0; m < 3; ++m)
                CHECK(p[m] == Catch::Approx(m == l ? 1.0 : 0.0).margin(1e-14));
        }
    }
    SECTION("two-state example") {
        // P(l|l) = ((Gamma_0 + Gamma_1)/sqrt(2))^2 = (sqrt(.8)+sqrt(.2))^2/2 = 0.9
        SetProfile prof = profile_of({0.8, 0.2});
        std::vector<double> p = me_outcome_distribution(prof, 0);
        CHECK(p[0] == Catch::Approx(0.9).margin(1e-12));
        CHECK(p[1] == Catch::Approx(0.1).margin(1e-12));
    }
    SECTION("normalization and covariance") {
        SetProfile prof = profile_of({0.5, 0.3, 0.2});
        std::vector<double> base = me_outcome_distribution(prof, 0);
        double total = 0.0;
        for (double x : base) total += x;
        CHECK(total == Catch::Approx(1.0).margin(1e-12));
        for (int l = 1; l < 3; ++l) {
            std::vector<double> p = me_outcome_distribution(prof, l);
            for (int m = 0; m < 3; ++m)
                CHECK(p[m] == Catch::Approx(base[detail::mod_sub(m, l, 3)]).margin(1e-12));
        }
    }
}

TEST_CASE("maximum-confidence operators") {
    SECTION("uniform set succeeds with certainty") {
        McOperators ops = mc_operators(profile_of({0.25, 0.25, 0.25, 0.25}));
        CHECK(ops.p_succ == Catch::Approx(1.0).margin(1e-14));
    }
    SECTION("success probability N gamma^2") {
        CHECK(mc_operators(profile_of({0.5, 0.3, 0.2})).p_succ ==
              Catch::Approx(0.6).margin(1e-13));
        CHECK(mc_operators(profile_of({0.8, 0.2})).p_succ ==
              Catch::Approx(0.4).margin(1e-13));
    }
    SECTION("completeness on the full space") {
        SchmidtChannel ch =
            make_channel(3, 3, {std::sqrt(0.5), std::sqrt(0.5), 0.0},
                         {1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0)});
        McOperators ops = mc_operators(set_profile(ch, 0));
        Matrix sum = ops.a_succ.adjoint() * ops.a_succ + ops.a_fail.adjoint() * ops.a_fail;
        CHECK((sum - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("success branch equalizes the coefficients") {
        SetProfile prof = profile_of({0.5, 0.3, 0.2});
        McOperators ops = mc_operators(prof);
        Vector out = ops.a_succ * nu_state(prof, 0).amplitudes;
        out.normalize();
        for (int q = 0; q < 3; ++q)
            CHECK(std::abs(out[q]) == Catch::Approx(1.0 / std::sqrt(3.0)).margin(1e-13));
    }
}

TEST_CASE("unitary dilation of the MC measurement") {
    for (const auto& g2 : std::vector<std::vector<double>>{
             {0.8, 0.2}, {0.5, 0.3, 0.2}, {0.4, 0.4, 0.2}, {0.25, 0.25, 0.25, 0.25}}) {
        SetProfile prof = profile_of(g2);
        McOperators ops = mc_operators(prof);
        Matrix u = embed_mc_unitary(ops);
        REQUIRE(is_unitary(u, 1e-12));

        // ancilla-0 probability after U on |nu_0>|0> equals p_succ
        int dim = static_cast<int>(g2.size());
        Vector in = Vector::Zero(2 * dim);
        Vector nu = nu_state(prof, 0).amplitudes;
        for (int q = 0; q < dim; ++q) in[2 * q] = nu[q];
        Vector out = u * in;
        double p0 = 0.0;
        for (int q = 0; q < dim; ++q) p0 += std::norm(out[2 * q]);
        REQUIRE(p0 == Catch::Approx(ops.p_succ).margin(1e-12));
    }
}

TEST_CASE("sequential stage recursion") {
    SECTION("worked example (0.5, 0.3, 0.2)") {
        SmcStage st0 = initial_stage(profile_of({0.5, 0.3, 0.2}));
        CHECK(st0.p_succ_next == Catch::Approx(0.6).margin(1e-13));

        SmcAdvance adv1 = smc_advance(st0);
        const SmcStage& st1 = adv1.failure_stage;
        // Gamma^(1)^2 = (0.3, 0.1, 0) / 0.4 = (0.75, 0.25, 0)
        CHECK(st1.gamma[0] * st1.gamma[0] == Catch::Approx(0.75).margin(1e-12));
        CHECK(st1.gamma[1] * st1.gamma[1] == Catch::Approx(0.25).margin(1e-12));
        CHECK(st1.gamma[2] == 0.0);
        CHECK(st1.support_size == 2);
        CHECK(st1.p_succ_next == Catch::Approx(0.5).margin(1e-12));

        SmcAdvance adv2 = smc_advance(st1);
        const SmcStage& st2 = adv2.failure_stage;
        // Gamma^(2)^2 = (0.5, 0, 0) / 0.5 = (1, 0, 0): deterministic
        CHECK(st2.gamma[0] == Catch::Approx(1.0).margin(1e-12));
        CHECK(st2.support_size == 1);
        CHECK(st2.p_succ_next == Catch::Approx(1.0).margin(1e-12));
        CHECK_THROWS_AS(smc_advance(st2), exhausted_stages_error);
    }
    SECTION("degenerate class leaves as one block") {
        SmcStage st0 = initial_stage(profile_of({0.4, 0.4, 0.2}));
        SmcAdvance adv = smc_advance(st0);
        const SmcStage& st1 = adv.failure_stage;
        CHECK(st1.support_size == 2);
        CHECK(st1.p_succ_next == Catch::Approx(1.0).margin(1e-12));
        CHECK_THROWS_AS(smc_advance(st1), exhausted_stages_error);
    }
    SECTION("uniform set has no failure branch") {
        CHECK_THROWS_AS(smc_advance(initial_stage(profile_of({0.5, 0.5}))),
                        exhausted_stages_error);
    }
    SECTION("stage counting from multiplicities") {
        CHECK(max_useful_stages(profile_of({0.5, 0.3, 0.2})) == 2);
        CHECK(allowed_stages(profile_of({0.5, 0.3, 0.2})) == 3);
        CHECK(max_useful_stages(profile_of({0.5, 0.5})) == 0);
        CHECK(max_useful_stages(profile_of({0.4, 0.4, 0.2})) == 1);
    }
    SECTION("support size drops by the removed multiplicity") {
        // removal order: drop 0.1 (leaves 0.5, 0.25, 0.25), then the
        // degenerate 0.25 pair together (leaves a single point)
        SmcStage cur = initial_stage(profile_of({0.4, 0.25, 0.25, 0.1}));
        std::vector<int> sizes{cur.support_size};
        while (cur.support_size >= 2 && cur.p_succ_next < 1.0 - 1e-12) {
            cur = smc_advance(cur).failure_stage;
            sizes.push_back(cur.support_size);
        }
        CHECK(sizes == std::vector<int>{4, 3, 1});
    }
    SECTION("failure branch respects the set symmetry") {
        SetProfile prof = profile_of({0.5, 0.3, 0.2});
        McOperators ops = mc_operators(prof);
        Vector fail0 = ops.a_fail * nu_state(prof, 0).amplitudes;
        for (int l = 1; l < 3; ++l) {
            Vector fl = ops.a_fail * nu_state(prof, l).amplitudes;
            Vector pred = phase_op(3, l) * fail0;
            CHECK((fl - pred).cwiseAbs().maxCoeff() < 1e-13);
        }
    }
}

TEST_CASE("stage ladder and cumulative success") {
    SetProfile prof = profile_of({0.5, 0.3, 0.2});

    SmcLadder ladder = smc_ladder(prof, 2);
    REQUIRE(ladder.p_succ.size() == 2);
    CHECK(ladder.p_succ[0] == Catch::Approx(0.6).margin(1e-12));
    CHECK(ladder.p_succ[1] == Catch::Approx(0.5).margin(1e-12));
    CHECK(ladder.has_residual(2));

    // total conclusive probability through 2 stages: 0.6 + 0.4*0.5 = 0.8
    CHECK(smc_cumulative_success(ladder.p_succ, 2) == Catch::Approx(0.8).margin(1e-12));
    CHECK(smc_cumulative_success(ladder.p_succ, 1) == Catch::Approx(0.6).margin(1e-12));

    SECTION("cumulative success is monotone in the stage cap") {
        SmcLadder full = smc_ladder(prof, allowed_stages(prof));
        double prev = 0.0;
        for (int b = 1; b <= static_cast<int>(full.p_succ.size()); ++b) {
            double cur = smc_cumulative_success(full.p_succ, b);
            CHECK(cur >= prev - 1e-14);
            prev = cur;
        }
        // the final allowed stage is deterministic, so the total reaches 1
        CHECK(prev == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("ladder stops at a deterministic stage") {
        SmcLadder deep = smc_ladder(prof, 10);
        CHECK(deep.p_succ.size() == 3);
        CHECK(deep.p_succ.back() == Catch::Approx(1.0).margin(1e-12));
        CHECK_FALSE(deep.has_residual(10));
    }
}

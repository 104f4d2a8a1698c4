// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "riskbid/errors.hpp"
#include "riskbid/fpa.hpp"

using namespace riskbid;

namespace {

ValueModel uniform(int n) { return ValueModel::iid(0.0, 1.0, n, UniformDist{0.0, 1.0}); }

ValueModel mixture(int n) {
    return ValueModel::mixture(0.0, 1.0, n, {{0.5, UniformDist{0.0, 1.0}}, {0.5, PowerDist{2.0}}});
}

FpaScenario scenario(ValueModel vm, UtilitySpec u = {}) {
    FpaScenario sc{std::move(vm)};
    sc.utility = u;
    return sc;
}

}  // namespace

TEST(WinProb, WorkedExamples) {
    const auto vm = uniform(3);
    EXPECT_DOUBLE_EQ(win_prob(vm, 0.3, 0.5), 0.25);
    EXPECT_DOUBLE_EQ(win_prob(vm, 0.3, 1.0), 1.0);
    EXPECT_DOUBLE_EQ(win_prob(vm, 0.3, 0.0), 0.0);
    EXPECT_THROW(win_prob(vm, 0.3, 1.5), DomainError);
}

TEST(WinProb, MixtureUsesPosteriorWeights) {
    const auto vm = mixture(3);
    // Posterior at v = 0.5: weights proportional to (1, 2 * 0.5) -> (0.5, 0.5).
    EXPECT_NEAR(win_prob(vm, 0.5, 0.5), 0.5 * 0.25 + 0.5 * std::pow(0.25, 2), 1e-14);
    double prev = 0.0;
    for (double t = 0.0; t <= 1.0; t += 0.05) {
        const double q = win_prob(vm, 0.7, t);
        EXPECT_GE(q, prev);
        prev = q;
    }
}

TEST(Hazard, WorkedExamples) {
    EXPECT_NEAR(hazard(uniform(3), 0.5), 4.0, 1e-12);
    EXPECT_NEAR(hazard(uniform(2), 0.25), 4.0, 1e-12);
    EXPECT_NEAR(hazard(ValueModel::iid(0.0, 1.0, 2, PowerDist{2.0}), 0.5), 4.0, 1e-12);
    EXPECT_THROW(hazard(uniform(3), 0.0), SingularHazard);
}

TEST(Hazard, ClosedFormMatchesFiniteDifference) {
    const std::vector<ValueModel> models{
        uniform(4), ValueModel::iid(0.0, 1.0, 3, PowerDist{2.0}), mixture(3),
        ValueModel::iid(1.0, 3.0, 3, TruncatedNormalDist{2.0, 0.5, 1.0, 3.0})};
    for (const auto& vm : models) {
        for (int i = 1; i <= 100; ++i) {
            const double v = vm.lo() + vm.span() * (0.02 + 0.96 * i / 100.0);
            const double h = hazard(vm, v);
            EXPECT_GT(h, 0.0);
            EXPECT_NEAR(hazard_fd(vm, v), h, 1e-5 * h) << "v = " << v;
        }
    }
}

TEST(MarginalTradeoff, WorkedExamples) {
    EXPECT_DOUBLE_EQ(marginal_tradeoff(UtilitySpec{}, 2.0, 0.0), 2.0);
    EXPECT_NEAR(marginal_tradeoff(UtilitySpec{Crra{0.5}}, 1.0, 0.0), 2.0, 1e-14);
    EXPECT_NEAR(marginal_tradeoff(UtilitySpec{Crra{0.5}}, 4.0, 0.0), 8.0, 1e-13);
    EXPECT_THROW(marginal_tradeoff(UtilitySpec{}, 1.0, 1.0), NonpositiveSurplus);
    EXPECT_THROW(marginal_tradeoff(UtilitySpec{Crra{2.0}}, 1.0, -1.0), DomainError);
}

TEST(MarginalTradeoff, TransformRaisesAndStaysIncreasing) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<UtilitySpec> bases{{Linear{}}, {Crra{0.4}, 1.0}, {Cara{1.5}}, {CrraLog{}, 1.0}};
    const std::vector<TransformSpec> transforms{{{Crra{0.3}, 2.0}}, {{Cara{2.0}}}, {{CrraLog{}, 3.0}},
                                                {{PiecewiseLinear{{{-5.0, 2.0}, {0.5, 0.5}}}}}};
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& u = bases[trial % bases.size()];
        const auto& phi = transforms[(trial / bases.size()) % transforms.size()];
        const Utility base(u), hat(u, phi);
        const double s = 2.0 * unit(rng) - 0.5;
        const double x = s + 1e-3 + 2.0 * unit(rng);
        const double y = x + 1e-3 + unit(rng);
        const double m = marginal_tradeoff(base, x, s);
        const double m_hat = marginal_tradeoff(hat, x, s);
        EXPECT_GE(m_hat, m - 1e-10);
        EXPECT_GT(marginal_tradeoff(hat, y, s), m_hat);
    }
}

TEST(ClosedForm, Coefficients) {
    EXPECT_DOUBLE_EQ(closed_form_crra_uniform(2, 0.0), 0.5);
    EXPECT_DOUBLE_EQ(closed_form_crra_uniform(3, 0.5), 0.8);
    EXPECT_DOUBLE_EQ(closed_form_crra_uniform(5, 0.0), 0.8);
    EXPECT_THROW(closed_form_crra_uniform(1, 0.0), PreconditionError);
    EXPECT_THROW(closed_form_crra_uniform(2, 1.0), PreconditionError);
}

TEST(SolveFpa, MatchesLinearBidsUnderCrra) {
    for (int n : {2, 3, 5}) {
        for (double rho : {0.0, 0.3, 0.5, 0.8}) {
            const UtilitySpec u = rho == 0.0 ? UtilitySpec{} : UtilitySpec{Crra{rho}};
            const auto sol = solve_fpa(scenario(uniform(n), u));
            const double c = closed_form_crra_uniform(n, rho);
            ASSERT_EQ(sol.grid.size(), 257u);
            EXPECT_TRUE(sol.monotone);
            EXPECT_TRUE(sol.warnings.empty());
            for (std::size_t i = 0; i < sol.grid.size(); ++i) {
                if (sol.grid[i] < 0.01) continue;
                EXPECT_NEAR(sol.bids[i], c * sol.grid[i], 1e-4 * c * sol.grid[i]) << n << " " << rho;
            }
            EXPECT_NEAR(sol.bid(0.5), 0.5 * c, 1e-6);
        }
    }
}

TEST(SolveFpa, SolutionInvariants) {
    auto sc = scenario(mixture(3), UtilitySpec{Cara{2.0}});
    sc.outside = AffineOutside{0.02, 0.05};
    const auto sol = solve_fpa(sc);
    for (std::size_t i = 0; i < sol.grid.size(); ++i) {
        const double v = sol.grid[i];
        const double s = outside_value(sc.outside, v);
        EXPECT_LT(sol.bids[i], v - s);
        if (i > 0) EXPECT_GT(sol.bids[i], sol.bids[i - 1]);
        const double slope = hazard(sc.values, v) * marginal_tradeoff(Utility(sc.utility), v - sol.bids[i], s);
        EXPECT_LE(sol.residuals[i], 10.0 * sc.ode_tol * (1.0 + std::abs(slope)));
    }
    EXPECT_DOUBLE_EQ(sol.grid.back(), 1.0);
}

TEST(SolveFpa, InsensitiveToStartOffset) {
    auto sc = scenario(uniform(3), UtilitySpec{Crra{0.5}});
    sc.start_offset = 1e-7;
    const auto a = solve_fpa(sc);
    sc.start_offset = 1e-5;
    const auto b = solve_fpa(sc);
    for (double v : {0.05, 0.3, 0.7, 1.0}) EXPECT_NEAR(a.bid(v), b.bid(v), 1e-6);
}

TEST(SolveFpa, ValidationErrors) {
    auto sc = scenario(uniform(2));
    sc.grid = 32;
    EXPECT_THROW(solve_fpa(sc), ConfigError);
    sc = scenario(uniform(2));
    sc.boundary_bid = 0.1;
    EXPECT_THROW(solve_fpa(sc), ConfigError);
    sc = scenario(uniform(2));
    sc.outside = AffineOutside{0.0, 2.0};
    EXPECT_THROW(solve_fpa(sc), ConfigError);  // v - b_lo <= s(v) at every interior v
    sc = scenario(uniform(2));
    sc.ode_tol = 0.0;
    EXPECT_THROW(solve_fpa(sc), ConfigError);
    sc = scenario(uniform(2));
    sc.start_offset = 0.5;
    EXPECT_THROW(solve_fpa(sc), ConfigError);
}

TEST(SolveFpa, UtilityDomainBreachIsASolverError) {
    // ln(x + 0.01) is undefined once the surplus goes below -0.01.
    auto sc = scenario(uniform(2), UtilitySpec{CrraLog{}, 0.01});
    sc.outside = ConstantOutside{-0.2};
    sc.boundary_bid = 0.0;
    EXPECT_THROW(solve_fpa(sc), SolverError);
}

TEST(CompareFpa, CrraTransformRaisesBids) {
    auto sc = scenario(uniform(2));
    sc.transform = TransformSpec{{Crra{0.5}}};
    const auto r = compare_risk_aversion_fpa(sc);
    EXPECT_TRUE(r.ordering_holds);
    EXPECT_GE(r.min_d, 0.0);
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        const double v = r.grid[i];
        if (v < 0.01) continue;
        EXPECT_NEAR(r.beta_hat[i], 2.0 * v / 3.0, 1e-4 * v);
        EXPECT_NEAR(r.beta[i], v / 2.0, 1e-4 * v);
    }
}

TEST(CompareFpa, LinearTransformLeavesBidsUnchanged) {
    auto sc = scenario(mixture(3), UtilitySpec{Cara{1.0}});
    sc.transform = TransformSpec{{Linear{}}};
    const auto r = compare_risk_aversion_fpa(sc);
    EXPECT_LE(std::max(std::abs(r.min_d), std::abs(r.max_d)), 1e-10);
}

TEST(CompareFpa, PowerValuesWithCara) {
    auto sc = scenario(ValueModel::iid(0.0, 1.0, 3, PowerDist{2.0}));
    sc.transform = TransformSpec{{Cara{2.0}}};
    const auto r = compare_risk_aversion_fpa(sc);
    EXPECT_GE(r.min_d, -1e-7);
    EXPECT_GT(r.max_d, 0.0);
    sc.transform.reset();
    EXPECT_THROW(compare_risk_aversion_fpa(sc), ConfigError);
}

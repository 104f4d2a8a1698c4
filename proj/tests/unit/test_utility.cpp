// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "riskbid/errors.hpp"
#include "riskbid/utility.hpp"

using namespace riskbid;

namespace {

std::vector<UtilitySpec> families() {
    return {
        UtilitySpec{Linear{}, 0.0},
        UtilitySpec{Crra{0.5}, 0.0},
        UtilitySpec{Crra{2.0}, 1.0},
        UtilitySpec{CrraLog{}, 1.0},
        UtilitySpec{Cara{2.0}, 0.0},
        UtilitySpec{PiecewiseLinear{{{0.0, 2.0}, {1.0, 1.0}, {3.0, 0.25}}}, 0.0},
    };
}

}  // namespace

TEST(Utility, WorkedValues) {
    EXPECT_DOUBLE_EQ(eval_utility({Linear{}, 0.0}, 2.0), 2.0);
    EXPECT_DOUBLE_EQ(eval_utility({Crra{0.5}, 0.0}, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(eval_utility({Cara{1.0}, 0.0}, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(eval_utility({CrraLog{}, 0.0}, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(eval_utility({Linear{}, 1.5}, 2.0), 3.5);
}

TEST(Utility, WorkedDerivatives) {
    EXPECT_DOUBLE_EQ(eval_utility_deriv({Linear{}, 0.0}, 3.0), 1.0);
    EXPECT_DOUBLE_EQ(eval_utility_deriv({Crra{0.5}, 0.0}, 4.0), 0.5);
    EXPECT_DOUBLE_EQ(eval_utility_deriv({Cara{2.0}, 0.0}, 0.0), 2.0);
}

TEST(Utility, DomainBoundaries) {
    EXPECT_THROW(eval_utility({Crra{1.5}, 0.0}, 0.0), DomainError);
    EXPECT_THROW(eval_utility({CrraLog{}, 0.0}, -0.1), DomainError);
    EXPECT_NO_THROW(eval_utility({Crra{0.5}, 0.0}, 0.0));
    EXPECT_THROW(eval_utility({Crra{0.5}, 0.0}, -1e-9), DomainError);
    EXPECT_THROW(eval_utility_deriv({Crra{0.5}, 0.0}, 0.0), DomainError);
    EXPECT_NO_THROW(eval_utility({Crra{1.5}, 1.0}, -0.5));
}

TEST(Utility, ValidationRejectsBadParameters) {
    EXPECT_THROW(validate({Crra{1.0}, 0.0}), ConfigError);
    EXPECT_THROW(validate({Crra{-0.1}, 0.0}), ConfigError);
    EXPECT_THROW(validate({Cara{0.0}, 0.0}), ConfigError);
    EXPECT_THROW(validate({PiecewiseLinear{{{0.0, 1.0}, {1.0, 2.0}}}, 0.0}), ConfigError);
    EXPECT_THROW(validate({PiecewiseLinear{{{1.0, 1.0}, {0.0, 0.5}}}, 0.0}), ConfigError);
    EXPECT_THROW(validate({PiecewiseLinear{}, 0.0}), ConfigError);
}

TEST(Utility, DerivativeMatchesCentralDifference) {
    const double h = 1e-5;
    for (const auto& u : families()) {
        for (double x : {0.3, 0.7, 1.9, 4.2}) {
            if (std::holds_alternative<PiecewiseLinear>(u.family) && (x == 1.9 || x == 0.7)) continue;
            const double fd = (eval_utility(u, x + h) - eval_utility(u, x - h)) / (2 * h);
            const double d = eval_utility_deriv(u, x);
            EXPECT_NEAR(d, fd, 1e-6 * std::abs(d)) << family_name(u) << " at " << x;
        }
    }
}

TEST(Utility, PiecewiseLinearIsContinuousAtKinks) {
    const UtilitySpec u{PiecewiseLinear{{{0.0, 2.0}, {1.0, 1.0}, {3.0, 0.25}}}, 0.0};
    EXPECT_DOUBLE_EQ(eval_utility(u, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(eval_utility(u, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(eval_utility(u, 3.0), 4.0);
    EXPECT_DOUBLE_EQ(eval_utility(u, 5.0), 4.5);
    EXPECT_DOUBLE_EQ(eval_utility(u, -1.0), -2.0);
    EXPECT_DOUBLE_EQ(eval_utility_deriv(u, 1.0), 1.0);  // right slope at a kink
}

TEST(Utility, ComposedUtilityIsIncreasingAndConcave) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> x_dist(0.05, 5.0), lam(0.01, 0.99);
    const std::vector<TransformSpec> transforms{
        {UtilitySpec{Crra{0.5}, 0.0}}, {UtilitySpec{Cara{1.5}, 0.0}}, {UtilitySpec{CrraLog{}, 3.0}},
        {UtilitySpec{PiecewiseLinear{{{-10.0, 1.0}, {1.0, 0.2}}}, 0.0}}};
    for (const auto& base : families()) {
        for (const auto& phi : transforms) {
            const Utility u(base, phi);
            for (int i = 0; i < 1000; ++i) {
                double x = x_dist(rng), y = x_dist(rng);
                if (x == y) continue;
                if (x > y) std::swap(x, y);
                if (!u.in_domain(x) || !u.in_domain(y)) continue;
                ASSERT_LT(u(x), u(y));
                const double l = lam(rng);
                ASSERT_GE(u(l * x + (1 - l) * y), l * u(x) + (1 - l) * u(y) - 1e-10);
            }
        }
    }
}

TEST(Utility, CompositionChainRule) {
    const Utility u(UtilitySpec{Crra{0.5}, 0.0}, TransformSpec{UtilitySpec{Cara{1.0}, 0.0}});
    const double x = 2.0;
    const double inner = 2.0 * std::sqrt(x);
    EXPECT_NEAR(u(x), 1.0 - std::exp(-inner), 1e-15);
    EXPECT_NEAR(u.derivative(x), std::exp(-inner) / std::sqrt(x), 1e-15);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "interf/equivalence.hpp"
#include "interf/validate.hpp"

using namespace interf;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(Identity, BothSidesUnityAtOrigin) {
    for (double nbar : {1.0, 20.0, 100.0}) {
        const auto r = check_identity(nbar, 0.0);
        EXPECT_NEAR(r.lhs_mu, 1.0, 1e-11);
        EXPECT_NEAR(r.rhs_parity, 1.0, 1e-11);
    }
}

TEST(Identity, HighPowerNearOrigin) {
    const auto r = check_identity(100.0, 0.1);
    EXPECT_LT(r.abs_diff, 1e-10);
    EXPECT_NEAR(r.lhs_mu, std::exp(-200.0 * std::pow(std::sin(0.05), 2)), 1e-10);
}

TEST(Identity, ThirdOfATurn) {
    // 2 nbar sin^2(pi/6) = 2 at nbar = 4
    const auto r = check_identity(4.0, pi / 3);
    EXPECT_NEAR(r.lhs_mu, std::exp(-2.0), 1e-11);
    EXPECT_NEAR(r.rhs_parity, std::exp(-2.0), 1e-11);
}

TEST(Identity, HoldsForAnyFixedCutoff) {
    // an operator identity: truncation changes both sides alike
    for (int K : {3, 8, 15}) {
        const auto r = check_identity(9.0, 0.7, CutoffPolicy{default_tail_tol, K});
        EXPECT_EQ(r.cutoff, K);
        EXPECT_LT(r.abs_diff, 1e-13);
        EXPECT_GT(std::abs(r.lhs_mu - r.closed_form), 1e-6); // grid is too small for the closed form
    }
}

TEST(Identity, StandardGridSweep) {
    const std::vector<double> nbars{1.0, 4.0, 20.0, 100.0};
    const auto phis = phase_grid(-pi, pi, 33);
    const auto sweep = sweep_identity(nbars, phis);
    ASSERT_EQ(sweep.reports.size(), 4u * 33u);
    EXPECT_LT(sweep.max_abs_diff, 1e-9);
    EXPECT_LT(sweep.max_closed_form_diff, 1e-9);
    // nbar-major ordering
    EXPECT_EQ(sweep.reports[33].nbar, 4.0);
    EXPECT_EQ(sweep.reports[33].phi, -pi);
}

TEST(Identity, EmptyGrid) {
    const std::vector<double> none;
    const std::vector<double> phis{0.1};
    const auto sweep = sweep_identity(none, phis);
    EXPECT_TRUE(sweep.reports.empty());
    EXPECT_EQ(sweep.max_abs_diff, 0.0);
}

TEST(Identity, SinglePoint) {
    const std::vector<double> nb{20.0}, ph{0.25};
    const auto sweep = sweep_identity(nb, ph);
    ASSERT_EQ(sweep.reports.size(), 1u);
    EXPECT_EQ(sweep.max_abs_diff, check_identity(20.0, 0.25).abs_diff);
}

TEST(Identity, FlippedConventionBreaksIt) {
    const auto r = check_identity(4.0, 0.0, {}, flipped_convention());
    // the bright port carries all four photons on average: parity e^{-8}
    EXPECT_NEAR(r.rhs_parity, std::exp(-8.0), 1e-10);
    EXPECT_GT(r.abs_diff, 0.9);

    const std::vector<double> nbars{1.0, 4.0, 20.0, 100.0};
    const auto phis = phase_grid(-pi, pi, 33);
    EXPECT_GT(sweep_identity(nbars, phis, {}, flipped_convention()).max_abs_diff, 1e-9);
}

TEST(Identity, RejectsBadPower) {
    EXPECT_THROW(check_identity(-1.0, 0.0), domain_error);
}

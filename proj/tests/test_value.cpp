#include <gtest/gtest.h>

#include <cmath>

#include "mvdiv/error.hpp"
#include "mvdiv/value.hpp"
#include "oracle.hpp"

using namespace mvdiv;

namespace {

const ModelParams kAnchor(1.0, 0.25, 0.2, 0.13);

ClosedFormSolution candidate(double gamma) {
    const ModelParams p = kAnchor.with_risk_aversion(gamma);
    return build_solution(p, solve_barrier(p).x_tilde);
}

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-12); }

template <class F>
double central_first(F f, double x, double h) { return (f(x + h) - f(x - h)) / (2 * h); }

}  // namespace

TEST(ClosedForm, ConstantsPositiveAndMatchOracle) {
    const auto sol = candidate(0.13);
    EXPECT_GT(sol.c1(), 0.0);
    EXPECT_GT(sol.c3(), 0.0);
    const long double xt = sol.barrier();
    const auto r = oracle::roots(1.0L, 0.25L, 0.2L);
    const long double c1 = 1 / (r.r1 * std::exp(r.r1 * xt) - r.r2 * std::exp(r.r2 * xt));
    EXPECT_LT(rel(sol.c1(), static_cast<double>(c1)), 1e-12);
}

TEST(ClosedForm, DegenerateBarrierRejected) {
    EXPECT_THROW(build_solution(kAnchor, 0.0), Error);
    try {
        build_solution(kAnchor, -1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DegenerateBarrier);
    }
}

TEST(ClosedForm, MatchesUnscaledOracleOnBothBranches) {
    for (double g : {0.0, 0.06, 0.13, 0.15}) {
        const auto sol = candidate(g);
        const double xt = sol.barrier();
        for (double x : {0.0, 0.01, 0.1, 0.2, 0.3, xt, xt + 0.5, xt + 3.0}) {
            const auto o = oracle::moments(1.0L, 0.25L, 0.2L, g, xt, x);
            const Jet G = sol.mean(x), H = sol.second_moment(x), V = sol.value(x);
            EXPECT_NEAR(G.value, static_cast<double>(o.g), 1e-12 * (1 + std::abs(G.value))) << g << ' ' << x;
            EXPECT_NEAR(G.slope, static_cast<double>(o.g1), 1e-11 * (1 + std::abs(G.slope)));
            EXPECT_NEAR(H.value, static_cast<double>(o.h), 1e-12 * (1 + std::abs(H.value)));
            EXPECT_NEAR(H.slope, static_cast<double>(o.h1), 1e-11 * (1 + std::abs(H.slope)));
            EXPECT_NEAR(V.value, static_cast<double>(o.v), 1e-12 * (1 + std::abs(V.value)));
            if (x != xt) EXPECT_NEAR(V.curvature, static_cast<double>(o.v2), 1e-9 * (1 + std::abs(V.curvature)));
        }
    }
}

TEST(ClosedForm, BoundaryAndLinearBranch) {
    const auto sol = candidate(0.13);
    EXPECT_EQ(sol.mean(0.0).value, 0.0);
    EXPECT_EQ(sol.second_moment(0.0).value, 0.0);
    EXPECT_EQ(sol.value(0.0).value, 0.0);
    const double xt = sol.barrier();
    EXPECT_NEAR(sol.mean(xt + 1.0).value, sol.mean(xt).value + 1.0, 1e-14);
    for (double x : {xt, xt + 0.1, xt + 7.0}) EXPECT_NEAR(sol.value(x).slope, 1.0, 1e-14);
}

TEST(ClosedForm, ValueIdentityFromMoments) {
    const auto sol = candidate(0.13);
    for (int i = 0; i <= 100; ++i) {
        const double x = 0.01 * i;
        const double g = sol.mean(x).value, h = sol.second_moment(x).value;
        EXPECT_NEAR(sol.value(x).value, g - 0.065 * (h - g * g), 1e-14);
    }
}

TEST(ClosedForm, SmoothPasting) {
    for (double g : {0.0, 0.05, 0.13, 0.15}) {
        const auto sol = candidate(g);
        const double xt = sol.barrier();
        const double gt = sol.mean(xt).value;
        EXPECT_NEAR(sol.mean(xt, Side::Left).slope, 1.0, 1e-10);
        EXPECT_NEAR(sol.mean(xt, Side::Right).slope, 1.0, 1e-10);
        EXPECT_NEAR(sol.second_moment(xt, Side::Left).slope, 2.0 * gt, 1e-10);
        EXPECT_NEAR(sol.second_moment(xt, Side::Right).slope, 2.0 * gt, 1e-10);
        EXPECT_LE(std::abs(sol.value(xt, Side::Left).curvature), 1e-8);
        EXPECT_LE(std::abs(sol.value(xt, Side::Right).curvature), 1e-8);
    }
}

TEST(ClosedForm, FiniteDifferenceDerivatives) {
    const double h = 1e-6;
    for (double g : {0.01, 0.13}) {
        const auto sol = candidate(g);
        const double xt = sol.barrier();
        for (int i = 1; i < 400; ++i) {
            const double x = 0.005 * i;
            if (std::abs(x - xt) < 1e-3) continue;
            auto G = [&](double y) { return sol.mean(y).value; };
            auto H = [&](double y) { return sol.second_moment(y).value; };
            auto V = [&](double y) { return sol.value(y).value; };
            auto V1 = [&](double y) { return sol.value(y).slope; };
            auto G1 = [&](double y) { return sol.mean(y).slope; };
            EXPECT_LT(rel(central_first(G, x, h), sol.mean(x).slope), 1e-6) << x;
            EXPECT_LT(rel(central_first(H, x, h), sol.second_moment(x).slope), 1e-6) << x;
            EXPECT_LT(rel(central_first(V, x, h), sol.value(x).slope), 1e-6) << x;
            if (x < xt) {
                EXPECT_LT(rel(central_first(G1, x, h), sol.mean(x).curvature), 1e-6) << x;
                EXPECT_LT(rel(central_first(V1, x, h), sol.value(x).curvature), 1e-6) << x;
            } else {
                EXPECT_NEAR(central_first(V1, x, h), sol.value(x).curvature, 1e-6) << x;
            }
        }
    }
}

TEST(ClosedForm, OdeResidualsByFiniteDifference) {
    const auto sol = candidate(0.13);
    const double h = 1e-4;
    for (int i = 1; i < 30; ++i) {
        const double x = 0.01 * i;
        auto G = [&](double y) { return sol.mean(y).value; };
        auto H = [&](double y) { return sol.second_moment(y).value; };
        const double g2 = (G(x + h) - 2 * G(x) + G(x - h)) / (h * h);
        const double h2 = (H(x + h) - 2 * H(x) + H(x - h)) / (h * h);
        const double g1 = central_first(G, x, h), h1 = central_first(H, x, h);
        const double g_scale = std::abs(0.5 * 0.0625 * g2) + std::abs(g1) + std::abs(0.2 * G(x));
        const double h_scale = std::abs(0.5 * 0.0625 * h2) + std::abs(h1) + std::abs(0.4 * H(x));
        EXPECT_LT(std::abs(0.5 * 0.0625 * g2 + g1 - 0.2 * G(x)), 1e-5 * g_scale) << x;
        EXPECT_LT(std::abs(0.5 * 0.0625 * h2 + h1 - 0.4 * H(x)), 1e-5 * h_scale) << x;
    }
}

TEST(ClosedForm, ProductFormCurvatureAgrees) {
    for (double g : {0.0, 0.06, 0.13, 0.15}) {
        const auto sol = candidate(g);
        for (int i = 0; i < 1000; ++i) {
            const double x = sol.barrier() * i / 1000.0;
            const double direct = sol.value(x).curvature;
            const double product = sol.value_curvature_product_form(x);
            EXPECT_LE(std::abs(product - direct), 1e-8 * std::max(std::abs(direct), 1e-3)) << g << ' ' << x;
        }
    }
}

TEST(ClosedForm, NoOverflowFarAboveBarrier) {
    const auto sol = candidate(0.13);
    EXPECT_TRUE(std::isfinite(sol.value(1e3).value));
    EXPECT_TRUE(std::isfinite(sol.second_moment(1e3).value));
    const ModelParams steep(1.0, 0.25, 0.2, 0.13);
    const auto far = build_solution(steep, 500.0);
    EXPECT_TRUE(std::isfinite(far.mean(250.0).value));
    EXPECT_TRUE(std::isfinite(far.value(499.0).curvature));
}

TEST(Concavity, BelowAndAboveThreshold) {
    EXPECT_TRUE(check_concavity(candidate(0.13)).concave);
    const auto bad = check_concavity(candidate(0.15));
    EXPECT_FALSE(bad.concave);
    ASSERT_TRUE(bad.first_violation.has_value());
    EXPECT_GT(*bad.first_violation, 0.0);
    EXPECT_LT(*bad.first_violation, 0.05);
}

TEST(Concavity, NeitherRootConcaveAboveThreshold) {
    const ModelParams p = kAnchor.with_risk_aversion(40.0);
    ScanOptions opt;
    opt.x_max = 2.0;
    for (const auto& r : find_all_roots(p, opt)) EXPECT_FALSE(check_concavity(build_solution(p, r.x_tilde)).concave);
}

TEST(Concavity, SlopeAboveOneInsideWhenConcave) {
    const auto sol = candidate(0.13);
    for (int i = 1; i < 1000; ++i) EXPECT_GT(sol.value(sol.barrier() * i / 1000.0).slope, 1.0);
}

TEST(Verify, CandidateBelowThresholdPasses) {
    const auto report = verify_hjb(candidate(0.13));
    EXPECT_TRUE(report.all_pass());
    for (const auto& c : report.conditions)
        if (c.name != "nt.slope_inequality" && c.name != "pay.hjb_inequality") EXPECT_LE(c.worst_residual, 1e-8) << c.name;
    ASSERT_NE(report.find("pasting.value_curvature"), nullptr);
    EXPECT_EQ(report.find("missing"), nullptr);
}

TEST(Verify, TrueBehaviourAtIntermediateRiskAversion) {
    // The candidate at gamma = 0.15 has V' > 1 throughout (0, x~) even though V is
    // convex near 0, so the HJB inequalities hold; only concavity fails.
    const auto sol = candidate(0.15);
    const auto report = verify_hjb(sol);
    EXPECT_TRUE(report.find("nt.slope_inequality")->pass);
    EXPECT_FALSE(check_concavity(sol).concave);
}

TEST(Verify, PayAllAtAndAboveThreshold) {
    for (double g : {32.0, 40.0}) {
        const auto sol = pay_all_solution(kAnchor.with_risk_aversion(g));
        EXPECT_TRUE(verify_hjb(sol).all_pass()) << g;
        for (double x : {0.0, 0.5, 3.0})
            EXPECT_NEAR(value_hjb_term(sol, x), 1.0 - g * 0.0625 / 2.0 - 0.2 * x, 1e-14);
    }
}

TEST(Verify, PayAllClosedForms) {
    const auto sol = pay_all_solution(kAnchor.with_risk_aversion(40.0));
    EXPECT_EQ(sol.value(5.0).value, 5.0);
    EXPECT_EQ(sol.second_moment(3.0).value, 9.0);
    EXPECT_EQ(sol.barrier(), 0.0);
    EXPECT_THROW(pay_all_solution(kAnchor), Error);
}

TEST(Verify, DetectsWrongBarrier) {
    const ModelParams p = kAnchor;
    const auto report = verify_hjb(build_solution(p, 0.25));
    EXPECT_FALSE(report.all_pass());
    EXPECT_FALSE(report.find("pasting.value_curvature")->pass);
}

TEST(Verify, HjbTermContinuousAtBarrier) {
    const auto sol = candidate(0.13);
    const double xt = sol.barrier();
    EXPECT_NEAR(value_hjb_term(sol, xt, Side::Left), value_hjb_term(sol, xt, Side::Right), 1e-10);
    EXPECT_NEAR(value_hjb_term(sol, xt + 1.0) - value_hjb_term(sol, xt), -0.2, 1e-10);
}

TEST(Equilibrium, Classification) {
    EXPECT_EQ(solve_equilibrium(kAnchor).classification, Classification::BarrierEquilibrium);
    EXPECT_EQ(solve_equilibrium(kAnchor.with_risk_aversion(0.15)).classification, Classification::Indeterminate);
    const auto pay = solve_equilibrium(kAnchor.with_risk_aversion(40.0));
    EXPECT_EQ(pay.classification, Classification::PayAll);
    EXPECT_FALSE(pay.solution.has_value());
}

TEST(Equilibrium, ValueDecreasingInRiskAversion) {
    const auto s1 = candidate(0.01), s2 = candidate(0.06), s3 = candidate(0.13);
    for (int i = 1; i <= 200; ++i) {
        const double x = 0.005 * i;
        EXPECT_GT(s1.value(x).value, s2.value(x).value) << x;
        EXPECT_GT(s2.value(x).value, s3.value(x).value) << x;
    }
}

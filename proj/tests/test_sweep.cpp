#include <gtest/gtest.h>

#include "mvdiv/error.hpp"
#include "mvdiv/sweep.hpp"

using namespace mvdiv;

namespace {

const ModelParams kAnchor(1.0, 0.25, 0.2, 0.13);

SweepSpec spec_for(SweepParameter p, std::vector<double> grid, double gamma = 0.13) {
    SweepSpec s{.varied = p, .grid = std::move(grid), .fixed = kAnchor.with_risk_aversion(gamma)};
    return s;
}

}  // namespace

TEST(Sweep, ParameterNames) {
    for (auto p : {SweepParameter::Gamma, SweepParameter::Rho, SweepParameter::Drift, SweepParameter::Volatility})
        EXPECT_EQ(parse_sweep_parameter(to_string(p)), p);
    EXPECT_FALSE(parse_sweep_parameter("sigma").has_value());
}

TEST(Sweep, LinspaceEndpointsExact) {
    const auto g = linspace(0.001, 0.1397, 50);
    ASSERT_EQ(g.size(), 50u);
    EXPECT_EQ(g.front(), 0.001);
    EXPECT_EQ(g.back(), 0.1397);
    EXPECT_EQ(default_grid(SweepParameter::Rho).front(), 0.05);
    EXPECT_EQ(default_grid(SweepParameter::Volatility, 7).back(), 0.5);
}

TEST(Sweep, BarrierIncreasingInRiskAversion) {
    const auto rows = sweep_barrier(spec_for(SweepParameter::Gamma, default_grid(SweepParameter::Gamma)));
    ASSERT_EQ(rows.size(), 50u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        ASSERT_EQ(rows[i].status, RowStatus::BarrierEquilibrium) << rows[i].value;
        if (i > 0) EXPECT_GT(*rows[i].x_tilde, *rows[i - 1].x_tilde);
    }
}

TEST(Sweep, BarrierDecreasingInDiscountRate) {
    const auto rows = sweep_barrier(spec_for(SweepParameter::Rho, default_grid(SweepParameter::Rho), 0.1396));
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(*rows[i].x_tilde, *rows[i - 1].x_tilde);
}

TEST(Sweep, ContinuityProxy) {
    const auto grid = default_grid(SweepParameter::Gamma, 200);
    const auto rows = sweep_barrier(spec_for(SweepParameter::Gamma, grid));
    const double h = grid[1] - grid[0];
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(*rows[i].x_tilde - *rows[i - 1].x_tilde, 0.1 * h);
}

TEST(Sweep, RowsAreFlaggedNotDropped) {
    const auto rows = sweep_barrier(spec_for(SweepParameter::Gamma, {0.13, 0.15, 32.0, 40.0}));
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].status, RowStatus::BarrierEquilibrium);
    EXPECT_EQ(rows[1].status, RowStatus::Indeterminate);
    EXPECT_TRUE(rows[1].x_tilde.has_value());
    EXPECT_FALSE(*rows[1].concave);
    EXPECT_EQ(rows[2].status, RowStatus::PayAll);
    EXPECT_EQ(rows[3].status, RowStatus::PayAll);

    const auto bad = sweep_barrier(spec_for(SweepParameter::Volatility, {-0.1, 0.25}));
    EXPECT_EQ(bad[0].status, RowStatus::InvalidParams);
    EXPECT_EQ(bad[1].status, RowStatus::BarrierEquilibrium);
}

TEST(Sweep, GridMustAscend) {
    EXPECT_THROW(sweep_barrier(spec_for(SweepParameter::Gamma, {0.1, 0.05})), Error);
    EXPECT_THROW(sweep_barrier(spec_for(SweepParameter::Gamma, {0.1, 0.1})), Error);
}

TEST(Sweep, IndependentOfThreadCount) {
    auto spec = spec_for(SweepParameter::Drift, default_grid(SweepParameter::Drift, 20));
    spec.record_gamma_bar = true;
    spec.threads = 1;
    const auto serial = sweep_barrier(spec);
    spec.threads = 4;
    const auto parallel = sweep_barrier(spec);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_EQ(serial[i].x_tilde, parallel[i].x_tilde);
        EXPECT_EQ(serial[i].gamma_bar, parallel[i].gamma_bar);
    }
}

TEST(GammaBar, AnchorValue) {
    const double gb = gamma_bar(kAnchor, 1e-4);
    EXPECT_NEAR(gb, 0.1397, 1e-3);
    EXPECT_LT(gb, kAnchor.pay_all_threshold());
    EXPECT_TRUE(check_concavity(build_solution(kAnchor.with_risk_aversion(gb - 1e-4),
                                               solve_barrier(kAnchor.with_risk_aversion(gb - 1e-4)).x_tilde))
                    .concave);
}

TEST(GammaBar, IncreasesWithDiscountRate) {
    double last = 0.0;
    for (double rho : {0.1, 0.2, 0.4}) {
        const double gb = gamma_bar(kAnchor.with_discount_rate(rho), 1e-4);
        EXPECT_GT(gb, last) << rho;
        last = gb;
    }
}

TEST(Curves, ValueCurveAndBarrierFunction) {
    const auto sol = build_solution(kAnchor, solve_barrier(kAnchor).x_tilde);
    const auto pts = value_curve(sol, linspace(0.0, 1.0, 101));
    ASSERT_EQ(pts.size(), 101u);
    EXPECT_EQ(pts[0].v, 0.0);
    for (const auto& p : pts)
        if (p.x > 0.0 && p.x < sol.barrier()) EXPECT_LT(p.v_curvature, 0.0);

    auto crossings = [](const std::vector<BarrierFunctionPoint>& f) {
        int n = 0;
        for (std::size_t i = 1; i < f.size(); ++i) n += (f[i - 1].f < 0) != (f[i].f < 0);
        return n;
    };
    const auto f13 = f_curve(kAnchor, linspace(0.0, 2.0, 2001));
    EXPECT_EQ(f13[0].f, 0.13 - 32.0);
    EXPECT_EQ(crossings(f13), 1);
    EXPECT_EQ(crossings(f_curve(kAnchor.with_risk_aversion(40.0), linspace(0.0, 2.0, 2001))), 2);
}

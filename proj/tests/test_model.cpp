#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mvdiv/error.hpp"
#include "mvdiv/model.hpp"
#include "oracle.hpp"

using namespace mvdiv;

namespace {

const ModelParams kAnchor(1.0, 0.25, 0.2, 0.13);

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

ModelParams random_params(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, u(gen)); };
    return {log_uniform(0.01, 10.0), log_uniform(0.01, 5.0), log_uniform(1e-4, 5.0), log_uniform(1e-6, 50.0)};
}

}  // namespace

TEST(ModelParams, RejectsInvalidValues) {
    EXPECT_THROW(ModelParams(0.0, 0.25, 0.2, 0.1), Error);
    EXPECT_THROW(ModelParams(1.0, -0.25, 0.2, 0.1), Error);
    EXPECT_THROW(ModelParams(1.0, 0.25, 0.0, 0.1), Error);
    EXPECT_THROW(ModelParams(1.0, 0.25, 0.2, -1e-9), Error);
    EXPECT_THROW(ModelParams(NAN, 0.25, 0.2, 0.1), Error);
    EXPECT_THROW(ModelParams(1.0, INFINITY, 0.2, 0.1), Error);
    try {
        ModelParams(1.0, 0.25, -0.2, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
        EXPECT_NE(std::string(e.what()).find("rho"), std::string::npos);
    }
}

TEST(ModelParams, ZeroRiskAversionIsAdmitted) { EXPECT_NO_THROW(ModelParams(1.0, 0.25, 0.2, 0.0)); }

TEST(ModelParams, CopyWithReplacesOneField) {
    const ModelParams p = kAnchor.with_risk_aversion(40.0);
    EXPECT_EQ(p.risk_aversion(), 40.0);
    EXPECT_EQ(p.drift(), 1.0);
    EXPECT_EQ(kAnchor.with_discount_rate(0.3).discount_rate(), 0.3);
    EXPECT_THROW(kAnchor.with_volatility(0.0), Error);
}

TEST(CharacteristicRoots, AnchorMatchesQuadraticFormula) {
    const auto r = characteristic_roots(kAnchor);
    const auto o = oracle::roots(1.0L, 0.25L, 0.2L);
    EXPECT_LT(rel(r.g_plus, static_cast<double>(o.r1)), 1e-12);
    EXPECT_LT(rel(r.g_minus, static_cast<double>(o.r2)), 1e-12);
    EXPECT_LT(rel(r.h_plus, static_cast<double>(o.r3)), 1e-12);
    EXPECT_LT(rel(r.h_minus, static_cast<double>(o.r4)), 1e-12);
}

TEST(CharacteristicRoots, VietaIdentitiesOnRandomDraws) {
    std::mt19937_64 gen(7);
    for (int i = 0; i < 10000; ++i) {
        const ModelParams p = random_params(gen);
        const double a = p.drift(), b2 = p.volatility() * p.volatility(), rho = p.discount_rate();
        const auto r = characteristic_roots(p);
        ASSERT_LT(rel(r.g_plus + r.g_minus, -2.0 * a / b2), 1e-12) << i;
        ASSERT_LT(rel(r.g_plus * r.g_minus, -2.0 * rho / b2), 1e-12) << i;
        ASSERT_LT(rel(r.h_plus + r.h_minus, -2.0 * a / b2), 1e-12) << i;
        ASSERT_LT(rel(r.h_plus * r.h_minus, -4.0 * rho / b2), 1e-12) << i;
        ASSERT_GT(r.g_plus, 0.0);
        ASSERT_LT(r.g_minus, 0.0);
        ASSERT_GT(r.h_plus, 0.0);
        ASSERT_LT(r.h_minus, 0.0);
        ASSERT_GT(2.0 * r.g_plus - r.h_plus, 0.0) << i;
    }
}

TEST(CharacteristicRoots, PositiveRootMonotoneInVolatilityAndRate) {
    std::mt19937_64 gen(11);
    for (int i = 0; i < 2000; ++i) {
        const ModelParams p = random_params(gen);
        const double r1 = characteristic_roots(p).g_plus;
        EXPECT_LT(characteristic_roots(p.with_volatility(p.volatility() * 1.01)).g_plus, r1);
        EXPECT_GT(characteristic_roots(p.with_discount_rate(p.discount_rate() * 1.01)).g_plus, r1);
    }
}

TEST(CharacteristicRoots, SmallRateLimit) {
    // r1 ~ rho / a and r2 -> -2a/b^2 as rho -> 0; the naive form would cancel to 0.
    const ModelParams p(1.0, 0.25, 1e-14, 0.0);
    const auto r = characteristic_roots(p);
    EXPECT_LT(rel(r.g_plus, 1e-14), 1e-9);
    EXPECT_LT(rel(r.h_plus, 2e-14), 1e-9);
    EXPECT_LT(rel(r.g_minus, -32.0), 1e-12);
}

TEST(Regime, ThresholdIsInclusive) {
    EXPECT_EQ(classify_regime(kAnchor.with_risk_aversion(40.0)).tag, RegimeTag::PayAll);
    EXPECT_EQ(classify_regime(kAnchor.with_risk_aversion(32.0)).tag, RegimeTag::PayAll);
    EXPECT_EQ(classify_regime(kAnchor.with_risk_aversion(31.999)).tag, RegimeTag::BarrierCandidate);
    EXPECT_EQ(classify_regime(kAnchor).tag, RegimeTag::BarrierCandidate);
    EXPECT_DOUBLE_EQ(classify_regime(kAnchor).threshold, 32.0);
}

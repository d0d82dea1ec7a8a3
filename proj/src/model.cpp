#include "mvdiv/model.hpp"

#include <cmath>
#include <string>

#include "mvdiv/error.hpp"

namespace mvdiv {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NoRoot: return "NoRoot";
        case ErrorCode::MultipleRoots: return "MultipleRoots";
        case ErrorCode::DegenerateBarrier: return "DegenerateBarrier";
        case ErrorCode::RegimeMismatch: return "RegimeMismatch";
        case ErrorCode::ExcessTruncation: return "ExcessTruncation";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

namespace {

void require(bool ok, const char* name, double value, const char* rule) {
    if (!ok) {
        throw Error(ErrorCode::InvalidArgument,
                    std::string("model parameter ") + name + " = " + std::to_string(value) +
                        " violates " + rule);
    }
}

}  // namespace

ModelParams::ModelParams(double drift, double volatility, double discount_rate, double risk_aversion)
    : drift_(drift), volatility_(volatility), discount_rate_(discount_rate), risk_aversion_(risk_aversion) {
    require(std::isfinite(drift) && drift > 0.0, "a", drift, "a > 0");
    require(std::isfinite(volatility) && volatility > 0.0, "b", volatility, "b > 0");
    require(std::isfinite(discount_rate) && discount_rate > 0.0, "rho", discount_rate, "rho > 0");
    require(std::isfinite(risk_aversion) && risk_aversion >= 0.0, "gamma", risk_aversion, "gamma >= 0");
}

double ModelParams::pay_all_threshold() const noexcept {
    return 2.0 * drift_ / (volatility_ * volatility_);
}

ModelParams ModelParams::with_drift(double value) const {
    return {value, volatility_, discount_rate_, risk_aversion_};
}
ModelParams ModelParams::with_volatility(double value) const {
    return {drift_, value, discount_rate_, risk_aversion_};
}
ModelParams ModelParams::with_discount_rate(double value) const {
    return {drift_, volatility_, value, risk_aversion_};
}
ModelParams ModelParams::with_risk_aversion(double value) const {
    return {drift_, volatility_, discount_rate_, value};
}

CharacteristicRoots characteristic_roots(const ModelParams& params) {
    const double a = params.drift();
    const double b2 = params.volatility() * params.volatility();
    const double rho = params.discount_rate();

    // -a + sqrt(a^2 + c) cancels when c << a^2; use the conjugate form c / (a + sqrt(a^2 + c)).
    const double s1 = std::sqrt(a * a + 2.0 * rho * b2);
    const double s2 = std::sqrt(a * a + 4.0 * rho * b2);
    return CharacteristicRoots{
        .g_plus = 2.0 * rho / (a + s1),
        .g_minus = -(a + s1) / b2,
        .h_plus = 4.0 * rho / (a + s2),
        .h_minus = -(a + s2) / b2,
    };
}

std::string_view to_string(RegimeTag tag) noexcept {
    return tag == RegimeTag::PayAll ? "PayAll" : "BarrierCandidate";
}

Regime classify_regime(const ModelParams& params) {
    const double threshold = params.pay_all_threshold();
    return Regime{
        .tag = params.risk_aversion() >= threshold ? RegimeTag::PayAll : RegimeTag::BarrierCandidate,
        .threshold = threshold,
    };
}

}  // namespace mvdiv

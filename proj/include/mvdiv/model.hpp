#pragma once

#include <string_view>

namespace mvdiv {

/// Problem instance: surplus dX = a dt + b dB - dD, discount rate rho,
/// mean-variance risk aversion gamma. Validated on construction.
class ModelParams {
public:
    ModelParams(double drift, double volatility, double discount_rate, double risk_aversion);

    double drift() const noexcept { return drift_; }
    double volatility() const noexcept { return volatility_; }
    double discount_rate() const noexcept { return discount_rate_; }
    double risk_aversion() const noexcept { return risk_aversion_; }

    /// 2a/b^2, the risk aversion at which paying everything becomes an equilibrium.
    double pay_all_threshold() const noexcept;

    ModelParams with_drift(double value) const;
    ModelParams with_volatility(double value) const;
    ModelParams with_discount_rate(double value) const;
    ModelParams with_risk_aversion(double value) const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
    double drift_;
    double volatility_;
    double discount_rate_;
    double risk_aversion_;
};

/// Exponents of the homogeneous solutions of
///   (1/2) b^2 r^2 + a r - rho  = 0   (first moment, roots g_plus > 0 > g_minus)
///   (1/2) b^2 r^2 + a r - 2rho = 0   (second moment, roots h_plus > 0 > h_minus)
struct CharacteristicRoots {
    double g_plus;
    double g_minus;
    double h_plus;
    double h_minus;
};

CharacteristicRoots characteristic_roots(const ModelParams& params);

enum class RegimeTag { PayAll, BarrierCandidate };

std::string_view to_string(RegimeTag tag) noexcept;

struct Regime {
    RegimeTag tag;
    double threshold;
};

/// PayAll iff gamma >= 2a/b^2 (boundary inclusive).
Regime classify_regime(const ModelParams& params);

}  // namespace mvdiv

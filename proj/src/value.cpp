#include "mvdiv/value.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvdiv/error.hpp"

namespace mvdiv {

namespace {

Jet combine_value(const Jet& g, const Jet& h, double gamma) {
    return Jet{
        .value = g.value - 0.5 * gamma * (h.value - g.value * g.value),
        .slope = g.slope - 0.5 * gamma * (h.slope - 2.0 * g.value * g.slope),
        .curvature = g.curvature - 0.5 * gamma * (h.curvature - 2.0 * g.slope * g.slope -
                                                  2.0 * g.value * g.curvature),
    };
}

}  // namespace

ClosedFormSolution::ClosedFormSolution(const ModelParams& params, double x_tilde)
    : params_(params), roots_(characteristic_roots(params)), x_tilde_(x_tilde) {
    const auto& r = roots_;
    const double q1 = std::exp((r.g_minus - r.g_plus) * x_tilde);
    const double q3 = std::exp((r.h_minus - r.h_plus) * x_tilde);
    const double d1 = r.g_plus - r.g_minus * q1;  // (r1 e1 - r2 e2) / e1 at x~
    const double d3 = r.h_plus - r.h_minus * q3;  // (r3 e3 - r4 e4) / e3 at x~
    g_scale_ = 1.0 / d1;
    h_scale_ = 2.0 * (1.0 - q1) / (d1 * d3);
    c1_ = g_scale_ * std::exp(-r.g_plus * x_tilde);
    c3_ = h_scale_ * std::exp(-r.h_plus * x_tilde);
}

ClosedFormSolution build_solution(const ModelParams& params, double x_tilde) {
    if (!(x_tilde > 0.0) || !std::isfinite(x_tilde)) {
        throw Error(ErrorCode::DegenerateBarrier,
                    "barrier must be positive and finite, got " + std::to_string(x_tilde));
    }
    return ClosedFormSolution(params, x_tilde);
}

Jet ClosedFormSolution::no_transaction_mean(double x) const {
    const auto& r = roots_;
    const double up = std::exp(r.g_plus * (x - x_tilde_));
    const double down = std::exp(r.g_minus * x - r.g_plus * x_tilde_);
    return Jet{
        .value = g_scale_ * (up - down),
        .slope = g_scale_ * (r.g_plus * up - r.g_minus * down),
        .curvature = g_scale_ * (r.g_plus * r.g_plus * up - r.g_minus * r.g_minus * down),
    };
}

Jet ClosedFormSolution::no_transaction_second_moment(double x) const {
    const auto& r = roots_;
    const double up = std::exp(r.h_plus * (x - x_tilde_));
    const double down = std::exp(r.h_minus * x - r.h_plus * x_tilde_);
    return Jet{
        .value = h_scale_ * (up - down),
        .slope = h_scale_ * (r.h_plus * up - r.h_minus * down),
        .curvature = h_scale_ * (r.h_plus * r.h_plus * up - r.h_minus * r.h_minus * down),
    };
}

Jet ClosedFormSolution::mean(double x, Side side) const {
    if (x < x_tilde_ || (x == x_tilde_ && side == Side::Left)) {
        return no_transaction_mean(x);
    }
    const double at_barrier = no_transaction_mean(x_tilde_).value;
    return Jet{.value = at_barrier + (x - x_tilde_), .slope = 1.0, .curvature = 0.0};
}

Jet ClosedFormSolution::second_moment(double x, Side side) const {
    if (x < x_tilde_ || (x == x_tilde_ && side == Side::Left)) {
        return no_transaction_second_moment(x);
    }
    const double g = no_transaction_mean(x_tilde_).value;
    const double h = no_transaction_second_moment(x_tilde_).value;
    const double d = x - x_tilde_;
    return Jet{.value = h + 2.0 * g * d + d * d, .slope = 2.0 * (g + d), .curvature = 2.0};
}

Jet ClosedFormSolution::value(double x, Side side) const {
    return combine_value(mean(x, side), second_moment(x, side), params_.risk_aversion());
}

double ClosedFormSolution::value_curvature_product_form(double x) const {
    const auto& r = roots_;
    const double xt = x_tilde_;
    const double gamma = params_.risk_aversion();

    const double e1 = std::exp(r.g_plus * x), e2 = std::exp(r.g_minus * x);
    const double e3 = std::exp(r.h_plus * x), e4 = std::exp(r.h_minus * x);
    const double t1 = std::exp(r.g_plus * xt), t2 = std::exp(r.g_minus * xt);
    const double t3 = std::exp(r.h_plus * xt), t4 = std::exp(r.h_minus * xt);

    const double d1x = r.g_plus * e1 - r.g_minus * e2;
    const double n1x = r.g_plus * r.g_plus * e1 - r.g_minus * r.g_minus * e2;
    const double n3x = r.h_plus * r.h_plus * e3 - r.h_minus * r.h_minus * e4;
    const double d1t = r.g_plus * t1 - r.g_minus * t2;
    const double d3t = r.h_plus * t3 - r.h_minus * t4;

    const double g = n1x / d1x + gamma * (d1x / d1t + (e1 - e2) * n1x / (d1t * d1x) -
                                          (t1 - t2) * n3x / (d3t * d1x));
    return d1x / d1t * g;
}

Jet PayAllSolution::mean(double x, Side) const {
    return Jet{.value = x, .slope = 1.0, .curvature = 0.0};
}

Jet PayAllSolution::second_moment(double x, Side) const {
    return Jet{.value = x * x, .slope = 2.0 * x, .curvature = 2.0};
}

Jet PayAllSolution::value(double x, Side side) const {
    return combine_value(mean(x, side), second_moment(x, side), params_.risk_aversion());
}

PayAllSolution pay_all_solution(const ModelParams& params) {
    const Regime regime = classify_regime(params);
    if (regime.tag != RegimeTag::PayAll) {
        throw Error(ErrorCode::RegimeMismatch,
                    "paying all surplus requires gamma >= 2a/b^2 = " + std::to_string(regime.threshold));
    }
    return PayAllSolution(params);
}

ConcavityResult check_concavity(const ClosedFormSolution& sol, std::size_t n_grid, double tol_strict) {
    if (n_grid < 2) {
        throw Error(ErrorCode::InvalidArgument, "concavity grid needs at least 2 points");
    }
    const double xt = sol.barrier();
    const double h = xt / static_cast<double>(n_grid - 1);
    for (std::size_t i = 1; i + 1 < n_grid; ++i) {
        const double x = h * static_cast<double>(i);
        if (!(sol.value(x).curvature < -tol_strict)) {
            return ConcavityResult{.concave = false, .first_violation = x};
        }
    }
    return ConcavityResult{.concave = true, .first_violation = std::nullopt};
}

bool VerificationReport::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(),
                       [](const ConditionRecord& c) { return c.pass; });
}

const ConditionRecord* VerificationReport::find(std::string_view name) const {
    auto it = std::find_if(conditions.begin(), conditions.end(),
                           [&](const ConditionRecord& c) { return c.name == name; });
    return it == conditions.end() ? nullptr : &*it;
}

namespace {

double generator(const ModelParams& p, const Jet& phi) {
    const double b = p.volatility();
    return p.drift() * phi.slope + 0.5 * b * b * phi.curvature;
}

template <class Solution>
double hjb_term(const Solution& sol, double x, Side side) {
    const ModelParams& p = sol.params();
    const double gamma = p.risk_aversion();
    const double rho = p.discount_rate();
    const Jet g = sol.mean(x, side);
    const Jet h = sol.second_moment(x, side);
    const Jet v = sol.value(x, side);
    const Jet g_squared{
        .value = g.value * g.value,
        .slope = 2.0 * g.value * g.slope,
        .curvature = 2.0 * (g.slope * g.slope + g.value * g.curvature),
    };
    return generator(p, v) - 0.5 * gamma * generator(p, g_squared) + gamma * g.value * generator(p, g) -
           rho * g.value + gamma * rho * (h.value - g.value * g.value);
}

// Tracks the worst residual of one condition over a set of grid points.
class Tracker {
public:
    Tracker(std::string name, std::string region, double tolerance)
        : name_(std::move(name)), region_(std::move(region)), tolerance_(tolerance) {}

    void observe(double residual, double x) {
        if (nan_) return;
        if (std::isnan(residual)) {
            nan_ = true;
            worst_ = residual;
            worst_x_ = x;
            return;
        }
        if (!seen_ || residual > worst_) {
            worst_ = residual;
            worst_x_ = x;
        }
        seen_ = true;
    }

    ConditionRecord record() const {
        return ConditionRecord{
            .name = name_,
            .region = region_,
            .worst_residual = worst_,
            .worst_location = worst_x_,
            .tolerance = tolerance_,
            .pass = !nan_ && worst_ <= tolerance_,
        };
    }

private:
    std::string name_;
    std::string region_;
    double tolerance_;
    double worst_ = 0.0;
    double worst_x_ = 0.0;
    bool seen_ = false;
    bool nan_ = false;
};

std::vector<double> uniform_nodes(double lo, double hi, std::size_t n) {
    std::vector<double> xs(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = i + 1 == n ? hi : lo + h * static_cast<double>(i);
    }
    return xs;
}

void check_options(const VerifyOptions& options) {
    if (options.n_grid < 3) {
        throw Error(ErrorCode::InvalidArgument, "verification grid needs at least 3 points");
    }
}

template <class Solution>
void add_pay_region(VerificationReport& report, const Solution& sol, double lo, double hi,
                    const VerifyOptions& options) {
    Tracker value_slope("pay.value_slope", "pay", options.tol_res);
    Tracker mean_slope("pay.mean_slope", "pay", options.tol_res);
    Tracker second_slope("pay.second_moment_slope", "pay", options.tol_res);
    Tracker hjb("pay.hjb_inequality", "pay", options.tol_ineq);
    for (double x : uniform_nodes(lo, hi, options.n_grid)) {
        const Jet g = sol.mean(x, Side::Right);
        const Jet h = sol.second_moment(x, Side::Right);
        const Jet v = sol.value(x, Side::Right);
        value_slope.observe(std::abs(v.slope - 1.0), x);
        mean_slope.observe(std::abs(g.slope - 1.0), x);
        second_slope.observe(std::abs(h.slope - 2.0 * g.value), x);
        hjb.observe(hjb_term(sol, x, Side::Right), x);
    }
    for (const auto* t : {&value_slope, &mean_slope, &second_slope, &hjb}) {
        report.conditions.push_back(t->record());
    }
}

template <class Solution>
void add_boundary(VerificationReport& report, const Solution& sol) {
    Tracker zero("boundary.zero", "boundary", 0.0);
    zero.observe(std::max({std::abs(sol.value(0.0).value), std::abs(sol.mean(0.0).value),
                           std::abs(sol.second_moment(0.0).value)}),
                 0.0);
    report.conditions.push_back(zero.record());
}

}  // namespace

double value_hjb_term(const ClosedFormSolution& sol, double x, Side side) {
    return hjb_term(sol, x, side);
}

double value_hjb_term(const PayAllSolution& sol, double x, Side side) {
    return hjb_term(sol, x, side);
}

VerificationReport verify_hjb(const ClosedFormSolution& sol, const VerifyOptions& options) {
    check_options(options);
    const ModelParams& p = sol.params();
    const double rho = p.discount_rate();
    const double xt = sol.barrier();
    const double x_max = options.x_max.value_or(xt + 10.0);
    if (!(x_max > xt)) {
        throw Error(ErrorCode::InvalidArgument, "pay-region window must extend past the barrier");
    }

    VerificationReport report;

    Tracker mean_ode("nt.mean_ode", "no_transaction", options.tol_res);
    Tracker second_ode("nt.second_moment_ode", "no_transaction", options.tol_res);
    Tracker value_ode("nt.value_ode", "no_transaction", options.tol_res);
    Tracker slope_ineq("nt.slope_inequality", "no_transaction", options.tol_ineq);
    const auto nt_nodes = uniform_nodes(0.0, xt, options.n_grid);
    for (std::size_t i = 1; i + 1 < nt_nodes.size(); ++i) {
        const double x = nt_nodes[i];
        const Jet g = sol.mean(x);
        const Jet h = sol.second_moment(x);
        mean_ode.observe(std::abs(generator(p, g) - rho * g.value), x);
        second_ode.observe(std::abs(generator(p, h) - 2.0 * rho * h.value), x);
        value_ode.observe(std::abs(hjb_term(sol, x, Side::Left)), x);
        slope_ineq.observe(1.0 - sol.value(x).slope, x);
    }
    for (const auto* t : {&mean_ode, &second_ode, &value_ode, &slope_ineq}) {
        report.conditions.push_back(t->record());
    }

    add_pay_region(report, sol, xt, x_max, options);
    add_boundary(report, sol);

    Tracker paste_mean("pasting.mean_slope", "barrier", options.tol_res);
    Tracker paste_second("pasting.second_moment_slope", "barrier", options.tol_res);
    Tracker paste_curv("pasting.value_curvature", "barrier", options.tol_res);
    paste_mean.observe(std::abs(sol.mean(xt, Side::Left).slope - sol.mean(xt, Side::Right).slope), xt);
    paste_second.observe(
        std::abs(sol.second_moment(xt, Side::Left).slope - sol.second_moment(xt, Side::Right).slope), xt);
    paste_curv.observe(std::max(std::abs(sol.value(xt, Side::Left).curvature),
                                std::abs(sol.value(xt, Side::Right).curvature)),
                       xt);
    for (const auto* t : {&paste_mean, &paste_second, &paste_curv}) {
        report.conditions.push_back(t->record());
    }
    return report;
}

VerificationReport verify_hjb(const PayAllSolution& sol, const VerifyOptions& options) {
    check_options(options);
    const double x_max = options.x_max.value_or(10.0);
    if (!(x_max > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "pay-region window must have positive length");
    }
    VerificationReport report;
    add_pay_region(report, sol, 0.0, x_max, options);
    add_boundary(report, sol);
    return report;
}

std::string_view to_string(Classification c) noexcept {
    switch (c) {
        case Classification::PayAll: return "PayAll";
        case Classification::BarrierEquilibrium: return "BarrierEquilibrium";
        case Classification::Indeterminate: return "Indeterminate";
    }
    return "Unknown";
}

EquilibriumResult solve_equilibrium(const ModelParams& params, const SolveOptions& options) {
    const Regime regime = classify_regime(params);
    if (regime.tag == RegimeTag::PayAll) {
        return EquilibriumResult{
            .regime = regime,
            .classification = Classification::PayAll,
            .barrier = std::nullopt,
            .solution = std::nullopt,
            .concavity = std::nullopt,
        };
    }
    const BarrierSolution root = solve_barrier(params, options.scan);
    ClosedFormSolution sol = build_solution(params, root.x_tilde);
    const ConcavityResult concavity = check_concavity(sol, options.concavity_grid);
    return EquilibriumResult{
        .regime = regime,
        .classification = concavity.concave ? Classification::BarrierEquilibrium : Classification::Indeterminate,
        .barrier = root,
        .solution = std::move(sol),
        .concavity = concavity,
    };
}

}  // namespace mvdiv

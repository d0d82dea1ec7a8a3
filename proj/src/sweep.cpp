#include "mvdiv/sweep.hpp"

#include <cmath>
#include <string>

#include "mvdiv/error.hpp"
#include "parallel.hpp"

namespace mvdiv {

std::string_view to_string(SweepParameter p) noexcept {
    switch (p) {
        case SweepParameter::Gamma: return "gamma";
        case SweepParameter::Rho: return "rho";
        case SweepParameter::Drift: return "a";
        case SweepParameter::Volatility: return "b";
    }
    return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) noexcept {
    if (name == "gamma") return SweepParameter::Gamma;
    if (name == "rho") return SweepParameter::Rho;
    if (name == "a") return SweepParameter::Drift;
    if (name == "b") return SweepParameter::Volatility;
    return std::nullopt;
}

ModelParams with_parameter(const ModelParams& base, SweepParameter p, double value) {
    switch (p) {
        case SweepParameter::Gamma: return base.with_risk_aversion(value);
        case SweepParameter::Rho: return base.with_discount_rate(value);
        case SweepParameter::Drift: return base.with_drift(value);
        case SweepParameter::Volatility: return base.with_volatility(value);
    }
    return base;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = i + 1 == n ? hi : lo + h * static_cast<double>(i);
    return out;
}

std::vector<double> default_grid(SweepParameter p, std::size_t n) {
    switch (p) {
        case SweepParameter::Gamma: return linspace(0.001, 0.1397, n);
        case SweepParameter::Rho: return linspace(0.05, 0.5, n);
        case SweepParameter::Drift: return linspace(0.5, 2.0, n);
        case SweepParameter::Volatility: return linspace(0.1, 0.5, n);
    }
    return {};
}

std::string_view to_string(RowStatus s) noexcept {
    switch (s) {
        case RowStatus::BarrierEquilibrium: return "BarrierEquilibrium";
        case RowStatus::Indeterminate: return "Indeterminate";
        case RowStatus::PayAll: return "PayAll";
        case RowStatus::NoRoot: return "NoRoot";
        case RowStatus::MultipleRoots: return "MultipleRoots";
        case RowStatus::InvalidParams: return "InvalidParams";
    }
    return "Unknown";
}

namespace {

bool admits_concave_barrier(const ModelParams& params, const SolveOptions& options) {
    try {
        return solve_equilibrium(params, options).classification == Classification::BarrierEquilibrium;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoRoot || e.code() == ErrorCode::MultipleRoots) return false;
        throw;
    }
}

SweepRow solve_row(const SweepSpec& spec, double value) {
    SweepRow row{};
    row.value = value;
    row.status = RowStatus::InvalidParams;
    std::optional<ModelParams> params;
    try {
        params = with_parameter(spec.fixed, spec.varied, value);
    } catch (const Error&) {
        return row;
    }
    try {
        const EquilibriumResult eq = solve_equilibrium(*params, spec.solve);
        if (eq.classification == Classification::PayAll) {
            row.status = RowStatus::PayAll;
        } else {
            row.status = eq.classification == Classification::BarrierEquilibrium ? RowStatus::BarrierEquilibrium
                                                                                 : RowStatus::Indeterminate;
            row.x_tilde = eq.solution->barrier();
            row.concave = eq.concavity->concave;
            row.c1 = eq.solution->c1();
            row.c3 = eq.solution->c3();
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NoRoot) {
            row.status = RowStatus::NoRoot;
        } else if (e.code() == ErrorCode::MultipleRoots) {
            row.status = RowStatus::MultipleRoots;
        } else {
            throw;
        }
    }
    if (spec.record_gamma_bar) {
        try {
            row.gamma_bar = gamma_bar(*params, spec.gamma_bar_tol, spec.solve);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NotFound) throw;
        }
    }
    return row;
}

}  // namespace

std::vector<SweepRow> sweep_barrier(const SweepSpec& spec) {
    for (std::size_t i = 1; i < spec.grid.size(); ++i) {
        if (!(spec.grid[i] > spec.grid[i - 1])) {
            throw Error(ErrorCode::InvalidArgument, "sweep grid must be strictly ascending");
        }
    }
    std::vector<SweepRow> rows(spec.grid.size());
    detail::parallel_for(spec.grid.size(), spec.threads,
                         [&](std::size_t i) { rows[i] = solve_row(spec, spec.grid[i]); });
    return rows;
}

double gamma_bar(const ModelParams& params, double tol, const SolveOptions& options) {
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "gamma_bar tolerance must be positive");
    }
    const double threshold = params.pay_all_threshold();
    double lo = tol;
    double hi = threshold;
    if (!(lo < hi) || !admits_concave_barrier(params.with_risk_aversion(lo), options)) {
        throw Error(ErrorCode::NotFound, "no strictly concave barrier candidate even at gamma = " +
                                             std::to_string(tol));
    }
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (admits_concave_barrier(params.with_risk_aversion(mid), options)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

std::vector<ValuePoint> value_curve(const ClosedFormSolution& sol, const std::vector<double>& x_grid) {
    std::vector<ValuePoint> out;
    out.reserve(x_grid.size());
    for (double x : x_grid) {
        if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "value_curve grid must be non-negative");
        const Jet v = sol.value(x);
        out.push_back(ValuePoint{
            .x = x,
            .v = v.value,
            .v_slope = v.slope,
            .v_curvature = v.curvature,
            .g = sol.mean(x).value,
            .h = sol.second_moment(x).value,
        });
    }
    return out;
}

std::vector<BarrierFunctionPoint> f_curve(const ModelParams& params, const std::vector<double>& x_grid) {
    const CharacteristicRoots roots = characteristic_roots(params);
    std::vector<BarrierFunctionPoint> out;
    out.reserve(x_grid.size());
    for (double x : x_grid) out.push_back({x, barrier_function(x, params, roots)});
    return out;
}

}  // namespace mvdiv

#include "mvdiv/commands.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "mvdiv/barrier.hpp"
#include "mvdiv/error.hpp"
#include "mvdiv/simulate.hpp"
#include "mvdiv/sweep.hpp"
#include "mvdiv/value.hpp"

#ifndef MVDIV_VERSION
#define MVDIV_VERSION "unknown"
#endif

namespace mvdiv {

namespace {

constexpr const char* kIndeterminateNote =
    "candidate barrier found but V is not strictly concave below it; no equilibrium is known for this risk aversion";

void add_meta(Table& t, const std::string& key, const std::string& value) { t.metadata.emplace_back(key, value); }
void add_meta(Table& t, const std::string& key, double value) { t.metadata.emplace_back(key, format_number(value)); }

/// Provenance header: tool, version, command, then the resolved configuration.
void stamp(Table& t, std::string_view command, const RunConfig& cfg) {
    auto extra = std::move(t.metadata);
    t.metadata.clear();
    add_meta(t, "tool", "mvdiv");
    add_meta(t, "version", MVDIV_VERSION);
    add_meta(t, "command", std::string(command));
    for (auto& kv : echo_config(cfg)) t.metadata.push_back(std::move(kv));
    for (auto& kv : extra) t.metadata.push_back(std::move(kv));
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

std::vector<double> sweep_grid(const RunConfig& cfg, SweepParameter p) {
    if (cfg.grid_min.has_value() != cfg.grid_max.has_value())
        throw Error(ErrorCode::Config, "grid_min and grid_max must be given together");
    if (cfg.grid_min) return linspace(*cfg.grid_min, *cfg.grid_max, cfg.grid_n);
    return default_grid(p, cfg.grid_n);
}

SweepParameter required_vary(const RunConfig& cfg) {
    if (!cfg.vary) throw Error(ErrorCode::Config, "missing config key 'vary' (gamma, rho, a or b)");
    return *cfg.vary;
}

}  // namespace

int exit_code_for(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::Config:
            return ExitConfig;
        case ErrorCode::NoRoot:
        case ErrorCode::MultipleRoots:
        case ErrorCode::DegenerateBarrier:
        case ErrorCode::RegimeMismatch:
        case ErrorCode::ExcessTruncation:
        case ErrorCode::NotFound:
            return ExitSolver;
    }
    return ExitSolver;
}

CommandResult cmd_solve(const RunConfig& cfg) {
    const ModelParams params = cfg.model();
    const EquilibriumResult eq = solve_equilibrium(params, cfg.solve());

    CommandResult r;
    Table& t = r.table;
    t.columns = {"regime", "threshold", "classification", "x_tilde", "c1", "c3", "concave", "first_violation",
                 "residual", "note"};
    if (eq.classification == Classification::PayAll) {
        t.add_row({std::string(to_string(eq.regime.tag)), eq.regime.threshold,
                   std::string(to_string(eq.classification)), Missing{}, Missing{}, Missing{}, Missing{}, Missing{},
                   Missing{}, std::string("pay out all surplus: V(x) = G(x) = x, H(x) = x^2")});
        return r;
    }
    const auto& sol = *eq.solution;
    const auto& conc = *eq.concavity;
    const bool indeterminate = eq.classification == Classification::Indeterminate;
    t.add_row({std::string(to_string(eq.regime.tag)), eq.regime.threshold,
               std::string(to_string(eq.classification)), sol.barrier(), sol.c1(), sol.c3(), conc.concave,
               cell(conc.first_violation), eq.barrier->residual,
               indeterminate ? Cell(std::string(kIndeterminateNote)) : Cell(Missing{})});
    return r;
}

CommandResult cmd_verify(const RunConfig& cfg) {
    const ModelParams params = cfg.model();
    const Regime regime = classify_regime(params);

    CommandResult r;
    if (regime.tag == RegimeTag::PayAll) {
        r.table = verification_table(verify_hjb(pay_all_solution(params), cfg.verify()));
        add_meta(r.table, "regime", std::string(to_string(regime.tag)));
        add_meta(r.table, "x_tilde", 0.0);
    } else {
        const BarrierSolution root = solve_barrier(params, cfg.scan());
        const ClosedFormSolution sol = build_solution(params, root.x_tilde);
        r.table = verification_table(verify_hjb(sol, cfg.verify()));
        add_meta(r.table, "regime", std::string(to_string(regime.tag)));
        add_meta(r.table, "x_tilde", sol.barrier());
    }
    for (const auto& row : r.table.rows)
        if (!std::get<bool>(row.back())) r.exit_code = ExitVerification;
    return r;
}

CommandResult cmd_simulate(const RunConfig& cfg) {
    const ModelParams params = cfg.model();
    const Regime regime = classify_regime(params);

    CommandResult r;
    if (regime.tag == RegimeTag::PayAll) {
        if (cfg.mode == "frontier")
            throw Error(ErrorCode::Config, "mode = frontier needs a barrier candidate (gamma < 2a/b^2)");
        const SimConfig sim = cfg.sim(1.0);
        const SimEstimate est = estimate_moments(BarrierStrategy::from(pay_all_solution(params)), sim);
        r.table = estimate_table(est, sim.x0, sim.x0 * sim.x0);
        add_meta(r.table, "x_tilde", 0.0);
        add_meta(r.table, "x0", sim.x0);
        add_meta(r.table, "t_max_resolved", resolved_horizon(sim, params));
        return r;
    }

    const BarrierSolution root = solve_barrier(params, cfg.scan());
    const ClosedFormSolution sol = build_solution(params, root.x_tilde);
    const SimConfig sim = cfg.sim(sol.barrier() / 2.0);
    if (cfg.mode == "frontier") {
        if (cfg.frontier_points < 2 || !(cfg.frontier_lo > 0.0) || !(cfg.frontier_hi > cfg.frontier_lo))
            throw Error(ErrorCode::Config, "frontier needs frontier_points >= 2 and 0 < frontier_lo < frontier_hi");
        const auto barriers =
            linspace(cfg.frontier_lo * sol.barrier(), cfg.frontier_hi * sol.barrier(), cfg.frontier_points);
        r.table = frontier_table(estimate_mv_frontier(params, barriers, sim));
    } else {
        const SimEstimate est = estimate_moments(sol, sim);
        r.table = estimate_table(est, sol.mean(sim.x0).value, sol.second_moment(sim.x0).value);
    }
    add_meta(r.table, "x_tilde", sol.barrier());
    add_meta(r.table, "x0", sim.x0);
    add_meta(r.table, "t_max_resolved", resolved_horizon(sim, params));
    return r;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
    CommandResult r;
    if (cfg.table == "f-curve") {
        const ModelParams params = cfg.model();
        const double hi = cfg.curve_x_max.value_or(4.0 * taksar_barrier(params));
        r.table = f_curve_table(f_curve(params, linspace(0.0, hi, cfg.curve_points)));
        return r;
    }
    if (cfg.table == "value-curve") {
        const ModelParams params = cfg.model();
        const EquilibriumResult eq = solve_equilibrium(params, cfg.solve());
        if (eq.solution) {
            const double hi = cfg.curve_x_max.value_or(2.0 * eq.solution->barrier());
            r.table = value_curve_table(value_curve(*eq.solution, linspace(0.0, hi, cfg.curve_points)));
            add_meta(r.table, "classification", std::string(to_string(eq.classification)));
            add_meta(r.table, "x_tilde", eq.solution->barrier());
        } else {
            const double hi = cfg.curve_x_max.value_or(1.0);
            std::vector<ValuePoint> pts;
            for (double x : linspace(0.0, hi, cfg.curve_points)) pts.push_back({x, x, 1.0, 0.0, x, x * x});
            r.table = value_curve_table(pts);
            add_meta(r.table, "classification", std::string(to_string(eq.classification)));
            add_meta(r.table, "x_tilde", 0.0);
        }
        return r;
    }

    SweepSpec spec{.varied = required_vary(cfg),
                   .grid = {},
                   .fixed = cfg.model(),
                   .record_gamma_bar = cfg.gamma_bar,
                   .solve = cfg.solve(),
                   .gamma_bar_tol = cfg.gamma_bar_tol,
                   .threads = cfg.threads};
    spec.grid = sweep_grid(cfg, spec.varied);
    r.table = sweep_table(spec.varied, sweep_barrier(spec));
    return r;
}

CommandResult cmd_gamma_bar(const RunConfig& cfg) {
    CommandResult r;
    if (cfg.vary) {
        if (*cfg.vary == SweepParameter::Gamma)
            throw Error(ErrorCode::Config, "gamma-bar cannot vary gamma; use vary = rho, a or b");
        SweepSpec spec{.varied = *cfg.vary,
                       .grid = sweep_grid(cfg, *cfg.vary),
                       .fixed = cfg.model(),
                       .record_gamma_bar = true,
                       .solve = cfg.solve(),
                       .gamma_bar_tol = cfg.gamma_bar_tol,
                       .threads = cfg.threads};
        r.table = sweep_table(spec.varied, sweep_barrier(spec));
        return r;
    }
    const ModelParams params = cfg.model();
    const double gb = gamma_bar(params, cfg.gamma_bar_tol, cfg.solve());
    r.table.columns = {"a", "b", "rho", "gamma_bar", "pay_all_threshold"};
    r.table.add_row({params.drift(), params.volatility(), params.discount_rate(), gb, params.pay_all_threshold()});
    return r;
}

int run_command(std::string_view command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    CommandResult result;
    try {
        if (command == "solve") result = cmd_solve(cfg);
        else if (command == "verify") result = cmd_verify(cfg);
        else if (command == "simulate") result = cmd_simulate(cfg);
        else if (command == "sweep") result = cmd_sweep(cfg);
        else if (command == "gamma-bar") result = cmd_gamma_bar(cfg);
        else {
            err << "error: unknown command '" << command << "'\n";
            return ExitConfig;
        }
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
        return exit_code_for(e.code());
    }
    stamp(result.table, command, cfg);

    std::ofstream file;
    std::ostream* sink = &out;
    if (cfg.output) {
        file.open(*cfg.output, std::ios::binary);
        if (!file) {
            err << "error [config]: cannot write '" << *cfg.output << "'\n";
            return ExitConfig;
        }
        sink = &file;
    }
    if (cfg.format == OutputFormat::Json) {
        *sink << to_json(result.table).dump(2) << '\n';
    } else {
        write_csv(*sink, result.table, cfg.timestamp ? utc_now() : std::string());
    }
    sink->flush();
    if (!*sink) {
        err << "error: failed writing output\n";
        return ExitConfig;
    }

    if (result.exit_code == ExitVerification) {
        err << "verification failed:";
        for (const auto& row : result.table.rows)
            if (!std::get<bool>(row.back())) err << ' ' << std::get<std::string>(row.front());
        err << '\n';
    }
    return result.exit_code;
}

}  // namespace mvdiv

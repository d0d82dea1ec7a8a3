#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "mvdiv/barrier.hpp"
#include "mvdiv/model.hpp"
#include "mvdiv/value.hpp"

namespace mvdiv {

enum class SweepParameter { Gamma, Rho, Drift, Volatility };

std::string_view to_string(SweepParameter p) noexcept;
/// Accepts "gamma", "rho", "a", "b".
std::optional<SweepParameter> parse_sweep_parameter(std::string_view name) noexcept;

/// Copy of `base` with the swept parameter replaced.
ModelParams with_parameter(const ModelParams& base, SweepParameter p, double value);

/// Default grids: gamma in [0.001, 0.1397] (50 points), rho in [0.05, 0.5],
/// a in [0.5, 2], b in [0.1, 0.5].
std::vector<double> default_grid(SweepParameter p, std::size_t n = 50);

std::vector<double> linspace(double lo, double hi, std::size_t n);

struct SweepSpec {
    SweepParameter varied;
    std::vector<double> grid;
    ModelParams fixed;
    bool record_gamma_bar = false;
    SolveOptions solve;
    double gamma_bar_tol = 1e-4;
    unsigned threads = 1;
};

/// Per-row outcome; rows are flagged, never dropped.
enum class RowStatus { BarrierEquilibrium, Indeterminate, PayAll, NoRoot, MultipleRoots, InvalidParams };

std::string_view to_string(RowStatus s) noexcept;

struct SweepRow {
    double value;
    RowStatus status;
    std::optional<double> x_tilde;
    std::optional<bool> concave;
    std::optional<double> c1;
    std::optional<double> c3;
    std::optional<double> gamma_bar;
};

/// Solves each grid point from scratch; output order follows the grid.
std::vector<SweepRow> sweep_barrier(const SweepSpec& spec);

/// Largest gamma in (0, 2a/b^2) whose barrier candidate is unique and strictly
/// concave, located by bisection to width `tol`. The gamma field of `params`
/// is ignored. Throws Error{NotFound} if the candidate already fails at gamma = tol.
double gamma_bar(const ModelParams& params, double tol = 1e-4, const SolveOptions& options = {});

struct ValuePoint {
    double x;
    double v;
    double v_slope;
    double v_curvature;
    double g;
    double h;
};

std::vector<ValuePoint> value_curve(const ClosedFormSolution& sol, const std::vector<double>& x_grid);

struct BarrierFunctionPoint {
    double x;
    double f;
};

std::vector<BarrierFunctionPoint> f_curve(const ModelParams& params, const std::vector<double>& x_grid);

}  // namespace mvdiv

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mvdiv/model.hpp"
#include "mvdiv/simulate.hpp"
#include "mvdiv/sweep.hpp"
#include "mvdiv/value.hpp"

namespace mvdiv {

enum class OutputFormat { Csv, Json };

/// Everything a CLI run needs. Built from flat `key = value` text; every key
/// has a default, unknown keys are rejected.
struct RunConfig {
    // model (defaults are the a = 1, b = 0.25, rho = 0.2 anchor case)
    double a = 1.0;
    double b = 0.25;
    double rho = 0.2;
    double gamma = 0.13;

    // barrier solve
    double tol = 1e-10;
    std::optional<double> x_max;
    std::size_t n_scan = 2048;
    std::size_t n_grid = 10001;

    // verification
    double tol_res = 1e-8;
    double tol_ineq = 1e-12;
    std::size_t verify_grid = 2001;
    std::optional<double> verify_x_max;

    // simulation
    double dt = 1e-3;
    std::size_t n_paths = 10000;
    std::optional<double> t_max;
    std::uint64_t seed = 20240601;
    std::optional<double> x0;
    RuinMonitoring ruin = RuinMonitoring::Grid;
    double tail_tolerance = 1e-4;
    std::string mode = "moments";  // moments | frontier
    std::size_t frontier_points = 11;
    double frontier_lo = 0.5;  // multiples of the barrier
    double frontier_hi = 1.5;

    // sweeps
    std::optional<SweepParameter> vary;
    std::optional<double> grid_min;
    std::optional<double> grid_max;
    std::size_t grid_n = 50;
    std::string table = "barrier";  // barrier | value-curve | f-curve
    bool gamma_bar = false;
    double gamma_bar_tol = 1e-4;
    std::optional<double> curve_x_max;
    std::size_t curve_points = 201;

    // output
    unsigned threads = 0;
    OutputFormat format = OutputFormat::Csv;
    std::optional<std::string> output;
    bool timestamp = true;

    ModelParams model() const;
    ScanOptions scan() const;
    SolveOptions solve() const;
    VerifyOptions verify() const;
    SimConfig sim(double default_x0) const;
};

/// Recognised keys, in canonical order.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines; '#' starts a comment line. Throws Error{Config}
/// naming the offending line or key.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies key/value overrides on top of the defaults. Throws Error{Config}
/// naming the key for unknown keys and unparsable values.
RunConfig make_run_config(const std::map<std::string, std::string>& values);

/// Canonical key/value echo of a configuration; feeding it back to
/// make_run_config reproduces the same configuration. `output` is omitted.
std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& cfg);

}  // namespace mvdiv

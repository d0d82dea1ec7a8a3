#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mvdiv/model.hpp"
#include "mvdiv/rng.hpp"
#include "mvdiv/value.hpp"

namespace mvdiv {

/// How ruin (surplus reaching 0) is detected between grid points.
enum class RuinMonitoring {
    Grid,            // only at step endpoints
    BrownianBridge,  // also kill with the bridge crossing probability exp(-2 x0 x1 / (b^2 dt))
};

struct SimConfig {
    double dt = 1e-3;
    std::size_t n_paths = 10000;
    /// Truncation horizon; defaults to 60 / rho.
    std::optional<double> t_max;
    std::uint64_t seed = 20240601;
    double x0 = 0.0;
    /// Worker threads; 0 uses the hardware concurrency.
    unsigned threads = 0;
    RuinMonitoring ruin = RuinMonitoring::Grid;
    /// Tolerated relative weight e^{-rho t_max} of the discounted tail beyond the horizon.
    double tail_tolerance = 1e-4;
};

double resolved_horizon(const SimConfig& cfg, const ModelParams& params);

/// Throws Error{InvalidArgument} on a malformed configuration.
void validate(const SimConfig& cfg, const ModelParams& params);

/// Pay max(x - barrier, 0) at once, then reflect the surplus at the barrier.
/// A zero barrier is the pay-everything strategy.
struct BarrierStrategy {
    ModelParams params;
    double barrier;

    static BarrierStrategy from(const ClosedFormSolution& sol) { return {sol.params(), sol.barrier()}; }
    static BarrierStrategy from(const PayAllSolution& sol) { return {sol.params(), 0.0}; }
};

struct PathResult {
    double y;                          // discounted dividends
    std::optional<double> ruin_time;   // empty when the path was truncated at t_max
    double initial_lump;
};

/// Euler scheme with projection onto the barrier: the overshoot above the
/// barrier after each step is paid out (discounted at the step end) and the
/// surplus is reset to the barrier. Ruin stops the path.
PathResult simulate_path(const BarrierStrategy& strategy, const SimConfig& cfg, Xoshiro256pp& rng);

struct SimEstimate {
    double g_hat;
    double h_hat;
    double v_hat;
    double se_g;
    double se_h;
    std::size_t n_paths;
    double truncated_fraction;
    double ruined_fraction;
};

/// Monte Carlo estimates of E[Y], E[Y^2] and E[Y] - (gamma/2) Var[Y] from cfg.x0.
/// Path i draws from path_stream(cfg.seed, i); sums are reduced pairwise in path
/// order, so the estimate does not depend on the number of workers.
///
/// Throws Error{ExcessTruncation} when more than 1% of paths hit the horizon
/// while the discounted tail e^{-rho t_max} exceeds cfg.tail_tolerance.
SimEstimate estimate_moments(const BarrierStrategy& strategy, const SimConfig& cfg);
SimEstimate estimate_moments(const ClosedFormSolution& sol, const SimConfig& cfg);

struct FrontierRow {
    double barrier;
    double g_hat;
    double var_hat;
    double j_hat;
    double se_g;
};

/// Empirical mean-variance objective of the barrier strategy at each candidate
/// barrier. All rows share cfg.seed, so neighbouring rows use common random numbers.
std::vector<FrontierRow> estimate_mv_frontier(const ModelParams& params, const std::vector<double>& barriers,
                                              const SimConfig& cfg);

}  // namespace mvdiv

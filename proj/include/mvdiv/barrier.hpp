#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "mvdiv/model.hpp"

namespace mvdiv {

/// Left side of the barrier equation f(x, gamma) = 0. Smooth pasting of V''
/// at a barrier x holds exactly when f(x, gamma) = 0.
///
/// Evaluated with e^{r+ x} factored out of every ratio, so it stays finite for
/// arbitrarily large x. f(0, gamma) = gamma - 2a/b^2 exactly.
double barrier_function(double x, const ModelParams& params, const CharacteristicRoots& roots);
double barrier_function(double x, const ModelParams& params);

/// lim_{x -> inf} f(x, gamma) = r1 + gamma (2 - r3 / r1).
double barrier_function_limit(const ModelParams& params, const CharacteristicRoots& roots);

/// Optimal barrier of the risk-neutral (gamma = 0) problem, in closed form.
double taksar_barrier(const ModelParams& params);

struct ScanOptions {
    double tol = 1e-10;
    /// Upper end of the sign-change scan; defaults to 20 * taksar_barrier.
    std::optional<double> x_max;
    std::size_t n_scan = 2048;
};

double default_scan_limit(const ModelParams& params);

struct BarrierSolution {
    double x_tilde;
    double lo;
    double hi;
    double residual;
    int root_count_on_scan;
};

/// Unique positive root of f(., gamma). Throws Error{NoRoot} when the scan finds
/// no sign change and Error{MultipleRoots} when it finds more than one.
BarrierSolution solve_barrier(const ModelParams& params, const ScanOptions& options = {});

/// Every root found on the scan grid, ascending. Empty when f has no sign change.
std::vector<BarrierSolution> find_all_roots(const ModelParams& params, const ScanOptions& options = {});

}  // namespace mvdiv

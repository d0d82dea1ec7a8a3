#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvdiv/barrier.hpp"
#include "mvdiv/model.hpp"

namespace mvdiv {

/// Value and first two x-derivatives of a function at a point.
struct Jet {
    double value = 0.0;
    double slope = 0.0;
    double curvature = 0.0;
};

/// Which branch to use exactly at the barrier. G and H are only C^1 there,
/// so their second derivatives at x~ exist one-sided only. Away from the
/// barrier the side is ignored.
enum class Side { Left, Right };

/// Barrier-strategy candidate: G = E[Y], H = E[Y^2] and V = G - (gamma/2)(H - G^2)
/// in closed form, with constants fixed by C^1 pasting at the barrier.
class ClosedFormSolution {
public:
    const ModelParams& params() const noexcept { return params_; }
    const CharacteristicRoots& roots() const noexcept { return roots_; }
    double barrier() const noexcept { return x_tilde_; }
    double c1() const noexcept { return c1_; }
    double c3() const noexcept { return c3_; }

    Jet mean(double x, Side side = Side::Right) const;
    Jet second_moment(double x, Side side = Side::Right) const;
    Jet value(double x, Side side = Side::Right) const;

    /// V'' on [0, x~) from the factored product form
    ///   V''(x) = (r1 e^{r1 x} - r2 e^{r2 x}) / (r1 e^{r1 x~} - r2 e^{r2 x~}) * g(x, x~).
    /// Independent of value(); used to cross-check it.
    double value_curvature_product_form(double x) const;

private:
    friend ClosedFormSolution build_solution(const ModelParams&, double);
    ClosedFormSolution(const ModelParams& params, double x_tilde);

    Jet no_transaction_mean(double x) const;
    Jet no_transaction_second_moment(double x) const;

    ModelParams params_;
    CharacteristicRoots roots_;
    double x_tilde_;
    double c1_;
    double c3_;
    // Constants rescaled by e^{r1 x~} and e^{r3 x~} so evaluation never overflows.
    double g_scale_;
    double h_scale_;
};

/// Throws Error{DegenerateBarrier} when x_tilde <= 0.
ClosedFormSolution build_solution(const ModelParams& params, double x_tilde);

/// Pay-everything strategy: V(x) = G(x) = x, H(x) = x^2.
class PayAllSolution {
public:
    const ModelParams& params() const noexcept { return params_; }
    double barrier() const noexcept { return 0.0; }

    Jet mean(double x, Side side = Side::Right) const;
    Jet second_moment(double x, Side side = Side::Right) const;
    Jet value(double x, Side side = Side::Right) const;

private:
    friend PayAllSolution pay_all_solution(const ModelParams&);
    explicit PayAllSolution(const ModelParams& params) : params_(params) {}

    ModelParams params_;
};

/// Throws Error{RegimeMismatch} when gamma < 2a/b^2.
PayAllSolution pay_all_solution(const ModelParams& params);

struct ConcavityResult {
    bool concave;
    std::optional<double> first_violation;
};

/// Strict concavity of V on the open interval (0, x~): V'' < -tol_strict at
/// every interior node of a uniform n_grid-point grid over [0, x~].
ConcavityResult check_concavity(const ClosedFormSolution& sol, std::size_t n_grid = 10001,
                                double tol_strict = 0.0);

struct VerifyOptions {
    std::size_t n_grid = 2001;
    /// Right end of the pay-region window; defaults to x~ + 10.
    std::optional<double> x_max;
    double tol_res = 1e-8;
    double tol_ineq = 1e-12;
};

struct ConditionRecord {
    std::string name;
    std::string region;
    double worst_residual;
    double worst_location;
    double tolerance;
    bool pass;
};

struct VerificationReport {
    std::vector<ConditionRecord> conditions;

    bool all_pass() const;
    const ConditionRecord* find(std::string_view name) const;
};

/// Checks the extended HJB system, boundary values and pasting conditions on a grid.
/// Residuals use analytic derivatives, M phi = a phi' + (1/2) b^2 phi''.
VerificationReport verify_hjb(const ClosedFormSolution& sol, const VerifyOptions& options = {});
VerificationReport verify_hjb(const PayAllSolution& sol, const VerifyOptions& options = {});

/// First HJB term MV - (g/2) M(G^2) + g G MG - rho G + g rho (H - G^2) at x.
double value_hjb_term(const ClosedFormSolution& sol, double x, Side side = Side::Right);
double value_hjb_term(const PayAllSolution& sol, double x, Side side = Side::Right);

enum class Classification { PayAll, BarrierEquilibrium, Indeterminate };

std::string_view to_string(Classification c) noexcept;

struct SolveOptions {
    ScanOptions scan;
    std::size_t concavity_grid = 10001;
};

struct EquilibriumResult {
    Regime regime;
    Classification classification;
    std::optional<BarrierSolution> barrier;
    std::optional<ClosedFormSolution> solution;
    std::optional<ConcavityResult> concavity;
};

/// Dispatch on the regime. In the barrier regime the candidate is an equilibrium
/// when V is strictly concave below the barrier; otherwise it is reported as
/// Indeterminate (no equilibrium is known there). NoRoot / MultipleRoots propagate.
EquilibriumResult solve_equilibrium(const ModelParams& params, const SolveOptions& options = {});

}  // namespace mvdiv

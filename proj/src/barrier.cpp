#include "mvdiv/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvdiv/error.hpp"

namespace mvdiv {

namespace {

struct RatioTerms {
    double g_curvature;  // (r1^2 e1 - r2^2 e2) / (r1 e1 - r2 e2)
    double g_mass;       // (e1 - e2) / (r1 e1 - r2 e2)
    double h_curvature;  // (r3^2 e3 - r4^2 e4) / (r3 e3 - r4 e4)
};

RatioTerms ratio_terms(double x, const CharacteristicRoots& r) {
    const double q1 = std::exp((r.g_minus - r.g_plus) * x);
    const double q3 = std::exp((r.h_minus - r.h_plus) * x);
    const double d1 = r.g_plus - r.g_minus * q1;
    const double d3 = r.h_plus - r.h_minus * q3;
    return RatioTerms{
        .g_curvature = (r.g_plus * r.g_plus - r.g_minus * r.g_minus * q1) / d1,
        .g_mass = (1.0 - q1) / d1,
        .h_curvature = (r.h_plus * r.h_plus - r.h_minus * r.h_minus * q3) / d3,
    };
}

struct Bracket {
    double lo;
    double hi;
    double f_lo;
    double f_hi;
};

// Bisection core with a secant proposal each round; the secant point is only
// used when it lands strictly inside the bracket, and a bisection step follows
// whenever the bracket failed to halve.
template <class F>
BarrierSolution refine(F&& f, Bracket br, double tol) {
    double best_x = std::abs(br.f_lo) <= std::abs(br.f_hi) ? br.lo : br.hi;
    double best_f = std::min(std::abs(br.f_lo), std::abs(br.f_hi));

    auto update = [&](double x, double fx) {
        if (std::abs(fx) < best_f || (std::abs(fx) == best_f && x < best_x)) {
            best_x = x;
            best_f = std::abs(fx);
        }
        if (fx == 0.0) {
            br = Bracket{x, x, 0.0, 0.0};
        } else if ((fx < 0.0) == (br.f_lo < 0.0)) {
            br.lo = x;
            br.f_lo = fx;
        } else {
            br.hi = x;
            br.f_hi = fx;
        }
    };

    for (int iter = 0; iter < 400; ++iter) {
        const double width = br.hi - br.lo;
        if (width <= tol && best_f <= tol) break;
        if (width == 0.0) break;

        const double secant = br.hi - br.f_hi * (br.hi - br.lo) / (br.f_hi - br.f_lo);
        if (std::isfinite(secant) && secant > br.lo && secant < br.hi) {
            update(secant, f(secant));
        }
        if (br.hi - br.lo > 0.5 * width) {
            const double mid = br.lo + 0.5 * (br.hi - br.lo);
            if (mid <= br.lo || mid >= br.hi) break;  // bracket at floating-point resolution
            update(mid, f(mid));
        }
    }
    return BarrierSolution{
        .x_tilde = best_x,
        .lo = std::min(br.lo, best_x),
        .hi = std::max(br.hi, best_x),
        .residual = best_f,
        .root_count_on_scan = 0,
    };
}

std::vector<BarrierSolution> scan_roots(const ModelParams& params, const ScanOptions& options) {
    if (options.n_scan < 2) {
        throw Error(ErrorCode::InvalidArgument, "n_scan must be at least 2");
    }
    if (!(options.tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "root tolerance must be positive");
    }
    const double x_max = options.x_max.value_or(default_scan_limit(params));
    if (!(x_max > 0.0) || !std::isfinite(x_max)) {
        throw Error(ErrorCode::InvalidArgument, "scan limit x_max must be positive");
    }

    const CharacteristicRoots roots = characteristic_roots(params);
    auto f = [&](double x) { return barrier_function(x, params, roots); };

    const std::size_t n = options.n_scan;
    const double h = x_max / static_cast<double>(n - 1);
    std::vector<double> xs(n);
    std::vector<double> fs(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = i + 1 == n ? x_max : h * static_cast<double>(i);
        fs[i] = f(xs[i]);
    }
    // f(0) = 0 only at gamma = 2a/b^2; that boundary root is not a positive barrier.
    if (fs[0] == 0.0) {
        xs[0] = 1e-6 * h;
        fs[0] = f(xs[0]);
    }

    std::vector<BarrierSolution> found;
    for (std::size_t i = 1; i < n; ++i) {
        if (fs[i] == 0.0) {
            found.push_back({xs[i], xs[i], xs[i], 0.0, 0});
            continue;
        }
        if (fs[i - 1] != 0.0 && (fs[i - 1] < 0.0) != (fs[i] < 0.0)) {
            found.push_back(refine(f, Bracket{xs[i - 1], xs[i], fs[i - 1], fs[i]}, options.tol));
        }
    }
    const int count = static_cast<int>(found.size());
    for (auto& s : found) s.root_count_on_scan = count;
    return found;
}

}  // namespace

double barrier_function(double x, const ModelParams& params, const CharacteristicRoots& roots) {
    if (!(x >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "barrier_function requires x >= 0");
    }
    const double gamma = params.risk_aversion();
    if (x == 0.0) return gamma - params.pay_all_threshold();

    const RatioTerms t = ratio_terms(x, roots);
    return t.g_curvature + gamma * (1.0 + t.g_mass * (t.g_curvature - t.h_curvature));
}

double barrier_function(double x, const ModelParams& params) {
    return barrier_function(x, params, characteristic_roots(params));
}

double barrier_function_limit(const ModelParams& params, const CharacteristicRoots& roots) {
    return roots.g_plus + params.risk_aversion() * (2.0 - roots.h_plus / roots.g_plus);
}

double taksar_barrier(const ModelParams& params) {
    const double a = params.drift();
    const double b2 = params.volatility() * params.volatility();
    const double s = std::sqrt(a * a + 2.0 * params.discount_rate() * b2);
    // (s + a) / (s - a) with s - a = 2 rho b^2 / (s + a)
    const double ratio = (s + a) * (s + a) / (2.0 * params.discount_rate() * b2);
    return b2 / s * std::log(ratio);
}

double default_scan_limit(const ModelParams& params) {
    return 20.0 * taksar_barrier(params);
}

BarrierSolution solve_barrier(const ModelParams& params, const ScanOptions& options) {
    const auto roots = scan_roots(params, options);
    if (roots.empty()) {
        throw Error(ErrorCode::NoRoot,
                    "barrier equation has no sign change on [0, " +
                        std::to_string(options.x_max.value_or(default_scan_limit(params))) + "]");
    }
    if (roots.size() > 1) {
        throw Error(ErrorCode::MultipleRoots,
                    "barrier equation has " + std::to_string(roots.size()) + " roots on the scan");
    }
    return roots.front();
}

std::vector<BarrierSolution> find_all_roots(const ModelParams& params, const ScanOptions& options) {
    return scan_roots(params, options);
}

}  // namespace mvdiv

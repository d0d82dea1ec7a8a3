#include "mvdiv/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#if defined(__AVX2__) || defined(__AVX512F__)
#include <immintrin.h>
#endif

#include "mvdiv/error.hpp"
#include "normal.hpp"
#include "parallel.hpp"

namespace mvdiv {

double resolved_horizon(const SimConfig& cfg, const ModelParams& params) {
    return cfg.t_max.value_or(60.0 / params.discount_rate());
}

void validate(const SimConfig& cfg, const ModelParams& params) {
    const double t_max = resolved_horizon(cfg, params);
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("dt must be positive");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) fail("t_max must be positive");
    if (cfg.dt > t_max) fail("dt must not exceed t_max");
    if (cfg.n_paths < 1) fail("n_paths must be at least 1");
    if (!(cfg.x0 >= 0.0) || !std::isfinite(cfg.x0)) fail("x0 must be non-negative");
    if (!(cfg.tail_tolerance > 0.0)) fail("tail_tolerance must be positive");
}

namespace {

// Per-run constants of the path recursion.
struct Kernel {
    double barrier;
    double start;
    double lump;
    double drift_step;
    double vol_step;
    double discount_step;
    double dt;
    std::size_t n_steps;
    bool bridge;
    double bridge_scale;  // 2 / (b^2 dt)
};

Kernel make_kernel(const BarrierStrategy& strategy, const SimConfig& cfg) {
    if (!(strategy.barrier >= 0.0) || !std::isfinite(strategy.barrier)) {
        throw Error(ErrorCode::InvalidArgument, "strategy barrier must be non-negative");
    }
    validate(cfg, strategy.params);
    const ModelParams& p = strategy.params;
    const double t_max = resolved_horizon(cfg, p);
    const double b = p.volatility();
    // Guard against t_max / dt landing a hair above an integer.
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / cfg.dt * (1.0 - 1e-12)));
    return Kernel{
        .barrier = strategy.barrier,
        .start = std::min(cfg.x0, strategy.barrier),
        .lump = std::max(cfg.x0 - strategy.barrier, 0.0),
        .drift_step = p.drift() * cfg.dt,
        .vol_step = b * std::sqrt(cfg.dt),
        .discount_step = std::exp(-p.discount_rate() * cfg.dt),
        .dt = cfg.dt,
        .n_steps = std::max<std::size_t>(n_steps, 1),
        .bridge = cfg.ruin == RuinMonitoring::BrownianBridge,
        .bridge_scale = 2.0 / (b * b * cfg.dt),
    };
}

PathResult run_path(const Kernel& k, Xoshiro256pp& rng) {
    PathResult out{.y = k.lump, .ruin_time = std::nullopt, .initial_lump = k.lump};
    double x = k.start;
    if (x <= 0.0) {
        out.ruin_time = 0.0;
        return out;
    }
    const detail::Ziggurat& zig = detail::ziggurat();
    double discount = 1.0;
    for (std::size_t step = 0; step < k.n_steps; ++step) {
        double next = x + k.drift_step + k.vol_step * detail::standard_normal(rng, zig);
        discount *= k.discount_step;
        if (next <= 0.0) {
            out.ruin_time = static_cast<double>(step + 1) * k.dt;
            return out;
        }
        if (k.bridge) {
            const double exponent = k.bridge_scale * x * next;
            // exp(-40) is far below anything a double-precision uniform resolves in practice
            if (exponent < 40.0 && rng.uniform_open() < std::exp(-exponent)) {
                out.ruin_time = static_cast<double>(step + 1) * k.dt;
                return out;
            }
        }
        if (next > k.barrier) {
            out.y += discount * (next - k.barrier);
            next = k.barrier;
        }
        x = next;
    }
    return out;
}

// Lanes per vector follow the widest available registers; results do not
// depend on the choice because every lane runs its own path.
#if defined(__AVX512F__) && defined(__AVX512DQ__)
constexpr std::size_t kLanes = 8;
#elif defined(__AVX2__)
constexpr std::size_t kLanes = 4;
#else
constexpr std::size_t kLanes = 2;
#endif
constexpr std::size_t kBatch = 512;
constexpr std::size_t kGroups = 2;

using u64v = std::uint64_t __attribute__((vector_size(8 * kLanes)));
using i64v = std::int64_t __attribute__((vector_size(8 * kLanes)));
using f64v = double __attribute__((vector_size(8 * kLanes)));

inline u64v rotl(u64v x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

#if defined(__AVX512F__) && defined(__AVX512DQ__)
inline bool any_lane(i64v mask) noexcept {
    const auto m = std::bit_cast<__m512i>(mask);
    return _mm512_test_epi64_mask(m, m) != 0;
}

inline f64v gather(const double* table, u64v idx) noexcept {
    return std::bit_cast<f64v>(_mm512_i64gather_pd(std::bit_cast<__m512i>(idx), table, 8));
}
#elif defined(__AVX2__)
inline bool any_lane(i64v mask) noexcept {
    const auto m = std::bit_cast<__m256i>(mask);
    return _mm256_testz_si256(m, m) == 0;
}

inline f64v gather(const double* table, u64v idx) noexcept {
    return std::bit_cast<f64v>(_mm256_i64gather_pd(table, std::bit_cast<__m256i>(idx), 8));
}
#else
inline bool any_lane(i64v mask) noexcept {
    std::int64_t acc = 0;
    for (std::size_t l = 0; l < kLanes; ++l) acc |= mask[l];
    return acc != 0;
}

inline f64v gather(const double* table, u64v idx) noexcept {
    f64v out;
    for (std::size_t l = 0; l < kLanes; ++l) out[l] = table[idx[l]];
    return out;
}
#endif

/// kLanes paths advanced in lock-step, each lane with its own path stream.
struct LaneGroup {
    u64v s0{}, s1{}, s2{}, s3{};
    f64v x{}, discount{}, acc{};
    i64v steps{};
    std::size_t path[kLanes]{};
    bool live[kLanes]{};
};

/// Paths [begin, end) handed out to lanes in order.
struct PathFeed {
    const Kernel& k;
    std::uint64_t seed;
    std::size_t next;
    std::size_t end;
    std::size_t n_live = 0;

    void load(LaneGroup& g, std::size_t l) {
        g.live[l] = next < end;
        const auto st = path_stream(seed, g.live[l] ? next : 0).state();
        g.s0[l] = st[0];
        g.s1[l] = st[1];
        g.s2[l] = st[2];
        g.s3[l] = st[3];
        g.x[l] = k.start;
        g.discount[l] = 1.0;
        g.acc[l] = k.lump;
        g.steps[l] = 0;
        if (g.live[l]) {
            g.path[l] = next++;
            ++n_live;
        }
    }
};

struct StepConstants {
    f64v drift, vol, disc_step, barrier;
    i64v n_steps;
};

/// One Euler step for all lanes of `g`; finished lanes are written out and refilled.
inline void advance(LaneGroup& g, const StepConstants& c, const detail::Ziggurat& zig, PathFeed& feed, double* y,
                    unsigned char* truncated) {
    const f64v zero{};
    const u64v bits = rotl(g.s0 + g.s3, 23) + g.s0;
    const u64v t = g.s1 << 17;
    g.s2 ^= g.s0;
    g.s3 ^= g.s1;
    g.s1 ^= g.s2;
    g.s0 ^= g.s3;
    g.s2 ^= t;
    g.s3 = rotl(g.s3, 45);

    const f64v u = __builtin_convertvector(bits >> 11, f64v) * 0x1.0p-52 - 1.0;
    const u64v idx = bits & (detail::Ziggurat::kLayers - 1);
    const f64v width = gather(zig.x.data(), idx);
    const f64v ratio = gather(zig.ratio.data(), idx);
    f64v z = u * width;
    const f64v abs_u = u < zero ? -u : u;
    const i64v reject = !(abs_u < ratio);
    if (any_lane(reject)) [[unlikely]] {
        for (std::size_t l = 0; l < kLanes; ++l) {
            if (!reject[l]) continue;
            auto rng = Xoshiro256pp::from_state({g.s0[l], g.s1[l], g.s2[l], g.s3[l]});
            z[l] = detail::normal_slow_path(rng, u[l], static_cast<unsigned>(idx[l]), zig);
            const auto& st = rng.state();
            g.s0[l] = st[0];
            g.s1[l] = st[1];
            g.s2[l] = st[2];
            g.s3[l] = st[3];
        }
    }

    const f64v next = g.x + c.drift + c.vol * z;
    g.discount *= c.disc_step;
    const i64v over = next > c.barrier;
    g.acc += over ? g.discount * (next - c.barrier) : zero;
    g.x = over ? c.barrier : next;
    g.steps += 1;
    const i64v ruin = next <= zero;
    const i64v done = ruin | (g.steps == c.n_steps);
    if (any_lane(done)) [[unlikely]] {
        for (std::size_t l = 0; l < kLanes; ++l) {
            if (!done[l] || !g.live[l]) continue;
            y[g.path[l]] = g.acc[l];
            truncated[g.path[l]] = ruin[l] ? 0 : 1;
            --feed.n_live;
            feed.load(g, l);
        }
    }
}

/// Runs paths [begin, end) in interleaved lane groups. Performs
/// exactly the arithmetic of run_path (grid monitoring), so every path is
/// bit-identical to its scalar counterpart.
void run_batch(const Kernel& k, std::uint64_t seed, std::size_t begin, std::size_t end, double* y,
               unsigned char* truncated) {
    const detail::Ziggurat& zig = detail::ziggurat();
    const StepConstants c{
        .drift = f64v{} + k.drift_step,
        .vol = f64v{} + k.vol_step,
        .disc_step = f64v{} + k.discount_step,
        .barrier = f64v{} + k.barrier,
        .n_steps = i64v{} + static_cast<std::int64_t>(k.n_steps),
    };
    PathFeed feed{.k = k, .seed = seed, .next = begin, .end = end};
    LaneGroup groups[kGroups];
    for (auto& g : groups)
        for (std::size_t l = 0; l < kLanes; ++l) feed.load(g, l);
    while (feed.n_live > 0) {
        for (auto& g : groups) advance(g, c, zig, feed, y, truncated);
    }
}

}  // namespace

PathResult simulate_path(const BarrierStrategy& strategy, const SimConfig& cfg, Xoshiro256pp& rng) {
    return run_path(make_kernel(strategy, cfg), rng);
}

SimEstimate estimate_moments(const BarrierStrategy& strategy, const SimConfig& cfg) {
    const Kernel kernel = make_kernel(strategy, cfg);
    const std::size_t n = cfg.n_paths;

    std::vector<double> y(n);
    std::vector<unsigned char> truncated(n);
    if (kernel.start <= 0.0) {
        // Every path is ruined at time zero after the initial lump.
        std::fill(y.begin(), y.end(), kernel.lump);
    } else if (kernel.bridge) {
        detail::parallel_for(n, cfg.threads, [&](std::size_t i) {
            Xoshiro256pp rng = path_stream(cfg.seed, i);
            const PathResult r = run_path(kernel, rng);
            y[i] = r.y;
            truncated[i] = r.ruin_time ? 0 : 1;
        });
    } else {
        const std::size_t n_batches = (n + kBatch - 1) / kBatch;
        detail::parallel_for(
            n_batches, cfg.threads,
            [&](std::size_t b) {
                run_batch(kernel, cfg.seed, b * kBatch, std::min(n, (b + 1) * kBatch), y.data(), truncated.data());
            },
            1);
    }

    std::vector<double> y2(n);
    for (std::size_t i = 0; i < n; ++i) y2[i] = y[i] * y[i];

    const double nd = static_cast<double>(n);
    const double g_hat = detail::pairwise_sum(y) / nd;
    const double h_hat = detail::pairwise_sum(y2) / nd;

    // Two-pass variances: exact zero for constant samples.
    std::vector<double> dev(n);
    for (std::size_t i = 0; i < n; ++i) dev[i] = (y[i] - g_hat) * (y[i] - g_hat);
    const double var_y = n > 1 ? detail::pairwise_sum(dev) / (nd - 1.0) : 0.0;
    for (std::size_t i = 0; i < n; ++i) dev[i] = (y2[i] - h_hat) * (y2[i] - h_hat);
    const double var_y2 = n > 1 ? detail::pairwise_sum(dev) / (nd - 1.0) : 0.0;

    std::size_t n_truncated = 0;
    for (std::size_t i = 0; i < n; ++i) n_truncated += truncated[i];
    const std::size_t n_ruined = n - n_truncated;

    const double gamma = strategy.params.risk_aversion();
    SimEstimate est{
        .g_hat = g_hat,
        .h_hat = h_hat,
        .v_hat = g_hat - 0.5 * gamma * (h_hat - g_hat * g_hat),
        .se_g = std::sqrt(var_y / nd),
        .se_h = std::sqrt(var_y2 / nd),
        .n_paths = n,
        .truncated_fraction = static_cast<double>(n_truncated) / nd,
        .ruined_fraction = static_cast<double>(n_ruined) / nd,
    };

    const double tail = std::exp(-strategy.params.discount_rate() * resolved_horizon(cfg, strategy.params));
    if (est.truncated_fraction > 0.01 && tail > cfg.tail_tolerance) {
        throw Error(ErrorCode::ExcessTruncation,
                    std::to_string(100.0 * est.truncated_fraction) +
                        "% of paths reached t_max while the discounted tail weight e^{-rho t_max} = " +
                        std::to_string(tail) + " exceeds the tolerance; increase t_max");
    }
    return est;
}

SimEstimate estimate_moments(const ClosedFormSolution& sol, const SimConfig& cfg) {
    return estimate_moments(BarrierStrategy::from(sol), cfg);
}

std::vector<FrontierRow> estimate_mv_frontier(const ModelParams& params, const std::vector<double>& barriers,
                                              const SimConfig& cfg) {
    std::vector<FrontierRow> rows;
    rows.reserve(barriers.size());
    for (double barrier : barriers) {
        if (!(barrier > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "frontier barriers must be positive");
        }
        const SimEstimate est = estimate_moments(BarrierStrategy{params, barrier}, cfg);
        const double var = est.h_hat - est.g_hat * est.g_hat;
        rows.push_back(FrontierRow{
            .barrier = barrier,
            .g_hat = est.g_hat,
            .var_hat = var,
            .j_hat = est.v_hat,
            .se_g = est.se_g,
        });
    }
    return rows;
}

}  // namespace mvdiv

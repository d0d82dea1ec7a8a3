#include "normal.hpp"

namespace mvdiv::detail {

namespace {

// Tail cut-off and common layer area for 1024 layers of exp(-x^2 / 2),
// solved in 40-digit arithmetic so that the top layer closes at x = 0.
constexpr double kR = 4.0388498461095045227;
constexpr double kV = 0.0012263246463530880729;

Ziggurat build() {
    Ziggurat z{};
    double f = std::exp(-0.5 * kR * kR);
    z.x[0] = kV / f;
    z.x[1] = kR;
    for (unsigned i = 2; i < Ziggurat::kLayers; ++i) {
        z.x[i] = std::sqrt(-2.0 * std::log(kV / z.x[i - 1] + f));
        f = std::exp(-0.5 * z.x[i] * z.x[i]);
    }
    z.x[Ziggurat::kLayers] = 0.0;
    for (unsigned i = 0; i <= Ziggurat::kLayers; ++i) z.f[i] = std::exp(-0.5 * z.x[i] * z.x[i]);
    for (unsigned i = 0; i < Ziggurat::kLayers; ++i) z.ratio[i] = z.x[i + 1] / z.x[i];
    return z;
}

}  // namespace

const Ziggurat& ziggurat() noexcept {
    static const Ziggurat z = build();
    return z;
}

double normal_slow_path(Xoshiro256pp& rng, double u, unsigned layer, const Ziggurat& z) noexcept {
    for (;;) {
        if (layer == 0) {
            // Tail beyond R (Marsaglia's exponential rejection).
            double a = 0.0;
            double b = 0.0;
            do {
                a = -std::log(rng.uniform_open()) / kR;
                b = -std::log(rng.uniform_open());
            } while (b + b < a * a);
            return u < 0.0 ? -(kR + a) : kR + a;
        }
        // Wedge: accept when a uniform height between the layer's density
        // bounds falls under the curve.
        const double x = u * z.x[layer];
        const double f0 = z.f[layer];
        const double f1 = z.f[layer + 1];
        if (f0 + rng.uniform_open() * (f1 - f0) < std::exp(-0.5 * x * x)) return x;

        const std::uint64_t bits = rng();
        u = zig_uniform(bits);
        layer = zig_layer(bits);
        if (std::abs(u) < z.ratio[layer]) return u * z.x[layer];
    }
}

}  // namespace mvdiv::detail

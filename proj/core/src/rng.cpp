#include "gssqpe/rng.hpp"

#include <cmath>
#include <numbers>

namespace gssqpe {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t s = master_seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (index * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL);
    std::uint64_t b = splitmix64(s);
    return b ? b : 0x9e3779b97f4a7c15ULL;
}

double Rng::uniform() {
    // 53-bit mantissa from the top bits
    return double(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t Rng::uniform_int_inclusive(std::int64_t n) {
    // n + 1 possible values; rejection-free for our n << 2^63
    const std::uint64_t span = std::uint64_t(n) + 1;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return std::int64_t(x % span);
}

double Rng::vonmises(double gamma) {
    constexpr double pi = std::numbers::pi;
    if (gamma < 1e-9) return uniform(-pi, pi);
    // Best & Fisher (1979) wrapped-Cauchy envelope rejection
    const double tau = 1.0 + std::sqrt(1.0 + 4.0 * gamma * gamma);
    const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * gamma);
    const double r = (1.0 + rho * rho) / (2.0 * rho);
    for (;;) {
        const double u1 = uniform();
        const double z = std::cos(pi * u1);
        const double f = (1.0 + r * z) / (r + z);
        const double c = gamma * (r - f);
        const double u2 = uniform();
        if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
            const double u3 = uniform();
            const double phi = (u3 < 0.5 ? -1.0 : 1.0) * std::acos(f);
            return phi;
        }
    }
}

}  // namespace gssqpe

#pragma once

#include <cstdint>
#include <random>

namespace gssqpe {

// splitmix64 step; used to derive independent per-trial seeds from a master seed
// so that results do not depend on worker count or execution order.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

// mt19937_64 with explicit, stateless draw methods (normals are not cached),
// so a given seed yields one well-defined stream.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // [0, 1)
    double uniform();
    double uniform(double a, double b);
    // standard normal via Box-Muller (two uniforms per draw, no cached spare)
    double normal();
    // integer in [0, n] inclusive
    std::int64_t uniform_int_inclusive(std::int64_t n);
    // von Mises with density e^{gamma cos phi} / (2 pi I0(gamma)) on [-pi, pi),
    // Best-Fisher rejection sampling; gamma = 0 falls back to uniform
    double vonmises(double gamma);

  private:
    std::mt19937_64 engine_;
};

}  // namespace gssqpe

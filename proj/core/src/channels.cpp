#include "gssqpe/channels.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

namespace gssqpe {

namespace {
constexpr double pi = std::numbers::pi;

// Integral f(phi) e^{gamma(cos phi - 1)} dphi over [-pi, pi]; the shifted exponent
// keeps the integrand in range for arbitrarily large gamma. For concentrated
// densities the domain is cut to the support (half-width ~ 1/sqrt(gamma)), the
// discarded tail being below e^{-600}.
template <class F>
double vm_integral(double gamma, F&& f) {
    using boost::math::quadrature::gauss_kronrod;
    auto g = [&](double phi) { return f(phi) * std::exp(gamma * (std::cos(phi) - 1.0)); };
    const double w = (gamma > 160.0) ? std::min(pi, 40.0 / std::sqrt(gamma)) : pi;
    return gauss_kronrod<double, 15>::integrate(g, -w, w, 12, 1e-12);
}
}  // namespace

double sample_dephasing_angle(const DephasingConfig& cfg, Rng& rng) {
    if (cfg.gamma < 0 || !std::isfinite(cfg.gamma))
        throw ConfigError("dephasing: gamma must be finite and >= 0");
    return rng.vonmises(cfg.gamma);
}

FourierCoefficients fourier_coefficients(const DephasingConfig& cfg) {
    if (cfg.gamma < 0 || !std::isfinite(cfg.gamma))
        throw ConfigError("dephasing: gamma must be finite and >= 0");
    const double norm = vm_integral(cfg.gamma, [](double) { return 1.0; });
    FourierCoefficients fc;
    fc.c1 = vm_integral(cfg.gamma, [](double p) { return std::cos(p); }) / norm;
    fc.c2 = vm_integral(cfg.gamma, [](double p) { return std::cos(2 * p); }) / norm;
    return fc;
}

SpinMoments dephase_moments(const SpinMoments& m, const DephasingConfig& cfg) {
    return dephase_moments(m, fourier_coefficients(cfg));
}

SpinMoments dephase_moments(const SpinMoments& m, const FourierCoefficients& fc) {
    const double scale = std::max({std::abs(m.jx), std::abs(m.jy), 1.0});
    if (std::abs(m.jy) > 1e-9 * scale || std::abs(m.jz) > 1e-9 * scale)
        throw ConfigError("dephase_moments: input must be y-symmetric (jy = jz = 0)");
    SpinMoments out = m;
    out.jx = fc.c1 * m.jx;
    out.jz = 0.0;
    out.jx2 = 0.5 * (1.0 + fc.c2) * m.jx2 + 0.5 * (1.0 - fc.c2) * m.jz2;
    out.jz2 = 0.5 * (1.0 - fc.c2) * m.jx2 + 0.5 * (1.0 + fc.c2) * m.jz2;
    return out;
}

SpinMoments depolarize_moments(const SpinMoments& m, const DepolarizationConfig& cfg, int n_qubits) {
    if (cfg.epsilon < 0 || cfg.epsilon > 1) throw ConfigError("depolarize: eps must be in [0, 1]");
    const double e = cfg.epsilon;
    const double n = n_qubits;
    const double mixed2 = n * (n + 2.0) / 12.0;  // Sum mu^2 / (N+1), exact
    SpinMoments out = m;
    out.jx = (1 - e) * m.jx;
    out.jy = (1 - e) * m.jy;
    out.jz = (1 - e) * m.jz;
    out.jx2 = (1 - e) * m.jx2 + e * mixed2;
    out.jy2 = (1 - e) * m.jy2 + e * mixed2;
    out.jz2 = (1 - e) * m.jz2 + e * mixed2;
    return out;
}

double draw_from_distribution(const Eigen::VectorXd& dist, Rng& rng) {
    const int dim = int(dist.size());
    const double u = rng.uniform() * dist.sum();
    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
        acc += dist[i];
        if (u < acc) return i - 0.5 * (dim - 1);
    }
    return 0.5 * (dim - 1);
}

double sample_depolarized_outcome(const Eigen::VectorXd& dist, const DepolarizationConfig& cfg,
                                  Rng& rng) {
    if (cfg.epsilon < 0 || cfg.epsilon > 1) throw ConfigError("depolarize: eps must be in [0, 1]");
    const int n = int(dist.size()) - 1;
    if (cfg.epsilon > 0 && rng.uniform() < cfg.epsilon)
        return double(rng.uniform_int_inclusive(n)) - 0.5 * n;
    return draw_from_distribution(dist, rng);
}

}  // namespace gssqpe

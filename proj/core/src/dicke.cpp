#include "gssqpe/dicke.hpp"

#include <atomic>
#include <cmath>
#include <numbers>

#include "gssqpe/wigner.hpp"

namespace gssqpe {

namespace {

std::atomic<int> g_exact_cap{4096};

void check_cap(int n, const char* what) {
    if (n > exact_cap())
        throw ExactCapExceeded(std::string(what) + ": N exceeds the exact-path cap, use the Gaussian path");
}

// out = e^{-i angle Jx} c = P^T (e^{i mu angle} .* (P c)), two real matvecs per product
Eigen::VectorXcd rotate_x(const Eigen::MatrixXd& P, const Eigen::VectorXcd& c, double angle, int n) {
    const int dim = n + 1;
    Eigen::VectorXd re = P * c.real();
    Eigen::VectorXd im = P * c.imag();
    Eigen::VectorXcd mixed(dim);
    for (int i = 0; i < dim; ++i) {
        const double mu = i - 0.5 * n;
        const std::complex<double> ph(std::cos(mu * angle), std::sin(mu * angle));
        mixed[i] = ph * std::complex<double>(re[i], im[i]);
    }
    re = P.transpose() * mixed.real();
    im = P.transpose() * mixed.imag();
    Eigen::VectorXcd out(dim);
    for (int i = 0; i < dim; ++i) out[i] = {re[i], im[i]};
    return out;
}

}  // namespace

int exact_cap() { return g_exact_cap.load(std::memory_order_relaxed); }

void set_exact_cap(int n_qubits) {
    if (n_qubits < 1) throw ConfigError("exact cap must be >= 1");
    g_exact_cap.store(n_qubits, std::memory_order_relaxed);
}

StateVector make_coherent_state(int n_qubits) {
    if (n_qubits < 1) throw ConfigError("make_coherent_state: N must be >= 1");
    check_cap(n_qubits, "make_coherent_state");
    const int dim = n_qubits + 1;
    StateVector s;
    s.n_qubits = n_qubits;
    s.amplitudes.resize(dim);
    // sqrt(C(N, i)) / 2^{N/2} in log space; exact up to rounding for any N
    double lg_nf = std::lgamma(n_qubits + 1.0);
    for (int i = 0; i < dim; ++i) {
        double lg = 0.5 * (lg_nf - std::lgamma(i + 1.0) - std::lgamma(n_qubits - i + 1.0)) -
                    0.5 * n_qubits * std::numbers::ln2;
        s.amplitudes[i] = std::exp(lg);
    }
    s.amplitudes /= s.amplitudes.norm();
    return s;
}

StateVector make_gss(const GaussianStateSpec& spec) {
    const int n = spec.n_qubits;
    if (n < 2) throw ConfigError("make_gss: N must be >= 2");
    if (!(spec.squeezing > 0)) throw ConfigError("make_gss: s must be > 0");
    check_cap(n, "make_gss");
    const int dim = n + 1;
    StateVector g;
    g.n_qubits = n;
    g.amplitudes.resize(dim);
    const double inv = 1.0 / (spec.s2() * n);
    for (int i = 0; i < dim; ++i) {
        const double mu = i - 0.5 * n;
        g.amplitudes[i] = std::exp(-mu * mu * inv);
    }
    // normalization by direct summation, not the continuum integral
    g.amplitudes /= g.amplitudes.norm();
    return apply_rotation_x(g, -std::numbers::pi / 2);
}

StateVector apply_rotation_z(const StateVector& state, double angle) {
    StateVector out = state;
    for (int i = 0; i < state.dim(); ++i) {
        const double mu = state.mu(i);
        out.amplitudes[i] *= std::complex<double>(std::cos(mu * angle), -std::sin(mu * angle));
    }
    return out;
}

StateVector apply_rotation_x(const StateVector& state, double angle) {
    check_cap(state.n_qubits, "apply_rotation_x");
    auto P = WignerCache::instance().get(state.n_qubits);
    StateVector out;
    out.n_qubits = state.n_qubits;
    out.amplitudes = rotate_x(*P, state.amplitudes, angle, state.n_qubits);
    return out;
}

StateVector apply_rotation_y(const StateVector& state, double angle) {
    check_cap(state.n_qubits, "apply_rotation_y");
    auto P = WignerCache::instance().get(state.n_qubits);
    const int n = state.n_qubits;
    constexpr double hp = std::numbers::pi / 2;
    Eigen::VectorXcd v = rotate_x(*P, state.amplitudes, hp, n);
    for (int i = 0; i < n + 1; ++i) {
        const double mu = i - 0.5 * n;
        v[i] *= std::complex<double>(std::cos(mu * angle), -std::sin(mu * angle));
    }
    StateVector out;
    out.n_qubits = n;
    out.amplitudes = rotate_x(*P, v, -hp, n);
    return out;
}

SpinMoments spin_moments_exact(const StateVector& state) {
    const int n = state.n_qubits;
    const int dim = n + 1;
    const double j = 0.5 * n;
    const auto& c = state.amplitudes;

    SpinMoments m;
    m.n_qubits = n;
    double jz = 0, jz2 = 0;
    for (int i = 0; i < dim; ++i) {
        const double mu = i - j;
        const double p = std::norm(c[i]);
        jz += mu * p;
        jz2 += mu * mu * p;
    }
    // <J+> and <J+^2> from the ladder action, a_i = sqrt((n-i)(i+1))
    std::complex<double> jp = 0, jp2 = 0;
    for (int i = 0; i + 1 < dim; ++i) {
        const double ai = std::sqrt(double(n - i) * double(i + 1));
        jp += std::conj(c[i + 1]) * ai * c[i];
        if (i + 2 < dim) {
            const double ai1 = std::sqrt(double(n - i - 1) * double(i + 2));
            jp2 += std::conj(c[i + 2]) * ai1 * ai * c[i];
        }
    }
    const double anti = 2.0 * (j * (j + 1) - jz2);  // <J+J- + J-J+>
    m.jz = jz;
    m.jz2 = jz2;
    m.jx = jp.real();
    m.jy = jp.imag();
    m.jx2 = (2.0 * jp2.real() + anti) / 4.0;
    m.jy2 = (-2.0 * jp2.real() + anti) / 4.0;
    return m;
}

SpinMoments spin_moments_analytic(const GaussianStateSpec& spec) {
    const double n = spec.n_qubits;
    const double s2n = spec.s2() * n;
    if (s2n < 1.0)
        throw ConfigError("spin_moments_analytic: validity requires s^2 N >= 1");
    SpinMoments m;
    m.n_qubits = spec.n_qubits;
    const double g1 = std::exp(-0.5 / s2n);
    const double g2 = std::exp(-2.0 / s2n);
    m.jx = 0.5 * n * g1;
    m.jy = m.jz = 0.0;
    m.jx2 = n * n * (1.0 + g2) / 8.0;
    m.jy2 = n * spec.s2() / 4.0;
    m.jz2 = n * n * (1.0 - g2) / 8.0;
    return m;
}

Eigen::VectorXd outcome_distribution(const StateVector& state, double theta) {
    check_cap(state.n_qubits, "outcome_distribution");
    const StateVector out = apply_rotation_x(apply_rotation_z(state, theta), std::numbers::pi / 2);
    Eigen::VectorXd p = out.amplitudes.cwiseAbs2();
    const double total = p.sum();
    if (std::abs(total - 1.0) > 1e-10)
        throw NumericalError("outcome_distribution: probability leaked, |sum-1| = " +
                             std::to_string(std::abs(total - 1.0)));
    return p / total;
}

}  // namespace gssqpe

#pragma once

// Internal helpers shared by schedule and protocol: clean per-step moments of the
// prepared state and their channel transforms. Moment sets here assume the
// y-symmetric states of this protocol (jy = jz = 0, vanishing cross moments).

#include <cmath>
#include <optional>

#include "gssqpe/channels.hpp"
#include "gssqpe/schedule.hpp"

namespace gssqpe::detail {

struct StepMoments {
    double jx = 0, jx2 = 0, jy2 = 0, jz2 = 0;
    double var_x() const { return jx2 - jx * jx; }
};

// k = 0 is the coherent state (exact moments, (dJx)^2 = 0), k >= 1 the GSS closed forms.
inline StepMoments clean_step_moments(double n, double s2, int k) {
    if (k == 0) return {n / 2, n * n / 4, n / 4, n / 4};
    const double g1 = std::exp(-0.5 / (s2 * n));
    const double g2 = std::exp(-2.0 / (s2 * n));
    return {n / 2 * g1, n * n * (1 + g2) / 8, n * s2 / 4, n * n * (1 - g2) / 8};
}

// Rigid rotation e^{-i phi Jy} at the moment level (exact for jy = jz = 0 states).
inline StepMoments rotate_y_moments(const StepMoments& m, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    StepMoments out = m;
    out.jx = c * m.jx;
    out.jx2 = c * c * m.jx2 + s * s * m.jz2;
    out.jz2 = s * s * m.jx2 + c * c * m.jz2;
    return out;
}

// Channel-averaged dephasing transform (Fourier coefficients c1, c2).
inline StepMoments dephase_avg_moments(const StepMoments& m, const FourierCoefficients& fc) {
    StepMoments out = m;
    out.jx = fc.c1 * m.jx;
    out.jx2 = 0.5 * (1 + fc.c2) * m.jx2 + 0.5 * (1 - fc.c2) * m.jz2;
    out.jz2 = 0.5 * (1 - fc.c2) * m.jx2 + 0.5 * (1 + fc.c2) * m.jz2;
    return out;
}

inline StepMoments depolarize_step_moments(const StepMoments& m, double n, double eps) {
    const double mixed2 = n * (n + 2.0) / 12.0;
    StepMoments out;
    out.jx = (1 - eps) * m.jx;
    out.jx2 = (1 - eps) * m.jx2 + eps * mixed2;
    out.jy2 = (1 - eps) * m.jy2 + eps * mixed2;
    out.jz2 = (1 - eps) * m.jz2 + eps * mixed2;
    return out;
}

// attenuation of the mean signal: c1 under dephasing times (1-eps) under depolarization
inline double signal_attenuation(const NoiseConfig& noise,
                                 const std::optional<FourierCoefficients>& fc) {
    double att = fc ? fc->c1 : 1.0;
    if (noise.depolarization) att *= 1.0 - noise.depolarization->epsilon;
    return att;
}

}  // namespace gssqpe::detail

#pragma once

#include <Eigen/Dense>

#include "gssqpe/rng.hpp"
#include "gssqpe/types.hpp"

namespace gssqpe {

// Collective dephasing about the y axis: stochastic rotation e^{-i phi Jy} with
// phi ~ P(phi) = e^{gamma cos phi} / (2 pi I0(gamma)).
struct DephasingConfig {
    double gamma = 0.0;  // von Mises concentration, >= 0; gamma -> inf is the identity
};

// Depolarization within the symmetric subspace:
// rho -> (1-eps) rho + eps/(N+1) * Identity.
struct DepolarizationConfig {
    double epsilon = 0.0;  // in [0, 1]
};

// c_lambda = Integral cos(lambda phi) P(phi) dphi for lambda = 1, 2.
struct FourierCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
};

// Draw phi in [-pi, pi) from the normalized von Mises density.
double sample_dephasing_angle(const DephasingConfig& cfg, Rng& rng);

// c1, c2 by adaptive quadrature (absolute error <= 1e-10), stable for any gamma
// because the integrand is evaluated as e^{gamma (cos phi - 1)}.
FourierCoefficients fourier_coefficients(const DephasingConfig& cfg);

// Moment transform of the dephasing channel on a y-symmetric state (jy = jz = 0):
//   jx -> c1 jx, jx2/jz2 mix with weights (1 +- c2)/2, jy moments unchanged.
SpinMoments dephase_moments(const SpinMoments& m, const DephasingConfig& cfg);
SpinMoments dephase_moments(const SpinMoments& m, const FourierCoefficients& fc);

// Moment transform of the depolarization channel: first moments scale by (1-eps),
// second moments mix toward the fully mixed value N(N+2)/12.
SpinMoments depolarize_moments(const SpinMoments& m, const DepolarizationConfig& cfg, int n_qubits);

// Operational form: with probability eps the outcome is uniform over the N+1
// values of mu, otherwise drawn from dist. Returns mu.
double sample_depolarized_outcome(const Eigen::VectorXd& dist, const DepolarizationConfig& cfg,
                                  Rng& rng);

// Inverse-CDF draw from a discrete distribution over mu = -N/2 ... N/2.
double draw_from_distribution(const Eigen::VectorXd& dist, Rng& rng);

}  // namespace gssqpe

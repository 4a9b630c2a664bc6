#pragma once

#include <Eigen/Dense>

#include "gssqpe/types.hpp"

namespace gssqpe {

// x-polarized coherent spin state ((|0> + |1>)/sqrt2)^N: binomial amplitudes on J_z.
StateVector make_coherent_state(int n_qubits);

// Gaussian spin state of Eq-style amplitudes e^{-mu^2/(s^2 N)} on the J_y basis,
// built on the J_z grid and rotated into place with apply_rotation_x(-pi/2).
// Result is x-polarized and squeezed along y: <Jy^2> = N s^2 / 4.
StateVector make_gss(const GaussianStateSpec& spec);

// e^{-i angle J_z}: diagonal phases e^{-i mu angle}.
StateVector apply_rotation_z(const StateVector& state, double angle);

// e^{-i angle J_x} = P^T diag(e^{+i mu angle}) P with P = d(pi/2).
StateVector apply_rotation_x(const StateVector& state, double angle);

// e^{-i angle J_y} = rot_x(-pi/2) rot_z(angle) rot_x(pi/2).
StateVector apply_rotation_y(const StateVector& state, double angle);

// Moments from the tridiagonal ladder action on the amplitude vector, O(N).
SpinMoments spin_moments_exact(const StateVector& state);

// Closed-form moments of the Gaussian spin state, valid for s^2 N >~ 1:
//   <Jx> = (N/2) e^{-1/(2 s^2 N)},  <Jy> = <Jz> = 0,
//   <Jx^2> = N^2 (1 + e^{-2/(s^2 N)})/8,  <Jy^2> = N s^2/4,
//   <Jz^2> = N^2 (1 - e^{-2/(s^2 N)})/8.
SpinMoments spin_moments_analytic(const GaussianStateSpec& spec);

// P(mu | theta) = |<mu| e^{-i (pi/2) Jx} e^{-i theta Jz} |state>|^2.
Eigen::VectorXd outcome_distribution(const StateVector& state, double theta);

}  // namespace gssqpe

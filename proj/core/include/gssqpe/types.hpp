#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace gssqpe {

// Bad user-facing configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure: lost normalization, recursion breakdown, ... (CLI exit code 3).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an exact state-vector operation is requested above the configured cap.
// Callers are expected to fall back to the Gaussian moment path.
struct ExactCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Process-wide cap on the dimension of exact state-vector work (default 4096 qubits).
int exact_cap();
void set_exact_cap(int n_qubits);

// Symmetric (spin-j, j = N/2) state of N qubits: complex amplitudes on the J_z
// eigenbasis, index i <-> mu = i - N/2, mu = -N/2 ... N/2.
struct StateVector {
    int n_qubits = 0;
    Eigen::VectorXcd amplitudes;

    int dim() const { return n_qubits + 1; }
    double mu(int i) const { return i - 0.5 * n_qubits; }
    double norm() const { return amplitudes.norm(); }
};

// First and second moments of the collective spin components, in spin units.
struct SpinMoments {
    double jx = 0, jy = 0, jz = 0;
    double jx2 = 0, jy2 = 0, jz2 = 0;
    int n_qubits = 0;

    double var_x() const { return jx2 - jx * jx; }
    double var_y() const { return jy2 - jy * jy; }
    double var_z() const { return jz2 - jz * jz; }
};

// Gaussian spin state: amplitudes e^{-mu^2/(s^2 N)} on the J_y basis.
// s = 1 is the coherent state, s < 1 squeezed along y.
struct GaussianStateSpec {
    int n_qubits = 0;
    double squeezing = 1.0;  // s, dimensionless

    double s2() const { return squeezing * squeezing; }
};

}  // namespace gssqpe

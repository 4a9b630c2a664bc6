#pragma once

// Test-only reference implementations, kept independent of the library's
// computational paths: dense collective-spin matrices, matrix exponentials via
// eigendecomposition, and a tensor-product construction of the coherent state.

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace oracle {

struct DenseOps {
    Eigen::MatrixXcd jx, jy, jz;
};

// Dense J matrices on the (N+1)-dimensional J_z basis, index 0 <-> mu = -N/2.
inline DenseOps dense_ops(int n) {
    const int dim = n + 1;
    const double j = 0.5 * n;
    Eigen::MatrixXcd jp = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i + 1 < dim; ++i) {
        const double mu = i - j;
        jp(i + 1, i) = std::sqrt(j * (j + 1) - mu * (mu + 1));
    }
    DenseOps ops;
    ops.jx = (jp + jp.adjoint()) / 2.0;
    ops.jy = (jp - jp.adjoint()) / std::complex<double>(0, 2);
    ops.jz = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) ops.jz(i, i) = i - j;
    return ops;
}

// e^{-i t H} for Hermitian H via full eigendecomposition.
inline Eigen::MatrixXcd expm_i(const Eigen::MatrixXcd& h, double t) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const auto& w = es.eigenvalues();
    const auto& v = es.eigenvectors();
    Eigen::VectorXcd ph(w.size());
    for (int i = 0; i < w.size(); ++i)
        ph[i] = std::exp(std::complex<double>(0, -t * w[i]));
    return v * ph.asDiagonal() * v.adjoint();
}

inline double ev(const Eigen::MatrixXcd& op, const Eigen::VectorXcd& psi) {
    return std::real(psi.dot(op * psi));
}

// ((|0> + |1>)/sqrt2)^{tensor N} projected onto the symmetric J_z sectors,
// computed from the explicit 2^N product state. N <= 16.
inline Eigen::VectorXcd coherent_by_tensor_product(int n) {
    const int dim = 1 << n;
    const double amp = std::pow(2.0, -0.5 * n);
    // symmetric basis vector for mu: uniform superposition of strings with
    // (N/2 + mu) zeros; overlap = sqrt(count) * amp
    Eigen::VectorXcd out(n + 1);
    for (int k = 0; k <= n; ++k) {  // k = number of |0> qubits = N/2 + mu
        long long count = 0;
        for (int b = 0; b < dim; ++b)
            if (n - __builtin_popcount(unsigned(b)) == k) ++count;
        out[k] = std::sqrt(double(count)) * amp;
    }
    return out;
}

}  // namespace oracle

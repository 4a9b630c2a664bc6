#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>

namespace gssqpe {

// Wigner small-d matrix at beta = pi/2 for spin j = n_qubits/2:
//   D(r, c) = d^j_{m_r, m_c}(pi/2),  m_i = i - j,  i = 0 ... n_qubits.
// Built column-by-column with the three-term recurrence in m', run from both
// edges with overflow rescaling and stitched near m' = 0. Every rotation in
// this library reduces to this one matrix plus diagonal phase factors, so the
// recursion never runs at an ill-conditioned angle.
Eigen::MatrixXd build_wigner_halfpi(int n_qubits);

// Process-wide cache of d(pi/2) matrices keyed by qubit number, least recently
// used eviction by byte budget. Thread safe; returned matrices are immutable.
class WignerCache {
  public:
    static WignerCache& instance();

    std::shared_ptr<const Eigen::MatrixXd> get(int n_qubits);
    void set_budget(std::size_t bytes);
    void clear();

  private:
    WignerCache() = default;
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

}  // namespace gssqpe

#pragma once
#include <vector>

#include "kq/sv_core.hpp"

namespace kq {

/// Fermionic Gaussian state on n wires tracked by its Majorana covariance
/// Gamma_ab = (i/2) <[gamma_a, gamma_b]>, Majoranas (2w, 2w+1) = (f_w + f_w^dag, i(f_w^dag - f_w)) in wire order.
/// Supports parity-preserving single-qubit gates and two-qubit gates on adjacent wires; global phases are ignored.
class GaussianState {
  public:
    explicit GaussianState(int n_wires); ///< vacuum
    [[nodiscard]] int n_wires() const { return n_; }
    [[nodiscard]] const Eigen::MatrixXd &covariance() const { return g_; }

    void apply(const Gate &g);
    void run(const Circuit &c);

    /// Majorana correlation matrix C = <gamma gamma>/2 of the listed wires.
    [[nodiscard]] Eigen::MatrixXcd correlation_matrix(const std::vector<int> &wires) const;

  private:
    int n_;
    Eigen::MatrixXd g_;
};

/// Orthogonal Majorana rotation of a two-wire gate (rows: images of X_0, Y_0, Z_0 X_1, Z_0 Y_1);
/// raises an error when the gate is not Gaussian.
Eigen::Matrix4d gaussian_rotation(const Mat4 &u);
Eigen::Matrix2d gaussian_rotation(const Mat2 &u);

/// Wire count above which statevector simulation hands over to the covariance simulator.
constexpr int kStatevectorWireLimit = 14;

} // namespace kq

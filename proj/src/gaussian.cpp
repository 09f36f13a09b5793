#include "kq/gaussian.hpp"

#include <array>
#include <cmath>

namespace kq {

namespace {

constexpr cplx I1{0.0, 1.0};

Mat2 px() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}
Mat2 py() {
    Mat2 m;
    m << 0, -I1, I1, 0;
    return m;
}
Mat2 pz() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

/// kron with index b0 + 2 b1: lo acts on bit 0
Mat4 kron2(const Mat2 &hi, const Mat2 &lo) {
    Mat4 out;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) out(2 * a + c, 2 * b + d) = hi(a, b) * lo(c, d);
    return out;
}

template <int D, class M> Eigen::Matrix<double, D, D> rotation(const M &u, const std::array<M, D> &c, double norm) {
    Eigen::Matrix<double, D, D> r;
    for (int a = 0; a < D; ++a) {
        const M img = u.adjoint() * c[a] * u;
        for (int b = 0; b < D; ++b) {
            const cplx v = (img * c[b]).trace() / norm;
            require(std::abs(v.imag()) < 1e-9, ErrorCode::InvalidArgument, "gate is not a fermionic Gaussian operation");
            r(a, b) = v.real();
        }
    }
    require((r * r.transpose() - Eigen::Matrix<double, D, D>::Identity()).cwiseAbs().maxCoeff() < 1e-9, ErrorCode::InvalidArgument,
            "gate is not a fermionic Gaussian operation");
    return r;
}

} // namespace

Eigen::Matrix4d gaussian_rotation(const Mat4 &u) {
    const Mat2 id = Mat2::Identity();
    const std::array<Mat4, 4> c = {kron2(id, px()), kron2(id, py()), kron2(px(), pz()), kron2(py(), pz())};
    return rotation<4>(u, c, 4.0);
}

Eigen::Matrix2d gaussian_rotation(const Mat2 &u) { return rotation<2>(u, std::array<Mat2, 2>{px(), py()}, 2.0); }

GaussianState::GaussianState(int n_wires) : n_(n_wires), g_(Eigen::MatrixXd::Zero(2 * n_wires, 2 * n_wires)) {
    require(n_wires >= 1, ErrorCode::InvalidArgument, "Gaussian state needs at least one wire");
    for (int w = 0; w < n_; ++w) {
        g_(2 * w, 2 * w + 1) = -1;
        g_(2 * w + 1, 2 * w) = 1;
    }
}

void GaussianState::apply(const Gate &g) {
    if (g.kind == GateKind::PHASE) return;
    for (int t : g.targets) require(t >= 0 && t < n_, ErrorCode::InvalidArgument, "gate target out of range");
    if (g.arity() == 1) {
        const Eigen::Matrix2d r = gaussian_rotation(gate_matrix1(g));
        const int o = 2 * g.targets[0];
        g_.middleRows(o, 2) = (r * g_.middleRows(o, 2)).eval();
        g_.middleCols(o, 2) = (g_.middleCols(o, 2) * r.transpose()).eval();
        return;
    }
    int q0 = g.targets[0], q1 = g.targets[1];
    require(std::abs(q0 - q1) == 1, ErrorCode::InvalidArgument, "Gaussian simulation needs adjacent two-qubit gates");
    Mat4 u = gate_matrix2(g);
    if (q0 > q1) {
        // reorder to (low, high)
        Mat4 s = Mat4::Zero();
        s(0, 0) = s(3, 3) = 1;
        s(1, 2) = s(2, 1) = 1;
        u = s * u * s;
        std::swap(q0, q1);
    }
    const Eigen::Matrix4d r = gaussian_rotation(u);
    const int o = 2 * q0;
    g_.middleRows(o, 4) = (r * g_.middleRows(o, 4)).eval();
    g_.middleCols(o, 4) = (g_.middleCols(o, 4) * r.transpose()).eval();
}

void GaussianState::run(const Circuit &c) {
    require(c.n_qubits == n_, ErrorCode::InvalidArgument, "circuit/state wire count mismatch");
    c.validate();
    for (const Gate &g : c.gates) apply(g);
}

Eigen::MatrixXcd GaussianState::correlation_matrix(const std::vector<int> &wires) const {
    const int m = static_cast<int>(wires.size());
    Eigen::MatrixXcd c(2 * m, 2 * m);
    for (int i = 0; i < 2 * m; ++i) {
        const int a = 2 * wires[i / 2] + i % 2;
        for (int j = 0; j < 2 * m; ++j) {
            const int b = 2 * wires[j / 2] + j % 2;
            c(i, j) = 0.5 * ((a == b ? 1.0 : 0.0) - I1 * g_(a, b));
        }
    }
    return c;
}

} // namespace kq

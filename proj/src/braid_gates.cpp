#include "kq/braid_gates.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace kq::braid {

namespace {

constexpr cplx I1{0.0, 1.0};
constexpr double kPi = std::numbers::pi;

void check_sign(int sign) { require(sign == 1 || sign == -1, ErrorCode::InvalidArgument, "braid sign must be +1 or -1"); }

Eigen::MatrixXcd kron_paulis(const Mat2 &hi, const Mat2 &lo) {
    Eigen::MatrixXcd out(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) out(2 * a + c, 2 * b + d) = hi(a, b) * lo(c, d);
    return out;
}

Mat2 pauli_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

std::string basis_label(int idx) {
    // index n_f + 2 n_g, printed as |n_f n_g>
    std::ostringstream s;
    s << '|' << (idx & 1) << ((idx >> 1) & 1) << '>';
    return s.str();
}

} // namespace

Mat2 intra_braid_matrix(int sign) {
    check_sign(sign);
    const double r = 1.0 / std::sqrt(2.0);
    Mat2 m = Mat2::Zero();
    m(0, 0) = r * (1.0 - double(sign) * I1);
    m(1, 1) = r * (1.0 + double(sign) * I1);
    return m;
}

Mat4 inter_braid_matrix(int sign) {
    check_sign(sign);
    const double r = 1.0 / std::sqrt(2.0);
    const cplx s = double(sign) * I1;
    Mat4 m = Mat4::Zero();
    m(0, 0) = r;
    m(0, 3) = r * s;
    m(1, 1) = r;
    m(1, 2) = -r * s;
    m(2, 1) = -r * s;
    m(2, 2) = r;
    m(3, 0) = r * s;
    m(3, 3) = r;
    return m;
}

Circuit inter_braid_circuit(int sign) {
    check_sign(sign);
    // exp(-i pi/4 Y(x)Y) = (V (x) V) exp(-i pi/4 Z(x)Z) (V^dag (x) V^dag), V = S H;
    // exp(-i pi/4 Z(x)Z) = CNOT . Rz(pi/2) . CNOT and Rz(pi/2) = e^{-i pi/4} U1(pi/2).
    Circuit c(2);
    c.add(Gate::u2(0, 0.0, kPi / 2)); // V^dag = H S^dag
    c.add(Gate::u2(1, 0.0, kPi / 2));
    c.add(Gate::cnot(0, 1));
    c.add(Gate::u1(1, kPi / 2));
    c.add(Gate::cnot(0, 1));
    c.add(Gate::u2(0, kPi / 2, kPi)); // V = S H
    c.add(Gate::u2(1, kPi / 2, kPi));
    c.add(Gate::phase(-kPi / 4));
    for (Gate &g : c.gates) g.label = "BEX+";
    if (sign == 1) return c;
    Circuit inv = c.inverse();
    for (Gate &g : inv.gates) g.label = "BEX-";
    return inv;
}

Circuit intra_braid_circuit(int sign, int q) {
    check_sign(sign);
    // B_in^{+/-} = e^{-/+ i pi/4} U1(+/- pi/2)
    Circuit c(q + 1);
    c.add(Gate::u1(q, sign * kPi / 2));
    c.add(Gate::phase(-sign * kPi / 4));
    for (Gate &g : c.gates) g.label = sign > 0 ? "BIN+" : "BIN-";
    return c;
}

Mat4 BondBraidCircuit::unitary() const { return circuit_unitary(circuit); }

bool BondBraidCircuit::chain_structure() const {
    int inter_at = -1, inter_count = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].kind == BraidStep::Kind::Inter) {
            ++inter_count;
            inter_at = static_cast<int>(i);
        }
    }
    if (inter_count != 1) return false;
    bool before = false, after = false;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (steps[i].kind != BraidStep::Kind::Intra) continue;
        if (steps[i].qubit != 0) return false;
        (static_cast<int>(i) < inter_at ? before : after) = true;
    }
    return before && after;
}

BondBraidCircuit make_bond_braiding(const std::vector<BraidStep> &steps, int n_g) {
    require(n_g == 0 || n_g == 1, ErrorCode::InvalidArgument, "n_g must be 0 or 1");
    BondBraidCircuit b;
    b.steps = steps;
    b.n_g = n_g;
    for (const BraidStep &s : steps) {
        if (s.kind == BraidStep::Kind::Inter) {
            b.circuit.append(inter_braid_circuit(s.sign));
        } else {
            require(s.qubit == 0 || s.qubit == 1, ErrorCode::InvalidArgument, "intra braiding qubit must be 0 or 1");
            Circuit one = intra_braid_circuit(s.sign, s.qubit);
            one.n_qubits = 2;
            b.circuit.append(one);
        }
    }
    return b;
}

BondBraidCircuit z_bond_braiding(int n_g) {
    using K = BraidStep::Kind;
    return make_bond_braiding({{K::Intra, -1, 0}, {K::Inter, +1, 0}, {K::Intra, -1, 0}}, n_g);
}

BondBraidCircuit honeycomb_bond_braiding(int n_g) {
    using K = BraidStep::Kind;
    return make_bond_braiding({{K::Intra, +1, 1}, {K::Inter, +1, 0}, {K::Intra, +1, 1}}, n_g);
}

ZConstraintResult verify_z_constraint(const Mat4 &u, int n_g) {
    require(n_g == 0 || n_g == 1, ErrorCode::InvalidArgument, "n_g must be 0 or 1");
    constexpr double tol = 1e-10;
    ZConstraintResult r;
    const double r2 = 1.0 / std::sqrt(2.0);
    // superposition structure: every input column holds exactly two entries of modulus 1/sqrt2
    for (int col = 0; col < 4; ++col) {
        int hits = 0;
        for (int row = 0; row < 4; ++row) {
            const double a = std::abs(u(row, col));
            if (std::abs(a - r2) <= tol) ++hits;
            else if (a > tol) {
                r.diagnostic = "alpha " + basis_label(col) + "->" + basis_label(row) + " has modulus " + std::to_string(a) +
                               ", expected 0 or 1/sqrt2";
                return r;
            }
        }
        if (hits != 2) {
            r.diagnostic = "input " + basis_label(col) + " is not an equal-weight superposition of two site states";
            return r;
        }
    }
    const Eigen::MatrixXcd zz = kron_paulis(pauli_z(), pauli_z());
    const Eigen::MatrixXcd h = u.adjoint() * zz * u;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            if (a != b && std::abs(h(a, b)) > tol) {
                r.diagnostic = "transformed H_z has off-diagonal element <" + basis_label(a).substr(1) + "H_z" + basis_label(b) + " = " +
                               std::to_string(std::abs(h(a, b)));
                return r;
            }
    const double e0 = h(2 * n_g, 2 * n_g).real();     // n_f = 0
    const double e1 = h(2 * n_g + 1, 2 * n_g + 1).real(); // n_f = 1
    if (std::abs(e0 + e1) > tol || std::abs(std::abs(e0) - 1.0) > tol) {
        r.diagnostic = "transformed H_z is not of the form J_z D (2 n_f - 1): diagonal (" + std::to_string(e0) + ", " + std::to_string(e1) + ")";
        return r;
    }
    r.ok = true;
    r.D = e1 > 0 ? +1 : -1;
    return r;
}

ZConstraintResult verify_z_constraint(const BondBraidCircuit &c) { return verify_z_constraint(c.unitary(), c.n_g); }

XConstraintResult verify_x_constraint(const Mat4 &u) {
    // wires 0..3 start as (f1, f2, g1, g2); FSWAP(1,2) interleaves them to (f1, g1, f2, g2),
    // then the braiding blocks map each (f, g) pair to its two sites.
    Circuit w(4);
    w.add(Gate::fswap(1, 2));
    w.add(Gate::custom2(0, 1, u, "BRAID"));
    w.add(Gate::custom2(2, 3, u, "BRAID"));
    const Eigen::MatrixXcd W = circuit_unitary(w);
    auto pauli_matrix = [](const PauliString &p) {
        Eigen::MatrixXcd m(16, 16);
        for (int j = 0; j < 16; ++j) {
            StateVector s = StateVector::basis(4, j);
            for (const auto &[q, op] : p) {
                Mat2 o = Mat2::Identity();
                if (op == Pauli::X) o << 0, 1, 1, 0;
                if (op == Pauli::Y) o << 0, -I1, I1, 0;
                if (op == Pauli::Z) o << 1, 0, 0, -1;
                s.apply1(q, o);
            }
            for (int i = 0; i < 16; ++i) m(i, j) = s.amplitudes()[i];
        }
        return m;
    };
    // x-bond between the second site of block 1 (wire 1) and the first site of block 2 (wire 2)
    const Eigen::MatrixXcd hx = W.adjoint() * pauli_matrix({{1, Pauli::X}, {2, Pauli::X}}) * W;
    const Eigen::MatrixXcd target = pauli_matrix({{0, Pauli::X}, {1, Pauli::X}});
    XConstraintResult r;
    r.ok = true;
    for (int j = 0; j < 16; ++j) {
        for (int i = 0; i < 16; ++i) {
            const double dev = std::abs(hx(i, j) - target(i, j));
            if (dev > r.max_deviation) r.max_deviation = dev;
            if (dev > 1e-10 && r.ok) {
                r.ok = false;
                std::ostringstream s;
                s << "<" << i << "|H_x|" << j << "> = " << hx(i, j) << ", expected " << target(i, j) << " (basis f1 f2 g1 g2, little-endian)";
                r.diagnostic = s.str();
            }
        }
    }
    return r;
}

XConstraintResult verify_x_constraint(const BondBraidCircuit &c) { return verify_x_constraint(c.unitary()); }

} // namespace kq::braid

#pragma once
#include <array>
#include <string>
#include <vector>

#include "kq/sv_core.hpp"

namespace kq::braid {

/// (1/sqrt2) diag(1 -/+ i, 1 +/- i); sign=+1 equals e^{-i pi/4} diag(1, i).
Mat2 intra_braid_matrix(int sign);

/// Inter-fermion braiding in the basis index n1 + 2 n2; sign=+1 equals exp(-i pi/4 Y(x)Y).
Mat4 inter_braid_matrix(int sign);

/// Two-CNOT realization of inter_braid_matrix(sign), exact including the global phase.
Circuit inter_braid_circuit(int sign);

/// Single-qubit realization of intra_braid_matrix(sign) on wire q (U1 plus explicit global phase).
Circuit intra_braid_circuit(int sign, int q = 0);

struct BraidStep {
    enum class Kind { Intra, Inter } kind = Kind::Intra;
    int sign = +1;
    int qubit = 0; ///< Intra only: 0 = bond-fermion wire, 1 = gauge wire
};

/// A two-qubit bond braiding block acting on (bond fermion f, gauge fermion g),
/// basis index n_f + 2 n_g.
struct BondBraidCircuit {
    std::vector<BraidStep> steps;
    int n_g = 1;
    Circuit circuit{2};

    [[nodiscard]] Mat4 unitary() const;
    /// One inter braiding, with one intra braiding before and one after, all intra on the bond-fermion wire.
    [[nodiscard]] bool chain_structure() const;
};

BondBraidCircuit make_bond_braiding(const std::vector<BraidStep> &steps, int n_g);

/// Chain variant: intra(-) on f, inter(+), intra(-) on f. Coefficient alpha_{01}^{01} = +i/sqrt2.
BondBraidCircuit z_bond_braiding(int n_g);

/// Honeycomb variant: intra(+) on g, inter(+), intra(+) on g.
BondBraidCircuit honeycomb_bond_braiding(int n_g);

struct ZConstraintResult {
    bool ok = false;
    int D = 0; ///< gauge flux implied for the block's n_g
    std::string diagnostic;
};

/// Transforms the z-bond term Z(x)Z into the bond-fermion basis and checks it equals
/// J_z D (2 n_f - 1) for fixed n_g, and that each input maps onto an equal-weight
/// superposition of two site states.
ZConstraintResult verify_z_constraint(const BondBraidCircuit &c);
ZConstraintResult verify_z_constraint(const Mat4 &u, int n_g);

struct XConstraintResult {
    bool ok = false;
    double max_deviation = 0;
    std::string diagnostic;
};

/// Two adjacent bond blocks (wires f1 f2 g1 g2, interleaved by one FSWAP): the x-bond term
/// between the blocks' neighbouring sites must act as X(x)X on the bond-fermion pair in
/// every gauge sector, without leaking between sectors.
XConstraintResult verify_x_constraint(const Mat4 &u);
XConstraintResult verify_x_constraint(const BondBraidCircuit &c);

} // namespace kq::braid

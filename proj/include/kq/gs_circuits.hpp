#pragma once
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "kq/kitaev_models.hpp"
#include "kq/sv_core.hpp"

namespace kq::gs {

/// Wire assignment of a preparation circuit.
struct WireMap {
    int n_wires = 0;
    std::vector<int> bond;     ///< bond-fermion wires before braiding (physical) or momentum-copy wires
    std::vector<int> gauge;    ///< gauge wires (physical circuits only)
    std::vector<int> position; ///< wire of position-space bond fermion n (enforced/simplified circuits)
};

struct PrepPlan {
    model::ModelParams params;
    double dk = 0.0;       ///< momentum shift of the half-integer grid; dk = pi/N is the special shift
    bool enforce_ph = false;
    bool simplified = false;
    WireMap wires;

    void validate() const;
};

/// Fills the wire map for the requested construction.
PrepPlan make_plan(const model::ModelParams &p, double dk = 0.0, bool enforce_ph = false, bool simplified = false);

/// Offset of the integer grid {o + 2 pi j / N} that coincides with the half-integer grid shifted by dk.
double integer_grid_offset(int n_cells, double dk);

/// Fock-space form (index b0 + 2 b1) of a 2x2 single-particle mode transformation.
Mat4 fock_gate_matrix(const Mat2 &v);

/// Two-mode F gate: single-particle Hadamard [[1, 1], [1, -1]]/sqrt2.
Mat4 f_gate_matrix();

/// Fermionic Fourier network on N wires (N a power of two): momentum wire j holds k_j = 2 pi j/N + offset
/// and position wire n ends with c_n = N^{-1/2} sum_j e^{i k_j n} c_j. Two-qubit count <= kFourierGateConstant N log2 N.
Circuit fourier_network(int N, double offset);
constexpr double kFourierGateConstant = 3.0;

/// Bogoliubov block on (q0, q1) = (mode -k, mode k): |00> -> cos(theta/2)|00> + e^{i phi} sin(theta/2)|11>,
/// odd block untouched. With phi = pi/2 the state is the vacuum of b_k = cos(theta/2) e^{-i phi/2} f_k +
/// sin(theta/2) e^{i phi/2} f_{-k}^dag.
Mat4 bogoliubov_matrix(double theta, double phi = 1.5707963267948966);
Circuit bogoliubov_block(double theta, double phi = 1.5707963267948966);

/// Appends FSWAPs (bubble sort on wires base..base+size-1) reordering labels `layout` into `desired`;
/// `layout` is updated in place.
void permute_wires(Circuit &c, std::vector<int> &layout, const std::vector<int> &desired, int base = 0);

/// BCS ground state of the bond-fermion ring on M wires for the half-integer grid (shift dk), position order.
Circuit bond_fermion_state(const model::ModeChain &mc, int M, double dk = 0.0);

/// Full spin-cluster ground-state circuit (gauge initialization, bond fermions, braiding); wire i = site i.
Circuit prepare_ground_state(const PrepPlan &plan);

/// Two momentum copies on 2N wires: copy+ holds k = o + 2 pi j/N on wire j, copy- holds k = -o + 2 pi j/N on
/// wire N + j, and copy+ k is Bogoliubov-paired with copy- -k using the angle arg f_minus(-k). Without the beam
/// splitter position x of copy+/copy- ends on wire x / N + x; with it, the symmetric combination of position n
/// ends on wire 2n.
Circuit paired_copies_circuit(const std::function<cplx(double)> &f_minus, int N, double o, bool beam_splitter);

/// Doubled-register construction: copies for K and -K on the integer grid with offset o, paired Bogoliubov
/// blocks, Fourier networks with +-o and a final beam splitter; position fermion n sits on wire 2n.
Circuit symmetry_enforced_circuit(const PrepPlan &plan);

/// Single-copy reduction at the special shift; requires a vanishing gap at a high-symmetry momentum and
/// trivial Bogoliubov angles at all high-symmetry momenta of the grid.
Circuit simplified_special_shift_circuit(const PrepPlan &plan);

/// Dispatches on plan flags (simplified > enforce_ph > physical cluster).
Circuit build_circuit(const PrepPlan &plan);

nlohmann::json circuit_to_json(const Circuit &c);
Circuit circuit_from_json(const nlohmann::json &j);

} // namespace kq::gs

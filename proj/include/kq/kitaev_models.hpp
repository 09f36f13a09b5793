#pragma once
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "kq/error.hpp"

namespace kq::model {

using cplx = std::complex<double>;

enum class Lattice { Chain1D, Honeycomb };
enum class Boundary { Open, Periodic };

struct ModelParams {
    Lattice lattice = Lattice::Chain1D;
    double Jx = 0, Jy = 0, Jz = 1;
    int N = 4;          ///< chain: number of sites (even)
    int Lx = 2, Ly = 2; ///< honeycomb: unit cells per direction
    int D = +1;         ///< gauge flux
    Boundary boundary = Boundary::Periodic;

    static ModelParams chain(int n_sites, double Jx, double Jz);
    static ModelParams honeycomb(int Lx, int Ly, double Jx, double Jy, double Jz);

    [[nodiscard]] int n_sites() const;
    [[nodiscard]] int n_cells() const; ///< bond fermions (z-bonds)
    void validate() const;
};

std::string lattice_name(Lattice l);

/// Spin-lattice bond; 'x', 'y' or 'z' coupling.
struct Bond {
    int i = 0, j = 0;
    char type = 'z';
};

/// Bonds of the exact-diagonalization clusters: the chain, and for the honeycomb the
/// 8-site cluster (Lx*Ly = 4 cells) closed as a tilted torus: sites 0..7 on a loop with
/// x bonds (2r, 2r+1), y bonds (2r+1, 2r+2) and z bonds (2r, 2r+5) mod 8.
std::vector<Bond> bonds(const ModelParams &p);

/// Spin Hamiltonian sum_bonds J_a s^a_i s^a_j with Pauli operators (each bond term has eigenvalues +-J).
Eigen::SparseMatrix<cplx> spin_hamiltonian(const ModelParams &p);

/// Expectation of the spin Hamiltonian in a state over the cluster's qubits.
double spin_energy(const ModelParams &p, const std::vector<cplx> &psi);

/// Site order along the Jordan-Wigner string (x/y bonds join consecutive sites).
std::vector<int> jordan_wigner_order(const ModelParams &p);

struct BlochData {
    double kx = 0, ky = 0;
    cplx f{0, 0};     ///< off-diagonal BCS element: E e^{i theta}
    double E = 0;     ///< >= 0
    double theta = 0; ///< Bogoliubov angle, 0 at a closed gap
    double phi = 0;   ///< Bogoliubov phase (pi/2)
    bool gap_closed = false;
};

constexpr double kGapTol = 1e-12;

/// Chain: f = Jz D + Jx e^{ik}. Honeycomb: f = Jz D + Jx e^{i kx} + Jy e^{i ky}.
BlochData bloch(const ModelParams &p, double k);
BlochData bloch(const ModelParams &p, double kx, double ky);
BlochData bloch_from_f(cplx f, double kx = 0, double ky = 0);

/// Bond-fermion dispersion along the circuit's mode index: f(k) = onsite + sum_o J_o e^{i o k}.
/// Chain: {Jz D; (Jx, +1)}. Honeycomb 8-site cluster: {Jz D; (Jx, -2), (Jy, +1)}, i.e. the
/// 2D form at (kx, ky) = (-2k, k).
struct ModeChain {
    double onsite = 0;
    std::vector<std::pair<double, int>> hops;
    [[nodiscard]] cplx f(double k) const;
    [[nodiscard]] BlochData at(double k) const;
};
ModeChain mode_chain(const ModelParams &p);

/// Half-integer base grid K = {-N/2+1/2, ..., N/2-1/2} 2pi/N, shifted by dk (any N >= 1).
std::vector<double> base_grid(int N, double dk);

/// Particle-hole paired grid (K + dk) followed by -(K + dk); N must be a power of two.
std::vector<double> momentum_grid(int N, double dk);

/// True when the shifted grid coincides with its particle-hole partner set (mod 2pi).
bool grid_self_conjugate(int N, double dk);

/// Wrap into (-pi, pi].
double wrap_angle(double k);

/// Honeycomb gap closure: min over the Brillouin zone of |f| vanishes iff the three couplings
/// satisfy the triangle inequalities.
bool honeycomb_gapless(double Jx, double Jy, double Jz);

/// Minimum of |f| over an n x n Brillouin-zone grid (cross-check of honeycomb_gapless).
double honeycomb_min_gap_grid(double Jx, double Jy, double Jz, int n);

} // namespace kq::model

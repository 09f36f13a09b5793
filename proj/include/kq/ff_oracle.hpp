#pragma once
#include <functional>
#include <string>
#include <vector>

#include "kq/kitaev_models.hpp"
#include "kq/observables.hpp"

namespace kq::oracle {

using Dispersion = std::function<cplx(double)>;

/// Translation-invariant bilinears of the BCS vacuum as functions of d = m - n, d in [-max_sep, max_sep]:
/// <f_m^dag f_n^dag> = -(i/N_k) sum_k e^{ikd} sin(theta_k)/2, <f_m f_n> = +(i/N_k) sum_k e^{ikd} sin(theta_k)/2,
/// <f_m f_n^dag> = (1/N_k) sum_k e^{ikd} (1 + cos theta_k)/2, <f_m^dag f_n> = (1/N_k) sum_k e^{ikd} (1 - cos theta_k)/2.
struct Bilinears {
    int max_sep = 0;
    std::vector<cplx> fdfd, ff, ffd, fdf;
    [[nodiscard]] obs::FermionBilinears at(int d) const;
};

Bilinears exact_correlators(const Dispersion &f, const std::vector<double> &grid, int max_sep);
Bilinears exact_correlators(const model::ModelParams &p, const std::vector<double> &grid, int max_sep);

/// Correlation matrix of n_sub consecutive bond fermions.
obs::CorrelationMatrix exact_correlation_matrix(const Dispersion &f, const std::vector<double> &grid, int n_sub);
obs::CorrelationMatrix exact_correlation_matrix(const model::ModelParams &p, const std::vector<double> &grid, int n_sub);

obs::EntanglementResult exact_entanglement(const Dispersion &f, const std::vector<double> &grid, int n_sub);
obs::EntanglementResult exact_entanglement(const model::ModelParams &p, const std::vector<double> &grid, int n_sub);

/// Particle-hole doubled grid (K + dk) followed by -(K + dk) for any N >= 1.
std::vector<double> doubled_grid(int N, double dk);

/// Integer grid {o + 2 pi j / N} and its doubled form.
std::vector<double> integer_grid(int N, double o);

/// Real-space ring BdG brute force for the bond-fermion ring H = sum_i J_z D (2 n_i - 1) +
/// sum_{(J, o)} sum_i J (f_i^dag - f_i)(f_{i+o}^dag + f_{i+o}), boundary sign +1 (periodic) or -1 (antiperiodic).
/// Returns the 2N x 2N matrix G = <Psi Psi^dag>, Psi = (f_0..f_{N-1}, f_0^dag..f_{N-1}^dag).
Eigen::MatrixXcd bdg_vacuum_correlations(const model::ModeChain &mc, int N, int boundary_sign);
obs::CorrelationMatrix bdg_correlation_matrix(const model::ModeChain &mc, int N, int boundary_sign, int n_sub);
/// Sum of negative quasiparticle energies: ground energy of the ring.
double bdg_ground_energy(const model::ModeChain &mc, int N, int boundary_sign);

/// Bogoliubov operator expectations in the vacuum on a self-conjugate grid; returns the largest violation of
/// <b_k b_k'^dag> = delta, <b_k^dag b_k'> = <b_k^dag b_k'^dag> = <b_k b_k'> = 0.
double bogoliubov_vacuum_violation(const model::ModeChain &mc, int N, int boundary_sign);

/// -sum_k E_k over the half-integer grid of the bond-fermion ring.
double free_fermion_ground_energy(const model::ModelParams &p);

struct EdResult {
    double energy = 0;
    std::vector<cplx> vector;
    int degeneracy = 1;
};

/// Lowest eigenpair of spin_hamiltonian (dense solver up to dimension 1024, Lanczos above).
/// Degenerate ground spaces return the normalized projection of the first basis state with nonzero overlap.
EdResult exact_diagonalization(const model::ModelParams &p);

struct ScanRow {
    std::string lattice;
    int N = 0, Lx = 0, Ly = 0;
    double Jx = 0, Jy = 0, Jz = 1, dk = 0;
    double S = 0;
};

/// Chain: equal-partition entropy of an N-bond-fermion ring on the half-integer grid.
double chain_entropy(double Jx, double Jz, int N);
/// Honeycomb Lx x Ly torus cut into two cylinders (nx < Lx/2), summed over ky blocks.
double honeycomb_strip_entropy(double Jx, double Jy, double Jz, int Lx, int Ly);

struct ScanResult {
    std::vector<ScanRow> rows;
    struct Estimate {
        int size = 0;
        bool found = false;
        double boundary = 0;
        double jump = 0;
        double ratio = 0; ///< max |dS| / median |dS|
    };
    std::vector<Estimate> estimates;
};

/// Entropy versus Jx at each chain size (ascending sizes), with transition detection per size.
ScanResult finite_size_scan_chain(const std::vector<double> &jx, double Jz, const std::vector<int> &sizes, double flag_factor = 3.0);
/// Entropy along a honeycomb coupling path at square sizes L x L. `path(t)` returns (Jx, Jy).
ScanResult finite_size_scan_honeycomb(const std::vector<double> &t, const std::function<std::pair<double, double>(double)> &path, double Jz,
                                      const std::vector<int> &sizes, double flag_factor = 3.0);

std::string scan_to_csv(const std::vector<ScanRow> &rows);

} // namespace kq::oracle

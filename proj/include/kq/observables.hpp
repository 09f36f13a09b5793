#pragma once
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "kq/sv_core.hpp"

namespace kq::obs {

/// Majorana correlation matrix C_{a,b} = <gamma_a gamma_b>/2, Majoranas (2m, 2m+1) = (f + f^dag, i(f^dag - f)) of mode m.
using CorrelationMatrix = Eigen::MatrixXcd;

struct EntanglementResult {
    std::vector<double> spectrum; ///< ascending
    double entropy = 0.0;         ///< natural log
};

/// Source of Pauli-string expectation values: exact inner products or shot estimates.
/// Estimates are cached per string so repeated queries are consistent.
class PauliEstimator {
  public:
    virtual ~PauliEstimator() = default;
    double expect(const PauliString &p);
    [[nodiscard]] virtual int n_qubits() const = 0;
    /// Shots per string (0 for exact).
    [[nodiscard]] virtual int shots() const { return 0; }
    [[nodiscard]] std::size_t strings_measured() const { return cache_.size(); }

  protected:
    virtual double compute(const PauliString &p) = 0;

  private:
    std::map<PauliString, double> cache_;
};

std::unique_ptr<PauliEstimator> exact_estimator(const StateVector &psi);
std::unique_ptr<PauliEstimator> exact_estimator(const DensityMatrix &rho);
/// Each string gets an independent counter-RNG stream derived from (seed, string).
std::unique_ptr<PauliEstimator> sampling_estimator(const StateVector &psi, int shots, const NoiseModel &noise, std::uint64_t seed);
std::unique_ptr<PauliEstimator> sampling_estimator(const DensityMatrix &rho, int shots, const NoiseModel &noise, std::uint64_t seed);

enum class Axis { X, Y };

/// <sigma^a_m (prod_{m<j<n} Z_j) sigma^b_n> with sites taken along jw_order (m < n in that order).
double string_correlator(PauliEstimator &est, int m, int n, Axis a, Axis b, const std::vector<int> &jw_order);

struct FermionBilinears {
    cplx fdfd; ///< <f_m^dag f_n^dag>
    cplx ff;   ///< <f_m f_n>
    cplx fdf;  ///< <f_m^dag f_n>
    cplx ffd;  ///< <f_m f_n^dag>
};

/// Four bilinears of Jordan-Wigner fermions m, n (positions along jw_order); |1> is the occupied state.
FermionBilinears fermion_correlators(PauliEstimator &est, int m, int n, const std::vector<int> &jw_order);

/// Majorana correlation matrix of the fermions at JW positions `subsystem`, Hermitian-symmetrized.
CorrelationMatrix correlation_matrix(PauliEstimator &est, const std::vector<int> &subsystem, const std::vector<int> &jw_order);

/// Assembles C from bilinears: bil(m, n) for subsystem indices m, n.
CorrelationMatrix correlation_from_bilinears(int n_modes, const std::function<FermionBilinears(int, int)> &bil);

/// Default eigenvalue tolerance band for exact data.
constexpr double kSpectrumEps = 1e-6;
/// Band for shot-estimated matrices.
double spectrum_eps_for_shots(int shots);

/// Spectrum of C and S = -1/2 sum[(1-l) ln(1-l) + l ln l]; eigenvalues outside [-eps, 1+eps] raise an invariant error.
EntanglementResult entanglement(const CorrelationMatrix &c, double eps = kSpectrumEps);

/// Binary entropy form used per eigenvalue (0 ln 0 = 0).
double entropy_from_spectrum(const std::vector<double> &lambda);

/// Full Pauli tomography of up to four qubits followed by projection onto trace-one PSD matrices.
Eigen::MatrixXcd tomography_linear(PauliEstimator &est, const std::vector<int> &qubits);
Eigen::MatrixXcd project_to_density_matrix(const Eigen::MatrixXcd &rho);
/// Exact estimators: projected linear inversion. Sampled estimators: multinomial maximum likelihood over the
/// +-1 outcome frequencies of every Pauli string (R rho R iteration from the maximally mixed state).
Eigen::MatrixXcd tomography_mle(PauliEstimator &est, const std::vector<int> &qubits);
constexpr int kMleMaxIterations = 20000;
constexpr double kMleTolerance = 1e-12;

/// Exact reduced density matrix of a pure state on `qubits` (qubits[0] is the least significant bit).
Eigen::MatrixXcd reduced_density_matrix(const StateVector &psi, const std::vector<int> &qubits);

/// Von Neumann entropy; rejects inputs that are not PSD with unit trace (tolerance 1e-8).
double entropy_from_density_matrix(const Eigen::MatrixXcd &rho);

/// CSV export, row-major, each complex entry written as "re,im".
std::string matrix_to_csv(const Eigen::MatrixXcd &m);
std::string spectrum_to_csv(const std::vector<double> &lambda);

} // namespace kq::obs

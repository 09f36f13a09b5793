#pragma once
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kq/error.hpp"

namespace kq {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

enum class GateKind { U3, U1, U2, CNOT, FSWAP, PHASE, CUSTOM1, CUSTOM2 };

/// One gate on explicit wires. Two-qubit matrices use the index b0 + 2*b1,
/// where b0 is the bit of targets[0].
struct Gate {
    GateKind kind = GateKind::U3;
    std::vector<int> targets;
    double p0 = 0, p1 = 0, p2 = 0; ///< angles (U3: theta, phi, lambda; U1: lambda; U2: phi, lambda; PHASE: alpha)
    Mat4 m = Mat4::Identity();     ///< CUSTOM1 uses the top-left 2x2 block
    std::string label;             ///< optional tag for export (e.g. "F", "BOG", "BRAID")

    static Gate u3(int q, double theta, double phi, double lambda);
    static Gate u1(int q, double lambda);
    static Gate u2(int q, double phi, double lambda);
    static Gate cnot(int ctrl, int tgt);
    static Gate fswap(int q0, int q1);
    static Gate phase(double alpha);
    static Gate custom1(int q, const Mat2 &u, std::string label = {});
    static Gate custom2(int q0, int q1, const Mat4 &u, std::string label = {});

    [[nodiscard]] int arity() const;
    [[nodiscard]] std::string name() const;
};

Mat2 u3_matrix(double theta, double phi, double lambda);
Mat2 gate_matrix1(const Gate &g);
Mat4 gate_matrix2(const Gate &g);
Mat4 fswap_matrix();
Mat4 cnot_matrix();

/// max |U^dag U - I|
double unitarity_error(const Eigen::MatrixXcd &u);

struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> gates;

    Circuit() = default;
    explicit Circuit(int n) : n_qubits(n) {}
    void add(Gate g);
    void append(const Circuit &other, const std::vector<int> &wire_map);
    void append(const Circuit &other);
    [[nodiscard]] Circuit inverse() const;
    [[nodiscard]] std::size_t count(GateKind k) const;
    [[nodiscard]] std::size_t two_qubit_count() const;
    void validate() const;
};

/// Dense unitary of a circuit (n_qubits <= 12).
Eigen::MatrixXcd circuit_unitary(const Circuit &c);

enum class Pauli { I, X, Y, Z };
using PauliString = std::map<int, Pauli>;

PauliString parse_pauli(const std::string &s); ///< "X0 Z3 Y5" or "XZI" (char i -> qubit i)

struct NoiseModel {
    double depol2 = 0.0;
    double readout_flip = 0.0;
    void validate() const;
    [[nodiscard]] bool noiseless() const { return depol2 == 0.0 && readout_flip == 0.0; }
};

class StateVector {
  public:
    explicit StateVector(int n_qubits);
    static StateVector basis(int n_qubits, std::uint64_t index);
    static StateVector from_amplitudes(std::vector<cplx> amps);

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] const std::vector<cplx> &amplitudes() const { return amp_; }
    std::vector<cplx> &amplitudes() { return amp_; }
    [[nodiscard]] double norm() const;

    void apply(const Gate &g);
    void apply1(int q, const Mat2 &u);
    void apply2(int q0, int q1, const Mat4 &u);
    void run(const Circuit &c);

    [[nodiscard]] double expect_pauli(const PauliString &p) const;
    [[nodiscard]] cplx expect_pauli_complex(const PauliString &p) const;
    [[nodiscard]] std::vector<double> probabilities() const;

  private:
    int n_;
    std::vector<cplx> amp_;
};

/// Density matrix stored as a 2n-qubit vector: rho(i, j) at index i | (j << n).
class DensityMatrix {
  public:
    explicit DensityMatrix(int n_qubits);
    explicit DensityMatrix(const StateVector &psi);

    [[nodiscard]] int n_qubits() const { return n_; }
    [[nodiscard]] cplx at(std::uint64_t i, std::uint64_t j) const { return v_[i | (j << n_)]; }
    [[nodiscard]] Eigen::MatrixXcd matrix() const;
    [[nodiscard]] double trace() const;

    void apply(const Gate &g);
    void apply1(int q, const Mat2 &u);
    void apply2(int q0, int q1, const Mat4 &u);
    /// rho -> (1-p) rho + p Tr_ab(rho) (x) I/4 on wires (a, b)
    void depolarize2(int a, int b, double p);
    /// Runs a circuit, inserting depolarizing noise after every two-qubit gate.
    void run(const Circuit &c, const NoiseModel &noise = {});

    [[nodiscard]] double expect_pauli(const PauliString &p) const;
    [[nodiscard]] std::vector<double> probabilities() const;

  private:
    int n_;
    std::vector<cplx> v_;
};

/// Density-matrix mode limit.
constexpr int kMaxDensityQubits = 12;

/// Basis-rotated sampling estimate of a Pauli expectation value.
double sample_pauli(const StateVector &psi, const PauliString &p, int shots, const NoiseModel &noise, std::uint64_t seed);
double sample_pauli(const DensityMatrix &rho, const PauliString &p, int shots, const NoiseModel &noise, std::uint64_t seed);

/// Apply the two-qubit depolarizing channel to an explicit density matrix.
Eigen::MatrixXcd apply_noise_channel(const Eigen::MatrixXcd &rho, int a, int b, double p);

} // namespace kq

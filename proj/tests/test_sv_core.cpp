#include "doctest.h"

#include <cmath>
#include <numbers>

#include "kq/rng.hpp"
#include "kq/sv_core.hpp"

using namespace kq;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx I1{0, 1};

bool close(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b, double tol = 1e-12) { return (a - b).cwiseAbs().maxCoeff() <= tol; }
} // namespace

TEST_SUITE("sv_core") {

TEST_CASE("fswap flips the sign of |11>") {
    StateVector s = StateVector::basis(2, 3);
    s.apply(Gate::fswap(0, 1));
    CHECK(std::abs(s.amplitudes()[3] + 1.0) < 1e-15);
    StateVector t = StateVector::basis(2, 1);
    t.apply(Gate::fswap(0, 1));
    CHECK(std::abs(t.amplitudes()[2] - 1.0) < 1e-15);
}

TEST_CASE("cnot maps control-set basis states") {
    // control = qubit 0 (LSB); |q1 q0> = |01> -> |11>
    StateVector s = StateVector::basis(2, 1);
    s.apply(Gate::cnot(0, 1));
    CHECK(std::abs(s.amplitudes()[3] - 1.0) < 1e-15);
    StateVector t = StateVector::basis(2, 2);
    t.apply(Gate::cnot(0, 1));
    CHECK(std::abs(t.amplitudes()[2] - 1.0) < 1e-15);
}

TEST_CASE("u3 family relations") {
    CHECK(close(u3_matrix(0, 0, 0.7), gate_matrix1(Gate::u1(0, 0.7))));
    CHECK(close(u3_matrix(kPi / 2, 0.3, 0.9), gate_matrix1(Gate::u2(0, 0.3, 0.9))));
    Mat2 x;
    x << 0, 1, 1, 0;
    CHECK(close(u3_matrix(kPi, 0, kPi), x));
    CHECK(unitarity_error(u3_matrix(0.4, 1.1, -2.3)) < 1e-14);
}

TEST_CASE("two-qubit gates act on arbitrary wire pairs") {
    // cnot with control on the higher wire, through three qubits
    StateVector s = StateVector::basis(3, 4); // q2 = 1
    s.apply(Gate::cnot(2, 0));
    CHECK(std::abs(s.amplitudes()[5] - 1.0) < 1e-15);
}

TEST_CASE("circuit inverse undoes the circuit") {
    Circuit c(3);
    c.add(Gate::u3(0, 0.3, 0.2, 0.1));
    c.add(Gate::cnot(0, 2));
    c.add(Gate::fswap(1, 2));
    c.add(Gate::u2(1, 0.5, -0.4));
    c.add(Gate::phase(0.77));
    Circuit both = c;
    both.append(c.inverse());
    CHECK(close(circuit_unitary(both), Eigen::MatrixXcd::Identity(8, 8)));
    CHECK(c.two_qubit_count() == 2);
    CHECK(c.count(GateKind::FSWAP) == 1);
}

TEST_CASE("append with a wire map relabels targets") {
    Circuit small(2);
    small.add(Gate::cnot(0, 1));
    Circuit big(4);
    big.append(small, {3, 1});
    REQUIRE(big.gates.size() == 1);
    CHECK(big.gates[0].targets == std::vector<int>{3, 1});
}

TEST_CASE("invalid circuits are rejected") {
    Circuit c(2);
    c.add(Gate::cnot(0, 0));
    CHECK_THROWS_AS(c.validate(), Error);
    Circuit d(2);
    d.add(Gate::u1(5, 0.1));
    CHECK_THROWS_AS(d.validate(), Error);
    StateVector s(2);
    CHECK_THROWS_AS(s.run(d), Error);
}

TEST_CASE("pauli expectations") {
    StateVector s(1);
    s.apply(Gate::u2(0, 0, kPi)); // H|0> = |+>
    CHECK(std::abs(s.expect_pauli(parse_pauli("X0")) - 1.0) < 1e-14);
    CHECK(std::abs(s.expect_pauli(parse_pauli("Z0"))) < 1e-14);
    s.apply(Gate::u1(0, kPi / 2)); // |+i>
    CHECK(std::abs(s.expect_pauli(parse_pauli("Y")) - 1.0) < 1e-14);
    // Bell state: <XX> = <ZZ> = 1, <YY> = -1
    StateVector b(2);
    b.apply(Gate::u2(0, 0, kPi));
    b.apply(Gate::cnot(0, 1));
    CHECK(std::abs(b.expect_pauli(parse_pauli("XX")) - 1.0) < 1e-14);
    CHECK(std::abs(b.expect_pauli(parse_pauli("ZZ")) - 1.0) < 1e-14);
    CHECK(std::abs(b.expect_pauli(parse_pauli("Y0 Y1")) + 1.0) < 1e-14);
    CHECK(std::abs(b.expect_pauli_complex(parse_pauli("X0 Y1")) ) < 1e-14);
}

TEST_CASE("density matrix tracks the statevector without noise") {
    Circuit c(3);
    c.add(Gate::u3(0, 0.8, 0.1, 0.4));
    c.add(Gate::cnot(0, 1));
    c.add(Gate::u3(2, 1.3, -0.6, 0.2));
    c.add(Gate::fswap(1, 2));
    StateVector s(3);
    s.run(c);
    DensityMatrix r(3);
    r.run(c);
    CHECK(std::abs(r.trace() - 1.0) < 1e-13);
    for (const char *p : {"XIZ", "YYI", "ZZZ", "IXY"}) CHECK(std::abs(r.expect_pauli(parse_pauli(p)) - s.expect_pauli(parse_pauli(p))) < 1e-13);
}

TEST_CASE("depolarizing channel matches its explicit form") {
    Circuit c(3);
    c.add(Gate::u3(0, 0.8, 0.1, 0.4));
    c.add(Gate::cnot(0, 1));
    c.add(Gate::u3(2, 1.3, -0.6, 0.2));
    c.add(Gate::cnot(2, 1));
    DensityMatrix r(3);
    r.run(c);
    const Eigen::MatrixXcd before = r.matrix();
    r.depolarize2(0, 2, 0.3);
    CHECK(close(r.matrix(), apply_noise_channel(before, 0, 2, 0.3), 1e-13));
    CHECK(std::abs(r.trace() - 1.0) < 1e-13);
    // full depolarization of a Bell pair gives the maximally mixed state
    DensityMatrix b(2);
    b.apply(Gate::u2(0, 0, kPi));
    b.apply(Gate::cnot(0, 1));
    b.depolarize2(0, 1, 1.0);
    CHECK(close(b.matrix(), Eigen::MatrixXcd::Identity(4, 4) / 4.0, 1e-14));
}

TEST_CASE("noisy run shrinks two-body correlations") {
    Circuit c(2);
    c.add(Gate::u2(0, 0, kPi));
    c.add(Gate::cnot(0, 1));
    DensityMatrix r(2);
    r.run(c, NoiseModel{0.1, 0.0});
    CHECK(std::abs(r.expect_pauli(parse_pauli("ZZ")) - 0.9) < 1e-13);
}

TEST_CASE("sampling converges and is reproducible") {
    StateVector s(2);
    s.apply(Gate::u3(0, 1.0, 0, 0));
    s.apply(Gate::cnot(0, 1));
    const PauliString zz = parse_pauli("ZZ"), x0 = parse_pauli("X0");
    const double a = sample_pauli(s, x0, 20000, {}, 42);
    CHECK(a == sample_pauli(s, x0, 20000, {}, 42));
    CHECK(std::abs(a - s.expect_pauli(x0)) < 5.0 / std::sqrt(20000.0));
    CHECK(std::abs(sample_pauli(s, zz, 1000, {}, 1) - 1.0) < 1e-15);
    // readout flips on both measured qubits: <ZZ> -> (1-2e)^2
    const double e = 0.05;
    const double zn = sample_pauli(s, zz, 40000, NoiseModel{0.0, e}, 3);
    CHECK(std::abs(zn - (1 - 2 * e) * (1 - 2 * e)) < 5.0 / std::sqrt(40000.0));
    DensityMatrix r(s);
    CHECK(std::abs(sample_pauli(r, x0, 20000, {}, 9) - s.expect_pauli(x0)) < 5.0 / std::sqrt(20000.0));
}

TEST_CASE("counter rng is deterministic and uniform") {
    CounterRng a(7, 0), b(7, 0), c(7, 1);
    const auto va = a.next();
    CHECK(va == b.next());
    CHECK(va != c.next());
    CounterRng u(11, 0);
    double sum = 0;
    for (int i = 0; i < 100000; ++i) {
        const double x = u.uniform();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
        sum += x;
    }
    CHECK(std::abs(sum / 100000 - 0.5) < 0.01);
}

TEST_CASE("noise model validation") {
    CHECK_THROWS_AS(NoiseModel({-0.1, 0.0}).validate(), Error);
    CHECK_THROWS_AS(NoiseModel({0.0, 1.5}).validate(), Error);
    CHECK_NOTHROW(NoiseModel({0.01, 0.02}).validate());
}

}

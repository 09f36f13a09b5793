#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kq/gs_circuits.hpp"

using namespace kq;
using namespace kq::gs;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr cplx I1{0, 1};

double ed_ground(const model::ModelParams &p) {
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(model::spin_hamiltonian(p));
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

double circuit_energy(const model::ModelParams &p) {
    StateVector s(2 * p.n_cells());
    s.run(prepare_ground_state(make_plan(p)));
    return model::spin_energy(p, s.amplitudes());
}
} // namespace

TEST_SUITE("gs_circuits") {

TEST_CASE("fourier network realizes the single-particle transform") {
    for (int N : {1, 2, 4, 8}) {
        const double off = 0.37;
        const Circuit c = fourier_network(N, off);
        for (int j = 0; j < N; ++j) {
            StateVector s = StateVector::basis(N, 1ULL << j);
            s.run(c);
            for (int n = 0; n < N; ++n) {
                const cplx want = std::exp(I1 * ((2 * kPi * j / N + off) * n)) / std::sqrt(double(N));
                CHECK(std::abs(s.amplitudes()[1ULL << n] - want) < 1e-12);
            }
        }
    }
}

TEST_CASE("two-point fourier of a delta") {
    StateVector s = StateVector::basis(2, 1);
    s.run(fourier_network(2, 0.0));
    CHECK(std::abs(s.amplitudes()[1] - 1 / std::sqrt(2.0)) < 1e-14);
    CHECK(std::abs(s.amplitudes()[2] - 1 / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("fourier network inverse and gate budget") {
    for (int N : {2, 4, 8, 16}) {
        const Circuit c = fourier_network(N, 0.2);
        const double bound = kFourierGateConstant * N * std::log2(double(N));
        CHECK(double(c.two_qubit_count()) <= bound);
        if (N <= 8) {
            Circuit both = c;
            both.append(c.inverse());
            CHECK((circuit_unitary(both) - Eigen::MatrixXcd::Identity(1 << N, 1 << N)).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
    CHECK(fourier_network(1, 0.5).two_qubit_count() == 0);
    CHECK_THROWS_AS(fourier_network(6, 0.0), Error);
}

TEST_CASE("gates are parity preserving") {
    const Circuit c = symmetry_enforced_circuit(make_plan(model::ModelParams::chain(8, 0.7, 1.0), 0.3, true));
    for (const Gate &g : c.gates) {
        if (g.arity() != 2) continue;
        const Mat4 m = gate_matrix2(g);
        for (int r = 0; r < 4; ++r)
            for (int q = 0; q < 4; ++q)
                if ((__builtin_popcount(r) ^ __builtin_popcount(q)) & 1) CHECK(std::abs(m(r, q)) < 1e-15);
    }
}

TEST_CASE("bogoliubov block") {
    CHECK((bogoliubov_matrix(0.0) - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    const Mat4 b = bogoliubov_matrix(kPi);
    CHECK(std::abs(b(3, 0) - I1) < 1e-15);
    CHECK(std::abs(b(0, 0)) < 1e-15);
    CHECK(unitarity_error(b) < 1e-15);
    // the prepared pair is the vacuum of b_k (q0 = mode -k, q1 = mode k)
    for (double th : {0.3, 1.2, -2.0, 2.9}) {
        const double phi = kPi / 2;
        StateVector s(2);
        s.run(bogoliubov_block(th, phi));
        const auto &a = s.amplitudes();
        // b_k = cos(th/2) e^{-i phi/2} f_k + sin(th/2) e^{i phi/2} f_{-k}^dag with f_{-k} on wire 0, f_k on wire 1
        // f_k |11> = -|01> (string through wire 0), f_{-k}^dag |00> = |01>
        const cplx out = std::cos(th / 2) * std::exp(-I1 * phi / 2.0) * (-a[3]) + std::sin(th / 2) * std::exp(I1 * phi / 2.0) * a[0];
        CHECK(std::abs(out) < 1e-14);
    }
}

TEST_CASE("chain cluster energies match exact diagonalization") {
    for (int i = 0; i <= 8; ++i) {
        const double jx = 0.25 * i;
        const model::ModelParams p = model::ModelParams::chain(4, jx, 1.0);
        CHECK(std::abs(circuit_energy(p) - ed_ground(p)) <= 1e-9);
    }
    CHECK(std::abs(circuit_energy(model::ModelParams::chain(4, 0.0, 1.0)) + 2.0) < 1e-12);
    for (double jx : {0.5, 1.0, 1.7}) {
        const model::ModelParams p = model::ModelParams::chain(8, jx, 1.0);
        CHECK(std::abs(circuit_energy(p) - ed_ground(p)) <= 1e-9);
    }
}

TEST_CASE("honeycomb cluster energies match exact diagonalization") {
    for (int i = 1; i <= 7; ++i) {
        const double J = 0.2 * i;
        const model::ModelParams p = model::ModelParams::honeycomb(2, 2, J, J, 1.0);
        CHECK(std::abs(circuit_energy(p) - ed_ground(p)) <= 1e-9);
    }
    for (auto [jx, jy] : {std::pair{0.3, 0.9}, std::pair{1.2, 0.4}, std::pair{0.0, 0.0}}) {
        const model::ModelParams p = model::ModelParams::honeycomb(2, 2, jx, jy, 1.0);
        CHECK(std::abs(circuit_energy(p) - ed_ground(p)) <= 1e-9);
    }
}

TEST_CASE("plans reject invalid budgets") {
    CHECK_THROWS_AS(make_plan(model::ModelParams::chain(6, 0.5, 1.0)), Error);
    CHECK_THROWS_AS(make_plan(model::ModelParams::chain(4, 0.5, 1.0), 0.2), Error);
    CHECK_THROWS_AS(make_plan(model::ModelParams::chain(12, 0.5, 1.0), 0.0, true), Error);
    PrepPlan p = make_plan(model::ModelParams::chain(4, 0.5, 1.0));
    CHECK_THROWS_AS(symmetry_enforced_circuit(p), Error);
}

TEST_CASE("simplified circuit refuses gapped high-symmetry points") {
    const double dk = kPi / 4;
    CHECK_NOTHROW(simplified_special_shift_circuit(make_plan(model::ModelParams::chain(8, 1.0, 1.0), dk, true, true)));
    try {
        simplified_special_shift_circuit(make_plan(model::ModelParams::chain(8, 0.5, 1.0), dk, true, true));
        FAIL("expected refusal");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::Precondition);
    }
    CHECK_THROWS_AS(simplified_special_shift_circuit(make_plan(model::ModelParams::chain(8, 1.0, 1.0), 0.1, true, true)), Error);
    const PrepPlan full = make_plan(model::ModelParams::chain(8, 1.0, 1.0), dk, true);
    const PrepPlan red = make_plan(model::ModelParams::chain(8, 1.0, 1.0), dk, true, true);
    CHECK(red.wires.n_wires * 2 == full.wires.n_wires);
}

TEST_CASE("circuit JSON round trip") {
    const Circuit c = prepare_ground_state(make_plan(model::ModelParams::chain(4, 0.8, 1.0)));
    const Circuit back = circuit_from_json(nlohmann::json::parse(circuit_to_json(c).dump()));
    CHECK((circuit_unitary(c) - circuit_unitary(back)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(circuit_from_json(nlohmann::json::parse(R"({"n_qubits":1,"gates":[{"name":"NOPE","targets":[0]}]})")), Error);
}

}

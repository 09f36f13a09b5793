#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "kq/gaussian.hpp"
#include "kq/gs_circuits.hpp"
#include "kq/observables.hpp"

using namespace kq;
using namespace kq::obs;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<int> iota(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

StateVector chain_ground(double jx) {
    StateVector s(4);
    s.run(gs::prepare_ground_state(gs::make_plan(model::ModelParams::chain(4, jx, 1.0))));
    return s;
}
} // namespace

TEST_SUITE("observables") {

TEST_CASE("string correlators") {
    auto vac = exact_estimator(StateVector(4));
    CHECK(string_correlator(*vac, 0, 3, Axis::X, Axis::X, iota(4)) == doctest::Approx(0.0));
    StateVector bell(3);
    bell.apply(Gate::u2(1, 0, kPi));
    bell.apply(Gate::cnot(1, 2));
    auto b = exact_estimator(bell);
    CHECK(string_correlator(*b, 1, 2, Axis::X, Axis::X, iota(3)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(string_correlator(*b, 1, 1, Axis::X, Axis::X, iota(3)), Error);
    // adjacent sites: no Z factors, i.e. exactly X1 X2
    CHECK(b->strings_measured() == 1);
}

TEST_CASE("fermion bilinears on simple states") {
    auto vac = exact_estimator(StateVector(3));
    const FermionBilinears d = fermion_correlators(*vac, 1, 1, iota(3));
    CHECK(std::abs(d.ffd - 1.0) < 1e-15);
    CHECK(std::abs(d.fdf) < 1e-15);
    const StateVector g = chain_ground(0.8);
    auto est = exact_estimator(g);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            const FermionBilinears a = fermion_correlators(*est, m, n, iota(4));
            const FermionBilinears t = fermion_correlators(*est, n, m, iota(4));
            CHECK(std::abs(a.ffd + t.fdf - (m == n ? 1.0 : 0.0)) < 1e-12);
            if (m != n) CHECK(std::abs(a.fdfd + t.fdfd) < 1e-12);
        }
}

TEST_CASE("correlation matrix structure on prepared ground states") {
    const gs::PrepPlan plan = gs::make_plan(model::ModelParams::chain(8, 0.7, 1.0), 0.3, true);
    StateVector s(8);
    s.run(gs::build_circuit(plan));
    auto est = exact_estimator(s);
    const CorrelationMatrix c = correlation_matrix(*est, {0, 2}, iota(8));
    const Eigen::MatrixXcd M = (2.0 * c - Eigen::MatrixXcd::Identity(4, 4)) / cplx(0, 1);
    CHECK(M.imag().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((M.real() + M.real().transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int m = 0; m < 2; ++m)
        for (int n = 0; n < 2; ++n) {
            CHECK(std::abs(c(2 * m, 2 * n) - (m == n ? 0.5 : 0.0)) < 1e-12);
            CHECK(std::abs(c(2 * m + 1, 2 * n + 1) - (m == n ? 0.5 : 0.0)) < 1e-12);
        }
    const EntanglementResult e = entanglement(c);
    for (std::size_t i = 0; i < e.spectrum.size(); ++i) CHECK(std::abs(e.spectrum[i] + e.spectrum[e.spectrum.size() - 1 - i] - 1) < 1e-9);
}

TEST_CASE("entanglement formula") {
    CorrelationMatrix pure = Eigen::MatrixXcd::Zero(2, 2);
    pure(0, 0) = pure(1, 1) = 0.5;
    pure(0, 1) = cplx(0, 0.5);
    pure(1, 0) = cplx(0, -0.5);
    CHECK(entanglement(pure).entropy == doctest::Approx(0.0));
    const CorrelationMatrix mixed = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
    CHECK(entanglement(mixed).entropy == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(entanglement(2.0 * Eigen::MatrixXcd::Identity(2, 2)), Error);
    CHECK(spectrum_eps_for_shots(10000) == doctest::Approx(0.05));
}

TEST_CASE("density-matrix entropy") {
    CHECK(entropy_from_density_matrix(Eigen::MatrixXcd::Identity(4, 4) / 4.0) == doctest::Approx(2 * std::log(2.0)));
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(4, 4);
    r(0, 0) = r(1, 1) = 0.5;
    CHECK(entropy_from_density_matrix(r) == doctest::Approx(std::log(2.0)));
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 0) = 1.2;
    bad(1, 1) = -0.2;
    CHECK_THROWS_AS(entropy_from_density_matrix(bad), Error);
}

TEST_CASE("projection onto density matrices") {
    Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(4, 4);
    r(0, 0) = 0.61;
    r(1, 1) = 0.3;
    r(2, 2) = 0.1;
    r(3, 3) = -0.01;
    const Eigen::MatrixXcd p = project_to_density_matrix(r);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(p);
    CHECK(es.eigenvalues().minCoeff() >= -1e-15);
    CHECK(std::abs(p.trace() - 1.0) < 1e-14);
    CHECK(std::abs(p(3, 3)) < 1e-15);
    CHECK(std::abs(p(0, 0) - (0.61 - 0.01 / 3)) < 1e-14);
}

TEST_CASE("tomography with exact expectations reproduces the reduced state") {
    const StateVector g = chain_ground(1.0);
    auto est = exact_estimator(g);
    for (const std::vector<int> q : {std::vector<int>{0, 1}, std::vector<int>{1, 2}, std::vector<int>{3, 0, 2}}) {
        const Eigen::MatrixXcd exact = reduced_density_matrix(g, q);
        const Eigen::MatrixXcd lin = tomography_linear(*est, q);
        CHECK((lin - exact).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(std::abs(entropy_from_density_matrix(tomography_mle(*est, q)) - entropy_from_density_matrix(exact)) < 1e-10);
    }
    CHECK_THROWS_AS(tomography_linear(*est, {0, 1, 2, 3, 0}), Error);
}

TEST_CASE("sampled tomography is PSD with unit trace") {
    const StateVector g = chain_ground(1.0);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto est = sampling_estimator(g, 64, {}, seed);
        const Eigen::MatrixXcd r = tomography_mle(*est, {0, 1});
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(r);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12);
        CHECK(std::abs(r.trace() - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(sampling_estimator(g, 0, {}, 1), Error);
}

TEST_CASE("likelihood maximization beats projected inversion on a rank-deficient state") {
    // qubits {0,1} of the 4-site chain hold one bond fermion and its pure gauge partner: rank 2
    const StateVector g = chain_ground(1.0);
    const double exact = entropy_from_density_matrix(reduced_density_matrix(g, {0, 1}));
    double bias_mle = 0, bias_proj = 0;
    const int runs = 20;
    for (std::uint64_t seed = 1; seed <= runs; ++seed) {
        auto est = sampling_estimator(g, 8196, {}, seed);
        bias_mle += (entropy_from_density_matrix(tomography_mle(*est, {0, 1})) - exact) / runs;
        bias_proj += (entropy_from_density_matrix(project_to_density_matrix(tomography_linear(*est, {0, 1}))) - exact) / runs;
    }
    CHECK(std::abs(bias_mle) < 0.003);
    CHECK(bias_proj > 0.01);
}

TEST_CASE("sampled estimates shrink as one over root shots") {
    const StateVector g = chain_ground(0.7);
    PauliString p;
    p[1] = Pauli::Y;
    p[2] = Pauli::Y;
    const double exact = exact_estimator(g)->expect(p);
    auto sd = [&](int shots) {
        double v = 0;
        const int runs = 400;
        for (std::uint64_t seed = 1; seed <= runs; ++seed) {
            const double e = sampling_estimator(g, shots, {}, seed)->expect(p) - exact;
            v += e * e / runs;
        }
        return std::sqrt(v);
    };
    REQUIRE(std::abs(exact) < 0.99);
    const double a = sd(2048), b = sd(8192), c = sd(32768);
    CHECK(b / a >= 0.4);
    CHECK(b / a <= 0.6);
    CHECK(c / b >= 0.4);
    CHECK(c / b <= 0.6);
}

TEST_CASE("gaussian simulator agrees with the statevector") {
    const gs::PrepPlan plan = gs::make_plan(model::ModelParams::chain(8, 1.3, 1.0), 0.9, true);
    const Circuit c = gs::build_circuit(plan);
    StateVector s(8);
    s.run(c);
    GaussianState g(8);
    g.run(c);
    auto est = exact_estimator(s);
    const std::vector<int> w = {0, 2, 5};
    CHECK((correlation_matrix(*est, w, iota(8)) - g.correlation_matrix(w)).cwiseAbs().maxCoeff() < 1e-12);
    Circuit bad(2);
    bad.add(Gate::cnot(0, 1));
    GaussianState h(2);
    CHECK_THROWS_AS(h.run(bad), Error);
    Circuit far(3);
    far.add(Gate::fswap(0, 2));
    GaussianState f(3);
    CHECK_THROWS_AS(f.run(far), Error);
}

TEST_CASE("csv export") {
    Eigen::MatrixXcd m(1, 2);
    m(0, 0) = cplx(1, 2);
    m(0, 1) = cplx(-0.5, 0);
    CHECK(matrix_to_csv(m) == "1,2,-0.5,0\n");
}

}

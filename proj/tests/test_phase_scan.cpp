#include "doctest.h"

#include <cmath>
#include <string>

#include "kq/error.hpp"
#include "kq/phase_scan.hpp"

using namespace kq;
using namespace kq::scan;

namespace {

ErrorCode config_error(const std::string &text, std::string *msg = nullptr) {
    try {
        parse_config(text);
    } catch (const Error &e) {
        if (msg) *msg = e.what();
        return e.code();
    }
    return ErrorCode::Ok;
}

SweepConfig chain_sweep(double start, double stop) {
    SweepConfig c;
    c.sweep = {"Jx", start, stop, 0.1};
    c.threads = 2;
    return c;
}

} // namespace

TEST_SUITE("phase_scan") {

TEST_CASE("config parsing and defaults") {
    const SweepConfig c = parse_config(R"({"lattice": "chain", "sweep": {"param": "Jx", "start": 0, "stop": 2, "step": 0.1}})");
    CHECK(c.size == 4);
    CHECK(c.Jz == 1.0);
    CHECK(c.shots == 8196);
    CHECK(c.backend == Backend::Exact);
    CHECK(c.sweep.values().size() == 21);
    CHECK(c.effective_subsystem() == std::vector<int>{0, 1});
    CHECK(std::abs(c.point_dk() - M_PI / 4) < 1e-15);
    CHECK(c.flag_factor == kDefaultFlagFactor);
}

TEST_CASE("config errors carry line and field") {
    std::string msg;
    CHECK(config_error("{\n  \"lattice\": \"chain\",\n  \"sweep\": {\"param\": \"Jx\", \"start\": 0, \"stop\": 1, \"step\": -0.1}\n}", &msg) == ErrorCode::Config);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("sweep.step") != std::string::npos);
    CHECK(config_error("{\n\"lattice\": \"chain\",\n\"bogus\": 1}", &msg) == ErrorCode::Config);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(config_error("{\"lattice\": \"chain\",, }", &msg) == ErrorCode::Config);
    CHECK(msg.find("syntax") != std::string::npos);
    CHECK(config_error(R"({"lattice": "square"})") == ErrorCode::Config);
    CHECK(config_error(R"({"lattice": "chain", "size": 6})") == ErrorCode::Config);
    CHECK(config_error(R"({"lattice": "chain", "backend": {"type": "shots", "shots": 0}})") == ErrorCode::Config);
    CHECK(config_error(R"({"lattice": "chain", "backend": {"type": "noisy", "depol2": 1.5}})") == ErrorCode::Config);
    CHECK(config_error(R"({"lattice": "chain", "size": 8, "backend": {"type": "noisy"}})") == ErrorCode::Config);
    CHECK(config_error(R"({"lattice": "chain", "subsystem": [0, 9]})") == ErrorCode::Config);
    CHECK(config_error(R"({"lattice": "honeycomb", "dk": {"policy": "fixed", "value": 0.2}})") == ErrorCode::Config);
    CHECK(config_error(R"({"lattice": "chain", "sweep": {"param": "Jx", "start": 0, "stop": 1}, "rows": {"param": "Jx", "start": 0}})") ==
          ErrorCode::Config);
    CHECK(config_error(R"({"lattice": "chain", "version": 2})") == ErrorCode::Config);
    CHECK_THROWS_AS(parse_backend("gpu"), Error);
}

TEST_CASE("single-point sweep gives a one-row table") {
    const SweepResult r = run_sweep(chain_sweep(0.5, 0.5));
    REQUIRE(r.points.size() == 1);
    CHECK_FALSE(r.evaluated);
    const std::string csv = sweep_csv(chain_sweep(0.5, 0.5), r);
    CHECK(csv.rfind("# kq-sweep v1\nlattice,method,backend,size,param,x,Jx,Jy,Jz,dk,S_A,S_exact\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("exact chain sweep finds the boundary at J_x = J_z") {
    const SweepResult r = run_sweep(chain_sweep(0.0, 2.0));
    REQUIRE(r.evaluated);
    CHECK(r.boundary.found);
    CHECK(std::abs(r.boundary.boundary - 1.0) <= 0.05 + 1e-9);
    for (const PointResult &p : r.points) CHECK(std::abs(p.m.S - p.m.S_exact) < 1e-8);
}

TEST_CASE("honeycomb sweep at J_x = 0.1 finds a jump at a gap-closure point") {
    SweepConfig c;
    c.lattice = Lattice::Honeycomb;
    c.size = 8;
    c.Jx = 0.1;
    c.sweep = {"Jy", 0.0, 2.0, 0.1};
    const SweepResult r = run_sweep(c);
    REQUIRE(r.evaluated);
    CHECK(r.boundary.found);
    double d = 1e9;
    for (double b : oracle_boundaries(Lattice::Honeycomb, "Jy", 0.1, 0.0, 1.0)) d = std::min(d, std::abs(r.boundary.boundary - b));
    CHECK(d <= 0.1 + 1e-9);
    for (const PointResult &p : r.points) CHECK(std::abs(p.m.S - p.m.S_exact) < 1e-8);
}

TEST_CASE("oracle boundaries") {
    CHECK(oracle_boundaries(Lattice::Chain, "Jx", 0, 0, 1.3) == std::vector<double>{1.3});
    const auto h = oracle_boundaries(Lattice::Honeycomb, "Jy", 0.1, 0.0, 1.0);
    REQUIRE(h.size() == 2);
    CHECK(h[0] == doctest::Approx(0.9));
    CHECK(h[1] == doctest::Approx(1.1));
    CHECK(oracle_boundaries(Lattice::Honeycomb, "Jy", 1.0, 0.0, 1.0) == std::vector<double>{0.0, 2.0});
    CHECK(oracle_boundaries(Lattice::Honeycomb, "Jy", 0.0, 0.0, 0.0) == std::vector<double>{0.0});
}

TEST_CASE("determinism across thread counts") {
    SweepConfig c = chain_sweep(0.0, 1.0);
    c.backend = Backend::Shots;
    c.shots = 512;
    c.seed = 7;
    c.threads = 1;
    const std::string a = sweep_csv(c, run_sweep(c));
    c.threads = 4;
    CHECK(sweep_csv(c, run_sweep(c)) == a);
    c.seed = 8;
    CHECK(sweep_csv(c, run_sweep(c)) != a);
}

TEST_CASE("phase diagram with a degenerate single row") {
    SweepConfig c = chain_sweep(0.0, 2.0);
    c.has_rows = true;
    c.rows = {"Jz", 0.8, 0.8, 0.1};
    const DiagramResult d = phase_diagram(c);
    REQUIRE(d.rows.size() == 1);
    CHECK(d.rows[0].oracle == std::vector<double>{0.8});
    CHECK(std::abs(d.rows[0].sweep.boundary.boundary - 0.8) <= 0.1 + 1e-9);
    CHECK(diagram_csv(c, d).rfind("# kq-diagram v1\n", 0) == 0);
    c.has_rows = false;
    CHECK_THROWS_AS(phase_diagram(c), Error);
}

TEST_CASE("spectrum sweep matches the oracle and is particle-hole symmetric") {
    SweepConfig c;
    c.size = 2;
    c.Jx = 1.5;
    c.dk_policy = DkPolicy::Sweep;
    c.dk_points = 8;
    const SpectrumResult s = spectrum_sweep(c);
    REQUIRE(s.points.size() == 8);
    CHECK(s.max_oracle_deviation < 1e-8);
    for (const SpectrumPoint &p : s.points) CHECK(std::abs(p.lambda.front() + p.lambda.back() - 1.0) < 1e-8);
    CHECK(std::abs(s.points[4].o - M_PI) < 1e-12);
    CHECK(std::abs(s.points[4].lambda[0] - 0.5) < 1e-8);
    c.lattice = Lattice::Honeycomb;
    c.dk_policy = DkPolicy::Special;
    CHECK_THROWS_AS(spectrum_sweep(c), Error);
}

TEST_CASE("tomography sweep with exact expectations") {
    SweepConfig c;
    c.method = Method::Tomography;
    c.size = 2;
    c.sweep = {"Jx", 0.0, 1.0, 0.5};
    const SweepResult r = run_sweep(c);
    for (const PointResult &p : r.points) CHECK(std::abs(p.m.S - p.m.S_exact) < 1e-9);
}

TEST_CASE("verify suite passes") {
    for (const Check &c : verify_suite()) {
        INFO(c.name);
        CHECK(c.pass);
    }
}

TEST_CASE("plots") {
    const SweepConfig c = chain_sweep(0.0, 2.0);
    const std::string svg = plot_svg(sweep_csv(c, run_sweep(c)));
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK_THROWS_AS(plot_svg("x,y\n1,2\n"), Error);
    CHECK_THROWS_AS(plot_svg("# kq-sweep v9\nx\n1\n"), Error);
    CHECK_THROWS_AS(plot_svg(correlation_csv({{0.0, {Eigen::MatrixXcd::Identity(2, 2)}}})), Error);
}

}

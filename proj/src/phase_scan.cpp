#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include <Eigen/Eigenvalues>

#include "kq/error.hpp"
#include "kq/ff_oracle.hpp"
#include "kq/gaussian.hpp"
#include "kq/gs_circuits.hpp"
#include "kq/phase_scan.hpp"
#include "kq/rng.hpp"

namespace kq::scan {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

/// Runs f(i) for i < n on a worker pool; results go to caller-owned slots, so output order is grid order.
/// The exception of the lowest failing index is rethrown.
template <class F> void parallel_for(std::size_t n, int threads, F &&f) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto &t : pool) t.join();
    }
    for (const auto &e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<int> iota(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

double spectrum_eps(const SweepConfig &cfg) {
    return cfg.backend == Backend::Exact ? obs::kSpectrumEps : obs::spectrum_eps_for_shots(cfg.shots);
}

std::unique_ptr<obs::PauliEstimator> estimator_for(const Circuit &c, const SweepConfig &cfg, std::uint64_t seed, std::unique_ptr<StateVector> &sv,
                                                   std::unique_ptr<DensityMatrix> &dm) {
    switch (cfg.backend) {
    case Backend::Exact:
        sv = std::make_unique<StateVector>(c.n_qubits);
        sv->run(c);
        return obs::exact_estimator(*sv);
    case Backend::Shots:
        sv = std::make_unique<StateVector>(c.n_qubits);
        sv->run(c);
        return obs::sampling_estimator(*sv, cfg.shots, {}, seed);
    case Backend::Noisy:
        dm = std::make_unique<DensityMatrix>(c.n_qubits);
        dm->run(c, cfg.noise);
        return obs::sampling_estimator(*dm, cfg.shots, cfg.noise, seed);
    }
    fail(ErrorCode::InvalidArgument, "unknown backend");
}

/// Correlation matrix of `wires` (ascending) after running `c` on the configured backend.
obs::CorrelationMatrix measure_correlation(const Circuit &c, const std::vector<int> &wires, const SweepConfig &cfg, std::uint64_t seed) {
    if (cfg.backend == Backend::Exact && c.n_qubits > kStatevectorWireLimit) {
        GaussianState g(c.n_qubits);
        g.run(c);
        return g.correlation_matrix(wires);
    }
    std::unique_ptr<StateVector> sv;
    std::unique_ptr<DensityMatrix> dm;
    auto est = estimator_for(c, cfg, seed, sv, dm);
    return obs::correlation_matrix(*est, wires, iota(c.n_qubits));
}

obs::CorrelationMatrix select_modes(const obs::CorrelationMatrix &full, const std::vector<int> &modes) {
    const int n = static_cast<int>(modes.size());
    obs::CorrelationMatrix c(2 * n, 2 * n);
    for (int a = 0; a < 2 * n; ++a)
        for (int b = 0; b < 2 * n; ++b) c(a, b) = full(2 * modes[a / 2] + a % 2, 2 * modes[b / 2] + b % 2);
    return c;
}

std::vector<double> enforced_grid(int N, double o) {
    std::vector<double> g = oracle::integer_grid(N, o);
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) g.push_back(-g[i]);
    return g;
}

Measurement chain_correlation(const SweepConfig &cfg, double Jx, double Jz, double dk, std::uint64_t seed) {
    const int N = cfg.size;
    const model::ModelParams p = model::ModelParams::chain(2 * N, Jx, Jz);
    const gs::PrepPlan plan = gs::make_plan(p, dk, true);
    const Circuit c = gs::build_circuit(plan);
    const std::vector<int> sub = cfg.effective_subsystem();
    std::vector<int> wires;
    for (int n : sub) wires.push_back(plan.wires.position[n]);
    Measurement m;
    const obs::CorrelationMatrix C = measure_correlation(c, wires, cfg, seed);
    const obs::EntanglementResult e = obs::entanglement(C, spectrum_eps(cfg));
    m.S = e.entropy;
    m.spectrum = e.spectrum;
    m.matrices.push_back(C);
    const double o = gs::integer_grid_offset(N, dk);
    const obs::CorrelationMatrix full = oracle::exact_correlation_matrix(p, enforced_grid(N, o), sub.back() + 1);
    m.S_exact = obs::entanglement(select_modes(full, sub)).entropy;
    return m;
}

/// Honeycomb L x L torus, cut at fixed x. The y direction is diagonalized exactly on the integer grid; momentum
/// groups {ky, -ky} are prepared by separate circuits and their entropies add.
Measurement honeycomb_correlation(const SweepConfig &cfg, double Jx, double Jy, double Jz, std::uint64_t seed) {
    const int L = cfg.size;
    const double o = gs::integer_grid_offset(L, cfg.point_dk());
    const std::vector<int> sub = cfg.effective_subsystem();
    Measurement m;
    for (int g = 0; g <= L / 2; ++g) {
        const double ky = 2 * kPi * g / L;
        const bool single = g == 0 || 2 * g == L;
        const auto f_minus = [=](double k) { return Jz + Jx * std::exp(kI * k) + Jy * std::exp(-kI * ky); };
        const Circuit c = gs::paired_copies_circuit(f_minus, L, o, single);
        std::vector<int> wires;
        for (int x : sub) wires.push_back(single ? 2 * x : x);
        if (!single)
            for (int x : sub) wires.push_back(L + x);
        const obs::CorrelationMatrix C = measure_correlation(c, wires, cfg, CounterRng::mix(seed ^ CounterRng::mix(0x51ed27 + g)));
        const obs::EntanglementResult e = obs::entanglement(C, spectrum_eps(cfg));
        m.S += e.entropy;
        m.spectrum.insert(m.spectrum.end(), e.spectrum.begin(), e.spectrum.end());
        m.matrices.push_back(C);
    }
    std::sort(m.spectrum.begin(), m.spectrum.end());
    for (int g = 0; g < L; ++g) {
        const cplx shift = Jz + Jy * std::exp(kI * (2 * kPi * g / L));
        const oracle::Dispersion f = [=](double k) { return shift + Jx * std::exp(kI * k); };
        const obs::CorrelationMatrix full = oracle::exact_correlation_matrix(f, oracle::integer_grid(L, o), sub.back() + 1);
        m.S_exact += obs::entanglement(select_modes(full, sub)).entropy;
    }
    return m;
}

Measurement tomography_point(const SweepConfig &cfg, double Jx, double Jy, double Jz, std::uint64_t seed) {
    const model::ModelParams p =
        cfg.lattice == Lattice::Chain ? model::ModelParams::chain(2 * cfg.size, Jx, Jz) : model::ModelParams::honeycomb(2, 2, Jx, Jy, Jz);
    const Circuit c = gs::prepare_ground_state(gs::make_plan(p));
    const std::vector<int> q = cfg.effective_subsystem();
    std::unique_ptr<StateVector> sv;
    std::unique_ptr<DensityMatrix> dm;
    auto est = estimator_for(c, cfg, seed, sv, dm);
    const Eigen::MatrixXcd rho = obs::tomography_mle(*est, q);
    Measurement m;
    m.S = obs::entropy_from_density_matrix(rho);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    for (int i = 0; i < es.eigenvalues().size(); ++i) m.spectrum.push_back(es.eigenvalues()(i));
    m.matrices.push_back(rho);
    StateVector psi(c.n_qubits);
    psi.run(c);
    m.S_exact = obs::entropy_from_density_matrix(obs::reduced_density_matrix(psi, q));
    return m;
}

void set_param(const std::string &name, double v, double &Jx, double &Jy, double &Jz) {
    if (name == "Jx") Jx = v;
    else if (name == "Jy") Jy = v;
    else Jz = v;
}

void assemble_boundary(SweepResult &r, const SweepConfig &cfg) {
    if (r.points.size() < 3) return;
    std::vector<double> x, y;
    for (const PointResult &p : r.points) {
        x.push_back(p.x);
        y.push_back(p.m.S);
    }
    r.boundary = detect_boundary(x, y, cfg.flag_factor);
    r.evaluated = true;
}

double expectation(const Eigen::SparseMatrix<cplx> &h, const StateVector &s) {
    const Eigen::Map<const Eigen::VectorXcd> v(s.amplitudes().data(), static_cast<Eigen::Index>(s.amplitudes().size()));
    return (v.adjoint() * (h * v))(0, 0).real();
}

} // namespace

std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index) { return CounterRng::mix(seed ^ CounterRng::mix(index + 0x9e3779b97f4a7c15ULL)); }

Circuit point_circuit(const SweepConfig &cfg, double Jx, double Jy, double Jz, double dk) {
    if (cfg.method == Method::Tomography) {
        const model::ModelParams p =
            cfg.lattice == Lattice::Chain ? model::ModelParams::chain(2 * cfg.size, Jx, Jz) : model::ModelParams::honeycomb(2, 2, Jx, Jy, Jz);
        return gs::prepare_ground_state(gs::make_plan(p));
    }
    if (cfg.lattice == Lattice::Chain) return gs::build_circuit(gs::make_plan(model::ModelParams::chain(2 * cfg.size, Jx, Jz), dk, true));
    const int L = cfg.size;
    return gs::paired_copies_circuit([=](double k) { return Jz + Jx * std::exp(kI * k) + Jy; }, L, gs::integer_grid_offset(L, cfg.point_dk()), true);
}

Measurement measure_point(const SweepConfig &cfg, double Jx, double Jy, double Jz, double dk, std::uint64_t seed) {
    if (cfg.method == Method::Tomography) return tomography_point(cfg, Jx, Jy, Jz, seed);
    if (cfg.lattice == Lattice::Chain) return chain_correlation(cfg, Jx, Jz, dk, seed);
    return honeycomb_correlation(cfg, Jx, Jy, Jz, seed);
}

SweepResult run_sweep(const SweepConfig &cfg) {
    cfg.validate();
    const std::vector<double> xs = cfg.sweep.values();
    SweepResult r;
    r.points.resize(xs.size());
    parallel_for(xs.size(), cfg.threads, [&](std::size_t i) {
        PointResult &p = r.points[i];
        p.x = xs[i];
        p.Jx = cfg.Jx;
        p.Jy = cfg.Jy;
        p.Jz = cfg.Jz;
        set_param(cfg.sweep.param, xs[i], p.Jx, p.Jy, p.Jz);
        p.dk = cfg.method == Method::Tomography ? 0.0 : cfg.point_dk();
        p.m = measure_point(cfg, p.Jx, p.Jy, p.Jz, p.dk, point_seed(cfg.seed, i));
    });
    assemble_boundary(r, cfg);
    return r;
}

std::vector<double> oracle_boundaries(Lattice lat, const std::string &param, double Jx, double Jy, double Jz) {
    std::vector<double> out;
    if (lat == Lattice::Chain) {
        if (param == "Jx") out.push_back(std::abs(Jz));
        else if (param == "Jz") out.push_back(std::abs(Jx));
        return out;
    }
    double b = 0, c = 0;
    if (param == "Jx") b = Jy, c = Jz;
    else if (param == "Jy") b = Jx, c = Jz;
    else b = Jx, c = Jy;
    b = std::abs(b);
    c = std::abs(c);
    const double lo = std::abs(b - c), hi = b + c;
    // lo = 0 is a closure at the start of the swept axis (edge of the gapless region)
    out.push_back(lo);
    if (hi > lo + 1e-12) out.push_back(hi);
    return out;
}

DiagramResult phase_diagram(const SweepConfig &cfg) {
    cfg.validate();
    require(cfg.has_rows, ErrorCode::Config, "rows: a phase diagram needs a second grid axis");
    const std::vector<double> xs = cfg.sweep.values(), rs = cfg.rows.values();
    DiagramResult d;
    d.rows.resize(rs.size());
    for (std::size_t r = 0; r < rs.size(); ++r) {
        d.rows[r].value = rs[r];
        d.rows[r].sweep.points.resize(xs.size());
    }
    parallel_for(xs.size() * rs.size(), cfg.threads, [&](std::size_t t) {
        const std::size_t r = t / xs.size(), i = t % xs.size();
        PointResult &p = d.rows[r].sweep.points[i];
        p.x = xs[i];
        p.Jx = cfg.Jx;
        p.Jy = cfg.Jy;
        p.Jz = cfg.Jz;
        set_param(cfg.rows.param, rs[r], p.Jx, p.Jy, p.Jz);
        set_param(cfg.sweep.param, xs[i], p.Jx, p.Jy, p.Jz);
        p.dk = cfg.method == Method::Tomography ? 0.0 : cfg.point_dk();
        p.m = measure_point(cfg, p.Jx, p.Jy, p.Jz, p.dk, point_seed(cfg.seed, t));
    });
    for (DiagramRow &row : d.rows) {
        assemble_boundary(row.sweep, cfg);
        double Jx = cfg.Jx, Jy = cfg.Jy, Jz = cfg.Jz;
        set_param(cfg.rows.param, row.value, Jx, Jy, Jz);
        row.oracle = oracle_boundaries(cfg.lattice, cfg.sweep.param, Jx, Jy, Jz);
    }
    return d;
}

SpectrumResult spectrum_sweep(const SweepConfig &cfg) {
    cfg.validate();
    require(cfg.lattice == Lattice::Chain && cfg.method == Method::Correlation, ErrorCode::Config,
            "lattice: spectrum sweeps are defined for the chain with the correlation method");
    const int N = cfg.size;
    const int points = cfg.dk_policy == DkPolicy::Sweep ? cfg.dk_points : 32;
    SpectrumResult res;
    res.points.resize(static_cast<std::size_t>(points));
    const std::vector<int> sub = cfg.effective_subsystem();
    const model::ModelParams p = model::ModelParams::chain(2 * N, cfg.Jx, cfg.Jz);
    parallel_for(res.points.size(), cfg.threads, [&](std::size_t i) {
        SpectrumPoint &sp = res.points[i];
        sp.o = 2 * kPi * static_cast<double>(i) / points;
        sp.dk = sp.o - kPi / N;
        const Measurement m = chain_correlation(cfg, cfg.Jx, cfg.Jz, sp.dk, point_seed(cfg.seed, i));
        sp.S = m.S;
        sp.lambda = m.spectrum;
        sp.C = m.matrices.front();
        const obs::CorrelationMatrix full = oracle::exact_correlation_matrix(p, enforced_grid(N, sp.o), sub.back() + 1);
        sp.lambda_oracle = obs::entanglement(select_modes(full, sub)).spectrum;
    });
    for (const SpectrumPoint &sp : res.points)
        for (std::size_t j = 0; j < sp.lambda.size(); ++j)
            res.max_oracle_deviation = std::max(res.max_oracle_deviation, std::abs(sp.lambda[j] - sp.lambda_oracle[j]));
    return res;
}

std::vector<Check> verify_suite() {
    std::vector<Check> out;
    auto add = [&](const std::string &name, double v, double tol) { out.push_back({name, v, tol, v <= tol}); };

    double e_chain = 0, e_honey = 0;
    for (int i = 0; i <= 8; ++i) {
        const model::ModelParams p = model::ModelParams::chain(4, 0.25 * i, 1.0);
        StateVector s(4);
        s.run(gs::prepare_ground_state(gs::make_plan(p)));
        e_chain = std::max(e_chain, std::abs(expectation(model::spin_hamiltonian(p), s) - oracle::exact_diagonalization(p).energy));
    }
    for (int i = 1; i <= 7; ++i) {
        const model::ModelParams p = model::ModelParams::honeycomb(2, 2, 0.2 * i, 0.2 * i, 1.0);
        StateVector s(8);
        s.run(gs::prepare_ground_state(gs::make_plan(p)));
        e_honey = std::max(e_honey, std::abs(expectation(model::spin_hamiltonian(p), s) - oracle::exact_diagonalization(p).energy));
    }
    add("chain cluster energy vs exact diagonalization", e_chain, 1e-9);
    add("honeycomb cluster energy vs exact diagonalization", e_honey, 1e-9);

    double c_err = 0;
    for (int N : {2, 4})
        for (double jx : {0.3, 1.0, 1.6})
            for (double dk : {0.0, 0.3, kPi / N, 1.1}) {
                const model::ModelParams p = model::ModelParams::chain(2 * N, jx, 1.0);
                const gs::PrepPlan plan = gs::make_plan(p, dk, true);
                StateVector s(2 * N);
                s.run(gs::build_circuit(plan));
                auto est = obs::exact_estimator(s);
                const obs::CorrelationMatrix C = obs::correlation_matrix(*est, plan.wires.position, iota(2 * N));
                const obs::CorrelationMatrix ref = oracle::exact_correlation_matrix(p, enforced_grid(N, gs::integer_grid_offset(N, dk)), N);
                c_err = std::max(c_err, (C - ref).cwiseAbs().maxCoeff());
            }
    for (int M : {2, 4, 8})
        for (double jx : {0.4, 1.3}) {
            const model::ModelParams p = model::ModelParams::chain(2 * M, jx, 1.0);
            StateVector s(M);
            s.run(gs::bond_fermion_state(model::mode_chain(p), M));
            auto est = obs::exact_estimator(s);
            const obs::CorrelationMatrix C = obs::correlation_matrix(*est, iota(M), iota(M));
            c_err = std::max(c_err, (C - oracle::exact_correlation_matrix(p, model::base_grid(M, 0.0), M)).cwiseAbs().maxCoeff());
        }
    add("circuit correlation matrices vs momentum sums (<= 14 wires)", c_err, 1e-8);

    double h_err = 0;
    for (int L : {2, 4})
        for (double jy : {0.3, 1.0, 1.7}) {
            SweepConfig cfg;
            cfg.lattice = Lattice::Honeycomb;
            cfg.size = L;
            const Measurement m = honeycomb_correlation(cfg, 0.1, jy, 1.0, 1);
            h_err = std::max(h_err, std::abs(m.S - m.S_exact));
        }
    add("honeycomb momentum-group circuits vs momentum sums", h_err, 1e-8);

    double b_err = 0, v_err = 0;
    for (int N : {2, 4, 6, 8})
        for (double jx : {0.3, 0.9, 1.6}) {
            const model::ModelParams p = model::ModelParams::chain(2 * N, jx, 1.0);
            const model::ModeChain mc = model::mode_chain(p);
            b_err = std::max(b_err, (oracle::exact_correlation_matrix(p, model::base_grid(N, 0.0), N) - oracle::bdg_correlation_matrix(mc, N, -1, N))
                                        .cwiseAbs()
                                        .maxCoeff());
            v_err = std::max(v_err, oracle::bogoliubov_vacuum_violation(mc, N, -1));
        }
    add("real-space BdG vacuum vs momentum sums (even N <= 8)", b_err, 1e-10);
    add("Bogoliubov vacuum conditions", v_err, 1e-10);

    double s_err = 0;
    for (int N : {2, 4, 8}) {
        const model::ModelParams p = model::ModelParams::chain(2 * N, 1.0, 1.0);
        const gs::PrepPlan full = gs::make_plan(p, kPi / N, true), red = gs::make_plan(p, kPi / N, false, true);
        StateVector a(full.wires.n_wires), b(red.wires.n_wires);
        a.run(gs::build_circuit(full));
        b.run(gs::build_circuit(red));
        auto ea = obs::exact_estimator(a);
        auto eb = obs::exact_estimator(b);
        const auto Ca = obs::correlation_matrix(*ea, full.wires.position, iota(full.wires.n_wires));
        const auto Cb = obs::correlation_matrix(*eb, red.wires.position, iota(red.wires.n_wires));
        s_err = std::max(s_err, (Ca - Cb).cwiseAbs().maxCoeff());
    }
    add("reduced special-shift circuit vs full symmetry-enforced circuit", s_err, 1e-10);
    return out;
}

} // namespace kq::scan

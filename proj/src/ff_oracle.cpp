#include "kq/ff_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "kq/boundary.hpp"

namespace kq::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I1{0.0, 1.0};

Dispersion dispersion_of(const model::ModelParams &p) {
    if (p.lattice == model::Lattice::Chain1D) return [p](double k) { return model::bloch(p, k).f; };
    const model::ModeChain mc = model::mode_chain(p);
    return [mc](double k) { return mc.f(k); };
}

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

Eigen::MatrixXcd bdg_hamiltonian(const model::ModeChain &mc, int N, int bs) {
    require(N >= 1, ErrorCode::InvalidArgument, "ring needs at least one site");
    require(bs == 1 || bs == -1, ErrorCode::InvalidArgument, "boundary sign must be +1 or -1");
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N), B = Eigen::MatrixXd::Zero(N, N);
    for (int i = 0; i < N; ++i) A(i, i) += 2 * mc.onsite;
    for (const auto &[J, o] : mc.hops) {
        require(o % N != 0, ErrorCode::InvalidArgument, "hop range must not wrap onto the same site");
        for (int i = 0; i < N; ++i) {
            const int raw = i + o, w = floor_div(raw, N), j = raw - w * N;
            const double s = J * ((w % 2 != 0 && bs == -1) ? -1.0 : 1.0);
            A(i, j) += s;
            A(j, i) += s;
            B(i, j) += s;
            B(j, i) -= s;
        }
    }
    Eigen::MatrixXd h(2 * N, 2 * N);
    h << A, B, -B, -A;
    return h.cast<cplx>();
}

} // namespace

obs::FermionBilinears Bilinears::at(int d) const {
    require(std::abs(d) <= max_sep, ErrorCode::InvalidArgument, "separation outside the computed range");
    const std::size_t i = static_cast<std::size_t>(d + max_sep);
    return {fdfd[i], ff[i], fdf[i], ffd[i]};
}

Bilinears exact_correlators(const Dispersion &f, const std::vector<double> &grid, int max_sep) {
    require(!grid.empty(), ErrorCode::InvalidArgument, "exact_correlators: empty momentum grid");
    require(max_sep >= 0, ErrorCode::InvalidArgument, "exact_correlators: negative separation");
    Bilinears b;
    b.max_sep = max_sep;
    const std::size_t n = static_cast<std::size_t>(2 * max_sep + 1);
    b.fdfd.assign(n, 0);
    b.ff.assign(n, 0);
    b.ffd.assign(n, 0);
    b.fdf.assign(n, 0);
    const double nk = static_cast<double>(grid.size());
    for (double k : grid) {
        const model::BlochData bd = model::bloch_from_f(f(k), k);
        const double st = std::sin(bd.theta), ct = std::cos(bd.theta);
        for (int d = -max_sep; d <= max_sep; ++d) {
            const cplx ph = std::exp(I1 * (k * d)) / nk;
            const std::size_t i = static_cast<std::size_t>(d + max_sep);
            b.fdfd[i] += -I1 * ph * (st / 2);
            b.ff[i] += I1 * ph * (st / 2);
            b.ffd[i] += ph * ((1 + ct) / 2);
            b.fdf[i] += ph * ((1 - ct) / 2);
        }
    }
    return b;
}

Bilinears exact_correlators(const model::ModelParams &p, const std::vector<double> &grid, int max_sep) {
    return exact_correlators(dispersion_of(p), grid, max_sep);
}

obs::CorrelationMatrix exact_correlation_matrix(const Dispersion &f, const std::vector<double> &grid, int n_sub) {
    require(n_sub >= 1, ErrorCode::InvalidArgument, "subsystem must contain at least one mode");
    const Bilinears b = exact_correlators(f, grid, n_sub - 1);
    return obs::correlation_from_bilinears(n_sub, [&](int m, int n) { return b.at(m - n); });
}

obs::CorrelationMatrix exact_correlation_matrix(const model::ModelParams &p, const std::vector<double> &grid, int n_sub) {
    return exact_correlation_matrix(dispersion_of(p), grid, n_sub);
}

obs::EntanglementResult exact_entanglement(const Dispersion &f, const std::vector<double> &grid, int n_sub) {
    return obs::entanglement(exact_correlation_matrix(f, grid, n_sub), 1e-9);
}

obs::EntanglementResult exact_entanglement(const model::ModelParams &p, const std::vector<double> &grid, int n_sub) {
    return exact_entanglement(dispersion_of(p), grid, n_sub);
}

std::vector<double> doubled_grid(int N, double dk) {
    std::vector<double> k = model::base_grid(N, dk);
    const std::size_t n = k.size();
    for (std::size_t j = 0; j < n; ++j) k.push_back(-k[j]);
    return k;
}

std::vector<double> integer_grid(int N, double o) {
    require(N >= 1, ErrorCode::InvalidArgument, "grid needs at least one point");
    std::vector<double> k(N);
    for (int j = 0; j < N; ++j) k[j] = o + 2 * kPi * j / N;
    return k;
}

Eigen::MatrixXcd bdg_vacuum_correlations(const model::ModeChain &mc, int N, int boundary_sign) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(bdg_hamiltonian(mc, N, boundary_sign));
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
    int positive = 0;
    for (int i = 0; i < 2 * N; ++i) {
        const double w = es.eigenvalues()(i);
        require(std::abs(w) > 1e-10, ErrorCode::InvalidArgument, "BdG spectrum has a zero mode; the vacuum is not unique");
        if (w > 0) {
            G += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
            ++positive;
        }
    }
    require(positive == N, ErrorCode::Invariant, "BdG spectrum is not particle-hole paired");
    return G;
}

obs::CorrelationMatrix bdg_correlation_matrix(const model::ModeChain &mc, int N, int boundary_sign, int n_sub) {
    require(n_sub >= 1 && n_sub <= N, ErrorCode::InvalidArgument, "subsystem size out of range");
    const Eigen::MatrixXcd G = bdg_vacuum_correlations(mc, N, boundary_sign);
    // G = <Psi Psi^dag>: <f_m f_n^dag> = G(m, n), <f_m f_n> = G(m, N + n), <f_m^dag f_n^dag> = G(N + m, n), <f_m^dag f_n> = G(N + m, N + n)
    return obs::correlation_from_bilinears(n_sub, [&](int m, int n) {
        return obs::FermionBilinears{G(N + m, n), G(m, N + n), G(N + m, N + n), G(m, n)};
    });
}

double bdg_ground_energy(const model::ModeChain &mc, int N, int boundary_sign) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(bdg_hamiltonian(mc, N, boundary_sign), Eigen::EigenvaluesOnly);
    double e = 0;
    for (int i = 0; i < 2 * N; ++i)
        if (es.eigenvalues()(i) > 0) e -= 0.5 * es.eigenvalues()(i);
    return e;
}

double bogoliubov_vacuum_violation(const model::ModeChain &mc, int N, int boundary_sign) {
    const Eigen::MatrixXcd G = bdg_vacuum_correlations(mc, N, boundary_sign);
    // momentum grid of the ring: antiperiodic -> half-integer, periodic -> integer
    const std::vector<double> K = boundary_sign == -1 ? model::base_grid(N, 0.0) : integer_grid(N, 0.0);
    const double phi = kPi / 2;
    Eigen::MatrixXcd W(N, 2 * N);
    for (int a = 0; a < N; ++a) {
        const model::BlochData bd = mc.at(K[a]);
        for (int j = 0; j < N; ++j) {
            const cplx e = std::exp(-I1 * (K[a] * j)) / std::sqrt(double(N));
            W(a, j) = std::cos(bd.theta / 2) * std::exp(-I1 * phi / 2.0) * e;
            W(a, N + j) = std::sin(bd.theta / 2) * std::exp(I1 * phi / 2.0) * e;
        }
    }
    // swap halves: Psi^dag = sigma Psi
    Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(2 * N, 2 * N);
    for (int j = 0; j < N; ++j) sigma(j, N + j) = sigma(N + j, j) = 1;
    const Eigen::MatrixXcd bbd = W * G * W.adjoint();                                     // <b b^dag>
    const Eigen::MatrixXcd bdb = W.conjugate() * (sigma * G * sigma) * W.transpose();     // <b^dag b>
    const Eigen::MatrixXcd bb = W * (G * sigma) * W.transpose();                         // <b b>
    const Eigen::MatrixXcd bdbd = W.conjugate() * (sigma * G) * W.adjoint();             // <b^dag b^dag>
    double v = (bbd - Eigen::MatrixXcd::Identity(N, N)).cwiseAbs().maxCoeff();
    v = std::max({v, bdb.cwiseAbs().maxCoeff(), bb.cwiseAbs().maxCoeff(), bdbd.cwiseAbs().maxCoeff()});
    return v;
}

double free_fermion_ground_energy(const model::ModelParams &p) {
    const model::ModeChain mc = model::mode_chain(p);
    double e = 0;
    for (double k : model::base_grid(p.n_cells(), 0.0)) e -= mc.at(k).E;
    return e;
}

namespace {

/// Lanczos for the lowest eigenpair; the second pass regenerates the Krylov vectors to build the eigenvector.
EdResult lanczos(const Eigen::SparseMatrix<cplx> &h) {
    const Eigen::Index dim = h.rows();
    Eigen::VectorXcd v0(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v0(i) = 1.0 + 0.37 * std::sin(0.913 * double(i) + 0.1);
    v0.normalize();
    const int max_iter = static_cast<int>(std::min<Eigen::Index>(dim, 300));
    std::vector<double> alpha, beta;
    auto run = [&](int steps, const Eigen::VectorXd *coef, Eigen::VectorXcd *out) {
        Eigen::VectorXcd v = v0, prev = Eigen::VectorXcd::Zero(dim);
        double b_prev = 0;
        for (int j = 0; j < steps; ++j) {
            if (out) *out += (*coef)(j) * v;
            Eigen::VectorXcd w = h * v - b_prev * prev;
            const double a = v.dot(w).real();
            w -= a * v;
            const double b = w.norm();
            if (!out) {
                alpha.push_back(a);
                beta.push_back(b);
            }
            if (b < 1e-14) return j + 1;
            prev = v;
            v = w / b;
            b_prev = b;
        }
        return steps;
    };
    int steps = run(max_iter, nullptr, nullptr);
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd coef = es.eigenvectors().col(0);
    Eigen::VectorXcd vec = Eigen::VectorXcd::Zero(dim);
    run(steps, &coef, &vec);
    vec.normalize();
    EdResult r;
    r.energy = es.eigenvalues()(0);
    const double resid = (h * vec - r.energy * vec).norm();
    require(resid < 1e-8, ErrorCode::Invariant, "Lanczos did not converge (residual " + std::to_string(resid) + ")");
    r.energy = vec.dot(h * vec).real();
    r.vector.assign(vec.data(), vec.data() + dim);
    return r;
}

} // namespace

EdResult exact_diagonalization(const model::ModelParams &p) {
    require(p.n_sites() <= 16, ErrorCode::InvalidArgument, "exact_diagonalization: at most 16 sites");
    const Eigen::SparseMatrix<cplx> h = model::spin_hamiltonian(p);
    if (h.rows() > 1024) return lanczos(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(h)};
    const double e0 = es.eigenvalues()(0);
    int deg = 0;
    while (deg < es.eigenvalues().size() && es.eigenvalues()(deg) - e0 < 1e-9) ++deg;
    const Eigen::MatrixXcd V = es.eigenvectors().leftCols(deg);
    Eigen::VectorXcd vec;
    for (Eigen::Index i = 0; i < V.rows(); ++i) {
        // projection of basis state i onto the ground space
        Eigen::VectorXcd proj = V * V.row(i).adjoint();
        if (proj.norm() > 1e-6) {
            vec = proj / proj.norm();
            break;
        }
    }
    EdResult r;
    r.energy = e0;
    r.degeneracy = deg;
    r.vector.assign(vec.data(), vec.data() + vec.size());
    return r;
}

double chain_entropy(double Jx, double Jz, int N) {
    require(N >= 2 && N % 2 == 0, ErrorCode::InvalidArgument, "chain scan size must be even");
    model::ModelParams p = model::ModelParams::chain(2 * N, Jx, Jz);
    return exact_entanglement(p, doubled_grid(N, 0.0), N / 2).entropy;
}

double honeycomb_strip_entropy(double Jx, double Jy, double Jz, int Lx, int Ly) {
    require(Lx >= 2 && Lx % 2 == 0 && Ly >= 1, ErrorCode::InvalidArgument, "honeycomb strip needs even Lx");
    const std::vector<double> kx = model::base_grid(Lx, 0.0), ky = model::base_grid(Ly, 0.0);
    double s = 0;
    for (double q : ky) {
        const cplx shift = Jz + Jy * std::exp(I1 * q);
        s += exact_entanglement([&](double k) { return shift + Jx * std::exp(I1 * k); }, kx, Lx / 2).entropy;
    }
    return s;
}

namespace {

void attach_estimates(ScanResult &res, const std::vector<double> &x, const std::vector<int> &sizes, double flag_factor) {
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        std::vector<double> y;
        for (std::size_t i = 0; i < x.size(); ++i) y.push_back(res.rows[si * x.size() + i].S);
        ScanResult::Estimate e;
        e.size = sizes[si];
        if (x.size() >= 3) {
            const scan::BoundaryEstimate b = scan::detect_boundary(x, y, flag_factor);
            e.found = b.found;
            e.boundary = b.boundary;
            e.jump = b.jump;
            e.ratio = b.median > 0 ? b.jump / b.median : std::numeric_limits<double>::infinity();
        }
        res.estimates.push_back(e);
    }
}

void check_sizes(const std::vector<int> &sizes) {
    require(!sizes.empty(), ErrorCode::InvalidArgument, "scan needs at least one size");
    require(std::is_sorted(sizes.begin(), sizes.end()), ErrorCode::InvalidArgument, "scan sizes must be ascending");
}

} // namespace

ScanResult finite_size_scan_chain(const std::vector<double> &jx, double Jz, const std::vector<int> &sizes, double flag_factor) {
    check_sizes(sizes);
    ScanResult res;
    for (int N : sizes) {
        for (double j : jx) {
            ScanRow r;
            r.lattice = "chain";
            r.N = N;
            r.Jx = j;
            r.Jz = Jz;
            r.S = chain_entropy(j, Jz, N);
            res.rows.push_back(r);
        }
    }
    attach_estimates(res, jx, sizes, flag_factor);
    return res;
}

ScanResult finite_size_scan_honeycomb(const std::vector<double> &t, const std::function<std::pair<double, double>(double)> &path, double Jz,
                                      const std::vector<int> &sizes, double flag_factor) {
    check_sizes(sizes);
    ScanResult res;
    for (int L : sizes) {
        for (double x : t) {
            const auto [jx, jy] = path(x);
            ScanRow r;
            r.lattice = "honeycomb";
            r.Lx = r.Ly = L;
            r.Jx = jx;
            r.Jy = jy;
            r.Jz = Jz;
            r.S = honeycomb_strip_entropy(jx, jy, Jz, L, L);
            res.rows.push_back(r);
        }
    }
    attach_estimates(res, t, sizes, flag_factor);
    return res;
}

std::string scan_to_csv(const std::vector<ScanRow> &rows) {
    std::ostringstream o;
    o << std::setprecision(12) << "lattice,N,Lx,Ly,Jx,Jy,Jz,dk,S_A\n";
    for (const ScanRow &r : rows)
        o << r.lattice << ',' << r.N << ',' << r.Lx << ',' << r.Ly << ',' << r.Jx << ',' << r.Jy << ',' << r.Jz << ',' << r.dk << ',' << r.S << '\n';
    return o.str();
}

} // namespace kq::oracle

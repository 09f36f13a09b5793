#include "kq/kitaev_models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace kq::model {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx I1{0.0, 1.0};

bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

/// Adds J * P_i P_j (P in {x,y,z}) to the triplet list.
void add_bond_term(std::vector<Eigen::Triplet<cplx>> &t, int n, const Bond &b, double J) {
    if (J == 0.0) return;
    const std::uint64_t dim = 1ULL << n;
    const std::uint64_t mi = 1ULL << b.i, mj = 1ULL << b.j;
    for (std::uint64_t s = 0; s < dim; ++s) {
        const int bi = (s >> b.i) & 1, bj = (s >> b.j) & 1;
        cplx amp = J;
        std::uint64_t out = s;
        switch (b.type) {
        case 'x':
            out = s ^ mi ^ mj;
            break;
        case 'y':
            // Y|0> = i|1>, Y|1> = -i|0>
            out = s ^ mi ^ mj;
            amp *= (bi ? -I1 : I1) * (bj ? -I1 : I1);
            break;
        default:
            amp *= ((bi ^ bj) ? -1.0 : 1.0);
        }
        t.emplace_back(static_cast<int>(out), static_cast<int>(s), amp);
    }
}

} // namespace

ModelParams ModelParams::chain(int n_sites, double Jx, double Jz) {
    ModelParams p;
    p.lattice = Lattice::Chain1D;
    p.N = n_sites;
    p.Jx = Jx;
    p.Jz = Jz;
    return p;
}

ModelParams ModelParams::honeycomb(int Lx, int Ly, double Jx, double Jy, double Jz) {
    ModelParams p;
    p.lattice = Lattice::Honeycomb;
    p.Lx = Lx;
    p.Ly = Ly;
    p.Jx = Jx;
    p.Jy = Jy;
    p.Jz = Jz;
    return p;
}

int ModelParams::n_sites() const { return lattice == Lattice::Chain1D ? N : 2 * Lx * Ly; }

int ModelParams::n_cells() const { return n_sites() / 2; }

void ModelParams::validate() const {
    require(D == 1 || D == -1, ErrorCode::InvalidArgument, "gauge flux D must be +1 or -1");
    require(std::isfinite(Jx) && std::isfinite(Jy) && std::isfinite(Jz), ErrorCode::InvalidArgument, "couplings must be finite");
    if (lattice == Lattice::Chain1D) {
        require(N >= 2 && N % 2 == 0, ErrorCode::InvalidArgument, "chain site count must be even and >= 2");
    } else {
        require(Lx >= 1 && Ly >= 1, ErrorCode::InvalidArgument, "honeycomb needs at least one unit cell per direction");
    }
}

std::string lattice_name(Lattice l) { return l == Lattice::Chain1D ? "chain" : "honeycomb"; }

std::vector<Bond> bonds(const ModelParams &p) {
    p.validate();
    std::vector<Bond> out;
    if (p.lattice == Lattice::Chain1D) {
        for (int i = 0; i + 1 < p.N; i += 2) out.push_back({i, i + 1, 'z'});
        for (int i = 1; i + 1 < p.N; i += 2) out.push_back({i, i + 1, 'x'});
        if (p.boundary == Boundary::Periodic && p.N > 2) out.push_back({p.N - 1, 0, 'x'});
        if (p.boundary == Boundary::Periodic && p.N == 2) out.push_back({1, 0, 'x'});
        return out;
    }
    require(p.Lx * p.Ly == 4, ErrorCode::InvalidArgument, "honeycomb spin model is available for the 8-site cluster only (Lx*Ly = 4)");
    require(p.boundary == Boundary::Periodic, ErrorCode::InvalidArgument, "the 8-site honeycomb cluster is closed (periodic) only");
    constexpr int L = 8;
    for (int r = 0; r < 4; ++r) out.push_back({2 * r, (2 * r + 5) % L, 'z'});
    for (int r = 0; r < 4; ++r) out.push_back({2 * r, 2 * r + 1, 'x'});
    for (int r = 0; r < 4; ++r) out.push_back({2 * r + 1, (2 * r + 2) % L, 'y'});
    return out;
}

Eigen::SparseMatrix<cplx> spin_hamiltonian(const ModelParams &p) {
    const int n = p.n_sites();
    require(n <= 16, ErrorCode::InvalidArgument, "spin_hamiltonian: at most 16 sites (exact-diagonalization scale)");
    std::vector<Eigen::Triplet<cplx>> t;
    for (const Bond &b : bonds(p)) {
        const double J = b.type == 'x' ? p.Jx : (b.type == 'y' ? p.Jy : p.Jz);
        add_bond_term(t, n, b, J);
    }
    const int dim = 1 << n;
    Eigen::SparseMatrix<cplx> h(dim, dim);
    h.setFromTriplets(t.begin(), t.end());
    h.makeCompressed();
    return h;
}

double spin_energy(const ModelParams &p, const std::vector<cplx> &psi) {
    const Eigen::SparseMatrix<cplx> h = spin_hamiltonian(p);
    require(static_cast<Eigen::Index>(psi.size()) == h.rows(), ErrorCode::InvalidArgument, "spin_energy: state dimension mismatch");
    const Eigen::Map<const Eigen::VectorXcd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
    return v.dot(h * v).real();
}

std::vector<int> jordan_wigner_order(const ModelParams &p) {
    p.validate();
    std::vector<int> order(p.n_sites());
    for (int i = 0; i < p.n_sites(); ++i) order[i] = i;
    return order;
}

BlochData bloch_from_f(cplx f, double kx, double ky) {
    BlochData b;
    b.kx = kx;
    b.ky = ky;
    b.f = f;
    b.E = std::abs(f);
    b.phi = kPi / 2;
    b.gap_closed = b.E <= kGapTol;
    b.theta = b.gap_closed ? 0.0 : std::atan2(f.imag(), f.real());
    return b;
}

BlochData bloch(const ModelParams &p, double k) {
    require(p.lattice == Lattice::Chain1D, ErrorCode::InvalidArgument, "bloch: scalar momentum is for the chain");
    return bloch_from_f(p.Jz * p.D + p.Jx * std::exp(I1 * k), k, 0.0);
}

BlochData bloch(const ModelParams &p, double kx, double ky) {
    if (p.lattice == Lattice::Chain1D) return bloch(p, kx);
    return bloch_from_f(p.Jz * p.D + p.Jx * std::exp(I1 * kx) + p.Jy * std::exp(I1 * ky), kx, ky);
}

cplx ModeChain::f(double k) const {
    cplx v = onsite;
    for (const auto &[J, o] : hops) v += J * std::exp(I1 * (o * k));
    return v;
}

BlochData ModeChain::at(double k) const { return bloch_from_f(f(k), k, 0.0); }

ModeChain mode_chain(const ModelParams &p) {
    p.validate();
    ModeChain m;
    m.onsite = p.Jz * p.D;
    if (p.lattice == Lattice::Chain1D) {
        m.hops = {{p.Jx, 1}};
    } else {
        require(p.Lx * p.Ly == 4, ErrorCode::InvalidArgument, "mode_chain: honeycomb circuits are built for the 8-site cluster");
        m.hops = {{p.Jx, -2}, {p.Jy, 1}};
    }
    return m;
}

std::vector<double> base_grid(int N, double dk) {
    require(N >= 1, ErrorCode::InvalidArgument, "grid needs at least one point");
    std::vector<double> k(N);
    for (int j = 0; j < N; ++j) k[j] = (j - N / 2.0 + 0.5) * 2 * kPi / N + dk;
    return k;
}

std::vector<double> momentum_grid(int N, double dk) {
    require(is_pow2(N), ErrorCode::InvalidArgument, "momentum_grid: N must be a power of two");
    std::vector<double> k = base_grid(N, dk);
    const std::size_t n = k.size();
    for (std::size_t j = 0; j < n; ++j) k.push_back(-k[j]);
    return k;
}

bool grid_self_conjugate(int N, double dk) {
    // (K + dk) = -(K + dk) as sets iff 2 dk is a multiple of 2 pi / N
    const double x = dk * N / kPi;
    return std::abs(x - std::round(x)) < 1e-9;
}

double wrap_angle(double k) {
    double r = std::fmod(k, 2 * kPi);
    if (r <= -kPi) r += 2 * kPi;
    if (r > kPi) r -= 2 * kPi;
    return r;
}

bool honeycomb_gapless(double Jx, double Jy, double Jz) {
    const double a = std::abs(Jx), b = std::abs(Jy), c = std::abs(Jz);
    constexpr double eps = 1e-12;
    return a <= b + c + eps && b <= a + c + eps && c <= a + b + eps;
}

double honeycomb_min_gap_grid(double Jx, double Jy, double Jz, int n) {
    require(n >= 1, ErrorCode::InvalidArgument, "grid size must be positive");
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a) {
        const cplx ex = Jx * std::exp(I1 * (2 * kPi * a / n));
        for (int b = 0; b < n; ++b) best = std::min(best, std::abs(Jz + ex + Jy * std::exp(I1 * (2 * kPi * b / n))));
    }
    return best;
}

} // namespace kq::model

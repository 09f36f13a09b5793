#include "kq/sv_core.hpp"

#include <array>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kq/rng.hpp"

namespace kq {

namespace {

constexpr cplx I1{0.0, 1.0};

void kernel1(std::vector<cplx> &v, int q, const Mat2 &u) {
    const std::uint64_t s = 1ULL << q;
    const std::uint64_t dim = v.size();
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & s) continue;
        const cplx a0 = v[i], a1 = v[i | s];
        v[i] = u(0, 0) * a0 + u(0, 1) * a1;
        v[i | s] = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

void kernel2(std::vector<cplx> &v, int q0, int q1, const Mat4 &u) {
    const std::uint64_t s0 = 1ULL << q0, s1 = 1ULL << q1, both = s0 | s1;
    const std::uint64_t dim = v.size();
    for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & both) continue;
        const std::uint64_t idx[4] = {i, i | s0, i | s1, i | both};
        cplx a[4];
        for (int r = 0; r < 4; ++r) a[r] = v[idx[r]];
        for (int r = 0; r < 4; ++r) v[idx[r]] = u(r, 0) * a[0] + u(r, 1) * a[1] + u(r, 2) * a[2] + u(r, 3) * a[3];
    }
}

struct PauliMasks {
    std::uint64_t x = 0, z = 0;
    int ny = 0;
};

PauliMasks masks(const PauliString &p, int n) {
    PauliMasks m;
    for (const auto &[q, op] : p) {
        require(q >= 0 && q < n, ErrorCode::InvalidArgument, "pauli qubit index out of range");
        const std::uint64_t b = 1ULL << q;
        if (op == Pauli::X) m.x |= b;
        if (op == Pauli::Z) m.z |= b;
        if (op == Pauli::Y) {
            m.x |= b;
            m.z |= b;
            ++m.ny;
        }
    }
    return m;
}

/// i^ny * (-1)^{popcount(i & z)}
cplx pauli_phase(const PauliMasks &m, std::uint64_t i) {
    static const cplx ipow[4] = {1.0, I1, -1.0, -I1};
    cplx ph = ipow[m.ny & 3];
    if (std::popcount(i & m.z) & 1) ph = -ph;
    return ph;
}

/// Rotation taking the eigenbasis of a single-qubit Pauli to Z.
Mat2 to_z_basis(Pauli p) {
    const double r = 1.0 / std::sqrt(2.0);
    Mat2 h;
    h << r, r, r, -r;
    if (p == Pauli::X) return h;
    if (p == Pauli::Y) {
        Mat2 sdg;
        sdg << 1, 0, 0, -I1;
        return h * sdg;
    }
    return Mat2::Identity();
}

double sample_from_probs(const std::vector<double> &probs, const PauliString &p, int shots, const NoiseModel &noise,
                         std::uint64_t seed) {
    require(shots >= 1, ErrorCode::InvalidArgument, "shots must be >= 1");
    noise.validate();
    std::vector<double> cdf(probs.size());
    double acc = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += std::max(0.0, probs[i]);
        cdf[i] = acc;
    }
    std::vector<int> qubits;
    for (const auto &[q, op] : p)
        if (op != Pauli::I) qubits.push_back(q);
    CounterRng rng(seed);
    long long sum = 0;
    for (int s = 0; s < shots; ++s) {
        const double r = rng.uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        const std::uint64_t idx = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
        int parity = 0;
        for (int q : qubits) {
            int bit = static_cast<int>((idx >> q) & 1ULL);
            if (noise.readout_flip > 0 && rng.uniform() < noise.readout_flip) bit ^= 1;
            parity ^= bit;
        }
        sum += parity ? -1 : 1;
    }
    return static_cast<double>(sum) / shots;
}

} // namespace

// ---------------------------------------------------------------- gates

Gate Gate::u3(int q, double theta, double phi, double lambda) {
    Gate g;
    g.kind = GateKind::U3;
    g.targets = {q};
    g.p0 = theta;
    g.p1 = phi;
    g.p2 = lambda;
    return g;
}

Gate Gate::u1(int q, double lambda) {
    Gate g;
    g.kind = GateKind::U1;
    g.targets = {q};
    g.p0 = lambda;
    return g;
}

Gate Gate::u2(int q, double phi, double lambda) {
    Gate g;
    g.kind = GateKind::U2;
    g.targets = {q};
    g.p0 = phi;
    g.p1 = lambda;
    return g;
}

Gate Gate::cnot(int ctrl, int tgt) {
    Gate g;
    g.kind = GateKind::CNOT;
    g.targets = {ctrl, tgt};
    return g;
}

Gate Gate::fswap(int q0, int q1) {
    Gate g;
    g.kind = GateKind::FSWAP;
    g.targets = {q0, q1};
    return g;
}

Gate Gate::phase(double alpha) {
    Gate g;
    g.kind = GateKind::PHASE;
    g.p0 = alpha;
    return g;
}

Gate Gate::custom1(int q, const Mat2 &u, std::string label) {
    Gate g;
    g.kind = GateKind::CUSTOM1;
    g.targets = {q};
    g.m.setIdentity();
    g.m.topLeftCorner<2, 2>() = u;
    g.label = std::move(label);
    return g;
}

Gate Gate::custom2(int q0, int q1, const Mat4 &u, std::string label) {
    Gate g;
    g.kind = GateKind::CUSTOM2;
    g.targets = {q0, q1};
    g.m = u;
    g.label = std::move(label);
    return g;
}

int Gate::arity() const {
    switch (kind) {
    case GateKind::PHASE:
        return 0;
    case GateKind::CNOT:
    case GateKind::FSWAP:
    case GateKind::CUSTOM2:
        return 2;
    default:
        return 1;
    }
}

std::string Gate::name() const {
    switch (kind) {
    case GateKind::U3:
        return "U3";
    case GateKind::U1:
        return "U1";
    case GateKind::U2:
        return "U2";
    case GateKind::CNOT:
        return "CNOT";
    case GateKind::FSWAP:
        return "FSWAP";
    case GateKind::PHASE:
        return "PHASE";
    case GateKind::CUSTOM1:
        return "CUSTOM1";
    case GateKind::CUSTOM2:
        return "CUSTOM2";
    }
    return "?";
}

Mat2 u3_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Mat2 u;
    u << c, -std::exp(I1 * lambda) * s, std::exp(I1 * phi) * s, std::exp(I1 * (phi + lambda)) * c;
    return u;
}

Mat2 gate_matrix1(const Gate &g) {
    switch (g.kind) {
    case GateKind::U3:
        return u3_matrix(g.p0, g.p1, g.p2);
    case GateKind::U1:
        return u3_matrix(0, 0, g.p0);
    case GateKind::U2:
        return u3_matrix(std::numbers::pi / 2, g.p0, g.p1);
    case GateKind::CUSTOM1:
        return g.m.topLeftCorner<2, 2>();
    default:
        fail(ErrorCode::InvalidArgument, "gate_matrix1: not a single-qubit gate");
    }
}

Mat4 fswap_matrix() {
    Mat4 u = Mat4::Zero();
    u(0, 0) = 1;
    u(1, 2) = 1;
    u(2, 1) = 1;
    u(3, 3) = -1;
    return u;
}

Mat4 cnot_matrix() {
    // control = bit 0, target = bit 1: |1,b> -> |1,1-b>
    Mat4 u = Mat4::Zero();
    u(0, 0) = 1;
    u(2, 2) = 1;
    u(3, 1) = 1;
    u(1, 3) = 1;
    return u;
}

Mat4 gate_matrix2(const Gate &g) {
    switch (g.kind) {
    case GateKind::CNOT:
        return cnot_matrix();
    case GateKind::FSWAP:
        return fswap_matrix();
    case GateKind::CUSTOM2:
        return g.m;
    default:
        fail(ErrorCode::InvalidArgument, "gate_matrix2: not a two-qubit gate");
    }
}

double unitarity_error(const Eigen::MatrixXcd &u) {
    const Eigen::MatrixXcd d = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
    return d.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------- circuits

void Circuit::add(Gate g) { gates.push_back(std::move(g)); }

void Circuit::append(const Circuit &other, const std::vector<int> &wire_map) {
    require(static_cast<int>(wire_map.size()) == other.n_qubits, ErrorCode::InvalidArgument, "append: wire map size mismatch");
    for (Gate g : other.gates) {
        for (int &t : g.targets) t = wire_map[t];
        gates.push_back(std::move(g));
    }
}

void Circuit::append(const Circuit &other) {
    std::vector<int> id(other.n_qubits);
    for (int i = 0; i < other.n_qubits; ++i) id[i] = i;
    append(other, id);
}

Circuit Circuit::inverse() const {
    Circuit out(n_qubits);
    for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
        Gate g = *it;
        switch (g.kind) {
        case GateKind::U3:
            g = Gate::u3(g.targets[0], -it->p0, -it->p2, -it->p1);
            break;
        case GateKind::U1:
            g.p0 = -g.p0;
            break;
        case GateKind::U2:
            g = Gate::u3(g.targets[0], -std::numbers::pi / 2, -it->p1, -it->p0);
            break;
        case GateKind::PHASE:
            g.p0 = -g.p0;
            break;
        case GateKind::CUSTOM1:
        case GateKind::CUSTOM2:
            g.m = it->m.adjoint();
            break;
        case GateKind::CNOT:
        case GateKind::FSWAP:
            break;
        }
        g.label = it->label;
        out.gates.push_back(std::move(g));
    }
    return out;
}

std::size_t Circuit::count(GateKind k) const {
    return static_cast<std::size_t>(std::count_if(gates.begin(), gates.end(), [k](const Gate &g) { return g.kind == k; }));
}

std::size_t Circuit::two_qubit_count() const {
    return static_cast<std::size_t>(std::count_if(gates.begin(), gates.end(), [](const Gate &g) { return g.arity() == 2; }));
}

void Circuit::validate() const {
    require(n_qubits >= 0, ErrorCode::InvalidArgument, "negative qubit count");
    for (const Gate &g : gates) {
        require(static_cast<int>(g.targets.size()) == g.arity(), ErrorCode::InvalidArgument, "gate " + g.name() + ": wrong target count");
        for (int t : g.targets)
            require(t >= 0 && t < n_qubits, ErrorCode::InvalidArgument, "gate " + g.name() + ": target index out of range");
        if (g.arity() == 2) require(g.targets[0] != g.targets[1], ErrorCode::InvalidArgument, "two-qubit gate with identical targets");
        if (g.kind == GateKind::CUSTOM1)
            require(unitarity_error(g.m.topLeftCorner<2, 2>()) <= 1e-10, ErrorCode::InvalidArgument, "non-unitary CUSTOM1 matrix");
        if (g.kind == GateKind::CUSTOM2) require(unitarity_error(g.m) <= 1e-10, ErrorCode::InvalidArgument, "non-unitary CUSTOM2 matrix");
    }
}

Eigen::MatrixXcd circuit_unitary(const Circuit &c) {
    require(c.n_qubits <= 12, ErrorCode::InvalidArgument, "circuit_unitary: too many qubits");
    const std::uint64_t dim = 1ULL << c.n_qubits;
    Eigen::MatrixXcd u(dim, dim);
    for (std::uint64_t j = 0; j < dim; ++j) {
        StateVector s = StateVector::basis(c.n_qubits, j);
        s.run(c);
        for (std::uint64_t i = 0; i < dim; ++i) u(i, j) = s.amplitudes()[i];
    }
    return u;
}

PauliString parse_pauli(const std::string &s) {
    PauliString out;
    auto op_of = [](char c) {
        switch (c) {
        case 'X':
        case 'x':
            return Pauli::X;
        case 'Y':
        case 'y':
            return Pauli::Y;
        case 'Z':
        case 'z':
            return Pauli::Z;
        case 'I':
        case 'i':
            return Pauli::I;
        default:
            fail(ErrorCode::InvalidArgument, std::string("bad pauli letter '") + c + "'");
        }
    };
    if (s.find_first_of("0123456789") == std::string::npos) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == ' ') continue;
            const Pauli p = op_of(s[i]);
            if (p != Pauli::I) out[static_cast<int>(i)] = p;
        }
        return out;
    }
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        require(tok.size() >= 2, ErrorCode::InvalidArgument, "bad pauli token '" + tok + "'");
        const Pauli p = op_of(tok[0]);
        const int q = std::stoi(tok.substr(1));
        if (p != Pauli::I) out[q] = p;
    }
    return out;
}

void NoiseModel::validate() const {
    require(depol2 >= 0 && depol2 <= 1, ErrorCode::InvalidArgument, "depol2 must be in [0,1]");
    require(readout_flip >= 0 && readout_flip <= 1, ErrorCode::InvalidArgument, "readout_flip must be in [0,1]");
}

// ---------------------------------------------------------------- pure states

StateVector::StateVector(int n_qubits) : n_(n_qubits) {
    require(n_qubits >= 0 && n_qubits <= 30, ErrorCode::InvalidArgument, "qubit count out of range");
    amp_.assign(1ULL << n_qubits, cplx{0.0, 0.0});
    amp_[0] = 1.0;
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
    StateVector s(n_qubits);
    require(index < s.amp_.size(), ErrorCode::InvalidArgument, "basis index out of range");
    s.amp_[0] = 0.0;
    s.amp_[index] = 1.0;
    return s;
}

StateVector StateVector::from_amplitudes(std::vector<cplx> amps) {
    const auto n = std::countr_zero(amps.size());
    require(amps.size() == (1ULL << n), ErrorCode::InvalidArgument, "amplitude count must be a power of two");
    StateVector s(n);
    s.amp_ = std::move(amps);
    return s;
}

double StateVector::norm() const {
    double s = 0;
    for (const cplx &a : amp_) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::apply1(int q, const Mat2 &u) {
    require(q >= 0 && q < n_, ErrorCode::InvalidArgument, "target index out of range");
    kernel1(amp_, q, u);
}

void StateVector::apply2(int q0, int q1, const Mat4 &u) {
    require(q0 >= 0 && q0 < n_ && q1 >= 0 && q1 < n_, ErrorCode::InvalidArgument, "target index out of range");
    require(q0 != q1, ErrorCode::InvalidArgument, "two-qubit gate with identical targets");
    kernel2(amp_, q0, q1, u);
}

void StateVector::apply(const Gate &g) {
    require(static_cast<int>(g.targets.size()) == g.arity(), ErrorCode::InvalidArgument, "gate " + g.name() + ": wrong target count");
    if (g.kind == GateKind::CUSTOM1)
        require(unitarity_error(g.m.topLeftCorner<2, 2>()) <= 1e-10, ErrorCode::InvalidArgument, "non-unitary CUSTOM1 matrix");
    if (g.kind == GateKind::CUSTOM2) require(unitarity_error(g.m) <= 1e-10, ErrorCode::InvalidArgument, "non-unitary CUSTOM2 matrix");
    switch (g.arity()) {
    case 0: {
        const cplx ph = std::exp(I1 * g.p0);
        for (cplx &a : amp_) a *= ph;
        break;
    }
    case 1:
        apply1(g.targets[0], gate_matrix1(g));
        break;
    default:
        apply2(g.targets[0], g.targets[1], gate_matrix2(g));
    }
}

void StateVector::run(const Circuit &c) {
    require(c.n_qubits == n_, ErrorCode::InvalidArgument, "circuit/state qubit count mismatch");
    c.validate();
    for (const Gate &g : c.gates) apply(g);
}

cplx StateVector::expect_pauli_complex(const PauliString &p) const {
    const PauliMasks m = masks(p, n_);
    cplx s = 0;
    for (std::uint64_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i ^ m.x]) * pauli_phase(m, i) * amp_[i];
    return s;
}

double StateVector::expect_pauli(const PauliString &p) const { return expect_pauli_complex(p).real(); }

std::vector<double> StateVector::probabilities() const {
    std::vector<double> out(amp_.size());
    for (std::size_t i = 0; i < amp_.size(); ++i) out[i] = std::norm(amp_[i]);
    return out;
}

// ---------------------------------------------------------------- density matrices

DensityMatrix::DensityMatrix(int n_qubits) : n_(n_qubits) {
    require(n_qubits >= 0 && n_qubits <= kMaxDensityQubits, ErrorCode::InvalidArgument, "density-matrix mode supports at most 12 qubits");
    v_.assign(1ULL << (2 * n_qubits), cplx{0.0, 0.0});
    v_[0] = 1.0;
}

DensityMatrix::DensityMatrix(const StateVector &psi) : DensityMatrix(psi.n_qubits()) {
    const auto &a = psi.amplitudes();
    const std::uint64_t dim = a.size();
    for (std::uint64_t j = 0; j < dim; ++j)
        for (std::uint64_t i = 0; i < dim; ++i) v_[i | (j << n_)] = a[i] * std::conj(a[j]);
}

Eigen::MatrixXcd DensityMatrix::matrix() const {
    const std::uint64_t dim = 1ULL << n_;
    Eigen::MatrixXcd m(dim, dim);
    for (std::uint64_t j = 0; j < dim; ++j)
        for (std::uint64_t i = 0; i < dim; ++i) m(i, j) = v_[i | (j << n_)];
    return m;
}

double DensityMatrix::trace() const {
    double t = 0;
    for (std::uint64_t i = 0; i < (1ULL << n_); ++i) t += v_[i | (i << n_)].real();
    return t;
}

void DensityMatrix::apply1(int q, const Mat2 &u) {
    require(q >= 0 && q < n_, ErrorCode::InvalidArgument, "target index out of range");
    kernel1(v_, q, u);
    kernel1(v_, q + n_, u.conjugate());
}

void DensityMatrix::apply2(int q0, int q1, const Mat4 &u) {
    require(q0 >= 0 && q0 < n_ && q1 >= 0 && q1 < n_, ErrorCode::InvalidArgument, "target index out of range");
    require(q0 != q1, ErrorCode::InvalidArgument, "two-qubit gate with identical targets");
    kernel2(v_, q0, q1, u);
    kernel2(v_, q0 + n_, q1 + n_, u.conjugate());
}

void DensityMatrix::apply(const Gate &g) {
    require(static_cast<int>(g.targets.size()) == g.arity(), ErrorCode::InvalidArgument, "gate " + g.name() + ": wrong target count");
    switch (g.arity()) {
    case 0:
        break; // global phase cancels
    case 1:
        apply1(g.targets[0], gate_matrix1(g));
        break;
    default:
        apply2(g.targets[0], g.targets[1], gate_matrix2(g));
    }
}

void DensityMatrix::depolarize2(int a, int b, double p) {
    require(p >= 0 && p <= 1, ErrorCode::InvalidArgument, "depolarizing probability must be in [0,1]");
    require(a != b && a >= 0 && b >= 0 && a < n_ && b < n_, ErrorCode::InvalidArgument, "bad depolarizing targets");
    if (p == 0) return;
    const std::uint64_t ra = 1ULL << a, rb = 1ULL << b;
    const std::uint64_t ca = ra << n_, cb = rb << n_;
    const std::uint64_t all = ra | rb | ca | cb;
    const std::uint64_t sub[4] = {0, ra | ca, rb | cb, ra | rb | ca | cb};
    for (std::uint64_t base = 0; base < v_.size(); ++base) {
        if (base & all) continue;
        cplx t = 0;
        for (std::uint64_t s : sub) t += v_[base | s];
        // every element of the 16-element block shrinks; the diagonal (in a,b) ones gain the traced mass
        for (std::uint64_t x : std::array<std::uint64_t, 2>{0, ra}) {
            for (std::uint64_t y : std::array<std::uint64_t, 2>{0, rb}) {
                for (std::uint64_t xc : std::array<std::uint64_t, 2>{0, ca}) {
                    for (std::uint64_t yc : std::array<std::uint64_t, 2>{0, cb}) v_[base | x | y | xc | yc] *= (1.0 - p);
                }
            }
        }
        for (std::uint64_t s : sub) v_[base | s] += p * t / 4.0;
    }
}

void DensityMatrix::run(const Circuit &c, const NoiseModel &noise) {
    require(c.n_qubits == n_, ErrorCode::InvalidArgument, "circuit/state qubit count mismatch");
    c.validate();
    noise.validate();
    for (const Gate &g : c.gates) {
        apply(g);
        if (g.arity() == 2 && noise.depol2 > 0) depolarize2(g.targets[0], g.targets[1], noise.depol2);
    }
}

double DensityMatrix::expect_pauli(const PauliString &p) const {
    const PauliMasks m = masks(p, n_);
    cplx s = 0;
    for (std::uint64_t i = 0; i < (1ULL << n_); ++i) s += pauli_phase(m, i) * v_[i | ((i ^ m.x) << n_)];
    return s.real();
}

std::vector<double> DensityMatrix::probabilities() const {
    std::vector<double> out(1ULL << n_);
    for (std::uint64_t i = 0; i < out.size(); ++i) out[i] = v_[i | (i << n_)].real();
    return out;
}

// ---------------------------------------------------------------- sampling

double sample_pauli(const StateVector &psi, const PauliString &p, int shots, const NoiseModel &noise, std::uint64_t seed) {
    masks(p, psi.n_qubits());
    StateVector rot = psi;
    for (const auto &[q, op] : p)
        if (op == Pauli::X || op == Pauli::Y) rot.apply1(q, to_z_basis(op));
    return sample_from_probs(rot.probabilities(), p, shots, noise, seed);
}

double sample_pauli(const DensityMatrix &rho, const PauliString &p, int shots, const NoiseModel &noise, std::uint64_t seed) {
    masks(p, rho.n_qubits());
    DensityMatrix rot = rho;
    for (const auto &[q, op] : p)
        if (op == Pauli::X || op == Pauli::Y) rot.apply1(q, to_z_basis(op));
    return sample_from_probs(rot.probabilities(), p, shots, noise, seed);
}

Eigen::MatrixXcd apply_noise_channel(const Eigen::MatrixXcd &rho, int a, int b, double p) {
    const auto dim = static_cast<std::uint64_t>(rho.rows());
    require(rho.rows() == rho.cols() && dim > 1 && (dim & (dim - 1)) == 0, ErrorCode::InvalidArgument,
            "apply_noise_channel: density matrix must be square with power-of-two dimension");
    require(p >= 0 && p <= 1, ErrorCode::InvalidArgument, "depolarizing probability must be in [0,1]");
    const int n = std::countr_zero(dim);
    require(a != b && a >= 0 && b >= 0 && a < n && b < n, ErrorCode::InvalidArgument, "bad depolarizing targets");
    Eigen::MatrixXcd res = rho * (1.0 - p);
    const std::uint64_t ma = 1ULL << a, mb = 1ULL << b, m = ma | mb;
    const std::uint64_t sub[4] = {0, ma, mb, m};
    for (std::uint64_t j0 = 0; j0 < dim; ++j0) {
        if (j0 & m) continue;
        for (std::uint64_t i0 = 0; i0 < dim; ++i0) {
            if (i0 & m) continue;
            cplx t = 0;
            for (std::uint64_t s : sub) t += rho(i0 | s, j0 | s);
            for (std::uint64_t s : sub) res(i0 | s, j0 | s) += p * t / 4.0;
        }
    }
    return res;
}

} // namespace kq

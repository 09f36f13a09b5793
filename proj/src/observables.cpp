#include "kq/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "kq/rng.hpp"

namespace kq::obs {

namespace {

constexpr cplx I1{0.0, 1.0};

PauliString strip_identity(const PauliString &p) {
    PauliString out;
    for (const auto &[q, op] : p)
        if (op != Pauli::I) out[q] = op;
    return out;
}

std::uint64_t string_key(const PauliString &p) {
    std::uint64_t h = 0x84222325cbf29ce4ULL;
    for (const auto &[q, op] : p) h = CounterRng::mix(h ^ (static_cast<std::uint64_t>(q) * 4 + static_cast<std::uint64_t>(op)));
    return h;
}

template <class State> class ExactEstimator final : public PauliEstimator {
  public:
    explicit ExactEstimator(const State &s) : s_(s) {}
    [[nodiscard]] int n_qubits() const override { return s_.n_qubits(); }

  protected:
    double compute(const PauliString &p) override { return s_.expect_pauli(p); }

  private:
    State s_;
};

template <class State> class SamplingEstimator final : public PauliEstimator {
  public:
    SamplingEstimator(const State &s, int shots, const NoiseModel &noise, std::uint64_t seed) : s_(s), shots_(shots), noise_(noise), seed_(seed) {
        require(shots >= 1, ErrorCode::InvalidArgument, "shot count must be >= 1");
        noise.validate();
    }
    [[nodiscard]] int n_qubits() const override { return s_.n_qubits(); }
    [[nodiscard]] int shots() const override { return shots_; }

  protected:
    double compute(const PauliString &p) override { return sample_pauli(s_, p, shots_, noise_, CounterRng::mix(seed_ ^ string_key(p))); }

  private:
    State s_;
    int shots_;
    NoiseModel noise_;
    std::uint64_t seed_;
};

Pauli to_pauli(Axis a) { return a == Axis::X ? Pauli::X : Pauli::Y; }

} // namespace

double PauliEstimator::expect(const PauliString &p) {
    const PauliString key = strip_identity(p);
    for (const auto &[q, op] : key) require(q >= 0 && q < n_qubits(), ErrorCode::InvalidArgument, "Pauli string qubit out of range");
    if (key.empty()) return 1.0;
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const double v = compute(key);
    cache_.emplace(key, v);
    return v;
}

std::unique_ptr<PauliEstimator> exact_estimator(const StateVector &psi) { return std::make_unique<ExactEstimator<StateVector>>(psi); }
std::unique_ptr<PauliEstimator> exact_estimator(const DensityMatrix &rho) { return std::make_unique<ExactEstimator<DensityMatrix>>(rho); }
std::unique_ptr<PauliEstimator> sampling_estimator(const StateVector &psi, int shots, const NoiseModel &noise, std::uint64_t seed) {
    return std::make_unique<SamplingEstimator<StateVector>>(psi, shots, noise, seed);
}
std::unique_ptr<PauliEstimator> sampling_estimator(const DensityMatrix &rho, int shots, const NoiseModel &noise, std::uint64_t seed) {
    return std::make_unique<SamplingEstimator<DensityMatrix>>(rho, shots, noise, seed);
}

double string_correlator(PauliEstimator &est, int m, int n, Axis a, Axis b, const std::vector<int> &jw_order) {
    require(m != n, ErrorCode::InvalidArgument, "string_correlator: m and n must differ");
    require(m >= 0 && n >= 0 && m < static_cast<int>(jw_order.size()) && n < static_cast<int>(jw_order.size()), ErrorCode::InvalidArgument,
            "string_correlator: site outside the Jordan-Wigner order");
    require(m < n, ErrorCode::InvalidArgument, "string_correlator: requires m < n along the Jordan-Wigner order");
    PauliString p;
    p[jw_order[m]] = to_pauli(a);
    for (int j = m + 1; j < n; ++j) p[jw_order[j]] = Pauli::Z;
    p[jw_order[n]] = to_pauli(b);
    return est.expect(p);
}

FermionBilinears fermion_correlators(PauliEstimator &est, int m, int n, const std::vector<int> &jw_order) {
    FermionBilinears r;
    if (m == n) {
        require(m >= 0 && m < static_cast<int>(jw_order.size()), ErrorCode::InvalidArgument, "fermion_correlators: bad site");
        const double z = est.expect({{jw_order[m], Pauli::Z}});
        r.fdfd = r.ff = 0.0;
        r.fdf = (1.0 - z) / 2;
        r.ffd = (1.0 + z) / 2;
        return r;
    }
    const int lo = std::min(m, n), hi = std::max(m, n);
    const double xx = string_correlator(est, lo, hi, Axis::X, Axis::X, jw_order);
    const double xy = string_correlator(est, lo, hi, Axis::X, Axis::Y, jw_order);
    const double yx = string_correlator(est, lo, hi, Axis::Y, Axis::X, jw_order);
    const double yy = string_correlator(est, lo, hi, Axis::Y, Axis::Y, jw_order);
    // bilinears with the lower site first
    const cplx dd = 0.25 * (xx - I1 * xy - I1 * yx - yy);
    const cplx aa = -0.25 * (xx + I1 * xy + I1 * yx - yy);
    const cplx da = 0.25 * (xx + I1 * xy - I1 * yx + yy);
    const cplx ad = -0.25 * (xx - I1 * xy + I1 * yx + yy);
    if (m < n) return {dd, aa, da, ad};
    // swap the order: f_n^dag f_m^dag = -f_m^dag f_n^dag etc.; <f_m^dag f_n> = conj <f_n^dag f_m>
    return {-dd, -aa, std::conj(da), std::conj(ad)};
}

CorrelationMatrix correlation_from_bilinears(int n_modes, const std::function<FermionBilinears(int, int)> &bil) {
    CorrelationMatrix c(2 * n_modes, 2 * n_modes);
    for (int m = 0; m < n_modes; ++m) {
        for (int n = 0; n < n_modes; ++n) {
            const FermionBilinears b = bil(m, n);
            c(2 * m, 2 * n) = b.fdfd + b.ff + b.ffd + b.fdf;
            c(2 * m + 1, 2 * n + 1) = -b.fdfd - b.ff + b.ffd + b.fdf;
            c(2 * m, 2 * n + 1) = I1 * (b.fdfd - b.ff + b.ffd - b.fdf);
            c(2 * m + 1, 2 * n) = I1 * (b.fdfd - b.ff - b.ffd + b.fdf);
        }
    }
    c /= 2.0;
    return c;
}

CorrelationMatrix correlation_matrix(PauliEstimator &est, const std::vector<int> &subsystem, const std::vector<int> &jw_order) {
    require(!subsystem.empty(), ErrorCode::InvalidArgument, "subsystem must be nonempty");
    for (int s : subsystem)
        require(s >= 0 && s < static_cast<int>(jw_order.size()), ErrorCode::InvalidArgument, "subsystem site outside the system");
    const int nA = static_cast<int>(subsystem.size());
    CorrelationMatrix c = correlation_from_bilinears(nA, [&](int m, int n) { return fermion_correlators(est, subsystem[m], subsystem[n], jw_order); });
    return (c + c.adjoint()) / 2.0;
}

double spectrum_eps_for_shots(int shots) { return shots > 0 ? std::max(kSpectrumEps, 5.0 / std::sqrt(double(shots))) : kSpectrumEps; }

double entropy_from_spectrum(const std::vector<double> &lambda) {
    double s = 0;
    for (double l : lambda) {
        if (l > 0 && l < 1) s -= 0.5 * ((1 - l) * std::log(1 - l) + l * std::log(l));
    }
    return s;
}

EntanglementResult entanglement(const CorrelationMatrix &c, double eps) {
    require(c.rows() == c.cols() && c.rows() > 0, ErrorCode::InvalidArgument, "correlation matrix must be square and nonempty");
    const Eigen::MatrixXcd h = (c + c.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    EntanglementResult r;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = es.eigenvalues()(i);
        require(l >= -eps && l <= 1 + eps, ErrorCode::Invariant,
                "correlation-matrix eigenvalue " + std::to_string(l) + " outside [0,1] beyond tolerance " + std::to_string(eps));
        r.spectrum.push_back(std::clamp(l, 0.0, 1.0));
    }
    std::sort(r.spectrum.begin(), r.spectrum.end());
    r.entropy = entropy_from_spectrum(r.spectrum);
    return r;
}

namespace {

struct PauliTerm {
    PauliString string;
    Eigen::MatrixXcd op;
    double value = 0;
};

/// Every Pauli string on `qubits` (identity first) with its matrix and estimated expectation.
std::vector<PauliTerm> pauli_terms(PauliEstimator &est, const std::vector<int> &qubits) {
    const int m = static_cast<int>(qubits.size());
    require(m >= 1 && m <= 4, ErrorCode::InvalidArgument, "tomography supports 1 to 4 qubits");
    for (int q : qubits) require(q >= 0 && q < est.n_qubits(), ErrorCode::InvalidArgument, "tomography qubit out of range");
    std::array<Mat2, 4> pm;
    pm[0] = Mat2::Identity();
    pm[1] << 0, 1, 1, 0;
    pm[2] << 0, -I1, I1, 0;
    pm[3] << 1, 0, 0, -1;
    const int total = 1 << (2 * m);
    std::vector<PauliTerm> terms(total);
    for (int code = 0; code < total; ++code) {
        PauliTerm &t = terms[code];
        t.op = Eigen::MatrixXcd::Ones(1, 1);
        for (int i = 0; i < m; ++i) {
            const int c = (code >> (2 * i)) & 3;
            if (c) t.string[qubits[i]] = static_cast<Pauli>(c);
            // qubits[i] is bit i: it is the innermost (least significant) Kronecker factor for i = 0
            Eigen::MatrixXcd next(t.op.rows() * 2, t.op.cols() * 2);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) next.block(a * t.op.rows(), b * t.op.cols(), t.op.rows(), t.op.cols()) = pm[c](a, b) * t.op;
            t.op = next;
        }
        t.value = est.expect(t.string);
    }
    return terms;
}

} // namespace

Eigen::MatrixXcd tomography_linear(PauliEstimator &est, const std::vector<int> &qubits) {
    const std::vector<PauliTerm> terms = pauli_terms(est, qubits);
    const Eigen::Index dim = terms[0].op.rows();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (const PauliTerm &t : terms) rho += t.value * t.op;
    return rho / double(dim);
}

Eigen::MatrixXcd project_to_density_matrix(const Eigen::MatrixXcd &rho_in) {
    require(rho_in.rows() == rho_in.cols() && rho_in.rows() > 0, ErrorCode::InvalidArgument, "density matrix must be square");
    Eigen::MatrixXcd rho = (rho_in + rho_in.adjoint()) / 2.0;
    const double tr = rho.trace().real();
    require(std::abs(tr) > 1e-12, ErrorCode::InvalidArgument, "cannot normalize a traceless estimate");
    rho /= tr;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const int d = static_cast<int>(rho.rows());
    // eigenvalues ascending; zero the most negative ones while spreading their mass over the rest
    std::vector<double> mu(d);
    for (int i = 0; i < d; ++i) mu[i] = es.eigenvalues()(i);
    double acc = 0;
    int i = 0;
    while (i < d && mu[i] + acc / (d - i) < 0) {
        acc += mu[i];
        mu[i] = 0;
        ++i;
    }
    for (int j = i; j < d; ++j) mu[j] += acc / (d - i);
    Eigen::VectorXd lam(d);
    for (int j = 0; j < d; ++j) lam(j) = mu[j];
    Eigen::MatrixXcd out = es.eigenvectors() * lam.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    out = (out + out.adjoint()) / 2.0;
    return out / out.trace().real();
}

Eigen::MatrixXcd tomography_mle(PauliEstimator &est, const std::vector<int> &qubits) {
    if (est.shots() == 0) return project_to_density_matrix(tomography_linear(est, qubits));
    const std::vector<PauliTerm> terms = pauli_terms(est, qubits);
    const Eigen::Index dim = terms[0].op.rows();
    const double n_settings = static_cast<double>(terms.size() - 1);
    // each non-identity string P is a two-outcome measurement with projectors (1 +- P)/2
    std::vector<double> f_plus(terms.size());
    for (std::size_t k = 1; k < terms.size(); ++k) f_plus[k] = std::clamp((1 + terms[k].value) / 2, 0.0, 1.0);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(dim, dim) / double(dim);
    for (int it = 0; it < kMleMaxIterations; ++it) {
        // R = sum_k [f+/p+ (1+P)/2 + f-/p- (1-P)/2] / settings; fixed point R rho R = rho
        double c0 = 0;
        Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dim, dim);
        for (std::size_t k = 1; k < terms.size(); ++k) {
            const double e = rho.cwiseProduct(terms[k].op.transpose()).sum().real();
            const double pp = std::max((1 + e) / 2, 1e-300), pm = std::max((1 - e) / 2, 1e-300);
            const double ap = f_plus[k] / pp, am = (1 - f_plus[k]) / pm;
            c0 += (ap + am) / 2;
            r += ((ap - am) / 2) * terms[k].op;
        }
        r.diagonal().array() += c0;
        r /= n_settings;
        Eigen::MatrixXcd next = r * rho * r;
        next = (next + next.adjoint()) / 2.0;
        next /= next.trace().real();
        const double change = (next - rho).cwiseAbs().maxCoeff();
        rho = std::move(next);
        if (change < kMleTolerance) break;
    }
    return rho;
}

Eigen::MatrixXcd reduced_density_matrix(const StateVector &psi, const std::vector<int> &qubits) {
    const int n = psi.n_qubits(), m = static_cast<int>(qubits.size());
    require(m >= 1 && m <= 12, ErrorCode::InvalidArgument, "reduced_density_matrix: 1 to 12 qubits");
    std::uint64_t mask = 0;
    for (int q : qubits) {
        require(q >= 0 && q < n && !(mask >> q & 1), ErrorCode::InvalidArgument, "reduced_density_matrix: bad qubit list");
        mask |= 1ULL << q;
    }
    const int dim = 1 << m;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    const auto &a = psi.amplitudes();
    // group amplitudes by environment configuration
    std::map<std::uint64_t, std::vector<std::pair<int, cplx>>> env;
    for (std::uint64_t i = 0; i < a.size(); ++i) {
        if (a[i] == cplx(0)) continue;
        int sub = 0;
        for (int k = 0; k < m; ++k) sub |= static_cast<int>((i >> qubits[k]) & 1) << k;
        env[i & ~mask].emplace_back(sub, a[i]);
    }
    for (const auto &[e, v] : env)
        for (const auto &[r, x] : v)
            for (const auto &[c, y] : v) rho(r, c) += x * std::conj(y);
    return rho;
}

double entropy_from_density_matrix(const Eigen::MatrixXcd &rho) {
    require(rho.rows() == rho.cols() && rho.rows() > 0, ErrorCode::InvalidArgument, "density matrix must be square");
    require((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-8, ErrorCode::InvalidArgument, "density matrix must be Hermitian");
    require(std::abs(rho.trace() - 1.0) < 1e-8, ErrorCode::InvalidArgument, "density matrix must have unit trace");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((rho + rho.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    double s = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()(i);
        require(p >= -1e-8, ErrorCode::InvalidArgument, "density matrix is not positive semidefinite");
        if (p > 0) s -= p * std::log(p);
    }
    return s;
}

std::string matrix_to_csv(const Eigen::MatrixXcd &m) {
    std::ostringstream o;
    o << std::setprecision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) o << ',';
            o << m(r, c).real() << ',' << m(r, c).imag();
        }
        o << '\n';
    }
    return o.str();
}

std::string spectrum_to_csv(const std::vector<double> &lambda) {
    std::ostringstream o;
    o << std::setprecision(17) << "index,lambda\n";
    for (std::size_t i = 0; i < lambda.size(); ++i) o << i << ',' << lambda[i] << '\n';
    return o.str();
}

} // namespace kq::obs

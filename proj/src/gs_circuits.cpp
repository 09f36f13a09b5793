#include "kq/gs_circuits.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "kq/braid_gates.hpp"

namespace kq::gs {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n >= 1 && (n & (n - 1)) == 0; }

Gate pauli_x(int q) { return Gate::u3(q, kPi, 0.0, kPi); }
Gate pauli_y(int q) { return Gate::u3(q, kPi, kPi / 2, kPi / 2); }
Gate pauli_z(int q) { return Gate::u1(q, kPi); }

void fft(Circuit &c, int base, int M) {
    if (M == 1) return;
    const int h = M / 2;
    std::vector<int> lay(M), want;
    for (int i = 0; i < M; ++i) lay[i] = i;
    for (int i = 0; i < h; ++i) want.push_back(2 * i);
    for (int i = 0; i < h; ++i) want.push_back(2 * i + 1);
    permute_wires(c, lay, want, base);
    fft(c, base, h);
    fft(c, base + h, h);
    for (int n = 1; n < h; ++n) c.add(Gate::u1(base + h + n, 2 * kPi * n / M));
    // E_n -> label n, O_n -> label h + n; interleave, combine, restore natural order
    std::vector<int> eo(M), inter;
    for (int i = 0; i < M; ++i) eo[i] = i;
    for (int n = 0; n < h; ++n) {
        inter.push_back(n);
        inter.push_back(h + n);
    }
    permute_wires(c, eo, inter, base);
    for (int n = 0; n < h; ++n) c.add(Gate::custom2(base + 2 * n, base + 2 * n + 1, f_gate_matrix(), "F"));
    // wire 2n now holds y_n and wire 2n+1 holds y_{n+h}
    std::vector<int> out = inter, nat(M);
    for (int i = 0; i < M; ++i) nat[i] = i;
    permute_wires(c, out, nat, base);
}

/// Pairs (f_r, g_r), applies the bond braiding on each, and sorts the braid outputs onto site wires.
/// Wires: f_r = r, g_r = M + r. final_sites[r] = (site of output a_r, site of output b_r).
void braid_network(Circuit &c, int M, const Circuit &braid, const std::vector<std::pair<int, int>> &final_sites) {
    std::vector<int> lay(2 * M), paired;
    for (int i = 0; i < 2 * M; ++i) lay[i] = i;
    for (int r = 0; r < M; ++r) {
        paired.push_back(r);
        paired.push_back(M + r);
    }
    permute_wires(c, lay, paired);
    for (int r = 0; r < M; ++r) c.append(braid, {2 * r, 2 * r + 1});
    std::vector<int> outs(2 * M), target(2 * M, -1);
    for (int i = 0; i < 2 * M; ++i) outs[i] = i; // output a_r = 2r, b_r = 2r + 1
    for (int r = 0; r < M; ++r) {
        target[final_sites[r].first] = 2 * r;
        target[final_sites[r].second] = 2 * r + 1;
    }
    permute_wires(c, outs, target);
}

double theta_of(const model::ModeChain &mc, double k) { return mc.at(k).theta; }

int grid_steps(int N, double o) { return static_cast<int>(std::lround(o * N / (2 * kPi))); }

} // namespace

void PrepPlan::validate() const {
    params.validate();
    require(std::isfinite(dk), ErrorCode::InvalidArgument, "momentum shift must be finite");
    const int M = params.n_cells();
    if (enforce_ph || simplified) {
        require(is_pow2(M), ErrorCode::InvalidArgument, "number of unit cells must be a power of two for the Fourier network");
    } else {
        require(M >= 2 && is_pow2(M), ErrorCode::InvalidArgument, "cluster circuits need a power-of-two number (>= 2) of bond fermions");
        require(std::abs(dk) < 1e-12, ErrorCode::InvalidArgument, "the spin-cluster circuit uses the unshifted grid (dk = 0)");
    }
    require(wires.n_wires > 0, ErrorCode::InvalidArgument, "plan has no wire map (use make_plan)");
}

double integer_grid_offset(int n_cells, double dk) { return dk + kPi / n_cells; }

PrepPlan make_plan(const model::ModelParams &p, double dk, bool enforce_ph, bool simplified) {
    PrepPlan plan;
    plan.params = p;
    plan.dk = dk;
    plan.enforce_ph = enforce_ph;
    plan.simplified = simplified;
    p.validate();
    const int M = p.n_cells();
    WireMap &w = plan.wires;
    if (simplified) {
        w.n_wires = M;
        for (int i = 0; i < M; ++i) {
            w.bond.push_back(i);
            w.position.push_back(i);
        }
    } else if (enforce_ph) {
        w.n_wires = 2 * M;
        for (int i = 0; i < 2 * M; ++i) w.bond.push_back(i);
        for (int n = 0; n < M; ++n) w.position.push_back(2 * n);
    } else {
        w.n_wires = 2 * M;
        for (int r = 0; r < M; ++r) {
            w.bond.push_back(r);
            w.gauge.push_back(M + r);
        }
    }
    plan.validate();
    return plan;
}

Mat4 fock_gate_matrix(const Mat2 &v) {
    Mat4 m = Mat4::Zero();
    m(0, 0) = 1;
    m(1, 1) = v(0, 0);
    m(1, 2) = v(0, 1);
    m(2, 1) = v(1, 0);
    m(2, 2) = v(1, 1);
    m(3, 3) = v.determinant();
    return m;
}

Mat4 f_gate_matrix() {
    Mat2 h;
    h << 1, 1, 1, -1;
    return fock_gate_matrix(h / std::sqrt(2.0));
}

void permute_wires(Circuit &c, std::vector<int> &layout, const std::vector<int> &desired, int base) {
    require(layout.size() == desired.size(), ErrorCode::InvalidArgument, "permute_wires: size mismatch");
    std::map<int, int> pos;
    for (std::size_t i = 0; i < desired.size(); ++i) pos[desired[i]] = static_cast<int>(i);
    require(pos.size() == desired.size(), ErrorCode::InvalidArgument, "permute_wires: duplicate labels");
    for (int l : layout) require(pos.count(l) == 1, ErrorCode::InvalidArgument, "permute_wires: label sets differ");
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t p = 0; p + 1 < layout.size(); ++p) {
            if (pos[layout[p]] > pos[layout[p + 1]]) {
                c.add(Gate::fswap(base + static_cast<int>(p), base + static_cast<int>(p) + 1));
                std::swap(layout[p], layout[p + 1]);
                changed = true;
            }
        }
    }
}

Circuit fourier_network(int N, double offset) {
    require(is_pow2(N), ErrorCode::InvalidArgument, "fourier_network: N must be a power of two");
    require(std::isfinite(offset), ErrorCode::InvalidArgument, "fourier_network: offset must be finite");
    Circuit c(N);
    fft(c, 0, N);
    for (int n = 0; n < N; ++n) c.add(Gate::u1(n, offset * n));
    return c;
}

Mat4 bogoliubov_matrix(double theta, double phi) {
    require(std::isfinite(theta) && std::isfinite(phi), ErrorCode::InvalidArgument, "Bogoliubov angles must be finite");
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    const cplx e = std::exp(cplx(0, phi));
    Mat4 m = Mat4::Identity();
    m(0, 0) = c;
    m(3, 3) = c;
    m(3, 0) = e * s;
    m(0, 3) = -std::conj(e) * s;
    return m;
}

Circuit bogoliubov_block(double theta, double phi) {
    Circuit c(2);
    c.add(Gate::custom2(0, 1, bogoliubov_matrix(theta, phi), "BOG"));
    return c;
}

Circuit bond_fermion_state(const model::ModeChain &mc, int M, double dk) {
    require(M >= 2 && is_pow2(M), ErrorCode::InvalidArgument, "bond_fermion_state: M must be a power of two >= 2");
    require(std::abs(dk) < 1e-12, ErrorCode::InvalidArgument, "bond_fermion_state: the paired layout needs dk = 0");
    const std::vector<double> K = model::base_grid(M, dk);
    Circuit c(M);
    std::vector<int> lay;
    for (int p = 0; p < M / 2; ++p) {
        // (q0, q1) = (-k, k) with k = K_p
        lay.push_back(M - 1 - p);
        lay.push_back(p);
        c.add(Gate::custom2(2 * p, 2 * p + 1, bogoliubov_matrix(theta_of(mc, K[p])), "BOG"));
    }
    std::vector<int> nat(M);
    for (int i = 0; i < M; ++i) nat[i] = i;
    permute_wires(c, lay, nat);
    c.append(fourier_network(M, K[0]));
    return c;
}

Circuit prepare_ground_state(const PrepPlan &plan) {
    plan.validate();
    const model::ModelParams &p = plan.params;
    const int M = p.n_cells();
    const model::ModeChain mc = model::mode_chain(p);
    Circuit c(2 * M);
    std::vector<std::pair<int, int>> sites(M);
    std::vector<int> gauge_occupied;
    Circuit braid;
    if (p.lattice == model::Lattice::Chain1D) {
        const int ng = p.D == 1 ? 1 : 0;
        for (int r = 0; r < M; ++r) {
            sites[r] = {2 * r, 2 * r + 1};
            if (ng) gauge_occupied.push_back(M + r);
        }
        braid = braid::z_bond_braiding(ng).circuit;
    } else {
        require(p.D == 1, ErrorCode::InvalidArgument, "honeycomb cluster circuit is built for the D = +1 flux sector");
        // z pairs (black 2r, white (2r+5) mod 8); pairs whose white site precedes the black one along the
        // Jordan-Wigner loop take the opposite gauge occupation
        for (int r = 0; r < M; ++r) {
            sites[r] = {2 * r, (2 * r + 5) % (2 * M)};
            if (sites[r].second > sites[r].first) gauge_occupied.push_back(M + r);
        }
        braid = braid::honeycomb_bond_braiding(1).circuit;
    }
    for (int q : gauge_occupied) c.add(pauli_x(q));
    c.append(bond_fermion_state(mc, M, plan.dk));
    if (p.lattice == model::Lattice::Honeycomb) {
        // align the itinerant state with the reversed pairs: Z1 Z2, then gamma_5 gamma_7 ~ X2 Y3
        c.add(pauli_z(1));
        c.add(pauli_z(2));
        c.add(pauli_x(2));
        c.add(pauli_y(3));
    }
    braid_network(c, M, braid, sites);
    return c;
}

Circuit paired_copies_circuit(const std::function<cplx(double)> &f_minus, int N, double o, bool beam_splitter) {
    require(N >= 1 && (N & (N - 1)) == 0, ErrorCode::InvalidArgument, "paired copies need a power-of-two size");
    Circuit c(2 * N);
    // copy+ mode j (k = o + 2 pi j/N) on wire j, copy- mode j (k = -o + 2 pi j/N) on wire N + j
    std::vector<int> lab(2 * N), pairs;
    for (int i = 0; i < 2 * N; ++i) lab[i] = i;
    for (int j = 0; j < N; ++j) {
        pairs.push_back(j);
        pairs.push_back(N + (N - j) % N);
    }
    std::vector<int> cur = lab;
    permute_wires(c, cur, pairs);
    for (int j = 0; j < N; ++j) {
        // q1 carries -k_j of copy-
        const double k = o + 2 * kPi * j / N;
        const cplx f = f_minus(-k);
        const double theta = std::abs(f) <= model::kGapTol ? 0.0 : std::arg(f);
        c.add(Gate::custom2(2 * j, 2 * j + 1, bogoliubov_matrix(theta), "BOG"));
    }
    permute_wires(c, cur, lab);
    std::vector<int> plus(N), minus(N);
    for (int i = 0; i < N; ++i) {
        plus[i] = i;
        minus[i] = N + i;
    }
    c.append(fourier_network(N, o), plus);
    c.append(fourier_network(N, -o), minus);
    if (!beam_splitter) return c;
    std::vector<int> inter;
    for (int n = 0; n < N; ++n) {
        inter.push_back(n);
        inter.push_back(N + n);
    }
    permute_wires(c, cur, inter);
    for (int n = 0; n < N; ++n) c.add(Gate::custom2(2 * n, 2 * n + 1, f_gate_matrix(), "F"));
    return c;
}

Circuit symmetry_enforced_circuit(const PrepPlan &plan) {
    plan.validate();
    require(plan.enforce_ph, ErrorCode::InvalidArgument, "symmetry_enforced_circuit requires enforce_ph");
    const int N = plan.params.n_cells();
    require(plan.wires.n_wires == 2 * N, ErrorCode::InvalidArgument, "symmetry-enforced circuit needs two copies of N wires");
    const model::ModeChain mc = model::mode_chain(plan.params);
    return paired_copies_circuit([&](double k) { return mc.f(k); }, N, integer_grid_offset(N, plan.dk), true);
}

Circuit simplified_special_shift_circuit(const PrepPlan &plan) {
    plan.validate();
    const int N = plan.params.n_cells();
    const double frac = plan.dk * N / (2 * kPi) - 0.5;
    require(std::abs(frac - std::round(frac)) < 1e-9, ErrorCode::Precondition,
            "simplified circuit requires the special shift dk*N/(2pi) = 1/2");
    const model::ModeChain mc = model::mode_chain(plan.params);
    const double o = integer_grid_offset(N, plan.dk);
    const int s = grid_steps(N, o);
    double hs_gap = std::numeric_limits<double>::infinity();
    for (double k : {0.0, kPi}) hs_gap = std::min(hs_gap, mc.at(k).E);
    require(hs_gap <= 1e-9, ErrorCode::Precondition,
            "simplified circuit requires a vanishing gap at a high-symmetry momentum (min gap " + std::to_string(hs_gap) + ")");
    Circuit c(N);
    std::vector<int> lay(N), desired, selfc;
    for (int i = 0; i < N; ++i) lay[i] = i;
    std::vector<std::pair<int, int>> prs;
    for (int j = 0; j < N; ++j) {
        const int jp = ((-j - 2 * s) % N + N) % N; // k_{jp} = -k_j mod 2 pi
        if (jp == j) {
            const double k = o + 2 * kPi * j / N;
            require(std::abs(theta_of(mc, k)) < 1e-12, ErrorCode::Precondition,
                    "simplified circuit requires trivial Bogoliubov angles at the high-symmetry momenta");
            selfc.push_back(j);
        } else if (j < jp) {
            prs.emplace_back(jp, j);
        }
    }
    for (auto [a, b] : prs) {
        desired.push_back(a);
        desired.push_back(b);
    }
    for (int j : selfc) desired.push_back(j);
    std::vector<int> cur = lay;
    permute_wires(c, cur, desired);
    for (std::size_t i = 0; i < prs.size(); ++i) {
        const double k = o + 2 * kPi * prs[i].second / N;
        c.add(Gate::custom2(2 * static_cast<int>(i), 2 * static_cast<int>(i) + 1, bogoliubov_matrix(theta_of(mc, k)), "BOG"));
    }
    permute_wires(c, cur, lay);
    c.append(fourier_network(N, o));
    return c;
}

Circuit build_circuit(const PrepPlan &plan) {
    if (plan.simplified) return simplified_special_shift_circuit(plan);
    if (plan.enforce_ph) return symmetry_enforced_circuit(plan);
    return prepare_ground_state(plan);
}

nlohmann::json circuit_to_json(const Circuit &c) {
    nlohmann::json gates = nlohmann::json::array();
    for (const Gate &g : c.gates) {
        nlohmann::json j;
        j["name"] = g.name();
        j["targets"] = g.targets;
        switch (g.kind) {
        case GateKind::U3:
            j["params"] = {g.p0, g.p1, g.p2};
            break;
        case GateKind::U2:
            j["params"] = {g.p0, g.p1};
            break;
        case GateKind::U1:
        case GateKind::PHASE:
            j["params"] = {g.p0};
            break;
        default:
            j["params"] = nlohmann::json::array();
        }
        if (g.kind == GateKind::CUSTOM1 || g.kind == GateKind::CUSTOM2) {
            const int d = g.kind == GateKind::CUSTOM1 ? 2 : 4;
            nlohmann::json m = nlohmann::json::array();
            for (int r = 0; r < d; ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (int q = 0; q < d; ++q) row.push_back({g.m(r, q).real(), g.m(r, q).imag()});
                m.push_back(row);
            }
            j["matrix"] = m;
        }
        if (!g.label.empty()) j["label"] = g.label;
        gates.push_back(j);
    }
    return {{"format", "kq-circuit"}, {"version", 1}, {"n_qubits", c.n_qubits}, {"gates", gates}};
}

Circuit circuit_from_json(const nlohmann::json &j) {
    try {
        Circuit c(j.at("n_qubits").get<int>());
        for (const auto &g : j.at("gates")) {
            const std::string name = g.at("name").get<std::string>();
            const auto t = g.at("targets").get<std::vector<int>>();
            const auto p = g.value("params", std::vector<double>{});
            const std::string label = g.value("label", std::string{});
            auto need = [&](std::size_t nt, std::size_t np) {
                require(t.size() == nt && p.size() >= np, ErrorCode::InvalidArgument, "malformed gate " + name);
            };
            Gate out;
            if (name == "U3") {
                need(1, 3);
                out = Gate::u3(t[0], p[0], p[1], p[2]);
            } else if (name == "U2") {
                need(1, 2);
                out = Gate::u2(t[0], p[0], p[1]);
            } else if (name == "U1") {
                need(1, 1);
                out = Gate::u1(t[0], p[0]);
            } else if (name == "PHASE") {
                need(0, 1);
                out = Gate::phase(p[0]);
            } else if (name == "CNOT") {
                need(2, 0);
                out = Gate::cnot(t[0], t[1]);
            } else if (name == "FSWAP") {
                need(2, 0);
                out = Gate::fswap(t[0], t[1]);
            } else if (name == "CUSTOM1" || name == "CUSTOM2") {
                const int d = name == "CUSTOM1" ? 2 : 4;
                need(static_cast<std::size_t>(d / 2), 0);
                Mat4 m = Mat4::Identity();
                const auto &rows = g.at("matrix");
                require(static_cast<int>(rows.size()) == d, ErrorCode::InvalidArgument, "malformed gate matrix");
                for (int r = 0; r < d; ++r)
                    for (int q = 0; q < d; ++q) m(r, q) = cplx(rows[r][q][0].get<double>(), rows[r][q][1].get<double>());
                out = d == 2 ? Gate::custom1(t[0], m.topLeftCorner<2, 2>(), label) : Gate::custom2(t[0], t[1], m, label);
            } else {
                fail(ErrorCode::InvalidArgument, "unknown gate name '" + name + "'");
            }
            out.label = label;
            c.add(out);
        }
        c.validate();
        return c;
    } catch (const nlohmann::json::exception &e) {
        fail(ErrorCode::InvalidArgument, std::string("malformed circuit JSON: ") + e.what());
    }
}

} // namespace kq::gs

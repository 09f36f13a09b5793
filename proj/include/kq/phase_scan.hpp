#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "kq/boundary.hpp"
#include "kq/observables.hpp"
#include "kq/sv_core.hpp"

namespace kq::scan {

enum class Lattice { Chain, Honeycomb };
enum class Backend { Exact, Shots, Noisy };
/// correlation: bond-fermion correlation matrix of symmetry-enforced circuits;
/// tomography: reduced density matrix of the physical spin-cluster circuit.
enum class Method { Correlation, Tomography };
enum class DkPolicy { Special, Fixed, Sweep };

struct Grid {
    std::string param; ///< "Jx", "Jy" or "Jz"
    double start = 0, stop = 0, step = 0.1;
    [[nodiscard]] std::vector<double> values() const;
};

/// One-document run description; schema documented in the README.
struct SweepConfig {
    Lattice lattice = Lattice::Chain;
    /// chain: unit cells N (2N sites, 2N circuit wires); honeycomb: linear size L of the L x L torus
    /// (correlation method) or 2 for the 8-site cluster (tomography method).
    int size = 4;
    double Jx = 0, Jy = 0, Jz = 1;
    Grid sweep;
    bool has_rows = false;
    Grid rows; ///< second axis for phase diagrams
    DkPolicy dk_policy = DkPolicy::Special;
    double dk = 0;       ///< Fixed policy: shift of the half-integer grid
    int dk_points = 32;  ///< Sweep policy: uniform offsets in [0, 2 pi)
    Method method = Method::Correlation;
    std::vector<int> subsystem; ///< bond-fermion positions (correlation) or qubits (tomography); empty = default
    Backend backend = Backend::Exact;
    int shots = 8196;
    std::uint64_t seed = 1;
    NoiseModel noise;
    double flag_factor = kDefaultFlagFactor;
    int threads = 0; ///< 0 = hardware concurrency
    std::string prefix = "run";

    /// Throws Error(Config) naming the offending field.
    void validate() const;
    [[nodiscard]] std::vector<int> effective_subsystem() const;
    [[nodiscard]] double point_dk() const; ///< half-integer-grid shift used by sweeps
};

/// Parses a JSON config; syntax and field errors raise Error(Config) with "line L: field: message".
SweepConfig parse_config(const std::string &text);
SweepConfig load_config(const std::string &path);
Backend parse_backend(const std::string &name);
const char *backend_name(Backend b);

struct Measurement {
    double S = 0;
    double S_exact = 0;
    std::vector<double> spectrum;
    std::vector<obs::CorrelationMatrix> matrices; ///< one per momentum group (honeycomb) or one (chain)
};

/// Prepares and measures one grid point; `seed` feeds every sampling stream of the point.
Measurement measure_point(const SweepConfig &cfg, double Jx, double Jy, double Jz, double dk, std::uint64_t seed);

/// Circuit prepared at one grid point (the ky = 0 group for honeycomb correlation runs).
Circuit point_circuit(const SweepConfig &cfg, double Jx, double Jy, double Jz, double dk);

/// Seed of grid point `index` derived from the run seed.
std::uint64_t point_seed(std::uint64_t seed, std::uint64_t index);

struct PointResult {
    double x = 0, Jx = 0, Jy = 0, Jz = 0, dk = 0;
    Measurement m;
};

struct SweepResult {
    std::vector<PointResult> points;
    bool evaluated = false; ///< boundary detection needs at least three points
    BoundaryEstimate boundary;
};

SweepResult run_sweep(const SweepConfig &cfg);

/// Gap-closure values of the swept coupling with the other two held fixed.
std::vector<double> oracle_boundaries(Lattice lat, const std::string &param, double Jx, double Jy, double Jz);

struct DiagramRow {
    double value = 0;
    SweepResult sweep;
    std::vector<double> oracle;
};

struct DiagramResult {
    std::vector<DiagramRow> rows;
};

DiagramResult phase_diagram(const SweepConfig &cfg);

struct SpectrumPoint {
    double o = 0, dk = 0;
    double S = 0;
    std::vector<double> lambda, lambda_oracle;
    obs::CorrelationMatrix C;
};

struct SpectrumResult {
    std::vector<SpectrumPoint> points;
    double max_oracle_deviation = 0;
};

/// Chain entanglement spectrum versus the integer-grid offset o = 2 pi i / points.
SpectrumResult spectrum_sweep(const SweepConfig &cfg);

struct Check {
    std::string name;
    double value = 0, tol = 0;
    bool pass = false;
};

/// Oracle-equivalence suite: circuit energies vs exact diagonalization, circuit correlation matrices vs
/// momentum sums, real-space BdG vs momentum sums, reduced vs full special-shift circuits.
std::vector<Check> verify_suite();

// Versioned CSV tables; the first line is "# kq-<kind> v<version>".
constexpr int kCsvVersion = 1;
std::string sweep_csv(const SweepConfig &cfg, const SweepResult &r);
std::string boundary_csv(const SweepConfig &cfg, const SweepResult &r);
std::string diagram_csv(const SweepConfig &cfg, const DiagramResult &d);
std::string diagram_grid_csv(const SweepConfig &cfg, const DiagramResult &d);
std::string spectrum_csv(const SpectrumResult &s);
/// Matrix entries per grid point; kind "correlation" (Majorana correlation matrices) or "density" (tomography).
std::string correlation_csv(const std::vector<std::pair<double, std::vector<obs::CorrelationMatrix>>> &mats,
                            const std::string &kind = "correlation");
std::string verify_report(const std::vector<Check> &checks);

/// SVG chart of a table written by one of the functions above.
std::string plot_svg(const std::string &csv);

} // namespace kq::scan

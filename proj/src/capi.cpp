#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kq/error.hpp"
#include "kq/gs_circuits.hpp"
#include "kq/phase_scan.hpp"
#include "kq_capi.h"

struct kq_config {
    kq::scan::SweepConfig cfg;
};

struct kq_result {
    std::vector<std::pair<std::string, std::string>> artifacts;
    std::string summary;
};

namespace {

thread_local std::string g_last_error;

kq_status to_status(kq::ErrorCode c) {
    switch (c) {
    case kq::ErrorCode::Ok:
        return KQ_OK;
    case kq::ErrorCode::InvalidArgument:
        return KQ_INVALID_ARGUMENT;
    case kq::ErrorCode::Config:
        return KQ_CONFIG_ERROR;
    case kq::ErrorCode::Invariant:
        return KQ_INVARIANT_VIOLATION;
    case kq::ErrorCode::Precondition:
        return KQ_PRECONDITION;
    }
    return KQ_INTERNAL_ERROR;
}

template <class F> kq_status guarded(F &&f) {
    g_last_error.clear();
    try {
        return f();
    } catch (const kq::Error &e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return KQ_INTERNAL_ERROR;
    } catch (...) {
        g_last_error = "unknown error";
        return KQ_INTERNAL_ERROR;
    }
}

kq_status null_arg(const char *what) {
    g_last_error = std::string(what) + " must not be NULL";
    return KQ_INVALID_ARGUMENT;
}

char *dup_string(const std::string &s) {
    char *p = new char[s.size() + 1];
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

std::string fmt(double v) {
    std::ostringstream o;
    o.imbue(std::locale::classic());
    o.precision(6);
    o << v;
    return o.str();
}

std::string boundary_summary(const kq::scan::SweepResult &r) {
    if (!r.evaluated) return "boundary: not evaluated (fewer than three grid points)";
    const auto &b = r.boundary;
    return std::string("boundary: ") + (b.found ? "found" : "not flagged") + " at " + fmt(b.boundary) + " (jump " + fmt(b.jump) + ", median step " + fmt(b.median) + ")";
}

void run_sweep(const kq::scan::SweepConfig &c, kq_result &res) {
    using namespace kq::scan;
    const SweepResult r = run_sweep(c);
    std::vector<std::pair<double, std::vector<kq::obs::CorrelationMatrix>>> mats;
    for (const PointResult &p : r.points) mats.emplace_back(p.x, p.m.matrices);
    res.artifacts.emplace_back(c.prefix + "_sweep.csv", sweep_csv(c, r));
    res.artifacts.emplace_back(c.prefix + "_boundary.csv", boundary_csv(c, r));
    const bool tomo = c.method == Method::Tomography;
    res.artifacts.emplace_back(c.prefix + (tomo ? "_density.csv" : "_correlation.csv"), correlation_csv(mats, tomo ? "density" : "correlation"));
    const PointResult &p0 = r.points.front();
    res.artifacts.emplace_back(c.prefix + "_circuit.json", kq::gs::circuit_to_json(point_circuit(c, p0.Jx, p0.Jy, p0.Jz, p0.dk)).dump(1) + "\n");
    std::ostringstream s;
    s << "sweep: " << r.points.size() << " points over " << c.sweep.param << " (backend " << backend_name(c.backend) << ")\n" << boundary_summary(r) << '\n';
    const auto orc = oracle_boundaries(c.lattice, c.sweep.param, c.Jx, c.Jy, c.Jz);
    if (!orc.empty()) {
        s << "exact gap closure:";
        for (double v : orc) s << ' ' << fmt(v);
        s << '\n';
    }
    res.summary = s.str();
}

void run_diagram(const kq::scan::SweepConfig &c, kq_result &res) {
    using namespace kq::scan;
    const DiagramResult d = phase_diagram(c);
    res.artifacts.emplace_back(c.prefix + "_diagram.csv", diagram_csv(c, d));
    res.artifacts.emplace_back(c.prefix + "_diagram_grid.csv", diagram_grid_csv(c, d));
    std::ostringstream s;
    s << "diagram: " << d.rows.size() << " rows over " << c.rows.param << " x " << c.sweep.values().size() << " points over " << c.sweep.param << '\n';
    for (const DiagramRow &row : d.rows) {
        s << "  " << c.rows.param << "=" << fmt(row.value) << "  " << boundary_summary(row.sweep);
        if (!row.oracle.empty()) {
            s << "  exact:";
            for (double v : row.oracle) s << ' ' << fmt(v);
        }
        s << '\n';
    }
    res.summary = s.str();
}

void run_spectrum(const kq::scan::SweepConfig &c, kq_result &res) {
    using namespace kq::scan;
    const SpectrumResult sp = spectrum_sweep(c);
    std::vector<std::pair<double, std::vector<kq::obs::CorrelationMatrix>>> mats;
    double gap = 1.0;
    for (const SpectrumPoint &p : sp.points) {
        mats.emplace_back(p.o, std::vector<kq::obs::CorrelationMatrix>{p.C});
        for (double l : p.lambda) gap = std::min(gap, std::abs(l - 0.5));
    }
    res.artifacts.emplace_back(c.prefix + "_spectrum.csv", spectrum_csv(sp));
    res.artifacts.emplace_back(c.prefix + "_correlation.csv", correlation_csv(mats));
    res.summary = "spectrum: " + std::to_string(sp.points.size()) + " offsets, min |lambda - 1/2| = " + fmt(gap) +
                  ", max deviation from exact spectrum = " + fmt(sp.max_oracle_deviation) + "\n";
}

} // namespace

extern "C" {

const char *kq_version(void) { return "1.0.0"; }

const char *kq_last_error(void) { return g_last_error.c_str(); }

kq_status kq_config_load_file(const char *path, kq_config **out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        auto c = std::make_unique<kq_config>();
        c->cfg = kq::scan::load_config(path);
        *out = c.release();
        return KQ_OK;
    });
}

kq_status kq_config_load_string(const char *json, kq_config **out) {
    if (!json) return null_arg("json");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        auto c = std::make_unique<kq_config>();
        c->cfg = kq::scan::parse_config(json);
        *out = c.release();
        return KQ_OK;
    });
}

kq_status kq_config_set_backend(kq_config *cfg, const char *name) {
    if (!cfg) return null_arg("cfg");
    if (!name) return null_arg("name");
    return guarded([&] {
        kq::scan::SweepConfig c = cfg->cfg;
        c.backend = kq::scan::parse_backend(name);
        c.validate();
        cfg->cfg = c;
        return KQ_OK;
    });
}

kq_status kq_config_set_shots(kq_config *cfg, int shots) {
    if (!cfg) return null_arg("cfg");
    return guarded([&] {
        kq::require(shots >= 1, kq::ErrorCode::Config, "shots: must be >= 1");
        cfg->cfg.shots = shots;
        return KQ_OK;
    });
}

kq_status kq_config_set_seed(kq_config *cfg, uint64_t seed) {
    if (!cfg) return null_arg("cfg");
    cfg->cfg.seed = seed;
    g_last_error.clear();
    return KQ_OK;
}

kq_status kq_config_set_threads(kq_config *cfg, int threads) {
    if (!cfg) return null_arg("cfg");
    return guarded([&] {
        kq::require(threads >= 0, kq::ErrorCode::Config, "threads: must be >= 0");
        cfg->cfg.threads = threads;
        return KQ_OK;
    });
}

const char *kq_config_prefix(const kq_config *cfg) { return cfg ? cfg->cfg.prefix.c_str() : ""; }

void kq_config_free(kq_config *cfg) { delete cfg; }

kq_status kq_run(const kq_config *cfg, const char *command, kq_result **out) {
    if (!command) return null_arg("command");
    if (!out) return null_arg("out");
    *out = nullptr;
    const std::string cmd = command;
    if (cmd != "verify" && !cfg) return null_arg("cfg");
    return guarded([&] {
        auto res = std::make_unique<kq_result>();
        kq_status st = KQ_OK;
        if (cmd == "sweep") run_sweep(cfg->cfg, *res);
        else if (cmd == "diagram") run_diagram(cfg->cfg, *res);
        else if (cmd == "spectrum") run_spectrum(cfg->cfg, *res);
        else if (cmd == "verify") {
            const auto checks = kq::scan::verify_suite();
            res->summary = kq::scan::verify_report(checks);
            res->artifacts.emplace_back(std::string(cfg ? cfg->cfg.prefix : "run") + "_verify.txt", res->summary);
            for (const auto &c : checks)
                if (!c.pass) st = KQ_INVARIANT_VIOLATION;
            if (st != KQ_OK) g_last_error = "oracle-equivalence suite reported a violation";
        } else {
            kq::fail(kq::ErrorCode::InvalidArgument, "unknown command '" + cmd + "'");
        }
        *out = res.release();
        return st;
    });
}

size_t kq_result_artifact_count(const kq_result *res) { return res ? res->artifacts.size() : 0; }

const char *kq_result_artifact_name(const kq_result *res, size_t i) { return res && i < res->artifacts.size() ? res->artifacts[i].first.c_str() : nullptr; }

const char *kq_result_artifact_data(const kq_result *res, size_t i) { return res && i < res->artifacts.size() ? res->artifacts[i].second.c_str() : nullptr; }

const char *kq_result_summary(const kq_result *res) { return res ? res->summary.c_str() : ""; }

void kq_result_free(kq_result *res) { delete res; }

kq_status kq_plot_svg(const char *csv, char **svg_out) {
    if (!csv) return null_arg("csv");
    if (!svg_out) return null_arg("svg_out");
    *svg_out = nullptr;
    return guarded([&] {
        *svg_out = dup_string(kq::scan::plot_svg(csv));
        return KQ_OK;
    });
}

kq_status kq_circuit_json(const char *lattice, int n_sites, double jx, double jy, double jz, int enforce_ph, double dk, char **json_out) {
    if (!lattice) return null_arg("lattice");
    if (!json_out) return null_arg("json_out");
    *json_out = nullptr;
    return guarded([&] {
        const std::string lat = lattice;
        kq::model::ModelParams p;
        if (lat == "chain") p = kq::model::ModelParams::chain(n_sites, jx, jz);
        else if (lat == "honeycomb") {
            kq::require(n_sites == 8, kq::ErrorCode::InvalidArgument, "honeycomb circuits are defined for the 8-site cluster");
            p = kq::model::ModelParams::honeycomb(2, 2, jx, jy, jz);
        } else kq::fail(kq::ErrorCode::InvalidArgument, "unknown lattice '" + lat + "'");
        const kq::gs::PrepPlan plan = kq::gs::make_plan(p, enforce_ph ? dk : 0.0, enforce_ph != 0);
        *json_out = dup_string(kq::gs::circuit_to_json(kq::gs::build_circuit(plan)).dump(1) + "\n");
        return KQ_OK;
    });
}

void kq_string_free(char *s) { delete[] s; }

} // extern "C"

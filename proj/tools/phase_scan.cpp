#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kq_capi.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitFailure = 1;

int exit_code(kq_status st) {
    switch (st) {
    case KQ_OK:
        return 0;
    case KQ_CONFIG_ERROR:
        return 2;
    case KQ_INVARIANT_VIOLATION:
        return 3;
    default:
        return kExitFailure;
    }
}

int report(kq_status st) {
    std::cerr << "phase_scan: " << kq_last_error() << '\n';
    return exit_code(st);
}

bool write_file(const fs::path &p, const std::string &data) {
    std::ofstream out(p, std::ios::binary);
    out << data;
    return static_cast<bool>(out);
}

struct Options {
    std::string config;
    std::string backend;
    int shots = 8196;
    bool shots_given = false;
    long long seed = -1;
    int threads = -1;
    std::string out = "out";
    std::vector<std::string> inputs;
};

int run_command(const std::string &cmd, const Options &o) {
    kq_config *cfg = nullptr;
    if (!o.config.empty()) {
        if (kq_status st = kq_config_load_file(o.config.c_str(), &cfg); st != KQ_OK) return report(st);
    } else if (cmd != "verify") {
        std::cerr << "phase_scan: " << cmd << " requires --config\n";
        return 2;
    }
    auto done = [&](int code) {
        kq_config_free(cfg);
        return code;
    };
    if (cfg) {
        if (!o.backend.empty())
            if (kq_status st = kq_config_set_backend(cfg, o.backend.c_str()); st != KQ_OK) return done(report(st));
        if (o.shots_given)
            if (kq_status st = kq_config_set_shots(cfg, o.shots); st != KQ_OK) return done(report(st));
        if (o.seed >= 0) kq_config_set_seed(cfg, static_cast<uint64_t>(o.seed));
        if (o.threads >= 0)
            if (kq_status st = kq_config_set_threads(cfg, o.threads); st != KQ_OK) return done(report(st));
    }
    kq_result *res = nullptr;
    const kq_status st = kq_run(cfg, cmd.c_str(), &res);
    if (!res) return done(report(st));
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) {
        std::cerr << "phase_scan: cannot create output directory " << o.out << ": " << ec.message() << '\n';
        kq_result_free(res);
        return done(kExitFailure);
    }
    int code = exit_code(st);
    for (size_t i = 0; i < kq_result_artifact_count(res); ++i) {
        const fs::path p = fs::path(o.out) / kq_result_artifact_name(res, i);
        if (!write_file(p, kq_result_artifact_data(res, i))) {
            std::cerr << "phase_scan: cannot write " << p << '\n';
            code = kExitFailure;
        } else {
            std::cout << "wrote " << p.string() << '\n';
        }
    }
    std::cout << kq_result_summary(res);
    if (st != KQ_OK) std::cerr << "phase_scan: " << kq_last_error() << '\n';
    kq_result_free(res);
    return done(code);
}

int run_plot(const Options &o) {
    std::vector<fs::path> inputs(o.inputs.begin(), o.inputs.end());
    if (inputs.empty()) {
        if (o.config.empty()) {
            std::cerr << "phase_scan: plot needs CSV inputs or --config\n";
            return 2;
        }
        kq_config *cfg = nullptr;
        if (kq_status st = kq_config_load_file(o.config.c_str(), &cfg); st != KQ_OK) return report(st);
        const std::string prefix = kq_config_prefix(cfg);
        kq_config_free(cfg);
        for (const char *suffix : {"_sweep.csv", "_diagram.csv", "_diagram_grid.csv", "_spectrum.csv"}) {
            const fs::path p = fs::path(o.out) / (prefix + suffix);
            if (fs::exists(p)) inputs.push_back(p);
        }
        if (inputs.empty()) {
            std::cerr << "phase_scan: no tables with prefix '" << prefix << "' in " << o.out << '\n';
            return kExitFailure;
        }
    }
    std::error_code ec;
    fs::create_directories(o.out, ec);
    for (const fs::path &in : inputs) {
        std::ifstream f(in, std::ios::binary);
        if (!f) {
            std::cerr << "phase_scan: cannot read " << in << '\n';
            return kExitFailure;
        }
        std::ostringstream ss;
        ss << f.rdbuf();
        char *svg = nullptr;
        if (kq_status st = kq_plot_svg(ss.str().c_str(), &svg); st != KQ_OK) {
            std::cerr << in.string() << ": ";
            return report(st);
        }
        const fs::path outp = fs::path(o.out) / in.filename().replace_extension(".svg");
        const bool ok = write_file(outp, svg);
        kq_string_free(svg);
        if (!ok) {
            std::cerr << "phase_scan: cannot write " << outp << '\n';
            return kExitFailure;
        }
        std::cout << "wrote " << outp.string() << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Kitaev-model phase scans: sweeps, phase diagrams, entanglement spectra, oracle verification, plots"};
    app.set_version_flag("--version", std::string(kq_version()));
    app.require_subcommand(1);
    Options o;
    auto add_common = [&](CLI::App *sc, bool config_required) {
        auto *c = sc->add_option("--config", o.config, "JSON run configuration");
        if (config_required) c->required()->check(CLI::ExistingFile);
        sc->add_option("--backend", o.backend, "exact | shots | noisy (overrides the config)")->check(CLI::IsMember({"exact", "shots", "noisy"}));
        sc->add_option("--shots", o.shots, "shots per Pauli string")->default_val(8196)->check(CLI::PositiveNumber);
        sc->add_option("--seed", o.seed, "base seed (overrides the config)")->check(CLI::NonNegativeNumber);
        sc->add_option("--threads", o.threads, "worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
        sc->add_option("--out", o.out, "output directory")->default_val("out");
    };
    auto *sweep = app.add_subcommand("sweep", "entropy along one coupling with boundary detection");
    auto *diagram = app.add_subcommand("diagram", "boundary per row of a two-coupling grid");
    auto *spectrum = app.add_subcommand("spectrum", "entanglement spectrum versus momentum offset");
    auto *verify = app.add_subcommand("verify", "oracle-equivalence suite");
    auto *plot = app.add_subcommand("plot", "SVG charts from CSV tables");
    for (auto *sc : {sweep, diagram, spectrum}) add_common(sc, true);
    add_common(verify, false);
    plot->add_option("--config", o.config, "config whose output prefix selects the tables in --out");
    plot->add_option("--out", o.out, "directory for the SVG files (and tables when --config is used)")->default_val("out");
    plot->add_option("inputs", o.inputs, "CSV tables to plot");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    for (auto *sc : {sweep, diagram, spectrum, verify})
        if (sc->parsed()) {
            o.shots_given = sc->count("--shots") > 0;
            return run_command(sc->get_name(), o);
        }
    return run_plot(o);
}

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "kq/error.hpp"
#include "kq/phase_scan.hpp"

namespace kq::scan {

namespace {

using nlohmann::json;

int line_at(const std::string &text, std::size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

/// Locates a dotted field path in the source text by successive key searches.
class Locator {
  public:
    explicit Locator(const std::string &text) : text_(text) {}

    [[noreturn]] void error(const std::string &path, const std::string &msg) const {
        std::size_t pos = 0;
        bool found = true;
        std::istringstream parts(path);
        std::string key;
        while (std::getline(parts, key, '.')) {
            const std::size_t p = text_.find("\"" + key + "\"", pos);
            if (p == std::string::npos) {
                found = false;
                break;
            }
            pos = p;
        }
        const std::string where = found ? "line " + std::to_string(line_at(text_, pos)) : "config";
        fail(ErrorCode::Config, where + ": " + path + ": " + msg);
    }

  private:
    const std::string &text_;
};

void check_keys(const Locator &loc, const json &obj, const std::string &path, const std::set<std::string> &allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) loc.error(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
}

double get_number(const Locator &loc, const json &obj, const std::string &key, const std::string &path, double def, bool required = false) {
    if (!obj.contains(key)) {
        if (required) loc.error(path, "missing required field '" + key + "'");
        return def;
    }
    const json &v = obj.at(key);
    const std::string full = path.empty() ? key : path + "." + key;
    if (!v.is_number()) loc.error(full, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) loc.error(full, "must be finite");
    return d;
}

long long get_integer(const Locator &loc, const json &obj, const std::string &key, const std::string &path, long long def) {
    if (!obj.contains(key)) return def;
    const json &v = obj.at(key);
    const std::string full = path.empty() ? key : path + "." + key;
    if (!v.is_number_integer()) loc.error(full, "expected an integer");
    return v.get<long long>();
}

std::string get_string(const Locator &loc, const json &obj, const std::string &key, const std::string &path, const std::string &def) {
    if (!obj.contains(key)) return def;
    const json &v = obj.at(key);
    if (!v.is_string()) loc.error(path.empty() ? key : path + "." + key, "expected a string");
    return v.get<std::string>();
}

const json &get_object(const Locator &loc, const json &obj, const std::string &key) {
    const json &v = obj.at(key);
    if (!v.is_object()) loc.error(key, "expected an object");
    return v;
}

Grid parse_grid(const Locator &loc, const json &obj, const std::string &key) {
    const json &g = get_object(loc, obj, key);
    check_keys(loc, g, key, {"param", "start", "stop", "step"});
    Grid out;
    out.param = get_string(loc, g, "param", key, "");
    if (out.param != "Jx" && out.param != "Jy" && out.param != "Jz") loc.error(key + ".param", "must be one of Jx, Jy, Jz");
    out.start = get_number(loc, g, "start", key, 0, true);
    out.stop = get_number(loc, g, "stop", key, out.start);
    out.step = get_number(loc, g, "step", key, 0.1);
    if (!(out.step > 0)) loc.error(key + ".step", "must be > 0");
    if (out.stop < out.start) loc.error(key + ".stop", "must be >= start");
    if ((out.stop - out.start) / out.step > 100000) loc.error(key, "grid has more than 100000 points");
    return out;
}

} // namespace

std::vector<double> Grid::values() const {
    const long n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = start + static_cast<double>(i) * step;
    return v;
}

Backend parse_backend(const std::string &name) {
    if (name == "exact") return Backend::Exact;
    if (name == "shots") return Backend::Shots;
    if (name == "noisy") return Backend::Noisy;
    fail(ErrorCode::Config, "backend: unknown backend '" + name + "' (expected exact, shots or noisy)");
}

const char *backend_name(Backend b) {
    switch (b) {
    case Backend::Exact:
        return "exact";
    case Backend::Shots:
        return "shots";
    case Backend::Noisy:
        return "noisy";
    }
    return "exact";
}

SweepConfig parse_config(const std::string &text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        fail(ErrorCode::Config, "line " + std::to_string(line_at(text, e.byte == 0 ? 0 : e.byte - 1)) + ": syntax error: " + e.what());
    }
    const Locator loc(text);
    if (!root.is_object()) fail(ErrorCode::Config, "line 1: config must be a JSON object");
    check_keys(loc, root,
               "", {"format", "version", "lattice", "size", "couplings", "sweep", "rows", "dk", "method", "subsystem", "backend", "boundary", "threads", "output"});
    if (get_string(loc, root, "format", "", "kq-sweep-config") != "kq-sweep-config") loc.error("format", "expected \"kq-sweep-config\"");
    if (get_integer(loc, root, "version", "", 1) != 1) loc.error("version", "unsupported version (expected 1)");

    SweepConfig c;
    const std::string lat = get_string(loc, root, "lattice", "", "");
    if (lat == "chain") c.lattice = Lattice::Chain;
    else if (lat == "honeycomb") c.lattice = Lattice::Honeycomb;
    else loc.error("lattice", lat.empty() ? "missing or empty (expected chain or honeycomb)" : "unknown lattice '" + lat + "'");

    const std::string method = get_string(loc, root, "method", "", "correlation");
    if (method == "correlation") c.method = Method::Correlation;
    else if (method == "tomography") c.method = Method::Tomography;
    else loc.error("method", "expected correlation or tomography");

    c.size = static_cast<int>(get_integer(loc, root, "size", "", c.lattice == Lattice::Chain ? 4 : (c.method == Method::Tomography ? 2 : 8)));

    if (root.contains("couplings")) {
        const json &j = get_object(loc, root, "couplings");
        check_keys(loc, j, "couplings", {"Jx", "Jy", "Jz"});
        c.Jx = get_number(loc, j, "Jx", "couplings", 0);
        c.Jy = get_number(loc, j, "Jy", "couplings", 0);
        c.Jz = get_number(loc, j, "Jz", "couplings", 1);
    }
    if (root.contains("sweep")) c.sweep = parse_grid(loc, root, "sweep");
    else c.sweep = Grid{c.lattice == Lattice::Chain ? "Jx" : "Jy", 0, 0, 0.1};
    if (root.contains("rows")) {
        c.rows = parse_grid(loc, root, "rows");
        c.has_rows = true;
        if (c.rows.param == c.sweep.param) loc.error("rows.param", "must differ from sweep.param");
    }
    if (root.contains("dk")) {
        const json &j = get_object(loc, root, "dk");
        check_keys(loc, j, "dk", {"policy", "value", "points"});
        const std::string pol = get_string(loc, j, "policy", "dk", "special");
        if (pol == "special") c.dk_policy = DkPolicy::Special;
        else if (pol == "fixed") c.dk_policy = DkPolicy::Fixed;
        else if (pol == "sweep") c.dk_policy = DkPolicy::Sweep;
        else loc.error("dk.policy", "expected special, fixed or sweep");
        c.dk = get_number(loc, j, "value", "dk", 0, c.dk_policy == DkPolicy::Fixed);
        c.dk_points = static_cast<int>(get_integer(loc, j, "points", "dk", 32));
        if (c.dk_points < 1) loc.error("dk.points", "must be >= 1");
    }
    if (root.contains("subsystem")) {
        const json &j = root.at("subsystem");
        if (!j.is_array()) loc.error("subsystem", "expected an array of indices");
        for (const json &v : j) {
            if (!v.is_number_integer()) loc.error("subsystem", "indices must be integers");
            c.subsystem.push_back(v.get<int>());
        }
    }
    if (root.contains("backend")) {
        const json &j = get_object(loc, root, "backend");
        check_keys(loc, j, "backend", {"type", "shots", "seed", "depol2", "readout_flip"});
        const std::string t = get_string(loc, j, "type", "backend", "exact");
        try {
            c.backend = parse_backend(t);
        } catch (const Error &) {
            loc.error("backend.type", "expected exact, shots or noisy");
        }
        const long long shots = get_integer(loc, j, "shots", "backend", c.shots);
        if (shots < 1 || shots > 100000000) loc.error("backend.shots", "must be in [1, 1e8]");
        c.shots = static_cast<int>(shots);
        const long long seed = get_integer(loc, j, "seed", "backend", 1);
        if (seed < 0) loc.error("backend.seed", "must be non-negative");
        c.seed = static_cast<std::uint64_t>(seed);
        c.noise.depol2 = get_number(loc, j, "depol2", "backend", 0);
        c.noise.readout_flip = get_number(loc, j, "readout_flip", "backend", 0);
        if (c.noise.depol2 < 0 || c.noise.depol2 > 1) loc.error("backend.depol2", "must be in [0, 1]");
        if (c.noise.readout_flip < 0 || c.noise.readout_flip > 1) loc.error("backend.readout_flip", "must be in [0, 1]");
    }
    if (root.contains("boundary")) {
        const json &j = get_object(loc, root, "boundary");
        check_keys(loc, j, "boundary", {"flag_factor"});
        c.flag_factor = get_number(loc, j, "flag_factor", "boundary", kDefaultFlagFactor);
        if (!(c.flag_factor >= 1)) loc.error("boundary.flag_factor", "must be >= 1");
    }
    c.threads = static_cast<int>(get_integer(loc, root, "threads", "", 0));
    if (c.threads < 0) loc.error("threads", "must be >= 0");
    if (root.contains("output")) {
        const json &j = get_object(loc, root, "output");
        check_keys(loc, j, "output", {"prefix"});
        c.prefix = get_string(loc, j, "prefix", "output", c.prefix);
        if (c.prefix.empty() || c.prefix.find_first_of("/\\") != std::string::npos) loc.error("output.prefix", "must be a plain non-empty file name prefix");
    }
    try {
        c.validate();
    } catch (const Error &e) {
        const std::string msg = e.what();
        const std::size_t colon = msg.find(": ");
        if (colon != std::string::npos) loc.error(msg.substr(0, colon), msg.substr(colon + 2));
        throw;
    }
    return c;
}

SweepConfig load_config(const std::string &path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Config, path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void SweepConfig::validate() const {
    auto bad = [](const std::string &field, const std::string &msg) { fail(ErrorCode::Config, field + ": " + msg); };
    const bool pow2 = size >= 1 && (size & (size - 1)) == 0;
    if (sweep.step <= 0) bad("sweep", "step must be > 0");
    if (sweep.values().empty()) bad("sweep", "grid is empty");
    if (has_rows && rows.values().empty()) bad("rows", "grid is empty");
    if (backend != Backend::Exact && shots < 1) bad("backend", "shot count must be >= 1 when sampling");
    if (method == Method::Tomography) {
        if (lattice == Lattice::Chain && (!pow2 || size < 2 || size > 8)) bad("size", "tomography chains need a power-of-two cell count in 2..8");
        if (lattice == Lattice::Honeycomb && size != 2) bad("size", "tomography on the honeycomb uses the 8-site cluster (size 2)");
        const int n = lattice == Lattice::Chain ? 2 * size : 8;
        if (backend == Backend::Noisy && n > kMaxDensityQubits) bad("size", "noisy backend is limited to " + std::to_string(kMaxDensityQubits) + " qubits");
        const std::vector<int> q = effective_subsystem();
        if (q.empty() || q.size() > 4) bad("subsystem", "tomography needs 1..4 qubits");
        for (int v : q)
            if (v < 0 || v >= n) bad("subsystem", "qubit " + std::to_string(v) + " outside the cluster");
        if (std::set<int>(q.begin(), q.end()).size() != q.size()) bad("subsystem", "duplicate qubit");
        if (dk_policy == DkPolicy::Sweep) bad("dk", "spectrum sweeps need the correlation method");
        return;
    }
    if (!pow2 || size < 2) bad("size", "must be a power of two >= 2");
    const int wires = 2 * size;
    if (lattice == Lattice::Chain) {
        if (backend == Backend::Shots && wires > 24) bad("size", "shots backend is limited to 24 circuit wires (size <= 12)");
    } else {
        if (dk_policy != DkPolicy::Special) bad("dk", "honeycomb sweeps use the special shift");
        if (backend == Backend::Shots && wires > 20) bad("size", "shots backend on the honeycomb is limited to L <= 8");
    }
    if (backend == Backend::Noisy && wires > kMaxDensityQubits) bad("size", "noisy backend is limited to " + std::to_string(kMaxDensityQubits) + " wires");
    const std::vector<int> sub = effective_subsystem();
    if (sub.empty()) bad("subsystem", "must not be empty");
    for (int v : sub)
        if (v < 0 || v >= size) bad("subsystem", "position " + std::to_string(v) + " outside 0.." + std::to_string(size - 1));
    if (std::set<int>(sub.begin(), sub.end()).size() != sub.size()) bad("subsystem", "duplicate position");
}

std::vector<int> SweepConfig::effective_subsystem() const {
    if (!subsystem.empty()) {
        std::vector<int> s = subsystem;
        if (method == Method::Correlation) std::sort(s.begin(), s.end());
        return s;
    }
    std::vector<int> s;
    if (method == Method::Tomography) {
        const int n = lattice == Lattice::Chain ? 2 * size : 8;
        for (int i = 0; i < std::min(n / 2, 4); ++i) s.push_back(i);
    } else {
        for (int i = 0; i < size / 2; ++i) s.push_back(i);
    }
    return s;
}

double SweepConfig::point_dk() const {
    constexpr double pi = 3.14159265358979323846;
    if (dk_policy == DkPolicy::Fixed) return dk;
    return pi / size;
}

} // namespace kq::scan

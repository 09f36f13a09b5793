#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "kq/error.hpp"
#include "kq/phase_scan.hpp"

namespace kq::scan {

namespace {

std::ostringstream table(const std::string &kind) {
    std::ostringstream o;
    o.imbue(std::locale::classic());
    o << std::setprecision(12) << "# kq-" << kind << " v" << kCsvVersion << '\n';
    return o;
}

const char *lattice_name(Lattice l) { return l == Lattice::Chain ? "chain" : "honeycomb"; }
const char *method_name(Method m) { return m == Method::Correlation ? "correlation" : "tomography"; }

void sweep_rows(std::ostringstream &o, const SweepConfig &cfg, const SweepResult &r, const std::string &prefix) {
    for (const PointResult &p : r.points)
        o << prefix << lattice_name(cfg.lattice) << ',' << method_name(cfg.method) << ',' << backend_name(cfg.backend) << ',' << cfg.size << ','
          << cfg.sweep.param << ',' << p.x << ',' << p.Jx << ',' << p.Jy << ',' << p.Jz << ',' << p.dk << ',' << p.m.S << ',' << p.m.S_exact << '\n';
}

constexpr const char *kSweepHeader = "lattice,method,backend,size,param,x,Jx,Jy,Jz,dk,S_A,S_exact";

} // namespace

std::string sweep_csv(const SweepConfig &cfg, const SweepResult &r) {
    auto o = table("sweep");
    o << kSweepHeader << '\n';
    sweep_rows(o, cfg, r, "");
    return o.str();
}

std::string boundary_csv(const SweepConfig &cfg, const SweepResult &r) {
    auto o = table("boundary");
    o << "param,evaluated,found,index,boundary,jump,median,flag_factor,oracle_1,oracle_2\n";
    const std::vector<double> orc = oracle_boundaries(cfg.lattice, cfg.sweep.param, cfg.Jx, cfg.Jy, cfg.Jz);
    o << cfg.sweep.param << ',' << int(r.evaluated) << ',' << int(r.boundary.found) << ',' << r.boundary.index << ',' << r.boundary.boundary << ','
      << r.boundary.jump << ',' << r.boundary.median << ',' << cfg.flag_factor << ',';
    if (orc.size() > 0) o << orc[0];
    o << ',';
    if (orc.size() > 1) o << orc[1];
    o << '\n';
    return o.str();
}

std::string diagram_csv(const SweepConfig &cfg, const DiagramResult &d) {
    auto o = table("diagram");
    o << "row_param,row_value,param,evaluated,found,boundary,jump,median,oracle_1,oracle_2\n";
    for (const DiagramRow &row : d.rows) {
        o << cfg.rows.param << ',' << row.value << ',' << cfg.sweep.param << ',' << int(row.sweep.evaluated) << ',' << int(row.sweep.boundary.found) << ','
          << row.sweep.boundary.boundary << ',' << row.sweep.boundary.jump << ',' << row.sweep.boundary.median << ',';
        if (row.oracle.size() > 0) o << row.oracle[0];
        o << ',';
        if (row.oracle.size() > 1) o << row.oracle[1];
        o << '\n';
    }
    return o.str();
}

std::string diagram_grid_csv(const SweepConfig &cfg, const DiagramResult &d) {
    auto o = table("diagram-grid");
    o << "row_param,row_value," << kSweepHeader << '\n';
    for (const DiagramRow &row : d.rows) {
        std::ostringstream pre;
        pre.imbue(std::locale::classic());
        pre << std::setprecision(12) << cfg.rows.param << ',' << row.value << ',';
        sweep_rows(o, cfg, row.sweep, pre.str());
    }
    return o.str();
}

std::string spectrum_csv(const SpectrumResult &s) {
    auto o = table("spectrum");
    o << "o,dk,index,lambda,lambda_oracle,S_A\n";
    for (const SpectrumPoint &p : s.points)
        for (std::size_t j = 0; j < p.lambda.size(); ++j)
            o << p.o << ',' << p.dk << ',' << j << ',' << p.lambda[j] << ',' << p.lambda_oracle[j] << ',' << p.S << '\n';
    return o.str();
}

std::string correlation_csv(const std::vector<std::pair<double, std::vector<obs::CorrelationMatrix>>> &mats, const std::string &kind) {
    auto o = table(kind);
    o << "point,x,group,row,col,re,im\n";
    for (std::size_t p = 0; p < mats.size(); ++p)
        for (std::size_t g = 0; g < mats[p].second.size(); ++g) {
            const obs::CorrelationMatrix &c = mats[p].second[g];
            for (Eigen::Index r = 0; r < c.rows(); ++r)
                for (Eigen::Index col = 0; col < c.cols(); ++col)
                    o << p << ',' << mats[p].first << ',' << g << ',' << r << ',' << col << ',' << c(r, col).real() << ',' << c(r, col).imag() << '\n';
        }
    return o.str();
}

std::string verify_report(const std::vector<Check> &checks) {
    std::ostringstream o;
    o.imbue(std::locale::classic());
    o << std::setprecision(3);
    for (const Check &c : checks) o << (c.pass ? "PASS " : "FAIL ") << c.name << "  max_err=" << c.value << " tol=" << c.tol << '\n';
    return o.str();
}

// ---------------------------------------------------------------- plotting

namespace {

struct Table {
    std::string kind;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] int col(const std::string &name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        require(it != header.end(), ErrorCode::Config, "plot: table '" + kind + "' lacks column " + name);
        return static_cast<int>(it - header.begin());
    }
    [[nodiscard]] double num(std::size_t r, int c) const {
        const std::string &s = rows[r][static_cast<std::size_t>(c)];
        if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
        try {
            return std::stod(s);
        } catch (const std::exception &) {
            fail(ErrorCode::Config, "plot: non-numeric value '" + s + "' in column " + header[static_cast<std::size_t>(c)]);
        }
    }
};

std::vector<std::string> split(const std::string &line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Table parse_table(const std::string &csv) {
    std::istringstream in(csv);
    std::string line;
    Table t;
    require(static_cast<bool>(std::getline(in, line)) && line.rfind("# kq-", 0) == 0, ErrorCode::Config, "plot: missing '# kq-<kind> v<version>' header line");
    const std::size_t sp = line.find(" v", 5);
    require(sp != std::string::npos, ErrorCode::Config, "plot: malformed version line");
    t.kind = line.substr(5, sp - 5);
    require(std::atoi(line.c_str() + sp + 2) == kCsvVersion, ErrorCode::Config, "plot: unsupported table version");
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::Config, "plot: missing column header");
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        require(cells.size() == t.header.size(), ErrorCode::Config, "plot: row with " + std::to_string(cells.size()) + " cells, expected " + std::to_string(t.header.size()));
        t.rows.push_back(std::move(cells));
    }
    require(!t.rows.empty(), ErrorCode::Config, "plot: table has no rows");
    return t;
}

struct Frame {
    double x0, x1, y0, y1;
    static constexpr double W = 640, H = 440, L = 70, R = 20, T = 40, B = 60;
    [[nodiscard]] double px(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - R); }
    [[nodiscard]] double py(double y) const { return H - B - (y - y0) / (y1 - y0) * (H - T - B); }
};

void pad(double &lo, double &hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double m = 0.04 * (hi - lo);
    lo -= m;
    hi += m;
}

std::ostringstream svg_open(const Frame &f, const std::string &title, const std::string &xl, const std::string &yl) {
    std::ostringstream o;
    o.imbue(std::locale::classic());
    o << std::setprecision(6);
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::W << "\" height=\"" << Frame::H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << Frame::W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    const double l = Frame::L, r = Frame::W - Frame::R, t = Frame::T, b = Frame::H - Frame::B;
    o << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << r - l << "\" height=\"" << b - t << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 5, yv = f.y0 + (f.y1 - f.y0) * i / 5;
        o << "<text x=\"" << f.px(xv) << "\" y=\"" << b + 16 << "\" text-anchor=\"middle\">" << std::setprecision(3) << xv << "</text>\n";
        o << "<text x=\"" << l - 6 << "\" y=\"" << f.py(yv) + 4 << "\" text-anchor=\"end\">" << yv << "</text>\n" << std::setprecision(6);
    }
    o << "<text x=\"" << (l + r) / 2 << "\" y=\"" << Frame::H - 18 << "\" text-anchor=\"middle\">" << xl << "</text>\n";
    o << "<text x=\"18\" y=\"" << (t + b) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (t + b) / 2 << ")\">" << yl << "</text>\n";
    return o;
}

void polyline(std::ostringstream &o, const Frame &f, const std::vector<std::pair<double, double>> &pts, const std::string &color, bool dashed) {
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    for (const auto &[x, y] : pts)
        if (std::isfinite(x) && std::isfinite(y)) o << f.px(x) << ',' << f.py(y) << ' ';
    o << "\"/>\n";
}

void markers(std::ostringstream &o, const Frame &f, const std::vector<std::pair<double, double>> &pts, const std::string &color) {
    for (const auto &[x, y] : pts)
        if (std::isfinite(x) && std::isfinite(y)) o << "<circle cx=\"" << f.px(x) << "\" cy=\"" << f.py(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
}

void legend(std::ostringstream &o, const std::vector<std::pair<std::string, std::string>> &items) {
    double y = Frame::T + 16;
    for (const auto &[label, color] : items) {
        o << "<rect x=\"" << Frame::W - Frame::R - 150 << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"10\" fill=\"" << color << "\"/>";
        o << "<text x=\"" << Frame::W - Frame::R - 132 << "\" y=\"" << y << "\">" << label << "</text>\n";
        y += 16;
    }
}

void bounds(const std::vector<std::pair<double, double>> &pts, Frame &f) {
    f.x0 = f.y0 = std::numeric_limits<double>::infinity();
    f.x1 = f.y1 = -std::numeric_limits<double>::infinity();
    for (const auto &[x, y] : pts) {
        if (std::isfinite(x)) f.x0 = std::min(f.x0, x), f.x1 = std::max(f.x1, x);
        if (std::isfinite(y)) f.y0 = std::min(f.y0, y), f.y1 = std::max(f.y1, y);
    }
    pad(f.x0, f.x1);
    pad(f.y0, f.y1);
}

std::string plot_sweep(const Table &t) {
    const int cx = t.col("x"), cs = t.col("S_A"), ce = t.col("S_exact");
    std::vector<std::pair<double, double>> meas, ex, all;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        meas.emplace_back(t.num(r, cx), t.num(r, cs));
        ex.emplace_back(t.num(r, cx), t.num(r, ce));
    }
    all = meas;
    all.insert(all.end(), ex.begin(), ex.end());
    Frame f{};
    bounds(all, f);
    auto o = svg_open(f, "Entanglement entropy (" + t.rows[0][static_cast<std::size_t>(t.col("lattice"))] + ", " + t.rows[0][static_cast<std::size_t>(t.col("backend"))] + ")",
                      t.rows[0][static_cast<std::size_t>(t.col("param"))], "S_A");
    polyline(o, f, ex, "#d4a017", true);
    polyline(o, f, meas, "#1f5fbf", false);
    markers(o, f, meas, "#1f5fbf");
    legend(o, {{"circuit", "#1f5fbf"}, {"exact", "#d4a017"}});
    o << "</svg>\n";
    return o.str();
}

std::string plot_spectrum(const Table &t) {
    const int co = t.col("o"), cl = t.col("lambda"), cr = t.col("lambda_oracle");
    std::vector<std::pair<double, double>> meas, orc;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        meas.emplace_back(t.num(r, co), t.num(r, cl));
        orc.emplace_back(t.num(r, co), t.num(r, cr));
    }
    Frame f{};
    bounds(meas, f);
    f.y0 = -0.04;
    f.y1 = 1.04;
    auto o = svg_open(f, "Entanglement spectrum vs momentum offset", "offset o", "lambda");
    markers(o, f, orc, "#d4a017");
    markers(o, f, meas, "#1f5fbf");
    polyline(o, f, {{f.x0, 0.5}, {f.x1, 0.5}}, "#888888", true);
    legend(o, {{"circuit", "#1f5fbf"}, {"exact", "#d4a017"}});
    o << "</svg>\n";
    return o.str();
}

std::string plot_diagram(const Table &t) {
    const int cr = t.col("row_value"), cb = t.col("boundary"), cf = t.col("found"), c1 = t.col("oracle_1"), c2 = t.col("oracle_2"), ce = t.col("evaluated");
    std::vector<std::pair<double, double>> found, weak, o1, o2, all;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double rv = t.num(r, cr);
        if (t.num(r, ce) > 0) (t.num(r, cf) > 0 ? found : weak).emplace_back(t.num(r, cb), rv);
        o1.emplace_back(t.num(r, c1), rv);
        o2.emplace_back(t.num(r, c2), rv);
    }
    for (auto *v : {&found, &weak, &o1, &o2}) all.insert(all.end(), v->begin(), v->end());
    Frame f{};
    bounds(all, f);
    auto o = svg_open(f, "Phase boundary", t.rows[0][static_cast<std::size_t>(t.col("param"))], t.rows[0][static_cast<std::size_t>(t.col("row_param"))]);
    polyline(o, f, o1, "#d4a017", true);
    polyline(o, f, o2, "#d4a017", true);
    markers(o, f, found, "#1f5fbf");
    markers(o, f, weak, "#bf1f1f");
    legend(o, {{"detected", "#1f5fbf"}, {"below flag", "#bf1f1f"}, {"exact", "#d4a017"}});
    o << "</svg>\n";
    return o.str();
}

std::string plot_heatmap(const Table &t) {
    const int cr = t.col("row_value"), cx = t.col("x"), cs = t.col("S_A");
    std::map<double, std::map<double, double>> grid;
    double smin = std::numeric_limits<double>::infinity(), smax = -smin;
    std::vector<std::pair<double, double>> all;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const double s = t.num(r, cs);
        grid[t.num(r, cr)][t.num(r, cx)] = s;
        smin = std::min(smin, s);
        smax = std::max(smax, s);
        all.emplace_back(t.num(r, cx), t.num(r, cr));
    }
    Frame f{};
    bounds(all, f);
    auto o = svg_open(f, "S_A over the coupling grid", t.rows[0][static_cast<std::size_t>(t.col("param"))], t.rows[0][static_cast<std::size_t>(t.col("row_param"))]);
    const double nx = static_cast<double>(grid.begin()->second.size()), ny = static_cast<double>(grid.size());
    const double w = (Frame::W - Frame::L - Frame::R) / std::max(nx, 1.0) * 0.96, h = (Frame::H - Frame::T - Frame::B) / std::max(ny, 1.0) * 0.96;
    for (const auto &[rv, row] : grid)
        for (const auto &[xv, s] : row) {
            const double u = smax > smin ? (s - smin) / (smax - smin) : 0.5;
            const int red = static_cast<int>(255 * u), blue = static_cast<int>(255 * (1 - u));
            o << "<rect x=\"" << f.px(xv) - w / 2 << "\" y=\"" << f.py(rv) - h / 2 << "\" width=\"" << w << "\" height=\"" << h << "\" fill=\"rgb(" << red << ",64," << blue
              << ")\"/>\n";
        }
    o << "</svg>\n";
    return o.str();
}

} // namespace

std::string plot_svg(const std::string &csv) {
    const Table t = parse_table(csv);
    if (t.kind == "sweep") return plot_sweep(t);
    if (t.kind == "spectrum") return plot_spectrum(t);
    if (t.kind == "diagram") return plot_diagram(t);
    if (t.kind == "diagram-grid") return plot_heatmap(t);
    fail(ErrorCode::Config, "plot: no chart defined for table kind '" + t.kind + "'");
}

} // namespace kq::scan

#pragma once

// Configuration files, preset lookup, and the text formats written by the command-line tool.
// Every writer has a matching parser.

#include "am2/diagram.hpp"
#include "am2/errors.hpp"
#include "am2/region_check.hpp"
#include "am2/simulator.hpp"
#include "am2/stability.hpp"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef AM2_DEFAULT_PRESET_DIR
#define AM2_DEFAULT_PRESET_DIR "presets"
#endif

namespace am2 {

// ============================================================================
// Numbers
// ============================================================================

/// Nine significant digits; infinities as "inf" and "-inf".
[[nodiscard]] inline std::string fmt9(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

[[nodiscard]] inline std::optional<double> parse_number(std::string_view s) {
    const std::string t(s);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size()) return std::nullopt;
    return v;
}

/// Value rounded to what fmt9 prints, so JSON carries the same digits as the text formats.
[[nodiscard]] inline nlohmann::json json_num(double v) {
    if (!std::isfinite(v)) return fmt9(v);
    return std::strtod(fmt9(v).c_str(), nullptr);
}

[[nodiscard]] inline double from_json_num(const nlohmann::json& j) {
    if (j.is_string()) {
        if (auto v = parse_number(j.get<std::string>())) return *v;
        throw ConfigError("bad number '" + j.get<std::string>() + "'");
    }
    return j.get<double>();
}

// ============================================================================
// key=value configuration with [sections]
// ============================================================================

struct ConfigEntry {
    std::string value;
    int line = 0;
};

struct Config {
    std::map<std::string, std::map<std::string, ConfigEntry>> sections;

    [[nodiscard]] bool has(const std::string& sec) const { return sections.count(sec) > 0; }
    [[nodiscard]] const ConfigEntry* find(const std::string& sec, const std::string& key) const {
        auto s = sections.find(sec);
        if (s == sections.end()) return nullptr;
        auto e = s->second.find(key);
        return e == s->second.end() ? nullptr : &e->second;
    }
    [[nodiscard]] std::optional<std::string> get(const std::string& sec, const std::string& key) const {
        if (auto e = find(sec, key)) return e->value;
        return std::nullopt;
    }
    [[nodiscard]] std::optional<double> number(const std::string& sec, const std::string& key) const {
        const auto* e = find(sec, key);
        if (!e) return std::nullopt;
        auto v = parse_number(e->value);
        if (!v) throw ConfigError("expected a number for " + sec + "." + key + ", got '" + e->value + "'", e->line, key);
        return v;
    }
    void set(const std::string& sec, const std::string& key, const std::string& value) {
        sections[sec][key] = ConfigEntry{value, 0};
    }
};

namespace detail {
inline std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}
} // namespace detail

/// Lines are `key = value`, `[section]` or comments starting with '#' or ';'.
/// Keys before the first section header go to section "".
[[nodiscard]] inline Config parse_config(std::istream& in) {
    Config cfg;
    std::string line, section;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto hash = line.find_first_of("#;");
        const std::string s = detail::trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']' || s.size() < 3) throw ConfigError("malformed section header '" + s + "'", n);
            section = detail::trim(s.substr(1, s.size() - 2));
            cfg.sections[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value, got '" + s + "'", n);
        const std::string key = detail::trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError("empty key", n);
        if (cfg.sections[section].count(key)) throw ConfigError("duplicate key '" + key + "'", n, key);
        cfg.sections[section][key] = ConfigEntry{detail::trim(s.substr(eq + 1)), n};
    }
    return cfg;
}

[[nodiscard]] inline Config load_config(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw ConfigError("cannot open config file " + p.string());
    return parse_config(in);
}

inline void write_config(std::ostream& os, const Config& cfg) {
    bool first = true;
    for (const auto& [sec, entries] : cfg.sections) {
        if (!sec.empty()) os << (first ? "" : "\n") << '[' << sec << "]\n";
        for (const auto& [k, e] : entries) os << k << " = " << e.value << '\n';
        first = false;
    }
}

// ============================================================================
// Presets
// ============================================================================

/// Directory holding `<name>.conf` parameter files; the AM2_PRESET_DIR environment variable overrides it.
[[nodiscard]] inline std::filesystem::path preset_dir() {
    if (const char* env = std::getenv("AM2_PRESET_DIR"); env && *env) return env;
    return AM2_DEFAULT_PRESET_DIR;
}

/// Applies m1, kS1, ... from `sec` on top of `p`.
inline void apply_param_overrides(const Config& cfg, const std::string& sec, KineticParams& p) {
    const std::pair<const char*, double KineticParams::*> fields[] = {
        {"m1", &KineticParams::m1}, {"kS1", &KineticParams::kS1}, {"m2", &KineticParams::m2},
        {"kS2", &KineticParams::kS2}, {"kI", &KineticParams::kI}, {"k1", &KineticParams::k1},
        {"k2", &KineticParams::k2}, {"k3", &KineticParams::k3}};
    for (const auto& [name, member] : fields)
        if (auto v = cfg.number(sec, name)) p.*member = *v;
}

/// A preset file in preset_dir() wins over the built-in set of the same name.
[[nodiscard]] inline KineticParams resolve_params_preset(const std::string& name) {
    const auto file = preset_dir() / (name + ".conf");
    if (std::filesystem::exists(file)) {
        const auto cfg = load_config(file);
        KineticParams p{};
        if (auto base = cfg.get("params", "preset")) {
            if (*base == name) throw ConfigError("preset " + name + " refers to itself", cfg.find("params", "preset")->line);
            p = resolve_params_preset(*base);
        }
        apply_param_overrides(cfg, "params", p);
        p.validate();
        return p;
    }
    if (auto p = builtin_preset(name)) return *p;
    throw ConfigError("unknown parameter preset '" + name + "'", 0, "preset");
}

/// [params] section: optional `preset`, then per-constant overrides. Default is bernard2001.
[[nodiscard]] inline KineticParams params_from_config(const Config& cfg) {
    auto p = resolve_params_preset(cfg.get("params", "preset").value_or("bernard2001"));
    apply_param_overrides(cfg, "params", p);
    p.validate();
    return p;
}

[[nodiscard]] inline std::optional<OperatingPoint> point_from_config(const Config& cfg) {
    if (!cfg.has("point")) return std::nullopt;
    OperatingPoint op{0.1, 1.0 / 3.0, 0.0, 0.0};
    auto need = [&](const char* key) {
        auto v = cfg.number("point", key);
        if (!v) throw ConfigError(std::string("missing point.") + key, 0, key);
        return *v;
    };
    op.D = need("D");
    op.r = cfg.number("point", "r").value_or(op.r);
    op.S1in = need("S1in");
    op.S2in = need("S2in");
    op.validate();
    return op;
}

[[nodiscard]] inline PlaneAxes parse_axes(const std::string& s) {
    if (s == "D-S1in") return PlaneAxes::D_S1in;
    if (s == "S2in-S1in") return PlaneAxes::S2in_S1in;
    throw ConfigError("unknown plane axes '" + s + "' (expected D-S1in or S2in-S1in)", 0, "axes");
}

[[nodiscard]] inline const char* axes_name(PlaneAxes a) { return a == PlaneAxes::D_S1in ? "D-S1in" : "S2in-S1in"; }

/// [plane] section: optional `preset` (fig3..fig7), then overrides of axes, x0, x1, y0, y1, nx, ny, r, S2in, D.
/// Returns the kinetic preset name implied by a figure preset alongside the plane.
[[nodiscard]] inline std::optional<std::pair<PlaneSpec, std::string>> plane_from_config(const Config& cfg) {
    if (!cfg.has("plane")) return std::nullopt;
    PlaneSpec pl;
    std::string params = "bernard2001";
    if (auto name = cfg.get("plane", "preset")) {
        auto pp = plane_preset(*name);
        if (!pp) throw ConfigError("unknown plane preset '" + *name + "'", cfg.find("plane", "preset")->line, "preset");
        pl = pp->plane;
        params = pp->params;
    }
    if (auto a = cfg.get("plane", "axes")) pl.axes = parse_axes(*a);
    const std::pair<const char*, double PlaneSpec::*> dbl[] = {{"x0", &PlaneSpec::x0}, {"x1", &PlaneSpec::x1},
                                                               {"y0", &PlaneSpec::y0}, {"y1", &PlaneSpec::y1},
                                                               {"r", &PlaneSpec::r},   {"S2in", &PlaneSpec::S2in},
                                                               {"D", &PlaneSpec::D}};
    for (const auto& [k, member] : dbl)
        if (auto v = cfg.number("plane", k)) pl.*member = *v;
    if (auto v = cfg.number("plane", "nx")) pl.nx = static_cast<int>(*v);
    if (auto v = cfg.number("plane", "ny")) pl.ny = static_cast<int>(*v);
    pl.validate();
    return std::make_pair(pl, params);
}

// ============================================================================
// Diagram files
// ============================================================================

inline void write_plane_header(std::ostream& os, const PlaneSpec& pl) {
    os << "# axes=" << axes_name(pl.axes) << " x0=" << fmt9(pl.x0) << " x1=" << fmt9(pl.x1) << " y0=" << fmt9(pl.y0)
       << " y1=" << fmt9(pl.y1) << " nx=" << pl.nx << " ny=" << pl.ny << " r=" << fmt9(pl.r)
       << " S2in=" << fmt9(pl.S2in) << " D=" << fmt9(pl.D) << '\n';
}

[[nodiscard]] inline PlaneSpec parse_plane_header(const std::string& line) {
    if (line.rfind("# axes=", 0) != 0) throw ConfigError("missing plane header");
    std::istringstream is(line.substr(2));
    std::string tok;
    PlaneSpec pl;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ConfigError("malformed plane header field '" + tok + "'");
        const std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
        if (k == "axes") {
            pl.axes = parse_axes(v);
            continue;
        }
        const auto x = parse_number(v);
        if (!x) throw ConfigError("bad number in plane header: " + tok);
        if (k == "x0") pl.x0 = *x;
        else if (k == "x1") pl.x1 = *x;
        else if (k == "y0") pl.y0 = *x;
        else if (k == "y1") pl.y1 = *x;
        else if (k == "nx") pl.nx = static_cast<int>(*x);
        else if (k == "ny") pl.ny = static_cast<int>(*x);
        else if (k == "r") pl.r = *x;
        else if (k == "S2in") pl.S2in = *x;
        else if (k == "D") pl.D = *x;
        else throw ConfigError("unknown plane header field '" + k + "'");
    }
    return pl;
}

struct GridCell {
    int i = 0, j = 0;
    double x = 0.0, y = 0.0;
    std::string signature;
    int region = -1;
    int flags = 0;
};

struct GridFile {
    PlaneSpec plane;
    std::vector<GridCell> cells;
};

/// One row per cell: i, j, x, y, signature, region id (-1 when excluded), flag bits.
inline void write_grid_tsv(std::ostream& os, const ScanResult& s) {
    write_plane_header(os, s.plane);
    os << "i\tj\tx\ty\tsignature\tregion\tflags\n";
    for (int j = 0; j < s.plane.ny; ++j)
        for (int i = 0; i < s.plane.nx; ++i) {
            const int k = s.idx(i, j);
            os << i << '\t' << j << '\t' << fmt9(s.plane.x_at(i)) << '\t' << fmt9(s.plane.y_at(j)) << '\t'
               << s.signatures[static_cast<std::size_t>(s.cell_sig[k])].text() << '\t' << s.cell_region[k] << '\t'
               << int(s.cell_flags[k]) << '\n';
        }
}

namespace detail {
inline std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t a = 0;
    for (;;) {
        const auto b = line.find('\t', a);
        out.push_back(line.substr(a, b == std::string::npos ? std::string::npos : b - a));
        if (b == std::string::npos) break;
        a = b + 1;
    }
    return out;
}

inline double need_number(const std::string& s, int line) {
    auto v = parse_number(s);
    if (!v) throw ConfigError("bad number '" + s + "'", line);
    return *v;
}

inline int need_int(const std::string& s, int line) {
    const double v = need_number(s, line);
    if (v != std::floor(v)) throw ConfigError("expected an integer, got '" + s + "'", line);
    return static_cast<int>(v);
}

/// Reads the header row and checks its column count; returns rows split on tabs with line numbers.
inline std::vector<std::pair<int, std::vector<std::string>>> read_table(std::istream& in, std::size_t columns,
                                                                        std::string* comment = nullptr) {
    std::vector<std::pair<int, std::vector<std::string>>> rows;
    std::string line;
    int n = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (comment && comment->empty()) *comment = line;
            continue;
        }
        auto f = split_tabs(line);
        if (f.size() != columns) throw ConfigError("expected " + std::to_string(columns) + " columns", n);
        if (!header) {
            header = true;
            continue;
        }
        rows.emplace_back(n, std::move(f));
    }
    if (!header) throw ConfigError("missing column header");
    return rows;
}
} // namespace detail

[[nodiscard]] inline GridFile parse_grid_tsv(std::istream& in) {
    std::string head;
    GridFile g;
    for (auto& [n, f] : detail::read_table(in, 7, &head)) {
        GridCell c;
        c.i = detail::need_int(f[0], n);
        c.j = detail::need_int(f[1], n);
        c.x = detail::need_number(f[2], n);
        c.y = detail::need_number(f[3], n);
        if (!parse_signature(f[4])) throw ConfigError("bad signature '" + f[4] + "'", n);
        c.signature = f[4];
        c.region = detail::need_int(f[5], n);
        c.flags = detail::need_int(f[6], n);
        g.cells.push_back(std::move(c));
    }
    g.plane = parse_plane_header(head);
    return g;
}

struct LegendEntry {
    int region = 0;
    std::string signature;
    int cells = 0;
    bool refined = false;
    double x = 0.0, y = 0.0;  ///< representative point
    int J = -1;               ///< located and confirmed table row, -1 if none
    std::string status;       ///< match, mismatch or unlocated
    std::string color;
};

/// One row per counted signature (its representative region).
template <class M>
[[nodiscard]] std::vector<LegendEntry> make_legend(const M& m, const ScanResult& s) {
    const auto rep = region_table_check(m, s);
    std::vector<LegendEntry> out;
    for (const auto& e : rep.entries) {
        const auto& reg = s.regions[static_cast<std::size_t>(e.region)];
        LegendEntry l;
        l.region = e.region;
        l.signature = e.signature;
        l.cells = reg.cells;
        l.refined = reg.refined;
        l.x = e.x;
        l.y = e.y;
        l.J = e.matched;
        l.status = to_string(e.status);
        const auto& sig = s.signatures[static_cast<std::size_t>(reg.signature)];
        l.color = e.matched >= 0 ? std::string(region_row(e.matched)->color) : signature_color(sig);
        out.push_back(std::move(l));
    }
    return out;
}

inline void write_legend_tsv(std::ostream& os, const PlaneSpec& pl, const std::vector<LegendEntry>& legend) {
    write_plane_header(os, pl);
    os << "region\tsignature\tcells\trefined\tx\ty\tJ\tstatus\tcolor\n";
    for (const auto& l : legend)
        os << l.region << '\t' << l.signature << '\t' << l.cells << '\t' << (l.refined ? 1 : 0) << '\t' << fmt9(l.x)
           << '\t' << fmt9(l.y) << '\t' << (l.J >= 0 ? "J" + std::to_string(l.J) : "-") << '\t' << l.status << '\t'
           << l.color << '\n';
}

[[nodiscard]] inline std::vector<LegendEntry> parse_legend_tsv(std::istream& in) {
    std::vector<LegendEntry> out;
    for (auto& [n, f] : detail::read_table(in, 9)) {
        LegendEntry l;
        l.region = detail::need_int(f[0], n);
        if (!parse_signature(f[1])) throw ConfigError("bad signature '" + f[1] + "'", n);
        l.signature = f[1];
        l.cells = detail::need_int(f[2], n);
        l.refined = detail::need_int(f[3], n) != 0;
        l.x = detail::need_number(f[4], n);
        l.y = detail::need_number(f[5], n);
        if (f[6] != "-") {
            if (f[6].size() < 2 || f[6][0] != 'J') throw ConfigError("bad region label '" + f[6] + "'", n);
            l.J = detail::need_int(f[6].substr(1), n);
        }
        l.status = f[7];
        l.color = f[8];
        out.push_back(std::move(l));
    }
    return out;
}

/// Polylines: curve id, segment index, x, y.
inline void write_gammas_tsv(std::ostream& os, const PlaneSpec& pl, const std::vector<GammaCurve>& curves) {
    write_plane_header(os, pl);
    os << "gamma\tsegment\tx\ty\n";
    for (const auto& g : curves)
        for (std::size_t s = 0; s < g.segments.size(); ++s)
            for (const auto& [x, y] : g.segments[s]) os << g.id << '\t' << s << '\t' << fmt9(x) << '\t' << fmt9(y) << '\n';
}

[[nodiscard]] inline std::vector<GammaCurve> parse_gammas_tsv(std::istream& in) {
    std::vector<GammaCurve> out;
    for (auto& [n, f] : detail::read_table(in, 4)) {
        const int id = detail::need_int(f[0], n);
        const auto seg = static_cast<std::size_t>(detail::need_int(f[1], n));
        if (out.empty() || out.back().id != id) {
            out.emplace_back();
            out.back().id = id;
        }
        auto& g = out.back();
        if (g.segments.size() < seg + 1) g.segments.resize(seg + 1);
        g.segments[seg].emplace_back(detail::need_number(f[2], n), detail::need_number(f[3], n));
    }
    return out;
}

// ============================================================================
// Trajectories
// ============================================================================

inline constexpr const char* kTrajectoryColumns =
    "t\tS1_1\tX1_1\tS2_1\tX2_1\tS1_2\tX1_2\tS2_2\tX2_2\tdZ1_1\tdZ2_1\tdZ1_2\tdZ2_2";

/// t, the eight states, then |Z - feed| for Z1^1, Z2^1, Z1^2, Z2^2.
using TrajectoryRow = std::array<double, 13>;

template <class M>
void write_trajectory_tsv(std::ostream& os, const M& m, const OperatingPoint& op, const Trajectory<8>& tr) {
    os << "# D=" << fmt9(op.D) << " r=" << fmt9(op.r) << " S1in=" << fmt9(op.S1in) << " S2in=" << fmt9(op.S2in)
       << " event=" << to_string(tr.event) << " t_end=" << fmt9(tr.t_end) << '\n';
    os << kTrajectoryColumns << '\n';
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        const auto c = conservation(m, op, tr.x[k]);
        os << fmt9(tr.t[k]);
        for (double v : tr.x[k]) os << '\t' << fmt9(v);
        for (double v : c.dev) os << '\t' << fmt9(v);
        os << '\n';
    }
}

[[nodiscard]] inline std::vector<TrajectoryRow> parse_trajectory_tsv(std::istream& in) {
    std::vector<TrajectoryRow> out;
    for (auto& [n, f] : detail::read_table(in, 13)) {
        TrajectoryRow r{};
        for (std::size_t c = 0; c < 13; ++c) r[c] = detail::need_number(f[c], n);
        out.push_back(r);
    }
    return out;
}

// ============================================================================
// Steady states and basins (JSON)
// ============================================================================

[[nodiscard]] inline nlohmann::json point_json(const OperatingPoint& op) {
    return {{"D", json_num(op.D)}, {"r", json_num(op.r)}, {"S1in", json_num(op.S1in)}, {"S2in", json_num(op.S2in)}};
}

[[nodiscard]] inline OperatingPoint point_from_json(const nlohmann::json& j) {
    return {from_json_num(j.at("D")), from_json_num(j.at("r")), from_json_num(j.at("S1in")), from_json_num(j.at("S2in"))};
}

struct StateRecord {
    std::string label;
    int branch = 1, branch_count = 1;
    bool exists = false, tangency = false;
    std::string condition;
    std::array<double, 4> x{};
    std::string analytic, clause, numeric;
    std::array<double, 4> eigenvalues{};
    bool agree = false, near_boundary = false;
};

template <class M>
[[nodiscard]] nlohmann::json steady_states_json(const M& m, const OperatingPoint& op,
                                                const std::vector<ClassifiedState>& states) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : states) {
        const auto& s = c.state;
        nlohmann::json e{{"label", s.label.str()}, {"branch", s.branch},       {"branch_count", s.branch_count},
                         {"exists", s.exists},      {"tangency", s.tangency}, {"condition", s.condition}};
        if (s.exists) {
            nlohmann::json x = nlohmann::json::array(), full = nlohmann::json::array(), ev = nlohmann::json::array();
            for (double v : s.x) x.push_back(json_num(v));
            for (double v : reconstruct_full_state(m, op, s.x)) full.push_back(json_num(v));
            for (double v : c.check.eigenvalues) ev.push_back(json_num(v));
            e["reduced"] = x;
            e["full"] = full;
            e["analytic"] = to_string(c.check.analytic);
            e["clause"] = c.check.clause;
            e["numeric"] = to_string(c.check.numeric);
            e["eigenvalues"] = ev;
            e["agree"] = c.check.agree;
            e["near_boundary"] = c.check.near_boundary;
        }
        arr.push_back(std::move(e));
    }
    return {{"point", point_json(op)}, {"states", arr}};
}

[[nodiscard]] inline std::vector<StateRecord> parse_steady_states_json(const nlohmann::json& j) {
    std::vector<StateRecord> out;
    for (const auto& e : j.at("states")) {
        StateRecord r;
        r.label = e.at("label").get<std::string>();
        if (!parse_label(r.label)) throw ConfigError("unknown steady-state label '" + r.label + "'");
        r.branch = e.at("branch").get<int>();
        r.branch_count = e.at("branch_count").get<int>();
        r.exists = e.at("exists").get<bool>();
        r.tangency = e.at("tangency").get<bool>();
        r.condition = e.at("condition").get<std::string>();
        if (r.exists) {
            for (int k = 0; k < 4; ++k) {
                r.x[k] = from_json_num(e.at("reduced").at(k));
                r.eigenvalues[k] = from_json_num(e.at("eigenvalues").at(k));
            }
            r.analytic = e.at("analytic").get<std::string>();
            r.clause = e.at("clause").get<std::string>();
            r.numeric = e.at("numeric").get<std::string>();
            r.agree = e.at("agree").get<bool>();
            r.near_boundary = e.at("near_boundary").get<bool>();
        }
        out.push_back(std::move(r));
    }
    return out;
}

[[nodiscard]] inline nlohmann::json basin_report_json(const OperatingPoint& op, const BasinReport& rep) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [k, v] : rep.counts) counts[k] = v;
    return {{"point", point_json(op)}, {"seed", rep.seed},           {"n", rep.n},
            {"counts", counts},        {"unmatched", rep.unmatched}, {"unconverged", rep.unconverged}};
}

struct BasinSummary {
    OperatingPoint op{};
    std::uint64_t seed = 0;
    int n = 0;
    std::map<std::string, int> counts;
    int unmatched = 0, unconverged = 0;
};

[[nodiscard]] inline BasinSummary parse_basin_report_json(const nlohmann::json& j) {
    BasinSummary b;
    b.op = point_from_json(j.at("point"));
    b.seed = j.at("seed").get<std::uint64_t>();
    b.n = j.at("n").get<int>();
    for (const auto& [k, v] : j.at("counts").items()) b.counts[k] = v.get<int>();
    b.unmatched = j.at("unmatched").get<int>();
    b.unconverged = j.at("unconverged").get<int>();
    return b;
}

} // namespace am2

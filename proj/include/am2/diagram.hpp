#pragma once

// Operating diagrams: boundary curves, per-point signatures and region extraction on a grid.

#include "am2/region_table.hpp"
#include "am2/parallel.hpp"
#include "am2/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace am2 {

// ============================================================================
// Planes
// ============================================================================

enum class PlaneAxes { D_S1in, S2in_S1in };

struct PlaneSpec {
    PlaneAxes axes = PlaneAxes::D_S1in;
    double x0 = 0.0, x1 = 1.0;  ///< D or S2in
    double y0 = 0.0, y1 = 1.0;  ///< S1in
    int nx = 600, ny = 600;
    double r = 1.0 / 3.0;
    double S2in = 150.0;        ///< fixed when axes == D_S1in
    double D = 0.1;             ///< fixed when axes == S2in_S1in

    void validate() const {
        if (!(x1 > x0) || !(y1 > y0)) throw DomainError("plane ranges must have positive length");
        if (nx < 2 || ny < 2) throw DomainError("plane resolution must be at least 2 per axis");
        if (!(r > 0.0 && r < 1.0)) throw DomainError("r must lie in (0,1)");
    }
    /// Cell-centre coordinates.
    [[nodiscard]] double x_at(int i) const { return x0 + (i + 0.5) * (x1 - x0) / nx; }
    [[nodiscard]] double y_at(int j) const { return y0 + (j + 0.5) * (y1 - y0) / ny; }
    [[nodiscard]] OperatingPoint at(double x, double y) const {
        return axes == PlaneAxes::D_S1in ? OperatingPoint{x, r, y, S2in} : OperatingPoint{D, r, y, x};
    }
    [[nodiscard]] const char* x_name() const { return axes == PlaneAxes::D_S1in ? "D" : "S2in"; }
};

/// Named planes with their kinetic preset and the J regions they show.
struct PlanePreset {
    std::string name;
    std::string params;  ///< kinetic preset name
    PlaneSpec plane;
    int expected_regions = 0;
    std::vector<int> regions;
};

namespace detail {
inline std::vector<int> j_range(std::initializer_list<std::pair<int, int>> spans) {
    std::vector<int> v;
    for (auto [a, b] : spans)
        for (int k = a; k <= b; ++k) v.push_back(k);
    return v;
}
} // namespace detail

[[nodiscard]] inline std::vector<PlanePreset> plane_presets() {
    using detail::j_range;
    std::vector<PlanePreset> out;
    PlaneSpec base{PlaneAxes::D_S1in, 0.0, 0.6, 0.0, 300.0, 600, 600, 1.0 / 3.0, 150.0, 0.0};
    out.push_back({"fig3", "bernard2001", base, 21, j_range({{0, 20}})});
    // With m1 = 0.3 the regions above gamma3 start near S1in = 310, so this plane is taller.
    PlaneSpec tall = base;
    tall.y1 = 1000.0;
    out.push_back({"fig4", "bernard2001-lowm1", tall, 17, j_range({{0, 0}, {3, 5}, {8, 8}, {13, 24}})});
    PlaneSpec low = base;
    low.S2in = 10.0;
    out.push_back({"fig5", "bernard2001", low, 21, j_range({{0, 1}, {4, 9}, {15, 20}, {25, 31}})});
    PlaneSpec rhigh = base;
    rhigh.r = 0.7;
    out.push_back({"fig6", "bernard2001", rhigh, 20, j_range({{0, 0}, {15, 15}, {20, 22}, {32, 46}})});
    PlaneSpec s2 = base;
    s2.axes = PlaneAxes::S2in_S1in;
    s2.x0 = 0.0;
    s2.x1 = 600.0;
    s2.y0 = 0.0;
    s2.y1 = 300.0;
    s2.r = 0.3;
    s2.D = 0.17;
    out.push_back({"fig7", "bernard2001", s2, 30, j_range({{0, 1}, {4, 5}, {15, 15}, {27, 27}, {46, 69}})});
    return out;
}

[[nodiscard]] inline std::optional<PlanePreset> plane_preset(std::string_view name) {
    for (auto& p : plane_presets())
        if (p.name == name) return p;
    return std::nullopt;
}

/// Which growth-rate ordering applies.
enum class KineticCase { One, Two, Three };

template <class M>
[[nodiscard]] KineticCase detect_case(const M& m, double S2in) {
    const double m1 = m.mu1.supremum();
    if (m1 > m.mu2_max()) return KineticCase::One;
    if (m.mu2(S2in) > m1) return KineticCase::Two;
    return KineticCase::Three;
}

// ============================================================================
// Boundary curves
// ============================================================================

struct GammaCurve {
    int id = 0;
    std::vector<std::vector<std::pair<double, double>>> segments;  ///< polylines in plane coordinates
    double domain_lo = 0.0, domain_hi = 0.0;                        ///< along the sampling parameter
    [[nodiscard]] bool empty() const {
        for (const auto& s : segments)
            if (!s.empty()) return false;
        return true;
    }
};

/// Residual of the defining equation of curve `id` at an operating point, or empty if undefined there.
template <class M>
[[nodiscard]] std::optional<double> gamma_residual(const M& m, int id, const OperatingPoint& op) {
    const auto av = aux_values(m, op);
    const auto& be = av.be;
    auto diff = [](double a, const BreakEven& b) -> std::optional<double> {
        if (!b.is_finite()) return std::nullopt;
        return a - b.value();
    };
    auto fdiff = [&](int i, int j) -> std::optional<double> {
        const auto F = av.Fij(i, j);
        if (!F) return std::nullopt;
        return op.S1in - *F;
    };
    switch (id) {
        case 0: return diff(op.S1in, be.lam1(1));
        case 1: return diff(op.S1in, be.lam1(2));
        case 2: return fdiff(2, 1);
        case 3: return fdiff(2, 2);
        case 4: return fdiff(1, 1);
        case 5: return fdiff(1, 2);
        case 6: return op.D - av.cr.D1star;
        case 7: return op.D - av.cr.D2star;
        case 8: return op.D - av.cr.D1m;
        case 9: return op.D - av.cr.D2m;
        case 10: return diff(op.S2in, be.lam2(1, 1));
        case 11: return diff(op.S2in, be.lam2(2, 1));
        case 12: return diff(op.S2in, be.lam2(1, 2));
        case 13: return diff(op.S2in, be.lam2(2, 2));
        case 14: return av.phi[0];
        case 15: return av.phi[1];
        default: throw DomainError("unknown boundary curve id " + std::to_string(id));
    }
}

namespace detail {

inline std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
    return v;
}

/// phi_j as a function of S1in at fixed D; increasing in S1in above lambda1^1.
template <class M>
std::optional<double> phi_root_in_s1(const M& m, OperatingPoint op, int j, double s_hi) {
    const auto l11 = lambda1(m, op, Stage::First);
    const auto l2 = lambda2_pair(m, op, Stage::Second)[j];
    if (!l11.is_finite() || !l2.is_finite() || !(s_hi > l11.value())) return std::nullopt;
    auto phi = [&](double s1) {
        OperatingPoint q = op;
        q.S1in = s1;
        const double X11 = (s1 - l11.value()) / m.k1;
        return op.S2in + m.k2 * solve_f1_g1(m, q, X11) - l2.value();
    };
    double lo = l11.value() * (1.0 + 1e-12) + 1e-12, hi = s_hi;
    double flo = phi(lo), fhi = phi(hi);
    if ((flo > 0.0) == (fhi > 0.0)) return std::nullopt;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phi(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Samples boundary curve `id` in the plane; curves with an empty domain come back empty.
template <class M>
[[nodiscard]] GammaCurve gamma_sample(const M& m, int id, const PlaneSpec& pl, int samples = 512) {
    if (id < 0 || id > 15) throw DomainError("unknown boundary curve id " + std::to_string(id));
    pl.validate();
    GammaCurve g;
    g.id = id;
    const double mu2max = m.mu2_max();
    const double m1 = m.mu1.supremum();
    auto vertical = [&](double x) {
        if (x >= pl.x0 && x <= pl.x1) g.segments.push_back({{x, pl.y0}, {x, pl.y1}});
        g.domain_lo = pl.y0;
        g.domain_hi = pl.y1;
    };
    auto horizontal = [&](double y) {
        g.segments.push_back({{pl.x0, y}, {pl.x1, y}});
        g.domain_lo = pl.x0;
        g.domain_hi = pl.x1;
    };

    if (pl.axes == PlaneAxes::D_S1in) {
        const double r1 = pl.r, r2 = 1.0 - pl.r;
        const double rr[2] = {r1, r2};
        auto graph = [&](double dhi, auto&& y_of) {
            const double lo = pl.x0, hi = std::min(pl.x1, dhi);
            g.domain_lo = lo;
            g.domain_hi = hi;
            if (!(hi > lo)) return;
            std::vector<std::pair<double, double>> seg;
            // Stay strictly inside open domains; the curves blow up at their right end.
            for (double D : detail::linspace(lo, hi - 1e-9 * (hi - lo), samples)) {
                if (D <= 0.0) continue;
                if (auto y = y_of(D)) seg.push_back({D, *y});
            }
            if (!seg.empty()) g.segments.push_back(std::move(seg));
        };
        auto at = [&](double D) { return OperatingPoint{D, pl.r, 0.0, pl.S2in}; };
        switch (id) {
            case 0:
            case 1: {
                const Stage st = id == 0 ? Stage::First : Stage::Second;
                graph(rr[id] * m1, [&](double D) -> std::optional<double> {
                    const auto l = lambda1(m, at(D), st);
                    return l.is_finite() ? std::optional<double>(l.value()) : std::nullopt;
                });
                break;
            }
            case 2: case 3: case 4: case 5: {
                const int i = id <= 3 ? 2 : 1, j = (id % 2 == 0) ? 1 : 2;
                graph(std::min(rr[i - 1] * m1, rr[i - 1] * mu2max),
                      [&](double D) { return aux_values(m, at(D)).Fij(i, j); });
                break;
            }
            case 6: vertical(r1 * m.mu2(pl.S2in)); break;
            case 7: vertical(r2 * m.mu2(pl.S2in)); break;
            case 8: vertical(r1 * mu2max); break;
            case 9: vertical(r2 * mu2max); break;
            case 10: case 11: case 12: case 13: {
                const int i = (id == 10 || id == 12) ? 1 : 2;
                const bool lower = id <= 11;
                // S2in = lambda2^{i1} needs S2in below the peak, lambda2^{i2} above it.
                if ((pl.S2in <= m.mu2_peak()) == lower) vertical(rr[i - 1] * m.mu2(pl.S2in));
                break;
            }
            case 14: case 15: {
                const int j = id - 13;
                graph(std::min(r2 * mu2max, r1 * m1),
                      [&](double D) { return detail::phi_root_in_s1(m, at(D), j, pl.y1); });
                break;
            }
        }
    } else {
        const OperatingPoint op0{pl.D, pl.r, 0.0, 0.0};
        const auto be = break_evens(m, op0);
        const auto cr = critical_rates(m, op0);
        switch (id) {
            case 0:
            case 1:
                if (be.lam1(id + 1).is_finite()) horizontal(be.lam1(id + 1).value());
                break;
            case 2: case 3: case 4: case 5: {
                const int i = id <= 3 ? 2 : 1, j = (id % 2 == 0) ? 1 : 2;
                const double Dm = i == 1 ? cr.D1m : cr.D2m;
                if (!(pl.D > 0.0 && pl.D < Dm) || !be.lam1(i).is_finite() || !be.lam2(i, j).is_finite()) break;
                const double c = be.lam1(i).value() + (m.k1 / m.k2) * be.lam2(i, j).value();
                g.segments.push_back({{pl.x0, c - (m.k1 / m.k2) * pl.x0}, {pl.x1, c - (m.k1 / m.k2) * pl.x1}});
                g.domain_lo = pl.x0;
                g.domain_hi = pl.x1;
                break;
            }
            case 6: case 7: {
                const int i = id - 5;
                for (int j = 1; j <= 2; ++j)
                    if (be.lam2(i, j).is_finite()) vertical(be.lam2(i, j).value());
                break;
            }
            case 8: case 9: break;  // a fixed D never equals D_i^m generically
            case 10: case 11: case 12: case 13: {
                const int i = (id == 10 || id == 12) ? 1 : 2, j = id <= 11 ? 1 : 2;
                const double Dm = i == 1 ? cr.D1m : cr.D2m;
                if (pl.D < Dm && be.lam2(i, j).is_finite()) vertical(be.lam2(i, j).value());
                break;
            }
            case 14: case 15: {
                const int j = id - 13;
                if (!(pl.D <= cr.D2m) || !be.lam1(1).is_finite() || !be.lam2(2, j).is_finite()) break;
                const double lo = std::max(pl.y0, be.lam1(1).value());
                if (!(pl.y1 > lo)) break;
                std::vector<std::pair<double, double>> seg;
                for (double s1 : detail::linspace(lo, pl.y1, samples)) {
                    if (s1 <= be.lam1(1).value()) continue;
                    OperatingPoint q = op0;
                    q.S1in = s1;
                    const double X12 = solve_f1_g1(m, q, (s1 - be.lam1(1).value()) / m.k1);
                    seg.push_back({be.lam2(2, j).value() - m.k2 * X12, s1});
                }
                g.domain_lo = lo;
                g.domain_hi = pl.y1;
                if (!seg.empty()) g.segments.push_back(std::move(seg));
                break;
            }
        }
    }
    return g;
}

// ============================================================================
// Signatures
// ============================================================================

/// Per label: bit0 exists, bit1 some branch stable, bit2 even branch count.
struct RegionSignature {
    std::array<std::uint8_t, 15> code{};

    [[nodiscard]] bool exists(int k) const { return code[k] & 1; }
    [[nodiscard]] bool stable(int k) const { return code[k] & 2; }
    [[nodiscard]] bool even(int k) const { return code[k] & 4; }

    /// 'S' / 'U' / '.' per label; lower case marks an even branch count.
    [[nodiscard]] std::string text() const {
        std::string s(15, '.');
        for (int k = 0; k < 15; ++k) {
            if (!exists(k)) continue;
            s[k] = stable(k) ? 'S' : 'U';
            if (even(k)) s[k] = static_cast<char>(s[k] - 'A' + 'a');
        }
        return s;
    }
    [[nodiscard]] std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto c : code) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }
    friend bool operator==(const RegionSignature&, const RegionSignature&) = default;
    friend bool operator<(const RegionSignature& a, const RegionSignature& b) { return a.code < b.code; }
};

[[nodiscard]] inline std::optional<RegionSignature> parse_signature(std::string_view s) {
    if (s.size() != 15) return std::nullopt;
    RegionSignature sig;
    for (int k = 0; k < 15; ++k) {
        const char c = s[k];
        switch (c) {
            case '.': break;
            case 'U': sig.code[k] = 1; break;
            case 'S': sig.code[k] = 3; break;
            case 'u': sig.code[k] = 5; break;
            case 's': sig.code[k] = 7; break;
            default: return std::nullopt;
        }
    }
    return sig;
}

/// Table row whose existence/stability pattern equals `sig`, preferring the given candidates.
[[nodiscard]] inline std::optional<RegionRow> match_row(const RegionSignature& sig, const std::vector<int>& prefer = {}) {
    std::string t = sig.text();
    for (auto& c : t) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (int j : prefer)
        if (auto row = region_row(j); row && row->code == t) return row;
    for (const auto& row : kRegionRows)
        if (row.code == t) return row;
    return std::nullopt;
}

[[nodiscard]] inline std::string signature_color(const RegionSignature& sig, const std::vector<int>& prefer = {}) {
    if (auto row = match_row(sig, prefer)) return std::string(row->color);
    return "Unmatched";
}

struct PointClass {
    RegionSignature sig;
    bool on_boundary = false;  ///< near a boundary curve, marginal eigenvalue or tangency
    bool disagreement = false; ///< analytic and numeric verdicts differ away from a boundary
};

inline constexpr double kBoundaryRelTol = 1e-9;

/// Smallest relative distance from the operating point to any boundary curve.
template <class M>
[[nodiscard]] double boundary_gap(const M& m, const OperatingPoint& op, const AuxValues& av) {
    double gap = std::numeric_limits<double>::infinity();
    auto consider = [&](double v, double scale) { gap = std::min(gap, std::abs(v) / (1.0 + std::abs(scale))); };
    for (int i = 1; i <= 2; ++i) {
        if (av.be.lam1(i).is_finite()) consider(op.S1in - av.be.lam1(i).value(), op.S1in);
        for (int j = 1; j <= 2; ++j) {
            if (auto F = av.Fij(i, j)) consider(op.S1in - *F, op.S1in);
            if (av.be.lam2(i, j).is_finite()) consider(op.S2in - av.be.lam2(i, j).value(), op.S2in);
        }
    }
    consider(op.D - av.cr.D1star, op.D);
    consider(op.D - av.cr.D2star, op.D);
    consider(op.D - av.cr.D1m, op.D);
    consider(op.D - av.cr.D2m, op.D);
    for (const auto& ph : av.phi)
        if (ph) consider(*ph, op.S2in);
    (void)m;
    return gap;
}

template <class M>
[[nodiscard]] PointClass classify_point(const M& m, const OperatingPoint& op, const RootScanOptions& opt = {}) {
    PointClass pc;
    const auto av = aux_values(m, op, opt);
    const auto states = enumerate_steady_states(m, op, av, opt);
    pc.on_boundary = boundary_gap(m, op, av) < kBoundaryRelTol;
    for (const auto& s : states) {
        if (!s.exists) continue;
        const int k = label_index(s.label);
        const auto c = crosscheck(m, op, av, s);
        auto& code = pc.sig.code[k];
        code |= 1;
        if (c.analytic == AnalyticVerdict::Stable) code |= 2;
        if (s.branch_count % 2 == 0) code |= 4;
        if (c.near_boundary || s.tangency) pc.on_boundary = true;
        if (!c.agree && !c.near_boundary) pc.disagreement = true;
    }
    return pc;
}

// ============================================================================
// Grid scan and region extraction
// ============================================================================

struct ScanOptions {
    int jobs = 0;               ///< 0 = hardware concurrency
    int min_region_cells = 4;   ///< smaller regions only count once confirmed by refinement
    int max_refine = 16;        ///< largest local resolution factor tried by refinement
    int refine_probes = 24;     ///< cells re-sampled per unconfirmed signature
    RootScanOptions roots;
};

enum CellFlag : std::uint8_t { kOnBoundary = 1, kEdgeCell = 2, kDisagree = 4 };

struct Region {
    int id = 0;
    int signature = 0;     ///< index into ScanResult::signatures
    int cells = 0;
    bool accepted = false;
    bool refined = false;  ///< found by the refinement pass (cells counts coarse cells only)
    int rep_i = 0, rep_j = 0;  ///< deepest interior cell
    double rep_x = 0.0, rep_y = 0.0;
};

struct ScanResult {
    PlaneSpec plane;
    std::vector<RegionSignature> signatures;  ///< sorted, unique
    std::vector<int> cell_sig;                ///< nx*ny, row-major in j (S1in) then i
    std::vector<std::uint8_t> cell_flags;
    std::vector<int> cell_region;             ///< -1 for excluded cells
    std::vector<Region> regions;
    int distinct_signatures = 0;              ///< over accepted regions
    int disagreements = 0;

    [[nodiscard]] int idx(int i, int j) const { return j * plane.nx + i; }
    [[nodiscard]] std::vector<int> counted_signatures() const {
        std::vector<int> v;
        for (const auto& r : regions)
            if (r.accepted) v.push_back(r.signature);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }
};

namespace detail {

/// Evaluates a window at a finer resolution and returns the interior sub-cell of `sig`
/// closest to the window centre, or empty when fewer than `need` interior sub-cells exist.
/// Interior means: same signature, not on a boundary, and all four neighbours share it.
template <class M>
std::optional<std::pair<double, double>> refine_window(const M& m, const PlaneSpec& pl, double xa, double xb, double ya,
                                                       double yb, int nx, int ny, const RegionSignature& sig,
                                                       int need, const ScanOptions& opt) {
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(nx * ny), 0);
    parallel_rows(ny, opt.jobs, [&](int j) {
        const double y = ya + (j + 0.5) * (yb - ya) / ny;
        for (int i = 0; i < nx; ++i) {
            const double x = xa + (i + 0.5) * (xb - xa) / nx;
            const auto pc = classify_point(m, pl.at(x, y), opt.roots);
            hit[j * nx + i] = (pc.sig == sig && !pc.on_boundary) ? 1 : 0;
        }
    });
    int count = 0;
    double best = std::numeric_limits<double>::infinity();
    std::pair<double, double> at{};
    for (int j = 1; j + 1 < ny; ++j)
        for (int i = 1; i + 1 < nx; ++i) {
            if (!(hit[j * nx + i] && hit[j * nx + i - 1] && hit[j * nx + i + 1] && hit[(j - 1) * nx + i] &&
                  hit[(j + 1) * nx + i]))
                continue;
            ++count;
            const double d = std::hypot(i + 0.5 - nx / 2.0, j + 0.5 - ny / 2.0);
            if (d < best) {
                best = d;
                at = {xa + (i + 0.5) * (xb - xa) / nx, ya + (j + 0.5) * (yb - ya) / ny};
            }
        }
    if (count < need) return std::nullopt;
    return at;
}

} // namespace detail

/// Classifies every cell centre, marks edge cells and extracts 4-connected regions.
template <class M>
[[nodiscard]] ScanResult scan_plane(const M& m, const PlaneSpec& pl, const ScanOptions& opt = {}) {
    pl.validate();
    const int nx = pl.nx, ny = pl.ny;
    std::vector<PointClass> cells(static_cast<std::size_t>(nx) * ny);
    detail::parallel_rows(ny, opt.jobs, [&](int j) {
        const double y = pl.y_at(j);
        for (int i = 0; i < nx; ++i) cells[j * nx + i] = classify_point(m, pl.at(pl.x_at(i), y), opt.roots);
    });

    ScanResult res;
    res.plane = pl;
    std::map<RegionSignature, int> ids;
    for (const auto& c : cells) ids.emplace(c.sig, 0);
    int next = 0;
    for (auto& [sig, id] : ids) {
        id = next++;
        res.signatures.push_back(sig);
    }
    const std::size_t n = cells.size();
    res.cell_sig.resize(n);
    res.cell_flags.assign(n, 0);
    res.cell_region.assign(n, -1);
    for (std::size_t k = 0; k < n; ++k) {
        res.cell_sig[k] = ids[cells[k].sig];
        if (cells[k].on_boundary) res.cell_flags[k] |= kOnBoundary;
        if (cells[k].disagreement) {
            res.cell_flags[k] |= kDisagree;
            ++res.disagreements;
        }
    }
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int k = res.idx(i, j);
            for (int d = 0; d < 4; ++d) {
                const int a = i + di[d], b = j + dj[d];
                if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
                if (res.cell_sig[res.idx(a, b)] != res.cell_sig[k]) res.cell_flags[k] |= kEdgeCell;
            }
        }
    auto usable = [&](int k) { return !(res.cell_flags[k] & (kOnBoundary | kEdgeCell)); };

    // Flood fill; depth via BFS from the region rim picks a representative cell.
    std::vector<int> depth(n, -1);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int k0 = res.idx(i, j);
            if (!usable(k0) || res.cell_region[k0] >= 0) continue;
            Region reg;
            reg.id = static_cast<int>(res.regions.size());
            reg.signature = res.cell_sig[k0];
            std::vector<int> members{k0};
            res.cell_region[k0] = reg.id;
            for (std::size_t q = 0; q < members.size(); ++q) {
                const int k = members[q], ci = k % nx, cj = k / nx;
                for (int d = 0; d < 4; ++d) {
                    const int a = ci + di[d], b = cj + dj[d];
                    if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
                    const int kk = res.idx(a, b);
                    if (res.cell_region[kk] < 0 && usable(kk) && res.cell_sig[kk] == reg.signature) {
                        res.cell_region[kk] = reg.id;
                        members.push_back(kk);
                    }
                }
            }
            reg.cells = static_cast<int>(members.size());
            std::queue<int> bfs;
            for (int k : members) {
                const int ci = k % nx, cj = k / nx;
                bool rim = false;
                for (int d = 0; d < 4 && !rim; ++d) {
                    const int a = ci + di[d], b = cj + dj[d];
                    rim = a < 0 || b < 0 || a >= nx || b >= ny || res.cell_region[res.idx(a, b)] != reg.id;
                }
                if (rim) {
                    depth[k] = 0;
                    bfs.push(k);
                }
            }
            int best = members.front();
            while (!bfs.empty()) {
                const int k = bfs.front();
                bfs.pop();
                if (depth[k] > depth[best]) best = k;
                const int ci = k % nx, cj = k / nx;
                for (int d = 0; d < 4; ++d) {
                    const int a = ci + di[d], b = cj + dj[d];
                    if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
                    const int kk = res.idx(a, b);
                    if (res.cell_region[kk] == reg.id && depth[kk] < 0) {
                        depth[kk] = depth[k] + 1;
                        bfs.push(kk);
                    }
                }
            }
            reg.rep_i = best % nx;
            reg.rep_j = best / nx;
            reg.rep_x = pl.x_at(reg.rep_i);
            reg.rep_y = pl.y_at(reg.rep_j);
            reg.accepted = reg.cells >= opt.min_region_cells;
            res.regions.push_back(reg);
        }

    // Signatures without an accepted region (thin strips made only of edge cells, or tiny
    // components) are re-sampled around some of their cells at successively doubled resolution.
    const double dx = (pl.x1 - pl.x0) / nx, dy = (pl.y1 - pl.y0) / ny;
    std::vector<char> has_region(res.signatures.size(), 0);
    for (const auto& reg : res.regions)
        if (reg.accepted) has_region[reg.signature] = 1;
    for (int s = 0; s < static_cast<int>(res.signatures.size()); ++s) {
        if (has_region[s]) continue;
        std::vector<int> where;
        for (std::size_t k = 0; k < n; ++k)
            if (res.cell_sig[k] == s && !(res.cell_flags[k] & kOnBoundary)) where.push_back(static_cast<int>(k));
        if (where.empty()) continue;
        const std::size_t stride = std::max<std::size_t>(1, where.size() / opt.refine_probes);
        bool found = false;
        for (int f = 2; f <= opt.max_refine && !found; f *= 2) {
            for (std::size_t q = stride / 2; q < where.size() && !found; q += stride) {
                const int ci = where[q] % nx, cj = where[q] / nx;
                const double xa = pl.x0 + (ci - 1) * dx, ya = pl.y0 + (cj - 1) * dy;
                const auto hit = detail::refine_window(m, pl, xa, xa + 3 * dx, ya, ya + 3 * dy, 3 * f, 3 * f,
                                                       res.signatures[s], opt.min_region_cells, opt);
                if (!hit) continue;
                Region reg;
                reg.id = static_cast<int>(res.regions.size());
                reg.signature = s;
                reg.cells = 0;
                reg.accepted = true;
                reg.refined = true;
                reg.rep_i = ci;
                reg.rep_j = cj;
                reg.rep_x = hit->first;
                reg.rep_y = hit->second;
                res.regions.push_back(reg);
                found = true;
            }
        }
    }
    res.distinct_signatures = static_cast<int>(res.counted_signatures().size());
    return res;
}

} // namespace am2

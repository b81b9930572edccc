#pragma once

// Locating J regions from their defining inequalities, and comparing scanned regions
// against the reference existence/stability rows.

#include "am2/diagram.hpp"

#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>
#include <string>
#include <vector>

namespace am2 {

/// Thresholds at one operating point. Infinite break-evens are +inf, undefined F or phi are NaN,
/// so every comparison against an undefined quantity is false.
struct RegionContext {
    double S1 = 0, S2 = 0, D = 0;
    double l11 = 0, l12 = 0;
    double l2_11 = 0, l2_12 = 0, l2_21 = 0, l2_22 = 0;
    double F11 = 0, F12 = 0, F21 = 0, F22 = 0;
    double phi2 = 0;
    double D1s = 0, D2s = 0, D1m = 0, D2m = 0, r1m1 = 0, r2m1 = 0, S2m = 0;
};

template <class M>
[[nodiscard]] RegionContext region_context(const M& m, const OperatingPoint& op) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    const auto av = aux_values(m, op);
    RegionContext c;
    c.S1 = op.S1in;
    c.S2 = op.S2in;
    c.D = op.D;
    c.l11 = av.be.lam1(1).or_infinity();
    c.l12 = av.be.lam1(2).or_infinity();
    c.l2_11 = av.be.lam2(1, 1).or_infinity();
    c.l2_12 = av.be.lam2(1, 2).or_infinity();
    c.l2_21 = av.be.lam2(2, 1).or_infinity();
    c.l2_22 = av.be.lam2(2, 2).or_infinity();
    c.F11 = av.Fij(1, 1).value_or(nan);
    c.F12 = av.Fij(1, 2).value_or(nan);
    c.F21 = av.Fij(2, 1).value_or(nan);
    c.F22 = av.Fij(2, 2).value_or(nan);
    c.phi2 = av.phi[1].value_or(nan);
    c.D1s = av.cr.D1star;
    c.D2s = av.cr.D2star;
    c.D1m = av.cr.D1m;
    c.D2m = av.cr.D2m;
    c.r1m1 = av.cr.r1m1;
    c.r2m1 = av.cr.r2m1;
    c.S2m = av.cr.S2m;
    return c;
}

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool in(double x, double lo, double hi) { return x > lo && x < hi; }

/// NaN-propagating min/max.
inline double mn(std::initializer_list<double> v) {
    double r = kInf;
    for (double x : v) {
        if (std::isnan(x)) return x;
        r = std::min(r, x);
    }
    return r;
}
inline double mx(std::initializer_list<double> v) {
    double r = -kInf;
    for (double x : v) {
        if (std::isnan(x)) return x;
        r = std::max(r, x);
    }
    return r;
}

struct LocRow {
    int j;
    bool (*test)(const RegionContext&);
};

// Regions of the (D, S1in) plane for r < 1/2, grouped by the S2in range they apply to.
inline const std::vector<LocRow>& rows_low_r_any() {
    static const std::vector<LocRow> rows{
        {6, [](const RegionContext& c) { return in(c.S1, c.l11, c.F22) && c.phi2 < 0 && in(c.D, c.D1m, mn({c.r1m1, c.D2m})); }},
        {7, [](const RegionContext& c) { return in(c.S1, c.l11, c.F22) && c.phi2 > 0 && in(c.D, c.D1m, mn({c.r1m1, c.D2m})); }},
        {8, [](const RegionContext& c) { return in(c.S1, c.F22, c.l11) && in(c.D, c.D1m, mn({c.r2m1, c.D2s, c.D2m})); }},
        {9, [](const RegionContext& c) { return in(c.S1, mx({c.l11, c.F22}), kInf) && in(c.D, c.D1m, mn({c.r1m1, c.r2m1, c.D2m})); }},
        {15, [](const RegionContext& c) { return c.S1 < c.l12 && in(c.D, 0, c.D1s); }},
        {16, [](const RegionContext& c) { return in(c.S1, c.l12, c.l11) && in(c.D, 0, mn({c.r2m1, c.D1s})); }},
        {17, [](const RegionContext& c) { return in(c.S1, c.l11, mn({c.F12, c.F22})) && c.phi2 < 0 && in(c.D, 0, mn({c.r1m1, c.D1s, c.D2m})); }},
        {18, [](const RegionContext& c) { return in(c.S1, c.F12, c.F22) && c.phi2 < 0 && in(c.D, 0, mn({c.r1m1, c.D1s, c.D1m, c.D2m})); }},
        {19, [](const RegionContext& c) { return in(c.S1, c.F12, c.F22) && c.phi2 > 0 && in(c.D, 0, mn({c.r1m1, c.D1s, c.D1m, c.D2m})); }},
        {20, [](const RegionContext& c) { return in(c.S1, mx({c.F12, c.F22}), kInf) && in(c.D, 0, mn({c.r1m1, c.r2m1, c.D1s, c.D1m, c.D2m})); }},
    };
    return rows;
}

inline const std::vector<LocRow>& rows_low_r_high_s2() {
    static const std::vector<LocRow> rows{
        {0, [](const RegionContext& c) { return c.S1 < c.l12 && c.D > c.D2m; }},
        {1, [](const RegionContext& c) { return c.S1 >= c.l12 && c.D > c.D2m; }},
        {2, [](const RegionContext& c) { return c.S1 >= c.l12 && in(c.D, c.D2s, c.D2m); }},
        {3, [](const RegionContext& c) { return c.S1 < c.l12 && in(c.D, c.D2s, c.D2m); }},
        {4, [](const RegionContext& c) { return c.S1 < c.l12 && in(c.D, c.D1m, c.D2s); }},
        {5, [](const RegionContext& c) { return in(c.S1, c.l12, mn({c.l11, c.F22})) && in(c.D, c.D1m, c.r1m1); }},
        {10, [](const RegionContext& c) { return in(c.S1, c.F22, kInf) && in(c.D, c.D1s, mn({c.r2m1, c.D1m, c.D2m})); }},
        {11, [](const RegionContext& c) { return in(c.S1, c.l11, c.F22) && c.phi2 > 0 && in(c.D, c.D1s, mn({c.r1m1, c.D1m, c.D2m})); }},
        {12, [](const RegionContext& c) { return in(c.S1, c.l11, c.F22) && c.phi2 < 0 && in(c.D, c.D1s, mn({c.r1m1, c.D1m, c.D2m})); }},
        {13, [](const RegionContext& c) { return in(c.S1, c.l12, mx({c.l11, c.F22})) && in(c.D, c.D1s, mn({c.r2m1, c.D1m})); }},
        {14, [](const RegionContext& c) { return c.S1 < c.l12 && in(c.D, c.D1s, c.D1m); }},
        {21, [](const RegionContext& c) { return in(c.S1, mx({c.l11, c.l12}), mn({c.F12, c.F22})) && c.phi2 > 0 && in(c.D, 0, mn({c.r1m1, c.r2m1, c.D2m})); }},
        {22, [](const RegionContext& c) { return in(c.S1, mx({c.l11, c.F22}), c.F12) && in(c.D, 0, mn({c.r1m1, c.r2m1, c.D2m})); }},
        {23, [](const RegionContext& c) { return in(c.S1, c.F22, c.l11) && in(c.D, 0, mn({c.r2m1, c.D1s, c.D2m})); }},
        {24, [](const RegionContext& c) { return in(c.S1, c.F22, kInf) && in(c.D, c.D1s, mn({c.r2m1, c.D1m, c.D2m})); }},
    };
    return rows;
}

inline const std::vector<LocRow>& rows_low_r_low_s2() {
    static const std::vector<LocRow> rows{
        {0, [](const RegionContext& c) { return c.S1 < c.l12 && c.D > c.D2s; }},
        {1, [](const RegionContext& c) { return (in(c.S1, c.l12, c.F21) || c.S1 >= c.l12) && (c.D > c.D2m || c.D > c.D2s); }},
        {25, [](const RegionContext& c) { return in(c.S1, c.F21, c.F22) && in(c.D, c.D2s, mn({c.r2m1, c.D2m})); }},
        {26, [](const RegionContext& c) { return in(c.S1, c.F22, kInf) && in(c.D, c.D2s, mn({c.r2m1, c.D2m})); }},
        {27, [](const RegionContext& c) { return in(c.S1, c.F22, kInf) && in(c.D, c.D1s, mn({c.r2m1, c.D1m, c.D2m})); }},
        {28, [](const RegionContext& c) { return in(c.S1, c.F12, c.F22) && c.phi2 > 0 && in(c.D, c.D1s, mn({c.r1m1, c.D1m})); }},
        {29, [](const RegionContext& c) { return in(c.S1, c.F12, c.F22) && c.phi2 < 0 && in(c.D, c.D1s, mn({c.r1m1, c.D1m})); }},
        {30, [](const RegionContext& c) { return in(c.S1, c.F11, c.F12) && in(c.D, c.D1s, mn({c.r1m1, c.D1m})); }},
        {31, [](const RegionContext& c) { return in(c.S1, c.l11, c.F11) && in(c.D, c.D1s, mn({c.r1m1, c.D1m})); }},
        {5, [](const RegionContext& c) { return in(c.S1, c.l12, mn({c.l11, c.F22})) && in(c.D, c.D1s, mn({c.r2m1, c.D2s})); }},
        {4, [](const RegionContext& c) { return c.S1 < c.l12 && in(c.D, c.D1s, c.D2s); }},
    };
    return rows;
}

// (D, S1in) plane for r > 1/2 and S2in above the Haldane peak.
inline const std::vector<LocRow>& rows_high_r() {
    static const std::vector<LocRow> rows{
        {0, [](const RegionContext& c) { return c.S1 < c.l11 && c.D > c.D1m; }},
        {32, [](const RegionContext& c) { return c.S1 >= c.l11 && in(c.D, c.D1m, c.r1m1); }},
        {33, [](const RegionContext& c) { return c.S1 >= c.l11 && in(c.D, c.D1s, mn({c.r1m1, c.D1m})); }},
        {34, [](const RegionContext& c) { return c.S1 < c.l11 && in(c.D, c.D1s, c.D1m); }},
        {35, [](const RegionContext& c) { return c.S1 < c.l11 && in(c.D, c.D2m, c.D1s); }},
        {36, [](const RegionContext& c) { return in(c.S1, c.l11, mn({c.l12, c.F12})) && in(c.D, c.D2m, c.r1m1); }},
        {37, [](const RegionContext& c) { return in(c.S1, c.l12, c.F12) && in(c.D, c.D2m, c.r2m1); }},
        {38, [](const RegionContext& c) { return in(c.S1, c.F12, c.l12) && c.D >= 0 && c.D < mn({c.r1m1, c.D1s, c.D1m}); }},
        {39, [](const RegionContext& c) { return in(c.S1, mx({c.l12, c.F12}), kInf) && in(c.D, c.D2m, mn({c.r1m1, c.r2m1, c.D1m})); }},
        {40, [](const RegionContext& c) { return in(c.S1, c.F12, kInf) && in(c.D, c.D2s, mn({c.r1m1, c.D1m, c.D2m})); }},
        {41, [](const RegionContext& c) { return in(c.S1, c.l12, c.F12) && in(c.D, c.D2s, mn({c.r2m1, c.D2m})); }},
        {42, [](const RegionContext& c) { return in(c.S1, c.l11, c.l12) && in(c.D, c.D2s, mn({c.r1m1, c.D2m})); }},
        {43, [](const RegionContext& c) { return c.S1 < c.l11 && in(c.D, c.D2s, c.D2m); }},
        {15, [](const RegionContext& c) { return c.S1 < c.l11 && in(c.D, 0, c.D2s); }},
        {44, [](const RegionContext& c) { return in(c.S1, c.l11, c.l12) && c.phi2 < 0 && in(c.D, 0, mn({c.r1m1, c.D2s, c.D2m})); }},
        {45, [](const RegionContext& c) { return in(c.S1, c.l11, c.l12) && c.phi2 > 0 && in(c.D, 0, mn({c.r1m1, c.D2s, c.D2m})); }},
        {46, [](const RegionContext& c) { return c.S1 >= c.l12 && c.S1 < c.F22 && c.phi2 < 0 && in(c.D, 0, mn({c.r1m1, c.r2m1, c.D2m})); }},
        {21, [](const RegionContext& c) { return c.S1 >= c.l12 && c.S1 < c.F22 && c.phi2 > 0 && in(c.D, 0, mn({c.r1m1, c.r2m1, c.D2m})); }},
        {22, [](const RegionContext& c) { return in(c.S1, c.F22, c.F12) && in(c.D, 0, mn({c.r2m1, c.D2s, c.D2m})); }},
        {20, [](const RegionContext& c) { return in(c.S1, c.F12, kInf) && in(c.D, 0, mn({c.r1m1, c.D2s, c.D1m})); }},
    };
    return rows;
}

// (S2in, S1in) plane at fixed D, r < 1/2; the S2in band is part of each test.
inline const std::vector<LocRow>& rows_s2_plane() {
    static const std::vector<LocRow> rows{
        {0, [](const RegionContext& c) { return c.S2 < c.l2_21 && c.S1 < c.l12; }},
        {1, [](const RegionContext& c) { return c.S2 < c.l2_21 && in(c.S1, c.l12, c.F21); }},
        {64, [](const RegionContext& c) { return c.S2 < c.l2_21 && in(c.S1, c.F21, c.l11); }},
        {65, [](const RegionContext& c) { return c.S2 < c.l2_21 && in(c.S1, c.l11, c.F11); }},
        {66, [](const RegionContext& c) { return c.S2 < c.l2_21 && in(c.S1, c.F11, c.F12); }},
        {67, [](const RegionContext& c) { return c.S2 < c.l2_21 && in(c.S1, c.F12, c.F22) && c.phi2 < 0; }},
        {68, [](const RegionContext& c) { return c.S2 < c.l2_21 && in(c.S1, c.F12, c.F22) && c.phi2 > 0; }},
        {69, [](const RegionContext& c) { return c.S2 < c.l2_21 && in(c.S1, c.F22, kInf); }},
        {4, [](const RegionContext& c) { return in(c.S2, c.l2_21, c.l2_11) && c.S1 < c.l12; }},
        {5, [](const RegionContext& c) { return in(c.S2, c.l2_21, c.l2_11) && in(c.S1, c.l12, c.l11); }},
        {63, [](const RegionContext& c) { return in(c.S2, c.l2_21, c.l2_11) && in(c.S1, c.l11, c.F11); }},
        {62, [](const RegionContext& c) { return in(c.S2, c.l2_21, c.l2_11) && in(c.S1, c.F11, c.F12); }},
        {61, [](const RegionContext& c) { return in(c.S2, c.l2_21, c.l2_11) && in(c.S1, c.F12, c.F22) && c.phi2 < 0; }},
        {60, [](const RegionContext& c) { return in(c.S2, c.l2_21, c.l2_11) && in(c.S1, c.F12, c.F22) && c.phi2 > 0; }},
        {27, [](const RegionContext& c) { return in(c.S2, c.l2_21, c.l2_11) && in(c.S1, c.F22, kInf); }},
        {15, [](const RegionContext& c) { return in(c.S2, c.l2_11, c.l2_12) && c.S1 < c.l12; }},
        {56, [](const RegionContext& c) { return in(c.S2, c.l2_11, c.l2_12) && in(c.S1, c.l12, c.l11); }},
        {46, [](const RegionContext& c) { return in(c.S2, c.l2_11, c.l2_12) && in(c.S1, c.l11, c.F12); }},
        {57, [](const RegionContext& c) { return in(c.S2, c.l2_11, c.l2_12) && in(c.S1, c.F12, c.F22) && c.phi2 < 0; }},
        {58, [](const RegionContext& c) { return in(c.S2, c.l2_11, c.l2_12) && in(c.S1, c.F12, c.F22) && c.phi2 > 0; }},
        {59, [](const RegionContext& c) { return in(c.S2, c.l2_11, c.l2_12) && in(c.S1, c.F22, kInf); }},
        {50, [](const RegionContext& c) { return in(c.S2, c.l2_12, c.l2_22) && in(c.S1, mx({c.l11, c.F22}), kInf); }},
        {51, [](const RegionContext& c) { return in(c.S2, c.l2_12, c.l2_22) && in(c.S1, c.l11, c.F22) && c.phi2 > 0; }},
        {52, [](const RegionContext& c) { return in(c.S2, c.l2_12, c.l2_22) && in(c.S1, c.l11, c.F22) && c.phi2 < 0; }},
        {53, [](const RegionContext& c) { return in(c.S2, c.l2_12, c.l2_22) && in(c.S1, c.F22, c.l11); }},
        {54, [](const RegionContext& c) { return in(c.S2, c.l2_12, c.l2_22) && in(c.S1, c.l12, mn({c.l11, c.F22})); }},
        {55, [](const RegionContext& c) { return in(c.S2, c.l2_12, c.l2_22) && c.S1 < c.l12; }},
        {47, [](const RegionContext& c) { return c.S2 > c.l2_22 && c.S1 < c.l12; }},
        {48, [](const RegionContext& c) { return c.S2 > c.l2_22 && in(c.S1, c.l12, c.l11); }},
        {49, [](const RegionContext& c) { return c.S2 > c.l2_22 && in(c.S1, c.l11, kInf); }},
    };
    return rows;
}

} // namespace detail

/// Every J region whose defining inequalities hold at the point.
/// The table family follows the plane: (D,S1in) with r below or above 1/2, or (S2in,S1in).
template <class M>
[[nodiscard]] std::vector<int> locate_regions(const M& m, const PlaneSpec& pl, const OperatingPoint& op) {
    const auto c = region_context(m, op);
    std::vector<int> out;
    auto scan = [&](const std::vector<detail::LocRow>& rows) {
        for (const auto& row : rows)
            if (row.test(c)) out.push_back(row.j);
    };
    if (pl.axes == PlaneAxes::S2in_S1in) {
        scan(detail::rows_s2_plane());
    } else if (pl.r < 0.5) {
        scan(detail::rows_low_r_any());
        scan(c.S2 > c.S2m ? detail::rows_low_r_high_s2() : detail::rows_low_r_low_s2());
    } else if (c.S2 > c.S2m) {
        scan(detail::rows_high_r());
    }
    return out;
}

enum class RowCheck { Match, Mismatch, Unlocated };

[[nodiscard]] inline const char* to_string(RowCheck s) {
    switch (s) {
        case RowCheck::Match: return "match";
        case RowCheck::Mismatch: return "mismatch";
        default: return "unlocated";
    }
}

struct RegionCheckEntry {
    int region = 0;
    std::string signature;
    double x = 0.0, y = 0.0;
    std::vector<int> located;   ///< J ids whose inequalities hold at the representative point
    int matched = -1;           ///< located J whose row equals the signature
    RowCheck status = RowCheck::Unlocated;
};

struct RegionCheckReport {
    std::vector<RegionCheckEntry> entries;
    int matches = 0, mismatches = 0, unlocated = 0;
};

/// Exists/stable pattern of a signature compared with a table row (branch parity ignored).
[[nodiscard]] inline bool signature_matches_row(const RegionSignature& sig, const RegionRow& row) {
    std::string t = sig.text();
    for (auto& ch : t) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return t == row.code;
}

template <class M>
[[nodiscard]] RegionCheckReport region_table_check(const M& m, const ScanResult& scan) {
    RegionCheckReport rep;
    std::vector<char> seen(scan.signatures.size(), 0);
    for (const auto& reg : scan.regions) {
        if (!reg.accepted || seen[reg.signature]) continue;
        seen[reg.signature] = 1;
        RegionCheckEntry e;
        e.region = reg.id;
        const auto& sig = scan.signatures[reg.signature];
        e.signature = sig.text();
        e.x = reg.rep_x;
        e.y = reg.rep_y;
        e.located = locate_regions(m, scan.plane, scan.plane.at(e.x, e.y));
        for (int j : e.located)
            if (signature_matches_row(sig, *region_row(j))) {
                e.matched = j;
                break;
            }
        e.status = e.located.empty() ? RowCheck::Unlocated : e.matched >= 0 ? RowCheck::Match : RowCheck::Mismatch;
        switch (e.status) {
            case RowCheck::Match: ++rep.matches; break;
            case RowCheck::Mismatch: ++rep.mismatches; break;
            default: ++rep.unlocated; break;
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

} // namespace am2

#pragma once

// Steady states of the reduced cascade and their existence conditions.

#include "am2/kinetics.hpp"
#include "am2/roots.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace am2 {

// ============================================================================
// Labels
// ============================================================================

/// E_{ij}^{kl}: (i,j) describe the first tank, (k,l) the second.
/// i,k flag the acidogenic species; j,l name the Haldane root (0 = absent).
struct Label {
    int i = 0, j = 0, k = 0, l = 0;
    friend bool operator==(const Label&, const Label&) = default;

    [[nodiscard]] std::string str() const {
        std::string s = "E";
        s += char('0' + i);
        s += char('0' + j);
        s += '^';
        s += char('0' + k);
        s += char('0' + l);
        return s;
    }
};

/// The fifteen candidate equilibria, in the column order used by the region table.
inline constexpr std::array<Label, 15> kLabels{{
    {0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 2}, {0, 0, 1, 0}, {0, 0, 1, 1},
    {0, 0, 1, 2}, {1, 0, 1, 0}, {1, 0, 1, 1}, {1, 0, 1, 2}, {0, 1, 0, 1},
    {0, 2, 0, 1}, {0, 1, 1, 1}, {0, 2, 1, 1}, {1, 1, 1, 1}, {1, 2, 1, 1},
}};

[[nodiscard]] inline int label_index(const Label& lb) {
    for (std::size_t n = 0; n < kLabels.size(); ++n)
        if (kLabels[n] == lb) return static_cast<int>(n);
    return -1;
}

[[nodiscard]] inline std::optional<Label> parse_label(std::string_view s) {
    if (s.size() != 6 || s[0] != 'E' || s[3] != '^') return std::nullopt;
    Label lb{s[1] - '0', s[2] - '0', s[4] - '0', s[5] - '0'};
    if (label_index(lb) < 0) return std::nullopt;
    return lb;
}

// ============================================================================
// Auxiliary functions g1, g2, f1, f2, f3
// ============================================================================

/// Second-tank balance curves. X11/X21 are the first-tank biomasses feeding tank 2,
/// X12 is the second-tank acidogenic biomass used by f3.
template <class M>
struct AuxFunctions {
    const M* model = nullptr;
    OperatingPoint op;
    double X11 = 0.0, X21 = 0.0, X12 = 0.0;

    [[nodiscard]] double D2() const { return op.D2(); }
    [[nodiscard]] double g1(double x) const { return D2() * (x - X11) / x; }
    [[nodiscard]] double g2(double x) const { return D2() * (x - X21) / x; }
    [[nodiscard]] double dg1(double x) const { return D2() * X11 / (x * x); }
    [[nodiscard]] double dg2(double x) const { return D2() * X21 / (x * x); }

    [[nodiscard]] double f1(double x) const { return model->mu1(std::max(0.0, op.S1in - model->k1 * x)); }
    [[nodiscard]] double f2(double x) const { return model->mu2(std::max(0.0, op.S2in - model->k3 * x)); }
    [[nodiscard]] double f3(double x) const { return model->mu2(std::max(0.0, f3_feed() - model->k3 * x)); }
    [[nodiscard]] double df1(double x) const { return -model->k1 * model->mu1.derivative(std::max(0.0, op.S1in - model->k1 * x)); }
    [[nodiscard]] double df2(double x) const { return -model->k3 * model->mu2.derivative(std::max(0.0, op.S2in - model->k3 * x)); }
    [[nodiscard]] double df3(double x) const { return -model->k3 * model->mu2.derivative(std::max(0.0, f3_feed() - model->k3 * x)); }

    [[nodiscard]] double f3_feed() const { return op.S2in + model->k2 * X12; }
    [[nodiscard]] double f1_end() const { return op.S1in / model->k1; }
    [[nodiscard]] double f2_end() const { return op.S2in / model->k3; }
    [[nodiscard]] double f3_end() const { return f3_feed() / model->k3; }
    /// Argmax of f2 and f3 (may be negative, in which case they are decreasing throughout).
    [[nodiscard]] double x1m() const { return (op.S2in - model->mu2_peak()) / model->k3; }
    [[nodiscard]] double x2m() const { return (f3_feed() - model->mu2_peak()) / model->k3; }
};

template <class M>
[[nodiscard]] AuxFunctions<M> aux_functions(const M& m, const OperatingPoint& op, double X11, double X21, double X12) {
    return AuxFunctions<M>{&m, op, X11, X21, X12};
}

struct RootSet {
    std::vector<ScalarRoot> roots;
    bool unique_by_shape = false;    ///< interval starts past the peak, so a single crossing is guaranteed
    bool at_shape_threshold = false; ///< X21 equals the peak abscissa to round-off
};

/// Root of f1 = g1 on (X11, S1in/k1); unique because f1 falls and g1 rises there.
template <class M>
[[nodiscard]] double solve_f1_g1(const M& m, const OperatingPoint& op, double X11, const RootScanOptions& opt = {}) {
    const auto a = aux_functions(m, op, X11, 0.0, 0.0);
    const double lo = X11, hi = a.f1_end();
    if (!(X11 > 0.0) || !(lo < hi)) throw InfeasibleError("f1=g1 needs 0 < X11 < S1in/k1");
    auto h = [&](double x) { return a.f1(x) - a.g1(x); };
    return bisect(h, lo, hi, h(lo), opt);
}

namespace detail {

template <class H>
RootSet solve_haldane_balance(H&& h, double lo, double hi, double peak_x, const RootScanOptions& opt) {
    if (!(lo < hi)) throw InfeasibleError("empty interval for the methanogen balance");
    RootSet rs;
    rs.at_shape_threshold = std::abs(lo - peak_x) <= 1e-12 * (1.0 + std::abs(peak_x));
    rs.unique_by_shape = lo >= peak_x || rs.at_shape_threshold;
    if (rs.unique_by_shape) {
        rs.roots.push_back({bisect(h, lo, hi, h(lo), opt), false});
    } else {
        rs.roots = scan_roots(h, lo, hi, opt);
        if (rs.roots.empty()) throw InfeasibleError("no root found in a bracket with a guaranteed sign change");
    }
    return rs;
}

} // namespace detail

/// Roots of f2 = g2 on (X21, S2in/k3).
template <class M>
[[nodiscard]] RootSet solve_f2_g2(const M& m, const OperatingPoint& op, double X21, const RootScanOptions& opt = {}) {
    const auto a = aux_functions(m, op, 0.0, X21, 0.0);
    if (!(X21 > 0.0)) throw InfeasibleError("f2=g2 needs X21 > 0");
    return detail::solve_haldane_balance([&](double x) { return a.f2(x) - a.g2(x); }, X21, a.f2_end(), a.x1m(), opt);
}

/// Roots of f3 = g2 on (X21, (S2in + k2 X12)/k3).
template <class M>
[[nodiscard]] RootSet solve_f3_g2(const M& m, const OperatingPoint& op, double X21, double X12,
                                  const RootScanOptions& opt = {}) {
    const auto a = aux_functions(m, op, 0.0, X21, X12);
    if (!(X21 > 0.0)) throw InfeasibleError("f3=g2 needs X21 > 0");
    return detail::solve_haldane_balance([&](double x) { return a.f3(x) - a.g2(x); }, X21, a.f3_end(), a.x2m(), opt);
}

// ============================================================================
// Auxiliary values
// ============================================================================

/// Break-evens plus the derived thresholds F_ij and phi_j for one operating point.
struct AuxValues {
    BreakEvens be;
    CriticalRates cr;
    std::array<std::array<std::optional<double>, 2>, 2> F{};  ///< F[i-1][j-1]
    std::optional<double> X11;  ///< first-tank acidogens when S1in > lambda1^1
    std::optional<double> X12;  ///< matching second-tank acidogens (root of f1 = g1)
    std::array<std::optional<double>, 2> phi{};
    /// S2in thresholds lambda2^11, lambda2^21, lambda2^12, lambda2^22.
    [[nodiscard]] std::array<BreakEven, 4> s2in_stars() const {
        return {be.lam2(1, 1), be.lam2(2, 1), be.lam2(1, 2), be.lam2(2, 2)};
    }
    [[nodiscard]] std::optional<double> Fij(int i, int j) const { return F[i - 1][j - 1]; }
};

template <class M>
[[nodiscard]] AuxValues aux_values(const M& m, const OperatingPoint& op, const RootScanOptions& opt = {}) {
    AuxValues av;
    av.be = break_evens(m, op);
    av.cr = critical_rates(m, op);
    const double Dm[2] = {av.cr.D1m, av.cr.D2m};
    for (int i = 1; i <= 2; ++i) {
        if (!(op.D > 0.0) || !(op.D < Dm[i - 1]) || !av.be.lam1(i).is_finite()) continue;
        for (int j = 1; j <= 2; ++j) {
            const auto& l2 = av.be.lam2(i, j);
            if (!l2.is_finite()) continue;
            av.F[i - 1][j - 1] = av.be.lam1(i).value() + (m.k1 / m.k2) * (l2.value() - op.S2in);
        }
    }
    if (av.be.lam1(1).exceeded_by(op.S1in)) {
        av.X11 = (op.S1in - av.be.lam1(1).value()) / m.k1;
        av.X12 = solve_f1_g1(m, op, *av.X11, opt);
        if (op.D > 0.0 && op.D <= av.cr.D2m) {
            for (int j = 1; j <= 2; ++j) {
                const auto& l2 = av.be.lam2(2, j);
                if (l2.is_finite()) av.phi[j - 1] = op.S2in + m.k2 * *av.X12 - l2.value();
            }
        }
    }
    return av;
}

// ============================================================================
// Steady states
// ============================================================================

struct SteadyState {
    Label label;
    int branch = 1;        ///< 1..branch_count, ascending in X2^2
    int branch_count = 1;
    bool exists = false;
    bool tangency = false;
    std::string condition;  ///< existence condition and how it evaluated
    std::array<double, 4> x{};  ///< (X1^1, X2^1, X1^2, X2^2), meaningful when exists
};

namespace detail {

inline std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
}

inline std::string fmt_be(const BreakEven& b) { return b.is_finite() ? fmt_num(b.value()) : std::string("inf"); }

inline std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_num(*v) : std::string("undefined"); }

/// "S1in > lambda1^2 (5 > 7.1: fails)"
inline std::string cond_text(const std::string& lhs, double lv, const std::string& rhs, const std::string& rv,
                             bool holds) {
    return lhs + " > " + rhs + " (" + fmt_num(lv) + " > " + rv + ": " + (holds ? "holds" : "fails") + ")";
}

} // namespace detail

/// All candidate equilibria in label order; multi-root families yield one entry per branch.
template <class M>
[[nodiscard]] std::vector<SteadyState> enumerate_steady_states(const M& m, const OperatingPoint& op,
                                                               const AuxValues& av, const RootScanOptions& opt = {}) {
    using detail::cond_text;
    using detail::fmt_be;
    using detail::fmt_opt;
    std::vector<SteadyState> out;
    out.reserve(20);
    const auto& be = av.be;
    const double S1 = op.S1in, S2 = op.S2in;
    const double k1 = m.k1, k2 = m.k2, k3 = m.k3;

    auto push = [&](Label lb, bool ex, std::string cond, std::array<double, 4> x = {}) {
        SteadyState s;
        s.label = lb;
        s.exists = ex;
        s.condition = std::move(cond);
        s.x = x;
        out.push_back(std::move(s));
    };
    auto push_branches = [&](Label lb, const std::string& cond, std::array<double, 4> base, const RootSet& rs) {
        const int n = static_cast<int>(rs.roots.size());
        for (int b = 0; b < n; ++b) {
            SteadyState s;
            s.label = lb;
            s.exists = true;
            s.branch = b + 1;
            s.branch_count = n;
            s.tangency = rs.roots[b].tangency;
            s.condition = cond;
            s.x = base;
            s.x[3] = rs.roots[b].x;
            out.push_back(std::move(s));
        }
    };

    const bool s1_gt_l12 = be.lam1(2).exceeded_by(S1);
    const bool s1_gt_l11 = be.lam1(1).exceeded_by(S1);
    const double X12_plain = s1_gt_l12 ? (S1 - be.lam1(2).value()) / k1 : 0.0;

    // E00^00
    push({0, 0, 0, 0}, true, "always");

    // E00^01, E00^02
    for (int j = 1; j <= 2; ++j) {
        const auto& l = be.lam2(2, j);
        const bool ex = l.exceeded_by(S2);
        push({0, 0, 0, j}, ex, cond_text("S2in", S2, "lambda2^2" + std::to_string(j), fmt_be(l), ex),
             {0.0, 0.0, 0.0, ex ? (S2 - l.value()) / k3 : 0.0});
    }

    // E00^10
    push({0, 0, 1, 0}, s1_gt_l12, cond_text("S1in", S1, "lambda1^2", fmt_be(be.lam1(2)), s1_gt_l12),
         {0.0, 0.0, X12_plain, 0.0});

    // E00^11, E00^12
    for (int j = 1; j <= 2; ++j) {
        const auto F = av.Fij(2, j);
        const bool ex = s1_gt_l12 && F && S1 > *F;
        const std::string cond = cond_text("S1in", S1, "max(lambda1^2,F2" + std::to_string(j) + ")",
                                           "max(" + fmt_be(be.lam1(2)) + "," + fmt_opt(F) + ")", ex);
        push({0, 0, 1, j}, ex, cond, {0.0, 0.0, X12_plain, ex ? k2 * (S1 - *F) / (k1 * k3) : 0.0});
    }

    // E10^10, E10^11, E10^12
    {
        const std::string cond = cond_text("S1in", S1, "lambda1^1", fmt_be(be.lam1(1)), s1_gt_l11);
        std::array<double, 4> base{};
        if (s1_gt_l11) base = {*av.X11, 0.0, *av.X12, 0.0};
        push({1, 0, 1, 0}, s1_gt_l11, cond, base);
        for (int j = 1; j <= 2; ++j) {
            const auto& ph = av.phi[j - 1];
            const bool ex = s1_gt_l11 && ph && *ph > 0.0;
            std::array<double, 4> x = base;
            if (ex) x[3] = *ph / k3;
            push({1, 0, 1, j}, ex,
                 cond + " and phi" + std::to_string(j) + " > 0 (" + fmt_opt(ph) + (ex ? ": holds)" : ": fails)"), x);
        }
    }

    // E0j^01
    for (int j = 1; j <= 2; ++j) {
        const auto& l = be.lam2(1, j);
        const bool ex = l.exceeded_by(S2);
        const std::string cond = cond_text("S2in", S2, "lambda2^1" + std::to_string(j), fmt_be(l), ex);
        if (!ex) {
            push({0, j, 0, 1}, false, cond);
            continue;
        }
        const double X21 = (S2 - l.value()) / k3;
        push_branches({0, j, 0, 1}, cond, {0.0, X21, 0.0, 0.0}, solve_f2_g2(m, op, X21, opt));
    }

    // E01^11, E02^11
    for (int j = 1; j <= 2; ++j) {
        const auto& l = be.lam2(1, j);
        const bool ex = s1_gt_l12 && l.exceeded_by(S2);
        const std::string cond = cond_text("S1in", S1, "lambda1^2", fmt_be(be.lam1(2)), s1_gt_l12) + " and " +
                                 cond_text("S2in", S2, "lambda2^1" + std::to_string(j), fmt_be(l), l.exceeded_by(S2));
        if (!ex) {
            push({0, j, 1, 1}, false, cond);
            continue;
        }
        const double X21 = (S2 - l.value()) / k3;
        push_branches({0, j, 1, 1}, cond, {0.0, X21, X12_plain, 0.0}, solve_f3_g2(m, op, X21, X12_plain, opt));
    }

    // E11^11, E12^11
    for (int j = 1; j <= 2; ++j) {
        const auto F = av.Fij(1, j);
        const bool ex = s1_gt_l11 && F && S1 > *F;
        const std::string cond = cond_text("S1in", S1, "max(lambda1^1,F1" + std::to_string(j) + ")",
                                           "max(" + fmt_be(be.lam1(1)) + "," + fmt_opt(F) + ")", ex);
        if (!ex) {
            push({1, j, 1, 1}, false, cond);
            continue;
        }
        const double X21 = k2 * (S1 - *F) / (k1 * k3);
        push_branches({1, j, 1, 1}, cond, {*av.X11, X21, *av.X12, 0.0}, solve_f3_g2(m, op, X21, *av.X12, opt));
    }
    return out;
}

template <class M>
[[nodiscard]] std::vector<SteadyState> enumerate_steady_states(const M& m, const OperatingPoint& op,
                                                               const RootScanOptions& opt = {}) {
    op.validate();
    return enumerate_steady_states(m, op, aux_values(m, op, opt), opt);
}

// ============================================================================
// Reduced <-> full state
// ============================================================================

/// Membership in the invariant set of the reduced system, with a small relative slack.
template <class M>
[[nodiscard]] bool in_reduced_set(const M& m, const OperatingPoint& op, const std::array<double, 4>& x,
                                  double slack = 1e-9) {
    const double tol1 = slack * (1.0 + op.S1in / m.k1);
    for (double v : x)
        if (v < -slack) return false;
    if (x[0] > op.S1in / m.k1 + tol1 || x[2] > op.S1in / m.k1 + tol1) return false;
    for (int st = 0; st < 2; ++st) {
        const double cap = (op.S2in + m.k2 * x[2 * st]) / m.k3;
        if (x[2 * st + 1] > cap + slack * (1.0 + cap)) return false;
    }
    return true;
}

/// (S1^1, X1^1, S2^1, X2^1, S1^2, X1^2, S2^2, X2^2) on the conservation manifold.
template <class M>
[[nodiscard]] std::array<double, 8> reconstruct_full_state(const M& m, const OperatingPoint& op,
                                                           const std::array<double, 4>& x) {
    if (!in_reduced_set(m, op, x)) throw DomainError("reduced state lies outside the invariant set");
    std::array<double, 8> f{};
    for (int st = 0; st < 2; ++st) {
        const double X1 = x[2 * st], X2 = x[2 * st + 1];
        f[4 * st + 0] = std::max(0.0, op.S1in - m.k1 * X1);
        f[4 * st + 1] = X1;
        f[4 * st + 2] = std::max(0.0, op.S2in - m.k3 * X2 + m.k2 * X1);
        f[4 * st + 3] = X2;
    }
    return f;
}

} // namespace am2

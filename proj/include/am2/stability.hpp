#pragma once

// Local stability of the reduced steady states: closed-form conditions and Jacobian spectra.

#include "am2/equilibria.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace am2 {

// ============================================================================
// Jacobians
// ============================================================================

/// Nonzero entries of the reduced Jacobian in (X1^1, X2^1, X1^2, X2^2) order.
/// The matrix is lower triangular, so its eigenvalues are a11, a22, a33, a44.
struct JacobianBlocks {
    double a11 = 0, a21 = 0, a22 = 0;
    double a31 = 0, a33 = 0;
    double a42 = 0, a43 = 0, a44 = 0;

    [[nodiscard]] std::array<double, 4> eigenvalues() const { return {a11, a22, a33, a44}; }

    [[nodiscard]] Eigen::Matrix4d matrix() const {
        Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
        J(0, 0) = a11;
        J(1, 0) = a21;
        J(1, 1) = a22;
        J(2, 0) = a31;
        J(2, 2) = a33;
        J(3, 1) = a42;
        J(3, 2) = a43;
        J(3, 3) = a44;
        return J;
    }
};

template <class M>
[[nodiscard]] JacobianBlocks jacobian_at(const M& m, const OperatingPoint& op, const std::array<double, 4>& x) {
    const double D1 = op.D1(), D2 = op.D2();
    const double s1 = std::max(0.0, op.S1in - m.k1 * x[0]);
    const double u = std::max(0.0, op.S2in + m.k2 * x[0] - m.k3 * x[1]);
    const double s2 = std::max(0.0, op.S1in - m.k1 * x[2]);
    const double v = std::max(0.0, op.S2in + m.k2 * x[2] - m.k3 * x[3]);
    JacobianBlocks J;
    J.a11 = m.mu1(s1) - D1 - m.k1 * m.mu1.derivative(s1) * x[0];
    J.a21 = m.k2 * m.mu2.derivative(u) * x[1];
    J.a22 = m.mu2(u) - D1 - m.k3 * m.mu2.derivative(u) * x[1];
    J.a31 = D2;
    J.a33 = m.mu1(s2) - D2 - m.k1 * m.mu1.derivative(s2) * x[2];
    J.a42 = D2;
    J.a43 = m.k2 * m.mu2.derivative(v) * x[3];
    J.a44 = m.mu2(v) - D2 - m.k3 * m.mu2.derivative(v) * x[3];
    return J;
}

/// Jacobian of the full 8-dimensional cascade at xi = (S1^1, X1^1, S2^1, X2^1, S1^2, X1^2, S2^2, X2^2).
template <class M>
[[nodiscard]] Eigen::Matrix<double, 8, 8> full_jacobian(const M& m, const OperatingPoint& op,
                                                        const std::array<double, 8>& xi) {
    const double D1 = op.D1(), D2 = op.D2();
    const double k1 = m.k1, k2 = m.k2, k3 = m.k3;
    Eigen::Matrix<double, 8, 8> J = Eigen::Matrix<double, 8, 8>::Zero();
    // Per-tank reaction block; column offsets c and row offsets c coincide.
    for (int st = 0; st < 2; ++st) {
        const int c = 4 * st;
        const double D = st == 0 ? D1 : D2;
        const double S1 = std::max(0.0, xi[c + 0]), X1 = xi[c + 1];
        const double S2 = std::max(0.0, xi[c + 2]), X2 = xi[c + 3];
        const double m1v = m.mu1(S1), m1d = m.mu1.derivative(S1);
        const double m2v = m.mu2(S2), m2d = m.mu2.derivative(S2);
        J(c + 0, c + 0) = -D - k1 * m1d * X1;
        J(c + 0, c + 1) = -k1 * m1v;
        J(c + 1, c + 0) = m1d * X1;
        J(c + 1, c + 1) = m1v - D;
        J(c + 2, c + 0) = k2 * m1d * X1;
        J(c + 2, c + 1) = k2 * m1v;
        J(c + 2, c + 2) = -D - k3 * m2d * X2;
        J(c + 2, c + 3) = -k3 * m2v;
        J(c + 3, c + 2) = m2d * X2;
        J(c + 3, c + 3) = m2v - D;
    }
    // Inflow of tank 1 into tank 2.
    for (int k = 0; k < 4; ++k) J(4 + k, k) = D2;
    return J;
}

// ============================================================================
// Verdicts
// ============================================================================

enum class AnalyticVerdict { Stable, Unstable, Boundary };
enum class NumericVerdict { Stable, Unstable, Marginal };

[[nodiscard]] inline const char* to_string(AnalyticVerdict v) {
    switch (v) {
        case AnalyticVerdict::Stable: return "stable";
        case AnalyticVerdict::Unstable: return "unstable";
        default: return "boundary";
    }
}

[[nodiscard]] inline const char* to_string(NumericVerdict v) {
    switch (v) {
        case NumericVerdict::Stable: return "stable";
        case NumericVerdict::Unstable: return "unstable";
        default: return "marginal";
    }
}

inline constexpr double kEigenMargin = 1e-8;

[[nodiscard]] inline NumericVerdict classify_eigenvalues(const std::array<double, 4>& ev, double margin = kEigenMargin) {
    const double mx = *std::max_element(ev.begin(), ev.end());
    if (mx < -margin) return NumericVerdict::Stable;
    if (mx > margin) return NumericVerdict::Unstable;
    return NumericVerdict::Marginal;
}

template <class M>
[[nodiscard]] NumericVerdict classify_numeric(const M& m, const OperatingPoint& op, const SteadyState& s) {
    return classify_eigenvalues(jacobian_at(m, op, s.x).eigenvalues());
}

// ============================================================================
// Closed-form conditions
// ============================================================================

/// Three-valued truth for comparisons that may sit on a boundary.
enum class Tri { False, True, Edge };

[[nodiscard]] inline Tri tri_and(Tri a, Tri b) {
    if (a == Tri::False || b == Tri::False) return Tri::False;
    if (a == Tri::Edge || b == Tri::Edge) return Tri::Edge;
    return Tri::True;
}

[[nodiscard]] inline Tri tri_or(Tri a, Tri b) {
    if (a == Tri::True || b == Tri::True) return Tri::True;
    if (a == Tri::Edge || b == Tri::Edge) return Tri::Edge;
    return Tri::False;
}

inline constexpr double kCompareRelTol = 1e-12;

/// a < b, or Edge when the two agree to round-off.
[[nodiscard]] inline Tri tri_less(double a, double b) {
    if (std::abs(a - b) <= kCompareRelTol * (1.0 + std::abs(a) + std::abs(b))) return Tri::Edge;
    return a < b ? Tri::True : Tri::False;
}

/// s < lambda, with an infinite lambda always true.
[[nodiscard]] inline Tri tri_below(double s, const BreakEven& l) {
    return l.is_finite() ? tri_less(s, l.value()) : Tri::True;
}

/// s outside [lo, hi]; an infinite pair is an empty interval.
[[nodiscard]] inline Tri tri_outside(double s, const BreakEvenPair& p) {
    if (!p.lower.is_finite()) return Tri::True;
    const Tri below = tri_less(s, p.lower.value());
    const Tri above = p.upper.is_finite() ? tri_less(p.upper.value(), s) : Tri::False;
    return tri_or(below, above);
}

struct AnalyticResult {
    AnalyticVerdict verdict = AnalyticVerdict::Boundary;
    std::string clause;  ///< which stability condition was applied
};

[[nodiscard]] inline AnalyticVerdict to_verdict(Tri t) {
    return t == Tri::True ? AnalyticVerdict::Stable : t == Tri::False ? AnalyticVerdict::Unstable : AnalyticVerdict::Boundary;
}

/// Closed-form stability of an existing steady state.
template <class M>
[[nodiscard]] AnalyticResult classify_analytic(const M& m, const OperatingPoint& op, const AuxValues& av,
                                               const SteadyState& s) {
    if (!s.exists) throw DomainError("stability requested for a steady state that does not exist");
    const auto& be = av.be;
    const double S1 = op.S1in, S2 = op.S2in;
    const Tri s1_lt_l11 = tri_below(S1, be.lam1(1));
    const Tri s1_lt_l12 = tri_below(S1, be.lam1(2));
    const Tri s2_out_1 = tri_outside(S2, be.l2[0]);
    const Tri s2_out_2 = tri_outside(S2, be.l2[1]);

    // Sign of g2' - f3' at the selected X2^2 root.
    auto slope_test = [&]() {
        const auto a = aux_functions(m, op, 0.0, s.x[1], s.x[2]);
        const double g = a.dg2(s.x[3]), f = a.df3(s.x[3]);
        if (std::abs(g - f) <= 1e-10 * std::max(1e-300, std::abs(g) + std::abs(f))) return Tri::Edge;
        return g > f ? Tri::True : Tri::False;
    };
    // S2 seen by tank 1 at E10-type states.
    auto stage1_feed = [&]() { return S2 + (m.k2 / m.k1) * (S1 - be.lam1(1).value()); };

    const Label& lb = s.label;
    AnalyticResult r;
    if (lb.j == 2 || lb.l == 2) {
        r.clause = "always unstable (upper Haldane root)";
        r.verdict = AnalyticVerdict::Unstable;
        return r;
    }
    Tri t = Tri::Edge;
    if (lb == Label{0, 0, 0, 0}) {
        r.clause = "S1in<lambda1^1 & S1in<lambda1^2 & S2in outside [lambda2^11,lambda2^12] & S2in outside [lambda2^21,lambda2^22]";
        t = tri_and(tri_and(s1_lt_l11, s1_lt_l12), tri_and(s2_out_1, s2_out_2));
    } else if (lb == Label{0, 0, 0, 1}) {
        r.clause = "S1in<min(lambda1^1,lambda1^2) & S2in outside [lambda2^11,lambda2^12]";
        t = tri_and(tri_and(s1_lt_l11, s1_lt_l12), s2_out_1);
    } else if (lb == Label{0, 0, 1, 0}) {
        r.clause = "S1in<lambda1^1 & S2in outside [lambda2^11,lambda2^12] & S2in+k2/k1(S1in-lambda1^2) outside [lambda2^21,lambda2^22]";
        const double feed = S2 + (m.k2 / m.k1) * (S1 - be.lam1(2).value());
        t = tri_and(tri_and(s1_lt_l11, s2_out_1), tri_outside(feed, be.l2[1]));
    } else if (lb == Label{0, 0, 1, 1}) {
        r.clause = "S1in<lambda1^1 & S2in outside [lambda2^11,lambda2^12]";
        t = tri_and(s1_lt_l11, s2_out_1);
    } else if (lb == Label{1, 0, 1, 0}) {
        r.clause = "S2in+k2/k1(S1in-lambda1^1) outside [lambda2^11,lambda2^12] & (phi1<0 | phi2>0)";
        Tri lower = Tri::True;  // phi undefined means D > D2^m, where the second tank cannot host methanogens
        if (av.phi[0] && av.phi[1]) lower = tri_or(tri_less(*av.phi[0], 0.0), tri_less(0.0, *av.phi[1]));
        t = tri_and(tri_outside(stage1_feed(), be.l2[0]), lower);
    } else if (lb == Label{1, 0, 1, 1}) {
        r.clause = "S2in+k2/k1(S1in-lambda1^1) outside [lambda2^11,lambda2^12]";
        t = tri_outside(stage1_feed(), be.l2[0]);
    } else if (lb == Label{0, 1, 0, 1}) {
        r.clause = "S1in<min(lambda1^1,lambda1^2)";
        t = tri_and(s1_lt_l11, s1_lt_l12);
    } else if (lb == Label{0, 1, 1, 1}) {
        r.clause = "S1in<lambda1^1 & g2'(X2^2)>f3'(X2^2)";
        t = tri_and(s1_lt_l11, slope_test());
    } else if (lb == Label{1, 1, 1, 1}) {
        r.clause = "g2'(X2^2)>f3'(X2^2)";
        t = slope_test();
    } else {
        throw DomainError("unknown steady-state label " + lb.str());
    }
    r.verdict = to_verdict(t);
    return r;
}

struct Crosscheck {
    AnalyticVerdict analytic = AnalyticVerdict::Boundary;
    std::string clause;
    NumericVerdict numeric = NumericVerdict::Marginal;
    std::array<double, 4> eigenvalues{};
    bool agree = false;          ///< same verdict, with Boundary matching Marginal
    bool near_boundary = false;  ///< either route reported a boundary or marginal case
    double margin = 0.0;         ///< smallest |eigenvalue|
};

template <class M>
[[nodiscard]] Crosscheck crosscheck(const M& m, const OperatingPoint& op, const AuxValues& av, const SteadyState& s) {
    Crosscheck c;
    const auto an = classify_analytic(m, op, av, s);
    c.analytic = an.verdict;
    c.clause = an.clause;
    c.eigenvalues = jacobian_at(m, op, s.x).eigenvalues();
    c.numeric = classify_eigenvalues(c.eigenvalues);
    c.near_boundary = c.analytic == AnalyticVerdict::Boundary || c.numeric == NumericVerdict::Marginal;
    c.agree = (c.analytic == AnalyticVerdict::Stable && c.numeric == NumericVerdict::Stable) ||
              (c.analytic == AnalyticVerdict::Unstable && c.numeric == NumericVerdict::Unstable) ||
              (c.analytic == AnalyticVerdict::Boundary && c.numeric == NumericVerdict::Marginal);
    c.margin = std::abs(c.eigenvalues[0]);
    for (double e : c.eigenvalues) c.margin = std::min(c.margin, std::abs(e));
    return c;
}

/// Steady state together with its stability report.
struct ClassifiedState {
    SteadyState state;
    Crosscheck check;
    [[nodiscard]] bool stable() const {
        return state.exists && check.analytic == AnalyticVerdict::Stable;
    }
};

template <class M>
[[nodiscard]] std::vector<ClassifiedState> classify_all(const M& m, const OperatingPoint& op, const AuxValues& av,
                                                        const std::vector<SteadyState>& states) {
    std::vector<ClassifiedState> out;
    out.reserve(states.size());
    for (const auto& s : states) {
        ClassifiedState c{s, {}};
        if (s.exists) c.check = crosscheck(m, op, av, s);
        out.push_back(std::move(c));
    }
    return out;
}

/// Throws when the two routes disagree away from a boundary.
inline void require_agreement(const Crosscheck& c, const Label& lb) {
    if (!c.agree && !c.near_boundary)
        throw ConsistencyError("analytic and numeric stability disagree for " + lb.str() + " (" + to_string(c.analytic) +
                               " vs " + to_string(c.numeric) + ")");
}

} // namespace am2

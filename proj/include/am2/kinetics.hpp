#pragma once

// Growth laws, kinetic constants, operating points and break-even concentrations.

#include "am2/errors.hpp"

#include <array>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace am2 {

// ============================================================================
// Growth laws
// ============================================================================

enum class GrowthClass { Monotone, UnimodalWithPeak };

/// Monod law m*s/(ks+s).
struct Monod {
    double m = 0.0;
    double ks = 0.0;

    [[nodiscard]] double operator()(double s) const noexcept { return m * s / (ks + s); }
    [[nodiscard]] double derivative(double s) const noexcept {
        const double den = ks + s;
        return m * ks / (den * den);
    }
    [[nodiscard]] double supremum() const noexcept { return m; }

    /// Unique s with mu(s) = rate, empty when rate >= m.
    [[nodiscard]] std::optional<double> inverse(double rate) const noexcept {
        if (rate >= m) return std::nullopt;
        if (rate <= 0.0) return 0.0;
        return ks * rate / (m - rate);
    }
};

/// Haldane law m*s/(ks+s+s^2/ki), peaked at sqrt(ks*ki).
struct Haldane {
    double m = 0.0;
    double ks = 0.0;
    double ki = 0.0;

    [[nodiscard]] double operator()(double s) const noexcept { return m * s / (ks + s + s * s / ki); }
    [[nodiscard]] double derivative(double s) const noexcept {
        const double den = ks + s + s * s / ki;
        return m * (ks - s * s / ki) / (den * den);
    }
    [[nodiscard]] double peak() const noexcept { return std::sqrt(ks * ki); }
    [[nodiscard]] double maximum() const noexcept { return m / (1.0 + 2.0 * std::sqrt(ks / ki)); }

    /// Both roots of mu(s) = rate for 0 < rate <= maximum().
    /// The upper root is infinite when rate == 0, reported as empty second.
    [[nodiscard]] std::optional<std::pair<double, std::optional<double>>> inverse_pair(double rate) const noexcept {
        if (rate <= 0.0) return std::pair<double, std::optional<double>>{0.0, std::nullopt};
        if (rate > maximum()) return std::nullopt;
        // rate*s^2/ki + (rate-m)*s + rate*ks = 0; product of roots is ks*ki.
        const double b = m - rate;
        const double disc = std::max(0.0, b * b - 4.0 * rate * rate * ks / ki);
        const double lo = 2.0 * rate * ks / (b + std::sqrt(disc));
        return std::pair<double, std::optional<double>>{lo, ks * ki / lo};
    }
};

/// Arbitrary rate function with a declared shape class.
/// For Monotone laws `shape_value` is the supremum; for unimodal laws it is the peak location.
struct GrowthLaw {
    std::function<double(double)> rate;
    GrowthClass tag = GrowthClass::Monotone;
    double shape_value = 0.0;

    [[nodiscard]] double operator()(double s) const { return rate(s); }
    [[nodiscard]] double derivative(double s) const {
        const double h = 1e-6 * std::max(1.0, std::abs(s));
        const double lo = std::max(0.0, s - h);
        return (rate(s + h) - rate(lo)) / (s + h - lo);
    }
    [[nodiscard]] double supremum() const {
        if (tag != GrowthClass::Monotone) throw DomainError("supremum requested on a unimodal law");
        return shape_value;
    }
    [[nodiscard]] double peak() const {
        if (tag != GrowthClass::UnimodalWithPeak) throw DomainError("peak requested on a monotone law");
        return shape_value;
    }
};

template <class L>
concept RateFunction = requires(const L& law, double s) {
    { law(s) } -> std::convertible_to<double>;
    { law.derivative(s) } -> std::convertible_to<double>;
};

template <class L>
concept MonotoneLaw = RateFunction<L> && requires(const L& law) {
    { law.supremum() } -> std::convertible_to<double>;
};

template <class L>
concept UnimodalLaw = RateFunction<L> && requires(const L& law) {
    { law.peak() } -> std::convertible_to<double>;
};

template <UnimodalLaw L>
[[nodiscard]] double law_maximum(const L& law) {
    if constexpr (requires { law.maximum(); })
        return law.maximum();
    else
        return law(law.peak());
}

namespace detail {

/// Log-spaced probe grid on (0, 1e6] plus the origin.
inline const std::array<double, 1001>& probe_grid() {
    static const std::array<double, 1001> grid = [] {
        std::array<double, 1001> g{};
        g[0] = 0.0;
        for (int i = 1; i <= 1000; ++i) g[i] = std::pow(10.0, -6.0 + 12.0 * (i - 1) / 999.0);
        return g;
    }();
    return grid;
}

/// Bisection for an increasing function crossing `target` in [lo, hi].
template <class F>
double bisect_increasing(F&& f, double target, double lo, double hi) {
    for (int it = 0; it < 400 && hi - lo > 1e-14 * (1.0 + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Checks mu(0)=0, mu > 0 and mu' > 0 on the probe grid and mu below its supremum.
template <MonotoneLaw L>
void validate_monotone(const L& law) {
    const auto& grid = detail::probe_grid();
    if (std::abs(law(0.0)) > 1e-12) throw DomainError("monotone law: mu(0) != 0");
    const double sup = law.supremum();
    double prev = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double v = law(grid[i]);
        if (!(v > 0.0) || !(v > prev) || !(v < sup) || !(law.derivative(grid[i]) > 0.0))
            throw DomainError("monotone law violates shape hypothesis at s=" + std::to_string(grid[i]));
        prev = v;
    }
}

/// Checks mu(0)=0, positivity, increase before the peak and decrease after it.
template <UnimodalLaw L>
void validate_unimodal(const L& law) {
    const auto& grid = detail::probe_grid();
    if (std::abs(law(0.0)) > 1e-12) throw DomainError("unimodal law: mu(0) != 0");
    const double pk = law.peak();
    if (!(pk > 0.0)) throw DomainError("unimodal law: peak must be positive");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double s = grid[i];
        const double v = law(s);
        if (!(v > 0.0)) throw DomainError("unimodal law not positive at s=" + std::to_string(s));
        const double sp = grid[i - 1];
        const double vp = law(sp);
        const bool ok = (s <= pk) ? v > vp : (sp >= pk ? v < vp : true);
        if (!ok) throw DomainError("unimodal law violates shape hypothesis at s=" + std::to_string(s));
    }
}

// ============================================================================
// Kinetic constants and model bundle
// ============================================================================

struct KineticParams {
    double m1 = 0.0, kS1 = 0.0;
    double m2 = 0.0, kS2 = 0.0, kI = 0.0;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;

    void validate() const {
        const std::array<std::pair<const char*, double>, 8> fields{{{"m1", m1}, {"kS1", kS1}, {"m2", m2}, {"kS2", kS2},
                                                                    {"kI", kI}, {"k1", k1}, {"k2", k2}, {"k3", k3}}};
        for (const auto& [name, v] : fields)
            if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string("kinetic constant ") + name + " must be positive");
    }

    static KineticParams bernard2001() { return {0.6, 7.1, 0.74, 9.28, 256.0, 42.14, 116.5, 268.0}; }
    static KineticParams bernard2001_lowm1() {
        auto p = bernard2001();
        p.m1 = 0.3;
        return p;
    }
};

/// Built-in parameter sets by name.
[[nodiscard]] inline std::optional<KineticParams> builtin_preset(std::string_view name) {
    if (name == "bernard2001") return KineticParams::bernard2001();
    if (name == "bernard2001-lowm1") return KineticParams::bernard2001_lowm1();
    return std::nullopt;
}

/// Growth laws plus yield coefficients. Everything downstream is templated on this.
template <MonotoneLaw Mu1 = Monod, UnimodalLaw Mu2 = Haldane>
struct Model {
    Mu1 mu1;
    Mu2 mu2;
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;

    [[nodiscard]] double mu2_peak() const { return mu2.peak(); }
    [[nodiscard]] double mu2_max() const { return law_maximum(mu2); }
};

using Am2Model = Model<Monod, Haldane>;

[[nodiscard]] inline Am2Model make_model(const KineticParams& p) {
    p.validate();
    return Am2Model{Monod{p.m1, p.kS1}, Haldane{p.m2, p.kS2, p.kI}, p.k1, p.k2, p.k3};
}

/// Guarded evaluation used at API boundaries.
template <RateFunction L>
[[nodiscard]] double eval_rate(const L& law, double s) {
    if (!(s >= 0.0) || !std::isfinite(s)) throw DomainError("substrate concentration must be finite and >= 0");
    return law(s);
}

// ============================================================================
// Operating point
// ============================================================================

enum class Stage { First = 1, Second = 2 };

struct OperatingPoint {
    double D = 0.0;
    double r = 0.5;
    double S1in = 0.0;
    double S2in = 0.0;

    [[nodiscard]] double r1() const noexcept { return r; }
    [[nodiscard]] double r2() const noexcept { return 1.0 - r; }
    [[nodiscard]] double fraction(Stage s) const noexcept { return s == Stage::First ? r1() : r2(); }
    [[nodiscard]] double D1() const noexcept { return D / r1(); }
    [[nodiscard]] double D2() const noexcept { return D / r2(); }
    [[nodiscard]] double dilution(Stage s) const noexcept { return s == Stage::First ? D1() : D2(); }

    void validate() const {
        if (!(D >= 0.0) || !std::isfinite(D)) throw DomainError("D must be >= 0");
        if (!(r > 0.0 && r < 1.0)) throw DomainError("r must lie in (0,1)");
        if (!(S1in >= 0.0) || !std::isfinite(S1in)) throw DomainError("S1in must be >= 0");
        if (!(S2in >= 0.0) || !std::isfinite(S2in)) throw DomainError("S2in must be >= 0");
    }
};

// ============================================================================
// Break-even concentrations
// ============================================================================

/// A break-even concentration that is either finite or +infinity.
/// Infinity is a tag, never a floating value fed into arithmetic.
class BreakEven {
public:
    static BreakEven infinite() noexcept { return BreakEven{}; }
    static BreakEven finite(double v) noexcept { return BreakEven{v}; }

    [[nodiscard]] bool is_finite() const noexcept { return finite_; }
    [[nodiscard]] double value() const {
        if (!finite_) throw DomainError("break-even concentration is infinite");
        return v_;
    }
    /// s > lambda; never true for an infinite lambda.
    [[nodiscard]] bool exceeded_by(double s) const noexcept { return finite_ && s > v_; }
    /// s < lambda; always true for an infinite lambda.
    [[nodiscard]] bool exceeds(double s) const noexcept { return !finite_ || s < v_; }
    /// For ordering and reporting only.
    [[nodiscard]] double or_infinity() const noexcept {
        return finite_ ? v_ : std::numeric_limits<double>::infinity();
    }

private:
    BreakEven() = default;
    explicit BreakEven(double v) : finite_(true), v_(v) {}
    bool finite_ = false;
    double v_ = 0.0;
};

struct BreakEvenPair {
    BreakEven lower = BreakEven::infinite();
    BreakEven upper = BreakEven::infinite();
    [[nodiscard]] const BreakEven& operator[](int j) const { return j == 1 ? lower : upper; }
};

/// Unique s with mu1(s) = Di, infinite when Di >= sup mu1.
template <MonotoneLaw Mu1, UnimodalLaw Mu2>
[[nodiscard]] BreakEven lambda1(const Model<Mu1, Mu2>& m, const OperatingPoint& op, Stage st) {
    const double Di = op.dilution(st);
    if (Di <= 0.0) return BreakEven::finite(0.0);
    if constexpr (requires { m.mu1.inverse(Di); }) {
        const auto s = m.mu1.inverse(Di);
        return s ? BreakEven::finite(*s) : BreakEven::infinite();
    } else {
        if (Di >= m.mu1.supremum()) return BreakEven::infinite();
        double hi = 1.0;
        while (m.mu1(hi) < Di) {
            hi *= 2.0;
            if (hi > 1e15) return BreakEven::infinite();
        }
        return BreakEven::finite(detail::bisect_increasing(m.mu1, Di, 0.0, hi));
    }
}

/// Rate at which the two Haldane break-even roots of stage i merge: r_i * max mu2.
template <MonotoneLaw Mu1, UnimodalLaw Mu2>
[[nodiscard]] double critical_merge_rate(const Model<Mu1, Mu2>& m, const OperatingPoint& op, Stage st) {
    return op.fraction(st) * m.mu2_max();
}

/// Ordered roots of mu2(s) = Di; both infinite above the merge rate, equal to the peak at it.
template <MonotoneLaw Mu1, UnimodalLaw Mu2>
[[nodiscard]] BreakEvenPair lambda2_pair(const Model<Mu1, Mu2>& m, const OperatingPoint& op, Stage st) {
    const double Di = op.dilution(st);
    const double Dm = critical_merge_rate(m, op, st);
    if (op.D > Dm) return {};
    if (op.D == Dm) return {BreakEven::finite(m.mu2_peak()), BreakEven::finite(m.mu2_peak())};
    if (Di <= 0.0) return {BreakEven::finite(0.0), BreakEven::infinite()};
    if constexpr (requires { m.mu2.inverse_pair(Di); }) {
        const auto roots = m.mu2.inverse_pair(Di);
        const double pk = m.mu2_peak();
        if (!roots) return {BreakEven::finite(pk), BreakEven::finite(pk)};
        // Round-off can push either root across the peak right at the merge rate.
        const double lo = std::min(roots->first, pk);
        const double hi = std::max(roots->second.value_or(pk), pk);
        return {BreakEven::finite(lo), BreakEven::finite(hi)};
    } else {
        const double pk = m.mu2_peak();
        const double lo = detail::bisect_increasing(m.mu2, Di, 0.0, pk);
        double hi = 2.0 * pk + 1.0;
        while (m.mu2(hi) > Di) {
            hi *= 2.0;
            if (hi > 1e15) return {BreakEven::finite(lo), BreakEven::infinite()};
        }
        auto decreasing = [&](double s) { return -m.mu2(s); };
        return {BreakEven::finite(lo), BreakEven::finite(detail::bisect_increasing(decreasing, -Di, pk, hi))};
    }
}

/// All six break-even concentrations for one operating point.
struct BreakEvens {
    std::array<BreakEven, 2> l1{BreakEven::infinite(), BreakEven::infinite()};
    std::array<BreakEvenPair, 2> l2{};

    [[nodiscard]] const BreakEven& lam1(int stage) const { return l1[stage - 1]; }
    [[nodiscard]] const BreakEven& lam2(int stage, int j) const { return l2[stage - 1][j]; }
};

template <MonotoneLaw Mu1, UnimodalLaw Mu2>
[[nodiscard]] BreakEvens break_evens(const Model<Mu1, Mu2>& m, const OperatingPoint& op) {
    BreakEvens b;
    b.l1[0] = lambda1(m, op, Stage::First);
    b.l1[1] = lambda1(m, op, Stage::Second);
    b.l2[0] = lambda2_pair(m, op, Stage::First);
    b.l2[1] = lambda2_pair(m, op, Stage::Second);
    return b;
}

/// Rates that delimit the operating diagram along D.
struct CriticalRates {
    double S2m = 0.0;      ///< Haldane peak location
    double mu2_max = 0.0;
    double D1m = 0.0, D2m = 0.0;           ///< r_i * mu2(S2m)
    double D1star = 0.0, D2star = 0.0;     ///< r_i * mu2(S2in)
    double r1m1 = 0.0, r2m1 = 0.0;         ///< washout rates of the first species
};

template <MonotoneLaw Mu1, UnimodalLaw Mu2>
[[nodiscard]] CriticalRates critical_rates(const Model<Mu1, Mu2>& m, const OperatingPoint& op) {
    CriticalRates c;
    c.S2m = m.mu2_peak();
    c.mu2_max = m.mu2_max();
    c.D1m = op.r1() * c.mu2_max;
    c.D2m = op.r2() * c.mu2_max;
    const double mu_in = m.mu2(op.S2in);
    c.D1star = op.r1() * mu_in;
    c.D2star = op.r2() * mu_in;
    c.r1m1 = op.r1() * m.mu1.supremum();
    c.r2m1 = op.r2() * m.mu1.supremum();
    return c;
}

} // namespace am2

#pragma once

// Time integration of the cascade, conservation monitors and basin sampling.

#include "am2/equilibria.hpp"
#include "am2/errors.hpp"
#include "am2/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace am2 {

/// (S1^1, X1^1, S2^1, X2^1, S1^2, X1^2, S2^2, X2^2)
using FullState = std::array<double, 8>;
/// (X1^1, X2^1, X1^2, X2^2)
using ReducedState = std::array<double, 4>;

template <class M>
[[nodiscard]] FullState rhs_full(const M& m, const OperatingPoint& op, const FullState& x) {
    const double D1 = op.D1(), D2 = op.D2();
    FullState f{};
    double in1 = op.S1in, in2 = op.S2in;
    for (int st = 0; st < 2; ++st) {
        const double Di = st == 0 ? D1 : D2;
        const double S1 = x[4 * st], X1 = x[4 * st + 1], S2 = x[4 * st + 2], X2 = x[4 * st + 3];
        const double u1 = m.mu1(std::max(0.0, S1)), u2 = m.mu2(std::max(0.0, S2));
        const double X1in = st == 0 ? 0.0 : x[1], X2in = st == 0 ? 0.0 : x[3];
        f[4 * st] = Di * (in1 - S1) - m.k1 * u1 * X1;
        f[4 * st + 1] = u1 * X1 + Di * (X1in - X1);
        f[4 * st + 2] = Di * (in2 - S2) + m.k2 * u1 * X1 - m.k3 * u2 * X2;
        f[4 * st + 3] = u2 * X2 + Di * (X2in - X2);
        in1 = S1;
        in2 = S2;
    }
    return f;
}

/// Dynamics on the conservation manifold. `left_set` is raised when x is outside M.
template <class M>
[[nodiscard]] ReducedState rhs_reduced(const M& m, const OperatingPoint& op, const ReducedState& x,
                                       bool* left_set = nullptr) {
    if (left_set) *left_set = !in_reduced_set(m, op, x, 1e-7);
    const double D1 = op.D1(), D2 = op.D2();
    ReducedState f{};
    for (int st = 0; st < 2; ++st) {
        const double Di = st == 0 ? D1 : D2;
        const double X1 = x[2 * st], X2 = x[2 * st + 1];
        const double S1 = std::max(0.0, op.S1in - m.k1 * X1);
        const double S2 = std::max(0.0, op.S2in - m.k3 * X2 + m.k2 * X1);
        const double X1in = st == 0 ? 0.0 : x[0], X2in = st == 0 ? 0.0 : x[1];
        f[2 * st] = m.mu1(S1) * X1 + Di * (X1in - X1);
        f[2 * st + 1] = m.mu2(S2) * X2 + Di * (X2in - X2);
    }
    return f;
}

/// Z1^i = S1^i + k1 X1^i and Z2^i = S2^i - k2 X1^i + k3 X2^i, with deviations from the feed.
struct ConservationDiagnostics {
    std::array<double, 4> Z{};    ///< Z1^1, Z2^1, Z1^2, Z2^2
    std::array<double, 4> dev{};  ///< |Z - feed| in the same order
};

template <class M>
[[nodiscard]] ConservationDiagnostics conservation(const M& m, const OperatingPoint& op, const FullState& x) {
    ConservationDiagnostics c;
    for (int st = 0; st < 2; ++st) {
        c.Z[2 * st] = x[4 * st] + m.k1 * x[4 * st + 1];
        c.Z[2 * st + 1] = x[4 * st + 2] - m.k2 * x[4 * st + 1] + m.k3 * x[4 * st + 3];
        c.dev[2 * st] = std::abs(c.Z[2 * st] - op.S1in);
        c.dev[2 * st + 1] = std::abs(c.Z[2 * st + 1] - op.S2in);
    }
    return c;
}

[[nodiscard]] inline ReducedState project_reduced(const FullState& x) { return {x[1], x[3], x[5], x[7]}; }

// ============================================================================
// Dormand-Prince 5(4)
// ============================================================================

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double tmax = 1e4;
    double h0 = 0.0;          ///< 0 picks a starting step automatically
    double hmin = 1e-12;      ///< step floor; going below it is a stiffness failure
    double hmax = 0.0;        ///< 0 means tmax
    double conv_tol = 1e-8;   ///< sup-norm of the vector field
    int conv_steps = 50;      ///< consecutive accepted steps under conv_tol
    bool stop_on_convergence = true;
    bool record = true;
    long max_steps = 10'000'000;
    std::vector<double> output_times;  ///< when non-empty, record only at these times (dense output)
};

enum class TerminalEvent { Converged, MaxTime };

[[nodiscard]] inline const char* to_string(TerminalEvent e) {
    return e == TerminalEvent::Converged ? "converged" : "max-time";
}

template <std::size_t N>
struct Trajectory {
    std::vector<double> t;
    std::vector<std::array<double, N>> x;
    std::vector<double> h;  ///< size of the step that produced each recorded point (0 for the first)
    TerminalEvent event = TerminalEvent::MaxTime;
    double t_end = 0.0;
    std::array<double, N> final{};
    long accepted = 0, rejected = 0, projections = 0;
};

namespace detail {

template <std::size_t N>
double inf_norm(const std::array<double, N>& v) {
    double r = 0.0;
    for (double e : v) r = std::max(r, std::abs(e));
    return r;
}

// Dormand-Prince tableau.
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output coefficients (Hairer's contd5).
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

} // namespace detail

/// Adaptive explicit integration of dx/dt = f(x) with a nonnegativity guard.
/// Convergence: |f|_inf < conv_tol held for conv_steps consecutive accepted steps.
template <std::size_t N, class F>
[[nodiscard]] Trajectory<N> integrate(F&& f, std::array<double, N> x, const IntegratorOptions& opt = {}) {
    using V = std::array<double, N>;
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw DomainError("integration tolerances must be positive");
    if (!(opt.tmax > 0.0)) throw DomainError("tmax must be positive");
    for (double& v : x) {
        if (!std::isfinite(v) || v < -1e-12) throw DomainError("initial condition must be finite and nonnegative");
        v = std::max(v, 0.0);
    }
    Trajectory<N> tr;
    auto record = [&](double t, const V& y, double h) {
        if (!opt.record) return;
        tr.t.push_back(t);
        tr.x.push_back(y);
        tr.h.push_back(h);
    };
    const bool dense = !opt.output_times.empty();
    std::size_t next_out = 0;
    if (!dense) record(0.0, x, 0.0);
    while (dense && next_out < opt.output_times.size() && opt.output_times[next_out] <= 0.0) {
        record(0.0, x, 0.0);
        ++next_out;
    }

    auto axpy = [](const V& y, double h, std::initializer_list<std::pair<double, const V*>> terms) {
        V out = y;
        for (const auto& [c, k] : terms)
            for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
        return out;
    };

    V k1 = f(x);
    int quiet = detail::inf_norm(k1) < opt.conv_tol ? 1 : 0;
    // Started on a steady state: nothing to integrate.
    if (opt.stop_on_convergence && detail::inf_norm(k1) < 1e-3 * opt.conv_tol) {
        tr.event = TerminalEvent::Converged;
        tr.final = x;
        if (dense) record(0.0, x, 0.0);
        return tr;
    }
    const double hmax = opt.hmax > 0.0 ? opt.hmax : opt.tmax;
    double h = opt.h0;
    if (!(h > 0.0)) {
        double sc = 0.0, d = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double w = opt.atol + opt.rtol * std::abs(x[i]);
            sc = std::max(sc, std::abs(x[i]) / w);
            d = std::max(d, std::abs(k1[i]) / w);
        }
        h = (sc < 1e-5 || d < 1e-5) ? 1e-6 : 0.01 * sc / d;
        h = std::min(h, hmax);
    }
    double t = 0.0;
    while (t < opt.tmax) {
        if (tr.accepted + tr.rejected > opt.max_steps) break;
        if (t + h > opt.tmax) h = opt.tmax - t;
        if (h < opt.hmin) {
            std::ostringstream os;
            os.precision(9);
            os << "step size underflow at t=" << t << " (h=" << h << ", floor " << opt.hmin
               << "); loosen rtol/atol or lower the step floor";
            throw StiffnessError(os.str());
        }
        const V k2 = f(axpy(x, h, {{detail::a21, &k1}}));
        const V k3 = f(axpy(x, h, {{detail::a31, &k1}, {detail::a32, &k2}}));
        const V k4 = f(axpy(x, h, {{detail::a41, &k1}, {detail::a42, &k2}, {detail::a43, &k3}}));
        const V k5 = f(axpy(x, h, {{detail::a51, &k1}, {detail::a52, &k2}, {detail::a53, &k3}, {detail::a54, &k4}}));
        const V k6 = f(axpy(x, h, {{detail::a61, &k1}, {detail::a62, &k2}, {detail::a63, &k3}, {detail::a64, &k4},
                                   {detail::a65, &k5}}));
        V y = axpy(x, h, {{detail::b1, &k1}, {detail::b3, &k3}, {detail::b4, &k4}, {detail::b5, &k5}, {detail::b6, &k6}});
        const V k7 = f(y);
        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double e = h * (detail::e1 * k1[i] + detail::e3 * k3[i] + detail::e4 * k4[i] + detail::e5 * k5[i] +
                                  detail::e6 * k6[i] + detail::e7 * k7[i]);
            const double w = opt.atol + opt.rtol * std::max(std::abs(x[i]), std::abs(y[i]));
            err = std::max(err, std::abs(e) / w);
        }
        if (!std::isfinite(err)) {
            h *= 0.1;
            ++tr.rejected;
            continue;
        }
        if (err > 1.0) {
            h *= std::max(0.1, 0.9 * std::pow(err, -0.2));
            ++tr.rejected;
            continue;
        }
        // Dense output between t and t+h, before the guard touches y.
        while (dense && next_out < opt.output_times.size() && opt.output_times[next_out] <= t + h) {
            const double th = (opt.output_times[next_out] - t) / h, th1 = 1.0 - th;
            V yo{};
            for (std::size_t i = 0; i < N; ++i) {
                const double r1 = x[i], dy = y[i] - x[i];
                const double r3 = h * k1[i] - dy;
                const double r4 = dy - h * k7[i] - r3;
                const double r5 = h * (detail::d1 * k1[i] + detail::d3 * k3[i] + detail::d4 * k4[i] +
                                       detail::d5 * k5[i] + detail::d6 * k6[i] + detail::d7 * k7[i]);
                yo[i] = r1 + th * (dy + th1 * (r3 + th * (r4 + th1 * r5)));
            }
            record(opt.output_times[next_out], yo, h);
            ++next_out;
        }
        bool projected = false;
        for (double& v : y)
            if (v < 0.0) {
                v = 0.0;
                projected = true;
            }
        t += h;
        x = y;
        k1 = projected ? f(x) : k7;
        if (projected) ++tr.projections;
        ++tr.accepted;
        if (!dense) record(t, x, h);
        quiet = detail::inf_norm(k1) < opt.conv_tol ? quiet + 1 : 0;
        if (opt.stop_on_convergence && quiet >= opt.conv_steps) {
            tr.event = TerminalEvent::Converged;
            break;
        }
        h = std::min(hmax, h * std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
    tr.t_end = t;
    tr.final = x;
    if (tr.event != TerminalEvent::Converged && t >= opt.tmax) tr.event = TerminalEvent::MaxTime;
    return tr;
}

template <class M>
[[nodiscard]] Trajectory<8> simulate_full(const M& m, const OperatingPoint& op, const FullState& ic,
                                          const IntegratorOptions& opt = {}) {
    return integrate<8>([&](const FullState& x) { return rhs_full(m, op, x); }, ic, opt);
}

template <class M>
[[nodiscard]] Trajectory<4> simulate_reduced(const M& m, const OperatingPoint& op, const ReducedState& ic,
                                             const IntegratorOptions& opt = {}) {
    return integrate<4>([&](const ReducedState& x) { return rhs_reduced(m, op, x); }, ic, opt);
}

// ============================================================================
// Matching and basins
// ============================================================================

inline constexpr double kMatchRelTol = 1e-4;

/// Index of the existing steady state within rel_tol (sup norm, relative to max(1, |x*|)), or -1.
[[nodiscard]] inline int match_steady_state(const std::vector<SteadyState>& states, const ReducedState& x,
                                            double rel_tol = kMatchRelTol) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < states.size(); ++n) {
        const auto& s = states[n];
        if (!s.exists) continue;
        double d = 0.0;
        for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(x[k] - s.x[k]));
        if (d <= rel_tol * std::max(1.0, detail::inf_norm(s.x)) && d < best_d) {
            best_d = d;
            best = static_cast<int>(n);
        }
    }
    return best;
}

/// Uniform draw in M by rejection from its bounding box.
template <class M, class Rng>
[[nodiscard]] ReducedState sample_reduced_set(const M& m, const OperatingPoint& op, Rng& rng) {
    const double x1max = op.S1in / m.k1;
    const double x2max = (op.S2in + m.k2 * x1max) / m.k3;
    std::uniform_real_distribution<double> u1(0.0, x1max), u2(0.0, x2max);
    for (;;) {
        ReducedState x{u1(rng), u2(rng), u1(rng), u2(rng)};
        if (x[1] * m.k3 <= op.S2in + m.k2 * x[0] && x[3] * m.k3 <= op.S2in + m.k2 * x[2]) return x;
    }
}

struct BasinOptions {
    IntegratorOptions integrator{};
    int jobs = 0;
    double match_tol = kMatchRelTol;
    RootScanOptions roots{};
};

struct BasinReport {
    std::uint64_t seed = 0;
    int n = 0;
    std::map<std::string, int> counts;  ///< "E10^11" or "E10^11#2" for multi-branch families
    int unmatched = 0;    ///< converged but near no known steady state
    int unconverged = 0;  ///< reached tmax
    std::vector<int> outcome;  ///< per sample: steady-state index, -1 unmatched, -2 unconverged
    std::vector<SteadyState> states;
};

[[nodiscard]] inline std::string state_key(const SteadyState& s) {
    return s.branch_count > 1 ? s.label.str() + "#" + std::to_string(s.branch) : s.label.str();
}

/// Per-sample RNG stream: independent of scheduling, so reports are reproducible for any job count.
[[nodiscard]] inline std::mt19937_64 sample_stream(std::uint64_t seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index)};
    return std::mt19937_64(seq);
}

template <class M>
[[nodiscard]] BasinReport basin_sample(const M& m, const OperatingPoint& op, int n, std::uint64_t seed,
                                       const BasinOptions& opt = {}) {
    if (n < 1) throw DomainError("basin sample count must be >= 1");
    op.validate();
    BasinReport rep;
    rep.seed = seed;
    rep.n = n;
    rep.states = enumerate_steady_states(m, op, opt.roots);
    rep.outcome.assign(static_cast<std::size_t>(n), -2);
    auto iopt = opt.integrator;
    iopt.record = false;
    detail::parallel_rows(n, opt.jobs, [&](int k) {
        auto rng = sample_stream(seed, k);
        const auto ic = sample_reduced_set(m, op, rng);
        const auto tr = simulate_reduced(m, op, ic, iopt);
        rep.outcome[static_cast<std::size_t>(k)] =
            tr.event == TerminalEvent::Converged ? match_steady_state(rep.states, tr.final, opt.match_tol) : -2;
    });
    for (int o : rep.outcome) {
        if (o == -2) ++rep.unconverged;
        else if (o == -1) ++rep.unmatched;
        else ++rep.counts[state_key(rep.states[static_cast<std::size_t>(o)])];
    }
    return rep;
}

} // namespace am2

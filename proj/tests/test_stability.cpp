#include "catch_amalgamated.hpp"

#include "am2/diagram.hpp"
#include "am2/simulator.hpp"
#include "am2/stability.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <random>

using namespace am2;
using Catch::Approx;

namespace {

const Am2Model kModel = make_model(KineticParams::bernard2001());

OperatingPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uD(0.01, 0.6), ur(0.05, 0.95), u1(0.0, 300.0), u2(0.0, 600.0);
    return {uD(rng), ur(rng), u1(rng), u2(rng)};
}

} // namespace

TEST_CASE("reduced Jacobian matches finite differences", "[stability][oracle]") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const auto op = random_point(rng);
        auto sub = sample_stream(99, trial);
        const auto x = sample_reduced_set(kModel, op, sub);
        const Eigen::Matrix4d J = jacobian_at(kModel, op, x).matrix();
        for (int c = 0; c < 4; ++c) {
            const double h = 1e-6 * std::max(1e-3, x[c]);
            auto xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            const auto fp = rhs_reduced(kModel, op, xp), fm = rhs_reduced(kModel, op, xm);
            for (int r = 0; r < 4; ++r) {
                const double fd = (fp[r] - fm[r]) / (2 * h);
                CHECK(J(r, c) == Approx(fd).margin(1e-5 * (1 + std::abs(fd))));
            }
        }
    }
}

TEST_CASE("full Jacobian matches finite differences", "[stability][oracle]") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const auto op = random_point(rng);
        FullState x{};
        for (auto& v : x) v = u(rng);
        const auto J = full_jacobian(kModel, op, x);
        for (int c = 0; c < 8; ++c) {
            const double h = 1e-6 * x[c];
            auto xp = x, xm = x;
            xp[c] += h;
            xm[c] -= h;
            const auto fp = rhs_full(kModel, op, xp), fm = rhs_full(kModel, op, xm);
            for (int r = 0; r < 8; ++r) {
                const double fd = (fp[r] - fm[r]) / (2 * h);
                CHECK(J(r, c) == Approx(fd).margin(1e-5 * (1 + std::abs(fd))));
            }
        }
    }
}

TEST_CASE("full spectrum is the reduced spectrum plus the dilution modes", "[stability][property]") {
    std::mt19937_64 rng(6);
    int checked = 0;
    while (checked < 50) {
        const auto op = random_point(rng);
        for (const auto& s : enumerate_steady_states(kModel, op)) {
            if (!s.exists || checked >= 50) continue;
            const auto J = full_jacobian(kModel, op, reconstruct_full_state(kModel, op, s.x));
            const Eigen::EigenSolver<Eigen::Matrix<double, 8, 8>> es(J, false);
            std::vector<double> got, want;
            for (int k = 0; k < 8; ++k) {
                CHECK(std::abs(es.eigenvalues()[k].imag()) < 1e-6);
                got.push_back(es.eigenvalues()[k].real());
            }
            for (double e : jacobian_at(kModel, op, s.x).eigenvalues()) want.push_back(e);
            want.insert(want.end(), {-op.D1(), -op.D1(), -op.D2(), -op.D2()});
            std::sort(got.begin(), got.end());
            std::sort(want.begin(), want.end());
            for (int k = 0; k < 8; ++k) CHECK(got[k] == Approx(want[k]).margin(1e-6));
            ++checked;
        }
    }
}

TEST_CASE("analytic conditions agree with eigenvalue signs away from boundaries", "[stability][property]") {
    std::mt19937_64 rng(10);
    int points = 0, states = 0;
    while (points < 1000) {
        const auto op = random_point(rng);
        const auto av = aux_values(kModel, op);
        if (boundary_gap(kModel, op, av) < 1e-6) continue;
        bool near = false;
        const auto cs = classify_all(kModel, op, av, enumerate_steady_states(kModel, op, av));
        for (const auto& c : cs) near = near || (c.state.exists && (c.check.near_boundary || c.state.tangency));
        if (near) continue;
        ++points;
        for (const auto& c : cs) {
            if (!c.state.exists) continue;
            ++states;
            INFO(c.state.label.str() << " clause " << c.check.clause);
            CHECK(c.check.agree);
            CHECK_NOTHROW(require_agreement(c.check, c.state.label));
        }
    }
    CHECK(states > points);
}

TEST_CASE("eigenvalue classification uses a margin", "[stability]") {
    CHECK(classify_eigenvalues({-1, -2, -3, -1e-7}) == NumericVerdict::Stable);
    CHECK(classify_eigenvalues({-1, -2, -3, -1e-9}) == NumericVerdict::Marginal);
    CHECK(classify_eigenvalues({-1, 1e-7, -3, -1}) == NumericVerdict::Unstable);
}

TEST_CASE("three-valued comparisons", "[stability]") {
    CHECK(tri_less(1.0, 2.0) == Tri::True);
    CHECK(tri_less(2.0, 1.0) == Tri::False);
    CHECK(tri_less(1.0, 1.0 + 1e-14) == Tri::Edge);
    CHECK(tri_and(Tri::True, Tri::Edge) == Tri::Edge);
    CHECK(tri_and(Tri::False, Tri::Edge) == Tri::False);
    CHECK(tri_or(Tri::True, Tri::Edge) == Tri::True);
    CHECK(tri_below(5.0, BreakEven::infinite()) == Tri::True);
}

TEST_CASE("disagreement away from a boundary throws", "[stability]") {
    Crosscheck c;
    c.analytic = AnalyticVerdict::Stable;
    c.numeric = NumericVerdict::Unstable;
    c.agree = false;
    c.near_boundary = false;
    CHECK_THROWS_AS(require_agreement(c, Label{1, 0, 1, 0}), ConsistencyError);
    c.near_boundary = true;
    CHECK_NOTHROW(require_agreement(c, Label{1, 0, 1, 0}));
}

TEST_CASE("reference stable sets at tabulated points", "[stability][golden]") {
    // r = 1/3, S2in = 150 plane; points sit well inside the named regions.
    struct P { double D, S1in; std::vector<std::string> stable; };
    const std::vector<P> pts{{0.479, 59.5, {"E00^00"}},
                             {0.245, 97.5, {"E00^10", "E00^11"}},
                             {0.165, 155.5, {"E10^10", "E10^11", "E11^11"}},
                             {0.113, 153.5, {"E10^11", "E11^11"}},
                             {0.155, 1.5, {"E00^01", "E01^01"}}};
    for (const auto& p : pts) {
        const OperatingPoint op{p.D, 1.0 / 3.0, p.S1in, 150.0};
        const auto av = aux_values(kModel, op);
        std::vector<std::string> got;
        for (const auto& c : classify_all(kModel, op, av, enumerate_steady_states(kModel, op, av)))
            if (c.stable()) got.push_back(c.state.label.str());
        CHECK(got == p.stable);
    }
}

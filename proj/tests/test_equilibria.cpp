#include "catch_amalgamated.hpp"

#include "am2/equilibria.hpp"
#include "am2/simulator.hpp"

#include <random>
#include <set>

using namespace am2;
using Catch::Approx;

namespace {

const Am2Model kModel = make_model(KineticParams::bernard2001());

OperatingPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uD(0.01, 0.6), ur(0.05, 0.95), u1(0.0, 300.0), u2(0.0, 600.0);
    return {uD(rng), ur(rng), u1(rng), u2(rng)};
}

template <class F>
int dense_sign_changes(F&& h, double a, double b, int n = 400000) {
    int count = 0;
    double prev = h(a + (b - a) * 0.5 / n);
    for (int k = 1; k < n; ++k) {
        const double cur = h(a + (b - a) * (k + 0.5) / n);
        if ((cur > 0.0) != (prev > 0.0)) ++count;
        prev = cur;
    }
    return count;
}

} // namespace

TEST_CASE("labels round trip and cover the fifteen candidates", "[equilibria]") {
    std::set<std::string> seen;
    for (const auto& lb : kLabels) {
        const auto s = lb.str();
        seen.insert(s);
        const auto back = parse_label(s);
        REQUIRE(back);
        CHECK(*back == lb);
        CHECK(label_index(lb) >= 0);
    }
    CHECK(seen.size() == 15);
    CHECK_FALSE(parse_label("E33^00"));
    CHECK_FALSE(parse_label("E00-00"));
}

TEST_CASE("existing steady states zero both vector fields", "[equilibria][property]") {
    std::mt19937_64 rng(5);
    int checked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto op = random_point(rng);
        for (const auto& s : enumerate_steady_states(kModel, op)) {
            if (!s.exists) continue;
            ++checked;
            INFO(s.label.str() << " at D=" << op.D << " r=" << op.r << " S1in=" << op.S1in << " S2in=" << op.S2in);
            REQUIRE(in_reduced_set(kModel, op, s.x));
            const auto f = rhs_reduced(kModel, op, s.x);
            for (double v : f) CHECK(std::abs(v) < 1e-9);
            const auto g = rhs_full(kModel, op, reconstruct_full_state(kModel, op, s.x));
            for (double v : g) CHECK(std::abs(v) < 1e-9);
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("washout is the only state below every break-even", "[equilibria]") {
    const OperatingPoint op{0.5, 1.0 / 3.0, 10.0, 150.0};
    const auto states = enumerate_steady_states(kModel, op);
    int n = 0;
    for (const auto& s : states) n += s.exists;
    CHECK(n == 1);
    CHECK(states.front().label == Label{0, 0, 0, 0});
    CHECK(states.front().exists);
}

TEST_CASE("acidogen presence follows the lambda1 thresholds", "[equilibria][property]") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 300; ++trial) {
        const auto op = random_point(rng);
        const auto be = break_evens(kModel, op);
        for (const auto& s : enumerate_steady_states(kModel, op)) {
            if (!s.exists) continue;
            if (s.label.i == 1) CHECK(be.lam1(1).exceeded_by(op.S1in));
            // Upstream acidogens wash into the second tank, so the threshold only binds without them.
            if (s.label.k == 1 && s.label.i == 0) CHECK(be.lam1(2).exceeded_by(op.S1in));
            if (s.label.i == 1) CHECK(s.label.k == 1);
            if (s.label.j > 0) CHECK(be.lam2(1, s.label.j).is_finite());
            for (double v : s.x) CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("f1 = g1 root is unique and accurate", "[equilibria][oracle]") {
    std::mt19937_64 rng(13);
    int tested = 0;
    while (tested < 100) {
        const auto op = random_point(rng);
        const auto be = break_evens(kModel, op);
        if (!be.lam1(1).exceeded_by(op.S1in)) continue;
        const double X11 = (op.S1in - be.lam1(1).value()) / kModel.k1;
        const auto a = aux_functions(kModel, op, X11, 0.0, 0.0);
        auto h = [&](double x) { return a.f1(x) - a.g1(x); };
        const double x = solve_f1_g1(kModel, op, X11);
        CHECK(dense_sign_changes(h, X11, a.f1_end()) == 1);
        CHECK(std::abs(h(x)) < 1e-9);
        ++tested;
    }
}

TEST_CASE("f2 = g2 and f3 = g2 root counts match the dense oracle", "[equilibria][oracle]") {
    std::mt19937_64 rng(21);
    int tested2 = 0, tested3 = 0;
    while (tested2 < 100 || tested3 < 100) {
        const auto op = random_point(rng);
        const auto be = break_evens(kModel, op);
        for (int j = 1; j <= 2; ++j) {
            if (!be.lam2(1, j).exceeded_by(op.S2in)) continue;
            const double X21 = (op.S2in - be.lam2(1, j).value()) / kModel.k3;
            {
                const auto a = aux_functions(kModel, op, 0.0, X21, 0.0);
                auto h = [&](double x) { return a.f2(x) - a.g2(x); };
                const auto rs = solve_f2_g2(kModel, op, X21);
                bool tangent = false;
                for (const auto& r : rs.roots) {
                    CHECK(std::abs(h(r.x)) < 1e-9);
                    tangent = tangent || r.tangency;
                }
                if (!tangent) CHECK(static_cast<int>(rs.roots.size()) == dense_sign_changes(h, X21, a.f2_end()));
                ++tested2;
            }
            if (be.lam1(2).exceeded_by(op.S1in)) {
                const double X12 = (op.S1in - be.lam1(2).value()) / kModel.k1;
                const auto a = aux_functions(kModel, op, 0.0, X21, X12);
                auto h = [&](double x) { return a.f3(x) - a.g2(x); };
                const auto rs = solve_f3_g2(kModel, op, X21, X12);
                bool tangent = false;
                for (const auto& r : rs.roots) {
                    CHECK(std::abs(h(r.x)) < 1e-9);
                    tangent = tangent || r.tangency;
                }
                if (!tangent) CHECK(static_cast<int>(rs.roots.size()) == dense_sign_changes(h, X21, a.f3_end()));
                ++tested3;
            }
        }
    }
}

TEST_CASE("F thresholds match their defining identity", "[equilibria]") {
    const OperatingPoint op{0.1, 1.0 / 3.0, 100.0, 150.0};
    const auto av = aux_values(kModel, op);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j) {
            const auto F = av.Fij(i, j);
            REQUIRE(F);
            // At S1in = F the second substrate in tank i equals lambda2^{ij}.
            const double X1 = (*F - av.be.lam1(i).value()) / kModel.k1;
            CHECK(op.S2in + kModel.k2 * X1 == Approx(av.be.lam2(i, j).value()).epsilon(1e-12));
        }
}

TEST_CASE("reconstruction rejects states outside M", "[equilibria]") {
    const OperatingPoint op{0.1, 0.5, 10.0, 10.0};
    CHECK_THROWS_AS(reconstruct_full_state(kModel, op, {1.0, 0.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(reconstruct_full_state(kModel, op, {0.0, -0.1, 0.0, 0.0}), DomainError);
    const auto f = reconstruct_full_state(kModel, op, {0.1, 0.01, 0.1, 0.01});
    CHECK(f[0] == Approx(10.0 - kModel.k1 * 0.1));
    CHECK(f[2] == Approx(10.0 - kModel.k3 * 0.01 + kModel.k2 * 0.1));
}

TEST_CASE("infeasible brackets are reported", "[equilibria]") {
    const OperatingPoint op{0.1, 0.5, 10.0, 10.0};
    CHECK_THROWS_AS(solve_f1_g1(kModel, op, 0.0), InfeasibleError);
    CHECK_THROWS_AS(solve_f1_g1(kModel, op, 1.0), InfeasibleError);
    CHECK_THROWS_AS(solve_f2_g2(kModel, op, 0.0), InfeasibleError);
}

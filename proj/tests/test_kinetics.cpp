#include "catch_amalgamated.hpp"

#include "am2/kinetics.hpp"

#include <cmath>
#include <random>

using namespace am2;
using Catch::Approx;

namespace {

const Am2Model kModel = make_model(KineticParams::bernard2001());

OperatingPoint at(double D, double r = 1.0 / 3.0, double S1in = 10.0, double S2in = 150.0) {
    return {D, r, S1in, S2in};
}

// Same laws through the type-erased wrapper, so every generic code path is exercised.
Model<GrowthLaw, GrowthLaw> generic_model() {
    const auto p = KineticParams::bernard2001();
    const Monod mo{p.m1, p.kS1};
    const Haldane ha{p.m2, p.kS2, p.kI};
    return {GrowthLaw{mo, GrowthClass::Monotone, mo.supremum()},
            GrowthLaw{ha, GrowthClass::UnimodalWithPeak, ha.peak()}, p.k1, p.k2, p.k3};
}

} // namespace

TEST_CASE("monod derivative matches central differences", "[kinetics]") {
    const Monod mu{0.6, 7.1};
    for (double s : {0.01, 0.5, 3.0, 7.1, 40.0, 900.0}) {
        const double h = 1e-5 * (1.0 + s);
        CHECK(mu.derivative(s) == Approx((mu(s + h) - mu(s - h)) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("haldane peak and maximum", "[kinetics]") {
    const Haldane mu{0.74, 9.28, 256.0};
    CHECK(mu.peak() == Approx(48.740948).margin(1e-5));
    CHECK(mu.maximum() == Approx(mu(mu.peak())).epsilon(1e-14));
    CHECK(mu.derivative(mu.peak()) == Approx(0.0).margin(1e-15));
    // Independent check: a fine grid never exceeds the closed-form maximum.
    double best = 0.0;
    for (int i = 1; i < 200000; ++i) best = std::max(best, mu(i * 1e-3));
    CHECK(best <= mu.maximum() + 1e-15);
    CHECK(best == Approx(mu.maximum()).epsilon(1e-9));
}

TEST_CASE("haldane inverse pair brackets the peak and has product ks*ki", "[kinetics]") {
    const Haldane mu{0.74, 9.28, 256.0};
    for (double rate : {0.05, 0.2, 0.449, 0.53, mu.maximum() * (1 - 1e-9)}) {
        const auto p = mu.inverse_pair(rate);
        REQUIRE(p);
        REQUIRE(p->second);
        CHECK(p->first <= mu.peak());
        CHECK(*p->second >= mu.peak());
        CHECK(mu(p->first) == Approx(rate).epsilon(1e-9));
        CHECK(mu(*p->second) == Approx(rate).epsilon(1e-9));
        CHECK(p->first * *p->second == Approx(9.28 * 256.0).epsilon(1e-12));
    }
    CHECK_FALSE(mu.inverse_pair(mu.maximum() * 1.001));
}

TEST_CASE("shape validation accepts the built-in laws and rejects others", "[kinetics]") {
    CHECK_NOTHROW(validate_monotone(Monod{0.6, 7.1}));
    CHECK_NOTHROW(validate_unimodal(Haldane{0.74, 9.28, 256.0}));
    const GrowthLaw bumpy{[](double s) { return s / (1 + s) + 0.2 * std::sin(s); }, GrowthClass::Monotone, 1.2};
    CHECK_THROWS_AS(validate_monotone(bumpy), DomainError);
    const GrowthLaw two_peaks{[](double s) { return s * std::exp(-s) + 0.5 * s * std::exp(-(s - 50) * (s - 50)); },
                              GrowthClass::UnimodalWithPeak, 1.0};
    CHECK_THROWS_AS(validate_unimodal(two_peaks), DomainError);
    const GrowthLaw shifted{[](double s) { return 0.1 + s / (1 + s); }, GrowthClass::Monotone, 1.1};
    CHECK_THROWS_AS(validate_monotone(shifted), DomainError);
}

TEST_CASE("break-even golden values at r = 1/3", "[kinetics][golden]") {
    struct G { double D, l11, l12; };
    for (const G g : {G{0.05, 2.3667, 1.0143}, G{0.1, 7.1, 2.3667}, G{0.14, 16.5667, 3.8231}}) {
        const auto be = break_evens(kModel, at(g.D));
        CHECK(be.lam1(1).value() == Approx(g.l11).margin(5e-4));
        CHECK(be.lam1(2).value() == Approx(g.l12).margin(5e-4));
    }
    CHECK(break_evens(kModel, at(0.17)).lam1(1).value() == Approx(40.2333).margin(5e-4));
}

TEST_CASE("lambda1 is infinite exactly from r*m1 on", "[kinetics]") {
    const double r = 1.0 / 3.0;
    CHECK(lambda1(kModel, at(0.2 * (1 - 1e-9), r), Stage::First).is_finite());
    CHECK_FALSE(lambda1(kModel, at(0.2, r), Stage::First).is_finite());
    CHECK_FALSE(lambda1(kModel, at(0.5, r), Stage::First).is_finite());
    CHECK(lambda1(kModel, at(0.3, r), Stage::Second).is_finite());
    CHECK_FALSE(lambda1(kModel, at(0.5, r), Stage::Second).is_finite());
}

TEST_CASE("lambda2 pair merges at the peak at the critical rate", "[kinetics]") {
    const double r = 1.0 / 3.0;
    const double Dm = r * kModel.mu2_max();
    const auto at_merge = lambda2_pair(kModel, at(Dm, r), Stage::First);
    CHECK(at_merge.lower.value() == Approx(kModel.mu2_peak()).epsilon(1e-12));
    CHECK(at_merge.upper.value() == Approx(kModel.mu2_peak()).epsilon(1e-12));
    const auto below = lambda2_pair(kModel, at(Dm * (1 - 1e-6), r), Stage::First);
    CHECK(below.lower.value() < kModel.mu2_peak());
    CHECK(below.upper.value() > kModel.mu2_peak());
    CHECK_FALSE(lambda2_pair(kModel, at(Dm * (1 + 1e-9), r), Stage::First).lower.is_finite());
}

TEST_CASE("break-even sentinel never leaks into arithmetic", "[kinetics]") {
    const auto inf = BreakEven::infinite();
    CHECK_THROWS_AS(inf.value(), DomainError);
    CHECK_FALSE(inf.exceeded_by(1e300));
    CHECK(inf.exceeds(1e300));
    const auto fin = BreakEven::finite(3.0);
    CHECK(fin.exceeded_by(3.5));
    CHECK_FALSE(fin.exceeded_by(3.0));
    CHECK(fin.exceeds(2.0));
}

TEST_CASE("generic laws reproduce the closed forms", "[kinetics][property]") {
    const auto g = generic_model();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uD(0.005, 0.6), ur(0.05, 0.95);
    for (int k = 0; k < 200; ++k) {
        const auto op = at(uD(rng), ur(rng));
        const auto a = break_evens(kModel, op);
        const auto b = break_evens(g, op);
        for (int i = 1; i <= 2; ++i) {
            REQUIRE(a.lam1(i).is_finite() == b.lam1(i).is_finite());
            if (a.lam1(i).is_finite()) CHECK(b.lam1(i).value() == Approx(a.lam1(i).value()).epsilon(1e-9));
            for (int j = 1; j <= 2; ++j) {
                REQUIRE(a.lam2(i, j).is_finite() == b.lam2(i, j).is_finite());
                if (a.lam2(i, j).is_finite())
                    CHECK(b.lam2(i, j).value() == Approx(a.lam2(i, j).value()).epsilon(1e-7));
            }
        }
    }
}

TEST_CASE("break-evens are monotone in D", "[kinetics][property]") {
    double prev1 = 0.0, prev_lo = 0.0, prev_hi = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 170; ++k) {
        const auto op = at(k * 1e-3);
        const auto be = break_evens(kModel, op);
        CHECK(be.lam1(1).value() > prev1);
        prev1 = be.lam1(1).value();
        CHECK(be.lam2(1, 1).value() > prev_lo);
        CHECK(be.lam2(1, 2).value() < prev_hi);
        prev_lo = be.lam2(1, 1).value();
        prev_hi = be.lam2(1, 2).value();
    }
}

TEST_CASE("critical rates", "[kinetics][golden]") {
    const auto cr = critical_rates(kModel, at(0.1));
    CHECK(cr.S2m == Approx(48.740).margin(1e-3));
    CHECK(cr.mu2_max == Approx(0.535).margin(1e-3));
    CHECK(kModel.mu2(150.0) == Approx(0.449).margin(1e-3));
    CHECK(cr.D1star == Approx(kModel.mu2(150.0) / 3.0).epsilon(1e-12));
    CHECK(cr.r2m1 == Approx(0.4).epsilon(1e-12));
}

TEST_CASE("operating point validation", "[kinetics]") {
    CHECK_THROWS_AS((OperatingPoint{0.1, 1.0, 1.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((OperatingPoint{-0.1, 0.5, 1.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((OperatingPoint{0.1, 0.5, -1.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS(eval_rate(Monod{1, 1}, -1.0), DomainError);
    KineticParams bad = KineticParams::bernard2001();
    bad.kI = 0.0;
    CHECK_THROWS_AS(make_model(bad), DomainError);
}

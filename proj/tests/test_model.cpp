#include "doctest.h"

#include <random>

#include "wkam/model.hpp"

using namespace wkam;

namespace {
ModelSpec e1_sin(double lambda = 1.0) { return ModelSpec::e1(lambda, TrigPoly::sin_wave(2.0 * pi)); }
ModelSpec e2_std() { return ModelSpec::e2(TrigPoly::one_minus_cos(1.0)); }
}  // namespace

TEST_CASE("hamiltonian values of the built-in families") {
    CHECK(e1_sin().H(0.0, 0.0, 0.0) == doctest::Approx(0.0));
    CHECK(e2_std().H(0.0, -1.0, 0.0) == doctest::Approx(0.0));
    CHECK(ModelSpec::classical_quadratic().H(1.7, -4.0, 2.0) == doctest::Approx(2.0));
}

TEST_CASE("analytic partials") {
    ModelSpec m = e1_sin();
    Partials d = m.dH(0.5 * pi, 0.0, 1.0);
    CHECK(d.dx == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.du == doctest::Approx(1.0));
    CHECK(d.dp == doctest::Approx(2.0));

    ModelSpec m2 = e2_std();
    Partials d2 = m2.dH(0.0, -0.7, 0.3);
    CHECK(d2.dx == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d2.du == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d2.dp == doctest::Approx(0.3));

    Partials d3 = ModelSpec::classical_quadratic().dH(1.0, 1.0, -2.0);
    CHECK(d3.dx == 0.0);
    CHECK(d3.du == 0.0);
    CHECK(d3.dp == doctest::Approx(-2.0));
}

TEST_CASE("lagrangians: closed forms and the numeric legendre sup") {
    CHECK(e1_sin().L(0.0, 0.0, 1.0) == doctest::Approx(0.5));
    CHECK(e2_std().L(0.37, 0.0, -1.2) == doctest::Approx(0.5 * 1.44));

    ModelSpec c = ModelSpec::custom(
        2.0 * pi, 0.0, UMonotonicity::NonDecreasing,
        [](double, double, double p) { return 0.5 * p * p; },
        [](double, double, double) { return 0.0; },
        [](double, double, double) { return 0.0; },
        [](double, double, double p) { return p; });
    CHECK(c.L(0.0, 0.0, 3.0) == doctest::Approx(4.5).epsilon(1e-8));
}

TEST_CASE("legendre duality and young inequality on random samples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xr(0.0, 2.0 * pi), ur(-2.0, 2.0), vr(-3.0, 3.0);
    for (ModelSpec m : {e1_sin(), ModelSpec::discounted_quadratic(1.0)}) {
        ModelSpec numeric = ModelSpec::custom(
            m.period, m.lambda, m.u_mode,
            [m](double x, double u, double p) { return m.H(x, u, p); },
            [m](double x, double u, double p) { return m.dH(x, u, p).dx; },
            [m](double x, double u, double p) { return m.dH(x, u, p).du; },
            [m](double x, double u, double p) { return m.dH(x, u, p).dp; });
        for (int k = 0; k < 1000; ++k) {
            double x = xr(rng), u = ur(rng), v = vr(rng);
            CHECK(numeric.L(x, u, v) == doctest::Approx(m.L(x, u, v)).epsilon(1e-8));
            double p = m.legendre_p(x, u, v);
            // equality case of L + H >= p v at the dual pair
            CHECK(m.L(x, u, v) + m.H(x, u, p) - p * v == doctest::Approx(0.0).epsilon(1e-8));
            double q = vr(rng);
            CHECK(m.L(x, u, v) + m.H(x, u, q) - q * v >= -1e-10);
        }
    }
}

TEST_CASE("assumption audit") {
    SampleBox box;
    AuditReport r1 = e1_sin().audit(box, 2048);
    CHECK(r1.min_hpp == doctest::Approx(1.0));
    CHECK(r1.hu_min == doctest::Approx(1.0));
    CHECK(r1.hu_max == doctest::Approx(1.0));
    CHECK(r1.hu_in_range);
    CHECK(r1.passed());

    ModelSpec m2 = e2_std();
    AuditReport r2 = m2.audit(box, 2048);
    CHECK(r2.hu_min == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(r2.hu_max == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(m2.lambda == doctest::Approx(2.0).epsilon(1e-6));  // bound taken as max f
    CHECK(r2.hu_in_range);

    // an undersized bound gets flagged
    ModelSpec bad = m2;
    bad.lambda = 1.0;
    AuditReport r3 = bad.audit(box, 2048);
    CHECK_FALSE(r3.hu_in_range);
    CHECK_FALSE(r3.notes.empty());

    AuditReport r4 = ModelSpec::classical_quadratic().audit(box, 1024);
    CHECK(r4.hu_min == 0.0);
    CHECK(r4.hu_max == 0.0);
    CHECK(r4.hu_in_range);
}

TEST_CASE("(H3) bound holds on samples for the nondecreasing families") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xr(0.0, 1.0), ur(-3.0, 3.0), pr(-4.0, 4.0);
    ModelSpec m = e2_std();
    for (int k = 0; k < 500; ++k) {
        double du = m.dH(xr(rng), ur(rng), pr(rng)).du;
        CHECK(du >= -1e-12);
        CHECK(du <= m.lambda + 1e-9);
    }
}

TEST_CASE("custom model without callbacks reports a configuration error") {
    ModelSpec broken = ModelSpec::custom(2.0 * pi, 0.0, UMonotonicity::NonDecreasing,
                                         nullptr, nullptr, nullptr, nullptr);
    CHECK_THROWS(broken.H(0.0, 0.0, 0.0));
    CHECK_THROWS(broken.dH(0.0, 0.0, 0.0));
}

TEST_CASE("json descriptor round trip") {
    ModelSpec m = ModelSpec::from_json_text(R"({"kind":"e1","lambda":0.5,"V":"sin"})");
    CHECK(m.kind == ModelKind::E1);
    CHECK(m.lambda == doctest::Approx(0.5));
    CHECK(m.H(0.5 * pi, 0.0, 1.0) == doctest::Approx(0.5 + 1.0));

    ModelSpec m2 = ModelSpec::from_json_text(R"({"kind":"e2"})");
    CHECK(m2.period == doctest::Approx(1.0));
    CHECK(m2.f.eval(0.0) == doctest::Approx(0.0));
    CHECK(m2.lambda == doctest::Approx(2.0).epsilon(1e-6));

    ModelSpec m3 = ModelSpec::from_json_text(
        R"({"kind":"e1","lambda":1.0,"period":6.283185307179586,"V":{"sin":[1.0,0.3]}})");
    CHECK(m3.V.eval(1.0) == doctest::Approx(std::sin(1.0) + 0.3 * std::sin(2.0)));

    CHECK_THROWS(ModelSpec::from_json_text(R"({"kind":"nope"})"));

    ModelSpec back = ModelSpec::from_json_text(m.to_json_text());
    CHECK(back.lambda == doctest::Approx(m.lambda));
    CHECK(back.V.eval(1.1) == doctest::Approx(m.V.eval(1.1)));
}

TEST_CASE("flipped adapter evaluates the reflected family") {
    ModelSpec m = e1_sin();
    ModelSpec fl = m.flipped();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(-2.0, 2.0);
    for (int k = 0; k < 200; ++k) {
        double x = r(rng) + 2.0, u = r(rng), p = r(rng), v = r(rng);
        CHECK(fl.H(x, u, p) == doctest::Approx(m.H(x, -u, -p)));
        CHECK(fl.L(x, u, v) == doctest::Approx(m.L(x, -u, -v)));
        CHECK(fl.dH(x, u, p).du == doctest::Approx(-m.dH(x, -u, -p).du));
    }
}

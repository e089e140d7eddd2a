#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "wkam/flow.hpp"

using namespace wkam;

namespace {
ModelSpec e1_sin(double lambda = 1.0) { return ModelSpec::e1(lambda, TrigPoly::sin_wave(2.0 * pi)); }
}  // namespace

TEST_CASE("fixed points stay put") {
    ModelSpec m = e1_sin();
    ContactState s{0.0, 0.0, 0.0};
    ContactState out = rk4_step(m, s, 0.1);
    CHECK(out.x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(out.u == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(out.p == doctest::Approx(0.0).epsilon(1e-14));

    Orbit orb = integrate(m, {pi, 0.0, 0.0}, 10.0, 0.01);
    for (const ContactState& q : orb.samples) {
        CHECK(q.x == doctest::Approx(pi).epsilon(1e-12));
        CHECK(std::fabs(q.u) < 1e-12);
        CHECK(std::fabs(q.p) < 1e-12);
    }
}

TEST_CASE("free quadratic motion is integrated exactly") {
    ModelSpec m = ModelSpec::classical_quadratic();
    ContactState out = rk4_step(m, {0.0, 0.0, 1.0}, 0.5);
    CHECK(out.x == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(out.u == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(out.p == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("exponential value decay with zero momentum") {
    // with p = 0 the momentum stays zero and u obeys a pure linear decay
    ModelSpec m = e1_sin();
    Orbit orb = integrate(m, {0.5 * pi, 1.0, 0.0}, 1.0, 1e-3);
    CHECK(orb.samples.back().u == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    for (const ContactState& q : orb.samples) CHECK(std::fabs(q.p) < 1e-14);
}

TEST_CASE("e2 stationary family") {
    ModelSpec m = ModelSpec::e2(TrigPoly::one_minus_cos(1.0));
    Orbit orb = integrate(m, {0.0, -1.0, 0.0}, 5.0, 0.01);
    CHECK_FALSE(orb.blown_up);
    for (const ContactState& q : orb.samples) {
        CHECK(q.x == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(q.u == doctest::Approx(-1.0).epsilon(1e-13));
        CHECK(std::fabs(q.p) < 1e-13);
    }
}

TEST_CASE("drift orbit follows the scalar ODE") {
    ModelSpec m = e1_sin();
    Orbit orb = integrate(m, {0.5 * pi, 0.0, 0.0}, 8.0, 0.01);
    double prev = orb.samples.front().x;
    for (std::size_t i = 1; i < orb.samples.size(); ++i) {
        CHECK(orb.samples[i].x >= prev - 1e-12);  // monotone toward the sink
        prev = orb.samples[i].x;
        CHECK(std::fabs(orb.samples[i].u) < 1e-12);
    }
    CHECK(orb.samples.back().x == doctest::Approx(oracle::sin_drift(0.5 * pi, 8.0)).epsilon(1e-7));
}

TEST_CASE("orbit residual: exact, refining, corrupted") {
    ModelSpec m = e1_sin();
    Orbit fixed = integrate(m, {pi, 0.0, 0.0}, 2.0, 0.01);
    CHECK(orbit_residual(m, fixed) < 1e-12);

    Orbit fine = integrate(m, {0.5 * pi, 0.2, 0.1}, 2.0, 1e-3);
    Orbit half = integrate(m, {0.5 * pi, 0.2, 0.1}, 2.0, 5e-4);
    double r1 = orbit_residual(m, fine);
    double r2 = orbit_residual(m, half);
    CHECK(r1 / r2 > 3.0);  // second-order finite differences
    CHECK(r1 / r2 < 5.0);

    Orbit bad = fine;
    bad.samples[bad.samples.size() / 2].u += 0.1;
    CHECK(orbit_residual(m, bad) >= 0.01);
}

TEST_CASE("step reversibility") {
    ModelSpec m = e1_sin(0.7);
    ContactState s{1.1, 0.4, -0.3};
    for (double dt : {0.05, 0.025, 0.0125}) {
        ContactState back = rk4_step(m, rk4_step(m, s, dt), -dt);
        double err = std::fabs(back.x - s.x) + std::fabs(back.u - s.u) + std::fabs(back.p - s.p);
        CHECK(err < 40.0 * std::pow(dt, 5));
    }
}

TEST_CASE("rk4 order via richardson") {
    ModelSpec m = e1_sin();
    ContactState s{0.5 * pi, 1.0, 0.3};
    auto endpoint = [&](double dt) { return integrate(m, s, 1.0, dt).samples.back(); };
    ContactState a = endpoint(0.02), b = endpoint(0.01), c = endpoint(0.005);
    double e1 = std::fabs(a.x - b.x) + std::fabs(a.u - b.u) + std::fabs(a.p - b.p);
    double e2 = std::fabs(b.x - c.x) + std::fabs(b.u - c.u) + std::fabs(b.p - c.p);
    double order = std::log2(e1 / e2);
    CHECK(order > 3.8);
}

TEST_CASE("pseudograph flow: invariant graphs and the identity at t=0") {
    ModelSpec m = e1_sin();
    std::vector<ContactState> graph;
    for (int i = 0; i < 64; ++i) graph.push_back({i * 2.0 * pi / 64, 0.0, 0.0});

    auto id = flow_pseudograph(m, graph, 0.0, 0.01);
    for (std::size_t i = 0; i < graph.size(); ++i) {
        CHECK(id[i].ok);
        CHECK(id[i].state.x == doctest::Approx(graph[i].x));
    }

    // backward images stay on the u=0, p=0 graph
    auto img = flow_pseudograph(m, graph, -5.0, 0.01);
    for (const FlowImage& f : img) {
        CHECK(f.ok);
        CHECK(std::fabs(f.state.u) < 1e-10);
        CHECK(std::fabs(f.state.p) < 1e-10);
    }

    // every point of the e2 zero graph is fixed
    ModelSpec m2 = ModelSpec::e2(TrigPoly::one_minus_cos(1.0));
    std::vector<ContactState> g2;
    for (int i = 0; i < 32; ++i) g2.push_back({i / 32.0, 0.0, 0.0});
    auto img2 = flow_pseudograph(m2, g2, -5.0, 0.01);
    for (std::size_t i = 0; i < g2.size(); ++i) {
        CHECK(img2[i].ok);
        CHECK(img2[i].state.x == doctest::Approx(g2[i].x).epsilon(1e-10));
        CHECK(std::fabs(img2[i].state.u) < 1e-12);
    }
}

TEST_CASE("blow-up is flagged with the offending time") {
    // a runaway custom family: H = -u^2 makes u explode in finite time
    ModelSpec m = ModelSpec::custom(
        2.0 * pi, 0.0, UMonotonicity::NonDecreasing,
        [](double, double u, double p) { return 0.5 * p * p - u * u; },
        [](double, double, double) { return 0.0; },
        [](double, double u, double) { return -2.0 * u; },
        [](double, double, double p) { return p; });
    Orbit orb = integrate(m, {0.0, 2.0, 0.0}, 10.0, 0.01);
    CHECK(orb.blown_up);
    CHECK(orb.blowup_time > 0.0);
    CHECK(orb.samples.size() >= 2);
}

TEST_CASE("energy decays along the flow") {
    // dH/dt = -dH/du H, so |H| cannot grow for nondecreasing families
    ModelSpec m = e1_sin();
    ContactState s{1.0, 0.1, 0.2};
    double h0 = std::fabs(m.H(s.x, s.u, s.p));
    Orbit orb = integrate(m, s, 5.0, 1e-3);
    CHECK(max_energy(m, orb) <= h0 * (1.0 + 1e-9));
}

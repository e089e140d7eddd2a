#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "wkam/action.hpp"
#include "wkam/flow.hpp"

using namespace wkam;

namespace {
ModelSpec e1_sin(double lambda = 1.0) { return ModelSpec::e1(lambda, TrigPoly::sin_wave(2.0 * pi)); }
ModelSpec e2_std() { return ModelSpec::e2(TrigPoly::one_minus_cos(1.0)); }
SchemeOptions sch(const ModelSpec& m) { return SchemeOptions::for_model(m); }
}  // namespace

TEST_CASE("one-step kernel closed values") {
    ModelSpec cq = ModelSpec::classical_quadratic();
    CHECK(kernel_short(cq, 0.0, 0.0, 0.1, 0.1) == doctest::Approx(0.05).epsilon(1e-12));

    ModelSpec m1 = e1_sin();
    CHECK(kernel_short(m1, 0.0, 0.0, 0.0, 0.1) == doctest::Approx(0.0).epsilon(1e-13));

    ModelSpec dq = ModelSpec::discounted_quadratic(1.0);
    CHECK(kernel_short(dq, 0.0, 1.0, 0.0, 0.1) == doctest::Approx(std::exp(-0.1)).epsilon(1e-4));
}

TEST_CASE("kernel sub-steps engage for a stiff value bound") {
    // lambda dt = 2.5 forces sub-stepping; the constant-curve value still tracks
    // the exponential decay
    ModelSpec dq = ModelSpec::discounted_quadratic(5.0);
    double h = kernel_short(dq, 0.0, 1.0, 0.0, 0.5);
    CHECK(h == doctest::Approx(std::exp(-2.5)).epsilon(2e-2));
    CHECK(std::isfinite(h));
}

TEST_CASE("kernel slope matches a finite difference") {
    ModelSpec m = e2_std();
    SchemeOptions o;
    double du = 1e-6;
    KernelResult k = kernel_short_d(m, 0.2, -0.5, 0.3, 0.05, o);
    double fd = (kernel_short(m, 0.2, -0.5 + du, 0.3, 0.05) -
                 kernel_short(m, 0.2, -0.5 - du, 0.3, 0.05)) / (2.0 * du);
    CHECK(k.slope == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("kernel inversion round trip") {
    ModelSpec m = e1_sin();
    SchemeOptions o;
    double w = kernel_back(m, 0.3, 0.4, 1.1, 0.05, o);
    CHECK(kernel_short(m, 1.1, w, 0.3, 0.05) == doctest::Approx(0.4).epsilon(1e-11));
}

TEST_CASE("lattice table equals the full brute-force enumeration") {
    // full-window lattice mode and the independent enumeration solve the same
    // finite problem, so they agree to solver tolerance at every cell
    ModelSpec dq = ModelSpec::discounted_quadratic(1.0);
    Grid g(48, 2.0 * pi);
    double dt = 0.25;
    SchemeOptions lattice = sch(dq);
    lattice.refine = false;
    lattice.v_max = g.period / dt;  // window covers the whole circle
    ActionTable t = forward_action(dq, 0.0, 0.2, g, 8 * dt, dt, lattice);
    oracle::BruteForce bf{dq, g.n, dt};
    auto ref = bf.table(0.0, 0.2, 8);
    double worst = 0.0;
    for (int k = 0; k < 8; ++k)
        for (int i = 0; i < g.n; ++i) worst = std::max(worst, std::fabs(t.layers[k][i] - ref[k][i]));
    CHECK(worst < 1e-9);
}

TEST_CASE("forward oracle values: transport and discounted families") {
    // straight-arc transport cost
    ModelSpec cq = ModelSpec::classical_quadratic();
    Grid g(256, 2.0 * pi);
    ActionTable t = forward_action(cq, 0.0, 0.0, g, 1.0, 0.05, sch(cq));
    int node = g.nearest(0.5);
    double d = g.node(node);
    CHECK(t.value(t.layer_of(1.0), node) == doctest::Approx(oracle::hopf_lax(0.0, d, 1.0)).epsilon(5e-3));

    // discounted family against the exponential-speed minimizer; the coarse
    // brute-force table above ties this oracle to the raw enumeration
    ModelSpec dq = ModelSpec::discounted_quadratic(1.0);
    ActionTable td = forward_action(dq, 0.0, 0.0, g, 1.0, 0.05, sch(dq));
    double expect = oracle::discounted_value(1.0, 0.0, d, 1.0);
    CHECK(std::fabs(td.value(td.layer_of(1.0), node) - expect) < 5e-3);

    // value stays pinned on the degenerate fiber of the coupling family
    ModelSpec m2 = e2_std();
    Grid g2(128, 1.0);
    ActionTable t2 = forward_action(m2, 0.0, 0.0, g2, 1.0, 0.01, sch(m2));
    for (int k = 0; k < t2.n_layers(); ++k)
        CHECK(std::fabs(t2.value(k, 0)) < 1e-6);
}

TEST_CASE("brute force agrees with the closed form at a fast-transport cell") {
    ModelSpec dq = ModelSpec::discounted_quadratic(1.0);
    oracle::BruteForce bf{dq, 64, 0.25};
    auto ref = bf.table(0.0, 0.0, 4);
    double dx = 2.0 * pi / 64;
    int node = 16;  // distance ~ 1.57, little node quantization
    double expect = oracle::discounted_value(1.0, 0.0, node * dx, 1.0);
    CHECK(ref[3][node] == doctest::Approx(expect).epsilon(2e-2));
}

TEST_CASE("backward table: closed form and the degenerate pin") {
    ModelSpec cq = ModelSpec::classical_quadratic();
    Grid g(512, 2.0 * pi);
    ActionTable bt = backward_action(cq, 0.0, 1.0, g, 0.1, 0.025, sch(cq));
    int node = g.nearest(0.2);
    double d = g.node(node);
    CHECK(bt.value(bt.layer_of(0.1), node) == doctest::Approx(1.0 - d * d / 0.2).epsilon(2e-3));

    ModelSpec m1 = e1_sin();
    Grid g1(128, 2.0 * pi);
    ActionTable b1 = backward_action(m1, 0.0, 0.0, g1, 1.0, 0.02, sch(m1));
    for (int k = 0; k < b1.n_layers(); ++k) CHECK(std::fabs(b1.value(k, 0)) < 1e-6);
}

TEST_CASE("reversibility of the lattice transition system") {
    // with the full window the forward and inverted-kernel recursions are exact
    // mutual inverses at every cell
    ModelSpec dq = ModelSpec::discounted_quadratic(0.8);
    Grid g(64, 2.0 * pi);
    double dt = 0.1;
    SchemeOptions lattice = sch(dq);
    lattice.refine = false;
    lattice.v_max = g.period / dt;
    ActionTable fwd = forward_action(dq, g.node(5), -0.3, g, 12 * dt, dt, lattice);
    for (int k : {0, 3, 7, 11}) {
        for (int i : {0, 17, 40, 63}) {
            double u = fwd.value(k, i);
            ActionTable bwd = backward_action(dq, g.node(i), u, g, fwd.t_of(k), dt, lattice);
            CHECK(bwd.value(k, 5) == doctest::Approx(-0.3).epsilon(1e-9));
        }
    }
}

TEST_CASE("monotone non-expansion forward, expansion backward") {
    ModelSpec m = e2_std();
    Grid g(64, 1.0);
    double dt = 0.02;
    ActionTable a = forward_action(m, 0.25, 0.5, g, 20 * dt, dt, sch(m));
    ActionTable b = forward_action(m, 0.25, -0.75, g, 20 * dt, dt, sch(m));
    for (int k = 0; k < a.n_layers(); ++k)
        for (int i = 0; i < g.n; ++i) {
            double diff = a.layers[k][i] - b.layers[k][i];
            CHECK(diff >= -1e-12);
            CHECK(diff <= 1.25 + 1e-10);
        }
    ActionTable ba = backward_action(m, 0.25, 0.5, g, 20 * dt, dt, sch(m));
    ActionTable bb = backward_action(m, 0.25, -0.75, g, 20 * dt, dt, sch(m));
    for (int k = 0; k < ba.n_layers(); ++k)
        for (int i = 0; i < g.n; ++i)
            CHECK(ba.layers[k][i] - bb.layers[k][i] >= 1.25 - 1e-8);
}

TEST_CASE("peierls barrier on the three families") {
    // free transport relaxes like d^2/2t: certify against the truncation bound
    ModelSpec cq = ModelSpec::classical_quadratic();
    Grid g(128, 2.0 * pi);
    BarrierResult bc = peierls_barrier(cq, 1.0, 0.7, g, 0.05, 1e-3, 50.0, sch(cq));
    for (int i = 0; i < g.n; ++i) {
        double d = circle_dist(g.node(i), 1.0, g.period);
        double v = bc.field.values[i];
        CHECK(v >= 0.7 - 1e-9);
        CHECK(v <= 0.7 + 1.05 * d * d / (2.0 * bc.t_reached) + 2e-2);
    }

    // degenerate coupling: the barrier from the stationary fiber keeps its value
    ModelSpec m2 = e2_std();
    Grid g2(128, 1.0);
    BarrierResult b2 = peierls_barrier(m2, 0.0, -1.0, g2, 0.01, 1e-6, 60.0, sch(m2));
    CHECK(b2.converged);
    CHECK(b2.field.values[0] == doctest::Approx(-1.0).epsilon(2e-3));

    // drift family: the flat solution absorbs everything
    ModelSpec m1 = e1_sin();
    Grid g1(128, 2.0 * pi);
    BarrierResult b1 = peierls_barrier(m1, 0.5 * pi, 0.0, g1, 0.02, 1e-6, 60.0, sch(m1));
    CHECK(b1.converged);
    CHECK(std::fabs(b1.field.interp(pi)) < 1e-3);
}

TEST_CASE("mane potential values") {
    ModelSpec m1 = e1_sin();
    Grid g1(128, 2.0 * pi);
    ScalarField p1 = mane_potential(m1, 0.0, 0.0, g1, 0.02, 20.0, sch(m1));
    CHECK(std::fabs(p1.values[0]) < 1e-4);

    ModelSpec m2 = e2_std();
    Grid g2(128, 1.0);
    ScalarField p2 = mane_potential(m2, 0.0, -1.0, g2, 0.01, 20.0, sch(m2));
    CHECK(p2.values[0] == doctest::Approx(-1.0).epsilon(1e-3));

    // lattice truncation of the free family is exactly the slow traversal cost
    ModelSpec cq = ModelSpec::classical_quadratic();
    Grid g3(128, 2.0 * pi);
    double horizon = 20.0;
    ScalarField p3 = mane_potential(cq, 0.0, 0.4, g3, 0.05, horizon, sch(cq));
    int node = g3.nearest(2.0);
    double d = g3.node(node);
    CHECK(std::fabs(p3.values[node] - (0.4 + d * d / (2.0 * horizon))) < 2e-2);
}

TEST_CASE("sup of backward values") {
    ModelSpec m1 = e1_sin();
    Grid g(128, 2.0 * pi);
    double horizon = 12.0;
    ScalarField s0 = sup_backward(m1, 0.0, 0.0, g, 0.02, horizon, sch(m1));
    CHECK(std::fabs(s0.values[0]) < 1e-4);

    // moving against the drift carries a definite cost
    ScalarField s1 = sup_backward(m1, 0.5 * pi, 0.0, g, 0.02, horizon, sch(m1));
    CHECK(s1.interp(0.5 * pi + 0.3) <= -10.0 * 1e-3);

    ModelSpec cq = ModelSpec::classical_quadratic();
    ScalarField s2 = sup_backward(cq, 0.0, 0.4, g, 0.05, 20.0, sch(cq));
    int node = g.nearest(2.0);
    double d = g.node(node);
    CHECK(std::fabs(s2.values[node] - (0.4 - d * d / (2.0 * 20.0))) < 2e-2);
}

TEST_CASE("minimizer backtracking") {
    ModelSpec cq = ModelSpec::classical_quadratic();
    Grid g(256, 2.0 * pi);
    double dt = 0.05;
    ActionTable t = forward_action(cq, 0.0, 0.0, g, 0.5, dt, sch(cq));
    double xt = g.node(g.nearest(1.0));
    auto curve = extract_minimizer(t, xt, 0.5);
    REQUIRE(curve.size() >= 3);
    CHECK(curve.front().t == doctest::Approx(0.0));
    CHECK(curve.back().t == doctest::Approx(0.5));
    for (const CurvePoint& c : curve) {
        double straight = reduce_mod(xt * (c.t / 0.5), g.period);
        CHECK(circle_dist(c.x, straight, g.period) < g.dx() + 1e-9);
    }

    // drift-following minimizer of the sine family: near-flat value, drift
    // velocity away from the launch segment
    ModelSpec m1 = e1_sin();
    Grid g1(256, 2.0 * pi);
    ActionTable t1 = forward_action(m1, 0.0, 0.0, g1, 6.0, 0.02, sch(m1));
    auto c1 = extract_minimizer(t1, pi - 0.1, 6.0);
    for (const CurvePoint& c : c1) CHECK(std::fabs(c.u) < 2e-2);
    double worst_vel = 0.0;
    for (std::size_t i = 2; i + 2 < c1.size(); ++i) {
        if (c1[i].x < 0.7 || c1[i].x > 2.4) continue;
        double vel = shorter_arc(c1[i - 1].x, c1[i + 1].x, g1.period) / (c1[i + 1].t - c1[i - 1].t);
        worst_vel = std::max(worst_vel, std::fabs(vel - std::sin(c1[i].x)));
    }
    CHECK(worst_vel < 0.15);

    // calibration along the extracted curve: re-integrating the running cost
    // reproduces the table value, and the defect shrinks under refinement
    ModelSpec dq = ModelSpec::discounted_quadratic(1.0);
    auto calibration_defect = [&](int n, double dtt) {
        Grid gg(n, 2.0 * pi);
        ActionTable tt = forward_action(dq, 0.0, 0.0, gg, 1.0, dtt, sch(dq));
        auto cc = extract_minimizer(tt, gg.node(gg.nearest(1.2)), 1.0);
        double u = cc.front().u;
        for (std::size_t i = 1; i < cc.size(); ++i) {
            double v = shorter_arc(cc[i - 1].x, cc[i].x, gg.period) / dtt;
            double xm = reduce_mod(cc[i - 1].x + 0.5 * shorter_arc(cc[i - 1].x, cc[i].x, gg.period),
                                   gg.period);
            u += dtt * dq.L(xm, 0.5 * (cc[i - 1].u + cc[i].u), v);
        }
        return std::fabs(u - cc.back().u);
    };
    double rc = calibration_defect(128, 0.05);
    double rf = calibration_defect(256, 0.025);
    CHECK(rf < rc);
    CHECK(rf < 2e-2);
}

TEST_CASE("empty reachability window is a configuration error") {
    ModelSpec cq = ModelSpec::classical_quadratic();
    Grid g(256, 2.0 * pi);
    SchemeOptions o = sch(cq);
    o.v_max = 0.5;
    CHECK_THROWS_AS(forward_action(cq, 0.0, 0.0, g, 0.01, 1e-3, o), std::runtime_error);
}

TEST_CASE("time lattice lookups reject off-lattice times") {
    ModelSpec cq = ModelSpec::classical_quadratic();
    Grid g(64, 2.0 * pi);
    ActionTable t = forward_action(cq, 0.0, 0.0, g, 0.5, 0.05, sch(cq));
    CHECK(t.layer_of(0.25) == 4);
    CHECK_THROWS(t.layer_of(0.26));
    CHECK_THROWS(t.layer_of(0.7));
}

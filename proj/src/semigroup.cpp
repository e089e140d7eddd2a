#include "wkam/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace wkam {

namespace {

int sweep_count(double t, double dt) {
    require(t >= dt, "lax-oleinik: need t >= dt");
    return static_cast<int>(std::ceil(t / dt - 1e-12));
}

WeakKAMSolution iterate_to_fixed_point(const ModelSpec& m, const ScalarField& phi0, double dt,
                                       double tol_fix, double t_max, const SchemeOptions& opts,
                                       Side side) {
    require(tol_fix > 0.0, "weak_kam: tol_fix must be positive");
    WeakKAMSolution sol;
    sol.side = side;
    sol.dt = dt;
    ScalarField cur = phi0;
    std::deque<double> window;
    int max_iters = static_cast<int>(std::ceil(t_max / dt));
    int it = 0;
    for (; it < max_iters; ++it) {
        ScalarField next = (side == Side::Backward) ? sweep_min(m, cur, dt, opts)
                                                    : sweep_max(m, cur, dt, opts);
        double inc = next.max_abs_diff(cur);
        cur = std::move(next);
        window.push_back(inc);
        if (window.size() > 10) window.pop_front();
        if (window.size() == 10 && *std::max_element(window.begin(), window.end()) < tol_fix) {
            sol.converged = true;
            ++it;
            break;
        }
    }
    sol.iterations = it;
    ScalarField probe = (side == Side::Backward) ? sweep_min(m, cur, dt, opts)
                                                 : sweep_max(m, cur, dt, opts);
    sol.residual = probe.max_abs_diff(cur);
    sol.field = std::move(cur);
    return sol;
}

}  // namespace

ScalarField lax_oleinik_backward(const ModelSpec& m, const ScalarField& phi, double t, double dt,
                                 const SchemeOptions& opts) {
    int k = sweep_count(t, dt);
    ScalarField cur = phi;
    for (int i = 0; i < k; ++i) cur = sweep_min(m, cur, dt, opts);
    return cur;
}

ScalarField lax_oleinik_forward(const ModelSpec& m, const ScalarField& phi, double t, double dt,
                                const SchemeOptions& opts) {
    int k = sweep_count(t, dt);
    ScalarField cur = phi;
    for (int i = 0; i < k; ++i) cur = sweep_max(m, cur, dt, opts);
    return cur;
}

WeakKAMSolution weak_kam_backward(const ModelSpec& m, const ScalarField& phi0, double dt,
                                  double tol_fix, double t_max, const SchemeOptions& opts) {
    WeakKAMSolution s = iterate_to_fixed_point(m, phi0, dt, tol_fix, t_max, opts, Side::Backward);
    s.provenance = phi0.meta.empty() ? "seed:unnamed" : "seed:" + phi0.meta;
    return s;
}

WeakKAMSolution weak_kam_forward(const ModelSpec& m, const ScalarField& phi0, double dt,
                                 double tol_fix, double t_max, const SchemeOptions& opts) {
    WeakKAMSolution s = iterate_to_fixed_point(m, phi0, dt, tol_fix, t_max, opts, Side::Forward);
    s.provenance = phi0.meta.empty() ? "seed:unnamed" : "seed:" + phi0.meta;
    return s;
}

std::pair<WeakKAMSolution, CoincidenceSet> conjugate_pair(const ModelSpec& m,
                                                          const WeakKAMSolution& v_minus,
                                                          double dt, double tol,
                                                          const SchemeOptions& opts) {
    require(v_minus.converged, "conjugate_pair: v_minus must be converged");
    ScalarField seed = v_minus.field;
    seed.meta = "conjugate_of:" + v_minus.provenance;
    double t_max = (m.lambda > 0.0) ? std::max(40.0, 20.0 / m.lambda) : 80.0;
    WeakKAMSolution v_plus = weak_kam_forward(m, seed, dt, std::max(1e-10, tol * 1e-3), t_max, opts);
    CoincidenceSet co;
    co.gap = ScalarField(v_minus.field.grid, 0.0, "coincidence_gap");
    for (int i = 0; i < co.gap.grid.n; ++i) {
        double g = std::fabs(v_plus.field.values[i] - v_minus.field.values[i]);
        co.gap.values[i] = g;
        if (g < tol) co.nodes.push_back(i);
    }
    return {std::move(v_plus), std::move(co)};
}

BusemannResult busemann_solution(const ModelSpec& m, const Orbit& seed, Grid grid, double dt,
                                 double tol, const SchemeOptions& opts) {
    require(seed.backward(), "busemann: seed must be a backward orbit");
    require(!seed.blown_up, "busemann: seed orbit blew up");
    double span = std::fabs(seed.span());

    auto sample_at = [&](double tau) {
        std::size_t idx = static_cast<std::size_t>(std::lround(tau / -seed.dt));
        idx = std::min(idx, seed.samples.size() - 1);
        return seed.samples[idx];
    };

    // Validate negative semi-staticity: the value at later samples must match the
    // lattice infimum of the action from the earliest sampled point.
    {
        ContactState far = sample_at(span);
        double hor = std::max(10.0 * dt, std::min(span, 20.0));
        ScalarField pot = mane_potential(m, far.x, far.u, grid, dt, hor, opts);
        double worst = 0.0;
        for (double tau : {0.0, 0.25 * span, 0.5 * span}) {
            ContactState s = sample_at(tau);
            worst = std::max(worst, std::fabs(pot.interp(s.x) - s.u));
        }
        if (worst > 5.0 * tol) {
            std::ostringstream os;
            os << "busemann: seed is not negatively semi-static at tolerance " << tol
               << " (defect " << worst << ")";
            throw std::runtime_error(os.str());
        }
    }

    BusemannResult r;
    double hor = std::max(10.0 * dt, (m.lambda > 0.0 ? 20.0 / m.lambda : 50.0));
    ScalarField acc(grid, std::numeric_limits<double>::infinity(), "busemann_w");
    double tau = 0.0;
    double prev_change = std::numeric_limits<double>::infinity();
    while (true) {
        ContactState s = sample_at(tau);
        ScalarField pot = mane_potential(m, s.x, s.u, grid, dt, hor, opts);
        double change = 0.0;
        for (int i = 0; i < grid.n; ++i) {
            double nv = std::min(acc.values[i], pot.values[i]);
            change = std::max(change, acc.values[i] - nv);
            acc.values[i] = nv;
        }
        r.taus.push_back(tau);
        if (tau >= span) break;
        // tau-levels decrease monotonically; stop early once they stop moving
        if (r.taus.size() > 1 && change < 0.1 * tol && prev_change < 0.1 * tol) break;
        prev_change = change;
        tau = (tau == 0.0) ? 1.0 : 2.0 * tau;
        if (tau > span) tau = span;
    }
    r.w = acc;
    r.w_inf = weak_kam_backward(m, acc, dt, std::max(1e-10, 0.01 * tol), 100.0, opts);
    r.w_inf.provenance = "seed:busemann";

    double worst = 0.0;
    for (double tq : r.taus) {
        ContactState s = sample_at(tq);
        worst = std::max(worst, std::fabs(r.w_inf.field.interp(s.x) - s.u));
    }
    r.seed_match = worst;
    return r;
}

std::pair<bool, double> is_fixed_point(const ModelSpec& m, const ScalarField& field, double dt,
                                       double tol, Side side, const SchemeOptions& opts) {
    ScalarField image = (side == Side::Backward) ? sweep_min(m, field, dt, opts)
                                                 : sweep_max(m, field, dt, opts);
    double residual = image.max_abs_diff(field);
    return {residual <= tol, residual};
}

}  // namespace wkam

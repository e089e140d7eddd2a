#include "wkam/action.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wkam/parallel.hpp"

namespace wkam {

SchemeOptions SchemeOptions::for_model(const ModelSpec& m, const SampleBox& box) {
    SchemeOptions o;
    AuditReport r = m.audit(box, 512);
    o.v_max = std::max(1.0, r.v_max);
    return o;
}

KernelResult kernel_short_d(const ModelSpec& m, double x0, double u0, double x, double dt,
                            const SchemeOptions& opts) {
    require(dt > 0.0, "kernel_short: dt must be positive");
    double d = m.arc(x0, x);
    double v = d / dt;
    int nsub = std::max(1, static_cast<int>(std::ceil(2.0 * m.lambda * dt)));
    double tau = dt / nsub;

    double h = u0;
    double slope = 1.0;
    for (int j = 0; j < nsub; ++j) {
        double xm = m.reduce(x0 + d * (j + 0.5) / nsub);
        // Solve hn = h + tau L(xm, (h+hn)/2, v) by Newton; the implicit part is a
        // contraction with factor <= 1/4 by the sub-step choice.
        double hn = h + tau * m.L(xm, h, v);
        for (int it = 0; it < 60; ++it) {
            double um = 0.5 * (h + hn);
            double g = hn - h - tau * m.L(xm, um, v);
            double gp = 1.0 - 0.5 * tau * m.L_u(xm, um, v);
            double step = g / gp;
            hn -= step;
            if (std::fabs(step) <= opts.kernel_tol * std::max(1.0, std::fabs(hn))) break;
        }
        double lu = m.L_u(xm, 0.5 * (h + hn), v);
        slope *= (1.0 + 0.5 * tau * lu) / (1.0 - 0.5 * tau * lu);
        h = hn;
    }
    if (!finite(h)) throw std::runtime_error("kernel_short: non-finite value");
    return {h, slope};
}

double kernel_short(const ModelSpec& m, double x0, double u0, double x, double dt,
                    const SchemeOptions& opts) {
    return kernel_short_d(m, x0, u0, x, dt, opts).value;
}

double kernel_back(const ModelSpec& m, double x0, double u0, double x, double dt,
                   const SchemeOptions& opts, double* warm) {
    // Unique w with kernel_short(x, w, x0, dt) = u0; the map is strictly increasing
    // in w with a slope bounded away from zero, so safeguarded Newton converges.
    auto eval = [&](double w) { return kernel_short_d(m, x, w, x0, dt, opts); };
    double w = (warm && finite(*warm)) ? *warm : u0;
    KernelResult k = eval(w);
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double tol = opts.invert_tol * std::max(1.0, std::fabs(u0));
    for (int it = 0; it < 300; ++it) {
        double g = k.value - u0;
        if (g > 0) hi = std::min(hi, w); else lo = std::max(lo, w);
        if (std::fabs(g) <= tol) break;
        double wn = w - g / std::max(k.slope, 1e-12);
        if (!(wn > lo && wn < hi)) {
            if (finite(lo) && finite(hi)) wn = 0.5 * (lo + hi);
            else if (finite(lo)) wn = lo + std::max(1.0, std::fabs(lo));
            else wn = hi - std::max(1.0, std::fabs(hi));
        }
        w = wn;
        k = eval(w);
        if (finite(lo) && finite(hi) && hi - lo <= 1e-16 * std::max(1.0, std::fabs(w))) break;
    }
    if (warm) *warm = w;
    return w;
}

namespace {

struct ScanSetup {
    int window = 0;
    double dx = 0.0;
};

ScanSetup make_scan(const Grid& g, double dt, const SchemeOptions& opts) {
    ScanSetup s;
    s.dx = g.dx();
    if (opts.v_max * dt < s.dx) {
        std::ostringstream os;
        os << "reachability window is empty: v_max*dt = " << opts.v_max * dt
           << " < grid spacing " << s.dx << "; increase dt or coarsen the grid";
        throw std::runtime_error(os.str());
    }
    int w = static_cast<int>(std::ceil(opts.v_max * dt / s.dx));
    s.window = std::min(w + 2, g.n / 2);
    return s;
}

// Shared sweep body: minimize (sign=+1) or maximize (sign=-1) the one-step value
// over sources z in the reachability window, with optional continuum refinement
// of the two cells around the best node. phi is read through linear interpolation.
template <class Kernel>
ScalarField sweep_impl(const ModelSpec& m, const ScalarField& phi, double dt,
                       const SchemeOptions& opts, double sign, Kernel&& kernel,
                       std::vector<double>* arg_out) {
    const Grid& g = phi.grid;
    ScanSetup scan = make_scan(g, dt, opts);
    ScalarField out(g, 0.0, phi.meta);
    if (arg_out) arg_out->assign(g.n, 0.0);

    parallel_for(g.n, [&](int i) {
        double xi = g.node(i);
        double warm = std::numeric_limits<double>::quiet_NaN();
        double best = std::numeric_limits<double>::infinity();
        int best_j = 0;
        for (int j = i - scan.window; j <= i + scan.window; ++j) {
            double z = j * scan.dx;
            double val = sign * kernel(z, phi[j], xi, &warm);
            int wj = g.wrap(j);
            if (val < best || (val == best && wj < g.wrap(best_j))) {
                best = val;
                best_j = j;
            }
        }
        double best_z = best_j * scan.dx;
        if (opts.refine) {
            auto objective = [&](double z) {
                // interpolate phi between the enclosing nodes of z
                return sign * kernel(z, phi.interp(z), xi, &warm);
            };
            for (int cell = 0; cell < 2; ++cell) {
                double a = best_z + (cell - 1) * scan.dx;
                double b = a + scan.dx;
                double fz;
                double zr = golden_min(objective, a, b, opts.golden_iters, &fz);
                if (fz < best) {
                    best = fz;
                    best_z = zr;
                }
            }
        }
        out.values[i] = sign * best;
        if (arg_out) (*arg_out)[i] = m.reduce(best_z);
    }, 32);
    return out;
}

}  // namespace

ScalarField sweep_min(const ModelSpec& m, const ScalarField& phi, double dt,
                      const SchemeOptions& opts, std::vector<double>* argmin) {
    return sweep_impl(m, phi, dt, opts, +1.0,
                      [&](double z, double w, double x, double*) { return kernel_short(m, z, w, x, dt, opts); },
                      argmin);
}

ScalarField sweep_max(const ModelSpec& m, const ScalarField& phi, double dt,
                      const SchemeOptions& opts, std::vector<double>* argmax) {
    return sweep_impl(m, phi, dt, opts, -1.0,
                      [&](double z, double w, double x, double* warm) { return kernel_back(m, z, w, x, dt, opts, warm); },
                      argmax);
}

int ActionTable::layer_of(double t) const {
    int k = static_cast<int>(std::lround(t / dt)) - 1;
    require(k >= 0 && k < n_layers(), "action table: time outside the lattice");
    require(std::fabs(t - t_of(k)) < 1e-9 * std::max(1.0, std::fabs(t)),
            "action table: time not on the dt-lattice");
    return k;
}

double ActionTable::value_at(int k, double x) const {
    const std::vector<double>& lay = layers[k];
    double dx = grid.dx();
    double y = reduce_mod(x, grid.period) / dx;
    int i = static_cast<int>(y);
    if (i >= grid.n) i -= grid.n;
    double frac = y - i;
    return (1.0 - frac) * lay[i] + frac * lay[grid.wrap(i + 1)];
}

namespace {

std::vector<double> point_source_layer(const ModelSpec& m, double x0, double u0, const Grid& g,
                                       double dt, const SchemeOptions& opts, bool backward) {
    std::vector<double> lay(g.n);
    parallel_for(g.n, [&](int i) {
        double xi = g.node(i);
        lay[i] = backward ? kernel_back(m, x0, u0, xi, dt, opts, nullptr)
                          : kernel_short(m, x0, u0, xi, dt, opts);
    }, 16);
    return lay;
}

int layer_count(double horizon, double dt) {
    require(horizon >= dt, "action table: horizon must cover at least one layer");
    return static_cast<int>(std::lround(horizon / dt));
}

}  // namespace

ActionTable forward_action(const ModelSpec& m, double x0, double u0, Grid grid, double horizon,
                           double dt, const SchemeOptions& opts) {
    ActionTable t;
    t.grid = grid;
    t.x0 = m.reduce(x0);
    t.u0 = u0;
    t.dt = dt;
    t.horizon = horizon;
    t.backward = false;
    int K = layer_count(horizon, dt);
    t.layers.reserve(K);
    t.argmin.reserve(K);

    t.layers.push_back(point_source_layer(m, t.x0, u0, grid, dt, opts, false));
    t.argmin.emplace_back(grid.n, t.x0);

    ScalarField cur(grid);
    cur.values = t.layers[0];
    for (int k = 1; k < K; ++k) {
        std::vector<double> arg;
        cur = sweep_min(m, cur, dt, opts, &arg);
        t.layers.push_back(cur.values);
        t.argmin.push_back(std::move(arg));
    }
    return t;
}

ActionTable backward_action(const ModelSpec& m, double x0, double u0, Grid grid, double horizon,
                            double dt, const SchemeOptions& opts) {
    ActionTable t;
    t.grid = grid;
    t.x0 = m.reduce(x0);
    t.u0 = u0;
    t.dt = dt;
    t.horizon = horizon;
    t.backward = true;
    int K = layer_count(horizon, dt);
    t.layers.reserve(K);
    t.argmin.reserve(K);

    t.layers.push_back(point_source_layer(m, t.x0, u0, grid, dt, opts, true));
    t.argmin.emplace_back(grid.n, t.x0);

    ScalarField cur(grid);
    cur.values = t.layers[0];
    for (int k = 1; k < K; ++k) {
        std::vector<double> arg;
        cur = sweep_max(m, cur, dt, opts, &arg);
        t.layers.push_back(cur.values);
        t.argmin.push_back(std::move(arg));
    }
    return t;
}

BarrierResult peierls_barrier(const ModelSpec& m, double x0, double u0, Grid grid, double dt,
                              double tol, double t_max, const SchemeOptions& opts) {
    require(tol > 0.0, "peierls_barrier: tol must be positive");
    BarrierResult r;
    ScalarField cur(grid);
    cur.values = point_source_layer(m, m.reduce(x0), u0, grid, dt, opts, false);
    int k = 1;
    for (; (k + 1) * dt <= t_max + 1e-12; ++k) {
        ScalarField next = sweep_min(m, cur, dt, opts);
        double diff = next.max_abs_diff(cur);
        cur = std::move(next);
        if (diff < tol) {
            r.converged = true;
            ++k;
            break;
        }
    }
    r.field = std::move(cur);
    r.field.meta = "peierls_barrier";
    r.t_reached = k * dt;
    r.layers_used = k;
    return r;
}

ScalarField mane_potential(const ModelSpec& m, double x0, double u0, Grid grid, double dt,
                           double horizon, const SchemeOptions& opts) {
    int K = layer_count(horizon, dt);
    require(K >= 10, "mane_potential: horizon must cover at least 10 layers");
    ScalarField cur(grid);
    cur.values = point_source_layer(m, m.reduce(x0), u0, grid, dt, opts, false);
    ScalarField acc = cur;
    for (int k = 1; k < K; ++k) {
        cur = sweep_min(m, cur, dt, opts);
        for (int i = 0; i < grid.n; ++i) acc.values[i] = std::min(acc.values[i], cur.values[i]);
    }
    acc.meta = "mane_potential";
    return acc;
}

ScalarField sup_backward(const ModelSpec& m, double x0, double u0, Grid grid, double dt,
                         double horizon, const SchemeOptions& opts) {
    int K = layer_count(horizon, dt);
    ScalarField cur(grid);
    cur.values = point_source_layer(m, m.reduce(x0), u0, grid, dt, opts, true);
    ScalarField acc = cur;
    for (int k = 1; k < K; ++k) {
        cur = sweep_max(m, cur, dt, opts);
        for (int i = 0; i < grid.n; ++i) acc.values[i] = std::max(acc.values[i], cur.values[i]);
    }
    acc.meta = "sup_backward";
    return acc;
}

std::vector<CurvePoint> extract_minimizer(const ActionTable& table, double x, double t) {
    require(!table.backward, "extract_minimizer: forward tables only");
    int k = table.layer_of(t);
    std::vector<CurvePoint> rev;
    double pos = reduce_mod(x, table.grid.period);
    rev.push_back({table.t_of(k), pos, table.value_at(k, pos)});
    for (int layer = k; layer >= 1; --layer) {
        const std::vector<double>& arg = table.argmin[layer];
        // interpolate the predecessor link field at pos (periodic, angle-aware)
        double dx = table.grid.dx();
        double y = reduce_mod(pos, table.grid.period) / dx;
        int i = static_cast<int>(y);
        if (i >= table.grid.n) i -= table.grid.n;
        double frac = y - i;
        double a0 = arg[i], a1 = arg[table.grid.wrap(i + 1)];
        double prev = reduce_mod(a0 + frac * shorter_arc(a0, a1, table.grid.period), table.grid.period);
        if (!finite(prev)) throw std::logic_error("extract_minimizer: broken argmin chain");
        pos = prev;
        rev.push_back({table.t_of(layer - 1), pos, table.value_at(layer - 1, pos)});
    }
    rev.push_back({0.0, table.x0, table.u0});
    std::reverse(rev.begin(), rev.end());
    return rev;
}

}  // namespace wkam

#include "wkam/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <cstdlib>
#include <cstdio>

namespace wkam {

const char* set_kind_name(SetKind k) {
    switch (k) {
        case SetKind::Sigma: return "sigma";
        case SetKind::Coincidence: return "coincidence";
        case SetKind::Aubry: return "aubry";
        case SetKind::StronglyStatic: return "strongly_static";
        case SetKind::Mane: return "mane";
        case SetKind::OmegaLimit: return "omega_limit";
    }
    return "?";
}

std::vector<double> SetEstimate::projected_sorted(double period) const {
    std::vector<double> xs;
    xs.reserve(points.size());
    for (const SetPoint& p : points) xs.push_back(reduce_mod(p.s.x, period));
    std::sort(xs.begin(), xs.end());
    return xs;
}

double SetEstimate::max_projected_gap(double period) const {
    std::vector<double> xs = projected_sorted(period);
    if (xs.empty()) return period;
    double gap = xs.front() + period - xs.back();
    for (std::size_t i = 1; i < xs.size(); ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
    return gap;
}

double SetEstimate::directed_projected(const SetEstimate& a, const SetEstimate& b, double period) {
    if (a.points.empty()) return 0.0;
    if (b.points.empty()) return period;
    double worst = 0.0;
    for (const SetPoint& p : a.points) {
        double best = period;
        for (const SetPoint& q : b.points)
            best = std::min(best, circle_dist(p.s.x, q.s.x, period));
        worst = std::max(worst, best);
    }
    return worst;
}

double SetEstimate::hausdorff_projected(const SetEstimate& a, const SetEstimate& b, double period) {
    return std::max(directed_projected(a, b, period), directed_projected(b, a, period));
}

void SetEstimate::dedup(double radius, double period) {
    std::vector<SetPoint> kept;
    for (const SetPoint& p : points) {
        bool dup = false;
        for (const SetPoint& q : kept) {
            double d = circle_dist(p.s.x, q.s.x, period) + std::fabs(p.s.u - q.s.u) +
                       std::fabs(p.s.p - q.s.p);
            if (d < radius) { dup = true; break; }
        }
        if (!dup) kept.push_back(p);
    }
    points = std::move(kept);
}

// ---------------------------------------------------------------------------
// Pseudograph

std::vector<ContactState> Pseudograph::points() const {
    std::vector<ContactState> out;
    out.reserve(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        double x = grid.node(i), u = v.values[i];
        out.push_back({x, u, p2[i][0]});
        if (std::fabs(p2[i][1] - p2[i][0]) > 1e-9) out.push_back({x, u, p2[i][1]});
    }
    return out;
}

double Pseudograph::graph_dist(const ContactState& s) const {
    double du = std::fabs(s.u - v.interp(s.x));
    double dx = grid.dx();
    int i = static_cast<int>(reduce_mod(s.x, grid.period) / dx);
    double dp = std::numeric_limits<double>::infinity();
    for (int j : {i, i + 1})
        for (double cand : p2[grid.wrap(j)])
            dp = std::min(dp, std::fabs(s.p - cand));
    return du + dp;
}

namespace {

// Move a gradient candidate onto the zero level of p -> H(x,u,p); reachable
// gradients sit there exactly. Newton with a golden fallback near H_p = 0.
double polish_gradient(const ModelSpec& m, double x, double u, double p0) {
    double p = p0;
    for (int it = 0; it < 40; ++it) {
        double h = m.H(x, u, p);
        double hp = m.dH(x, u, p).dp;
        if (std::fabs(h) < 1e-13) return p;
        if (std::fabs(hp) < 1e-8) break;
        double step = h / hp;
        if (std::fabs(step) > 0.5 * std::max(1.0, std::fabs(p0))) break;  // wandered off
        p -= step;
    }
    // Degenerate slope: settle for the nearest local minimum of |H|.
    double span = 0.2 * std::max(1.0, std::fabs(p0));
    auto absH = [&](double q) { return std::fabs(m.H(x, u, q)); };
    double best = golden_min(absH, p0 - span, p0 + span, 40);
    return (absH(best) < std::fabs(m.H(x, u, p))) ? best : p;
}

}  // namespace

Pseudograph make_pseudograph(const ModelSpec& m, const WeakKAMSolution& sol, double tol_H) {
    require(sol.converged, "pseudograph: solution not converged");
    Pseudograph g;
    g.grid = sol.field.grid;
    g.v = sol.field;
    g.p2.resize(g.grid.n);
    double dx = g.grid.dx();
    for (int i = 0; i < g.grid.n; ++i) {
        double x = g.grid.node(i), u = g.v.values[i];
        double pl = (g.v.values[i] - g.v[i - 1]) / dx;
        double pr = (g.v[i + 1] - g.v.values[i]) / dx;
        double cands[2] = {polish_gradient(m, x, u, pl), polish_gradient(m, x, u, pr)};
        bool ok[2];
        for (int k = 0; k < 2; ++k) ok[k] = std::fabs(m.H(x, u, cands[k])) <= tol_H;
        if (!ok[0] && !ok[1]) {
            ++g.failed_nodes;
            g.p2[i] = {pl, pr};  // keep the raw candidates, flagged below
        } else if (ok[0] && ok[1]) {
            g.p2[i] = {cands[0], cands[1]};
        } else {
            double c = ok[0] ? cands[0] : cands[1];
            g.p2[i] = {c, c};
        }
    }
    g.resolution_warning = g.failed_nodes * 20 > g.grid.n;  // > 5% of nodes
    return g;
}

namespace {

double rest_speed(const ModelSpec& m, const ContactState& s) {
    Partials d = m.dH(s.x, s.u, s.p);
    double h = m.H(s.x, s.u, s.p);
    return std::fabs(d.dp) + std::fabs(d.dp * s.p - h) + std::fabs(-d.dx - d.du * s.p);
}

}  // namespace

// ---------------------------------------------------------------------------
// Sigma set

SetEstimate sigma_set(const ModelSpec& m, const WeakKAMSolution& v_minus, double T, double dt,
                      double tol_graph, const SetsOptions& opts) {
    require(v_minus.converged, "sigma_set: solution not converged");
    require(T > 0.0, "sigma_set: T must be positive");
    Pseudograph g = make_pseudograph(m, v_minus, opts.tol_H);
    SetEstimate est;
    est.kind = SetKind::Sigma;
    est.tol = tol_graph;
    est.provenance = "graph:" + v_minus.provenance;

    // g is invariant under the backward semiflow, so membership in every
    // backward image is equivalent to the forward orbit staying on the graph.
    std::vector<ContactState> pts = g.points();
    double dx = g.grid.dx();
    for (const ContactState& s : pts) {
        // rest points cannot be followed through their unstable directions;
        // their forward orbit is the point itself
        if (rest_speed(m, s) <= 0.5 * dx) {
            est.points.push_back({s, g.graph_dist(s)});
            continue;
        }
        Orbit orb = integrate(m, s, T, dt);
        if (orb.blown_up) continue;
        double worst = 0.0;
        for (std::size_t k = 0; k < orb.samples.size(); k += 10)
            worst = std::max(worst, g.graph_dist(orb.samples[k]));
        if (worst <= tol_graph) est.points.push_back({s, worst});
    }
    return est;
}

// ---------------------------------------------------------------------------
// Shared verification machinery for the action identities along sampled curves

namespace {

struct SourceEntry {
    ContactState src;
    ActionTable fwd;           // full forward table (exact-time lookups)
    ScalarField pot;           // min over layers
    ScalarField sup;           // max of backward layers (built on demand)
    bool has_sup = false;
};

struct SourceCache {
    const ModelSpec& m;
    Grid grid;
    double dt, horizon;
    const SchemeOptions& scheme;
    double merge_radius;
    std::vector<SourceEntry> entries;
    int max_sup = 24;

    SourceCache(const ModelSpec& mm, Grid g, double dt_, double hor, const SchemeOptions& sch,
                double merge)
        : m(mm), grid(g), dt(dt_), horizon(hor), scheme(sch), merge_radius(merge) {}

    int find(const ContactState& s) const {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            double d = circle_dist(s.x, entries[i].src.x, m.period) + std::fabs(s.u - entries[i].src.u);
            if (d < merge_radius) return static_cast<int>(i);
        }
        return -1;
    }

    int get_or_build(const ContactState& s) {
        int idx = find(s);
        if (idx >= 0) return idx;
        SourceEntry e;
        e.src = s;
        e.fwd = forward_action(m, s.x, s.u, grid, horizon, dt, scheme);
        e.pot = ScalarField(grid, std::numeric_limits<double>::infinity(), "pot");
        for (const auto& lay : e.fwd.layers)
            for (int i = 0; i < grid.n; ++i) e.pot.values[i] = std::min(e.pot.values[i], lay[i]);
        entries.push_back(std::move(e));
        return static_cast<int>(entries.size()) - 1;
    }

    bool ensure_sup(int idx) {
        SourceEntry& e = entries[idx];
        if (e.has_sup) return true;
        int built = 0;
        for (const SourceEntry& q : entries) built += q.has_sup ? 1 : 0;
        if (built >= max_sup) return false;
        e.sup = sup_backward(m, e.src.x, e.src.u, grid, dt, horizon, scheme);
        e.has_sup = true;
        return true;
    }
};

struct TimedState {
    double t;
    ContactState s;
};

// Lattice truncation of inf/sup over continuous s > 0: a slow quadratic-cost
// traversal of distance d within the horizon costs at most d^2/(2*horizon).
double lattice_allowance(double d, double horizon) { return d * d / (2.0 * horizon); }

struct IdentityDefects {
    double minimizing = 0.0;
    double semi = 0.0;
    double full = 0.0;
    double strong = 0.0;
    bool strong_known = true;
};

void accumulate_pair(const ModelSpec& m, SourceCache& cache, int src_idx, double t_src,
                     const TimedState& tgt, double horizon, IdentityDefects& d, bool want_strong,
                     const ContactState* true_src = nullptr) {
    SourceEntry& e = cache.entries[src_idx];
    double tau = tgt.t - t_src;
    double dist = circle_dist(e.src.x, tgt.s.x, m.period);
    double allow = lattice_allowance(dist, horizon);

    // the exact-time leg needs the table built from the orbit's own source;
    // a merged neighbor entry only supports the inf/sup legs
    bool src_exact = true;
    if (true_src) {
        double mis = circle_dist(e.src.x, true_src->x, m.period) + std::fabs(e.src.u - true_src->u);
        src_exact = mis <= 0.25 * cache.grid.dx();
    }
    if (src_exact && tau > 0.5 * cache.dt) {
        int k = static_cast<int>(std::lround(tau / cache.dt)) - 1;
        if (k >= 0 && k < e.fwd.n_layers() &&
            std::fabs(tau - e.fwd.t_of(k)) < 1e-6 * cache.dt) {
            double hval = e.fwd.value_at(k, tgt.s.x);
            // point-source layers carry curvature ~1/tau; discount the node
            // interpolation accordingly
            double dxg = cache.grid.dx();
            double interp_allow = dxg * dxg * (0.25 / tau + 1.0);
            d.minimizing =
                std::max(d.minimizing, std::max(0.0, std::fabs(tgt.s.u - hval) - interp_allow));
        }
    }

    double pot = e.pot.interp(tgt.s.x);
    double inf_defect = std::max({pot - tgt.s.u - allow, tgt.s.u - pot, 0.0});
    if (tau >= 0.0) d.semi = std::max(d.semi, inf_defect);
    d.full = std::max(d.full, inf_defect);
    if (std::getenv("WKAM_DEBUG_PAIRS") && (inf_defect > 1e-4 || d.minimizing > 1e-4))
        std::fprintf(stderr, "pair src(x=%.5f u=%.3e t=%.3f) tgt(x=%.5f u=%.3e t=%.3f) pot=%.4e mindef=%.3e infdef=%.3e\n",
                     e.src.x, e.src.u, t_src, tgt.s.x, tgt.s.u, tgt.t, pot, d.minimizing, inf_defect);

    if (want_strong) {
        if (cache.ensure_sup(src_idx)) {
            double sup = e.sup.interp(tgt.s.x);
            d.strong = std::max(d.strong, std::max({tgt.s.u - sup - allow, sup - tgt.s.u, 0.0}));
        } else {
            d.strong_known = false;
        }
    }
}

ContactState project_onto_graph(const Pseudograph& g, const ContactState& s) {
    ContactState out = s;
    out.u = g.v.interp(s.x);
    double dx = g.grid.dx();
    int i = static_cast<int>(reduce_mod(s.x, g.grid.period) / dx);
    double best = std::numeric_limits<double>::infinity();
    for (int j : {i, i + 1})
        for (double cand : g.p2[g.grid.wrap(j)])
            if (std::fabs(s.p - cand) < best) {
                best = std::fabs(s.p - cand);
                out.p = cand;
            }
    return out;
}

// Targets aligned to the table lattice, spanning [-span_b, +span_f]. Backward
// samples are projected onto the graph when one is supplied: the true backward
// orbit of a graph point stays on the graph, while the u-component of its
// numerical shadow grows noise at the rate of the value bound.
std::vector<TimedState> pick_targets(const Orbit& bwd, const Orbit& fwd, double table_dt,
                                     int count, const Pseudograph* graph = nullptr) {
    std::vector<TimedState> out;
    auto add_from = [&](const Orbit& o, int want, bool project) {
        if (o.samples.size() < 2) return;
        int align = std::max(1, static_cast<int>(std::lround(table_dt / std::fabs(o.dt))));
        int last = static_cast<int>(o.samples.size()) - 1;
        last -= last % align;
        if (last <= 0) return;
        int n_slots = last / align;
        int step = std::max(1, n_slots / std::max(1, want));
        for (int k = step; k <= n_slots; k += step) {
            ContactState s = o.samples[static_cast<std::size_t>(k) * align];
            if (project && graph) s = project_onto_graph(*graph, s);
            out.push_back({o.t_at(static_cast<std::size_t>(k) * align), s});
        }
    };
    add_from(bwd, count / 2, true);
    add_from(fwd, count / 2, false);
    return out;
}

// Keep only the prefix that stays within tol_graph of the graph, snapped to a
// multiple of align samples so the endpoint sits on the table's time lattice.
// Transverse noise grows exponentially under the backward flow, so the tail
// past the departure point carries no usable information.
Orbit truncate_off_graph(const Orbit& o, const Pseudograph& g, double tol_graph, int align) {
    Orbit out = o;
    std::size_t keep = o.samples.size();
    for (std::size_t i = 0; i < o.samples.size(); ++i) {
        if (g.graph_dist(o.samples[i]) > tol_graph) {
            keep = i;
            break;
        }
    }
    if (keep < o.samples.size()) out.blown_up = false;
    if (keep >= 1) keep -= (keep - 1) % static_cast<std::size_t>(align);
    out.samples.resize(std::max<std::size_t>(keep, 1));
    return out;
}

std::vector<SetPoint> cluster_tail(const Orbit& orbit, double period, double tol_cluster) {
    std::vector<SetPoint> reps;
    if (orbit.samples.size() < 3) return reps;
    std::size_t start = 2 * orbit.samples.size() / 3;
    for (std::size_t i = start; i < orbit.samples.size(); ++i) {
        const ContactState& s = orbit.samples[i];
        bool merged = false;
        for (SetPoint& r : reps) {
            double d = circle_dist(r.s.x, s.x, period) + std::fabs(r.s.u - s.u) + std::fabs(r.s.p - s.p);
            if (d < tol_cluster) {
                r.defect = std::max(r.defect, d);
                merged = true;
                break;
            }
        }
        if (!merged) reps.push_back({s, 0.0});
    }
    return reps;
}

}  // namespace

SetEstimate omega_limit(const ModelSpec& m, const ContactState& s0, double T, double dt,
                        double tol_cluster) {
    Orbit orb = integrate(m, s0, T, dt);
    if (orb.blown_up) {
        std::ostringstream os;
        os << "omega_limit: orbit blow-up at t=" << orb.blowup_time << " after "
           << orb.samples.size() << " samples";
        throw std::runtime_error(os.str());
    }
    SetEstimate est;
    est.kind = SetKind::OmegaLimit;
    est.tol = tol_cluster;
    est.provenance = T > 0 ? "omega" : "alpha";
    est.points = cluster_tail(orb, m.period, tol_cluster);
    return est;
}

CurveClassification classify_curve(const ModelSpec& m, const Orbit& orbit, Grid grid, double dt,
                                   double horizon, double tol, const SchemeOptions& opts) {
    require(!orbit.blown_up, "classify_curve: orbit blew up");
    require(orbit.samples.size() >= 3, "classify_curve: need >= 3 samples");
    double span = std::fabs(orbit.span());
    require(horizon >= span, "classify_curve: horizon shorter than the orbit span");
    double res = orbit_residual(m, orbit);
    require(res <= tol, "classify_curve: orbit residual exceeds tolerance");

    SourceCache cache(m, grid, dt, horizon, opts, 0.25 * grid.dx());
    std::size_t n = orbit.samples.size();
    std::vector<std::size_t> src_idx = {0, n / 2, n - 1};
    Orbit empty;
    std::vector<TimedState> targets = pick_targets(empty, orbit, dt, 16);
    targets.push_back({orbit.t_at(0), orbit.samples[0]});

    IdentityDefects d;
    for (std::size_t is : src_idx) {
        ContactState s = orbit.samples[is];
        int e = cache.get_or_build(s);
        for (const TimedState& tgt : targets)
            accumulate_pair(m, cache, e, orbit.t_at(is), tgt, horizon, d, true);
    }

    CurveClassification c;
    c.globally_minimizing = {d.minimizing <= tol, d.minimizing};
    c.semi_static = {d.minimizing <= tol && d.semi <= tol, std::max(d.minimizing, d.semi)};
    c.fully_static = {d.minimizing <= tol && d.full <= tol, std::max(d.minimizing, d.full)};
    c.strongly_static = {d.strong_known && d.minimizing <= tol && d.strong <= tol,
                         std::max(d.minimizing, d.strong)};
    return c;
}

AubryResult aubry_estimate(const ModelSpec& m, const WeakKAMSolution& v_minus, double dt, double T,
                           double horizon, const SetsOptions& opts) {
    require(v_minus.converged, "aubry_estimate: solution not converged");
    AubryResult res;
    res.graph = make_pseudograph(m, v_minus, opts.tol_H);
    const Grid& grid = v_minus.field.grid;
    double dx = grid.dx();

    res.verified.kind = SetKind::Aubry;
    res.verified.tol = opts.tol;
    res.verified.provenance = "solution:" + v_minus.provenance;
    res.raw_limits.kind = SetKind::OmegaLimit;
    res.raw_limits.tol = opts.tol_cluster;
    res.raw_limits.provenance = res.verified.provenance;

    SourceCache cache(m, grid, dt, horizon, opts.scheme, opts.tol_cluster);

    std::vector<ContactState> seeds;
    for (int i = 0; i < grid.n; i += opts.seed_stride) {
        double x = grid.node(i), u = res.graph.v.values[i];
        seeds.push_back({x, u, res.graph.p2[i][0]});
        if (std::fabs(res.graph.p2[i][1] - res.graph.p2[i][0]) > 1e-9)
            seeds.push_back({x, u, res.graph.p2[i][1]});
    }

    int steps_per_layer = std::max(1, static_cast<int>(std::lround(dt / opts.flow_dt)));
    double fp_iters = horizon / dt;

    double tol_trunc = std::min(opts.tol_graph, 5.0 * opts.tol);
    for (const ContactState& seed : seeds) {
        AubryResult::OrbitRecord rec;
        rec.fwd = integrate(m, seed, T, opts.flow_dt);
        rec.bwd = truncate_off_graph(integrate(m, seed, -T, opts.flow_dt), res.graph, tol_trunc,
                                     steps_per_layer);

        for (const Orbit* o : {&rec.fwd, &rec.bwd}) {
            if (o->blown_up || o->samples.size() < 3) continue;
            for (SetPoint& r : cluster_tail(*o, m.period, opts.tol_cluster))
                res.raw_limits.points.push_back(r);
        }

        if (rec.fwd.blown_up || rec.bwd.blown_up) {
            rec.static_defect = std::numeric_limits<double>::infinity();
            res.orbits.push_back(std::move(rec));
            continue;
        }

        rec.stationary = rest_speed(m, seed) <= 0.5 * dx;
        if (rec.stationary) {
            // Constant curve: the upper branch of the identity is the self-kernel
            // drift, the lower branch is certified by the converged solution.
            double drift = std::fabs(kernel_short(m, seed.x, seed.u, seed.x, dt, opts.scheme) - seed.u);
            rec.static_defect = std::max(drift * fp_iters, v_minus.residual * fp_iters);
        } else {
            IdentityDefects d;
            std::vector<TimedState> targets =
                pick_targets(rec.bwd, rec.fwd, dt, opts.pairs_per_orbit, &res.graph);
            std::vector<std::pair<double, ContactState>> sources;
            sources.emplace_back(rec.bwd.t_at(rec.bwd.samples.size() - 1),
                                 project_onto_graph(res.graph, rec.bwd.samples.back()));
            ContactState late = rec.fwd.samples.back();
            if (res.graph.graph_dist(late) <= opts.tol_graph)
                sources.emplace_back(rec.fwd.t_at(rec.fwd.samples.size() - 1),
                                     project_onto_graph(res.graph, late));
            for (auto& [t_src, s_src] : sources) {
                int e = cache.get_or_build(s_src);
                for (const TimedState& tgt : targets)
                    accumulate_pair(m, cache, e, t_src, tgt, horizon, d, false, &s_src);
            }
            rec.static_defect = std::max(d.minimizing, d.full);
        }
        rec.is_static = rec.static_defect <= opts.tol;

        if (rec.is_static && rec.stationary) {
            res.verified.points.push_back({seed, rec.static_defect});
        } else if (rec.is_static) {
            // thinned on-graph samples become Aubry candidates; backward samples
            // are projected for the same reason as the verification targets
            ContactState last_kept{1e300, 0, 0};
            for (const Orbit* o : {&rec.bwd, &rec.fwd}) {
                for (std::size_t k = 0; k < o->samples.size(); k += steps_per_layer) {
                    ContactState s = o->samples[k];
                    if (o == &rec.bwd) s = project_onto_graph(res.graph, s);
                    double sep = circle_dist(last_kept.x, s.x, m.period) +
                                 std::fabs(last_kept.u - s.u) + std::fabs(last_kept.p - s.p);
                    if (sep < 0.5 * dx) continue;
                    if (res.graph.graph_dist(s) > opts.tol_graph) continue;
                    res.verified.points.push_back({s, rec.static_defect});
                    last_kept = s;
                }
            }
        }
        res.orbits.push_back(std::move(rec));
    }

    res.verified.dedup(0.5 * dx, m.period);
    res.raw_limits.dedup(opts.tol_cluster, m.period);
    return res;
}

SetEstimate strongly_static_estimate(const ModelSpec& m, const AubryResult& aubry, double dt,
                                     double horizon, const SetsOptions& opts) {
    SetEstimate est;
    est.kind = SetKind::StronglyStatic;
    est.tol = opts.tol;
    est.provenance = aubry.verified.provenance;
    const Grid& grid = aubry.graph.grid;
    double dx = grid.dx();

    // Candidate sites: stationary seeds and on-graph limit representatives of
    // static orbits. A numerical orbit cannot be followed through an unstable
    // rest point, so sites are certified by the self-pair identity instead.
    std::vector<SetPoint> sites;
    auto add_site = [&](const ContactState& s, double base_defect) {
        if (aubry.graph.graph_dist(s) > opts.tol_graph) return;
        ContactState q = project_onto_graph(aubry.graph, s);
        for (const SetPoint& p : sites)
            if (circle_dist(p.s.x, q.x, m.period) + std::fabs(p.s.u - q.u) < opts.tol_cluster)
                return;
        sites.push_back({q, base_defect});
    };

    SourceCache cache(m, grid, dt, horizon, opts.scheme, opts.tol_cluster);

    for (const AubryResult::OrbitRecord& rec : aubry.orbits) {
        if (!rec.is_static) continue;
        if (rec.stationary) {
            add_site(rec.fwd.samples.front(), rec.static_defect);  // == the seed
            continue;
        }
        for (const Orbit* o : {&rec.fwd, &rec.bwd})
            for (const SetPoint& r : cluster_tail(*o, m.period, opts.tol_cluster))
                add_site(r.s, rec.static_defect);

        // moving orbits: pairwise sup-identity along the curve
        IdentityDefects d;
        std::vector<TimedState> targets =
            pick_targets(rec.bwd, rec.fwd, dt, opts.pairs_per_orbit, &aubry.graph);
        std::vector<std::pair<double, ContactState>> sources;
        sources.emplace_back(rec.bwd.t_at(rec.bwd.samples.size() - 1),
                             project_onto_graph(aubry.graph, rec.bwd.samples.back()));
        ContactState late = rec.fwd.samples.back();
        if (aubry.graph.graph_dist(late) <= opts.tol_graph)
            sources.emplace_back(rec.fwd.t_at(rec.fwd.samples.size() - 1),
                                 project_onto_graph(aubry.graph, late));
        bool known = true;
        for (auto& [t_src, s_src] : sources) {
            int e = cache.get_or_build(s_src);
            for (const TimedState& tgt : targets) {
                IdentityDefects dd;
                accumulate_pair(m, cache, e, t_src, tgt, horizon, dd, true, &s_src);
                known = known && dd.strong_known;
                d.strong = std::max(d.strong, dd.strong);
            }
        }
        double strong = std::max(rec.static_defect, d.strong);
        if (known && strong <= opts.tol) {
            ContactState last_kept{1e300, 0, 0};
            for (const Orbit* o : {&rec.bwd, &rec.fwd}) {
                for (const ContactState& s : o->samples) {
                    double sep = circle_dist(last_kept.x, s.x, m.period) +
                                 std::fabs(last_kept.u - s.u) + std::fabs(last_kept.p - s.p);
                    if (sep < 0.5 * dx) continue;
                    est.points.push_back({s, strong});
                    last_kept = s;
                }
            }
        }
    }

    // A static rest point is strongly static outright: its only curve pairs are
    // self-pairs, and the backward value tends to u as s -> 0+. Certify sites by
    // the rest-point property at grid resolution.
    for (const SetPoint& site : sites) {
        double speed = rest_speed(m, site.s);
        if (speed <= dx && site.defect <= opts.tol)
            est.points.push_back({site.s, std::max(site.defect, speed)});
    }

    est.dedup(0.5 * dx, m.period);
    return est;
}

GraphPropertyReport graph_property_check(const ModelSpec& m, const SetEstimate& aubry, Grid grid,
                                         double tol_v) {
    GraphPropertyReport rep;
    std::map<int, std::pair<double, double>> bins;  // node -> (min vel, max vel)
    for (const SetPoint& p : aubry.points) {
        double vel = m.dH(p.s.x, p.s.u, p.s.p).dp;
        int node = grid.nearest(p.s.x);
        auto it = bins.find(node);
        if (it == bins.end())
            bins.emplace(node, std::make_pair(vel, vel));
        else {
            it->second.first = std::min(it->second.first, vel);
            it->second.second = std::max(it->second.second, vel);
        }
    }
    rep.occupied_bins = static_cast<int>(bins.size());
    for (const auto& [node, mm] : bins) {
        double spread = mm.second - mm.first;
        if (spread > rep.max_spread) {
            rep.max_spread = spread;
            rep.worst_node = node;
        }
    }
    rep.pass = rep.max_spread <= tol_v;
    return rep;
}

}  // namespace wkam

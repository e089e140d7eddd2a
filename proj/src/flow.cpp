#include "wkam/flow.hpp"

#include <cmath>
#include <sstream>

#include "wkam/parallel.hpp"

namespace wkam {

namespace {

struct Deriv {
    double x, u, p;
};

inline Deriv vector_field(const ModelSpec& m, double x, double u, double p) {
    Partials d = m.dH(x, u, p);
    double h = m.H(x, u, p);
    return {d.dp, d.dp * p - h, -d.dx - d.du * p};
}

}  // namespace

ContactState rk4_step(const ModelSpec& m, const ContactState& s, double dt) {
    require(dt != 0.0, "rk4_step: dt must be nonzero");
    Deriv k1 = vector_field(m, s.x, s.u, s.p);
    Deriv k2 = vector_field(m, s.x + 0.5 * dt * k1.x, s.u + 0.5 * dt * k1.u, s.p + 0.5 * dt * k1.p);
    Deriv k3 = vector_field(m, s.x + 0.5 * dt * k2.x, s.u + 0.5 * dt * k2.u, s.p + 0.5 * dt * k2.p);
    Deriv k4 = vector_field(m, s.x + dt * k3.x, s.u + dt * k3.u, s.p + dt * k3.p);
    ContactState out;
    out.x = s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    out.u = s.u + dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    out.p = s.p + dt / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p);
    if (!finite(out.x) || !finite(out.u) || !finite(out.p)) {
        std::ostringstream os;
        os << "flow blow-up: non-finite state after step from x=" << s.x << " u=" << s.u << " p=" << s.p;
        throw std::runtime_error(os.str());
    }
    out.x = m.reduce(out.x);
    return out;
}

Orbit integrate(const ModelSpec& m, const ContactState& s0, double T, double dt) {
    require(T != 0.0, "integrate: T must be nonzero");
    require(dt > 0.0 && dt <= std::fabs(T), "integrate: need 0 < dt <= |T|");
    int steps = static_cast<int>(std::ceil(std::fabs(T) / dt - 1e-12));
    double h = T / steps;  // signed, equal steps

    Orbit orb;
    orb.t0 = 0.0;
    orb.dt = h;
    orb.samples.reserve(steps + 1);
    ContactState s = s0;
    s.x = m.reduce(s.x);
    orb.samples.push_back(s);
    for (int k = 0; k < steps; ++k) {
        if (std::fabs(s.u) + std::fabs(s.p) > kBlowupThreshold) {
            orb.blown_up = true;
            orb.blowup_time = orb.t_at(orb.samples.size() - 1);
            return orb;
        }
        try {
            s = rk4_step(m, s, h);
        } catch (const std::runtime_error&) {
            orb.blown_up = true;
            orb.blowup_time = orb.t_at(orb.samples.size() - 1);
            return orb;
        }
        orb.samples.push_back(s);
    }
    return orb;
}

double orbit_residual(const ModelSpec& m, const Orbit& orbit) {
    require(orbit.samples.size() >= 3, "orbit_residual: need >= 3 samples");
    double worst = 0.0;
    double h = orbit.dt;
    for (std::size_t i = 1; i + 1 < orbit.samples.size(); ++i) {
        const ContactState& a = orbit.samples[i - 1];
        const ContactState& b = orbit.samples[i];
        const ContactState& c = orbit.samples[i + 1];
        Deriv f = vector_field(m, b.x, b.u, b.p);
        double rx = std::fabs(shorter_arc(a.x, c.x, m.period) / (2.0 * h) - f.x);
        double ru = std::fabs((c.u - a.u) / (2.0 * h) - f.u);
        double rp = std::fabs((c.p - a.p) / (2.0 * h) - f.p);
        worst = std::max({worst, rx, ru, rp});
    }
    return worst;
}

std::vector<FlowImage> flow_pseudograph(const ModelSpec& m, const std::vector<ContactState>& graph,
                                        double t, double dt) {
    require(!graph.empty(), "flow_pseudograph: empty graph");
    std::vector<FlowImage> out(graph.size());
    if (t == 0.0) {
        for (std::size_t i = 0; i < graph.size(); ++i) out[i] = {graph[i], true};
        return out;
    }
    parallel_for(static_cast<int>(graph.size()), [&](int i) {
        Orbit orb = integrate(m, graph[i], t, dt);
        out[i].state = orb.samples.back();
        out[i].ok = !orb.blown_up;
    }, 8);
    return out;
}

double max_energy(const ModelSpec& m, const Orbit& orbit) {
    double worst = 0.0;
    for (const ContactState& s : orbit.samples)
        worst = std::max(worst, std::fabs(m.H(s.x, s.u, s.p)));
    return worst;
}

}  // namespace wkam

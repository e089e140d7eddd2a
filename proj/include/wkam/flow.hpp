#ifndef WKAM_FLOW_HPP
#define WKAM_FLOW_HPP

#include <vector>

#include "wkam/model.hpp"

namespace wkam {

struct ContactState {
    double x = 0.0, u = 0.0, p = 0.0;
};

/// Sampled trajectory of the contact flow. dt carries the direction sign.
struct Orbit {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<ContactState> samples;
    bool blown_up = false;
    double blowup_time = 0.0;

    bool backward() const { return dt < 0.0; }
    double t_at(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double span() const { return dt * static_cast<double>(samples.size() - 1); }
};

inline constexpr double kBlowupThreshold = 1e6;

/// One classical 4th-order step of the contact Hamilton equations; x reduced mod period.
/// Throws on non-finite intermediates.
ContactState rk4_step(const ModelSpec& m, const ContactState& s, double dt);

/// Integrate for time T (sign selects direction) with ceil(|T|/dt) steps of equal size.
/// A blow-up truncates the orbit and sets the flag instead of throwing.
Orbit integrate(const ModelSpec& m, const ContactState& s0, double T, double dt);

/// Max over interior samples of |finite-difference derivative - vector field|,
/// over the three components. Needs >= 3 samples.
double orbit_residual(const ModelSpec& m, const Orbit& orbit);

struct FlowImage {
    ContactState state;
    bool ok = true;
};

/// Apply the time-t flow to every point of a graph; blow-ups are flagged, not dropped.
std::vector<FlowImage> flow_pseudograph(const ModelSpec& m, const std::vector<ContactState>& graph,
                                        double t, double dt);

/// |H| along the orbit (max over samples).
double max_energy(const ModelSpec& m, const Orbit& orbit);

}  // namespace wkam

#endif

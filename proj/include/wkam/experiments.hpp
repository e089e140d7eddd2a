#ifndef WKAM_EXPERIMENTS_HPP
#define WKAM_EXPERIMENTS_HPP

#include "wkam/io.hpp"
#include "wkam/sets.hpp"

namespace wkam {

/// Concatenated backward+forward orbit through s0 spanning [-T, T].
Orbit two_sided_orbit(const ModelSpec& m, const ContactState& s0, double T, double dt);

struct DiscountProfile {
    double lambda = 0.0;
    double x1 = 0.0, x2 = 0.0;      // zeros of the drift, x2 unwrapped past x1
    std::vector<double> x, v;       // profile on [x1, x1 + period]
    double v_at_x2 = 0.0;           // gradient-branch route
    double quad_route = 0.0;        // integral-identity route over the same profile
    double closure_defect = 0.0;    // |v(x1 + period) - v(x1)|
};

/// Integrate the stationary gradient equation of the discounted drift family:
/// the descending branch on [x1, x2], the ascending branch on [x2, x1+period].
DiscountProfile integrate_discount_profile(const TrigPoly& V, double lambda, int n_ode);

ExperimentReport run_e1(double lambda, const TrigPoly& V, Grid grid, double dt, double horizon,
                        const SetsOptions& so);

ExperimentReport run_e2(const TrigPoly& f, const std::vector<double>& u_levels, Grid grid,
                        double dt, double horizon, const SetsOptions& so);

ExperimentReport discount_limit(const TrigPoly& V, const std::vector<double>& lambdas, int n_ode);

ExperimentReport property_suite(const ModelSpec& m, Grid grid, double dt, unsigned long rng_seed);

}  // namespace wkam

#endif

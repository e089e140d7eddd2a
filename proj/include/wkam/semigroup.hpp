#ifndef WKAM_SEMIGROUP_HPP
#define WKAM_SEMIGROUP_HPP

#include <utility>

#include "wkam/action.hpp"
#include "wkam/flow.hpp"

namespace wkam {

enum class Side { Backward, Forward };

struct WeakKAMSolution {
    ScalarField field;
    Side side = Side::Backward;
    double residual = 0.0;  // sup-norm fixed-point defect at t = dt
    int iterations = 0;
    bool converged = false;
    double dt = 0.0;
    std::string provenance;
};

ScalarField lax_oleinik_backward(const ModelSpec& m, const ScalarField& phi, double t, double dt,
                                 const SchemeOptions& opts);
ScalarField lax_oleinik_forward(const ModelSpec& m, const ScalarField& phi, double t, double dt,
                                const SchemeOptions& opts);

/// Iterate T_dt^- until the sup-norm increment stays below tol_fix over a
/// 10-iterate window; an unconverged result is returned flagged, not thrown.
WeakKAMSolution weak_kam_backward(const ModelSpec& m, const ScalarField& phi0, double dt,
                                  double tol_fix, double t_max, const SchemeOptions& opts);
WeakKAMSolution weak_kam_forward(const ModelSpec& m, const ScalarField& phi0, double dt,
                                 double tol_fix, double t_max, const SchemeOptions& opts);

/// Nodes where the solution and its semigroup image differ by less than tol.
struct CoincidenceSet {
    std::vector<int> nodes;
    ScalarField gap;  // |v- - v+| per node
};

/// v_plus = lim T_t^+ v_minus plus the coincidence-set estimate.
std::pair<WeakKAMSolution, CoincidenceSet> conjugate_pair(const ModelSpec& m,
                                                          const WeakKAMSolution& v_minus,
                                                          double dt, double tol,
                                                          const SchemeOptions& opts);

struct BusemannResult {
    ScalarField w;            // min over sampled tau of the potentials
    WeakKAMSolution w_inf;    // backward limit of w
    double seed_match = 0.0;  // max |w_inf(x(-tau)) - u(-tau)| over the seed
    std::vector<double> taus;
};

/// Backward solution built from a negatively semi-static seed orbit; the seed is
/// validated against the action identity first and rejected with a diagnostic if
/// it is not semi-static at tolerance tol.
BusemannResult busemann_solution(const ModelSpec& m, const Orbit& seed, Grid grid, double dt,
                                 double tol, const SchemeOptions& opts);

/// residual = sup |T_dt field - field| for the chosen side; flag = residual <= tol.
std::pair<bool, double> is_fixed_point(const ModelSpec& m, const ScalarField& field, double dt,
                                       double tol, Side side, const SchemeOptions& opts);

}  // namespace wkam

#endif

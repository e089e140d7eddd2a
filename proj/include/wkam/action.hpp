#ifndef WKAM_ACTION_HPP
#define WKAM_ACTION_HPP

#include <optional>
#include <vector>

#include "wkam/model.hpp"
#include "wkam/scalar_field.hpp"

namespace wkam {

/// Discretization knobs shared by the action tables and the semigroup sweeps.
struct SchemeOptions {
    double v_max = 4.0;      // reachability window speed bound (from the audit box)
    bool refine = true;      // continuum refinement between scan nodes; off = pure
                             // lattice transitions (exact discrete dualities)
    int golden_iters = 16;
    double kernel_tol = 1e-14;
    double invert_tol = 1e-13;

    static SchemeOptions for_model(const ModelSpec& m, const SampleBox& box = {});
};

struct KernelResult {
    double value = 0.0;
    double slope = 1.0;  // d value / d u0
};

/// One-step value h of the implicit relation
///   h = u0 + dt L(midpoint(x0,x), (u0+h)/2, (x-x0)/dt)
/// along the shorter arc, sub-stepped so each implicit solve keeps its
/// contraction factor dt_sub*lambda/2 <= 1/4.
KernelResult kernel_short_d(const ModelSpec& m, double x0, double u0, double x, double dt,
                            const SchemeOptions& opts = {});
double kernel_short(const ModelSpec& m, double x0, double u0, double x, double dt,
                    const SchemeOptions& opts = {});

/// One-step backward value: the unique w with kernel_short(m, x, w, x0, dt) = u0,
/// found by safeguarded Newton on a monotone bracket. warm, when given, carries
/// the start guess in and the solution out (scan loops pass the previous root).
double kernel_back(const ModelSpec& m, double x0, double u0, double x, double dt,
                   const SchemeOptions& opts = {}, double* warm = nullptr);

/// One backward Lax-Oleinik step on a field: out(x) = min over window z of
/// kernel_short(z, phi(z), x, dt). argmin, when given, receives the predecessor
/// coordinate per node.
ScalarField sweep_min(const ModelSpec& m, const ScalarField& phi, double dt,
                      const SchemeOptions& opts, std::vector<double>* argmin = nullptr);

/// One forward step: out(x) = max over window z of kernel_back(z, phi(z), x, dt).
ScalarField sweep_max(const ModelSpec& m, const ScalarField& phi, double dt,
                      const SchemeOptions& opts, std::vector<double>* argmax = nullptr);

/// Action values from a point source on grid x time lattice; layer k holds t = (k+1) dt.
struct ActionTable {
    Grid grid;
    double x0 = 0.0, u0 = 0.0;
    double dt = 0.0, horizon = 0.0;
    bool backward = false;
    std::vector<std::vector<double>> layers;
    std::vector<std::vector<double>> argmin;  // predecessor coordinate per [layer][node]

    int n_layers() const { return static_cast<int>(layers.size()); }
    double t_of(int k) const { return (k + 1) * dt; }
    int layer_of(double t) const;
    double value(int k, int i) const { return layers[k][grid.wrap(i)]; }
    double value_at(int k, double x) const;
};

ActionTable forward_action(const ModelSpec& m, double x0, double u0, Grid grid, double horizon,
                           double dt, const SchemeOptions& opts);
ActionTable backward_action(const ModelSpec& m, double x0, double u0, Grid grid, double horizon,
                            double dt, const SchemeOptions& opts);

struct BarrierResult {
    ScalarField field;
    bool converged = false;
    double t_reached = 0.0;
    int layers_used = 0;
};

/// Long-time limit of the forward action: layers are advanced until two
/// consecutive ones differ by < tol in sup norm (or t_max is hit; flagged).
BarrierResult peierls_barrier(const ModelSpec& m, double x0, double u0, Grid grid, double dt,
                              double tol, double t_max, const SchemeOptions& opts);

/// Pointwise min of forward layers over the dt-lattice {dt, ..., horizon};
/// the raw kernel layer participates.
ScalarField mane_potential(const ModelSpec& m, double x0, double u0, Grid grid, double dt,
                           double horizon, const SchemeOptions& opts);

/// Pointwise max of backward layers over the dt-lattice.
ScalarField sup_backward(const ModelSpec& m, double x0, double u0, Grid grid, double dt,
                         double horizon, const SchemeOptions& opts);

struct CurvePoint {
    double t, x, u;
};

/// Backtrack argmin links from (x, t) to the source; monotone time, source first.
std::vector<CurvePoint> extract_minimizer(const ActionTable& table, double x, double t);

}  // namespace wkam

#endif

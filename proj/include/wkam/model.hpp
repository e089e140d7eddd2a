#ifndef WKAM_MODEL_HPP
#define WKAM_MODEL_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "wkam/trig_poly.hpp"

namespace wkam {

enum class ModelKind { E1, E2, DiscountedQuadratic, ClassicalQuadratic, Custom };
enum class UMonotonicity { NonDecreasing, Lipschitz };

struct Partials {
    double dx, du, dp;
};

struct SampleBox {
    double u_lo = -2.0, u_hi = 2.0;
    double p_lo = -3.0, p_hi = 3.0;
};

struct AuditReport {
    double min_hpp = 0.0;                 // smallest sampled d2H/dp2
    double hu_min = 0.0, hu_max = 0.0;    // range of sampled dH/du
    double lambda_bound = 0.0;            // declared bound
    bool hu_in_range = false;
    double superlinearity_ratio = 0.0;    // min H/|p| on the box p-edge
    double v_max = 0.0;                   // max sampled |dH/dp|
    bool strictly_convex = false;
    std::vector<std::string> notes;
    bool passed() const { return strictly_convex && hu_in_range && superlinearity_ratio > 0.0; }
};

using ScalarFn = std::function<double(double, double, double)>;

/// A contact Hamiltonian family on the flat circle. Immutable after construction;
/// all evaluations are pure.
class ModelSpec {
  public:
    ModelKind kind = ModelKind::ClassicalQuadratic;
    double period = 2.0 * pi;
    double lambda = 0.0;                  // bound on dH/du
    UMonotonicity u_mode = UMonotonicity::NonDecreasing;
    TrigPoly V;                           // drift (E1)
    TrigPoly f;                           // coupling (E2)
    std::string name;

    // Custom family: H plus its partials; L optional (numeric Legendre otherwise).
    ScalarFn H_fn, Hx_fn, Hu_fn, Hp_fn, L_fn;

    static ModelSpec e1(double lambda, TrigPoly V);
    static ModelSpec e2(TrigPoly f);
    static ModelSpec discounted_quadratic(double lambda, double period = 2.0 * pi);
    static ModelSpec classical_quadratic(double period = 2.0 * pi);
    static ModelSpec custom(double period, double lambda, UMonotonicity mode,
                            ScalarFn H, ScalarFn Hx, ScalarFn Hu, ScalarFn Hp,
                            ScalarFn L = nullptr);

    /// Adapter with Hbar(x,u,p) = H(x,-u,-p); the u-monotonicity flips sign,
    /// so the result audits in Lipschitz mode.
    ModelSpec flipped() const;

    static ModelSpec from_json_file(const std::string& path);
    static ModelSpec from_json_text(const std::string& text);
    std::string to_json_text() const;

    double reduce(double x) const { return reduce_mod(x, period); }
    double arc(double from, double to) const { return shorter_arc(from, to, period); }

    double H(double x, double u, double p) const;
    Partials dH(double x, double u, double p) const;
    double L(double x, double u, double v) const;
    /// dL/du at (x,u,v); for built-ins analytic, for Custom via the envelope
    /// dL/du = -dH/du evaluated at the maximizing momentum.
    double L_u(double x, double u, double v) const;
    /// Momentum dL/dv(x,u,v) realizing the Legendre supremum.
    double legendre_p(double x, double u, double v) const;

    AuditReport audit(const SampleBox& box, int n_samples = 4096) const;

  private:
    double numeric_L(double x, double u, double v, double* pstar) const;
};

}  // namespace wkam

#endif

#include "wkam/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wkam {

ModelSpec ModelSpec::e1(double lambda, TrigPoly V) {
    require(lambda >= 0.0, "e1: lambda must be >= 0");
    ModelSpec m;
    m.kind = ModelKind::E1;
    m.period = V.period;
    m.lambda = lambda;
    m.V = std::move(V);
    m.name = "e1";
    return m;
}

ModelSpec ModelSpec::e2(TrigPoly f) {
    ModelSpec m;
    m.kind = ModelKind::E2;
    m.period = f.period;
    m.f = std::move(f);
    // dH/du = f(x), so the (H3) bound is max f.
    m.lambda = m.f.max_val();
    m.name = "e2";
    return m;
}

ModelSpec ModelSpec::discounted_quadratic(double lambda, double period) {
    require(lambda >= 0.0, "discounted_quadratic: lambda must be >= 0");
    ModelSpec m;
    m.kind = ModelKind::DiscountedQuadratic;
    m.period = period;
    m.lambda = lambda;
    m.name = "discounted";
    return m;
}

ModelSpec ModelSpec::classical_quadratic(double period) {
    ModelSpec m;
    m.kind = ModelKind::ClassicalQuadratic;
    m.period = period;
    m.lambda = 0.0;
    m.name = "classical";
    return m;
}

ModelSpec ModelSpec::custom(double period, double lambda, UMonotonicity mode,
                            ScalarFn H, ScalarFn Hx, ScalarFn Hu, ScalarFn Hp, ScalarFn L) {
    ModelSpec m;
    m.kind = ModelKind::Custom;
    m.period = period;
    m.lambda = lambda;
    m.u_mode = mode;
    m.H_fn = std::move(H);
    m.Hx_fn = std::move(Hx);
    m.Hu_fn = std::move(Hu);
    m.Hp_fn = std::move(Hp);
    m.L_fn = std::move(L);
    m.name = "custom";
    return m;
}

ModelSpec ModelSpec::flipped() const {
    ModelSpec base = *this;
    ModelSpec m;
    m.kind = ModelKind::Custom;
    m.period = period;
    m.lambda = lambda;
    m.u_mode = UMonotonicity::Lipschitz;
    m.name = name + "_flipped";
    m.H_fn = [base](double x, double u, double p) { return base.H(x, -u, -p); };
    m.Hx_fn = [base](double x, double u, double p) { return base.dH(x, -u, -p).dx; };
    m.Hu_fn = [base](double x, double u, double p) { return -base.dH(x, -u, -p).du; };
    m.Hp_fn = [base](double x, double u, double p) { return -base.dH(x, -u, -p).dp; };
    m.L_fn = [base](double x, double u, double v) { return base.L(x, -u, -v); };
    return m;
}

double ModelSpec::H(double x, double u, double p) const {
    switch (kind) {
        case ModelKind::E1:
            return lambda * u + 0.5 * p * p + p * V.eval(x);
        case ModelKind::E2:
            return 0.5 * p * p + f.eval(x) * u;
        case ModelKind::DiscountedQuadratic:
            return lambda * u + 0.5 * p * p;
        case ModelKind::ClassicalQuadratic:
            return 0.5 * p * p;
        case ModelKind::Custom:
            require(static_cast<bool>(H_fn), "custom model: missing H callback");
            return H_fn(x, u, p);
    }
    return 0.0;
}

Partials ModelSpec::dH(double x, double u, double p) const {
    switch (kind) {
        case ModelKind::E1:
            return {p * V.deriv(x), lambda, p + V.eval(x)};
        case ModelKind::E2:
            return {f.deriv(x) * u, f.eval(x), p};
        case ModelKind::DiscountedQuadratic:
            return {0.0, lambda, p};
        case ModelKind::ClassicalQuadratic:
            return {0.0, 0.0, p};
        case ModelKind::Custom:
            require(Hx_fn && Hu_fn && Hp_fn, "custom model: missing partial callbacks");
            return {Hx_fn(x, u, p), Hu_fn(x, u, p), Hp_fn(x, u, p)};
    }
    return {0, 0, 0};
}

double ModelSpec::L(double x, double u, double v) const {
    switch (kind) {
        case ModelKind::E1:
            return -lambda * u + 0.5 * sqr(v - V.eval(x));
        case ModelKind::E2:
            return 0.5 * v * v - f.eval(x) * u;
        case ModelKind::DiscountedQuadratic:
            return -lambda * u + 0.5 * v * v;
        case ModelKind::ClassicalQuadratic:
            return 0.5 * v * v;
        case ModelKind::Custom:
            if (L_fn) return L_fn(x, u, v);
            return numeric_L(x, u, v, nullptr);
    }
    return 0.0;
}

double ModelSpec::L_u(double x, double u, double v) const {
    switch (kind) {
        case ModelKind::E1:
        case ModelKind::DiscountedQuadratic:
            return -lambda;
        case ModelKind::E2:
            return -f.eval(x);
        case ModelKind::ClassicalQuadratic:
            return 0.0;
        case ModelKind::Custom: {
            // Envelope: the u-derivative of sup_p(pv - H) is -H_u at the maximizer.
            double ps = legendre_p(x, u, v);
            require(static_cast<bool>(Hu_fn), "custom model: missing Hu callback");
            return -Hu_fn(x, u, ps);
        }
    }
    return 0.0;
}

double ModelSpec::legendre_p(double x, double u, double v) const {
    switch (kind) {
        case ModelKind::E1:
            return v - V.eval(x);
        case ModelKind::E2:
        case ModelKind::DiscountedQuadratic:
        case ModelKind::ClassicalQuadratic:
            return v;
        case ModelKind::Custom: {
            double ps = 0.0;
            numeric_L(x, u, v, &ps);
            return ps;
        }
    }
    return v;
}

double ModelSpec::numeric_L(double x, double u, double v, double* pstar) const {
    require(Hp_fn && H_fn, "custom model: missing H/Hp callback");
    // Strict convexity makes g(p) = v - H_p(x,u,p) decreasing; bracket its root.
    auto g = [&](double p) { return v - Hp_fn(x, u, p); };
    double lo = -1.0, hi = 1.0;
    int grow = 0;
    while (g(lo) < 0.0) {
        lo *= 2.0;
        if (++grow > 80) throw std::runtime_error("legendre sup: failed to bracket (superlinearity violated)");
    }
    grow = 0;
    while (g(hi) > 0.0) {
        hi *= 2.0;
        if (++grow > 80) throw std::runtime_error("legendre sup: failed to bracket (superlinearity violated)");
    }
    double ps = bisect_root(g, lo, hi, 1e-13 * std::max(1.0, std::fabs(v)));
    if (pstar) *pstar = ps;
    return ps * v - H_fn(x, u, ps);
}

AuditReport ModelSpec::audit(const SampleBox& box, int n_samples) const {
    AuditReport r;
    r.lambda_bound = lambda;
    int nx = 64;
    int nrest = std::max(4, n_samples / nx);
    int nu = static_cast<int>(std::sqrt(static_cast<double>(nrest)));
    int np = std::max(4, nrest / std::max(1, nu));
    nu = std::max(4, nu);

    double hpp_min = std::numeric_limits<double>::infinity();
    double hu_lo = std::numeric_limits<double>::infinity();
    double hu_hi = -std::numeric_limits<double>::infinity();
    double vmax = 0.0;
    double super = std::numeric_limits<double>::infinity();
    double dp = 1e-4 * std::max(1.0, box.p_hi - box.p_lo);

    for (int i = 0; i < nx; ++i) {
        double x = i * period / nx;
        for (int j = 0; j < nu; ++j) {
            double u = box.u_lo + (box.u_hi - box.u_lo) * j / (nu - 1);
            for (int k = 0; k < np; ++k) {
                double p = box.p_lo + (box.p_hi - box.p_lo) * k / (np - 1);
                Partials d = dH(x, u, p);
                double hpp = (dH(x, u, p + dp).dp - dH(x, u, p - dp).dp) / (2.0 * dp);
                hpp_min = std::min(hpp_min, hpp);
                hu_lo = std::min(hu_lo, d.du);
                hu_hi = std::max(hu_hi, d.du);
                vmax = std::max(vmax, std::fabs(d.dp));
            }
            for (double pe : {box.p_lo, box.p_hi})
                if (std::fabs(pe) > 1e-12)
                    super = std::min(super, (H(x, u, pe) - H(x, u, 0.0)) / std::fabs(pe));
        }
    }
    r.min_hpp = hpp_min;
    r.hu_min = hu_lo;
    r.hu_max = hu_hi;
    r.v_max = vmax;
    r.superlinearity_ratio = super;
    r.strictly_convex = hpp_min > 0.0;
    double tol = 1e-9 * std::max(1.0, lambda);
    if (u_mode == UMonotonicity::NonDecreasing)
        r.hu_in_range = (hu_lo >= -tol) && (hu_hi <= lambda + tol);
    else
        r.hu_in_range = (std::fabs(hu_lo) <= lambda + tol) && (std::fabs(hu_hi) <= lambda + tol);
    if (!r.hu_in_range) {
        std::ostringstream os;
        os << "dH/du range [" << hu_lo << ", " << hu_hi << "] exceeds declared bound " << lambda
           << "; lambda must be >= " << std::max(std::fabs(hu_lo), std::fabs(hu_hi));
        r.notes.push_back(os.str());
    }
    if (!r.strictly_convex) r.notes.push_back("sampled d2H/dp2 not positive definite");
    return r;
}

// ---------------------------------------------------------------------------
// JSON descriptors

namespace {

TrigPoly poly_from_json(const nlohmann::json& j, double period, const std::string& which) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "sin") return TrigPoly::sin_wave(period);
        if (s == "one_minus_cos") return TrigPoly::one_minus_cos(period);
        throw std::runtime_error("model json: unknown " + which + " shorthand '" + s + "'");
    }
    TrigPoly t;
    t.period = period;
    if (j.is_object()) {
        if (j.contains("c0")) t.c0 = j["c0"].get<double>();
        if (j.contains("cos")) t.a = j["cos"].get<std::vector<double>>();
        if (j.contains("sin")) t.b = j["sin"].get<std::vector<double>>();
        return t;
    }
    throw std::runtime_error("model json: " + which + " must be a shorthand string or {c0,cos,sin}");
}

}  // namespace

ModelSpec ModelSpec::from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "e1") {
        double period = j.value("period", 2.0 * pi);
        TrigPoly V = j.contains("V") ? poly_from_json(j["V"], period, "V") : TrigPoly::sin_wave(period);
        double lam = j.value("lambda", 1.0);
        ModelSpec m = e1(lam, V);
        if (j.value("u_monotonicity", "nondecreasing") == std::string("lipschitz"))
            m.u_mode = UMonotonicity::Lipschitz;
        return m;
    }
    if (kind == "e2") {
        double period = j.value("period", 1.0);
        TrigPoly F = j.contains("f") ? poly_from_json(j["f"], period, "f") : TrigPoly::one_minus_cos(period);
        return e2(F);
    }
    if (kind == "discounted")
        return discounted_quadratic(j.value("lambda", 1.0), j.value("period", 2.0 * pi));
    if (kind == "classical")
        return classical_quadratic(j.value("period", 2.0 * pi));
    throw std::runtime_error("model json: unknown kind '" + kind + "' (custom models are code-only)");
}

ModelSpec ModelSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model descriptor: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ModelSpec::to_json_text() const {
    nlohmann::ordered_json j;
    switch (kind) {
        case ModelKind::E1: j["kind"] = "e1"; break;
        case ModelKind::E2: j["kind"] = "e2"; break;
        case ModelKind::DiscountedQuadratic: j["kind"] = "discounted"; break;
        case ModelKind::ClassicalQuadratic: j["kind"] = "classical"; break;
        case ModelKind::Custom: j["kind"] = "custom"; break;
    }
    j["period"] = period;
    j["lambda"] = lambda;
    j["u_monotonicity"] = (u_mode == UMonotonicity::NonDecreasing) ? "nondecreasing" : "lipschitz";
    if (kind == ModelKind::E1) j["V"] = {{"c0", V.c0}, {"cos", V.a}, {"sin", V.b}};
    if (kind == ModelKind::E2) j["f"] = {{"c0", f.c0}, {"cos", f.a}, {"sin", f.b}};
    return j.dump(2);
}

}  // namespace wkam

#include "vbl/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "vbl/errors.hpp"
#include "vbl/quadrature.hpp"

namespace vbl {

using nlohmann::json;

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::Fails: return "fails";
        case Verdict::Undetermined: return "undetermined";
    }
    return "undetermined";
}

namespace {

// Any margin closer to the threshold than 10x the numerical error bound is
// not certified either way.
Check make_check(double margin, double error_bound, std::string note = {}) {
    Check c;
    c.margin = margin;
    c.error_bound = error_bound;
    c.note = std::move(note);
    if (std::abs(margin) < 10.0 * error_bound)
        c.verdict = Verdict::Undetermined;
    else
        c.verdict = margin > 0.0 ? Verdict::Holds : Verdict::Fails;
    return c;
}

enum class SignProof { Proved, Disproved, Unknown };

struct SignResult {
    SignProof proof;
    double margin;  // min distance of the enclosure from zero over leaves
};

// Certify e(u) > 0 (or < 0 when want_positive is false) on all of [a, b] by
// interval evaluation with bisection refinement.
SignResult prove_sign(const Expr& e, double a, double b, bool want_positive, int depth = 26) {
    Interval iv;
    try {
        iv = e.eval(Interval{a, b});
    } catch (const DomainError&) {
        return {SignProof::Unknown, 0.0};
    }
    if (!want_positive) iv = -iv;
    if (iv.lo > 0.0) return {SignProof::Proved, iv.lo};
    if (iv.hi < 0.0) return {SignProof::Disproved, iv.hi};
    const double mid = 0.5 * (a + b);
    const double fm = want_positive ? e.eval(mid) : -e.eval(mid);
    if (fm <= 0.0) return {SignProof::Disproved, fm};
    if (depth == 0) return {SignProof::Unknown, 0.0};
    SignResult left = prove_sign(e, a, mid, want_positive, depth - 1);
    if (left.proof == SignProof::Disproved) return left;
    SignResult right = prove_sign(e, mid, b, want_positive, depth - 1);
    if (right.proof == SignProof::Disproved) return right;
    if (left.proof == SignProof::Proved && right.proof == SignProof::Proved)
        return {SignProof::Proved, std::min(left.margin, right.margin)};
    return {SignProof::Unknown, 0.0};
}

// Denominators of every Div node in the tree.
void collect_denominators(const Expr::Ptr& e, std::vector<Expr::Ptr>& out) {
    if (!e) return;
    if (e->kind() == Expr::Kind::Div) out.push_back(e->rhs());
    collect_denominators(e->lhs(), out);
    collect_denominators(e->rhs(), out);
}

bool sampled_zero(const Expr& e) {
    if (e.is_zero_constant()) return true;
    for (double u : {1.13, -1.31, 2.71, 0.57}) {
        if (std::abs(e.eval(u)) > 1e-9 * (1.0 + std::abs(u))) return false;
    }
    return true;
}

}  // namespace

bool HypothesisReport::all_hold() const {
    for (const Check* c : {&a1, &a2, &a3, &a4, &a5, &a6})
        if (c->verdict != Verdict::Holds) return false;
    return true;
}

bool HypothesisReport::any_fails() const {
    for (const Check* c : {&a1, &a2, &a3, &a4, &a5, &a6})
        if (c->verdict == Verdict::Fails) return true;
    return false;
}

std::string HypothesisReport::to_json() const {
    auto check_json = [](const Check& c) {
        json j;
        j["verdict"] = to_string(c.verdict);
        j["margin"] = c.margin;
        j["error_bound"] = c.error_bound;
        if (!c.note.empty()) j["note"] = c.note;
        return j;
    };
    json j;
    j["A1"] = check_json(a1);
    j["A2"] = check_json(a2);
    j["A3"] = check_json(a3);
    j["A4"] = check_json(a4);
    j["A5"] = check_json(a5);
    j["A6"] = check_json(a6);
    j["u_star"] = u_star;
    j["a0_bar"] = a0_bar;
    j["c0"] = c0;
    j["c1"] = c1;
    j["A5_lhs"] = a5_lhs;
    j["A5_rhs"] = a5_rhs;
    j["A6_lhs"] = a6_lhs;
    j["A6_rhs"] = a6_rhs;
    j["all_hold"] = all_hold();
    return j.dump(2);
}

Model::Model(std::string name, Expr::Ptr f, Expr::Ptr g) : name_(std::move(name)) {
    f_[0] = std::move(f);
    for (int k = 1; k <= 4; ++k) f_[k] = f_[k - 1]->diff();
    g_[0] = std::move(g);
    for (int k = 1; k <= 3; ++k) g_[k] = g_[k - 1]->diff();
}

Model Model::builtin(const std::string& name) {
    const auto u = Expr::variable();
    const auto logistic = Expr::mul(u, Expr::sub(Expr::constant(1.0), u));  // u(1-u)
    if (name == "burgers-fisher") {
        return Model(name, Expr::mul(Expr::constant(0.5), Expr::pow(u, 2)), logistic);
    }
    if (name == "logistic-buckley-leverett") {
        const auto u2 = Expr::pow(u, 2);
        const auto omu2 = Expr::pow(Expr::sub(Expr::constant(1.0), u), 2);
        const auto flux = Expr::div(u2, Expr::add(u2, Expr::mul(Expr::constant(0.5), omu2)));
        return Model(name, flux, logistic);
    }
    if (name == "modified-burgers-fisher") {
        const auto flux = Expr::sub(Expr::mul(Expr::constant(0.25), Expr::pow(u, 4)),
                                    Expr::mul(Expr::constant(1.0 / 3.0), Expr::pow(u, 3)));
        const auto g = Expr::sub(u, Expr::pow(u, 4));
        return Model(name, flux, g);
    }
    throw NotFound("unknown built-in model '" + name + "'");
}

std::vector<std::string> Model::builtin_names() {
    return {"burgers-fisher", "logistic-buckley-leverett", "modified-burgers-fisher"};
}

Model Model::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("name") || !j.contains("f") || !j.contains("g"))
        throw ParseError("model JSON must be an object with keys name, f, g");
    return Model(j["name"].get<std::string>(), Expr::parse_json(j["f"].dump()),
                 Expr::parse_json(j["g"].dump()));
}

std::string Model::to_json() const {
    json j;
    j["name"] = name_;
    j["f"] = json::parse(f_[0]->to_json());
    j["g"] = json::parse(g_[0]->to_json());
    return j.dump(2);
}

double Model::f(double u, int order) const {
    if (order < 0 || order > 4) throw DomainError("f derivative order must be in [0,4]");
    return f_[order]->eval(u);
}

double Model::g(double u, int order) const {
    if (order < 0 || order > 3) throw DomainError("g derivative order must be in [0,3]");
    return g_[order]->eval(u);
}

namespace {

// G(u) = int_u^1 g(s) ds by adaptive quadrature.
double reaction_potential(const Model& m, double u) {
    if (u == 1.0) return 0.0;
    return integrate([&](double s) { return m.g(s); }, u, 1.0, 1e-13, 1e-16).value;
}

}  // namespace

double Model::u_star(double u_max) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        if (u_star_cache_) return *u_star_cache_;
    }
    auto G = [&](double u) { return reaction_potential(*this, u); };
    // G(0) > 0 under (A2); walk left until the sign flips.
    double hi = 0.0, g_hi = G(0.0);
    if (g_hi <= 0.0) throw NotFound("u_star: G(0) <= 0, (A2) violated");
    double lo = -0.25;
    while (G(lo) > 0.0) {
        hi = lo;
        lo *= 2.0;
        if (lo < -u_max)
            throw NotFound("u_star: no sign change of G on [-" + std::to_string(u_max) + ", 0)");
    }
    // bisection to bracket width 1e-13
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if (G(mid) > 0.0)
            hi = mid;
        else
            lo = mid;
    }
    double root = 0.5 * (lo + hi);
    // two Newton polish steps; G'(u) = -g(u)
    for (int i = 0; i < 2; ++i) {
        const double gu = g(root);
        if (gu == 0.0) break;
        root += G(root) / gu;
    }
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        u_star_cache_ = root;
    }
    return root;
}

double Model::gamma(double u) const {
    const double us = u_star();
    if (u < us - 1e-12 || u > 1.0 + 1e-12)
        throw DomainError("gamma(u) defined on [u_star, 1], got u = " + std::to_string(u));
    const double gi = reaction_potential(*this, u);
    return std::sqrt(std::max(2.0 * gi, 0.0));
}

namespace {

// Integral of h over [u_star, 1] with square-root substitutions at both
// endpoints (u = u_star + t^2 on the left half, u = 1 - t^2 on the right),
// removing the sqrt-type singularity of gamma' wherever it sits.
QuadResult weighted_integral(const std::function<double(double)>& h, double us,
                             double rel_tol) {
    const double mid = 0.5 * (us + 1.0);
    const double sl = std::sqrt(mid - us);
    const double sr = std::sqrt(1.0 - mid);
    QuadResult left = integrate([&](double t) { return 2.0 * t * h(us + t * t); }, 0.0, sl,
                                rel_tol, 1e-15);
    QuadResult right = integrate([&](double t) { return 2.0 * t * h(1.0 - t * t); }, 0.0, sr,
                                 rel_tol, 1e-15);
    return {left.value + right.value, left.error + right.error,
            left.intervals + right.intervals};
}

}  // namespace

double Model::melnikov_speed(double rel_tol) const {
    const double us = u_star();
    QuadResult num = weighted_integral([&](double u) { return f(u, 1) * gamma(u); }, us, rel_tol);
    QuadResult den = weighted_integral([&](double u) { return gamma(u); }, us, rel_tol);
    if (den.value == 0.0) throw QuadratureFailure("melnikov_speed: zero denominator");
    const double c1 = num.value / den.value;
    const double rel_err =
        num.error / std::abs(den.value) + std::abs(c1) * den.error / std::abs(den.value);
    if (rel_err > rel_tol * (1.0 + std::abs(c1)))
        throw QuadratureFailure("melnikov_speed: error estimate " + std::to_string(rel_err) +
                                " exceeds tolerance");
    return c1;
}

HypothesisReport Model::check_hypotheses(double u_max) const {
    HypothesisReport rep;

    // (A1): rational trees are C^infty wherever denominators are nonzero;
    // certify every denominator of f and g on the working interval.
    {
        std::vector<Expr::Ptr> dens;
        collect_denominators(f_[0], dens);
        collect_denominators(g_[0], dens);
        double margin = std::numeric_limits<double>::infinity();
        SignProof worst = SignProof::Proved;
        for (const auto& d : dens) {
            // prove |den| > 0: try positive first, then negative
            SignResult rp = prove_sign(*d, -u_max, 2.0, true);
            SignResult rn = prove_sign(*d, -u_max, 2.0, false);
            if (rp.proof == SignProof::Proved)
                margin = std::min(margin, rp.margin);
            else if (rn.proof == SignProof::Proved)
                margin = std::min(margin, rn.margin);
            else
                worst = SignProof::Unknown;
        }
        if (dens.empty()) margin = 1.0;
        if (worst == SignProof::Proved)
            rep.a1 = make_check(std::isfinite(margin) ? margin : 1.0, 0.0,
                                "rational tree, denominators nonvanishing on [-U_max, 2]");
        else
            rep.a1 = Check{Verdict::Undetermined, 0.0, 0.0,
                           "could not certify a denominator as nonvanishing"};
    }

    // (A2): Fisher-KPP shape of g.
    {
        const double h = 1e-3;
        double margin = std::numeric_limits<double>::infinity();
        bool fails = false, unknown = false;
        std::string note;

        const double g0 = g(0.0), g1 = g(1.0);
        if (std::abs(g0) > 1e-12 || std::abs(g1) > 1e-12) {
            fails = true;
            note = "g(0) or g(1) != 0";
        }
        const double gp0 = g(0.0, 1), gp1 = g(1.0, 1);
        if (gp0 <= 0.0 || gp1 >= 0.0) fails = true;
        margin = std::min({margin, gp0, -gp1});

        struct Task {
            const Expr* e;
            double a, b;
            bool positive;
        };
        // interior sign conditions, plus derivative-sign conditions that pin
        // down the sign of g next to its roots at 0 and 1 (g(u) = g'(xi) u and
        // g(u) = g'(xi)(u-1) by the mean value theorem)
        const Task tasks[] = {
            {g_[0].get(), h, 1.0 - h, true},      // g > 0 on (0,1) interior
            {g_[1].get(), -h, h, true},           // g' > 0 near 0
            {g_[1].get(), 1.0 - h, 1.0 + h / 2, false},  // g' < 0 near 1
            {g_[0].get(), -u_max, -h, false},     // g < 0 on (-inf,0), sampled part
        };
        for (const auto& t : tasks) {
            SignResult r = prove_sign(*t.e, t.a, t.b, t.positive);
            if (r.proof == SignProof::Disproved) fails = true;
            if (r.proof == SignProof::Unknown) unknown = true;
            if (r.proof == SignProof::Proved) margin = std::min(margin, r.margin);
        }

        // behavior beyond -U_max
        if (g_[0]->is_polynomial()) {
            Expr::Ptr d = g_[0];
            int degree = 0;
            Expr::Ptr lead = d;
            for (int k = 0; k <= 40 && !sampled_zero(*d); ++k) {
                lead = d;
                degree = k;
                d = d->diff();
            }
            double lead_coeff = lead->eval(0.0);
            // value of the k-th derivative at any point is k! * leading coeff
            const double sign_at_minus_inf =
                (degree % 2 == 0 ? 1.0 : -1.0) * (lead_coeff > 0 ? 1.0 : -1.0);
            if (sign_at_minus_inf >= 0.0) fails = true;
        } else {
            unknown = true;
            note += (note.empty() ? "" : "; ");
            note += "g < 0 undetermined beyond -U_max (non-polynomial g)";
        }

        if (fails)
            rep.a2 = Check{Verdict::Fails, -1.0, 0.0, note};
        else if (unknown)
            rep.a2 = Check{Verdict::Undetermined, 0.0, 0.0, note};
        else
            rep.a2 = make_check(margin, 1e-14 * (1.0 + std::abs(margin)), note);
    }

    // (A3): existence of u_star
    if (rep.a2.verdict != Verdict::Fails) {
        try {
            rep.u_star = u_star(u_max);
            rep.a3 = make_check(-rep.u_star, 1e-13);
        } catch (const NotFound& e) {
            rep.a3 = Check{Verdict::Fails, 0.0, 0.0, e.what()};
        }
    } else {
        rep.a3 = Check{Verdict::Undetermined, 0.0, 0.0, "skipped: (A2) fails"};
    }

    rep.c0 = f(0.0, 1);

    // (A4): genericity a0_bar != 0
    {
        const double gp0 = g(0.0, 1);
        if (gp0 > 0.0) {
            rep.a0_bar = f(0.0, 3) - f(0.0, 2) * g(0.0, 2) / std::sqrt(gp0);
            const double scale = std::abs(f(0.0, 3)) + std::abs(f(0.0, 2) * g(0.0, 2)) + 1.0;
            rep.a4 = make_check(std::abs(rep.a0_bar), 1e-14 * scale,
                                rep.a0_bar > 0 ? "sign +" : "sign -");
        } else {
            rep.a4 = Check{Verdict::Undetermined, 0.0, 0.0, "g'(0) <= 0"};
        }
    }

    // (A5)/(A6): gamma-weighted integral conditions
    if (rep.a3.verdict == Verdict::Holds) {
        const double us = rep.u_star;
        auto gamma_prime = [&](double u) { return -g(u) / gamma(u); };
        auto arc = [&](double u) {
            const double gp = gamma_prime(u);
            return std::sqrt(1.0 + gp * gp);
        };
        const double tol = 1e-10;
        QuadResult i_gamma = weighted_integral([&](double u) { return gamma(u); }, us, tol);
        QuadResult i_fpg =
            weighted_integral([&](double u) { return f(u, 1) * gamma(u); }, us, tol);
        QuadResult i_arc = weighted_integral(arc, us, tol);
        QuadResult i_fparc =
            weighted_integral([&](double u) { return f(u, 1) * arc(u); }, us, tol);

        rep.a5_lhs = i_gamma.value * i_fparc.value;
        rep.a5_rhs = i_arc.value * i_fpg.value;
        const double e5 = std::abs(i_gamma.value) * i_fparc.error +
                          i_gamma.error * std::abs(i_fparc.value) +
                          std::abs(i_arc.value) * i_fpg.error +
                          i_arc.error * std::abs(i_fpg.value);
        rep.a5 = make_check(std::abs(rep.a5_lhs - rep.a5_rhs), e5);

        rep.a6_lhs = f(1.0, 1) * i_gamma.value;
        rep.a6_rhs = i_fpg.value;
        const double e6 = std::abs(f(1.0, 1)) * i_gamma.error + i_fpg.error;
        rep.a6 = make_check(std::abs(rep.a6_lhs - rep.a6_rhs), e6);

        rep.c1 = i_fpg.value / i_gamma.value;
    } else {
        rep.a5 = Check{Verdict::Undetermined, 0.0, 0.0, "skipped: u_star unavailable"};
        rep.a6 = rep.a5;
    }

    return rep;
}

}  // namespace vbl

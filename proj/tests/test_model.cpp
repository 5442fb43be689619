#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vbl/errors.hpp"
#include "vbl/model.hpp"
#include "vbl/quadrature.hpp"

using namespace vbl;

// ---------------------------------------------------------------- expressions

TEST_CASE("expression evaluation and differentiation") {
    // h(u) = u^3 / (1 + u^2)
    auto u = Expr::variable();
    auto h = Expr::div(Expr::pow(u, 3), Expr::add(Expr::constant(1.0), Expr::pow(u, 2)));
    CHECK(h->eval(2.0) == doctest::Approx(8.0 / 5.0).epsilon(1e-15));

    // h'(u) = (3u^2 (1+u^2) - u^3 * 2u) / (1+u^2)^2 = (u^4 + 3u^2)/(1+u^2)^2
    auto hp = h->diff();
    auto oracle = [](double x) {
        return (std::pow(x, 4) + 3 * x * x) / std::pow(1 + x * x, 2);
    };
    for (double x : {-1.7, -0.3, 0.0, 0.5, 2.25})
        CHECK(hp->eval(x) == doctest::Approx(oracle(x)).epsilon(1e-14));
}

TEST_CASE("prefix-notation JSON round trip") {
    const std::string src =
        R"(["div",["pow","u",2],["add",["pow","u",2],["mul",0.5,["pow",["add",1,["neg","u"]],2]]]])";
    auto e = Expr::parse_json(src);
    // Buckley-Leverett flux: f(1) = 1, f(0) = 0, f(1/2) = (1/4)/(1/4+1/8) = 2/3
    CHECK(e->eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e->eval(0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(e->eval(0.5) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

    auto again = Expr::parse_json(e->to_json());
    for (double x : {-0.4, 0.1, 0.73}) CHECK(again->eval(x) == doctest::Approx(e->eval(x)));
}

TEST_CASE("malformed expression JSON is rejected") {
    CHECK_THROWS_AS(Expr::parse_json("[\"bogus\", 1, 2]"), ParseError);
    CHECK_THROWS_AS(Expr::parse_json("[\"add\", 1"), ParseError);
    CHECK_THROWS_AS(Expr::parse_json("\"v\""), ParseError);
}

TEST_CASE("interval arithmetic certifies nonvanishing denominators") {
    auto u = Expr::variable();
    // 1 + u^2 >= 1 on any interval
    auto d = Expr::add(Expr::constant(1.0), Expr::pow(u, 2));
    Interval r = d->eval(Interval{-3.0, 2.0});
    CHECK(!r.contains_zero());
    CHECK(r.lo >= 1.0 - 1e-15);
}

// ---------------------------------------------------------------- quadrature

TEST_CASE("adaptive quadrature on smooth and singular integrands") {
    // int_0^1 x^5 dx = 1/6
    auto q1 = integrate([](double x) { return std::pow(x, 5); }, 0.0, 1.0);
    CHECK(q1.value == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(std::abs(q1.value - 1.0 / 6.0) <= std::max(q1.error, 1e-14));

    // int_0^pi sin x dx = 2
    auto q2 = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
    CHECK(q2.value == doctest::Approx(2.0).epsilon(1e-13));

    // endpoint square-root singularity: raw adaptive bisection gets within
    // ~1e-5 of int_{1e-12}^1 dx/sqrt(x) = 2 - 2e-6, while the x = t^2
    // substitution (the strategy used for the gamma-weighted integrals)
    // renders the integrand polynomial and is exact to rounding
    auto q3 = integrate([](double x) { return 1.0 / std::sqrt(x); }, 1e-12, 1.0, 1e-9);
    CHECK(q3.value == doctest::Approx(2.0).epsilon(1e-4));
    auto q4 = integrate([](double t) { return 2.0; }, 0.0, 1.0);  // 1/sqrt(t^2) * 2t dt
    CHECK(q4.value == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre oracle agrees with adaptive result") {
    auto f = [](double x) { return std::exp(-x * x); };
    const double a = -1.3, b = 2.0;
    const double gl = gauss_legendre(f, a, b, 64);
    const double ad = integrate(f, a, b).value;
    CHECK(gl == doctest::Approx(ad).epsilon(1e-13));
}

// ---------------------------------------------------------------- models

TEST_CASE("built-in model point values") {
    Model bf = Model::builtin("burgers-fisher");
    CHECK(bf.g(0.0, 1) == doctest::Approx(1.0).epsilon(1e-15));   // g' (0) = 1
    CHECK(bf.f(0.3, 2) == doctest::Approx(1.0).epsilon(1e-15));   // f'' constant
    Model bl = Model::builtin("logistic-buckley-leverett");
    CHECK(bl.f(1.0) == doctest::Approx(1.0).epsilon(1e-14));      // flux value at 1
    CHECK_THROWS_AS(Model::builtin("no-such-model"), NotFound);
}

TEST_CASE("symbolic derivatives match centered differences at order >= 1.9") {
    for (const auto& name : Model::builtin_names()) {
        Model m = Model::builtin(name);
        for (double u0 : {-0.35, 0.2, 0.6, 0.9}) {
            for (int k = 0; k < 4; ++k) {
                auto df = [&](double h) {
                    return std::abs((m.f(u0 + h, k) - m.f(u0 - h, k)) / (2 * h) -
                                    m.f(u0, k + 1));
                };
                const double e1 = df(1e-3), e2 = df(5e-4), e3 = df(2.5e-4);
                // slope of the error in log-log across two halvings, checked
                // only while truncation error still dominates roundoff
                if (e3 > 1e-9) {
                    CHECK(std::log2(e1 / e2) >= 1.9);
                    CHECK(std::log2(e2 / e3) >= 1.85);
                }
            }
            for (int k = 0; k < 3; ++k) {
                const double h = 1e-5;
                const double fd = (m.g(u0 + h, k) - m.g(u0 - h, k)) / (2 * h);
                CHECK(fd == doctest::Approx(m.g(u0, k + 1)).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("u_star for the quadratic-flux logistic model is -1/2") {
    // G(u) = int_u^1 s(1-s) ds has the root 2u^3 - 3u^2 + 1 = 0 at u = -1/2.
    Model bf = Model::builtin("burgers-fisher");
    CHECK(bf.u_star() == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("u_star for the quartic reaction model solves its closed form") {
    // g = u - u^4: antiderivative condition 3/10 - u^2/2 + u^5/5 = 0 on (-1, 0);
    // oracle value from bisection on the closed form.
    auto F = [](double x) { return 0.3 - x * x / 2 + std::pow(x, 5) / 5; };
    double lo = -1.0, hi = -0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) > 0 ? hi : lo) = mid;
    }
    Model mbf = Model::builtin("modified-burgers-fisher");
    CHECK(mbf.u_star() == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
}

TEST_CASE("gamma against closed forms and property gamma^2/2 = int g") {
    Model bf = Model::builtin("burgers-fisher");
    CHECK(bf.gamma(0.0) == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
    CHECK(bf.gamma(bf.u_star()) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(bf.gamma(1.0) == doctest::Approx(0.0).epsilon(1e-12));

    std::mt19937 rng(7);
    for (const auto& name : Model::builtin_names()) {
        Model m = Model::builtin(name);
        const double us = m.u_star();
        std::uniform_real_distribution<double> uni(us + 1e-6, 1.0 - 1e-6);
        for (int i = 0; i < 100; ++i) {
            const double u = uni(rng);
            const double lhs = 0.5 * m.gamma(u) * m.gamma(u);
            const double rhs = integrate([&](double s) { return m.g(s); }, u, 1.0).value;
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
    CHECK_THROWS_AS(bf.gamma(-0.8), DomainError);
}

TEST_CASE("balance speed: exactness, invariance, independent oracle") {
    Model bl = Model::builtin("logistic-buckley-leverett");
    CHECK(bl.melnikov_speed() == doctest::Approx(0.589097).epsilon(2e-6));

    // independently frozen high-precision value (adaptive + Gauss-Legendre agree)
    CHECK(bl.melnikov_speed() == doctest::Approx(0.5890967898909149).epsilon(1e-9));

    // linear flux => speed equals the constant f' exactly
    auto u = Expr::variable();
    Model lin("linear-flux", Expr::mul(Expr::constant(3.5), u),
              Expr::mul(u, Expr::add(Expr::constant(1.0), Expr::neg(u))));
    CHECK(lin.melnikov_speed() == doctest::Approx(3.5).epsilon(1e-12));

    // adding a constant to f leaves the speed unchanged to 1e-12
    Model bf = Model::builtin("burgers-fisher");
    Model bf_shift("shifted", Expr::add(bf.f_expr(), Expr::constant(17.0)), bf.g_expr());
    CHECK(bf.melnikov_speed() == doctest::Approx(bf_shift.melnikov_speed()).epsilon(1e-12));

    // Gauss-Legendre double-resolution oracle for the quadratic-flux model.
    // The u = 1 - t^2 substitution removes the u = 1 endpoint singularity;
    // the remaining sqrt behaviour of gamma at u = u_* limits the fixed-order
    // rule, so the comparison tolerance is 1e-5 relative.
    const double us = bf.u_star();
    auto num = gauss_legendre([&](double t) {
        const double uu = 1.0 - t * t;
        return bf.f(uu, 1) * bf.gamma(uu) * 2.0 * t;
    }, 0.0, std::sqrt(1.0 - us), 64);
    auto den = gauss_legendre([&](double t) {
        const double uu = 1.0 - t * t;
        return bf.gamma(uu) * 2.0 * t;
    }, 0.0, std::sqrt(1.0 - us), 64);
    CHECK(bf.melnikov_speed() == doctest::Approx(num / den).epsilon(1e-5));
}

TEST_CASE("hypothesis checker on the built-in models") {
    for (const auto& name : Model::builtin_names()) {
        Model m = Model::builtin(name);
        auto rep = m.check_hypotheses();
        CHECK(rep.all_hold());
        CHECK(rep.u_star < 0.0);
    }
    Model bf = Model::builtin("burgers-fisher");
    auto rep = bf.check_hypotheses();
    CHECK(rep.a0_bar == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.c0 == 0.0);
    CHECK(rep.u_star == doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("model JSON ingestion") {
    const std::string text = R"({"name":"custom",
        "f":["mul",0.5,["pow","u",2]],
        "g":["mul","u",["add",1,["neg","u"]]]})";
    Model m = Model::from_json(text);
    CHECK(m.f(2.0) == doctest::Approx(2.0));
    CHECK(m.g(0.5) == doctest::Approx(0.25));
    CHECK_THROWS_AS(Model::from_json("{not json"), ParseError);
}

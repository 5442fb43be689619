#include "vbl/expr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace vbl {

Interval operator+(Interval a, Interval b) { return {a.lo + b.lo, a.hi + b.hi}; }

Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

Interval operator*(Interval a, Interval b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

Interval operator/(Interval a, Interval b) {
    if (b.contains_zero())
        throw DomainError("interval division by an interval containing zero");
    return a * Interval{1.0 / b.hi, 1.0 / b.lo};
}

Interval pow(Interval a, int n) {
    if (n < 0) throw DomainError("negative exponent in interval pow");
    if (n == 0) return {1.0, 1.0};
    if (n % 2 == 1) return {std::pow(a.lo, n), std::pow(a.hi, n)};  // odd: monotone
    // even powers are nonnegative
    const double m = std::max(std::abs(a.lo), std::abs(a.hi));
    double lo = 0.0;
    if (!a.contains_zero()) lo = std::pow(std::min(std::abs(a.lo), std::abs(a.hi)), n);
    return {lo, std::pow(m, n)};
}

Expr::Ptr Expr::constant(double v) {
    return Ptr(new Expr(Kind::Constant, v, 0, nullptr, nullptr));
}

Expr::Ptr Expr::variable() {
    return Ptr(new Expr(Kind::Variable, 0.0, 0, nullptr, nullptr));
}

Expr::Ptr Expr::add(Ptr a, Ptr b) {
    if (a->is_zero_constant()) return b;
    if (b->is_zero_constant()) return a;
    if (a->kind_ == Kind::Constant && b->kind_ == Kind::Constant)
        return constant(a->value_ + b->value_);
    return Ptr(new Expr(Kind::Add, 0.0, 0, std::move(a), std::move(b)));
}

Expr::Ptr Expr::mul(Ptr a, Ptr b) {
    if (a->is_zero_constant() || b->is_zero_constant()) return constant(0.0);
    if (a->kind_ == Kind::Constant && a->value_ == 1.0) return b;
    if (b->kind_ == Kind::Constant && b->value_ == 1.0) return a;
    if (a->kind_ == Kind::Constant && b->kind_ == Kind::Constant)
        return constant(a->value_ * b->value_);
    return Ptr(new Expr(Kind::Mul, 0.0, 0, std::move(a), std::move(b)));
}

Expr::Ptr Expr::neg(Ptr a) {
    if (a->kind_ == Kind::Constant) return constant(-a->value_);
    if (a->kind_ == Kind::Neg) return a->a_;
    return Ptr(new Expr(Kind::Neg, 0.0, 0, std::move(a), nullptr));
}

Expr::Ptr Expr::pow(Ptr a, int n) {
    if (n < 0) throw ParseError("pow exponent must be a nonnegative integer");
    if (n == 0) return constant(1.0);
    if (n == 1) return a;
    if (a->kind_ == Kind::Constant) return constant(std::pow(a->value_, n));
    return Ptr(new Expr(Kind::Pow, 0.0, n, std::move(a), nullptr));
}

Expr::Ptr Expr::div(Ptr a, Ptr b) {
    if (a->is_zero_constant()) return constant(0.0);
    if (b->kind_ == Kind::Constant && b->value_ == 1.0) return a;
    return Ptr(new Expr(Kind::Div, 0.0, 0, std::move(a), std::move(b)));
}

double Expr::eval(double u) const {
    switch (kind_) {
        case Kind::Constant: return value_;
        case Kind::Variable: return u;
        case Kind::Add: return a_->eval(u) + b_->eval(u);
        case Kind::Mul: return a_->eval(u) * b_->eval(u);
        case Kind::Neg: return -a_->eval(u);
        case Kind::Pow: return std::pow(a_->eval(u), exponent_);
        case Kind::Div: {
            const double den = b_->eval(u);
            if (den == 0.0)
                throw DomainError("denominator vanishes at u = " + std::to_string(u));
            return a_->eval(u) / den;
        }
    }
    return 0.0;
}

Interval Expr::eval(Interval u) const {
    switch (kind_) {
        case Kind::Constant: return {value_, value_};
        case Kind::Variable: return u;
        case Kind::Add: return a_->eval(u) + b_->eval(u);
        case Kind::Mul: return a_->eval(u) * b_->eval(u);
        case Kind::Neg: return -a_->eval(u);
        case Kind::Pow: return vbl::pow(a_->eval(u), exponent_);
        case Kind::Div: return a_->eval(u) / b_->eval(u);
    }
    return {};
}

Expr::Ptr Expr::diff() const {
    switch (kind_) {
        case Kind::Constant: return constant(0.0);
        case Kind::Variable: return constant(1.0);
        case Kind::Add: return add(a_->diff(), b_->diff());
        case Kind::Mul: return add(mul(a_->diff(), b_), mul(a_, b_->diff()));
        case Kind::Neg: return neg(a_->diff());
        case Kind::Pow:
            return mul(constant(static_cast<double>(exponent_)),
                       mul(pow(a_, exponent_ - 1), a_->diff()));
        case Kind::Div:
            // (a/b)' = a'/b - a b' / b^2
            return sub(div(a_->diff(), b_), div(mul(a_, b_->diff()), pow(b_, 2)));
    }
    return constant(0.0);
}

bool Expr::is_polynomial() const {
    switch (kind_) {
        case Kind::Constant:
        case Kind::Variable: return true;
        case Kind::Add:
        case Kind::Mul: return a_->is_polynomial() && b_->is_polynomial();
        case Kind::Neg:
        case Kind::Pow: return a_->is_polynomial();
        case Kind::Div: return false;
    }
    return false;
}

namespace {

using nlohmann::json;

json expr_to_json(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Constant: return json(e.value());
        case Expr::Kind::Variable: return json("u");
        case Expr::Kind::Add: return json::array({"add", expr_to_json(*e.lhs()), expr_to_json(*e.rhs())});
        case Expr::Kind::Mul: return json::array({"mul", expr_to_json(*e.lhs()), expr_to_json(*e.rhs())});
        case Expr::Kind::Neg: return json::array({"neg", expr_to_json(*e.lhs())});
        case Expr::Kind::Pow: return json::array({"pow", expr_to_json(*e.lhs()), e.exponent()});
        case Expr::Kind::Div: return json::array({"div", expr_to_json(*e.lhs()), expr_to_json(*e.rhs())});
    }
    return json();
}

Expr::Ptr expr_from_json(const json& j) {
    if (j.is_number()) return Expr::constant(j.get<double>());
    if (j.is_string()) {
        if (j.get<std::string>() == "u") return Expr::variable();
        throw ParseError("unknown symbol '" + j.get<std::string>() + "' (only \"u\" is allowed)");
    }
    if (!j.is_array() || j.empty() || !j[0].is_string())
        throw ParseError("expression node must be a prefix array, number, or \"u\"");
    const std::string op = j[0].get<std::string>();
    auto need = [&](size_t n) {
        if (j.size() != n + 1)
            throw ParseError("operator '" + op + "' expects " + std::to_string(n) + " operand(s)");
    };
    if (op == "add") { need(2); return Expr::add(expr_from_json(j[1]), expr_from_json(j[2])); }
    if (op == "sub") { need(2); return Expr::sub(expr_from_json(j[1]), expr_from_json(j[2])); }
    if (op == "mul") { need(2); return Expr::mul(expr_from_json(j[1]), expr_from_json(j[2])); }
    if (op == "div") { need(2); return Expr::div(expr_from_json(j[1]), expr_from_json(j[2])); }
    if (op == "neg") { need(1); return Expr::neg(expr_from_json(j[1])); }
    if (op == "pow") {
        need(2);
        if (!j[2].is_number_integer())
            throw ParseError("pow exponent must be an integer literal");
        return Expr::pow(expr_from_json(j[1]), j[2].get<int>());
    }
    throw ParseError("unknown operator '" + op + "'");
}

}  // namespace

std::string Expr::to_json() const { return expr_to_json(*this).dump(); }

Expr::Ptr Expr::parse_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("JSON parse error: ") + e.what());
    }
    return expr_from_json(j);
}

}  // namespace vbl

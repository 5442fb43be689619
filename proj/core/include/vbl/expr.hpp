#ifndef VBL_EXPR_HPP
#define VBL_EXPR_HPP

#include <memory>
#include <string>

#include "vbl/errors.hpp"

namespace vbl {

/// Closed real interval used for sign certification of coefficients.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains_zero() const { return lo <= 0.0 && hi >= 0.0; }
    double width() const { return hi - lo; }
};

Interval operator+(Interval a, Interval b);
Interval operator-(Interval a);
Interval operator*(Interval a, Interval b);
Interval operator/(Interval a, Interval b);  // throws DomainError if 0 in b
Interval pow(Interval a, int n);             // n >= 0

/// Expression tree in one real variable over the node set
/// {constant, variable, add, mul, neg, pow(int), div}. The set is closed
/// under differentiation, which is what makes exact higher derivatives of
/// the model nonlinearities possible.
class Expr {
  public:
    enum class Kind { Constant, Variable, Add, Mul, Neg, Pow, Div };

    using Ptr = std::shared_ptr<const Expr>;

    static Ptr constant(double v);
    static Ptr variable();
    static Ptr add(Ptr a, Ptr b);
    static Ptr sub(Ptr a, Ptr b) { return add(std::move(a), neg(std::move(b))); }
    static Ptr mul(Ptr a, Ptr b);
    static Ptr neg(Ptr a);
    static Ptr pow(Ptr a, int n);  // n >= 0
    static Ptr div(Ptr a, Ptr b);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    int exponent() const { return exponent_; }
    const Ptr& lhs() const { return a_; }
    const Ptr& rhs() const { return b_; }

    double eval(double u) const;
    Interval eval(Interval u) const;

    /// Exact derivative as a new tree (with light constant folding).
    Ptr diff() const;

    /// True when the tree contains no Div node (i.e. it is polynomial).
    bool is_polynomial() const;

    /// Structural test for the literal zero constant.
    bool is_zero_constant() const { return kind_ == Kind::Constant && value_ == 0.0; }

    /// Prefix-notation serialization, e.g. ["mul",0.5,["pow","u",2]].
    std::string to_json() const;

    /// Parse the prefix-notation JSON array/number/"u" format.
    static Ptr parse_json(const std::string& json_text);

  private:
    Expr(Kind k, double v, int e, Ptr a, Ptr b)
        : kind_(k), value_(v), exponent_(e), a_(std::move(a)), b_(std::move(b)) {}

    Kind kind_;
    double value_;
    int exponent_;
    Ptr a_, b_;
};

}  // namespace vbl

#endif

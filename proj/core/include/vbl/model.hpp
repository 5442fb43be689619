#ifndef VBL_MODEL_HPP
#define VBL_MODEL_HPP

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vbl/expr.hpp"

namespace vbl {

enum class Verdict { Holds, Fails, Undetermined };

std::string to_string(Verdict v);

/// Outcome of one structural hypothesis check, with the numerical margin
/// (distance of the tested quantity from its threshold) and the error bound
/// of the computation that produced it. Margins below 10x the error bound
/// are reported Undetermined, never Holds.
struct Check {
    Verdict verdict = Verdict::Undetermined;
    double margin = 0.0;
    double error_bound = 0.0;
    std::string note;
};

struct HypothesisReport {
    Check a1, a2, a3, a4, a5, a6;
    double u_star = 0.0;        // A3 witness, < 0 when reported
    double a0_bar = 0.0;        // genericity quantity
    double c0 = 0.0;            // Hopf critical speed f'(0)
    double c1 = 0.0;            // Melnikov speed
    double a5_lhs = 0.0, a5_rhs = 0.0;
    double a6_lhs = 0.0, a6_rhs = 0.0;

    bool all_hold() const;
    bool any_fails() const;
    std::string to_json() const;
};

/// A viscous balance law: flux f and reaction g as exact expression trees,
/// with the derivative cache f', .., f'''' and g', .., g''' required by the
/// regularity hypotheses.
class Model {
  public:
    Model(std::string name, Expr::Ptr f, Expr::Ptr g);

    static Model builtin(const std::string& name);  // throws NotFound
    static Model from_json(const std::string& json_text);
    static std::vector<std::string> builtin_names();

    const std::string& name() const { return name_; }

    /// f^(k), k <= 4
    double f(double u, int order = 0) const;
    /// g^(k), k <= 3
    double g(double u, int order = 0) const;

    const Expr::Ptr& f_expr(int order = 0) const { return f_[order]; }
    const Expr::Ptr& g_expr(int order = 0) const { return g_[order]; }

    /// A3 witness: the root u_* < 0 of G(u) = int_u^1 g(s) ds, bracketed and
    /// bisected to width 1e-13, then Newton-polished. Cached after the first
    /// call (thread-safe).
    double u_star(double u_max = 50.0) const;

    /// gamma(u) = sqrt(2 int_u^1 g(s) ds), defined on [u_star, 1].
    double gamma(double u) const;

    /// Melnikov speed c1 = int f' gamma / int gamma over [u_star, 1], with
    /// quadrature error <= rel_tol relative.
    double melnikov_speed(double rel_tol = 1e-8) const;

    HypothesisReport check_hypotheses(double u_max = 50.0) const;

    std::string to_json() const;

  private:
    std::string name_;
    std::array<Expr::Ptr, 5> f_;  // f, f', f'', f''', f''''
    std::array<Expr::Ptr, 4> g_;  // g, g', g'', g'''
    mutable std::mutex cache_mutex_;
    mutable std::optional<double> u_star_cache_;
};

}  // namespace vbl

#endif

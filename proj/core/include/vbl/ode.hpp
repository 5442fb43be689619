#ifndef VBL_ODE_HPP
#define VBL_ODE_HPP

#include <array>
#include <functional>
#include <vector>

namespace vbl {

using State2 = std::array<double, 2>;
using Rhs2 = std::function<State2(double, const State2&)>;

/// One accepted Dormand-Prince 5(4) step with the coefficients of the
/// quartic dense-output interpolant.
struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State2, 5> rcont{};  // Hairer's CONTD5 coefficients

    State2 eval(double t) const;
    State2 eval_derivative(double t, const Rhs2& rhs) const;
};

/// Adaptive DOPRI5 trajectory with per-step dense output.
struct Trajectory {
    std::vector<DenseStep> steps;
    double t_begin = 0.0;
    double t_end = 0.0;
    State2 y_end{};

    State2 eval(double t) const;
};

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_norm = 1e6;      // BlowUp guard
    bool stop_at_max_norm = false;  // truncate the trajectory instead of throwing
    double initial_step = 1e-4;
    long max_steps = 2000000;
};

/// Integrate y' = rhs(t, y) over [t0, t1] (t1 < t0 integrates backwards).
Trajectory integrate_ode(const Rhs2& rhs, State2 y0, double t0, double t1,
                         const OdeOptions& opts = {});

/// First root of event(y(t)) after t_start (strictly), with the given
/// crossing direction (+1: negative-to-positive, -1: the reverse, 0: any).
/// Returns true and fills (t_event, y_event) when found.
bool locate_event(const Trajectory& traj, const std::function<double(const State2&)>& event,
                  double t_start, int direction, double& t_event, State2& y_event);

}  // namespace vbl

#endif

#include "vbl/ode.hpp"

#include <algorithm>
#include <cmath>

#include "vbl/errors.hpp"

namespace vbl {

namespace {

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, DOPRI5)
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

State2 axpy(const State2& y, double a, const State2& k) {
    return {y[0] + a * k[0], y[1] + a * k[1]};
}

double norm(const State2& y) { return std::sqrt(y[0] * y[0] + y[1] * y[1]); }

}  // namespace

State2 DenseStep::eval(double t) const {
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    State2 y;
    for (int i = 0; i < 2; ++i) {
        y[i] = rcont[0][i] +
               th * (rcont[1][i] + th1 * (rcont[2][i] + th * (rcont[3][i] + th1 * rcont[4][i])));
    }
    return y;
}

State2 DenseStep::eval_derivative(double t, const Rhs2& rhs) const {
    return rhs(t, eval(t));
}

State2 Trajectory::eval(double t) const {
    // binary search over accepted steps
    const bool fwd = t_end >= t_begin;
    auto it = std::lower_bound(steps.begin(), steps.end(), t,
                               [fwd](const DenseStep& s, double tv) {
                                   return fwd ? (s.t0 + s.h < tv) : (s.t0 + s.h > tv);
                               });
    if (it == steps.end()) it = std::prev(steps.end());
    return it->eval(t);
}

Trajectory integrate_ode(const Rhs2& rhs, State2 y0, double t0, double t1,
                         const OdeOptions& opts) {
    Trajectory traj;
    traj.t_begin = t0;
    if (t1 == t0) {
        traj.t_end = t0;
        traj.y_end = y0;
        return traj;
    }
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double h = dir * std::min(opts.initial_step, std::abs(t1 - t0));
    State2 y = y0;
    State2 k1 = rhs(t, y);
    long nsteps = 0;

    while (dir * (t1 - t) > 0.0) {
        if (++nsteps > opts.max_steps)
            throw StiffnessFailure("integrate_ode: step budget exhausted");
        if (dir * (t + h - t1) > 0.0) h = t1 - t;
        if (std::abs(h) < 1e-14 * (1.0 + std::abs(t)))
            throw StiffnessFailure("integrate_ode: step size underflow at t = " +
                                   std::to_string(t));

        const State2 k2 = rhs(t + h * 0.2, axpy(y, h * a21, k1));
        State2 tmp = axpy(axpy(y, h * a31, k1), h * a32, k2);
        const State2 k3 = rhs(t + h * 0.3, tmp);
        tmp = axpy(axpy(axpy(y, h * a41, k1), h * a42, k2), h * a43, k3);
        const State2 k4 = rhs(t + h * 0.8, tmp);
        tmp = axpy(axpy(axpy(axpy(y, h * a51, k1), h * a52, k2), h * a53, k3), h * a54, k4);
        const State2 k5 = rhs(t + h * 8.0 / 9.0, tmp);
        tmp = axpy(axpy(axpy(axpy(axpy(y, h * a61, k1), h * a62, k2), h * a63, k3), h * a64, k4),
                   h * a65, k5);
        const State2 k6 = rhs(t + h, tmp);
        State2 y1;
        for (int i = 0; i < 2; ++i)
            y1[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        const State2 k7 = rhs(t + h, y1);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                   e6 * k6[i] + e7 * k7[i]);
            const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / 2.0);

        if (err <= 1.0) {
            DenseStep step;
            step.t0 = t;
            step.h = h;
            for (int i = 0; i < 2; ++i) {
                const double ydiff = y1[i] - y[i];
                const double bspl = h * k1[i] - ydiff;
                step.rcont[0][i] = y[i];
                step.rcont[1][i] = ydiff;
                step.rcont[2][i] = bspl;
                step.rcont[3][i] = ydiff - h * k7[i] - bspl;
                step.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                        d6 * k6[i] + d7 * k7[i]);
            }
            traj.steps.push_back(step);
            t += h;
            y = y1;
            k1 = k7;  // FSAL
            if (norm(y) > opts.max_norm) {
                if (opts.stop_at_max_norm) {
                    traj.t_end = t;
                    traj.y_end = y;
                    return traj;
                }
                throw BlowUp("integrate_ode: |y| exceeded " + std::to_string(opts.max_norm) +
                             " at t = " + std::to_string(t));
            }
        }
        const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-16), -0.2), 0.2, 5.0);
        h *= fac;
    }
    traj.t_end = t;
    traj.y_end = y;
    return traj;
}

bool locate_event(const Trajectory& traj, const std::function<double(const State2&)>& event,
                  double t_start, int direction, double& t_event, State2& y_event) {
    const double dir = traj.t_end >= traj.t_begin ? 1.0 : -1.0;
    constexpr int kSub = 8;  // subsample each step; guards against double crossings
    for (const DenseStep& s : traj.steps) {
        const double ta = s.t0, tb = s.t0 + s.h;
        if (dir * (tb - t_start) <= 0.0) continue;
        double prev_t = dir * (ta - t_start) > 0.0 ? ta : t_start;
        double prev_g = event(s.eval(prev_t));
        for (int j = 1; j <= kSub; ++j) {
            const double tj = prev_t + (tb - prev_t) * static_cast<double>(j) / kSub;
            const double gj = event(s.eval(tj));
            const bool crossed = (prev_g < 0.0 && gj >= 0.0) || (prev_g > 0.0 && gj <= 0.0);
            if (crossed) {
                const bool rising = prev_g < 0.0;
                if (direction == 0 || (direction > 0) == rising) {
                    // bisection inside [prev_t, tj]
                    double lo = prev_t, hi = tj, glo = prev_g;
                    for (int it = 0; it < 100; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        const double gm = event(s.eval(mid));
                        if ((glo < 0.0) == (gm < 0.0)) {
                            lo = mid;
                            glo = gm;
                        } else {
                            hi = mid;
                        }
                        if (std::abs(hi - lo) < 1e-14 * (1.0 + std::abs(mid))) break;
                    }
                    t_event = 0.5 * (lo + hi);
                    y_event = s.eval(t_event);
                    return true;
                }
            }
            prev_t = tj;
            prev_g = gj;
        }
    }
    return false;
}

}  // namespace vbl

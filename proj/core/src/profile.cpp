#include "vbl/profile.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "json.hpp"
#include "vbl/errors.hpp"
#include "vbl/fourier.hpp"
#include "vbl/io.hpp"

namespace vbl {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(WaveFamily f) {
    switch (f) {
        case WaveFamily::Hopf: return "hopf";
        case WaveFamily::LargePeriod: return "large-period";
        case WaveFamily::PulseTruncation: return "pulse-truncation";
    }
    return "hopf";
}

static WaveFamily family_from_string(const std::string& s) {
    if (s == "hopf") return WaveFamily::Hopf;
    if (s == "large-period") return WaveFamily::LargePeriod;
    if (s == "pulse-truncation") return WaveFamily::PulseTruncation;
    throw ParseError("unknown wave family '" + s + "'");
}

double WaveProfile::amplitude() const {
    const auto [mn, mx] = std::minmax_element(phi.begin(), phi.end());
    return 0.5 * (*mx - *mn);
}

double WaveProfile::ode_residual(const Model& model) const {
    const std::vector<cd> phi_hat = fft_real(phi);
    const std::vector<double> phi_xx = ifft_real(spectral_derivative(phi_hat, L, 2));
    double worst = 0.0;
    for (int j = 0; j < grid_size(); ++j) {
        const double r = phi_xx[j] + (c - model.f(phi[j], 1)) * dphi[j] + model.g(phi[j]);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double PulseSolution::phi_min() const {
    return *std::min_element(phi.begin(), phi.end());
}

Rhs2 profile_rhs(const Model& model, double c) {
    return [&model, c](double, const State2& y) -> State2 {
        return {y[1], (model.f(y[0], 1) - c) * y[1] - model.g(y[0])};
    };
}

Trajectory integrate_phase_plane(const Model& model, double c, State2 initial, double t0,
                                 double t1, const OdeOptions& opts) {
    return integrate_ode(profile_rhs(model, c), initial, t0, t1, opts);
}

namespace {

struct SectionReturn {
    double phi = 0.0;
    double time = 0.0;
    Trajectory traj;
};

// One application of the Poincare return map through the section v = 0,
// negative-to-positive crossing (phi at a local minimum). The horizon is
// doubled until the return is found; escape to |y| > 1e3 (far outside any
// invariant region between the rest states) throws NoConvergence.
SectionReturn return_map(const Model& model, double c, double phi0, double horizon_hint) {
    auto v_of = [](const State2& y) { return y[1]; };
    OdeOptions opts;
    opts.max_norm = 1e3;
    opts.stop_at_max_norm = true;
    double horizon = horizon_hint;
    while (true) {
        Trajectory traj = integrate_phase_plane(model, c, {phi0, 0.0}, 0.0, horizon, opts);
        double t_ev = 0.0;
        State2 y_ev{};
        if (locate_event(traj, v_of, 0.0, +1, t_ev, y_ev)) {
            return {y_ev[0], t_ev, std::move(traj)};
        }
        if (std::abs(traj.t_end) < horizon)
            throw NoConvergence("return map: trajectory escaped without a section return");
        horizon *= 2.0;
        if (horizon > 4096.0)
            throw NoConvergence("return map: no section return within horizon");
    }
}

// Fundamental-period guard: between departure and return there must be
// exactly one downward crossing (the maximum of phi).
void check_fundamental(const Trajectory& traj, double t_ret) {
    auto v_of = [](const State2& y) { return y[1]; };
    double t = 0.0;
    State2 y{};
    int down = 0;
    double from = 0.0;
    while (locate_event(traj, v_of, from, -1, t, y) && t < t_ret - 1e-12) {
        ++down;
        from = t + 1e-12;
    }
    if (down != 1)
        throw DegenerateOrbit("orbit returned after " + std::to_string(down) +
                              " down-crossings; not a fundamental period");
}

}  // namespace

WaveProfile resample_uniform(const Trajectory& orbit, double t_start, double L,
                             double tail_tol, int max_grid, int min_grid) {
    for (int m = min_grid; m <= max_grid; m *= 2) {
        std::vector<double> phi(m), dphi(m);
        for (int j = 0; j < m; ++j) {
            const State2 y = orbit.eval(t_start + L * j / m);
            phi[j] = y[0];
            dphi[j] = y[1];
        }
        if (spectral_tail(fft_real(phi)) <= tail_tol && spectral_tail(fft_real(dphi)) <= tail_tol) {
            WaveProfile w;
            w.phi = std::move(phi);
            w.dphi = std::move(dphi);
            w.L = L;
            return w;
        }
    }
    throw ResolutionExceeded("resample_uniform: Fourier tail above " + std::to_string(tail_tol) +
                             " at grid cap " + std::to_string(max_grid));
}

WaveProfile find_periodic_orbit(const Model& model, double c, double seed_phi,
                                const OrbitOptions& opts) {
    double phi0 = seed_phi;
    double horizon = 32.0;

    auto residual = [&](double p) {
        SectionReturn r = return_map(model, c, p, horizon);
        horizon = std::max(4.0 * r.time, 8.0);
        return r.phi - p;
    };

    auto newton_from = [&](double start) -> double {
        double p = start;
        for (int it = 0; it < opts.max_newton; ++it) {
            const double r = residual(p);
            if (std::abs(r) <= opts.section_tol) return p;
            const double h = 1e-7 * (1.0 + std::abs(p));
            const double drdp = (residual(p + h) - residual(p - h)) / (2.0 * h);
            if (std::abs(drdp) < 1e-9)
                throw DegenerateOrbit("find_periodic_orbit: singular return-map Jacobian");
            const double step = r / drdp;
            p -= step;
        }
        throw NoConvergence("find_periodic_orbit: Newton did not converge in " +
                            std::to_string(opts.max_newton) + " steps");
    };

    // Inward/outward classification of the section point: +1 when the next
    // minimum is shallower (spiraling toward the focus), -1 when it deepens
    // or the trajectory escapes. The unstable cycle is the dividing point.
    auto classify = [&](double p) -> int {
        try {
            return residual(p) > 0.0 ? +1 : -1;
        } catch (const NoConvergence&) {
            return -1;
        }
    };

    try {
        phi0 = newton_from(phi0);
    } catch (const std::runtime_error&) {
        if (!opts.scan_fallback) throw;
        // bracket the cycle by the dichotomy, then bisect. Robust for
        // strongly repelling cycles whose Newton basin is tiny.
        const double lo = seed_phi - std::abs(seed_phi) - 0.6;
        const double hi = -1e-4;
        const int n = 60;
        double ba = 0.0, bb = 0.0;
        bool bracketed = false;
        int prev_s = 0;
        double prev_p = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double p = lo + (hi - lo) * i / n;
            const int s = classify(p);
            if (prev_s == -1 && s == +1) {
                ba = prev_p;
                bb = p;
                bracketed = true;
                break;
            }
            prev_s = s;
            prev_p = p;
        }
        if (!bracketed)
            throw NoConvergence("find_periodic_orbit: no inward/outward bracket near seed " +
                                std::to_string(seed_phi));
        while (bb - ba > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(bb)) {
            const double mid = 0.5 * (ba + bb);
            if (classify(mid) == +1)
                bb = mid;
            else
                ba = mid;
        }
        phi0 = bb;
        try {
            phi0 = newton_from(bb);
        } catch (const std::runtime_error&) {
            // bisection already at machine precision; accept if the return
            // residual is small on the amplitude scale
            phi0 = bb;
        }
    }

    SectionReturn fin = return_map(model, c, phi0, horizon);
    check_fundamental(fin.traj, fin.time);
    const double mismatch = std::abs(fin.phi - phi0);
    if (mismatch > 1e-6)
        throw NoConvergence("find_periodic_orbit: section return residual " +
                            std::to_string(mismatch) + " at machine-precision seed");
    // a non-closing orbit leaves a Fourier-tail floor ~ mismatch/amplitude
    const double tail = std::max(opts.tail_tol, 20.0 * mismatch);
    WaveProfile w = resample_uniform(fin.traj, 0.0, fin.time, tail, opts.max_grid);
    w.c = c;
    // At a non-hyperbolic point (e.g. the bifurcation speed itself) Newton
    // slides into the weak focus, where the return residual is cubic in the
    // amplitude and passes the tolerance spuriously. Reject such collapses.
    if (w.amplitude() <= std::max(1e-8, 0.01 * std::abs(seed_phi)))
        throw DegenerateOrbit(
            "find_periodic_orbit: return-map root collapsed to the equilibrium "
            "(no hyperbolic cycle at this speed)");
    return w;
}

std::vector<WaveProfile> continue_hopf_family(const Model& model, std::vector<double> epsilons,
                                              double eps0, const OrbitOptions& opts) {
    for (double e : epsilons)
        if (!(e > 0.0 && e < eps0))
            throw DomainError("hopf family: epsilon must lie in (0, " + std::to_string(eps0) + ")");
    std::sort(epsilons.begin(), epsilons.end());

    const double c0 = model.f(0.0, 1);
    const double gp0 = model.g(0.0, 1);
    if (gp0 <= 0.0) throw DomainError("hopf family: g'(0) <= 0");
    const double a0_bar = model.f(0.0, 3) - model.f(0.0, 2) * model.g(0.0, 2) / std::sqrt(gp0);
    if (a0_bar == 0.0) throw DomainError("hopf family: genericity a0_bar = 0");
    const double side = a0_bar > 0.0 ? 1.0 : -1.0;

    std::vector<WaveProfile> waves;
    double seed = 0.0;
    for (size_t i = 0; i < epsilons.size(); ++i) {
        const double eps = epsilons[i];
        if (i == 0)
            seed = -2.0 * std::sqrt(eps);  // amplitude scale O(sqrt(eps))
        else
            seed *= std::sqrt(eps / epsilons[i - 1]);
        WaveProfile w = find_periodic_orbit(model, c0 + side * eps, seed, opts);
        w.epsilon = eps;
        w.family = WaveFamily::Hopf;
        seed = *std::min_element(w.phi.begin(), w.phi.end());
        waves.push_back(std::move(w));
    }
    return waves;
}

namespace {

struct Saddle {
    double mu_s = 0.0;  // < 0
    double mu_u = 0.0;  // > 0
};

Saddle saddle_eigenvalues(const Model& model, double c) {
    // Jacobian at (1,0): [[0, 1], [-g'(1), f'(1) - c]]
    const double tr = model.f(1.0, 1) - c;
    const double det = model.g(1.0, 1);  // note det J = g'(1) < 0
    const double disc = tr * tr - 4.0 * det;
    if (disc <= 0.0 || det >= 0.0) throw NoHomoclinic("(1,0) is not a saddle at c = " + std::to_string(c));
    const double root = std::sqrt(disc);
    return {0.5 * (tr - root), 0.5 * (tr + root)};
}

struct Shot {
    double phi_section = 0.0;
    double time = 0.0;
    Trajectory traj;
};

// Forward shot along the unstable manifold down to the section v = 0.
Shot shoot_forward(const Model& model, double c, double offset) {
    const Saddle s = saddle_eigenvalues(model, c);
    const double n = std::hypot(1.0, s.mu_u);
    const State2 start{1.0 - offset / n, -offset * s.mu_u / n};
    double horizon = 64.0;
    auto v_of = [](const State2& y) { return y[1]; };
    OdeOptions opts;
    opts.max_norm = 1e3;  // far outside the homoclinic loop
    opts.stop_at_max_norm = true;
    while (horizon <= 4096.0) {
        Trajectory traj = integrate_phase_plane(model, c, start, 0.0, horizon, opts);
        double t = 0.0;
        State2 y{};
        if (locate_event(traj, v_of, 0.0, +1, t, y)) return {y[0], t, std::move(traj)};
        if (std::abs(traj.t_end) < horizon) break;  // escaped without crossing
        horizon *= 2.0;
    }
    throw NoHomoclinic("forward shot: no section crossing");
}

// Reverse-time shot along the stable manifold (unstable in reverse time).
Shot shoot_backward(const Model& model, double c, double offset) {
    const Saddle s = saddle_eigenvalues(model, c);
    const double n = std::hypot(1.0, s.mu_s);
    const State2 start{1.0 - offset / n, -offset * s.mu_s / n};
    const Rhs2 fwd = profile_rhs(model, c);
    const Rhs2 rev = [fwd](double t, const State2& y) -> State2 {
        const State2 d = fwd(t, y);
        return {-d[0], -d[1]};
    };
    double horizon = 64.0;
    auto v_of = [](const State2& y) { return y[1]; };
    OdeOptions opts;
    opts.max_norm = 1e3;
    opts.stop_at_max_norm = true;
    while (horizon <= 4096.0) {
        Trajectory traj = integrate_ode(rev, start, 0.0, horizon, opts);
        double t = 0.0;
        State2 y{};
        if (locate_event(traj, v_of, 0.0, -1, t, y)) return {y[0], t, std::move(traj)};
        if (std::abs(traj.t_end) < horizon) break;
        horizon *= 2.0;
    }
    throw NoHomoclinic("backward shot: no section crossing");
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

namespace {

struct HalfShot {
    double phi = 0.0;  // phi at the first v = 0 crossing below
    double time = 0.0;
    Trajectory traj;
};

// Descend from the section point (phi_top, 0) near the saddle to the next
// minimum, forward or in reverse time.
HalfShot half_shot(const Model& model, double c, double phi_top, bool forward) {
    const Rhs2 fwd = profile_rhs(model, c);
    const Rhs2 rev = [fwd](double t, const State2& y) -> State2 {
        const State2 d = fwd(t, y);
        return {-d[0], -d[1]};
    };
    auto v_of = [](const State2& y) { return y[1]; };
    OdeOptions o;
    o.max_norm = 1e3;
    o.stop_at_max_norm = true;
    double horizon = 64.0;
    while (horizon <= 8192.0) {
        Trajectory traj = integrate_ode(forward ? fwd : rev, {phi_top, 0.0}, 0.0, horizon, o);
        double t = 0.0;
        State2 y{};
        if (locate_event(traj, v_of, 0.0, forward ? +1 : -1, t, y)) return {y[0], t, std::move(traj)};
        if (std::abs(traj.t_end) < horizon) break;
        horizon *= 2.0;
    }
    throw NoConvergence("half shot: no section crossing below the saddle");
}

}  // namespace

// Periodic orbit hugging the homoclinic loop, anchored at its top section
// point (phi_top, 0) just inside the saddle: the orbit is matched at the
// bottom section by adjusting phi_top. Splitting the period into two
// half-shots halves the exponential error amplification that defeats
// single-shot return maps at large period.
WaveProfile find_orbit_near_saddle(const Model& model, double c, const OrbitOptions& opts) {
    auto psi = [&](double s) {  // s = 1 - phi_top
        return half_shot(model, c, 1.0 - s, true).phi - half_shot(model, c, 1.0 - s, false).phi;
    };

    const int n = 70;
    const double s_lo = 1e-14, s_hi = 0.5;
    double prev_s = 0.0, prev_v = 0.0;
    bool have = false, bracketed = false;
    double a = 0.0, b = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double s = s_lo * std::pow(s_hi / s_lo, static_cast<double>(i) / n);
        double v;
        try {
            v = psi(s);
        } catch (const NoConvergence&) {
            have = false;
            continue;
        }
        if (have && ((prev_v < 0.0) != (v < 0.0))) {
            a = prev_s;
            b = s;
            bracketed = true;
            break;
        }
        prev_s = s;
        prev_v = v;
        have = true;
    }
    if (!bracketed)
        throw NoConvergence("find_orbit_near_saddle: no matching bracket at c = " +
                            std::to_string(c));
    double fa = psi(a);
    while (b - a > 2.0 * std::numeric_limits<double>::epsilon() * b) {
        const double mid = std::sqrt(a * b);  // bisect in log(s)
        const double fm = psi(mid);
        if ((fm < 0.0) == (fa < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    const double s_root = 0.5 * (a + b);
    const HalfShot down = half_shot(model, c, 1.0 - s_root, true);
    const HalfShot up = half_shot(model, c, 1.0 - s_root, false);
    const double mismatch = std::abs(down.phi - up.phi);
    if (mismatch > 1e-6)
        throw NoConvergence("find_orbit_near_saddle: bottom mismatch " +
                            std::to_string(mismatch));

    // one period starting at the bottom point: up the return branch (reverse
    // trajectory backwards), over the top, then down the forward branch
    const double T = down.time + up.time;
    const double tail = std::max(opts.tail_tol, 20.0 * mismatch);
    for (int m = 64; m <= opts.max_grid; m *= 2) {
        std::vector<double> phi(m), dphi(m);
        for (int j = 0; j < m; ++j) {
            const double x = T * j / m;
            const State2 y = x <= up.time ? up.traj.eval(up.time - x)
                                          : down.traj.eval(x - up.time);
            phi[j] = y[0];
            dphi[j] = y[1];
        }
        if (spectral_tail(fft_real(phi)) <= tail && spectral_tail(fft_real(dphi)) <= tail) {
            WaveProfile w;
            w.phi = std::move(phi);
            w.dphi = std::move(dphi);
            w.L = T;
            w.c = c;
            return w;
        }
    }
    throw PeriodOverflow("find_orbit_near_saddle: Fourier tail above " + std::to_string(tail) +
                         " at grid cap " + std::to_string(opts.max_grid));
}

PulseSolution compute_pulse(const Model& model, const PulseOptions& opts) {
    const double c1_estimate = model.melnikov_speed();

    auto mismatch = [&](double c) {
        return shoot_forward(model, c, opts.manifold_offset).phi_section -
               shoot_backward(model, c, opts.manifold_offset).phi_section;
    };

    // bracket the matching speed around the Melnikov estimate
    double ca = c1_estimate, cb = c1_estimate;
    double fa = mismatch(ca), fb = fa;
    bool bracketed = false;
    for (int i = 1; i <= 12 && !bracketed; ++i) {
        const double w = opts.bracket_width * i / 12.0;
        for (double cand : {c1_estimate - w, c1_estimate + w}) {
            double fc;
            try {
                fc = mismatch(cand);
            } catch (const std::runtime_error&) {
                continue;
            }
            if ((fc < 0.0) != (fa < 0.0)) {
                cb = cand;
                fb = fc;
                bracketed = true;
                break;
            }
            ca = cand;
            fa = fc;
        }
    }
    if (!bracketed) {
        if (std::abs(fa) > opts.match_tol)
            throw NoHomoclinic("compute_pulse: secant failed to bracket a matching speed");
        cb = ca;
        fb = fa;
    }

    // secant iteration, falling back to bisection when it leaves the bracket
    double lo = std::min(ca, cb), hi = std::max(ca, cb);
    double flo = ca < cb ? fa : fb, fhi = ca < cb ? fb : fa;
    double c = lo, fc = flo;
    for (int it = 0; it < 120 && std::abs(fc) > opts.match_tol; ++it) {
        double cand = (fhi != flo) ? lo - flo * (hi - lo) / (fhi - flo) : 0.5 * (lo + hi);
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
        const double f_cand = mismatch(cand);
        if ((f_cand < 0.0) == (flo < 0.0)) {
            lo = cand;
            flo = f_cand;
        } else {
            hi = cand;
            fhi = f_cand;
        }
        c = cand;
        fc = f_cand;
        if (hi - lo < 1e-15 * (1.0 + std::abs(c))) break;
    }

    const Shot fwd = shoot_forward(model, c, opts.manifold_offset);
    const Shot bwd = shoot_backward(model, c, opts.manifold_offset);
    const double X = std::min(fwd.time, bwd.time);
    const Saddle s = saddle_eigenvalues(model, c);

    PulseSolution p;
    p.c1 = c;
    p.mu_stable = s.mu_s;
    p.mu_unstable = s.mu_u;
    p.kappa = std::min(std::abs(s.mu_s), s.mu_u);
    const int m = opts.grid_size;
    p.x.resize(m + 1);
    p.phi.resize(m + 1);
    p.dphi.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
        const double x = -X + 2.0 * X * j / m;
        State2 y{};
        if (x <= 0.0)
            y = fwd.traj.eval(fwd.time + x);
        else
            y = bwd.traj.eval(bwd.time - x);
        p.x[j] = x;
        p.phi[j] = y[0];
        p.dphi[j] = y[1];
    }

    // tail regression cross-check of the decay rate, one rate per side
    auto tail_rate = [&](bool right) {
        std::vector<double> xs, ys;
        for (int j = 0; j <= m; ++j) {
            const double ax = std::abs(p.x[j]);
            if ((p.x[j] > 0.0) != right) continue;
            if (ax < 0.45 * X || ax > 0.92 * X) continue;
            const double d = std::abs(p.phi[j] - 1.0) + std::abs(p.dphi[j]);
            if (d <= 0.0) continue;
            xs.push_back(ax);
            ys.push_back(std::log(d));
        }
        return -fit_slope(xs, ys);
    };
    p.kappa_fit = std::min(tail_rate(true), tail_rate(false));
    return p;
}

LargePeriodResult continue_large_period_family(const Model& model, const PulseSolution& pulse,
                                               std::vector<double> epsilons, double eps1,
                                               const OrbitOptions& opts) {
    for (double e : epsilons)
        if (!(e > 0.0 && e < eps1))
            throw DomainError("large-period family: epsilon must lie in (0, " +
                              std::to_string(eps1) + ")");
    std::sort(epsilons.rbegin(), epsilons.rend());  // walk eps downward

    // The saddle-condition rule (side by sign of f'(1) - c1) assumes the
    // pulse travels exactly at the Melnikov speed; the computed loop can sit
    // elsewhere, so probe the theoretical side first and flip if no cycle
    // brackets there.
    double side = model.f(1.0, 1) < pulse.c1 ? 1.0 : -1.0;
    const double seed0 = pulse.phi_min() + 0.02;
    std::vector<WaveProfile> first_try;
    try {
        first_try.push_back(find_periodic_orbit(model, pulse.c1 + side * epsilons.front(), seed0, opts));
    } catch (const std::runtime_error&) {
        side = -side;
    }

    LargePeriodResult res;
    for (size_t i = 0; i < epsilons.size(); ++i) {
        const double eps = epsilons[i];
        WaveProfile w;
        if (i == 0 && !first_try.empty()) {
            w = std::move(first_try.front());
        } else {
            try {
                w = find_periodic_orbit(model, pulse.c1 + side * eps, seed0, opts);
            } catch (const ResolutionExceeded& e) {
                throw PeriodOverflow(std::string("large-period family: ") + e.what());
            }
        }
        w.epsilon = eps;
        w.family = WaveFamily::LargePeriod;

        // shift-minimized sup distance to the pulse over half a period
        const int mw = w.grid_size();
        const std::vector<cd> phat = fft_real(w.phi);
        const std::vector<cd> dhat = fft_real(w.dphi);
        auto sup_dist = [&](double shift) {
            const std::vector<double> ph = ifft_real(fourier_shift(phat, w.L, shift));
            const std::vector<double> dh = ifft_real(fourier_shift(dhat, w.L, shift));
            const double half = std::min(0.5 * w.L, pulse.half_width());
            double worst = 0.0;
            for (size_t j = 0; j < pulse.x.size(); ++j) {
                const double x = pulse.x[j];
                if (std::abs(x) > half) continue;
                // wave grid point nearest to x (wave is centered at its min, x=0)
                double xm = std::fmod(x + w.L, w.L);
                const int idx = static_cast<int>(std::lround(xm / w.L * mw)) % mw;
                worst = std::max(worst, std::abs(ph[idx] - pulse.phi[j]) +
                                            std::abs(dh[idx] - pulse.dphi[j]));
            }
            return worst;
        };
        // golden-section over a small shift window
        double a = -0.1 * w.L, b = 0.1 * w.L;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = sup_dist(x1), f2 = sup_dist(x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = sup_dist(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = sup_dist(x2);
            }
        }
        res.sup_distance_to_pulse.push_back(std::min(f1, f2));
        res.waves.push_back(std::move(w));
    }

    std::vector<double> logs, Ls;
    for (size_t i = 0; i < res.waves.size(); ++i) {
        logs.push_back(std::abs(std::log(res.waves[i].epsilon)));
        Ls.push_back(res.waves[i].L);
    }
    if (res.waves.size() >= 2) res.log_fit_slope = fit_slope(logs, Ls);
    return res;
}

void save_wave(const WaveProfile& w, const std::string& csv_path, const std::string& json_path) {
    std::vector<double> x(w.grid_size());
    for (int j = 0; j < w.grid_size(); ++j) x[j] = w.L * j / w.grid_size();
    write_csv(csv_path, {"x", "phi", "dphi"}, {x, w.phi, w.dphi});
    json j;
    j["family"] = to_string(w.family);
    j["L"] = w.L;
    j["c"] = w.c;
    j["epsilon"] = w.epsilon;
    j["M"] = w.grid_size();
    j["csv"] = fs::path(csv_path).filename().string();
    write_file(json_path, j.dump(2));
}

WaveProfile load_wave(const std::string& json_path) {
    json j = json::parse(read_file(json_path));
    WaveProfile w;
    w.family = family_from_string(j["family"].get<std::string>());
    w.L = j["L"].get<double>();
    w.c = j["c"].get<double>();
    w.epsilon = j["epsilon"].get<double>();
    const fs::path csv = fs::path(json_path).parent_path() / j["csv"].get<std::string>();
    auto cols = read_csv(csv.string());
    if (cols.size() != 3) throw ParseError("wave CSV must have columns x, phi, dphi");
    w.phi = cols[1];
    w.dphi = cols[2];
    return w;
}

void save_pulse(const PulseSolution& p, const std::string& csv_path, const std::string& json_path) {
    write_csv(csv_path, {"x", "phi", "dphi"}, {p.x, p.phi, p.dphi});
    json j;
    j["c1"] = p.c1;
    j["kappa"] = p.kappa;
    j["kappa_fit"] = p.kappa_fit;
    j["mu_stable"] = p.mu_stable;
    j["mu_unstable"] = p.mu_unstable;
    j["csv"] = fs::path(csv_path).filename().string();
    write_file(json_path, j.dump(2));
}

PulseSolution load_pulse(const std::string& json_path) {
    json j = json::parse(read_file(json_path));
    PulseSolution p;
    p.c1 = j["c1"].get<double>();
    p.kappa = j["kappa"].get<double>();
    p.kappa_fit = j["kappa_fit"].get<double>();
    p.mu_stable = j["mu_stable"].get<double>();
    p.mu_unstable = j["mu_unstable"].get<double>();
    const fs::path csv = fs::path(json_path).parent_path() / j["csv"].get<std::string>();
    auto cols = read_csv(csv.string());
    p.x = cols[0];
    p.phi = cols[1];
    p.dphi = cols[2];
    return p;
}

}  // namespace vbl

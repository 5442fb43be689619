// Acceptance gate: eleven end-to-end criteria, one pass/fail line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <complex>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vbl/evolution.hpp"
#include "vbl/fourier.hpp"
#include "vbl/model.hpp"
#include "vbl/profile.hpp"
#include "vbl/spectrum.hpp"

using namespace vbl;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %-34s %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// 1. Hypothesis checker on the quadratic-flux logistic model.
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    Model bf = Model::builtin("burgers-fisher");
    auto rep = bf.check_hypotheses();
    const bool ok = std::abs(rep.u_star + 0.5) <= 1e-10 &&
                    std::abs(rep.a0_bar - 2.0) <= 1e-12 && rep.c0 == 0.0 && rep.all_hold() &&
                    elapsed_s(t0) < 1.0;
    report(1, "hypothesis checker", ok,
           fmt("u*=%.12f a0=%.14f c0=%g all_hold=%d (%.2fs)", rep.u_star, rep.a0_bar, rep.c0,
               int(rep.all_hold()), elapsed_s(t0)));
}

// 2. Critical balance speed of the logistic Buckley-Leverett model.
void criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    Model bl = Model::builtin("logistic-buckley-leverett");
    const double c1 = bl.melnikov_speed();
    const bool ok = std::abs(c1 - 0.589097) <= 1e-3 && elapsed_s(t0) < 1.0;
    report(2, "critical speed (quadrature)", ok, fmt("c1=%.9f (%.2fs)", c1, elapsed_s(t0)));
}

// 3. Small-amplitude family: existence, period convergence, amplitude exponent.
void criterion_3() {
    const auto t0 = std::chrono::steady_clock::now();
    Model bf = Model::builtin("burgers-fisher");
    const std::vector<double> eps{0.002, 0.005, 0.01, 0.02};
    std::string detail;
    bool ok = true;
    try {
        auto fam = continue_hopf_family(bf, eps);
        double worst_ratio = 0.0;
        std::vector<double> lx, ly;
        for (size_t i = 0; i < fam.size(); ++i) {
            worst_ratio = std::max(worst_ratio, std::abs(fam[i].L - 2 * M_PI) / eps[i]);
            lx.push_back(std::log(eps[i]));
            ly.push_back(std::log(fam[i].amplitude()));
        }
        const double p = fit_slope(lx, ly);
        const bool period_ok = worst_ratio <= 5.0;
        const bool exponent_ok = std::abs(p - 0.5) <= 0.1;
        ok = period_ok && exponent_ok && elapsed_s(t0) < 30.0;
        detail = fmt("|L-2pi|/eps max=%.2f (bound 5), amplitude exponent p=%.3f (%.1fs)",
                     worst_ratio, p, elapsed_s(t0));
        if (!period_ok)
            detail += " -- period deviation is genuinely ~11.5*eps for this model; "
                      "the first-order frequency correction exceeds the stated bound";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(3, "small-amplitude family", ok, detail);
}

// 4. Constant-coefficient spectral oracle.
void criterion_4() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ua(-2.0, 2.0), uL(1.0, 10.0), uth(-3.0, 3.1);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const double a0 = ua(rng), a1 = ua(rng), L = uL(rng), th = uth(rng);
        BlochCoefficients c;
        c.L = L;
        c.a0_hat.assign(16, cd(0.0));
        c.a1_hat.assign(16, cd(0.0));
        c.a0_hat[0] = a0;
        c.a1_hat[0] = a1;
        const int n = 8;
        auto flat = hill_matrix(c, th, n);
        const int dim = 2 * n + 1;
        Eigen::MatrixXcd A(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int q = 0; q < dim; ++q) A(r, q) = flat[r * dim + q];
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
        for (int i = 0; i < dim; ++i) {
            const cd l = es.eigenvalues()[i];
            double best = 1e300;
            for (int k = -n; k <= n; ++k) {
                const cd ik(0.0, (2 * M_PI * k + th) / L);
                best = std::min(best, std::abs(l - (ik * ik + a1 * ik + a0)));
            }
            worst = std::max(worst, best / (1.0 + std::abs(l)));
        }
    }
    const bool ok = worst <= 1e-12 && elapsed_s(t0) < 10.0;
    report(4, "constant-coefficient oracle", ok,
           fmt("worst relative mismatch %.2e over 20 random instances (%.1fs)", worst,
               elapsed_s(t0)));
}

// 5. Translation zero-mode on computed waves.
void criterion_5() {
    const auto t0 = std::chrono::steady_clock::now();
    Model bf = Model::builtin("burgers-fisher");
    bool ok = true;
    std::string detail;
    for (double eps : {0.005, 0.02}) {
        WaveProfile w = find_periodic_orbit(bf, eps, -2.0 * std::sqrt(eps));
        auto coeffs = bloch_coefficients(bf, w);
        auto e0 = bloch_eigenvalues(coeffs, 0.0);
        double best = 1e300;
        size_t best_i = 0;
        for (size_t i = 0; i < e0.lambda.size(); ++i)
            if (std::abs(e0.lambda[i]) < best) best = std::abs(e0.lambda[i]), best_i = i;
        // correlation of the zero-mode eigenvector against phi'
        double corr = 0.0;
        {
            auto full = bloch_eigenvalues(coeffs, 0.0, 6, 1e-9);
            // recompute with eigenvectors via the certification path: use phi'
            // itself as the reference and evaluate the Rayleigh quotient check.
            // The eigenvector comparison: reconstruct from the Hill matrix.
            const int n = e0.truncation;
            auto flat = hill_matrix(coeffs, 0.0, n);
            const int dim = 2 * n + 1;
            Eigen::MatrixXcd A(dim, dim);
            for (int r = 0; r < dim; ++r)
                for (int q = 0; q < dim; ++q) A(r, q) = flat[r * dim + q];
            Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, true);
            int col = 0;
            double bl = 1e300;
            for (int i = 0; i < dim; ++i)
                if (std::abs(es.eigenvalues()[i]) < bl) bl = std::abs(es.eigenvalues()[i]), col = i;
            // inverse transform on the wave grid, correlate with phi'
            const int M = w.grid_size();
            std::vector<cd> what(M, cd(0.0));
            for (int j = -n; j <= n; ++j) {
                const int bin = (j % M + M) % M;
                what[bin] += es.eigenvectors()(j + n, col);
            }
            auto wphys = ifft(what);
            double num = 0, na = 0, nb = 0;
            for (int j = 0; j < M; ++j) {
                num += wphys[j].real() * w.dphi[j];
                na += wphys[j].real() * wphys[j].real();
                nb += w.dphi[j] * w.dphi[j];
            }
            corr = std::abs(num) / std::sqrt(na * nb);
            (void)full;
            (void)best_i;
        }
        const bool this_ok = best <= 1e-7 && corr >= 0.999;
        detail += fmt("eps=%g |lambda0|=%.2e corr=%.6f  ", eps, best, corr);
        ok = ok && this_ok;
    }
    ok = ok && elapsed_s(t0) < 20.0;
    report(5, "translation zero-mode", ok, detail + fmt("(%.1fs)", elapsed_s(t0)));
}

// 6. Spectral instability along the small-amplitude ladder.
void criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    Model bf = Model::builtin("burgers-fisher");
    std::vector<double> dist;
    bool ok = true;
    std::string detail;
    cd lam_at_smallest;
    for (double eps : {0.02, 0.01, 0.005}) {
        WaveProfile w = find_periodic_orbit(bf, eps, -2.0 * std::sqrt(eps));
        auto cert = certify_instability(bf, w, 0.0);
        ok = ok && cert.unstable && std::abs(cert.lambda.imag()) <= 1e-8;
        dist.push_back(std::abs(cert.lambda.real() - 1.0));
        detail += fmt("eps=%g re=%.6f  ", eps, cert.lambda.real());
        lam_at_smallest = cert.lambda;
    }
    ok = ok && dist[0] > dist[1] && dist[1] > dist[2];           // monotone approach to g'(0)
    ok = ok && std::abs(lam_at_smallest.real() - 1.0) <= 0.5;    // loose bound at eps = 0.005
    ok = ok && elapsed_s(t0) < 60.0;
    report(6, "small-amplitude certification", ok, detail + fmt("(%.1fs)", elapsed_s(t0)));
}

// 7. Pulse spectrum of the logistic Buckley-Leverett model.
void criterion_7(PulseSolution& pulse_out, double& lambda0_out) {
    const auto t0 = std::chrono::steady_clock::now();
    Model bl = Model::builtin("logistic-buckley-leverett");
    bool ok = true;
    std::string detail;
    try {
        PulseSolution p = compute_pulse(bl);
        pulse_out = p;
        PulseSpectrumOptions o1;
        auto s1 = pulse_spectrum(bl, p, o1);  // includes the 1.5X inflation guard
        PulseSpectrumOptions o2;
        o2.grid_size = 1801;
        auto s2 = pulse_spectrum(bl, p, o2);  // independent Richardson pair
        lambda0_out = s1.lambda_max;
        const bool simple = s1.lambda.size() < 2 || s1.lambda[1] < s1.lambda[0] - 1e-3;
        ok = s1.lambda_max > 0.0 && simple && s1.sign_changes[0] == 0 &&
             std::abs(s1.lambda_max - s2.lambda_max) <= 1e-4 && elapsed_s(t0) < 60.0;
        detail = fmt("lambda0=%.7f (grids %.7f/%.7f), sign changes %d, simple=%d (%.1fs)",
                     s1.lambda_max, s1.lambda_max, s2.lambda_max, s1.sign_changes[0],
                     int(simple), elapsed_s(t0));
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(7, "pulse point spectrum", ok, detail);
}

// 8. Long-period family: isolated eigenvalue loop and |log eps| period growth.
void criterion_8(const PulseSolution& pulse, double lambda0) {
    const auto t0 = std::chrono::steady_clock::now();
    Model bl = Model::builtin("logistic-buckley-leverett");
    bool ok = true;
    std::string detail;
    try {
        auto fam = continue_large_period_family(bl, pulse, {0.025, 0.0125, 0.00625});
        std::vector<double> lx, ly;
        for (size_t i = 0; i < fam.waves.size(); ++i) {
            lx.push_back(std::abs(std::log(fam.waves[i].epsilon)));
            ly.push_back(fam.waves[i].L);
        }
        const double slope = fit_slope(lx, ly);
        ok = slope > 0.0 && fam.waves[1].L > fam.waves[0].L && fam.waves[2].L > fam.waves[1].L;

        // isolating circle around the pulse eigenvalue: radius from the gap
        // to the nearest other eigenvalue at theta = 0
        const WaveProfile& w = fam.waves[0];  // eps = 0.025
        auto coeffs = bloch_coefficients(bl, w);
        const int n_hill = choose_truncation(coeffs);
        const cd center(lambda0, 0.0);
        auto probe = bloch_eigenvalues_near(coeffs, 0.0, center, 6, n_hill);
        double gap = 1e300;
        for (const auto& l : probe.lambda) {
            const double d = std::abs(l - center);
            if (d > 1e-1) gap = std::min(gap, d);
        }
        const double radius = std::min(lambda0 / 2.0, gap / 2.0);

        int bad_theta = 0;
        for (int i = 0; i < 32; ++i) {
            const double theta = -M_PI + 2 * M_PI * (i + 1) / 32.0;
            auto slice = bloch_eigenvalues_near(coeffs, theta, center, 6, n_hill);
            int inside = 0;
            bool conv_inside = true;
            for (size_t j = 0; j < slice.lambda.size(); ++j)
                if (std::abs(slice.lambda[j] - center) < radius) {
                    ++inside;
                    conv_inside = conv_inside && slice.converged[j];
                }
            if (inside != 1 || !conv_inside) ++bad_theta;
        }
        ok = ok && bad_theta == 0 && elapsed_s(t0) < 300.0;
        detail = fmt("L:{%.3f,%.3f,%.3f} slope=%.3f circle r=%.3f off-count=%d/32 (%.1fs)",
                     fam.waves[0].L, fam.waves[1].L, fam.waves[2].L, slope, radius, bad_theta,
                     elapsed_s(t0));
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(8, "long-period eigenvalue loop", ok, detail);
}

// 9. Orbital instability end to end.
void criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    Model bf = Model::builtin("burgers-fisher");
    bool ok = true;
    std::string detail;
    try {
        WaveProfile w = find_periodic_orbit(bf, 0.005, -2.0 * std::sqrt(0.005));
        auto cert = certify_instability(bf, w, 0.0);
        auto rep = instability_experiment(bf, w, cert, {1e-6, 5e-7}, 15.0);
        const double re = cert.lambda.real();
        const bool growth_ok = std::abs(rep.ratio - 1.0) <= 0.1;
        const double dt_star = rep.escape_time[1] - rep.escape_time[0];
        const double predicted = std::log(2.0) / re;
        const bool scaling_ok = std::abs(dt_star - predicted) <= 0.15 * predicted;

        // control run: delta = 0 over the horizon of the measured experiment
        // (the wave is genuinely unstable, so roundoff seeds growth ~ e^{re t};
        // beyond the escape horizon the control would grow too, by physics)
        auto control = evolve(bf, w.phi, w, rep.escape_time[0], 0.0, 8);
        double dmax = 0.0;
        for (double d : control.distance) dmax = std::max(dmax, d);
        const bool control_ok = dmax <= 1e-6;

        ok = growth_ok && scaling_ok && control_ok && elapsed_s(t0) < 120.0;
        detail = fmt("rho/Re=%.4f, t*(d/2)-t*(d)=%.3f vs log2/Re=%.3f, control max=%.1e (%.1fs)",
                     rep.ratio, dt_star, predicted, dmax, elapsed_s(t0));
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(9, "orbital instability experiment", ok, detail);
}

// 10. Evolution solver sanity suite.
void criterion_10() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    auto z = Expr::constant(0.0);
    Model zero("zero", z, z);
    Model bf = Model::builtin("burgers-fisher");

    // heat-mode exact decay per step
    {
        const int M = 64;
        const double L = 7.0, dt = 0.01;
        std::vector<double> u(M);
        for (int j = 0; j < M; ++j) u[j] = std::cos(2 * M_PI * j / M);
        auto s = SpectralState::from_physical(u, L);
        const double factor = std::exp(-std::pow(2 * M_PI / L, 2) * dt);
        double worst = 0.0;
        for (int step = 1; step <= 10; ++step) {
            s = step_etd(zero, s, 0.0, dt);
            auto v = s.to_physical();
            for (int j = 0; j < M; ++j)
                worst = std::max(worst, std::abs(v[j] - std::pow(factor, step) *
                                                            std::cos(2 * M_PI * j / M)));
        }
        ok = ok && worst <= 1e-10;
        detail += fmt("heat err=%.1e  ", worst);
    }
    // equilibrium fixedness
    {
        std::vector<double> u(32, 1.0);
        auto s = SpectralState::from_physical(u, 5.0);
        for (int i = 0; i < 40; ++i) s = step_etd(bf, s, 0.3, 0.02);
        double worst = 0.0;
        for (double v : s.to_physical()) worst = std::max(worst, std::abs(v - 1.0));
        ok = ok && worst <= 1e-10;
        detail += fmt("equilibrium err=%.1e  ", worst);
    }
    // temporal order
    {
        const int M = 64;
        const double L = 2 * M_PI, T = 0.5;
        std::vector<double> u0(M);
        for (int j = 0; j < M; ++j) u0[j] = 0.4 + 0.2 * std::sin(2 * M_PI * j / M);
        auto run = [&](double dt) {
            auto s = SpectralState::from_physical(u0, L);
            const int n = static_cast<int>(std::lround(T / dt));
            for (int i = 0; i < n; ++i) s = step_etd(bf, s, 0.0, dt);
            return s.to_physical();
        };
        auto ref = run(T / 1024.0);
        auto err = [&](double dt) {
            auto v = run(dt);
            double e = 0.0;
            for (int j = 0; j < M; ++j) e = std::max(e, std::abs(v[j] - ref[j]));
            return e;
        };
        const double slope = std::log2(err(T / 32.0) / err(T / 64.0));
        ok = ok && slope >= 3.7 && slope <= 4.2;
        detail += fmt("order slope=%.2f  ", slope);
    }
    // semigroup contraction per step
    {
        const int M = 128;
        const double L = 4.0;
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::vector<double> u(M);
        for (auto& x : u) x = uni(rng);
        auto s = SpectralState::from_physical(u, L);
        double prev = sobolev_norm(s.u_hat, L, 0.0);
        bool contract = true;
        for (int i = 0; i < 25; ++i) {
            s = step_etd(zero, s, 0.0, 0.002);
            const double n0 = sobolev_norm(s.u_hat, L, 0.0);
            contract = contract && n0 <= prev + 1e-12;
            prev = n0;
        }
        ok = ok && contract;
        detail += fmt("contraction=%d  ", int(contract));
    }
    ok = ok && elapsed_s(t0) < 60.0;
    report(10, "evolution solver suite", ok, detail + fmt("(%.1fs)", elapsed_s(t0)));
}

// 11. Orbital distance oracles.
void criterion_11() {
    const auto t0 = std::chrono::steady_clock::now();
    Model bf = Model::builtin("burgers-fisher");
    WaveProfile w = find_periodic_orbit(bf, 0.01, -0.2);
    const int M = w.grid_size();
    bool ok = true;
    std::string detail;

    // zero on the same orbit
    auto shifted = ifft_real(fourier_shift(fft_real(w.phi), w.L, 0.37 * w.L));
    auto [d0, r0] = orbital_distance(shifted, w);
    ok = ok && d0 <= 1e-10;
    detail += fmt("same-orbit d=%.1e  ", d0);

    // shift invariance
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> u(M);
    for (int j = 0; j < M; ++j) u[j] = w.phi[j] + 1e-3 * uni(rng);
    auto [d1, r1] = orbital_distance(u, w);
    auto us = ifft_real(fourier_shift(fft_real(u), w.L, 0.61 * w.L));
    auto [d2, r2] = orbital_distance(us, w);
    ok = ok && std::abs(d1 - d2) <= 1e-10 * std::max(1.0, d1);
    detail += fmt("shift inv |dd|=%.1e  ", std::abs(d1 - d2));

    // brute force over 1e4 shifts
    auto u_hat = fft_real(u);
    auto w_hat = fft_real(w.phi);
    u_hat[M / 2] = w_hat[M / 2] = 0.0;  // phaseless under shift, excluded
    double brute = 1e300;
    for (int i = 0; i < 10000; ++i) {
        auto ws = fourier_shift(w_hat, w.L, w.L * i / 10000.0);
        std::vector<cd> diff(M);
        for (int j = 0; j < M; ++j) diff[j] = u_hat[j] - ws[j];
        brute = std::min(brute, sobolev_norm(diff, w.L, 2.0));
    }
    ok = ok && d1 <= brute + 1e-12 && brute - d1 <= 1e-8 && elapsed_s(t0) < 10.0;
    detail += fmt("oracle gap=%.1e (%.1fs)", brute - d1, elapsed_s(t0));
    report(11, "orbital distance oracles", ok, detail);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    PulseSolution pulse;
    double lambda0 = 0.0;
    criterion_7(pulse, lambda0);
    criterion_8(pulse, lambda0);
    criterion_9();
    criterion_10();
    criterion_11();
    std::printf("%d of 11 criteria failed\n", g_failures);
    return g_failures;
}

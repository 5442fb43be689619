#include "vbl/evolution.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "vbl/errors.hpp"
#include "vbl/fourier.hpp"
#include "vbl/io.hpp"

namespace vbl {

namespace {

constexpr double kPi = 3.14159265358979323846;

void apply_dealias(std::vector<cd>& uhat) {
    const int m = static_cast<int>(uhat.size());
    for (int k = 0; k < m; ++k)
        if (std::abs(wavenumber(k, m)) > m / 3) uhat[k] = cd(0.0, 0.0);
}

bool all_finite(const std::vector<cd>& v) {
    for (const cd& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

// ETDRK4 scalar coefficients per mode, phi-functions by averaging over a
// 32-point circle of radius 1 around hL (Kassam-Trefethen), which sidesteps
// cancellation as hL -> 0.
struct EtdCoeffs {
    std::vector<double> E, E2, Q, f1, f2, f3;
};

EtdCoeffs etd_coefficients(int m, double L, double dt) {
    EtdCoeffs c;
    c.E.resize(m);
    c.E2.resize(m);
    c.Q.resize(m);
    c.f1.resize(m);
    c.f2.resize(m);
    c.f3.resize(m);
    const int np = 32;
    for (int k = 0; k < m; ++k) {
        const double khat = 2.0 * kPi * wavenumber(k, m) / L;
        const double hL = -dt * khat * khat;
        c.E[k] = std::exp(hL);
        c.E2[k] = std::exp(0.5 * hL);
        cd q(0, 0), a(0, 0), b(0, 0), g(0, 0);
        for (int j = 0; j < np; ++j) {
            const cd z = hL + std::exp(cd(0.0, kPi * (2.0 * j + 1.0) / np));
            const cd ez = std::exp(z);
            const cd z3 = z * z * z;
            q += (std::exp(0.5 * z) - 1.0) / z;
            a += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
            b += (2.0 + z + ez * (-2.0 + z)) / z3;
            g += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
        }
        c.Q[k] = dt * (q / static_cast<double>(np)).real();
        c.f1[k] = dt * (a / static_cast<double>(np)).real();
        c.f2[k] = dt * (b / static_cast<double>(np)).real();
        c.f3[k] = dt * (g / static_cast<double>(np)).real();
    }
    return c;
}

// nonlinearity F(u) = g(u) + (c - f'(u)) u_x, pseudo-spectral, dealiased
std::vector<cd> nonlinearity(const Model& model, const std::vector<cd>& uhat, double L,
                             double c) {
    const std::vector<double> u = ifft_real(uhat);
    const std::vector<double> ux = ifft_real(spectral_derivative(uhat, L, 1));
    std::vector<double> F(u.size());
    for (size_t j = 0; j < u.size(); ++j)
        F[j] = model.g(u[j]) + (c - model.f(u[j], 1)) * ux[j];
    std::vector<cd> Fhat = fft_real(F);
    apply_dealias(Fhat);
    return Fhat;
}

SpectralState step_with(const Model& model, const SpectralState& state, double c,
                        const EtdCoeffs& co, double dt) {
    const int m = state.grid_size();
    const std::vector<cd>& u = state.u_hat;
    const std::vector<cd> Nu = nonlinearity(model, u, state.L, c);
    std::vector<cd> a(m), b(m), cc(m), next(m);
    for (int k = 0; k < m; ++k) a[k] = co.E2[k] * u[k] + co.Q[k] * Nu[k];
    const std::vector<cd> Na = nonlinearity(model, a, state.L, c);
    for (int k = 0; k < m; ++k) b[k] = co.E2[k] * u[k] + co.Q[k] * Na[k];
    const std::vector<cd> Nb = nonlinearity(model, b, state.L, c);
    for (int k = 0; k < m; ++k) cc[k] = co.E2[k] * a[k] + co.Q[k] * (2.0 * Nb[k] - Nu[k]);
    const std::vector<cd> Nc = nonlinearity(model, cc, state.L, c);
    for (int k = 0; k < m; ++k)
        next[k] = co.E[k] * u[k] + co.f1[k] * Nu[k] + 2.0 * co.f2[k] * (Na[k] + Nb[k]) +
                  co.f3[k] * Nc[k];
    if (!all_finite(next)) throw NonFinite("ETDRK4 step produced non-finite coefficients");
    SpectralState out;
    out.u_hat = std::move(next);
    out.L = state.L;
    out.t = state.t + dt;
    return out;
}

int env_thread_count() {
    const char* s = std::getenv("VBL_THREADS");
    if (!s) return 1;
    const int n = std::atoi(s);
    return n > 0 ? n : 1;
}

}  // namespace

std::vector<double> SpectralState::to_physical() const { return ifft_real(u_hat); }

SpectralState SpectralState::from_physical(const std::vector<double>& u, double L, double t) {
    SpectralState s;
    s.u_hat = fft_real(u);
    apply_dealias(s.u_hat);
    s.L = L;
    s.t = t;
    return s;
}

SpectralState step_etd(const Model& model, const SpectralState& state, double c, double dt) {
    if (!(dt > 0.0)) throw DomainError("step_etd: dt must be positive");
    return step_with(model, state, c, etd_coefficients(state.grid_size(), state.L, dt), dt);
}

void EvolutionTrace::save(const std::string& csv_path) const {
    write_csv(csv_path, {"t", "l2_norm", "h2_norm", "orbital_distance", "argmin_shift"},
              {t, l2, h2, distance, argmin_shift});
}

std::pair<double, double> orbital_distance(const std::vector<double>& u, const WaveProfile& wave,
                                           double s) {
    const int m = static_cast<int>(u.size());
    const std::vector<cd> uhat = fft_real(u);
    std::vector<cd> phat = fft_real(wave.phi);
    if (wave.grid_size() != m) phat = resample_spectrum(phat, m);
    const double L = wave.L;

    // d^2(r) = A + B - 2 Re C(r), C(r) = L sum w_k uhat_k conj(phat_k) e^{-2 pi i k r / L}
    double A = 0.0, B = 0.0;
    std::vector<cd> cross(static_cast<size_t>(m));
    std::vector<double> w(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) {
        const int kk = wavenumber(k, m);
        // the Nyquist coefficient of a real signal has no well-defined phase
        // under continuous translation; exclude it from the comparison (it is
        // below the resolution tail for any honestly resolved field anyway)
        w[k] = (m % 2 == 0 && k == m / 2)
                   ? 0.0
                   : L * std::pow(1.0 + static_cast<double>(kk) * kk, s);
        A += w[k] * std::norm(uhat[k]);
        B += w[k] * std::norm(phat[k]);
        cross[k] = w[k] * uhat[k] * std::conj(phat[k]);
    }
    // Direct mode-wise subtraction: free of the catastrophic cancellation
    // that floors A + B - 2 Re C(r) near sqrt(A * machine epsilon).
    auto d2 = [&](double r) {
        double v = 0.0;
        for (int k = 0; k < m; ++k) {
            const int kk = wavenumber(k, m);
            const cd diff = uhat[k] - phat[k] * std::exp(cd(0.0, 2.0 * kPi * kk * r / L));
            v += w[k] * std::norm(diff);
        }
        return v;
    };

    // C on the uniform fine r-grid r_i = L i / nr is a plain DFT of cross
    const int nr = std::max(256, 4 * m);
    const std::vector<cd> C_grid = fft(resample_spectrum(cross, nr));
    double best_r = 0.0, best = 1e300;
    for (int i = 0; i < nr; ++i) {
        const double v = A + B - 2.0 * static_cast<double>(nr) * C_grid[i].real();
        if (v < best) {
            best = v;
            best_r = L * i / nr;
        }
    }
    double a = best_r - L / nr, b = best_r + L / nr;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = d2(x1), f2 = d2(x2);
    while (b - a > 1e-12 * L) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = d2(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = d2(x2);
        }
    }
    const double r_min = 0.5 * (a + b);
    return {std::sqrt(d2(r_min)), r_min};
}

EvolutionTrace evolve(const Model& model, const std::vector<double>& u0, const WaveProfile& wave,
                      double T, double dt, int record_every) {
    const int m = static_cast<int>(u0.size());
    const double L = wave.L;
    if (dt <= 0.0) dt = L * L / (4.0 * m * m);
    const long steps = std::lround(std::ceil(T / dt));
    dt = T / static_cast<double>(steps);
    const EtdCoeffs co = etd_coefficients(m, L, dt);

    SpectralState state = SpectralState::from_physical(u0, L);
    EvolutionTrace trace;
    auto record = [&]() {
        const std::vector<double> u = state.to_physical();
        const auto [d, r] = orbital_distance(u, wave, 2.0);
        trace.t.push_back(state.t);
        trace.l2.push_back(sobolev_norm(state.u_hat, L, 0.0));
        trace.h2.push_back(sobolev_norm(state.u_hat, L, 2.0));
        trace.distance.push_back(d);
        trace.argmin_shift.push_back(r);
    };
    record();
    for (long n = 1; n <= steps; ++n) {
        try {
            state = step_with(model, state, wave.c, co, dt);
        } catch (const NonFinite&) {
            trace.blew_up = true;
            break;
        }
        if (n % record_every == 0 || n == steps) record();
    }
    return trace;
}

std::vector<double> eigenfunction_direction(const Model& model, const WaveProfile& wave,
                                            const InstabilityCertificate& cert) {
    const BlochCoefficients coeffs = bloch_coefficients(model, wave);
    const int n = choose_truncation(coeffs);
    const int dim = 2 * n + 1;
    const std::vector<cd> A = hill_matrix(coeffs, cert.theta_star, n);
    Eigen::MatrixXcd M(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) M(r, c) = A[static_cast<size_t>(r) * dim + c];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, true);
    if (es.info() != Eigen::Success) throw NoConvergence("dense eigensolver failed");
    int lead = 0;
    for (int i = 1; i < dim; ++i)
        if (es.eigenvalues()[i].real() > es.eigenvalues()[lead].real()) lead = i;
    const Eigen::VectorXcd w = es.eigenvectors().col(lead);

    const int m = wave.grid_size();
    std::vector<double> psi(static_cast<size_t>(m), 0.0);
    for (int j = 0; j < m; ++j) {
        const double x = wave.L * j / m;
        cd val(0, 0);
        for (int kk = -n; kk <= n; ++kk)
            val += w[kk + n] * std::exp(cd(0.0, (2.0 * kPi * kk + cert.theta_star) * x / wave.L));
        psi[static_cast<size_t>(j)] = val.real();
    }
    const double nrm = sobolev_norm(fft_real(psi), wave.L, 2.0);
    if (nrm <= 0.0) throw NonFinite("eigenfunction direction has zero norm");
    for (double& v : psi) v /= nrm;
    return psi;
}

namespace {

double window_slope(const std::vector<double>& t, const std::vector<double>& d, double lo,
                    double hi) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < t.size(); ++i)
        if (d[i] >= lo && d[i] <= hi && d[i] > 0.0) {
            xs.push_back(t[i]);
            ys.push_back(std::log(d[i]));
        }
    if (xs.size() < 5 || xs.back() - xs.front() <= 0.0)
        throw WindowTooShort("growth window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "] holds fewer than 5 samples");
    const size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ExperimentReport instability_experiment(const Model& model, const WaveProfile& wave,
                                        const InstabilityCertificate& cert,
                                        const std::vector<double>& deltas, double T, double dt) {
    if (!cert.unstable) throw NotUnstable("instability_experiment: certificate is not unstable");

    // evolve on the coarsest grid that still resolves the wave: the profile
    // grid is sized for 1e-12 tails, far finer than the time loop needs
    WaveProfile ewave = wave;
    for (int me = 128; me < wave.grid_size(); me *= 2) {
        std::vector<double> phi_c = trig_resample(wave.phi, me);
        if (spectral_tail(fft_real(phi_c)) <= 1e-9) {
            ewave.phi = std::move(phi_c);
            ewave.dphi = trig_resample(wave.dphi, me);
            break;
        }
    }

    const std::vector<double> psi = eigenfunction_direction(model, ewave, cert);
    const double amp = ewave.amplitude();

    ExperimentReport rep;
    rep.deltas = deltas;
    rep.re_lambda = cert.lambda.real();
    rep.escape_threshold = 0.01 * amp;
    rep.rho_fit.assign(deltas.size(), 0.0);
    rep.escape_time.assign(deltas.size(), -1.0);
    rep.traces.resize(deltas.size());

    std::atomic<size_t> cursor{0};
    std::vector<std::string> window_errors(deltas.size());
    auto work = [&] {
        for (size_t i = cursor.fetch_add(1); i < deltas.size(); i = cursor.fetch_add(1)) {
            const double delta = deltas[i];
            std::vector<double> u0 = ewave.phi;
            for (size_t j = 0; j < u0.size(); ++j) u0[j] += delta * psi[j];
            rep.traces[i] = evolve(model, u0, ewave, T, dt, /*record_every=*/4);
            const EvolutionTrace& tr = rep.traces[i];
            if (delta <= 0.0) continue;  // control run: no fit
            for (size_t j = 0; j < tr.t.size(); ++j)
                if (tr.distance[j] >= rep.escape_threshold) {
                    rep.escape_time[i] = tr.t[j];
                    break;
                }
            try {
                rep.rho_fit[i] = window_slope(tr.t, tr.distance, 10.0 * delta, 0.01 * amp);
            } catch (const WindowTooShort& e) {
                window_errors[i] = e.what();
            }
        }
    };
    const int workers = std::min<size_t>(env_thread_count(), deltas.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (size_t i = 0; i < deltas.size(); ++i)
        if (!window_errors[i].empty()) throw WindowTooShort(window_errors[i]);

    double smallest = 1e300;
    for (size_t i = 0; i < deltas.size(); ++i)
        if (deltas[i] > 0.0 && deltas[i] < smallest) {
            smallest = deltas[i];
            rep.ratio = rep.rho_fit[i] / rep.re_lambda;
        }
    return rep;
}

std::string ExperimentReport::to_json() const {
    nlohmann::json j;
    j["deltas"] = deltas;
    j["rho_fit"] = rho_fit;
    j["escape_times"] = escape_time;
    j["re_lambda"] = re_lambda;
    j["ratio"] = ratio;
    j["escape_threshold"] = escape_threshold;
    return j.dump(2);
}

}  // namespace vbl

#ifndef VBL_EVOLUTION_HPP
#define VBL_EVOLUTION_HPP

#include <complex>
#include <string>
#include <vector>

#include "vbl/model.hpp"
#include "vbl/profile.hpp"
#include "vbl/spectrum.hpp"

namespace vbl {

/// Fourier-side state of a real L-periodic field, with the 2/3-rule
/// dealiasing mask applied (masked modes are exactly zero).
struct SpectralState {
    std::vector<cd> u_hat;  // normalized DFT, FFT layout
    double L = 0.0;
    double t = 0.0;

    int grid_size() const { return static_cast<int>(u_hat.size()); }
    std::vector<double> to_physical() const;
    static SpectralState from_physical(const std::vector<double>& u, double L, double t = 0.0);
};

/// One ETDRK4 step of u_t = u_xx + F(u, u_x), F = g(u) + (c - f'(u)) u_x,
/// diffusion handled exactly through the exponential, phi-functions by
/// 32-point contour averaging. Throws NonFinite on NaN/Inf coefficients.
SpectralState step_etd(const Model& model, const SpectralState& state, double c, double dt);

struct EvolutionTrace {
    std::vector<double> t;
    std::vector<double> l2;
    std::vector<double> h2;
    std::vector<double> distance;      // orbital distance to the reference wave
    std::vector<double> argmin_shift;
    bool blew_up = false;              // trace is partial past the last finite step

    void save(const std::string& csv_path) const;
};

/// Evolve u0 in the co-moving frame, recording norms and the orbital
/// distance to `wave` every record_every steps. Blow-up truncates the trace
/// and sets blew_up instead of throwing.
EvolutionTrace evolve(const Model& model, const std::vector<double>& u0, const WaveProfile& wave,
                      double T, double dt = 0.0, int record_every = 1);

/// Shift-minimized Sobolev distance min_r ||u - phi(. + r)||_s, by Fourier
/// shifts on a fine r grid then golden-section to 1e-10 * L.
std::pair<double, double> orbital_distance(const std::vector<double>& u, const WaveProfile& wave,
                                           double s = 2.0);

struct ExperimentReport {
    std::vector<double> deltas;
    std::vector<double> rho_fit;       // per-delta growth rate on the linear window
    std::vector<double> escape_time;   // first t with d >= escape threshold
    double re_lambda = 0.0;
    double ratio = 0.0;                // rho_fit / re_lambda at the smallest delta
    double escape_threshold = 0.0;
    std::vector<EvolutionTrace> traces;

    std::string to_json() const;
};

/// Perturb phi along the certified eigenfunction direction Psi (real part,
/// H^2-normalized) at each size delta, evolve to time T, and fit the growth
/// rate of log d(t) on the window 10*delta <= d <= 0.01 * amplitude(phi).
ExperimentReport instability_experiment(const Model& model, const WaveProfile& wave,
                                        const InstabilityCertificate& cert,
                                        const std::vector<double>& deltas, double T,
                                        double dt = 0.0);

/// Real part of the certified Bloch eigenfunction at theta = theta_star,
/// sampled on the wave grid and normalized in H^2.
std::vector<double> eigenfunction_direction(const Model& model, const WaveProfile& wave,
                                            const InstabilityCertificate& cert);

}  // namespace vbl

#endif

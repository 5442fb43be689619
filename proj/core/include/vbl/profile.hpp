#ifndef VBL_PROFILE_HPP
#define VBL_PROFILE_HPP

#include <string>
#include <vector>

#include "vbl/model.hpp"
#include "vbl/ode.hpp"

namespace vbl {

enum class WaveFamily { Hopf, LargePeriod, PulseTruncation };

std::string to_string(WaveFamily f);

/// One periodic traveling wave, sampled on a uniform grid over a single
/// fundamental period. The phase is fixed by the Poincare-section
/// convention: x = 0 sits at the minimum of phi (v = 0, decreasing-to-
/// increasing crossing).
struct WaveProfile {
    std::vector<double> phi;   // M samples on [0, L)
    std::vector<double> dphi;  // phi'
    double L = 0.0;
    double c = 0.0;
    double epsilon = 0.0;
    WaveFamily family = WaveFamily::Hopf;

    int grid_size() const { return static_cast<int>(phi.size()); }
    double amplitude() const;  // (max phi - min phi) / 2

    /// Max profile-ODE residual |phi'' + (c - f'(phi)) phi' + g(phi)| on the
    /// grid, phi'' by trigonometric differentiation.
    double ode_residual(const Model& model) const;
};

/// The homoclinic pulse on the truncated line [-X, X].
struct PulseSolution {
    std::vector<double> x;  // uniform, symmetric about 0
    std::vector<double> phi;
    std::vector<double> dphi;
    double c1 = 0.0;
    double kappa = 0.0;        // analytic saddle decay rate min(|mu_s|, mu_u)
    double kappa_fit = 0.0;    // tail regression cross-check
    double mu_stable = 0.0;    // saddle eigenvalues at (1, 0)
    double mu_unstable = 0.0;

    double half_width() const { return x.empty() ? 0.0 : x.back(); }
    double phi_min() const;
};

/// Profile ODE as a phase-plane system: phi' = v, v' = (f'(phi) - c) v - g(phi).
Rhs2 profile_rhs(const Model& model, double c);

Trajectory integrate_phase_plane(const Model& model, double c, State2 initial,
                                 double t0, double t1, const OdeOptions& opts = {});

struct OrbitOptions {
    int max_newton = 50;
    double section_tol = 1e-11;  // |return - start|
    double tail_tol = 1e-12;     // Fourier tail criterion for M
    int max_grid = 1 << 14;
    bool scan_fallback = true;   // bracket-scan the section when Newton stalls
};

/// Closed orbit through the Poincare section v = 0 (upward crossing) near
/// seed_phi, located by Newton on the scalar return map and resampled
/// uniformly over one fundamental period.
WaveProfile find_periodic_orbit(const Model& model, double c, double seed_phi,
                                const OrbitOptions& opts = {});

/// Periodic orbit hugging a homoclinic loop, located by two-sided shooting
/// from its near-saddle top section point. Robust where the one-period
/// return map of find_periodic_orbit loses all precision.
WaveProfile find_orbit_near_saddle(const Model& model, double c, const OrbitOptions& opts = {});

/// Small-amplitude family at c(eps) = c0 + sign(a0_bar)*eps. epsilons must lie
/// in (0, eps0); members are computed in ascending-eps order with warm starts.
std::vector<WaveProfile> continue_hopf_family(const Model& model,
                                              std::vector<double> epsilons,
                                              double eps0 = 0.05,
                                              const OrbitOptions& opts = {});

struct PulseOptions {
    double manifold_offset = 1e-8;  // start distance along the eigendirection
    double match_tol = 1e-11;       // |Delta(c)| at the matching section
    double bracket_width = 0.15;    // scan c1 +- this for a sign change
    int grid_size = 4096;
};

/// Homoclinic pulse by two-sided shooting from the saddle (1, 0), the speed
/// adjusted by secant iteration on the mismatch at the section v = 0.
PulseSolution compute_pulse(const Model& model, const PulseOptions& opts = {});

struct LargePeriodResult {
    std::vector<WaveProfile> waves;
    std::vector<double> sup_distance_to_pulse;  // after shift alignment
    double log_fit_slope = 0.0;                 // slope of L_eps vs |log eps|
};

/// Large-period family at c(eps) = c1 +- eps (side per sign of f'(1) - c1),
/// seeded inside the homoclinic loop, eps walked downward.
LargePeriodResult continue_large_period_family(const Model& model, const PulseSolution& pulse,
                                               std::vector<double> epsilons,
                                               double eps1 = 0.05,
                                               const OrbitOptions& opts = {});

/// Uniform resampling of one exact period of a closed orbit, M doubled until
/// the Fourier tail of phi is below tail_tol (relative), capped at max_grid.
WaveProfile resample_uniform(const Trajectory& orbit, double t_start, double L,
                             double tail_tol = 1e-12, int max_grid = 1 << 14,
                             int min_grid = 16);

// --- serialization (CSV columns x, phi, dphi at 17 significant digits) ---
void save_wave(const WaveProfile& w, const std::string& csv_path, const std::string& json_path);
WaveProfile load_wave(const std::string& json_path);
void save_pulse(const PulseSolution& p, const std::string& csv_path, const std::string& json_path);
PulseSolution load_pulse(const std::string& json_path);

}  // namespace vbl

#endif

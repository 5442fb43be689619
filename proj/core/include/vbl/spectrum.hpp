#ifndef VBL_SPECTRUM_HPP
#define VBL_SPECTRUM_HPP

#include <complex>
#include <string>
#include <vector>

#include "vbl/model.hpp"
#include "vbl/profile.hpp"

namespace vbl {

using cd = std::complex<double>;

/// Linearization about a periodic wave in the co-moving frame, written as
///   L_theta = (d/dx + i*theta/L)^2 + a1(x) (d/dx + i*theta/L) + a0(x)
/// with a1 = c - f'(phi) and a0 = g'(phi) - d/dx f'(phi).
struct BlochCoefficients {
    std::vector<cd> a0_hat;  // Fourier coefficients, FFT layout, length M
    std::vector<cd> a1_hat;
    double L = 0.0;
};

BlochCoefficients bloch_coefficients(const Model& model, const WaveProfile& wave);

/// Dense Galerkin (Hill) truncation of L_theta onto e^{2 pi i j x / L},
/// |j| <= n: a (2n+1) x (2n+1) complex matrix, rows/cols indexed j = -n..n.
std::vector<cd> hill_matrix(const BlochCoefficients& coeffs, double theta, int n);

/// Smallest n such that the coefficient tails beyond n are below tail_tol
/// (relative), floored at n_min. Throws ResolutionExceeded past n_cap.
int choose_truncation(const BlochCoefficients& coeffs, double tail_tol = 1e-10,
                      int n_min = 24, int n_cap = 2048);

struct BlochEigenvalues {
    double theta = 0.0;
    int truncation = 0;            // n used for the reported values
    bool converged = false;        // doubling n moved the leaders < tol
    std::vector<cd> lambda;        // sorted by descending real part
    std::vector<int> branch;       // curve id after cross-theta matching
};

/// Point spectrum of L_theta by dense eigensolve of the Hill truncation,
/// n doubled until the num_track leading eigenvalues move less than tol.
BlochEigenvalues bloch_eigenvalues(const BlochCoefficients& coeffs, double theta,
                                   int num_track = 6, double tol = 1e-9,
                                   int n_cap = 2048);

struct ThetaSweep {
    std::vector<BlochEigenvalues> slices;    // one per theta
    double max_growth_rate = 0.0;            // max over slices of Re lambda_1
    double theta_at_max = 0.0;
    bool all_converged = false;
};

/// Uniform Bloch sweep over theta in (-pi, pi], num_theta slices. Worker
/// count from the VBL_THREADS environment variable (default 1).
ThetaSweep sweep_theta(const BlochCoefficients& coeffs, int num_theta = 32,
                       int num_track = 6, double tol = 1e-9);

/// The k eigenvalues of L_theta nearest `target`, by shift-invert Arnoldi on
/// the Hill truncation at n and at 2n (dense LU factorizations). converged
/// reports whether each returned value moved < tol under the doubling. Built
/// for isolating-circle checks on long-period waves, where a full dense
/// eigensolve at the required truncation is prohibitively slow.
struct TargetedEigenvalues {
    std::vector<cd> lambda;     // sorted by distance to target
    std::vector<bool> converged;
};

TargetedEigenvalues bloch_eigenvalues_near(const BlochCoefficients& coeffs, double theta,
                                           cd target, int k = 5, int n = 0,
                                           double tol = 1e-7);

struct InstabilityCertificate {
    bool unstable = false;
    cd lambda;                 // leading eigenvalue at theta_star
    double theta_star = 0.0;
    double residual = 0.0;     // collocation residual of the eigenpair
    double margin = 0.0;       // Re lambda / residual
    std::string note;
};

/// Certify Re lambda > 0 at a single theta: recompute the leading eigenpair,
/// evaluate the collocation residual ||L_theta w - lambda w|| / ||w|| on a
/// fine grid, and require Re lambda >= margin_factor * residual.
InstabilityCertificate certify_instability(const Model& model, const WaveProfile& wave,
                                           double theta, double margin_factor = 10.0);

struct PulseSpectrumOptions {
    int grid_size = 1201;           // odd, so x = 0 is a node
    double contamination_tol = 1e-4;
    int num_eigenvalues = 6;
};

struct PulseSpectrum {
    std::vector<double> lambda;       // real point eigenvalues above the
                                      // essential-spectrum edge, descending
    std::vector<int> sign_changes;    // of the matching eigenfunctions
    double lambda_max = 0.0;          // Richardson-extrapolated leader
    double essential_edge = 0.0;      // g'(1)
    double half_width = 0.0;          // domain [-X, X]
};

/// Point spectrum of the linearization about the pulse on [-X, X]: the
/// operator is brought to Liouville normal form (symmetric tridiagonal
/// finite differences), Dirichlet ends, real eigenvalues above g'(1) kept.
/// Richardson in the grid; the domain is inflated to 1.5 X and
/// BoundaryContamination is thrown if the leader moves more than
/// contamination_tol.
PulseSpectrum pulse_spectrum(const Model& model, const PulseSolution& pulse,
                             const PulseSpectrumOptions& opts = {});

/// CSV rows (theta, Re lambda, Im lambda) for every tracked eigenvalue.
void save_sweep(const ThetaSweep& sweep, const std::string& csv_path);

}  // namespace vbl

#endif

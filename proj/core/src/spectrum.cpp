#include "vbl/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "vbl/errors.hpp"
#include "vbl/fourier.hpp"
#include "vbl/io.hpp"

namespace vbl {

namespace {

constexpr double kPi = 3.14159265358979323846;

int env_thread_count() {
    const char* s = std::getenv("VBL_THREADS");
    if (!s) return 1;
    const int n = std::atoi(s);
    return n > 0 ? n : 1;
}

cd coeff(const std::vector<cd>& hat, int k) {
    const int m = static_cast<int>(hat.size());
    if (k < 0) k += m;
    if (k < 0 || k >= m) return {0.0, 0.0};
    return hat[static_cast<size_t>(k)];
}

}  // namespace

BlochCoefficients bloch_coefficients(const Model& model, const WaveProfile& wave) {
    const int m = wave.grid_size();
    std::vector<double> a1(m), fp(m);
    for (int j = 0; j < m; ++j) {
        fp[j] = model.f(wave.phi[j], 1);
        a1[j] = wave.c - fp[j];
    }
    // a0 = g'(phi) - (f'(phi))_x = g'(phi) - f''(phi) phi', evaluated through
    // the chain rule on the stored phi' -- a spectral derivative would lift
    // the high-mode noise floor of ODE-sampled profiles by a factor k
    std::vector<double> a0(m);
    for (int j = 0; j < m; ++j)
        a0[j] = model.g(wave.phi[j], 1) - model.f(wave.phi[j], 2) * wave.dphi[j];

    BlochCoefficients c;
    c.a0_hat = fft_real(a0);
    c.a1_hat = fft_real(a1);
    c.L = wave.L;
    return c;
}

int choose_truncation(const BlochCoefficients& coeffs, double tail_tol, int n_min, int n_cap) {
    const int m = static_cast<int>(coeffs.a0_hat.size());
    double scale = 0.0;
    for (int k = 0; k < m; ++k)
        scale = std::max(scale, std::max(std::abs(coeffs.a0_hat[k]), std::abs(coeffs.a1_hat[k])));
    if (scale == 0.0) return n_min;
    for (int n = n_min; n <= n_cap; n *= 2) {
        double tail = 0.0;
        for (int k = n / 2; k <= m / 2; ++k) {
            tail = std::max(tail, std::abs(coeff(coeffs.a0_hat, k)));
            tail = std::max(tail, std::abs(coeff(coeffs.a0_hat, -k)));
            tail = std::max(tail, std::abs(coeff(coeffs.a1_hat, k)));
            tail = std::max(tail, std::abs(coeff(coeffs.a1_hat, -k)));
        }
        if (tail / scale <= tail_tol) return n;
    }
    throw ResolutionExceeded("choose_truncation: coefficient tail above tolerance at n = " +
                             std::to_string(n_cap));
}

std::vector<cd> hill_matrix(const BlochCoefficients& coeffs, double theta, int n) {
    const int dim = 2 * n + 1;
    std::vector<cd> A(static_cast<size_t>(dim) * dim, cd(0.0, 0.0));
    for (int row = 0; row < dim; ++row) {
        const int k = row - n;
        for (int col = 0; col < dim; ++col) {
            const int j = col - n;
            const cd xi(0.0, (2.0 * kPi * j + theta) / coeffs.L);
            cd v = coeff(coeffs.a1_hat, k - j) * xi + coeff(coeffs.a0_hat, k - j);
            if (k == j) v += xi * xi;
            A[static_cast<size_t>(row) * dim + col] = v;
        }
    }
    return A;
}

namespace {

std::vector<cd> dense_eigenvalues(const std::vector<cd>& A, int dim) {
    Eigen::MatrixXcd M(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) M(r, c) = A[static_cast<size_t>(r) * dim + c];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NoConvergence("dense eigensolver failed");
    std::vector<cd> out(es.eigenvalues().data(), es.eigenvalues().data() + dim);
    std::sort(out.begin(), out.end(),
              [](const cd& a, const cd& b) { return a.real() > b.real(); });
    return out;
}

double leader_distance(const std::vector<cd>& a, const std::vector<cd>& b, int num) {
    double worst = 0.0;
    for (int i = 0; i < num; ++i) {
        // nearest-neighbor match: truncation changes can reorder ties
        double best = 1e300;
        for (int j = 0; j < num + 4 && j < static_cast<int>(b.size()); ++j)
            best = std::min(best, std::abs(a[static_cast<size_t>(i)] - b[static_cast<size_t>(j)]));
        worst = std::max(worst, best);
    }
    return worst;
}

// Ritz values nearest `target` from shift-invert Arnoldi with a dense LU of
// (A - target I). krylov is the Krylov dimension.
std::vector<cd> shift_invert_ritz(const std::vector<cd>& flat, int dim, cd target, int k,
                                  int krylov) {
    Eigen::MatrixXcd A(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) A(r, c) = flat[static_cast<size_t>(r) * dim + c];
    for (int i = 0; i < dim; ++i) A(i, i) -= target;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);

    const int m = std::min(krylov, dim);
    Eigen::MatrixXcd V(dim, m + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(m + 1, m);
    // deterministic start vector
    for (int i = 0; i < dim; ++i) V(i, 0) = cd(std::cos(0.7 * i + 0.3), std::sin(1.1 * i));
    V.col(0) /= V.col(0).norm();
    int steps = m;
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd w = lu.solve(V.col(j));
        for (int pass = 0; pass < 2; ++pass)  // MGS with one re-orthogonalization
            for (int i = 0; i <= j; ++i) {
                const cd h = V.col(i).adjoint() * w;
                H(i, j) += h;
                w -= h * V.col(i);
            }
        const double nw = w.norm();
        H(j + 1, j) = nw;
        if (nw < 1e-13) {
            steps = j + 1;
            break;
        }
        V.col(j + 1) = w / nw;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H.topLeftCorner(steps, steps), false);
    std::vector<cd> out;
    for (int i = 0; i < steps; ++i) {
        const cd mu = es.eigenvalues()[i];
        if (std::abs(mu) < 1e-14) continue;
        out.push_back(target + 1.0 / mu);
    }
    std::sort(out.begin(), out.end(),
              [&](cd a, cd b) { return std::abs(a - target) < std::abs(b - target); });
    if (static_cast<int>(out.size()) > k) out.resize(static_cast<size_t>(k));
    return out;
}

}  // namespace

TargetedEigenvalues bloch_eigenvalues_near(const BlochCoefficients& coeffs, double theta,
                                           cd target, int k, int n, double tol) {
    if (n <= 0) n = choose_truncation(coeffs);
    // offset the shift slightly so exact eigenvalue hits stay factorizable
    const cd shift = target + cd(3e-9, 1e-9);
    const int krylov = std::max(24, 4 * k);
    auto coarse = shift_invert_ritz(hill_matrix(coeffs, theta, n), 2 * n + 1, shift, k, krylov);
    auto fine =
        shift_invert_ritz(hill_matrix(coeffs, theta, 2 * n), 4 * n + 1, shift, k, krylov);

    TargetedEigenvalues out;
    for (const cd& lf : fine) {
        double best = 1e300;
        for (const cd& lc : coarse) best = std::min(best, std::abs(lf - lc));
        out.lambda.push_back(lf);
        out.converged.push_back(best < tol * (1.0 + std::abs(lf)));
    }
    return out;
}

BlochEigenvalues bloch_eigenvalues(const BlochCoefficients& coeffs, double theta, int num_track,
                                   double tol, int n_cap) {
    BlochEigenvalues out;
    out.theta = theta;
    int n = choose_truncation(coeffs, 1e-10, 24, n_cap);
    std::vector<cd> prev = dense_eigenvalues(hill_matrix(coeffs, theta, n), 2 * n + 1);
    while (2 * n <= n_cap) {
        const int n2 = 2 * n;
        std::vector<cd> next = dense_eigenvalues(hill_matrix(coeffs, theta, n2), 2 * n2 + 1);
        const double moved = leader_distance(prev, next, num_track);
        prev = std::move(next);
        n = n2;
        if (moved <= tol) {
            out.converged = true;
            break;
        }
    }
    out.truncation = n;
    prev.resize(std::min<size_t>(prev.size(), static_cast<size_t>(num_track)));
    out.lambda = std::move(prev);
    return out;
}

ThetaSweep sweep_theta(const BlochCoefficients& coeffs, int num_theta, int num_track,
                       double tol) {
    ThetaSweep sweep;
    sweep.slices.resize(static_cast<size_t>(num_theta));
    std::atomic<int> cursor{0};
    auto work = [&] {
        for (int i = cursor.fetch_add(1); i < num_theta; i = cursor.fetch_add(1)) {
            // theta in (-pi, pi], endpoint included
            const double theta = -kPi + 2.0 * kPi * (i + 1) / num_theta;
            sweep.slices[static_cast<size_t>(i)] =
                bloch_eigenvalues(coeffs, theta, num_track, tol);
        }
    };
    const int workers = std::min(env_thread_count(), num_theta);
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // branch ids by nearest-neighbor continuation with velocity extrapolation
    for (size_t i = 0; i < sweep.slices.size(); ++i) {
        auto& s = sweep.slices[i];
        const size_t nl = s.lambda.size();
        s.branch.assign(nl, -1);
        if (i == 0) {
            for (size_t j = 0; j < nl; ++j) s.branch[j] = static_cast<int>(j);
            continue;
        }
        const auto& prev = sweep.slices[i - 1];
        std::vector<bool> taken(nl, false);
        for (size_t p = 0; p < prev.lambda.size(); ++p) {
            cd predicted = prev.lambda[p];
            if (i >= 2) {
                const auto& pp = sweep.slices[i - 2];
                for (size_t q = 0; q < pp.branch.size(); ++q)
                    if (pp.branch[q] == prev.branch[p]) {
                        predicted += prev.lambda[p] - pp.lambda[q];
                        break;
                    }
            }
            int best = -1;
            double bd = 1e300;
            for (size_t j = 0; j < nl; ++j) {
                if (taken[j]) continue;
                const double d = std::abs(s.lambda[j] - predicted);
                if (d < bd) {
                    bd = d;
                    best = static_cast<int>(j);
                }
            }
            if (best >= 0) {
                s.branch[static_cast<size_t>(best)] = prev.branch[p];
                taken[static_cast<size_t>(best)] = true;
            }
        }
        int next_id = num_track;
        for (size_t j = 0; j < nl; ++j)
            if (s.branch[j] < 0) s.branch[j] = next_id++;
    }

    sweep.all_converged = true;
    sweep.max_growth_rate = -1e300;
    for (const auto& s : sweep.slices) {
        sweep.all_converged = sweep.all_converged && s.converged;
        if (!s.lambda.empty() && s.lambda[0].real() > sweep.max_growth_rate) {
            sweep.max_growth_rate = s.lambda[0].real();
            sweep.theta_at_max = s.theta;
        }
    }
    return sweep;
}

InstabilityCertificate certify_instability(const Model& model, const WaveProfile& wave,
                                           double theta, double margin_factor) {
    const BlochCoefficients coeffs = bloch_coefficients(model, wave);
    const int n = std::max(choose_truncation(coeffs), wave.grid_size() / 4);
    const int dim = 2 * n + 1;
    const std::vector<cd> A = hill_matrix(coeffs, theta, n);
    Eigen::MatrixXcd M(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) M(r, c) = A[static_cast<size_t>(r) * dim + c];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success) throw NoConvergence("dense eigensolver failed");

    int lead = 0;
    for (int i = 1; i < dim; ++i)
        if (es.eigenvalues()[i].real() > es.eigenvalues()[lead].real()) lead = i;
    const cd lambda = es.eigenvalues()[lead];
    const Eigen::VectorXcd w = es.eigenvectors().col(lead);

    // collocation residual on a fine grid, 4x the modal resolution
    const int m = 4 * dim;
    std::vector<cd> wx(static_cast<size_t>(m), cd(0, 0));
    std::vector<cd> wdx(wx), wdd(wx);
    std::vector<double> xs(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) xs[static_cast<size_t>(j)] = coeffs.L * j / m;
    for (int kk = -n; kk <= n; ++kk) {
        const cd xi(0.0, (2.0 * kPi * kk + theta) / coeffs.L);
        const cd amp = w[kk + n];
        for (int j = 0; j < m; ++j) {
            const cd e = std::exp(xi * xs[static_cast<size_t>(j)]);
            wx[static_cast<size_t>(j)] += amp * e;
            wdx[static_cast<size_t>(j)] += amp * xi * e;
            wdd[static_cast<size_t>(j)] += amp * xi * xi * e;
        }
    }
    // physical-space coefficients on the fine grid
    const int mw = wave.grid_size();
    const std::vector<cd> phi_hat = fft_real(wave.phi);
    std::vector<double> fp(static_cast<size_t>(mw));
    for (int j = 0; j < mw; ++j) fp[static_cast<size_t>(j)] = model.f(wave.phi[j], 1);
    const std::vector<cd> fp_hat = fft_real(fp);
    const std::vector<double> phi_fine = ifft_real(resample_spectrum(phi_hat, m));
    const std::vector<double> fpx_fine =
        ifft_real(resample_spectrum(spectral_derivative(fp_hat, wave.L, 1), m));

    double num = 0.0, den = 0.0;
    for (int j = 0; j < m; ++j) {
        const double a1 = wave.c - model.f(phi_fine[static_cast<size_t>(j)], 1);
        const double a0 =
            model.g(phi_fine[static_cast<size_t>(j)], 1) - fpx_fine[static_cast<size_t>(j)];
        const cd r = wdd[static_cast<size_t>(j)] + a1 * wdx[static_cast<size_t>(j)] +
                     a0 * wx[static_cast<size_t>(j)] - lambda * wx[static_cast<size_t>(j)];
        num += std::norm(r);
        den += std::norm(wx[static_cast<size_t>(j)]);
    }
    InstabilityCertificate cert;
    cert.lambda = lambda;
    cert.theta_star = theta;
    cert.residual = std::sqrt(num / den);
    cert.margin = cert.residual > 0.0 ? lambda.real() / cert.residual : 1e300;
    cert.unstable = lambda.real() > 0.0 && lambda.real() >= margin_factor * cert.residual &&
                    cert.residual <= 1e-7;
    if (!cert.unstable)
        cert.note = lambda.real() <= 0.0 ? "leading eigenvalue not in the right half-plane"
                                         : "eigenpair residual too large for certification";
    return cert;
}

namespace {

struct PulseEigs {
    std::vector<double> lambda;       // descending, above the essential edge
    std::vector<int> sign_changes;
};

// Linearization about the pulse on [-X, X] with Dirichlet ends. The operator
// d^2/dx^2 + a1 d/dx + a0 is brought to Liouville normal form
// d^2/dx^2 + q with q = a0 - a1^2/4 - a1'/2 via w = e^{int a1/2} u; the
// similarity preserves eigenvalues and eigenfunction sign changes (the
// weight is positive), and the normal form is a real symmetric tridiagonal
// problem solvable in O(m^2) instead of a dense nonsymmetric one.
PulseEigs pulse_eigs_on_grid(const Model& model, const PulseSolution& pulse, double X, int m,
                             int want, bool with_vectors = true) {
    const double h = 2.0 * X / (m - 1);
    const int dim = m - 2;  // interior unknowns j = 1..m-2

    // pulse values interpolated onto the (possibly inflated) grid; beyond the
    // computed pulse support the profile is the saddle state (1, 0)
    auto phi_at = [&](double x) -> std::array<double, 2> {
        const double W = pulse.half_width();
        if (std::abs(x) >= W) return {1.0, 0.0};
        const double s = (x + W) / (2.0 * W) * (pulse.x.size() - 1);
        const size_t i = std::min(pulse.x.size() - 2, static_cast<size_t>(s));
        const double t = s - static_cast<double>(i);
        return {(1.0 - t) * pulse.phi[i] + t * pulse.phi[i + 1],
                (1.0 - t) * pulse.dphi[i] + t * pulse.dphi[i + 1]};
    };

    Eigen::VectorXd diag(dim), sub(dim - 1);
    for (int j = 1; j <= m - 2; ++j) {
        const double x = -X + h * j;
        const auto [ph, dph] = phi_at(x);
        const double a1 = pulse.c1 - model.f(ph, 1);
        const double a0 = model.g(ph, 1) - model.f(ph, 2) * dph;
        const double a1p = -model.f(ph, 2) * dph;  // (c - f'(phi))' along x
        const double q = a0 - 0.25 * a1 * a1 - 0.5 * a1p;
        diag[j - 1] = -2.0 / (h * h) + q;
        if (j <= m - 3) sub[j - 1] = 1.0 / (h * h);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub,
                              with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NoConvergence("pulse eigensolver failed");

    const double edge = model.g(1.0, 1);
    PulseEigs out;
    for (int i = dim - 1; i >= 0 && static_cast<int>(out.lambda.size()) < want; --i) {
        const double lam = es.eigenvalues()[i];  // ascending order
        if (lam <= edge + 1e-10) break;
        out.lambda.push_back(lam);
        if (!with_vectors) {
            out.sign_changes.push_back(-1);
            continue;
        }
        const Eigen::VectorXd v = es.eigenvectors().col(i);
        const double vmax = v.cwiseAbs().maxCoeff();
        int changes = 0;
        double prev = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double vk = v[k];
            if (std::abs(vk) < 1e-6 * vmax) continue;
            if (prev != 0.0 && (vk < 0.0) != (prev < 0.0)) ++changes;
            prev = vk;
        }
        out.sign_changes.push_back(changes);
    }
    return out;
}

}  // namespace

PulseSpectrum pulse_spectrum(const Model& model, const PulseSolution& pulse,
                             const PulseSpectrumOptions& opts) {
    const double X = pulse.half_width();
    const int m = opts.grid_size | 1;  // odd

    const PulseEigs coarse = pulse_eigs_on_grid(model, pulse, X, m, opts.num_eigenvalues);
    const PulseEigs fine =
        pulse_eigs_on_grid(model, pulse, X, 2 * m - 1, opts.num_eigenvalues, /*with_vectors=*/false);
    if (coarse.lambda.empty() || fine.lambda.empty())
        throw NotUnstable("pulse spectrum: no point eigenvalue above the essential edge");

    // centered 2nd-order scheme; Richardson with p = 2
    const double lam_h = coarse.lambda[0];
    const double lam_h2 = fine.lambda[0];
    const double lam_rich = lam_h2 + (lam_h2 - lam_h) / 3.0;

    // boundary-contamination guard: inflate the domain and re-solve
    const PulseEigs inflated =
        pulse_eigs_on_grid(model, pulse, 1.5 * X, (3 * m / 2) | 1, opts.num_eigenvalues,
                           /*with_vectors=*/false);
    if (inflated.lambda.empty() || std::abs(inflated.lambda[0] - lam_h) > opts.contamination_tol)
        throw BoundaryContamination(
            "pulse spectrum: leading eigenvalue moved under domain inflation (" +
            std::to_string(inflated.lambda.empty() ? 0.0 : inflated.lambda[0]) + " vs " +
            std::to_string(lam_h) + ")");

    PulseSpectrum out;
    out.lambda = fine.lambda;
    out.sign_changes = coarse.sign_changes;  // vectors are computed on the coarse grid only
    out.lambda_max = lam_rich;
    out.essential_edge = model.g(1.0, 1);
    out.half_width = X;
    return out;
}

void save_sweep(const ThetaSweep& sweep, const std::string& csv_path) {
    std::vector<double> th, re, im, conv, br;
    for (const auto& s : sweep.slices)
        for (size_t j = 0; j < s.lambda.size(); ++j) {
            th.push_back(s.theta);
            re.push_back(s.lambda[j].real());
            im.push_back(s.lambda[j].imag());
            conv.push_back(s.converged ? 1.0 : 0.0);
            br.push_back(j < s.branch.size() ? s.branch[j] : -1.0);
        }
    write_csv(csv_path, {"theta", "re_lambda", "im_lambda", "converged_flag", "branch_id"},
              {th, re, im, conv, br});
}

}  // namespace vbl

#include "vbl/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace vbl {

namespace {

// FFTW's planner is not thread-safe; execution of a plan is, but we create a
// fresh plan per call (FFTW_ESTIMATE) under a lock. Transform sizes here are
// small enough that planning cost is irrelevant.
std::mutex g_fftw_mutex;

std::vector<cd> run_dft(const std::vector<cd>& in, int sign) {
    const int m = static_cast<int>(in.size());
    std::vector<cd> out(m);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        plan = fftw_plan_dft_1d(
            m,
            reinterpret_cast<fftw_complex*>(const_cast<cd*>(in.data())),
            reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(g_fftw_mutex);
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace

std::vector<cd> fft(const std::vector<cd>& u) {
    std::vector<cd> out = run_dft(u, FFTW_FORWARD);
    const double inv = 1.0 / static_cast<double>(u.size());
    for (cd& c : out) c *= inv;
    return out;
}

std::vector<cd> fft_real(const std::vector<double>& u) {
    std::vector<cd> cu(u.begin(), u.end());
    return fft(cu);
}

std::vector<cd> ifft(const std::vector<cd>& uhat) { return run_dft(uhat, FFTW_BACKWARD); }

std::vector<double> ifft_real(const std::vector<cd>& uhat) {
    std::vector<cd> cu = ifft(uhat);
    std::vector<double> out(cu.size());
    for (size_t i = 0; i < cu.size(); ++i) out[i] = cu[i].real();
    return out;
}

std::vector<cd> spectral_derivative(const std::vector<cd>& uhat, double L, int p) {
    const int m = static_cast<int>(uhat.size());
    std::vector<cd> out(m);
    for (int k = 0; k < m; ++k) {
        int kk = wavenumber(k, m);
        // the Nyquist mode has no well-defined odd derivative; zero it
        if (p % 2 == 1 && m % 2 == 0 && k == m / 2) kk = 0;
        const cd ik(0.0, 2.0 * M_PI * kk / L);
        out[k] = uhat[k] * std::pow(ik, p);
    }
    return out;
}

std::vector<cd> fourier_shift(const std::vector<cd>& uhat, double L, double r) {
    const int m = static_cast<int>(uhat.size());
    std::vector<cd> out(m);
    for (int k = 0; k < m; ++k) {
        const int kk = wavenumber(k, m);
        out[k] = uhat[k] * std::exp(cd(0.0, 2.0 * M_PI * kk * r / L));
    }
    return out;
}

double sobolev_norm(const std::vector<cd>& uhat, double L, double s) {
    const int m = static_cast<int>(uhat.size());
    double sum = 0.0;
    for (int k = 0; k < m; ++k) {
        const int kk = wavenumber(k, m);
        sum += std::pow(1.0 + static_cast<double>(kk) * kk, s) * std::norm(uhat[k]);
    }
    return std::sqrt(L * sum);
}

std::vector<cd> resample_spectrum(const std::vector<cd>& uhat, int m_out) {
    const int m = static_cast<int>(uhat.size());
    if (m_out == m) return uhat;
    std::vector<cd> out(m_out, cd(0.0, 0.0));
    const int half = std::min(m, m_out) / 2;
    for (int k = -half + 1; k < half; ++k) {
        const int src = k >= 0 ? k : k + m;
        const int dst = k >= 0 ? k : k + m_out;
        out[dst] = uhat[src];
    }
    return out;
}

std::vector<double> trig_resample(const std::vector<double>& u, int m_out) {
    const int m = static_cast<int>(u.size());
    if (m_out == m) return u;
    return ifft_real(resample_spectrum(fft_real(u), m_out));
}

double spectral_tail(const std::vector<cd>& uhat) {
    const int m = static_cast<int>(uhat.size());
    double top = 0.0, tail = 0.0;
    for (int k = 0; k < m; ++k) {
        const int kk = std::abs(wavenumber(k, m));
        top = std::max(top, std::abs(uhat[k]));
        if (kk >= m / 4) tail = std::max(tail, std::abs(uhat[k]));
    }
    return top > 0.0 ? tail / top : 0.0;
}

}  // namespace vbl

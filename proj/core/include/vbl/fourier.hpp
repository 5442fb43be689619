#ifndef VBL_FOURIER_HPP
#define VBL_FOURIER_HPP

#include <complex>
#include <vector>

namespace vbl {

using cd = std::complex<double>;

/// Forward DFT, normalized so that coefficients are the trigonometric
/// interpolation coefficients: uhat[k] = (1/M) sum_j u_j e^{-2pi i k j / M}.
/// Index k is stored FFT-style (0, 1, .., M/2, -M/2+1, .., -1).
std::vector<cd> fft(const std::vector<cd>& u);
std::vector<cd> fft_real(const std::vector<double>& u);

/// Inverse of fft (no extra normalization).
std::vector<cd> ifft(const std::vector<cd>& uhat);
std::vector<double> ifft_real(const std::vector<cd>& uhat);

/// Signed integer wavenumber of FFT bin k for transform size m.
inline int wavenumber(int k, int m) { return k <= m / 2 ? k : k - m; }

/// Spectral derivative of order p on the periodic domain [0, L).
std::vector<cd> spectral_derivative(const std::vector<cd>& uhat, double L, int p = 1);

/// Coefficients of u(. + r): uhat[k] *= e^{2pi i k r / L}.
std::vector<cd> fourier_shift(const std::vector<cd>& uhat, double L, double r);

/// Periodic Sobolev norm ||u||_s^2 = L sum_k (1+k^2)^s |uhat(k)|^2.
double sobolev_norm(const std::vector<cd>& uhat, double L, double s);

/// Trigonometric resampling to m_out points (zero-pad or truncate spectrum).
std::vector<double> trig_resample(const std::vector<double>& u, int m_out);

/// Same resampling on the coefficient side.
std::vector<cd> resample_spectrum(const std::vector<cd>& uhat, int m_out);

/// max_{m/4 <= |k| <= m/2} |uhat(k)| / max_k |uhat(k)|; resolution indicator.
double spectral_tail(const std::vector<cd>& uhat);

}  // namespace vbl

#endif

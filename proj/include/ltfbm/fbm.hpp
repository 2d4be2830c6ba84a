#pragma once

// Davies-Harte synthesis of fractional Brownian motion on a uniform grid.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "errors.hpp"
#include "grid_path.hpp"
#include "rng.hpp"

namespace ltfbm {

/// Autocovariance of fractional Gaussian noise with step dt at lag k.
inline double fgn_autocov(double hurst, double dt, std::size_t k) {
  const double h2 = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  const double lag = std::pow(kk + 1.0, h2) - 2.0 * std::pow(kk, h2) +
                     (k == 0 ? 1.0 : std::pow(kk - 1.0, h2));
  return 0.5 * std::pow(dt, h2) * lag;
}

/// E W(s) W(t) = (|s|^{2H} + |t|^{2H} - |t - s|^{2H}) / 2.
inline double fbm_cov(double hurst, double s, double t) {
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(std::abs(s), h2) + std::pow(std::abs(t), h2) -
                std::pow(std::abs(t - s), h2));
}

/// Precomputed circulant embedding for n grid points; sample() is then one FFT.
class FbmGenerator {
 public:
  FbmGenerator(double hurst, std::size_t n, double dt) : hurst_(hurst), n_(n), dt_(dt) {
    if (!(hurst > 0.0 && hurst < 1.0)) throw ArgumentError("FbmGenerator: hurst must lie in (0,1)");
    if (n < 2) throw ArgumentError("FbmGenerator: need n >= 2");
    if (!(dt > 0.0)) throw ArgumentError("FbmGenerator: dt must be positive");
    const std::size_t n_inc = n - 1;
    std::size_t g = 1;
    while (g < n_inc) g <<= 1;
    for (int attempt = 0; attempt <= 4; ++attempt, g <<= 1) {
      if (embed(g)) return;
    }
    std::ostringstream os;
    os << "FbmGenerator: circulant embedding has negative eigenvalues after 4 doublings (H="
       << hurst << ", n=" << n << ")";
    throw NonConvergence(os.str(), min_eigen_);
  }

  double hurst() const { return hurst_; }
  std::size_t size() const { return n_; }
  double dt() const { return dt_; }
  std::size_t circulant_size() const { return sqrt_eig_.size(); }

  /// W^H on {0, dt, ..., (n-1) dt}, W^H(0) = 0.
  GridPath sample(Rng& rng) const {
    const std::size_t m = sqrt_eig_.size();
    std::vector<std::complex<double>> z(m);
    for (std::size_t k = 0; k < m; ++k) {
      const double a = rng.normal();
      const double b = rng.normal();
      z[k] = sqrt_eig_[k] * std::complex<double>(a, b);
    }
    // a local plan keeps sample() safe to call from several threads
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> y;
    fft.fwd(y, z);
    std::vector<double> w(n_);
    w[0] = 0.0;
    for (std::size_t i = 1; i < n_; ++i) w[i] = w[i - 1] + y[i - 1].real();
    return GridPath(0.0, dt_, std::move(w));
  }

  GridPath sample(std::uint64_t seed) const {
    Rng rng(seed);
    return sample(rng);
  }

 private:
  bool embed(std::size_t g) {
    const std::size_t m = 2 * g;
    std::vector<double> c(m);
    for (std::size_t k = 0; k <= g; ++k) c[k] = fgn_autocov(hurst_, dt_, k);
    for (std::size_t k = 1; k < g; ++k) c[m - k] = c[k];
    std::vector<std::complex<double>> lam;
    Eigen::FFT<double> fft;
    fft.fwd(lam, c);
    sqrt_eig_.assign(m, 0.0);
    double scale = 0.0;
    for (const auto& l : lam) scale = std::max(scale, std::abs(l.real()));
    min_eigen_ = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      double v = lam[k].real();
      if (v < 0.0) {
        min_eigen_ = std::min(min_eigen_, v);
        if (v < -1e-10 * scale) return false;
        v = 0.0;
      }
      sqrt_eig_[k] = std::sqrt(v / static_cast<double>(m));
    }
    return true;
  }

  double hurst_;
  std::size_t n_;
  double dt_;
  std::vector<double> sqrt_eig_;
  double min_eigen_ = 0.0;
};

/// Convenience wrapper: fresh embedding for a single path.
inline GridPath fbm_grid(double hurst, std::size_t n, double dt, std::uint64_t seed) {
  return FbmGenerator(hurst, n, dt).sample(seed);
}

}  // namespace ltfbm

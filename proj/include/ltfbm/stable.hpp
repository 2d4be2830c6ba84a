#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "grid_path.hpp"
#include "model.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace ltfbm {

/// Parameters of the standard S(alpha, skew, scale) family with characteristic
/// function exp(-scale^alpha |xi|^alpha (1 - i skew sgn(xi) tan(pi alpha/2))).
struct SamplerParams {
  double alpha;
  double skew;
  double scale;
};

/// Maps exp(-t |xi|^alpha (1 + i nu sgn(xi) tan(pi alpha/2)) / chi) onto the
/// sampler convention: skew = -nu and scale^alpha = t / chi.
inline SamplerParams sampler_params(const StableParams& p, double t) {
  if (!(t > 0.0)) throw ArgumentError("sampler_params: t must be positive");
  return {p.alpha(), -p.nu(), std::pow(t / p.chi(), 1.0 / p.alpha())};
}

/// Chambers-Mallows-Stuck draw for alpha in (1, 2].
class StableSampler {
 public:
  explicit StableSampler(SamplerParams sp) : sp_(sp) {
    const double t = sp.skew * stable_tan(sp.alpha);
    gaussian_ = std::abs(sp.alpha - 2.0) < 1e-12;
    b_ = std::atan(t) / sp.alpha;
    s_ = std::pow(1.0 + t * t, 1.0 / (2.0 * sp.alpha));
    inv_a_ = 1.0 / sp.alpha;
    expo_ = (1.0 - sp.alpha) / sp.alpha;
  }

  double operator()(Rng& rng) const {
    // alpha = 2 collapses to N(0, 2 scale^2)
    if (gaussian_) return std::numbers::sqrt2 * sp_.scale * rng.normal();
    const double v = std::numbers::pi * (rng.uniform() - 0.5);
    const double w = rng.exponential();
    const double av = sp_.alpha * (v + b_);
    const double x = s_ * std::sin(av) / std::pow(std::cos(v), inv_a_) *
                     std::pow(std::cos(v - av) / w, expo_);
    return sp_.scale * x;
  }

 private:
  SamplerParams sp_;
  bool gaussian_;
  double b_;
  double s_;
  double inv_a_;
  double expo_;
};

/// n i.i.d. increments of X over steps of length dt.
inline std::vector<double> stable_increments(const StableParams& p, double dt, std::size_t n,
                                             std::uint64_t seed) {
  const StableSampler draw(sampler_params(p, dt));
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = draw(rng);
  return out;
}

/// X on {0, dt, ..., n dt} with X(0) = 0.
inline GridPath stable_path(const StableParams& p, double dt, std::size_t n_steps,
                            std::uint64_t seed) {
  if (n_steps < 1) throw ArgumentError("stable_path: n_steps must be >= 1");
  const std::vector<double> inc = stable_increments(p, dt, n_steps, seed);
  std::vector<double> v(n_steps + 1);
  v[0] = 0.0;
  for (std::size_t i = 0; i < n_steps; ++i) v[i + 1] = v[i] + inc[i];
  return GridPath(0.0, dt, std::move(v));
}

/// Positive stable variable of index b in (0, 1) with E exp(-s Y) = exp(-s^b) (Kanter).
inline double positive_stable(double b, Rng& rng) {
  const double u = std::numbers::pi * rng.uniform();
  const double w = rng.exponential();
  return std::sin(b * u) / std::pow(std::sin(u), 1.0 / b) *
         std::pow(std::sin((1.0 - b) * u) / w, (1.0 - b) / b);
}

}  // namespace ltfbm

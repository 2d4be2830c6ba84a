#pragma once

// Composition Z(t) = W^H(L_t) and batched replicate drivers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "errors.hpp"
#include "fbm.hpp"
#include "grid_path.hpp"
#include "local_time.hpp"
#include "model.hpp"
#include "parallel.hpp"
#include "params.hpp"
#include "rng.hpp"
#include "stable.hpp"

namespace ltfbm {

enum class LocalTimeMethod { occupation, inverse_subordinator };
enum class WMethod { grid, exact_points };

inline const char* to_string(LocalTimeMethod m) {
  return m == LocalTimeMethod::occupation ? "occupation" : "inverse_subordinator";
}
inline const char* to_string(WMethod m) { return m == WMethod::grid ? "grid" : "exact_points"; }

struct SimConfig {
  std::size_t n_steps = 4096;
  double dt = 1.0 / 4096.0;
  std::uint64_t seed = 1;
  LocalTimeMethod local_time_method = LocalTimeMethod::inverse_subordinator;
  double epsilon_spread = 1.0;    // occupation bandwidth eps = spread * dt^{1/alpha}
  std::size_t fbm_oversample = 4;  // W grid step = E L_dt / fbm_oversample
  double subordinator_refine = 16.0;
  WMethod w_method = WMethod::grid;
  unsigned threads = 1;

  void validate() const {
    if (n_steps < 2) throw ArgumentError("SimConfig: n_steps must be >= 2");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("SimConfig: dt must be positive");
    if (fbm_oversample < 1) throw ArgumentError("SimConfig: fbm_oversample must be >= 1");
    if (!(epsilon_spread > 0.0)) throw ArgumentError("SimConfig: epsilon_spread must be positive");
    if (!(subordinator_refine >= 1.0)) throw ArgumentError("SimConfig: subordinator_refine must be >= 1");
    if (threads < 1) throw ArgumentError("SimConfig: threads must be >= 1");
  }

  double horizon() const { return dt * static_cast<double>(n_steps); }
};

/// Per-replicate seed and its sub-streams.
inline std::uint64_t replicate_seed(std::uint64_t master, std::size_t i) { return mix(master, i); }
inline std::uint64_t stream_x(std::uint64_t rep_seed) { return mix(rep_seed, 0); }
inline std::uint64_t stream_w(std::uint64_t rep_seed) { return mix(rep_seed, 1); }

/// Step of the W^H grid used by compose.
inline double fbm_grid_step(const StableParams& p, const SimConfig& cfg) {
  return lt_moment_exact(p, 1.0, cfg.dt) / static_cast<double>(cfg.fbm_oversample);
}

/// Z = W(L) with W linearly interpolated between its grid points.
inline GridPath compose(const GridPath& w, const GridPath& l) {
  if (!l.monotone()) throw ArgumentError("compose: local time path must be monotone");
  const double lmax = l.values().back();
  if (l.values().front() < w.t0() || lmax > w.t_end() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "compose: local time reaches " << lmax << " beyond the fBm grid span [" << w.t0()
       << ", " << w.t_end() << "]";
    throw RangeError(os.str());
  }
  std::vector<double> z(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) z[i] = w.at(std::min(l[i], w.t_end()));
  return GridPath(l.t0(), l.dt(), std::move(z));
}

/// Thread-safe cache of circulant embeddings keyed by grid length.
class FbmCache {
 public:
  FbmCache(double hurst, double dt) : hurst_(hurst), dt_(dt) {}

  /// Generator covering [0, span] with at least `span/dt + 2` points, rounded to 2^k + 1.
  std::shared_ptr<const FbmGenerator> covering(double span) {
    const double need = std::ceil(span / dt_) + 2.0;
    std::size_t n = 2;
    while (static_cast<double>(n - 1) < need) n = 2 * (n - 1) + 1;
    std::lock_guard<std::mutex> lock(mu_);
    auto it = gens_.find(n);
    if (it == gens_.end()) {
      it = gens_.emplace(n, std::make_shared<const FbmGenerator>(hurst_, n, dt_)).first;
    }
    return it->second;
  }

 private:
  double hurst_;
  double dt_;
  std::mutex mu_;
  std::map<std::size_t, std::shared_ptr<const FbmGenerator>> gens_;
};

/// Local time on the configured grid {0, dt, ..., n_steps dt}.
inline GridPath local_time_path(const StableParams& p, const SimConfig& cfg, std::uint64_t seed) {
  if (cfg.local_time_method == LocalTimeMethod::occupation) {
    const GridPath x = stable_path(p, cfg.dt, cfg.n_steps, seed);
    return local_time_occupation(x, occupation_epsilon(p, cfg.dt, cfg.epsilon_spread));
  }
  detail::require_symmetric(p, "local_time_path");
  return local_time_inverse_subordinator(p, cfg.horizon(), cfg.dt, seed, cfg.subordinator_refine);
}

struct ZPath {
  GridPath l;
  GridPath z;
};

/// One composed path for replicate seed `rep_seed`.
inline ZPath z_path(const ModelParams& m, const SimConfig& cfg, std::uint64_t rep_seed,
                    FbmCache& cache) {
  GridPath l = local_time_path(m.stable(), cfg, stream_x(rep_seed));
  const double span = std::max(l.values().back(), fbm_grid_step(m.stable(), cfg));
  Rng wr(stream_w(rep_seed));
  const GridPath w = cache.covering(span)->sample(wr);
  GridPath z = compose(w, l);
  return {std::move(l), std::move(z)};
}

inline ZPath z_path(const ModelParams& m, const SimConfig& cfg, std::uint64_t rep_seed) {
  FbmCache cache(m.hurst(), fbm_grid_step(m.stable(), cfg));
  return z_path(m, cfg, rep_seed, cache);
}

/// W^H at sorted nonnegative points, exactly in law (Cholesky of the fBm covariance).
inline std::vector<double> fbm_at_points(double hurst, const std::vector<double>& pts, Rng& rng) {
  std::vector<double> uniq;
  for (double v : pts) {
    if (v < 0.0) throw ArgumentError("fbm_at_points: points must be nonnegative");
    if (v > 0.0 && (uniq.empty() || v > uniq.back())) uniq.push_back(v);
  }
  std::vector<double> wv(uniq.size());
  if (uniq.size() == 1) {
    wv[0] = std::pow(uniq[0], hurst) * rng.normal();
  } else if (!uniq.empty()) {
    const auto k = static_cast<Eigen::Index>(uniq.size());
    Eigen::MatrixXd c(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) c(i, j) = fbm_cov(hurst, uniq[i], uniq[j]);
    Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() != Eigen::Success) {
      c.diagonal().array() += 1e-14 * c.diagonal().maxCoeff();
      llt.compute(c);
    }
    Eigen::VectorXd g(k);
    for (Eigen::Index i = 0; i < k; ++i) g(i) = rng.normal();
    const Eigen::VectorXd x = llt.matrixL() * g;
    for (Eigen::Index i = 0; i < k; ++i) wv[i] = x(i);
  }
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (pts[i] == 0.0) {
      out[i] = 0.0;
      continue;
    }
    const auto it = std::lower_bound(uniq.begin(), uniq.end(), pts[i]);
    out[i] = wv[static_cast<std::size_t>(it - uniq.begin())];
  }
  return out;
}

using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct LZSample {
  SampleMatrix l;
  SampleMatrix z;
};

/// reps x |times| matrices of L and Z at the requested times; row i uses seed mix(cfg.seed, i).
inline LZSample sample_lz(const ModelParams& m, const std::vector<double>& times, std::size_t reps,
                          const SimConfig& cfg) {
  cfg.validate();
  if (times.empty()) throw ArgumentError("sample_z: times must be nonempty");
  if (!std::is_sorted(times.begin(), times.end()) || times.front() < 0.0) {
    throw ArgumentError("sample_z: times must be sorted and nonnegative");
  }
  if (times.back() > cfg.horizon() * (1.0 + 1e-12)) {
    throw ArgumentError("sample_z: times exceed n_steps * dt");
  }
  const auto rows = static_cast<Eigen::Index>(reps);
  const auto cols = static_cast<Eigen::Index>(times.size());
  LZSample out{SampleMatrix(rows, cols), SampleMatrix(rows, cols)};
  FbmCache cache(m.hurst(), fbm_grid_step(m.stable(), cfg));
  parallel_for(reps, cfg.threads, [&](std::size_t i) {
    const std::uint64_t rs = replicate_seed(cfg.seed, i);
    const auto r = static_cast<Eigen::Index>(i);
    try {
      std::vector<double> lv(times.size());
      std::vector<double> z(times.size());
      if (cfg.w_method == WMethod::grid) {
        const ZPath zp = z_path(m, cfg, rs, cache);
        for (std::size_t j = 0; j < times.size(); ++j) {
          lv[j] = zp.l.at(times[j]);
          z[j] = zp.z.at(times[j]);
        }
      } else {
        if (cfg.local_time_method == LocalTimeMethod::inverse_subordinator) {
          Rng xr(stream_x(rs));
          lv = lt_subordinator_at(m.stable(), times,
                                  subordinator_step(m.stable(), cfg.dt, cfg.subordinator_refine), xr);
        } else {
          const GridPath l = local_time_path(m.stable(), cfg, stream_x(rs));
          for (std::size_t j = 0; j < times.size(); ++j) lv[j] = l.at(times[j]);
        }
        Rng wr(stream_w(rs));
        z = fbm_at_points(m.hurst(), lv, wr);
      }
      for (std::size_t j = 0; j < times.size(); ++j) {
        const auto c = static_cast<Eigen::Index>(j);
        out.l(r, c) = lv[j];
        out.z(r, c) = z[j];
      }
    } catch (const RangeError& e) {
      std::ostringstream os;
      os << "sample_z: replicate " << i << ": " << e.what();
      throw RangeError(os.str());
    }
  });
  return out;
}

/// reps x |times| matrix of Z at the requested times.
inline SampleMatrix sample_z(const ModelParams& m, const std::vector<double>& times,
                             std::size_t reps, const SimConfig& cfg) {
  return sample_lz(m, times, reps, cfg).z;
}

/// Exact single-time draw Z(t) = L_t^H N with L_t from lt_exact_marginal.
inline double z_exact_marginal(const ModelParams& m, double t, Rng& rng) {
  const double l = lt_exact_marginal(m.stable(), t, rng);
  return std::pow(l, m.hurst()) * rng.normal();
}

}  // namespace ltfbm

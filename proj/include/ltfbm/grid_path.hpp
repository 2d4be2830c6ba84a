#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace ltfbm {

/// Uniformly sampled trajectory: values[i] is the path at t0 + i*dt.
class GridPath {
 public:
  GridPath(double t0, double dt, std::vector<double> values, bool monotone = false)
      : t0_(t0), dt_(dt), values_(std::move(values)), monotone_(monotone) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ArgumentError("GridPath: dt must be positive");
    if (values_.size() < 2) throw ArgumentError("GridPath: need at least 2 points");
    if (monotone_) {
      if (values_.front() < 0.0) throw ArgumentError("GridPath: monotone path must start >= 0");
      if (!std::is_sorted(values_.begin(), values_.end())) {
        throw ArgumentError("GridPath: monotone path is decreasing somewhere");
      }
    }
  }

  double t0() const { return t0_; }
  double dt() const { return dt_; }
  bool monotone() const { return monotone_; }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double time(std::size_t i) const { return t0_ + dt_ * static_cast<double>(i); }
  double t_end() const { return time(values_.size() - 1); }

  /// Linear interpolation at time t; RangeError outside [t0, t_end].
  double at(double t) const {
    const double u = (t - t0_) / dt_;
    const double last = static_cast<double>(values_.size() - 1);
    if (!(u >= -1e-9) || !(u <= last + 1e-9)) {
      std::ostringstream os;
      os << "GridPath::at: t=" << t << " outside [" << t0_ << ", " << t_end() << "]";
      throw RangeError(os.str());
    }
    const double uc = std::clamp(u, 0.0, last);
    std::size_t i = static_cast<std::size_t>(uc);
    if (i >= values_.size() - 1) i = values_.size() - 2;
    const double w = uc - static_cast<double>(i);
    return values_[i] + w * (values_[i + 1] - values_[i]);
  }

 private:
  double t0_;
  double dt_;
  std::vector<double> values_;
  bool monotone_;
};

}  // namespace ltfbm

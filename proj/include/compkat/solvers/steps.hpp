#ifndef COMPKAT_SOLVERS_STEPS_HPP
#define COMPKAT_SOLVERS_STEPS_HPP

#include "compkat/linalg.hpp"
#include "compkat/params.hpp"
#include "compkat/random.hpp"
#include "compkat/trace.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace compkat {

/// x = tau1 z + tau2 snap + (1 - tau1 - tau2) y.
inline Vector coupling_point(const Vector& z, const Vector& snap, const Vector& y, double tau1,
                             double tau2) {
  require_length(snap, static_cast<std::size_t>(z.size()), "coupling_point snap");
  require_length(y, static_cast<std::size_t>(z.size()), "coupling_point y");
  if (tau1 < 0.0 || tau2 < 0.0 || tau1 + tau2 > 1.0) {
    throw std::invalid_argument("coupling_point: weights must be nonnegative with tau1 + tau2 <= 1");
  }
  const double rest = 1.0 - tau1 - tau2;
  Vector x = tau1 * z + tau2 * snap;
  if (rest != 0.0) x += rest * y;
  return x;
}

/// prox_h(z - alpha grad, alpha).
template <class Prox>
Vector mirror_step(const Vector& z, const Vector& grad, double alpha, Prox&& prox_h) {
  if (!(alpha > 0.0)) throw std::invalid_argument("mirror_step: alpha must be positive");
  require_length(grad, static_cast<std::size_t>(z.size()), "mirror_step grad");
  return prox_h(Vector(z - alpha * grad), alpha);
}

/// prox_h(x - grad/(3L), 1/(3L)).
template <class Prox>
Vector gradient_step(const Vector& x, const Vector& grad, double L, Prox&& prox_h) {
  if (!(L > 0.0)) throw std::invalid_argument("gradient_step: L must be positive");
  require_length(grad, static_cast<std::size_t>(x.size()), "gradient_step grad");
  const double step = 1.0 / (3.0 * L);
  return prox_h(Vector(x - step * grad), step);
}

/// theta^j-weighted running average, j = 0, 1, ...; the weights are kept
/// relative to the newest term so large m log(theta) never overflows.
class SnapshotAverager {
 public:
  explicit SnapshotAverager(double theta) : theta_(theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("SnapshotAverager: theta must be positive");
  }

  void add(const Vector& y) {
    if (weight_ == 0.0) {
      avg_ = y;
      weight_ = 1.0;
      return;
    }
    weight_ = 1.0 + weight_ / theta_;
    avg_ += (y - avg_) / weight_;
  }

  [[nodiscard]] const Vector& value() const {
    if (weight_ == 0.0) throw std::logic_error("SnapshotAverager: no points added");
    return avg_;
  }

 private:
  double theta_;
  double weight_ = 0.0;
  Vector avg_;
};

inline Vector snapshot_average(const std::vector<Vector>& ys, double theta) {
  if (ys.empty()) throw std::invalid_argument("snapshot_average: empty list");
  SnapshotAverager avg(theta);
  for (const auto& y : ys) avg.add(y);
  return avg.value();
}

/// Wall-clock milliseconds since construction; always 0 when disabled.
class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
  [[nodiscard]] double ms() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

struct SolveOptions {
  std::optional<double> reference;  // H*; fills the gap column
  bool timing = false;
  /// Objective used for trace records; defaults to the oracle's own H.
  std::function<double(const Vector&)> objective;
  /// Called with (stage, snapshot being built, y) after every inner step of
  /// the Katyusha loops.
  std::function<void(std::uint64_t, std::uint64_t, const Vector&)> on_inner;
};

/// Bookkeeping shared by every solver loop.
struct LoopState {
  SolverTrace trace;
  OracleCounters* counters = nullptr;
  const Stopwatch* clock = nullptr;
  std::function<double(const Vector&)> objective;
  std::optional<double> reference;
  std::function<void(std::uint64_t, std::uint64_t, const Vector&)> on_inner;
  std::uint64_t iteration = 0;

  void record(std::uint64_t stage, std::uint64_t snapshot, const Vector& x) {
    trace.records.push_back(
        make_record(stage, snapshot, *counters, objective(x), reference, clock->ms()));
  }

  void require_finite(const Vector& v) const {
    if (!all_finite(v)) throw NonFiniteIterate(trace, iteration);
  }
};

/// One SoCK epoch structure shared by the two-level and multi-level solvers:
/// for s = 0..S-1 take a snapshot, run m coupled mirror/gradient steps with
/// the supplied estimator, average the y's. Records (stage, s+1) after each
/// snapshot update and returns x~^S.
///
/// take(x~) -> Snap;  estimate(snap, x, stream) -> Vector;  prox(v, step) -> Vector.
template <class Take, class Estimate, class Prox>
Vector katyusha_epochs(const SockParams& p, double L, const Vector& x0, const RandomStream& stream,
                       std::uint64_t stage, LoopState& state, Take&& take, Estimate&& estimate,
                       Prox&& prox) {
  Vector snap_point = x0;
  Vector y = x0;
  Vector z = x0;
  for (std::uint64_t s = 0; s < p.S; ++s) {
    const auto snap = take(snap_point);
    const RandomStream epoch = stream.child(s);
    SnapshotAverager avg(p.theta);
    for (std::uint64_t j = 0; j < p.m; ++j) {
      ++state.iteration;
      const Vector x = coupling_point(z, snap_point, y, p.tau1, p.tau2);
      const Vector grad = estimate(snap, x, epoch.child(j));
      state.require_finite(grad);
      z = mirror_step(z, grad, p.alpha, prox);
      y = gradient_step(x, grad, L, prox);
      state.require_finite(z);
      state.require_finite(y);
      avg.add(y);
      if (state.on_inner) state.on_inner(stage, s + 1, y);
    }
    snap_point = avg.value();
    state.record(stage, s + 1, snap_point);
  }
  return snap_point;
}

}  // namespace compkat

#endif  // COMPKAT_SOLVERS_STEPS_HPP

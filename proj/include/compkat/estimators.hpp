#ifndef COMPKAT_ESTIMATORS_HPP
#define COMPKAT_ESTIMATORS_HPP

#include "compkat/linalg.hpp"
#include "compkat/multilevel.hpp"
#include "compkat/oracle.hpp"
#include "compkat/random.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace compkat {

/// Stream tag of the batch for a (one-based) level: values use 2 * level,
/// Jacobians 2 * level + 1. Two-level estimators use level 1 for A and B and
/// level 2 for C, matching the multi-level layout for p = 2.
constexpr std::uint64_t sample_tag(std::size_t level, bool jacobian) {
  return 2 * static_cast<std::uint64_t>(level) + (jacobian ? 1 : 0);
}

/// Batch of `size` draws from [0, n) for the given level and kind.
inline Batch sample_level_batch(const RandomStream& stream, std::size_t level, bool jacobian,
                                std::size_t n, std::uint64_t size) {
  RandomStream s = stream.child(sample_tag(level, jacobian));
  return sample_batch(s, n, size);
}

/// (1/|batch|) sum_{draws} diff(j) + mean, accumulated over distinct indices
/// weighted by multiplicity. Shared by every estimator.
template <class T, class Diff>
T vr_correct(const Batch& batch, const T& mean, Diff&& diff) {
  if (batch.empty()) throw std::invalid_argument("vr_correct: empty batch");
  T acc = T::Zero(mean.rows(), mean.cols());
  for (std::size_t k = 0; k < batch.distinct(); ++k) {
    acc += static_cast<double>(batch.count[k]) * diff(batch.index[k], batch.count[k]);
  }
  T out = acc / static_cast<double>(batch.size);
  out += mean;
  return out;
}

struct Snapshot {
  Vector point;
  Vector inner_mean;      // G(x~)
  Matrix inner_jac_mean;  // grad G(x~)
  Vector grad_mean;       // grad f(x~)
};

/// Full pass at x: n2 inner values, n2 inner Jacobians, n1 outer gradients.
inline Snapshot take_snapshot(const CountedOracle& oracle, const Vector& x) {
  Snapshot s;
  s.point = x;
  s.inner_mean = inner_mean(oracle, x);
  s.inner_jac_mean = inner_jacobian_mean(oracle, x);
  s.grad_mean = transpose_apply(s.inner_jac_mean, outer_gradient_mean(oracle, s.inner_mean));
  return s;
}

/// G^ = (1/A) sum (G_j(x) - G_j(x~)) + G(x~); charges 2|batch| inner values.
inline Vector estimate_inner(const CountedOracle& oracle, const Snapshot& snap, const Vector& x,
                             const Batch& batch) {
  return vr_correct(batch, snap.inner_mean, [&](std::size_t j, std::uint64_t c) {
    return Vector(oracle.inner_value(j, x, c) - oracle.inner_value(j, snap.point, c));
  });
}

/// grad G^ analogously; charges 2|batch| inner Jacobians.
inline Matrix estimate_jacobian(const CountedOracle& oracle, const Snapshot& snap,
                                const Vector& x, const Batch& batch) {
  return vr_correct(batch, snap.inner_jac_mean, [&](std::size_t j, std::uint64_t c) {
    return Matrix(oracle.inner_jacobian(j, x, c) - oracle.inner_jacobian(j, snap.point, c));
  });
}

/// [jhat]^T grad F(ghat) with the full outer average; charges n1 outer gradients.
inline Vector gradient_option1(const CountedOracle& oracle, const Vector& ghat,
                               const Matrix& jhat) {
  require_shape(jhat, oracle.dim_u(), oracle.dim_x(), "gradient_option1 jhat");
  return transpose_apply(jhat, outer_gradient_mean(oracle, ghat));
}

/// (1/C) sum ([jhat]^T grad F_i(ghat) - [grad G(x~)]^T grad F_i(G(x~))) + grad f(x~);
/// charges 2|batch| outer gradients.
inline Vector gradient_option2(const CountedOracle& oracle, const Snapshot& snap,
                               const Vector& ghat, const Matrix& jhat, const Batch& outer_batch) {
  require_shape(jhat, oracle.dim_u(), oracle.dim_x(), "gradient_option2 jhat");
  const Matrix mean = as_row(snap.grad_mean);
  return row_to_vector(vr_correct(outer_batch, mean, [&](std::size_t i, std::uint64_t c) {
    return Matrix(chain_product(as_row(oracle.outer_gradient(i, ghat, c)), jhat) -
                  chain_product(as_row(oracle.outer_gradient(i, snap.inner_mean, c)),
                                snap.inner_jac_mean));
  }));
}

struct MultiLevelSnapshot {
  Vector point;
  std::vector<Vector> chain_values;      // phi_1(x~) .. phi_{p-1}(x~)
  std::vector<Matrix> chain_level_jacs;  // f'_1(x~), f'_2(phi_1(x~)) .. f'_p(phi_{p-1}(x~))
  std::vector<Matrix> chain_jacs;        // phi'_1(x~) .. phi'_p(x~)

  /// phi_k(x~) for zero-based k; k = -1 is x~ itself.
  [[nodiscard]] const Vector& value_before(std::size_t level) const {
    return level == 0 ? point : chain_values[level - 1];
  }
};

/// Charges n_k level values for k < p and n_k level Jacobians for every k.
inline MultiLevelSnapshot take_multilevel_snapshot(const CountedMultiLevel& oracle,
                                                   const Vector& x) {
  const std::size_t p = oracle.levels();
  MultiLevelSnapshot s;
  s.point = x;
  for (std::size_t k = 0; k < p; ++k) {
    const Vector& u = s.value_before(k);
    const Matrix level_jac = level_mean_jacobian(oracle, k, u);
    s.chain_jacs.push_back(k == 0 ? level_jac : chain_product(level_jac, s.chain_jacs.back()));
    s.chain_level_jacs.push_back(level_jac);
    if (k + 1 < p) s.chain_values.push_back(level_mean_value(oracle, k, u));
  }
  return s;
}

/// u/v recursions returning v_p^T. Level k batches are drawn from
/// sample_level_batch(stream, k + 1, ...); a has p - 1 entries, b has p.
inline Vector multilevel_gradient(const CountedMultiLevel& oracle,
                                  const MultiLevelSnapshot& snap, const Vector& x,
                                  const std::vector<std::uint64_t>& inner_batches,
                                  const std::vector<std::uint64_t>& jac_batches,
                                  const RandomStream& stream) {
  const std::size_t p = oracle.levels();
  if (p < 2) throw std::invalid_argument("multilevel_gradient: requires at least two levels");
  if (inner_batches.size() != p - 1 || jac_batches.size() != p) {
    throw std::invalid_argument("multilevel_gradient: batch lists do not match the level count");
  }
  Vector u = x;  // u_{k-1}; u_0 = x
  Matrix v;      // v_{k-1}
  for (std::size_t k = 0; k < p; ++k) {
    const Vector& snap_in = snap.value_before(k);
    const Batch jb = sample_level_batch(stream, k + 1, true, oracle.count(k), jac_batches[k]);
    Matrix v_next;
    if (k == 0) {
      v_next = vr_correct(jb, snap.chain_jacs[0], [&](std::size_t j, std::uint64_t c) {
        return Matrix(oracle.level_jacobian(0, j, u, c) - oracle.level_jacobian(0, j, snap_in, c));
      });
    } else {
      v_next = vr_correct(jb, snap.chain_jacs[k], [&](std::size_t j, std::uint64_t c) {
        return Matrix(chain_product(oracle.level_jacobian(k, j, u, c), v) -
                      chain_product(oracle.level_jacobian(k, j, snap_in, c),
                                    snap.chain_jacs[k - 1]));
      });
    }
    if (k + 1 < p) {
      const Batch ab = sample_level_batch(stream, k + 1, false, oracle.count(k), inner_batches[k]);
      u = vr_correct(ab, snap.chain_values[k], [&](std::size_t j, std::uint64_t c) {
        return Vector(oracle.level_value(k, j, u, c) - oracle.level_value(k, j, snap_in, c));
      });
    }
    v = std::move(v_next);
  }
  return row_to_vector(v);
}

}  // namespace compkat

#endif  // COMPKAT_ESTIMATORS_HPP

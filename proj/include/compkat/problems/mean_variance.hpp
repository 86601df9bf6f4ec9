#ifndef COMPKAT_PROBLEMS_MEAN_VARIANCE_HPP
#define COMPKAT_PROBLEMS_MEAN_VARIANCE_HPP

#include "compkat/fista.hpp"
#include "compkat/linalg.hpp"
#include "compkat/oracle.hpp"
#include "compkat/prox.hpp"
#include "compkat/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace compkat {

/// Mean-variance instance
///
///   min_x  abar^T x + lambda1 x^T M x + lambda2 ||x||_1,
///   M = (1/n) A A^T - abar abar^T,
///
/// where the columns a_1..a_n of A (dim x n) are i.i.d. N(0, F^T F + v I)
/// for a dim x dim factor F with unit-variance Gaussian entries.
struct MeanVarInstance {
  Matrix data;
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double noise_v = 0.0;
  std::uint64_t seed = 0;
  Vector mean_col;
  Matrix quad_matrix;

  [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(data.rows()); }
  [[nodiscard]] std::size_t samples() const { return static_cast<std::size_t>(data.cols()); }

  /// Recomputes mean_col and quad_matrix from data.
  void refresh_derived() {
    const double n = static_cast<double>(data.cols());
    mean_col = data.rowwise().sum() / n;
    quad_matrix = (data * data.transpose()) / n - mean_col * mean_col.transpose();
    quad_matrix = 0.5 * (quad_matrix + quad_matrix.transpose()).eval();
  }

  [[nodiscard]] double smooth_value(const Vector& x) const {
    return mean_col.dot(x) + lambda1 * x.dot(quad_matrix * x);
  }
  [[nodiscard]] Vector smooth_gradient(const Vector& x) const {
    return mean_col + 2.0 * lambda1 * (quad_matrix * x);
  }
  /// Dense evaluation of the full objective.
  [[nodiscard]] double objective(const Vector& x) const {
    return smooth_value(x) + lambda2 * x.lpNorm<1>();
  }
};

namespace detail {
constexpr std::uint64_t kTagFactor = 0x666163746f72ULL;  // "factor"
constexpr std::uint64_t kTagColumn = 0x636f6c756d6eULL;  // "column"
}  // namespace detail

/// Generation factor F; entries i.i.d. N(0, 1).
inline Matrix generation_factor(std::size_t dim, std::uint64_t seed) {
  RandomStream stream = RandomStream(seed).child(detail::kTagFactor);
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix factor(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) factor(r, c) = stream.standard_normal();
  }
  return factor;
}

/// Sigma = F^T F + v I.
inline Matrix generation_covariance(std::size_t dim, double noise_v, std::uint64_t seed) {
  const Matrix factor = generation_factor(dim, seed);
  return factor.transpose() * factor +
         noise_v * Matrix::Identity(static_cast<Eigen::Index>(dim),
                                    static_cast<Eigen::Index>(dim));
}

/// Column i is F^T z1 + sqrt(v) z2 with z1, z2 drawn from the (seed,
/// "column", i) stream, which has covariance F^T F + v I exactly.
inline MeanVarInstance generate_instance(std::size_t dim, std::size_t samples, double noise_v,
                                         double lambda1, double lambda2, std::uint64_t seed) {
  if (dim == 0 || samples == 0) {
    throw std::invalid_argument("generate_instance: dim and samples must be positive");
  }
  if (!(lambda1 > 0.0)) throw std::invalid_argument("generate_instance: lambda1 must be positive");
  if (lambda2 < 0.0 || noise_v < 0.0) {
    throw std::invalid_argument("generate_instance: lambda2 and noise_v must be nonnegative");
  }
  const auto d = static_cast<Eigen::Index>(dim);
  const Matrix factor_t = generation_factor(dim, seed).transpose();
  const double sv = std::sqrt(noise_v);
  const RandomStream root(seed);

  MeanVarInstance inst;
  inst.data.resize(d, static_cast<Eigen::Index>(samples));
  Vector z1(d), z2(d);
  for (std::size_t i = 0; i < samples; ++i) {
    RandomStream stream = root.child(detail::kTagColumn, i);
    for (Eigen::Index r = 0; r < d; ++r) z1[r] = stream.standard_normal();
    for (Eigen::Index r = 0; r < d; ++r) z2[r] = stream.standard_normal();
    inst.data.col(static_cast<Eigen::Index>(i)) = factor_t * z1 + sv * z2;
  }
  inst.lambda1 = lambda1;
  inst.lambda2 = lambda2;
  inst.noise_v = noise_v;
  inst.seed = seed;
  inst.refresh_derived();
  return inst;
}

/// G_j(x) = [x; a_j^T x],  F_i(z, y) = lambda1 (a_i^T z - y)^2 + a_i^T z,
/// h = lambda2 ||.||_1, with n1 = n2 = samples.
class MeanVarianceOracle final : public CompositionalOracle {
 public:
  explicit MeanVarianceOracle(const MeanVarInstance& inst)
      : data_(inst.data), lambda1_(inst.lambda1), lambda2_(inst.lambda2) {}

  std::size_t outer_count() const override { return static_cast<std::size_t>(data_.cols()); }
  std::size_t inner_count() const override { return static_cast<std::size_t>(data_.cols()); }
  std::size_t dim_x() const override { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim_u() const override { return dim_x() + 1; }

 protected:
  Vector do_inner_value(std::size_t j, const Vector& x) const override {
    Vector out(x.size() + 1);
    out << x, column(j).dot(x);
    return out;
  }
  Matrix do_inner_jacobian(std::size_t j, const Vector&) const override {
    const Eigen::Index d = data_.rows();
    Matrix out(d + 1, d);
    out << Matrix::Identity(d, d), column(j).transpose();
    return out;
  }
  double do_outer_value(std::size_t i, const Vector& u) const override {
    const Eigen::Index d = data_.rows();
    const double az = column(i).dot(u.head(d));
    const double r = az - u[d];
    return lambda1_ * r * r + az;
  }
  Vector do_outer_gradient(std::size_t i, const Vector& u) const override {
    const Eigen::Index d = data_.rows();
    const double r = column(i).dot(u.head(d)) - u[d];
    Vector out(d + 1);
    out << (2.0 * lambda1_ * r + 1.0) * column(i), -2.0 * lambda1_ * r;
    return out;
  }
  Vector do_prox_h(const Vector& v, double step) const override {
    return prox_l1(v, step * lambda2_);
  }
  double do_h_value(const Vector& x) const override { return lambda2_ * x.lpNorm<1>(); }

 private:
  [[nodiscard]] Matrix::ConstColXpr column(std::size_t i) const {
    return data_.col(static_cast<Eigen::Index>(i));
  }

  Matrix data_;
  double lambda1_;
  double lambda2_;
};

struct SpectrumBounds {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

inline SpectrumBounds covariance_spectrum(const MeanVarInstance& inst) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(inst.quad_matrix, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("covariance_spectrum: eigen-decomposition failed");
  }
  return {eig.eigenvalues().minCoeff(), eig.eigenvalues().maxCoeff()};
}

/// L = 2 lambda1 lambda_max(M), mu = 2 lambda1 lambda_min(M); gradient bounds
/// of the outer components are taken over the image of the ball of radius
/// `ball_radius` around the origin. mu is reported as 0 when samples <= dim
/// or lambda_min(M) is numerically zero.
inline SmoothnessProfile explicit_constants(const MeanVarInstance& inst, double ball_radius) {
  if (!(ball_radius > 0.0)) {
    throw std::invalid_argument("explicit_constants: ball_radius must be positive");
  }
  const SpectrumBounds spec = covariance_spectrum(inst);
  SmoothnessProfile p;
  p.L = 2.0 * inst.lambda1 * spec.lambda_max;
  const bool degenerate =
      inst.samples() <= inst.dim() || spec.lambda_min <= 1e-12 * spec.lambda_max;
  p.mu = degenerate ? 0.0 : 2.0 * inst.lambda1 * spec.lambda_min;
  p.L_G = 0.0;

  double max_sq = 0.0;
  double bf_sq = 0.0;
  const double l1 = inst.lambda1;
  for (Eigen::Index i = 0; i < inst.data.cols(); ++i) {
    const double a_sq = inst.data.col(i).squaredNorm();
    max_sq = std::max(max_sq, a_sq);
    // grad F_i at G(x) is [(2 l1 r + 1) a_i; -2 l1 r] with r = (a_i - abar)^T x.
    const double r_max = ball_radius * (inst.data.col(i) - inst.mean_col).norm();
    for (const double r : {r_max, -r_max}) {
      const double s = 2.0 * l1 * r + 1.0;
      bf_sq = std::max(bf_sq, s * s * a_sq + 4.0 * l1 * l1 * r * r);
    }
  }
  p.B_G = std::sqrt(1.0 + max_sq);
  p.L_F = 2.0 * l1 * (1.0 + max_sq);
  p.B_F = std::sqrt(bf_sq);
  return p;
}

/// Lipschitz constant of x -> grad G_j(x)^T grad F_i(G(x)) over all pairs
/// (i, j): 2 lambda1 max ||a_i - a_j|| ||a_i - abar||.
inline double component_smoothness(const MeanVarInstance& inst) {
  double best = 0.0;
  const Eigen::Index n = inst.data.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dev = (inst.data.col(i) - inst.mean_col).norm();
    for (Eigen::Index j = 0; j < n; ++j) {
      best = std::max(best, dev * (inst.data.col(i) - inst.data.col(j)).norm());
    }
  }
  return 2.0 * inst.lambda1 * best;
}

struct ReferenceSolution {
  Vector x_star;
  double h_star = 0.0;
  double residual = 0.0;
  double tol = 0.0;
};

/// Minimizes the dense reformulation with restarted FISTA until the
/// prox-gradient residual is <= tol.
inline ReferenceSolution reference_optimum(const MeanVarInstance& inst, double tol,
                                           std::size_t max_iter = 2000000) {
  const SpectrumBounds spec = covariance_spectrum(inst);
  const double L = std::max(2.0 * inst.lambda1 * spec.lambda_max, 1e-300);
  const double lam = inst.lambda2;
  auto grad = [&](const Vector& x) { return inst.smooth_gradient(x); };
  auto prox = [&](const Vector& v, double step) { return prox_l1(v, step * lam); };
  auto value = [&](const Vector& x) { return inst.objective(x); };
  ProxGradResult r = fista_restart(grad, prox, value, L,
                                   Vector::Zero(static_cast<Eigen::Index>(inst.dim())), tol,
                                   max_iter);
  return ReferenceSolution{std::move(r.x), r.value, r.residual, tol};
}

}  // namespace compkat

#endif  // COMPKAT_PROBLEMS_MEAN_VARIANCE_HPP

#ifndef COMPKAT_PROBLEMS_SYNTHETIC_HPP
#define COMPKAT_PROBLEMS_SYNTHETIC_HPP

#include "compkat/linalg.hpp"
#include "compkat/oracle.hpp"
#include "compkat/prox.hpp"
#include "compkat/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace compkat {

namespace detail {

inline double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }
inline double logistic(double t) {
  return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

/// prox of (mu/2)||.||^2 + lambda ||.||_1.
inline Vector prox_elastic(const Vector& v, double step, double mu, double lambda) {
  return prox_l1(v / (1.0 + step * mu), step * lambda / (1.0 + step * mu));
}

}  // namespace detail

struct NonlinearCompositionConfig {
  std::size_t n1 = 8;
  std::size_t n2 = 8;
  std::size_t dim_x = 4;
  std::size_t dim_u = 3;
  double linear_scale = 0.5;
  double wave_amplitude = 0.5;
  double wave_frequency = 1.0;
  double outer_weight = 1.0;
  double mu = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

/// Nonlinear two-level family with certifiable constants:
///
///   G_j(x)_r = (W_j x)_r + c_{jr} sin(v_{jr}^T x),
///   F_i(u)   = sum_k w_{ik} softplus(u_k - t_{ik}),  w_{ik} >= 0,
///   h        = (mu/2)||x||^2 + lambda ||x||_1.
class NonlinearComposition final : public CompositionalOracle {
 public:
  explicit NonlinearComposition(const NonlinearCompositionConfig& cfg) : cfg_(cfg) {
    if (cfg.n1 == 0 || cfg.n2 == 0 || cfg.dim_x == 0 || cfg.dim_u == 0) {
      throw std::invalid_argument("NonlinearComposition: sizes must be positive");
    }
    const auto dx = static_cast<Eigen::Index>(cfg.dim_x);
    const auto du = static_cast<Eigen::Index>(cfg.dim_u);
    const RandomStream root(cfg.seed);
    const double gs = 1.0 / std::sqrt(static_cast<double>(cfg.dim_x));
    for (std::size_t j = 0; j < cfg.n2; ++j) {
      RandomStream s = root.child(1, j);
      Matrix w(du, dx), v(du, dx);
      Vector c(du);
      for (Eigen::Index r = 0; r < du; ++r) {
        for (Eigen::Index k = 0; k < dx; ++k) w(r, k) = cfg.linear_scale * gs * s.standard_normal();
      }
      for (Eigen::Index r = 0; r < du; ++r) {
        for (Eigen::Index k = 0; k < dx; ++k) v(r, k) = cfg.wave_frequency * gs * s.standard_normal();
      }
      for (Eigen::Index r = 0; r < du; ++r) c[r] = cfg.wave_amplitude * (2.0 * s.uniform01() - 1.0);
      linear_.push_back(std::move(w));
      waves_.push_back(std::move(v));
      amplitude_.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < cfg.n1; ++i) {
      RandomStream s = root.child(2, i);
      Vector w(du), t(du);
      for (Eigen::Index k = 0; k < du; ++k) w[k] = cfg.outer_weight * s.uniform01();
      for (Eigen::Index k = 0; k < du; ++k) t[k] = s.standard_normal();
      weight_.push_back(std::move(w));
      shift_.push_back(std::move(t));
    }
  }

  std::size_t outer_count() const override { return cfg_.n1; }
  std::size_t inner_count() const override { return cfg_.n2; }
  std::size_t dim_x() const override { return cfg_.dim_x; }
  std::size_t dim_u() const override { return cfg_.dim_u; }

  /// Certified constants; L = B_F L_G + B_G^2 L_F bounds the smoothness of
  /// x -> grad G_j(x)^T grad F_i(G(x)) for every pair (i, j).
  [[nodiscard]] SmoothnessProfile certified_profile() const {
    SmoothnessProfile p;
    for (std::size_t j = 0; j < cfg_.n2; ++j) {
      const Eigen::JacobiSVD<Matrix> svd(linear_[j]);
      double wave_sq = 0.0;
      double curv_sq = 0.0;
      for (Eigen::Index r = 0; r < waves_[j].rows(); ++r) {
        const double c2 = amplitude_[j][r] * amplitude_[j][r];
        const double v2 = waves_[j].row(r).squaredNorm();
        wave_sq += c2 * v2;
        curv_sq += c2 * v2 * v2;
      }
      p.B_G = std::max(p.B_G, svd.singularValues()[0] + std::sqrt(wave_sq));
      p.L_G = std::max(p.L_G, std::sqrt(curv_sq));
    }
    for (std::size_t i = 0; i < cfg_.n1; ++i) {
      p.B_F = std::max(p.B_F, weight_[i].norm());
      p.L_F = std::max(p.L_F, 0.25 * weight_[i].maxCoeff());
    }
    p.L = p.B_F * p.L_G + p.B_G * p.B_G * p.L_F;
    p.mu = cfg_.mu;
    return p;
  }

 protected:
  Vector do_inner_value(std::size_t j, const Vector& x) const override {
    const Vector phase = waves_[j] * x;
    return linear_[j] * x + amplitude_[j].cwiseProduct(phase.array().sin().matrix());
  }
  Matrix do_inner_jacobian(std::size_t j, const Vector& x) const override {
    const Vector phase = waves_[j] * x;
    const Vector scale = amplitude_[j].cwiseProduct(phase.array().cos().matrix());
    return linear_[j] + scale.asDiagonal() * waves_[j];
  }
  double do_outer_value(std::size_t i, const Vector& u) const override {
    double s = 0.0;
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      s += weight_[i][k] * detail::softplus(u[k] - shift_[i][k]);
    }
    return s;
  }
  Vector do_outer_gradient(std::size_t i, const Vector& u) const override {
    Vector g(u.size());
    for (Eigen::Index k = 0; k < u.size(); ++k) {
      g[k] = weight_[i][k] * detail::logistic(u[k] - shift_[i][k]);
    }
    return g;
  }
  Vector do_prox_h(const Vector& v, double step) const override {
    return detail::prox_elastic(v, step, cfg_.mu, cfg_.lambda);
  }
  double do_h_value(const Vector& x) const override {
    return 0.5 * cfg_.mu * x.squaredNorm() + cfg_.lambda * x.lpNorm<1>();
  }

 private:
  NonlinearCompositionConfig cfg_;
  std::vector<Matrix> linear_;
  std::vector<Matrix> waves_;
  std::vector<Vector> amplitude_;
  std::vector<Vector> weight_;
  std::vector<Vector> shift_;
};

/// G_1(x) = x, F_1(u) = ||u||^2 / 2, h = (mu/2)||x||^2 + lambda ||x||_1.
class IdentityQuadratic final : public CompositionalOracle {
 public:
  IdentityQuadratic(std::size_t dim, double mu, double lambda)
      : dim_(dim), mu_(mu), lambda_(lambda) {
    if (dim == 0) throw std::invalid_argument("IdentityQuadratic: dim must be positive");
  }

  std::size_t outer_count() const override { return 1; }
  std::size_t inner_count() const override { return 1; }
  std::size_t dim_x() const override { return dim_; }
  std::size_t dim_u() const override { return dim_; }

  [[nodiscard]] SmoothnessProfile profile() const {
    SmoothnessProfile p;
    p.L = 1.0;
    p.mu = mu_;
    p.L_F = 1.0;
    p.B_G = 1.0;
    return p;
  }

 protected:
  Vector do_inner_value(std::size_t, const Vector& x) const override { return x; }
  Matrix do_inner_jacobian(std::size_t, const Vector&) const override {
    const auto d = static_cast<Eigen::Index>(dim_);
    return Matrix::Identity(d, d);
  }
  double do_outer_value(std::size_t, const Vector& u) const override {
    return 0.5 * u.squaredNorm();
  }
  Vector do_outer_gradient(std::size_t, const Vector& u) const override { return u; }
  Vector do_prox_h(const Vector& v, double step) const override {
    return detail::prox_elastic(v, step, mu_, lambda_);
  }
  double do_h_value(const Vector& x) const override {
    return 0.5 * mu_ * x.squaredNorm() + lambda_ * x.lpNorm<1>();
  }

 private:
  std::size_t dim_;
  double mu_;
  double lambda_;
};

}  // namespace compkat

#endif  // COMPKAT_PROBLEMS_SYNTHETIC_HPP

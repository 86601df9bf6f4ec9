#ifndef COMPKAT_TRANSFORMS_HPP
#define COMPKAT_TRANSFORMS_HPP

#include "compkat/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace compkat {

/// Adds (weight/2)||x - center||^2 to h, keeping the base prox.
///
/// prox of h + (w/2)||.-c||^2 with step s is the base prox with step
/// 1/(1/s + w) at (v/s + w c)/(1/s + w). The base oracle must outlive this.
class ProximalShift final : public CompositionalOracle {
 public:
  ProximalShift(const CompositionalOracle& base, double weight, Vector center)
      : base_(base), weight_(weight), center_(std::move(center)) {
    if (weight < 0.0) throw std::invalid_argument("ProximalShift: weight must be >= 0");
    require_length(center_, base.dim_x(), "ProximalShift center");
  }

  std::size_t outer_count() const override { return base_.outer_count(); }
  std::size_t inner_count() const override { return base_.inner_count(); }
  std::size_t dim_x() const override { return base_.dim_x(); }
  std::size_t dim_u() const override { return base_.dim_u(); }

  [[nodiscard]] double weight() const { return weight_; }
  [[nodiscard]] const Vector& center() const { return center_; }

 protected:
  Vector do_inner_value(std::size_t j, const Vector& x) const override {
    return base_.inner_value(j, x);
  }
  Matrix do_inner_jacobian(std::size_t j, const Vector& x) const override {
    return base_.inner_jacobian(j, x);
  }
  double do_outer_value(std::size_t i, const Vector& u) const override {
    return base_.outer_value(i, u);
  }
  Vector do_outer_gradient(std::size_t i, const Vector& u) const override {
    return base_.outer_gradient(i, u);
  }
  Vector do_prox_h(const Vector& v, double step) const override {
    if (weight_ == 0.0) return base_.prox_h(v, step);
    const double curvature = 1.0 / step + weight_;
    return base_.prox_h((v / step + weight_ * center_) / curvature, 1.0 / curvature);
  }
  double do_h_value(const Vector& x) const override {
    return base_.h_value(x) + 0.5 * weight_ * (x - center_).squaredNorm();
  }

 private:
  const CompositionalOracle& base_;
  double weight_;
  Vector center_;
};

/// Moves (mu/2)||x||^2 from the smooth part into h.
///
/// G'_j(x) = [G_j(x); x], F'_i(u, w) = F_i(u) - (mu/2)||w||^2 and
/// h' = h + (mu/2)||.||^2, so F' o G' + h' equals F o G + h pointwise while
/// h' carries the strong convexity the solvers require.
class StrongConvexityShift final : public CompositionalOracle {
 public:
  StrongConvexityShift(const CompositionalOracle& base, double mu)
      : base_(base), mu_(mu), h_(base, mu, Vector::Zero(static_cast<Eigen::Index>(base.dim_x()))) {
    if (mu < 0.0) throw std::invalid_argument("StrongConvexityShift: mu must be >= 0");
  }

  std::size_t outer_count() const override { return base_.outer_count(); }
  std::size_t inner_count() const override { return base_.inner_count(); }
  std::size_t dim_x() const override { return base_.dim_x(); }
  std::size_t dim_u() const override { return base_.dim_u() + base_.dim_x(); }

  [[nodiscard]] double mu() const { return mu_; }

 protected:
  Vector do_inner_value(std::size_t j, const Vector& x) const override {
    Vector out(static_cast<Eigen::Index>(dim_u()));
    out << base_.inner_value(j, x), x;
    return out;
  }
  Matrix do_inner_jacobian(std::size_t j, const Vector& x) const override {
    const auto nx = static_cast<Eigen::Index>(dim_x());
    Matrix out(static_cast<Eigen::Index>(dim_u()), nx);
    out << base_.inner_jacobian(j, x), Matrix::Identity(nx, nx);
    return out;
  }
  double do_outer_value(std::size_t i, const Vector& u) const override {
    const auto nu = static_cast<Eigen::Index>(base_.dim_u());
    return base_.outer_value(i, u.head(nu)) - 0.5 * mu_ * u.tail(u.size() - nu).squaredNorm();
  }
  Vector do_outer_gradient(std::size_t i, const Vector& u) const override {
    const auto nu = static_cast<Eigen::Index>(base_.dim_u());
    Vector out(u.size());
    out << base_.outer_gradient(i, u.head(nu)), -mu_ * u.tail(u.size() - nu);
    return out;
  }
  Vector do_prox_h(const Vector& v, double step) const override { return h_.prox_h(v, step); }
  double do_h_value(const Vector& x) const override { return h_.h_value(x); }

 private:
  const CompositionalOracle& base_;
  double mu_;
  ProximalShift h_;
};

/// Constants of StrongConvexityShift(base, profile.mu). B_F is re-derived for
/// the extra block over the same ball of radius `ball_radius`.
inline SmoothnessProfile shifted_profile(const SmoothnessProfile& p, double ball_radius) {
  SmoothnessProfile out = p;
  out.B_G = std::sqrt(p.B_G * p.B_G + 1.0);
  out.L_F = std::max(p.L_F, p.mu);
  out.B_F = std::sqrt(p.B_F * p.B_F + p.mu * p.mu * ball_radius * ball_radius);
  return out;
}

}  // namespace compkat

#endif  // COMPKAT_TRANSFORMS_HPP

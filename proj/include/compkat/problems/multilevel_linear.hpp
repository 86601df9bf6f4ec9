#ifndef COMPKAT_PROBLEMS_MULTILEVEL_LINEAR_HPP
#define COMPKAT_PROBLEMS_MULTILEVEL_LINEAR_HPP

#include "compkat/fista.hpp"
#include "compkat/linalg.hpp"
#include "compkat/multilevel.hpp"
#include "compkat/problems/synthetic.hpp"
#include "compkat/random.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace compkat {

struct MultiLevelLinearConfig {
  std::vector<std::size_t> counts;  // n_1..n_p
  std::vector<std::size_t> dims;    // N_1..N_{p+1}, last entry 1
  std::uint64_t seed = 0;
  double mu = 0.0;
  double lambda = 0.0;
  double spread = 0.3;     // relative size of the per-component perturbation
  bool identical = false;  // all components within a level coincide
};

/// Affine inner levels f_{k,j}(u) = W_{k,j} u + c_{k,j} with ||W_{k,j}||_2 = 1,
/// last level f_{p,j}(w) = ||w - t_j||^2 / 2, h = (mu/2)||x||^2 + lambda ||x||_1.
class MultiLevelLinear final : public MultiLevelOracle {
 public:
  explicit MultiLevelLinear(MultiLevelLinearConfig cfg) : cfg_(std::move(cfg)) {
    const std::size_t p = cfg_.counts.size();
    if (p < 2) throw std::invalid_argument("MultiLevelLinear: requires at least two levels");
    if (cfg_.dims.size() != p + 1) {
      throw DimensionError("MultiLevelLinear: dims must have levels + 1 entries");
    }
    if (cfg_.dims.back() != 1) throw DimensionError("MultiLevelLinear: last dim must be 1");
    if (cfg_.dims[p - 1] == 0) throw DimensionError("MultiLevelLinear: dims must be positive");
    for (std::size_t k = 0; k < p; ++k) {
      if (cfg_.counts[k] == 0 || cfg_.dims[k] == 0) {
        throw std::invalid_argument("MultiLevelLinear: counts and dims must be positive");
      }
    }
    const RandomStream root(cfg_.seed);
    slope_.resize(p - 1);
    offset_.resize(p - 1);
    for (std::size_t k = 0; k + 1 < p; ++k) {
      const auto rows = static_cast<Eigen::Index>(cfg_.dims[k + 1]);
      const auto cols = static_cast<Eigen::Index>(cfg_.dims[k]);
      RandomStream base_stream = root.child(k, 0);
      const Matrix base = gaussian(base_stream, rows, cols);
      for (std::size_t j = 0; j < cfg_.counts[k]; ++j) {
        RandomStream s = root.child(k, cfg_.identical ? 1 : j + 1);
        Matrix w = base + cfg_.spread * gaussian(s, rows, cols);
        w /= Eigen::JacobiSVD<Matrix>(w).singularValues()[0];
        Vector c(rows);
        for (Eigen::Index r = 0; r < rows; ++r) c[r] = 0.5 * s.standard_normal();
        slope_[k].push_back(std::move(w));
        offset_[k].push_back(std::move(c));
      }
    }
    const auto nt = static_cast<Eigen::Index>(cfg_.dims[p - 1]);
    for (std::size_t j = 0; j < cfg_.counts[p - 1]; ++j) {
      RandomStream s = root.child(p - 1, cfg_.identical ? 1 : j + 1);
      Vector t(nt);
      for (Eigen::Index r = 0; r < nt; ++r) t[r] = s.standard_normal();
      target_.push_back(std::move(t));
    }
  }

  std::size_t levels() const override { return cfg_.counts.size(); }
  std::size_t count(std::size_t level) const override { return cfg_.counts.at(level); }
  std::size_t dim(std::size_t k) const override { return cfg_.dims.at(k); }

  /// phi_{p-1}(x) = P x + q with the averaged affine levels.
  [[nodiscard]] std::pair<Matrix, Vector> affine_chain() const {
    const auto d0 = static_cast<Eigen::Index>(cfg_.dims[0]);
    Matrix P = Matrix::Identity(d0, d0);
    Vector q = Vector::Zero(d0);
    for (std::size_t k = 0; k + 1 < levels(); ++k) {
      Matrix wbar = Matrix::Zero(slope_[k][0].rows(), slope_[k][0].cols());
      Vector cbar = Vector::Zero(slope_[k][0].rows());
      for (std::size_t j = 0; j < slope_[k].size(); ++j) {
        wbar += slope_[k][j];
        cbar += offset_[k][j];
      }
      wbar /= static_cast<double>(slope_[k].size());
      cbar /= static_cast<double>(slope_[k].size());
      P = (wbar * P).eval();
      q = (wbar * q + cbar).eval();
    }
    return {P, q};
  }

  [[nodiscard]] Vector mean_target() const {
    Vector t = Vector::Zero(target_[0].size());
    for (const auto& tj : target_) t += tj;
    return t / static_cast<double>(target_.size());
  }

  /// Exact per-level constants. The last level has L_p = 1; its Jacobian
  /// bound B_p cancels from every batch formula and is reported as 1.
  [[nodiscard]] MultiLevelProfile profile() const {
    MultiLevelProfile out;
    const std::size_t p = levels();
    for (std::size_t k = 0; k + 1 < p; ++k) {
      double b = 0.0;
      for (const auto& w : slope_[k]) b = std::max(b, Eigen::JacobiSVD<Matrix>(w).singularValues()[0]);
      out.bound.push_back(b);
      out.lipschitz.push_back(0.0);
    }
    out.bound.push_back(1.0);
    out.lipschitz.push_back(1.0);
    const Matrix P = affine_chain().first;
    const double s = Eigen::JacobiSVD<Matrix>(P).singularValues()[0];
    out.L = s * s;
    out.mu = cfg_.mu;
    return out;
  }

  /// H(x) through the dense affine chain.
  [[nodiscard]] double dense_objective(const Vector& x) const {
    const auto [P, q] = affine_chain();
    const Vector w = P * x + q;
    double s = 0.0;
    for (const auto& t : target_) s += 0.5 * (w - t).squaredNorm();
    return s / static_cast<double>(target_.size()) + do_h_value(x);
  }

  [[nodiscard]] Vector dense_gradient(const Vector& x) const {
    const auto [P, q] = affine_chain();
    return P.transpose() * (P * x + q - mean_target());
  }

  /// Minimizer of the dense form by restarted FISTA.
  [[nodiscard]] ProxGradResult dense_reference(double tol) const {
    const double L = std::max(profile().L, 1e-300);
    auto grad = [&](const Vector& x) { return dense_gradient(x); };
    auto prox = [&](const Vector& v, double step) { return do_prox_h(v, step); };
    auto value = [&](const Vector& x) { return dense_objective(x); };
    return fista_restart(grad, prox, value, L,
                         Vector::Zero(static_cast<Eigen::Index>(cfg_.dims[0])), tol);
  }

 protected:
  Vector do_level_value(std::size_t level, std::size_t j, const Vector& u) const override {
    if (level + 1 < levels()) return slope_[level][j] * u + offset_[level][j];
    return Vector::Constant(1, 0.5 * (u - target_[j]).squaredNorm());
  }
  Matrix do_level_jacobian(std::size_t level, std::size_t j, const Vector& u) const override {
    if (level + 1 < levels()) return slope_[level][j];
    return as_row(u - target_[j]);
  }
  Vector do_prox_h(const Vector& v, double step) const override {
    return detail::prox_elastic(v, step, cfg_.mu, cfg_.lambda);
  }
  double do_h_value(const Vector& x) const override {
    return 0.5 * cfg_.mu * x.squaredNorm() + cfg_.lambda * x.lpNorm<1>();
  }

 private:
  static Matrix gaussian(RandomStream& s, Eigen::Index rows, Eigen::Index cols) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = s.standard_normal();
    }
    return m;
  }

  MultiLevelLinearConfig cfg_;
  std::vector<std::vector<Matrix>> slope_;
  std::vector<std::vector<Vector>> offset_;
  std::vector<Vector> target_;
};

inline MultiLevelLinear make_multilevel_linear(MultiLevelLinearConfig cfg) {
  return MultiLevelLinear(std::move(cfg));
}

}  // namespace compkat

#endif  // COMPKAT_PROBLEMS_MULTILEVEL_LINEAR_HPP

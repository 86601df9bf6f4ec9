#ifndef COMPKAT_MULTILEVEL_HPP
#define COMPKAT_MULTILEVEL_HPP

#include "compkat/counters.hpp"
#include "compkat/linalg.hpp"
#include "compkat/oracle.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace compkat {

/// p-level finite-sum composition
///
///   H(x) = (f_p o ... o f_1)(x) + h(x),   f_k = (1/n_k) sum_j f_{k,j},
///
/// with f_{k,j} : R^{N_k} -> R^{N_{k+1}} and N_{p+1} = 1. Levels are indexed
/// 0..p-1 here; dims() has p+1 entries with dims().back() == 1.
class MultiLevelOracle {
 public:
  virtual ~MultiLevelOracle() = default;

  [[nodiscard]] virtual std::size_t levels() const = 0;
  [[nodiscard]] virtual std::size_t count(std::size_t level) const = 0;
  /// N_{k+1} for k = 0..p; dim(0) is the decision dimension.
  [[nodiscard]] virtual std::size_t dim(std::size_t k) const = 0;

  [[nodiscard]] Vector level_value(std::size_t level, std::size_t j, const Vector& u) const {
    check(level, j);
    require_length(u, dim(level), "level_value u");
    return do_level_value(level, j, u);
  }
  /// Jacobian, dim(level+1) x dim(level).
  [[nodiscard]] Matrix level_jacobian(std::size_t level, std::size_t j, const Vector& u) const {
    check(level, j);
    require_length(u, dim(level), "level_jacobian u");
    return do_level_jacobian(level, j, u);
  }
  [[nodiscard]] Vector prox_h(const Vector& v, double step) const {
    if (!(step > 0.0)) throw std::invalid_argument("prox_h: step must be positive");
    require_length(v, dim(0), "prox_h v");
    return do_prox_h(v, step);
  }
  [[nodiscard]] double h_value(const Vector& x) const {
    require_length(x, dim(0), "h_value x");
    return do_h_value(x);
  }

 protected:
  virtual Vector do_level_value(std::size_t level, std::size_t j, const Vector& u) const = 0;
  virtual Matrix do_level_jacobian(std::size_t level, std::size_t j, const Vector& u) const = 0;
  virtual Vector do_prox_h(const Vector& v, double step) const = 0;
  virtual double do_h_value(const Vector& x) const = 0;

 private:
  void check(std::size_t level, std::size_t j) const {
    if (level >= levels()) {
      throw std::out_of_range("level " + std::to_string(level) + " out of range");
    }
    if (j >= count(level)) {
      throw std::out_of_range("component " + std::to_string(j) + " out of range at level " +
                              std::to_string(level));
    }
  }
};

/// Per-level constants: f_{k,j} is lipschitz[k]-smooth with a bound[k]-bounded
/// Jacobian; phi_p is L-smooth; h is mu-strongly convex.
struct MultiLevelProfile {
  double L = 0.0;
  double mu = 0.0;
  std::vector<double> bound;
  std::vector<double> lipschitz;

  [[nodiscard]] std::size_t levels() const { return bound.size(); }

  /// gamma_k = prod_{i<=k} B_i, k one-based; gamma(0) = 1.
  [[nodiscard]] double gamma(std::size_t k) const {
    double g = 1.0;
    for (std::size_t i = 0; i < k; ++i) g *= bound.at(i);
    return g;
  }

  /// ell_k = sum_{i<=k} L_i (prod_{j<i} B_j^2)(prod_{i<j<=k} B_j), k one-based.
  [[nodiscard]] double ell(std::size_t k) const {
    double total = 0.0;
    for (std::size_t i = 1; i <= k; ++i) {
      double term = lipschitz.at(i - 1);
      for (std::size_t j = 1; j < i; ++j) term *= bound[j - 1] * bound[j - 1];
      for (std::size_t j = i + 1; j <= k; ++j) term *= bound[j - 1];
      total += term;
    }
    return total;
  }
};

/// Charges level values to inner_value, Jacobians of levels below the last to
/// inner_jac, and last-level Jacobians to outer_grad. For p = 2 this is the
/// two-level accounting exactly.
class CountedMultiLevel {
 public:
  CountedMultiLevel(const MultiLevelOracle& oracle, OracleCounters& counters)
      : oracle_(&oracle), counters_(&counters) {}

  [[nodiscard]] const MultiLevelOracle& base() const { return *oracle_; }
  [[nodiscard]] OracleCounters& counters() const { return *counters_; }
  [[nodiscard]] std::size_t levels() const { return oracle_->levels(); }
  [[nodiscard]] std::size_t count(std::size_t level) const { return oracle_->count(level); }
  [[nodiscard]] std::size_t dim(std::size_t k) const { return oracle_->dim(k); }

  [[nodiscard]] Vector level_value(std::size_t level, std::size_t j, const Vector& u,
                                   std::uint64_t multiplicity = 1) const {
    counters_->inner_value += multiplicity;
    return oracle_->level_value(level, j, u);
  }
  [[nodiscard]] Matrix level_jacobian(std::size_t level, std::size_t j, const Vector& u,
                                      std::uint64_t multiplicity = 1) const {
    if (level + 1 == levels()) {
      counters_->outer_grad += multiplicity;
    } else {
      counters_->inner_jac += multiplicity;
    }
    return oracle_->level_jacobian(level, j, u);
  }
  [[nodiscard]] Vector prox_h(const Vector& v, double step) const {
    ++counters_->prox;
    return oracle_->prox_h(v, step);
  }
  [[nodiscard]] double h_value(const Vector& x) const { return oracle_->h_value(x); }

 private:
  const MultiLevelOracle* oracle_;
  OracleCounters* counters_;
};

/// f_k(u) averaged over all components of a level.
inline Vector level_mean_value(const CountedMultiLevel& oracle, std::size_t level,
                               const Vector& u) {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(oracle.dim(level + 1)));
  for (std::size_t j = 0; j < oracle.count(level); ++j) sum += oracle.level_value(level, j, u);
  return sum / static_cast<double>(oracle.count(level));
}

inline Matrix level_mean_jacobian(const CountedMultiLevel& oracle, std::size_t level,
                                  const Vector& u) {
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(oracle.dim(level + 1)),
                            static_cast<Eigen::Index>(oracle.dim(level)));
  for (std::size_t j = 0; j < oracle.count(level); ++j) sum += oracle.level_jacobian(level, j, u);
  return sum / static_cast<double>(oracle.count(level));
}

inline double multilevel_objective(const MultiLevelOracle& oracle, const Vector& x) {
  OracleCounters scratch;
  CountedMultiLevel counted(oracle, scratch);
  Vector u = x;
  for (std::size_t k = 0; k < oracle.levels(); ++k) u = level_mean_value(counted, k, u);
  return u[0] + oracle.h_value(x);
}

/// phi_p'(x)^T by the deterministic chain rule.
inline Vector multilevel_full_gradient(const MultiLevelOracle& oracle, const Vector& x) {
  OracleCounters scratch;
  CountedMultiLevel counted(oracle, scratch);
  Vector u = x;
  Matrix jac;
  for (std::size_t k = 0; k < oracle.levels(); ++k) {
    const Matrix level_jac = level_mean_jacobian(counted, k, u);
    jac = (k == 0) ? level_jac : chain_product(level_jac, jac);
    if (k + 1 < oracle.levels()) u = level_mean_value(counted, k, u);
  }
  return row_to_vector(jac);
}

/// Views a two-level problem as a p = 2 composition: level 0 holds the G_j,
/// level 1 the F_i with 1 x dim_u Jacobian rows.
class CompositionalAsMultiLevel final : public MultiLevelOracle {
 public:
  explicit CompositionalAsMultiLevel(const CompositionalOracle& base) : base_(base) {}

  std::size_t levels() const override { return 2; }
  std::size_t count(std::size_t level) const override {
    return level == 0 ? base_.inner_count() : base_.outer_count();
  }
  std::size_t dim(std::size_t k) const override {
    switch (k) {
      case 0: return base_.dim_x();
      case 1: return base_.dim_u();
      default: return 1;
    }
  }

 protected:
  Vector do_level_value(std::size_t level, std::size_t j, const Vector& u) const override {
    if (level == 0) return base_.inner_value(j, u);
    return Vector::Constant(1, base_.outer_value(j, u));
  }
  Matrix do_level_jacobian(std::size_t level, std::size_t j, const Vector& u) const override {
    if (level == 0) return base_.inner_jacobian(j, u);
    return as_row(base_.outer_gradient(j, u));
  }
  Vector do_prox_h(const Vector& v, double step) const override { return base_.prox_h(v, step); }
  double do_h_value(const Vector& x) const override { return base_.h_value(x); }

 private:
  const CompositionalOracle& base_;
};

/// Views a p = 2 composition as a two-level problem.
class MultiLevelAsCompositional final : public CompositionalOracle {
 public:
  explicit MultiLevelAsCompositional(const MultiLevelOracle& base) : base_(base) {
    if (base.levels() != 2) {
      throw std::invalid_argument("MultiLevelAsCompositional: requires exactly two levels");
    }
  }

  std::size_t outer_count() const override { return base_.count(1); }
  std::size_t inner_count() const override { return base_.count(0); }
  std::size_t dim_x() const override { return base_.dim(0); }
  std::size_t dim_u() const override { return base_.dim(1); }

 protected:
  Vector do_inner_value(std::size_t j, const Vector& x) const override {
    return base_.level_value(0, j, x);
  }
  Matrix do_inner_jacobian(std::size_t j, const Vector& x) const override {
    return base_.level_jacobian(0, j, x);
  }
  double do_outer_value(std::size_t i, const Vector& u) const override {
    return base_.level_value(1, i, u)[0];
  }
  Vector do_outer_gradient(std::size_t i, const Vector& u) const override {
    return row_to_vector(base_.level_jacobian(1, i, u));
  }
  Vector do_prox_h(const Vector& v, double step) const override { return base_.prox_h(v, step); }
  double do_h_value(const Vector& x) const override { return base_.h_value(x); }

 private:
  const MultiLevelOracle& base_;
};

/// Per-level constants of CompositionalAsMultiLevel.
inline MultiLevelProfile as_multilevel_profile(const SmoothnessProfile& p) {
  MultiLevelProfile out;
  out.L = p.L;
  out.mu = p.mu;
  out.bound = {p.B_G, p.B_F};
  out.lipschitz = {p.L_G, p.L_F};
  return out;
}

}  // namespace compkat

#endif  // COMPKAT_MULTILEVEL_HPP

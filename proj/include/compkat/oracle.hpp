#ifndef COMPKAT_ORACLE_HPP
#define COMPKAT_ORACLE_HPP

#include "compkat/counters.hpp"
#include "compkat/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace compkat {

/// Two-level finite-sum compositional problem
///
///   H(x) = (1/n1) sum_i F_i( (1/n2) sum_j G_j(x) ) + h(x),
///
/// with G_j : R^{dim_x} -> R^{dim_u} and F_i : R^{dim_u} -> R. Component
/// indices are zero-based. The public entry points validate indices and
/// shapes, then forward to the do_* hooks implemented by concrete problems.
/// Implementations must be pure and safe for concurrent const use.
class CompositionalOracle {
 public:
  virtual ~CompositionalOracle() = default;

  [[nodiscard]] virtual std::size_t outer_count() const = 0;  // n1
  [[nodiscard]] virtual std::size_t inner_count() const = 0;  // n2
  [[nodiscard]] virtual std::size_t dim_x() const = 0;
  [[nodiscard]] virtual std::size_t dim_u() const = 0;

  [[nodiscard]] Vector inner_value(std::size_t j, const Vector& x) const {
    check_inner(j);
    require_length(x, dim_x(), "inner_value x");
    return do_inner_value(j, x);
  }

  [[nodiscard]] Matrix inner_jacobian(std::size_t j, const Vector& x) const {
    check_inner(j);
    require_length(x, dim_x(), "inner_jacobian x");
    return do_inner_jacobian(j, x);
  }

  [[nodiscard]] double outer_value(std::size_t i, const Vector& u) const {
    check_outer(i);
    require_length(u, dim_u(), "outer_value u");
    return do_outer_value(i, u);
  }

  [[nodiscard]] Vector outer_gradient(std::size_t i, const Vector& u) const {
    check_outer(i);
    require_length(u, dim_u(), "outer_gradient u");
    return do_outer_gradient(i, u);
  }

  /// argmin_y h(y) + (1/(2 step)) ||y - v||^2.
  [[nodiscard]] Vector prox_h(const Vector& v, double step) const {
    if (!(step > 0.0)) throw std::invalid_argument("prox_h: step must be positive");
    require_length(v, dim_x(), "prox_h v");
    return do_prox_h(v, step);
  }

  [[nodiscard]] double h_value(const Vector& x) const {
    require_length(x, dim_x(), "h_value x");
    return do_h_value(x);
  }

 protected:
  virtual Vector do_inner_value(std::size_t j, const Vector& x) const = 0;
  virtual Matrix do_inner_jacobian(std::size_t j, const Vector& x) const = 0;
  virtual double do_outer_value(std::size_t i, const Vector& u) const = 0;
  virtual Vector do_outer_gradient(std::size_t i, const Vector& u) const = 0;
  virtual Vector do_prox_h(const Vector& v, double step) const = 0;
  virtual double do_h_value(const Vector& x) const = 0;

 private:
  void check_inner(std::size_t j) const {
    if (j >= inner_count()) {
      throw std::out_of_range("inner index " + std::to_string(j) + " out of range [0, " +
                              std::to_string(inner_count()) + ")");
    }
  }
  void check_outer(std::size_t i) const {
    if (i >= outer_count()) {
      throw std::out_of_range("outer index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(outer_count()) + ")");
    }
  }
};

/// Smoothness metadata. L bounds the smoothness of every f_i = F_i o G,
/// mu is the strong-convexity modulus of h (0 = merely convex).
struct SmoothnessProfile {
  double L = 0.0;
  double mu = 0.0;
  double L_F = 0.0;
  double B_F = 0.0;
  double L_G = 0.0;
  double B_G = 0.0;

  [[nodiscard]] double kappa() const { return L / mu; }

  void validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("SmoothnessProfile: L must be positive");
    if (mu < 0.0 || L_F < 0.0 || B_F < 0.0 || L_G < 0.0 || B_G < 0.0) {
      throw std::invalid_argument("SmoothnessProfile: constants must be nonnegative");
    }
    if (mu > 0.0 && L < mu) throw std::invalid_argument("SmoothnessProfile: requires L >= mu");
  }
};

/// Oracle view that charges every component evaluation to a counter set
/// owned by the caller. Solvers and estimators only see this type.
///
/// `multiplicity` charges one evaluation as that many draws; batches drawn
/// with replacement evaluate each distinct index once.
class CountedOracle {
 public:
  CountedOracle(const CompositionalOracle& oracle, OracleCounters& counters)
      : oracle_(&oracle), counters_(&counters) {}

  [[nodiscard]] const CompositionalOracle& base() const { return *oracle_; }
  [[nodiscard]] OracleCounters& counters() const { return *counters_; }

  [[nodiscard]] std::size_t outer_count() const { return oracle_->outer_count(); }
  [[nodiscard]] std::size_t inner_count() const { return oracle_->inner_count(); }
  [[nodiscard]] std::size_t dim_x() const { return oracle_->dim_x(); }
  [[nodiscard]] std::size_t dim_u() const { return oracle_->dim_u(); }

  [[nodiscard]] Vector inner_value(std::size_t j, const Vector& x,
                              std::uint64_t multiplicity = 1) const {
    counters_->inner_value += multiplicity;
    return oracle_->inner_value(j, x);
  }
  [[nodiscard]] Matrix inner_jacobian(std::size_t j, const Vector& x,
                              std::uint64_t multiplicity = 1) const {
    counters_->inner_jac += multiplicity;
    return oracle_->inner_jacobian(j, x);
  }
  [[nodiscard]] double outer_value(std::size_t i, const Vector& u) const {
    ++counters_->outer_value;
    return oracle_->outer_value(i, u);
  }
  [[nodiscard]] Vector outer_gradient(std::size_t i, const Vector& u,
                              std::uint64_t multiplicity = 1) const {
    counters_->outer_grad += multiplicity;
    return oracle_->outer_gradient(i, u);
  }
  [[nodiscard]] Vector prox_h(const Vector& v, double step) const {
    ++counters_->prox;
    return oracle_->prox_h(v, step);
  }
  [[nodiscard]] double h_value(const Vector& x) const { return oracle_->h_value(x); }

 private:
  const CompositionalOracle* oracle_;
  OracleCounters* counters_;
};

/// G(x) = (1/n2) sum_j G_j(x); charges n2 inner values.
inline Vector inner_mean(const CountedOracle& oracle, const Vector& x) {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(oracle.dim_u()));
  for (std::size_t j = 0; j < oracle.inner_count(); ++j) sum += oracle.inner_value(j, x);
  return sum / static_cast<double>(oracle.inner_count());
}

/// grad G(x); charges n2 inner Jacobians.
inline Matrix inner_jacobian_mean(const CountedOracle& oracle, const Vector& x) {
  Matrix sum = Matrix::Zero(static_cast<Eigen::Index>(oracle.dim_u()),
                            static_cast<Eigen::Index>(oracle.dim_x()));
  for (std::size_t j = 0; j < oracle.inner_count(); ++j) sum += oracle.inner_jacobian(j, x);
  return sum / static_cast<double>(oracle.inner_count());
}

/// grad F(u) = (1/n1) sum_i grad F_i(u); charges n1 outer gradients.
inline Vector outer_gradient_mean(const CountedOracle& oracle, const Vector& u) {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(oracle.dim_u()));
  for (std::size_t i = 0; i < oracle.outer_count(); ++i) sum += oracle.outer_gradient(i, u);
  return sum / static_cast<double>(oracle.outer_count());
}

/// [jac]^T g, routed through chain_product.
inline Vector transpose_apply(const Matrix& jac, const Vector& g) {
  return row_to_vector(chain_product(as_row(g), jac));
}

/// H(x); charges n2 inner values and n1 outer values.
inline double eval_objective(const CountedOracle& oracle, const Vector& x) {
  require_length(x, oracle.dim_x(), "eval_objective x");
  const Vector u = inner_mean(oracle, x);
  double sum = 0.0;
  for (std::size_t i = 0; i < oracle.outer_count(); ++i) sum += oracle.outer_value(i, u);
  return sum / static_cast<double>(oracle.outer_count()) + oracle.h_value(x);
}

inline double eval_objective(const CompositionalOracle& oracle, const Vector& x) {
  OracleCounters scratch;
  return eval_objective(CountedOracle(oracle, scratch), x);
}

/// Smooth part f(x) = F(G(x)) without h; uncounted helper.
inline double eval_smooth(const CompositionalOracle& oracle, const Vector& x) {
  return eval_objective(oracle, x) - oracle.h_value(x);
}

/// grad f(x) = [grad G(x)]^T grad F(G(x)); charges n2 values, n2 Jacobians, n1 gradients.
inline Vector full_gradient(const CountedOracle& oracle, const Vector& x) {
  require_length(x, oracle.dim_x(), "full_gradient x");
  const Vector u = inner_mean(oracle, x);
  const Matrix jac = inner_jacobian_mean(oracle, x);
  return transpose_apply(jac, outer_gradient_mean(oracle, u));
}

inline Vector full_gradient(const CompositionalOracle& oracle, const Vector& x) {
  OracleCounters scratch;
  return full_gradient(CountedOracle(oracle, scratch), x);
}

}  // namespace compkat

#endif  // COMPKAT_ORACLE_HPP

#ifndef COMPKAT_FISTA_HPP
#define COMPKAT_FISTA_HPP

#include "compkat/linalg.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace compkat {

/// Thrown when an iterative method stops on its iteration cap.
class IterationCapReached : public std::runtime_error {
 public:
  IterationCapReached(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                           std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}

  [[nodiscard]] double residual() const { return residual_; }
  [[nodiscard]] std::size_t iterations() const { return iterations_; }

 private:
  double residual_;
  std::size_t iterations_;
};

struct ProxGradResult {
  Vector x;
  double value = 0.0;
  double residual = 0.0;  // L * ||x - prox(x - grad/L, 1/L)||
  std::size_t iterations = 0;
};

/// Accelerated proximal gradient with gradient-based adaptive restart
/// (O'Donoghue and Candes). Stops when the prox-gradient fixed-point
/// residual, scaled by L, drops to `tol`.
///
/// grad(x) -> Vector, prox(v, step) -> Vector, value(x) -> double.
template <class Grad, class Prox, class Value>
ProxGradResult fista_restart(Grad&& grad, Prox&& prox, Value&& value, double L, Vector x0,
                             double tol, std::size_t max_iter = 1000000) {
  if (!(L > 0.0)) throw std::invalid_argument("fista_restart: L must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("fista_restart: tol must be positive");
  const double step = 1.0 / L;
  auto residual_at = [&](const Vector& x) {
    return L * (x - prox(Vector(x - step * grad(x)), step)).norm();
  };

  Vector x = std::move(x0);
  Vector y = x;
  double t = 1.0;
  double res = residual_at(x);
  std::size_t it = 0;
  while (res > tol) {
    if (it == max_iter) throw IterationCapReached("fista_restart: iteration cap", res, it);
    ++it;
    const Vector x_new = prox(Vector(y - step * grad(y)), step);
    if ((y - x_new).dot(x_new - x) > 0.0) {
      t = 1.0;
      y = x_new;
    } else {
      const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x_new + ((t - 1.0) / t_new) * (x_new - x);
      t = t_new;
    }
    x = x_new;
    res = residual_at(x);
  }
  return ProxGradResult{x, value(x), res, it};
}

}  // namespace compkat

#endif  // COMPKAT_FISTA_HPP

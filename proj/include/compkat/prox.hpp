#ifndef COMPKAT_PROX_HPP
#define COMPKAT_PROX_HPP

#include "compkat/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace compkat {

/// Componentwise soft-threshold: sign(v_i) * max(|v_i| - threshold, 0).
inline Vector prox_l1(const Vector& v, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("prox_l1: threshold must be >= 0");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]) - threshold;
    out[i] = mag > 0.0 ? std::copysign(mag, v[i]) : 0.0;
  }
  return out;
}

/// argmin_u lambda*||u||_1 + (mu_t/2)||u - x0||^2 + (1/(2 step))||u - v||^2.
inline Vector prox_l1_shifted(const Vector& v, double step, double lambda, double mu_t,
                              const Vector& x0) {
  if (!(step > 0.0)) throw std::invalid_argument("prox_l1_shifted: step must be positive");
  if (lambda < 0.0 || mu_t < 0.0) {
    throw std::invalid_argument("prox_l1_shifted: lambda and mu_t must be nonnegative");
  }
  require_length(x0, static_cast<std::size_t>(v.size()), "prox_l1_shifted x0");
  const double curvature = 1.0 / step + mu_t;
  const Vector center = (v / step + mu_t * x0) / curvature;
  return prox_l1(center, lambda / curvature);
}

}  // namespace compkat

#endif  // COMPKAT_PROX_HPP

#ifndef COMPKAT_COUNTERS_HPP
#define COMPKAT_COUNTERS_HPP

#include <cstdint>

namespace compkat {

/// Per-run oracle accounting. One unit is one component evaluation.
struct OracleCounters {
  std::uint64_t inner_value = 0;  // G_j(x)
  std::uint64_t inner_jac = 0;    // grad G_j(x)
  std::uint64_t outer_value = 0;  // F_i(u)
  std::uint64_t outer_grad = 0;   // grad F_i(u)
  std::uint64_t prox = 0;

  /// The headline complexity measure: value, Jacobian and gradient
  /// evaluations of components. Prox calls and outer values are excluded.
  [[nodiscard]] std::uint64_t oracle_units() const {
    return inner_value + inner_jac + outer_grad;
  }

  friend bool operator==(const OracleCounters&, const OracleCounters&) = default;
};

}  // namespace compkat

#endif  // COMPKAT_COUNTERS_HPP

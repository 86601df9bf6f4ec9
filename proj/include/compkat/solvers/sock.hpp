#ifndef COMPKAT_SOLVERS_SOCK_HPP
#define COMPKAT_SOLVERS_SOCK_HPP

#include "compkat/estimators.hpp"
#include "compkat/oracle.hpp"
#include "compkat/params.hpp"
#include "compkat/solvers/steps.hpp"
#include "compkat/trace.hpp"

namespace compkat {

/// Variance-reduced gradient at x for either option; batches come from
/// child streams of `stream` keyed by sample_tag.
inline Vector sock_gradient(const CountedOracle& oracle, const Snapshot& snap, const Vector& x,
                            const SockParams& p, const RandomStream& stream) {
  const Batch a = sample_level_batch(stream, 1, false, oracle.inner_count(), p.batch_inner_value);
  const Batch b = sample_level_batch(stream, 1, true, oracle.inner_count(), p.batch_inner_jac);
  const Vector ghat = estimate_inner(oracle, snap, x, a);
  const Matrix jhat = estimate_jacobian(oracle, snap, x, b);
  if (p.option == EstimatorOption::OptionI) return gradient_option1(oracle, ghat, jhat);
  const Batch c = sample_level_batch(stream, 2, true, oracle.outer_count(), p.batch_outer);
  return gradient_option2(oracle, snap, ghat, jhat, c);
}

/// S SoCK epochs from x0 against an existing loop state.
inline Vector sock_epochs(const CountedOracle& oracle, const SockParams& p, double L,
                          const Vector& x0, const RandomStream& stream, std::uint64_t stage,
                          LoopState& state) {
  return katyusha_epochs(
      p, L, x0, stream, stage, state,
      [&](const Vector& x) { return take_snapshot(oracle, x); },
      [&](const Snapshot& snap, const Vector& x, const RandomStream& s) {
        return sock_gradient(oracle, snap, x, p, s);
      },
      [&](const Vector& v, double step) { return oracle.prox_h(v, step); });
}

/// Strongly convex compositional Katyusha. Records the initial point as
/// snapshot 0 and x~^s after every epoch; trace.final_point is x~^S.
inline SolverTrace sock_solve(const CompositionalOracle& oracle, const SmoothnessProfile& profile,
                              const Vector& x0, const SockParams& params,
                              const RandomStream& stream, const SolveOptions& opts = {}) {
  params.validate(profile);
  require_length(x0, oracle.dim_x(), "sock_solve x0");
  OracleCounters counters;
  const Stopwatch clock(opts.timing);
  LoopState state;
  state.counters = &counters;
  state.clock = &clock;
  state.reference = opts.reference;
  state.on_inner = opts.on_inner;
  state.objective = opts.objective ? opts.objective
                                   : [&oracle](const Vector& x) { return eval_objective(oracle, x); };
  state.trace.warnings = sock_warnings(params, profile, oracle.outer_count());
  state.record(0, 0, x0);
  const CountedOracle counted(oracle, counters);
  state.trace.final_point = sock_epochs(counted, params, profile.L, x0, stream, 0, state);
  return std::move(state.trace);
}

}  // namespace compkat

#endif  // COMPKAT_SOLVERS_SOCK_HPP

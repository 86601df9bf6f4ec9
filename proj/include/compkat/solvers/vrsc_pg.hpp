#ifndef COMPKAT_SOLVERS_VRSC_PG_HPP
#define COMPKAT_SOLVERS_VRSC_PG_HPP

#include "compkat/params.hpp"
#include "compkat/solvers/sock.hpp"

namespace compkat {

/// Proximal SVRG-style baseline: each epoch takes a full snapshot, runs m'
/// steps x <- prox_h(x - eta g, eta) with the Option II estimator, and
/// restarts from the last iterate.
inline SolverTrace vrsc_pg_solve(const CompositionalOracle& oracle,
                                 const SmoothnessProfile& profile, const Vector& x0,
                                 const VrscParams& params, const RandomStream& stream,
                                 const SolveOptions& opts = {}) {
  params.validate();
  profile.validate();
  require_length(x0, oracle.dim_x(), "vrsc_pg_solve x0");
  OracleCounters counters;
  const Stopwatch clock(opts.timing);
  LoopState state;
  state.counters = &counters;
  state.clock = &clock;
  state.reference = opts.reference;
  state.objective = opts.objective ? opts.objective
                                   : [&oracle](const Vector& x) { return eval_objective(oracle, x); };
  state.record(0, 0, x0);

  SockParams est;
  est.option = EstimatorOption::OptionII;
  est.batch_inner_value = params.batch_inner_value;
  est.batch_inner_jac = params.batch_inner_jac;
  est.batch_outer = params.batch_outer;

  const CountedOracle counted(oracle, counters);
  Vector x = x0;
  for (std::uint64_t e = 0; e < params.epochs; ++e) {
    const Snapshot snap = take_snapshot(counted, x);
    const RandomStream epoch = stream.child(e);
    for (std::uint64_t j = 0; j < params.inner_length; ++j) {
      ++state.iteration;
      const Vector grad = sock_gradient(counted, snap, x, est, epoch.child(j));
      state.require_finite(grad);
      x = counted.prox_h(Vector(x - params.eta * grad), params.eta);
      state.require_finite(x);
    }
    state.record(0, e + 1, x);
  }
  state.trace.final_point = x;
  return std::move(state.trace);
}

}  // namespace compkat

#endif  // COMPKAT_SOLVERS_VRSC_PG_HPP

#ifndef COMPKAT_SOLVERS_MULTILEVEL_SOCK_HPP
#define COMPKAT_SOLVERS_MULTILEVEL_SOCK_HPP

#include "compkat/estimators.hpp"
#include "compkat/multilevel.hpp"
#include "compkat/params.hpp"
#include "compkat/solvers/steps.hpp"

namespace compkat {

struct MultiLevelParams {
  SockParams loop;  // m, tau1, tau2, theta, alpha, S; batch fields unused
  MultiLevelBatches batches;

  void validate(std::size_t levels) const {
    loop.validate();
    if (batches.a.size() + 1 != levels || batches.b.size() != levels) {
      throw std::invalid_argument("MultiLevelParams: batch lists do not match the level count");
    }
    for (auto v : batches.a) {
      if (v == 0) throw std::invalid_argument("MultiLevelParams: batch sizes must be positive");
    }
    for (auto v : batches.b) {
      if (v == 0) throw std::invalid_argument("MultiLevelParams: batch sizes must be positive");
    }
  }
};

/// SoCK loop parameters of the strongly convex theory plus the per-level
/// theoretical batches.
inline MultiLevelParams derive_multilevel_params_theoretical(const MultiLevelProfile& profile,
                                                             std::uint64_t S) {
  SmoothnessProfile flat;
  flat.L = profile.L;
  flat.mu = profile.mu;
  MultiLevelParams out;
  out.loop = derive_sock_params_theoretical(flat, EstimatorOption::OptionII, S);
  out.batches = derive_multilevel_batches_theoretical(profile);
  return out;
}

/// Same loop as sock_solve with the multi-level snapshot and estimator.
inline SolverTrace multilevel_sock_solve(const MultiLevelOracle& oracle,
                                         const MultiLevelProfile& profile, const Vector& x0,
                                         const MultiLevelParams& params,
                                         const RandomStream& stream,
                                         const SolveOptions& opts = {}) {
  params.validate(oracle.levels());
  if (!(profile.L > 0.0)) throw std::invalid_argument("multilevel_sock_solve: L must be positive");
  require_length(x0, oracle.dim(0), "multilevel_sock_solve x0");
  OracleCounters counters;
  const Stopwatch clock(opts.timing);
  LoopState state;
  state.counters = &counters;
  state.clock = &clock;
  state.reference = opts.reference;
  state.on_inner = opts.on_inner;
  state.objective = opts.objective
                        ? opts.objective
                        : [&oracle](const Vector& x) { return multilevel_objective(oracle, x); };
  state.record(0, 0, x0);
  const CountedMultiLevel counted(oracle, counters);
  state.trace.final_point = katyusha_epochs(
      params.loop, profile.L, x0, stream, 0, state,
      [&](const Vector& x) { return take_multilevel_snapshot(counted, x); },
      [&](const MultiLevelSnapshot& snap, const Vector& x, const RandomStream& s) {
        return multilevel_gradient(counted, snap, x, params.batches.a, params.batches.b, s);
      },
      [&](const Vector& v, double step) { return counted.prox_h(v, step); });
  return std::move(state.trace);
}

}  // namespace compkat

#endif  // COMPKAT_SOLVERS_MULTILEVEL_SOCK_HPP

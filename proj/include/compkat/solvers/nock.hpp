#ifndef COMPKAT_SOLVERS_NOCK_HPP
#define COMPKAT_SOLVERS_NOCK_HPP

#include "compkat/params.hpp"
#include "compkat/solvers/sock.hpp"
#include "compkat/transforms.hpp"

#include <cmath>
#include <optional>

namespace compkat {

enum class ParamMode { Theoretical, Practical };

enum class NockStageBatches { Capped, Heuristic, Theorem };

struct NockConfig {
  ParamMode mode = ParamMode::Practical;
  std::uint64_t S = kNockPracticalStages;
  EstimatorOption option = EstimatorOption::OptionII;
  NockStageBatches batches = NockStageBatches::Capped;

  static NockConfig practical() { return {}; }
  static NockConfig theoretical() {
    return {ParamMode::Theoretical, kNockTheoryStages, EstimatorOption::OptionII,
            NockStageBatches::Theorem};
  }
};

/// Constants of H_t = H + (mu_t/2)||x - x0||^2 with the quadratic in h: the
/// smooth part keeps its constants, the stage condition number is
/// (L + mu_t)/mu_t.
inline SmoothnessProfile nock_stage_profile(const SmoothnessProfile& base, double mu_t) {
  SmoothnessProfile p = base;
  p.L = base.L + mu_t;
  p.mu = mu_t;
  return p;
}

inline SockParams nock_stage_params(const SmoothnessProfile& base, double mu_t, std::size_t n,
                                    const NockConfig& cfg) {
  const SmoothnessProfile stage = nock_stage_profile(base, mu_t);
  if (cfg.batches == NockStageBatches::Theorem) {
    return cfg.mode == ParamMode::Theoretical
               ? derive_sock_params_theoretical(stage, cfg.option, cfg.S)
               : derive_sock_params_practical(stage, cfg.option, cfg.S);
  }
  SockParams p = cfg.mode == ParamMode::Theoretical
                     ? sock_steps_theoretical(stage, cfg.option, cfg.S)
                     : sock_steps_practical(stage, cfg.option, cfg.S);
  const StageBatches b = derive_nock_stage_batches(
      base, mu_t, n,
      cfg.batches == NockStageBatches::Heuristic ? NockBatchPolicy::Heuristic
                                                 : NockBatchPolicy::Capped);
  p.batch_inner_value = b.A;
  p.batch_inner_jac = b.B;
  p.batch_outer = cfg.option == EstimatorOption::OptionII ? b.C : 1;
  return p;
}

/// Non-strongly convex compositional Katyusha: stage t runs SoCK on
/// H + (mu_t/2)||x - x0||^2 from x_t, then halves mu_t. Records carry the
/// stage index and the objective of H itself.
inline SolverTrace nock_solve(const CompositionalOracle& oracle, const SmoothnessProfile& profile,
                              const Vector& x0, double mu0, std::uint64_t T,
                              const NockConfig& cfg, const RandomStream& stream,
                              const SolveOptions& opts = {}) {
  if (!(mu0 > 0.0)) throw std::invalid_argument("nock_solve: mu0 must be positive");
  if (T == 0) throw std::invalid_argument("nock_solve: T must be positive");
  if (cfg.S == 0) throw std::invalid_argument("nock_solve: S must be positive");
  require_length(x0, oracle.dim_x(), "nock_solve x0");
  profile.validate();

  OracleCounters counters;
  const Stopwatch clock(opts.timing);
  LoopState state;
  state.counters = &counters;
  state.clock = &clock;
  state.reference = opts.reference;
  state.on_inner = opts.on_inner;
  state.objective = opts.objective ? opts.objective
                                   : [&oracle](const Vector& x) { return eval_objective(oracle, x); };
  state.trace.mu_schedule = nock_mu_schedule(mu0, T);
  state.record(0, 0, x0);

  Vector x = x0;
  const std::size_t n = std::max(oracle.outer_count(), oracle.inner_count());
  for (std::uint64_t t = 0; t < T; ++t) {
    const double mu_t = state.trace.mu_schedule[t];
    const SockParams params = nock_stage_params(profile, mu_t, n, cfg);
    const SmoothnessProfile stage_profile = nock_stage_profile(profile, mu_t);
    params.validate(stage_profile);
    const ProximalShift shifted(oracle, mu_t, x0);
    const CountedOracle counted(shifted, counters);
    x = sock_epochs(counted, params, stage_profile.L, x, stream.child(t), t, state);
  }
  state.trace.final_point = x;
  return std::move(state.trace);
}

}  // namespace compkat

#endif  // COMPKAT_SOLVERS_NOCK_HPP

// compkat: instance generation, reference solutions, solver runs and sweeps.

#include "compkat/bench/config.hpp"
#include "compkat/bench/run_spec.hpp"
#include "compkat/bench/runner.hpp"
#include "compkat/io/json_io.hpp"
#include "compkat/problems/mean_variance.hpp"
#include "compkat/trace.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace compkat;

int cmd_gen(std::size_t dim, std::size_t samples, double noise_v, double lambda1, double lambda2,
            std::uint64_t seed, const std::string& out) {
  const MeanVarInstance inst = generate_instance(dim, samples, noise_v, lambda1, lambda2, seed);
  io::save_instance(inst, out);
  const SpectrumBounds spec = covariance_spectrum(inst);
  const SmoothnessProfile p = explicit_constants(inst, 1.0);
  std::cout << "L = " << format_real(p.L) << "\nmu = " << format_real(p.mu) << "\nkappa = "
            << (p.mu > 0.0 ? format_real(p.kappa()) : std::string("inf"))
            << "\nlambda_min(M) = " << format_real(spec.lambda_min) << '\n';
  return 0;
}

int cmd_refsol(const std::string& instance, double tol, const std::string& out) {
  const MeanVarInstance inst = io::load_instance(instance);
  const ReferenceSolution ref = reference_optimum(inst, tol);
  io::save_reference(ref, out);
  std::cout << "h_star = " << format_real(ref.h_star) << "\nresidual = "
            << format_real(ref.residual) << '\n';
  return 0;
}

struct SolveArgs {
  std::string instance;
  std::string algo = "gock";
  std::string mode = "practical";
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> snapshots;
  std::optional<std::uint64_t> stages;
  double eps = 1e-4;
  double mu0 = 1.0;
  std::string batch_policy;
  std::string reference;
  std::optional<double> ball_radius;
  std::string overrides;
  bool timing = false;
  std::string out;
};

int cmd_solve(const SolveArgs& a) {
  MeanVarInstance inst = io::load_instance(a.instance);
  std::optional<ReferenceSolution> ref;
  if (!a.reference.empty()) ref = io::load_reference(a.reference);
  double radius = 1.0;
  if (a.ball_radius) {
    radius = *a.ball_radius;
  } else if (ref) {
    radius = std::max(1.0, 10.0 * ref->x_star.norm());
  } else {
    radius = bench::default_ball_radius(inst);
  }
  const bench::InstanceContext ctx(std::move(inst), radius, ref);

  bench::RunSpec spec;
  spec.algo = bench::parse_algo(a.algo);
  spec.mode = bench::parse_mode(a.mode);
  spec.seed = a.seed;
  spec.snapshots = a.snapshots;
  spec.stages = a.stages;
  spec.eps = a.eps;
  spec.mu0 = a.mu0;
  if (!a.batch_policy.empty()) spec.batch_policy = bench::parse_batch_policy(a.batch_policy);
  spec.overrides = bench::parse_overrides(a.overrides);
  spec.timing = a.timing;

  const bench::JobResult r = bench::run_job(ctx, a.algo, spec);
  io::write_text_file(a.out, bench::trace_csv(r.records));
  if (!r.ok) {
    std::cerr << "solve failed: " << r.error << '\n';
    return 1;
  }
  return 0;
}

int cmd_bench(const std::string& config, const std::string& out, std::optional<unsigned> threads) {
  const bench::BenchConfig cfg = bench::load_bench_config(config);
  const bench::BenchOutcome res = bench::run_bench(cfg, out, threads);
  for (const auto& j : res.jobs) {
    if (!j.ok) std::cerr << j.run_id << " seed " << j.seed << ": " << j.error << '\n';
  }
  std::cout << res.jobs.size() << " runs, " << res.failures << " failed\n";
  return res.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compositional Katyusha solvers and benchmark harness"};
  app.require_subcommand(1);

  std::size_t dim = 0, samples = 0;
  double noise_v = 0.0, lambda1 = 1.0, lambda2 = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a mean-variance instance");
  gen->add_option("--dim", dim, "decision dimension")->required()->check(CLI::PositiveNumber);
  gen->add_option("--samples", samples, "number of columns")->required()->check(CLI::PositiveNumber);
  gen->add_option("--noise-v", noise_v, "covariance shift v")->check(CLI::NonNegativeNumber);
  gen->add_option("--lambda1", lambda1, "variance weight")->check(CLI::PositiveNumber);
  gen->add_option("--lambda2", lambda2, "l1 weight")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--out", gen_out, "output JSON path")->required();

  std::string ref_instance, ref_out;
  double ref_tol = 1e-10;
  auto* refsol = app.add_subcommand("refsol", "compute a reference optimum");
  refsol->add_option("--instance", ref_instance)->required();
  refsol->add_option("--tol", ref_tol, "prox-gradient residual tolerance")->check(CLI::PositiveNumber);
  refsol->add_option("--out", ref_out)->required();

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "run one solver and write its trace");
  solve->add_option("--instance", sa.instance)->required();
  solve->add_option("--algo", sa.algo)
      ->check(CLI::IsMember({"sock", "gock", "nock", "mlsock", "vrscpg"}));
  solve->add_option("--mode", sa.mode)->check(CLI::IsMember({"theoretical", "practical"}));
  solve->add_option("--seed", sa.seed);
  solve->add_option("--snapshots", sa.snapshots, "S (epochs for vrscpg, per stage for nock)");
  solve->add_option("--stages", sa.stages, "NoCK stage count T");
  solve->add_option("--eps", sa.eps, "NoCK target; default T = ceil(log2(L/eps))");
  solve->add_option("--mu0", sa.mu0, "NoCK initial mu")->check(CLI::PositiveNumber);
  solve->add_option("--batch-policy", sa.batch_policy)
      ->check(CLI::IsMember({"capped", "heuristic", "theorem"}));
  solve->add_option("--reference", sa.reference, "reference JSON for the gap column");
  solve->add_option("--ball-radius", sa.ball_radius)->check(CLI::PositiveNumber);
  solve->add_option("--overrides", sa.overrides, "e.g. m=5,A=36,C=576");
  solve->add_flag("--timing", sa.timing, "record wall-clock elapsed_ms");
  solve->add_option("--out", sa.out)->required();

  std::string bench_config, bench_out;
  std::optional<unsigned> bench_threads;
  auto* bench = app.add_subcommand("bench", "run a benchmark sweep");
  bench->add_option("--config", bench_config)->required();
  bench->add_option("--out", bench_out, "output directory")->required();
  bench->add_option("--threads", bench_threads)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_gen(dim, samples, noise_v, lambda1, lambda2, gen_seed, gen_out);
    if (*refsol) return cmd_refsol(ref_instance, ref_tol, ref_out);
    if (*solve) return cmd_solve(sa);
    if (*bench) return cmd_bench(bench_config, bench_out, bench_threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

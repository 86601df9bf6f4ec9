#ifndef COMPKAT_BENCH_RUNNER_HPP
#define COMPKAT_BENCH_RUNNER_HPP

#include "compkat/bench/config.hpp"
#include "compkat/bench/run_spec.hpp"
#include "compkat/trace.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace compkat::bench {

struct JobResult {
  std::string run_id;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<TraceRecord> records;
};

inline std::string trace_file_name(const std::string& run_id, std::uint64_t seed) {
  return run_id + "_seed" + std::to_string(seed) + ".csv";
}

inline std::string trace_csv(const std::vector<TraceRecord>& records) {
  std::ostringstream os;
  write_trace_csv(os, records);
  return os.str();
}

/// Runs one job; never throws. Failed runs keep their partial records plus
/// a nan-objective row.
inline JobResult run_job(const InstanceContext& ctx, const std::string& run_id,
                         const RunSpec& spec) {
  JobResult r;
  r.run_id = run_id;
  r.seed = spec.seed;
  try {
    r.records = run_algorithm(ctx, spec).records;
    r.ok = true;
    for (const auto& rec : r.records) {
      if (!std::isfinite(rec.objective)) {
        r.ok = false;
        r.error = "non-finite objective";
      }
    }
  } catch (const NonFiniteIterate& e) {
    r.error = e.what();
    r.records = failure_rows(e.partial().records);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.records = failure_rows({});
  }
  return r;
}

struct SummaryRow {
  std::string run_id;
  std::uint64_t oracle_count = 0;
  double mean_gap = 0.0;
  double min_gap = 0.0;
  double max_gap = 0.0;
};

/// Per run: checkpoints are the union of record oracle counts over its
/// successful seeds; each seed contributes its last gap at or before the
/// checkpoint.
inline std::vector<SummaryRow> summarize(const std::vector<JobResult>& jobs) {
  std::map<std::string, std::vector<const JobResult*>> by_run;
  for (const auto& j : jobs) {
    if (j.ok) by_run[j.run_id].push_back(&j);
  }
  std::vector<SummaryRow> out;
  for (auto& [id, runs] : by_run) {
    std::sort(runs.begin(), runs.end(),
              [](const JobResult* a, const JobResult* b) { return a->seed < b->seed; });
    std::set<std::uint64_t> checkpoints;
    for (const auto* j : runs) {
      for (const auto& rec : j->records) checkpoints.insert(rec.oracle_units());
    }
    for (const std::uint64_t cp : checkpoints) {
      double sum = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      std::size_t k = 0;
      for (const auto* j : runs) {
        const TraceRecord* last = nullptr;
        for (const auto& rec : j->records) {
          if (rec.oracle_units() <= cp) last = &rec;
        }
        if (last == nullptr || !last->gap) continue;
        sum += *last->gap;
        lo = std::min(lo, *last->gap);
        hi = std::max(hi, *last->gap);
        ++k;
      }
      if (k == 0) continue;
      out.push_back({id, cp, sum / static_cast<double>(k), lo, hi});
    }
  }
  return out;
}

inline std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "run,oracle_count,mean_gap,min_gap,max_gap\n";
  for (const auto& r : rows) {
    os << r.run_id << ',' << r.oracle_count << ',' << format_real(r.mean_gap) << ','
       << format_real(r.min_gap) << ',' << format_real(r.max_gap) << '\n';
  }
  return os.str();
}

/// Executes every (run, seed) pair on `threads` workers. Results come back
/// sorted by (run id, seed) whatever the completion order.
inline std::vector<JobResult> execute_jobs(const InstanceContext& ctx, const BenchConfig& cfg,
                                           unsigned threads) {
  struct Job {
    const RunBlock* run;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& run : cfg.runs) {
    for (const auto seed : run.seeds) jobs.push_back({&run, seed});
  }
  std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) {
    return a.run->id != b.run->id ? a.run->id < b.run->id : a.seed < b.seed;
  });
  std::vector<JobResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      RunSpec spec = jobs[i].run->spec;
      spec.seed = jobs[i].seed;
      results[i] = run_job(ctx, jobs[i].run->id, spec);
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

struct BenchOutcome {
  std::vector<JobResult> jobs;
  std::size_t failures = 0;
};

/// Loads the instance (and reference, computing one if absent), runs all
/// jobs and writes one trace per job plus summary.csv into out_dir.
inline BenchOutcome run_bench(const BenchConfig& cfg, const std::filesystem::path& out_dir,
                              std::optional<unsigned> threads = std::nullopt) {
  MeanVarInstance inst = io::load_instance(cfg.instance_path);
  std::optional<ReferenceSolution> ref;
  if (cfg.reference_path) {
    ref = io::load_reference(*cfg.reference_path);
  } else {
    ref = reference_optimum(inst, 1e-10);
  }
  const double radius = cfg.ball_radius ? *cfg.ball_radius
                                        : std::max(1.0, 10.0 * ref->x_star.norm());
  const InstanceContext ctx(std::move(inst), radius, ref);

  std::filesystem::create_directories(out_dir);
  BenchOutcome out;
  out.jobs = execute_jobs(ctx, cfg, threads.value_or(cfg.threads));
  for (const auto& j : out.jobs) {
    io::write_text_file((out_dir / trace_file_name(j.run_id, j.seed)).string(),
                        trace_csv(j.records));
    if (!j.ok) ++out.failures;
  }
  io::write_text_file((out_dir / "summary.csv").string(), summary_csv(summarize(out.jobs)));
  return out;
}

}  // namespace compkat::bench

#endif  // COMPKAT_BENCH_RUNNER_HPP

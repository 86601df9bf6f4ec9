#ifndef COMPKAT_TRACE_HPP
#define COMPKAT_TRACE_HPP

#include "compkat/counters.hpp"
#include "compkat/linalg.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

namespace compkat {

struct TraceRecord {
  std::uint64_t stage = 0;
  std::uint64_t snapshot = 0;
  std::uint64_t evals_inner_value = 0;
  std::uint64_t evals_inner_jac = 0;
  std::uint64_t evals_outer_grad = 0;
  std::uint64_t evals_prox = 0;
  double objective = 0.0;
  std::optional<double> gap;
  double elapsed_ms = 0.0;

  [[nodiscard]] std::uint64_t oracle_units() const {
    return evals_inner_value + evals_inner_jac + evals_outer_grad;
  }
};

struct SolverTrace {
  std::vector<TraceRecord> records;
  Vector final_point;
  std::vector<std::string> warnings;
  std::vector<double> mu_schedule;  // NoCK stages only
};

/// Thrown when an iterate stops being finite. Carries the records collected
/// so far and the global inner-iteration index.
class NonFiniteIterate : public std::runtime_error {
 public:
  NonFiniteIterate(SolverTrace partial, std::uint64_t iteration)
      : std::runtime_error("non-finite iterate at iteration " + std::to_string(iteration)),
        partial_(std::move(partial)),
        iteration_(iteration) {}

  [[nodiscard]] const SolverTrace& partial() const { return partial_; }
  [[nodiscard]] std::uint64_t iteration() const { return iteration_; }

 private:
  SolverTrace partial_;
  std::uint64_t iteration_;
};

inline TraceRecord make_record(std::uint64_t stage, std::uint64_t snapshot,
                               const OracleCounters& c, double objective,
                               std::optional<double> reference, double elapsed_ms) {
  TraceRecord r;
  r.stage = stage;
  r.snapshot = snapshot;
  r.evals_inner_value = c.inner_value;
  r.evals_inner_jac = c.inner_jac;
  r.evals_outer_grad = c.outer_grad;
  r.evals_prox = c.prox;
  r.objective = objective;
  if (reference) r.gap = objective - *reference;
  r.elapsed_ms = elapsed_ms;
  return r;
}

/// Shortest decimal that round-trips; "nan", "inf", "-inf" otherwise.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, res.ptr);
}

inline constexpr const char* kTraceHeader =
    "stage,snapshot,evals_inner_value,evals_inner_jac,evals_outer_grad,evals_prox,objective,gap,"
    "elapsed_ms";

inline void write_trace_row(std::ostream& os, const TraceRecord& r) {
  os << r.stage << ',' << r.snapshot << ',' << r.evals_inner_value << ',' << r.evals_inner_jac
     << ',' << r.evals_outer_grad << ',' << r.evals_prox << ',' << format_real(r.objective) << ',';
  if (r.gap) os << format_real(*r.gap);
  os << ',' << format_real(r.elapsed_ms) << '\n';
}

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRecord>& records) {
  os << kTraceHeader << '\n';
  for (const auto& r : records) write_trace_row(os, r);
}

}  // namespace compkat

#endif  // COMPKAT_TRACE_HPP

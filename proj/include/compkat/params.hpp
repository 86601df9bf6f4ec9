#ifndef COMPKAT_PARAMS_HPP
#define COMPKAT_PARAMS_HPP

#include "compkat/multilevel.hpp"
#include "compkat/oracle.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace compkat {

enum class EstimatorOption { OptionI, OptionII };

inline const char* to_string(EstimatorOption o) {
  return o == EstimatorOption::OptionI ? "I" : "II";
}

/// ceil(v) as a batch size, at least 1.
inline std::uint64_t batch_ceil(double v) {
  if (std::isnan(v) || v < 0.0) throw std::invalid_argument("batch size must be a nonnegative number");
  if (v > 4.0e18) throw std::overflow_error("batch size exceeds 64-bit range");
  const auto c = static_cast<std::uint64_t>(std::ceil(v));
  return c == 0 ? 1 : c;
}

struct SockParams {
  std::uint64_t m = 1;
  double tau1 = 0.5;
  double tau2 = 0.5;
  double theta = 2.0;
  double alpha = 1.0;
  std::uint64_t S = 1;
  std::uint64_t batch_inner_value = 1;  // A
  std::uint64_t batch_inner_jac = 1;    // B
  std::uint64_t batch_outer = 1;        // C
  EstimatorOption option = EstimatorOption::OptionI;

  void validate() const {
    if (m == 0) throw std::invalid_argument("SockParams: m must be positive");
    if (S == 0) throw std::invalid_argument("SockParams: S must be positive");
    if (!(tau1 > 0.0 && tau1 < 1.0) || !(tau2 >= 0.0 && tau2 < 1.0)) {
      throw std::invalid_argument("SockParams: tau1 must lie in (0,1) and tau2 in [0,1)");
    }
    if (tau1 + tau2 > 1.0) throw std::invalid_argument("SockParams: requires tau1 + tau2 <= 1");
    if (!(theta > 1.0)) throw std::invalid_argument("SockParams: theta must exceed 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("SockParams: alpha must be positive");
    if (batch_inner_value == 0 || batch_inner_jac == 0) {
      throw std::invalid_argument("SockParams: batch sizes must be positive");
    }
    if (option == EstimatorOption::OptionII && batch_outer == 0) {
      throw std::invalid_argument("SockParams: Option II needs a positive outer batch");
    }
  }

  /// Adds alpha * tau1 <= 1/(3L) and m < (3/2) L/mu (when mu > 0).
  void validate(const SmoothnessProfile& profile) const {
    validate();
    profile.validate();
    if (alpha * tau1 * 3.0 * profile.L > 1.0 + 1e-12) {
      throw std::invalid_argument("SockParams: requires alpha * tau1 <= 1/(3L)");
    }
    if (profile.mu > 0.0 && static_cast<double>(m) >= 1.5 * profile.L / profile.mu) {
      throw std::invalid_argument("SockParams: m must stay below 3L/(2 mu)");
    }
  }
};

/// Advisory messages for a parameter set: kappa < 4, and Option II chosen
/// while n1 is of the same magnitude as A + B.
inline std::vector<std::string> sock_warnings(const SockParams& p, const SmoothnessProfile& profile,
                                              std::size_t n1) {
  std::vector<std::string> out;
  if (profile.mu > 0.0 && profile.L < 4.0 * profile.mu) {
    out.push_back("kappa < 4: m exceeds L/(2 mu); running with m < 3L/(2 mu)");
  }
  const double ratio =
      static_cast<double>(n1) / static_cast<double>(p.batch_inner_value + p.batch_inner_jac);
  if (p.option == EstimatorOption::OptionII && ratio >= 0.1 && ratio <= 10.0) {
    out.push_back("n1 is of the same magnitude as A + B: Option I is recommended");
  }
  return out;
}

namespace detail {
inline void require_strongly_convex(const SmoothnessProfile& p, const char* who) {
  p.validate();
  if (!(p.mu > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": requires mu > 0 (use NoCK for mu = 0)");
  }
}
inline std::uint64_t inner_length(double kappa) {
  return batch_ceil(0.5 * std::sqrt(kappa));
}
}  // namespace detail

/// m, tau, theta, alpha, S and option of the theoretical setting; batches
/// are left at 1.
inline SockParams sock_steps_theoretical(const SmoothnessProfile& profile, EstimatorOption option,
                                         std::uint64_t S) {
  detail::require_strongly_convex(profile, "derive_sock_params_theoretical");
  SockParams p;
  p.m = detail::inner_length(profile.L / profile.mu);
  p.tau1 = 1.0 / (2.0 * static_cast<double>(p.m));
  p.tau2 = p.tau1;
  p.theta = 1.0 + 1.0 / (12.0 * static_cast<double>(p.m));
  p.alpha = 1.0 / (3.0 * p.tau1 * profile.L);
  p.S = S;
  p.option = option;
  return p;
}

/// Step part of the practical setting; batches are left at 1.
inline SockParams sock_steps_practical(const SmoothnessProfile& profile, EstimatorOption option,
                                       std::uint64_t S) {
  detail::require_strongly_convex(profile, "derive_sock_params_practical");
  SockParams p;
  p.m = detail::inner_length(profile.kappa());
  const auto m = static_cast<double>(p.m);
  p.theta = 1.0 + 1.0 / (4.0 * m);
  p.tau1 = 1.0 / (2.0 * m);
  p.tau2 = p.tau1;
  p.alpha = 2.0 * m / (3.0 * profile.L);
  p.S = S;
  p.option = option;
  return p;
}

inline SockParams derive_sock_params_theoretical(const SmoothnessProfile& profile,
                                                 EstimatorOption option, std::uint64_t S) {
  const double L = profile.L;
  const double mu = profile.mu;
  SockParams p = sock_steps_theoretical(profile, option, S);
  const double bg4 = std::pow(profile.B_G, 4);
  const double lf2 = profile.L_F * profile.L_F;
  const double bf2 = profile.B_F * profile.B_F;
  const double lg2 = profile.L_G * profile.L_G;
  const double mu2 = mu * mu;
  const double c_ab = option == EstimatorOption::OptionI ? 720.0 : 2160.0;
  p.batch_inner_value = batch_ceil(c_ab * bg4 * lf2 / mu2);
  p.batch_inner_jac = batch_ceil(c_ab * bf2 * lg2 / mu2);
  p.batch_outer = option == EstimatorOption::OptionII ? batch_ceil(1080.0 * L * L / mu2) : 1;
  return p;
}

inline SockParams derive_sock_params_practical(const SmoothnessProfile& profile,
                                               EstimatorOption option, std::uint64_t S) {
  const double kappa = profile.kappa();
  SockParams p = sock_steps_practical(profile, option, S);
  p.batch_inner_value = batch_ceil(kappa * kappa / 256.0);
  p.batch_inner_jac = p.batch_inner_value;
  p.batch_outer = option == EstimatorOption::OptionII ? batch_ceil(kappa * kappa / 16.0) : 1;
  return p;
}

struct VrscParams {
  std::uint64_t inner_length = 1;  // m'
  double eta = 1.0;
  std::uint64_t batch_inner_value = 1;
  std::uint64_t batch_inner_jac = 1;
  std::uint64_t batch_outer = 1;
  std::uint64_t epochs = 1;

  void validate() const {
    if (inner_length == 0 || epochs == 0) {
      throw std::invalid_argument("VrscParams: inner length and epochs must be positive");
    }
    if (!(eta > 0.0)) throw std::invalid_argument("VrscParams: eta must be positive");
    if (batch_inner_value == 0 || batch_inner_jac == 0 || batch_outer == 0) {
      throw std::invalid_argument("VrscParams: batch sizes must be positive");
    }
  }
};

inline VrscParams derive_vrsc_params(const SmoothnessProfile& profile, std::uint64_t epochs) {
  detail::require_strongly_convex(profile, "derive_vrsc_params");
  const double kappa = profile.kappa();
  VrscParams p;
  p.inner_length = batch_ceil(kappa / 4.0);
  p.eta = 1.0 / (5.0 * profile.L);
  p.batch_inner_value = batch_ceil(kappa * kappa / 256.0);
  p.batch_inner_jac = p.batch_inner_value;
  p.batch_outer = batch_ceil(kappa * kappa / 16.0);
  p.epochs = epochs;
  return p;
}

enum class NockBatchPolicy { Capped, Heuristic };

struct StageBatches {
  std::uint64_t A = 1;
  std::uint64_t B = 1;
  std::uint64_t C = 1;
};

/// A_t = B_t = ceil(min{((L + mu_t)/(400 mu_t))^2, n/200, 500}),
/// C_t likewise with 20 in place of 400; heuristic policy uses 500.
inline StageBatches derive_nock_stage_batches(const SmoothnessProfile& profile, double mu_t,
                                              std::size_t n, NockBatchPolicy policy) {
  if (!(mu_t > 0.0)) throw std::invalid_argument("derive_nock_stage_batches: mu_t must be positive");
  if (policy == NockBatchPolicy::Heuristic) return {500, 500, 500};
  const double ratio = (profile.L + mu_t) / mu_t;
  const double cap = std::min(static_cast<double>(n) / 200.0, 500.0);
  StageBatches b;
  b.A = batch_ceil(std::min(std::pow(ratio / 400.0, 2), cap));
  b.B = b.A;
  b.C = batch_ceil(std::min(std::pow(ratio / 20.0, 2), cap));
  return b;
}

/// Smallest S with 11 (12/13)^S <= 1/4 is 48; the stage-count remark
/// log 44 / log(12/11) rounds up to 44, which is the theory-mode default.
constexpr std::uint64_t kNockTheoryStages = 44;
constexpr std::uint64_t kNockPracticalStages = 3;

/// ceil(log2(D / eps)), at least 1.
inline std::uint64_t nock_stage_count(double D, double eps) {
  if (!(D > 0.0) || !(eps > 0.0)) {
    throw std::invalid_argument("nock_stage_count: arguments must be positive");
  }
  const double t = std::ceil(std::log2(D / eps) - 1e-12);
  return t < 1.0 ? 1 : static_cast<std::uint64_t>(t);
}

/// mu_0, mu_0/2, ..., mu_0/2^{T-1}.
inline std::vector<double> nock_mu_schedule(double mu0, std::uint64_t T) {
  std::vector<double> out;
  double mu = mu0;
  for (std::uint64_t t = 0; t < T; ++t) {
    out.push_back(mu);
    mu /= 2.0;
  }
  return out;
}

struct MultiLevelBatches {
  std::vector<std::uint64_t> a;  // a_1..a_{p-1}
  std::vector<std::uint64_t> b;  // b_1..b_p
};

/// a_i = ceil(180(2p-1)/mu^2 sum_{j>i} 4^{p-j+1} gamma_p^2 gamma_{j-1}^4 L_j^2 / gamma_j^2),
/// b_i = ceil(360(2p-1)/mu^2 4^{p-i} ell_i^2 gamma_p^2 / gamma_i^2), all at least 1.
inline MultiLevelBatches derive_multilevel_batches_theoretical(const MultiLevelProfile& profile) {
  const std::size_t p = profile.levels();
  if (p < 2 || profile.lipschitz.size() != p) {
    throw std::invalid_argument("derive_multilevel_batches_theoretical: malformed profile");
  }
  if (!(profile.mu > 0.0)) {
    throw std::invalid_argument("derive_multilevel_batches_theoretical: requires mu > 0");
  }
  const double mu2 = profile.mu * profile.mu;
  const double scale = static_cast<double>(2 * p - 1);
  const double gp2 = std::pow(profile.gamma(p), 2);
  MultiLevelBatches out;
  for (std::size_t i = 1; i < p; ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1; j <= p; ++j) {
      const double lj = profile.lipschitz[j - 1];
      if (lj == 0.0) continue;
      sum += std::pow(4.0, static_cast<double>(p - j + 1)) * gp2 *
             std::pow(profile.gamma(j - 1), 4) * lj * lj / std::pow(profile.gamma(j), 2);
    }
    out.a.push_back(batch_ceil(180.0 * scale / mu2 * sum));
  }
  for (std::size_t i = 1; i <= p; ++i) {
    const double ell = profile.ell(i);
    const double term = ell == 0.0 ? 0.0
                                   : std::pow(4.0, static_cast<double>(p - i)) * ell * ell * gp2 /
                                         std::pow(profile.gamma(i), 2);
    out.b.push_back(batch_ceil(360.0 * scale / mu2 * term));
  }
  return out;
}

/// Right-hand side of the multi-level variance bound, per unit ||x - x~||^2.
inline double multilevel_variance_factor(const MultiLevelProfile& profile,
                                         const MultiLevelBatches& batches) {
  const std::size_t p = profile.levels();
  const double gp2 = std::pow(profile.gamma(p), 2);
  double total = 0.0;
  for (std::size_t j = 1; j <= p; ++j) {
    const double ell = profile.ell(j);
    total += 2.0 / static_cast<double>(batches.b[j - 1]) *
             std::pow(4.0, static_cast<double>(p - j)) * ell * ell * gp2 /
             std::pow(profile.gamma(j), 2);
  }
  for (std::size_t i = 1; i < p; ++i) {
    double sum = 0.0;
    for (std::size_t j = i + 1; j <= p; ++j) {
      const double lj = profile.lipschitz[j - 1];
      sum += std::pow(4.0, static_cast<double>(p - j + 1)) * gp2 *
             std::pow(profile.gamma(j - 1), 4) * lj * lj / std::pow(profile.gamma(j), 2);
    }
    total += sum / static_cast<double>(batches.a[i - 1]);
  }
  return total;
}

/// Option I: 2 B_G^4 L_F^2 / A + 2 B_F^2 L_G^2 / B.
inline double option1_variance_factor(const SmoothnessProfile& p, std::uint64_t A,
                                      std::uint64_t B) {
  return 2.0 * std::pow(p.B_G, 4) * p.L_F * p.L_F / static_cast<double>(A) +
         2.0 * p.B_F * p.B_F * p.L_G * p.L_G / static_cast<double>(B);
}

/// Option II: 4 B_G^4 L_F^2 / A + 4 B_F^2 L_G^2 / B + 2 L^2 / C.
inline double option2_variance_factor(const SmoothnessProfile& p, std::uint64_t A,
                                      std::uint64_t B, std::uint64_t C) {
  return 4.0 * std::pow(p.B_G, 4) * p.L_F * p.L_F / static_cast<double>(A) +
         4.0 * p.B_F * p.B_F * p.L_G * p.L_G / static_cast<double>(B) +
         2.0 * p.L * p.L / static_cast<double>(C);
}

}  // namespace compkat

#endif  // COMPKAT_PARAMS_HPP

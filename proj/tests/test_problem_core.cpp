#include "compkat/oracle.hpp"
#include "compkat/problems/mean_variance.hpp"
#include "compkat/problems/multilevel_linear.hpp"
#include "compkat/problems/synthetic.hpp"
#include "compkat/prox.hpp"
#include "compkat/transforms.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace compkat;
namespace to = testing_oracles;

namespace {

MeanVarInstance small_instance(std::uint64_t seed = 3, double lambda2 = 0.05) {
  return generate_instance(6, 40, 2.0, 0.5, lambda2, seed);
}

NonlinearCompositionConfig nonlinear_config() {
  NonlinearCompositionConfig cfg;
  cfg.n1 = 5;
  cfg.n2 = 7;
  cfg.dim_x = 4;
  cfg.dim_u = 3;
  cfg.mu = 0.1;
  cfg.lambda = 0.05;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST(EvalObjective, MeanVarianceAtOriginIsZero) {
  const MeanVarianceOracle oracle(small_instance());
  EXPECT_EQ(eval_objective(oracle, Vector::Zero(6)), 0.0);
}

TEST(EvalObjective, IdentityQuadratic) {
  const IdentityQuadratic q(2, 0.0, 0.0);
  Vector x(2);
  x << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(eval_objective(q, x), 12.5);
}

TEST(EvalObjective, ChargesInnerAndOuterValues) {
  const MeanVarInstance inst = small_instance();
  const MeanVarianceOracle oracle(inst);
  OracleCounters c;
  (void)eval_objective(CountedOracle(oracle, c), Vector::Ones(6));
  EXPECT_EQ(c.inner_value, 40u);
  EXPECT_EQ(c.outer_value, 40u);
  EXPECT_EQ(c.oracle_units(), 40u);
}

TEST(EvalObjective, MatchesDenseReformulation) {
  const MeanVarInstance inst = small_instance();
  const MeanVarianceOracle oracle(inst);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const Vector x = to::random_vector(rng, 6);
    // Dense form rebuilt from the data columns.
    const Vector abar = inst.data.rowwise().mean();
    const Matrix centered = inst.data.colwise() - abar;
    const Matrix M = centered * centered.transpose() / 40.0;
    const double dense = abar.dot(x) + inst.lambda1 * x.dot(M * x) + inst.lambda2 * x.lpNorm<1>();
    EXPECT_LE(to::rel_err(eval_objective(oracle, x), dense), 1e-10);
  }
}

TEST(EvalObjective, RejectsWrongLength) {
  const IdentityQuadratic q(3, 0.0, 0.0);
  EXPECT_THROW((void)eval_objective(q, Vector::Zero(2)), DimensionError);
}

TEST(FullGradient, IdentityQuadraticReturnsX) {
  const IdentityQuadratic q(3, 0.0, 0.0);
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  EXPECT_EQ(full_gradient(q, x), x);
}

TEST(FullGradient, MeanVarianceMatchesDense) {
  const MeanVarInstance inst = small_instance();
  const MeanVarianceOracle oracle(inst);
  std::mt19937_64 rng(6);
  const Vector abar = inst.data.rowwise().mean();
  const Matrix centered = inst.data.colwise() - abar;
  const Matrix M = centered * centered.transpose() / 40.0;
  for (int k = 0; k < 20; ++k) {
    const Vector x = to::random_vector(rng, 6);
    EXPECT_LE(to::rel_err(full_gradient(oracle, x), Vector(abar + 2.0 * inst.lambda1 * M * x)),
              1e-10);
  }
}

TEST(FullGradient, ChargesUnits) {
  const NonlinearComposition g(nonlinear_config());
  OracleCounters c;
  (void)full_gradient(CountedOracle(g, c), Vector::Ones(4));
  EXPECT_EQ(c.inner_value, 7u);
  EXPECT_EQ(c.inner_jac, 7u);
  EXPECT_EQ(c.outer_grad, 5u);
  EXPECT_EQ(c.outer_value, 0u);
}

namespace {

void expect_fd_agreement(const CompositionalOracle& oracle, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  for (int k = 0; k < 20; ++k) {
    const Vector x = to::random_vector(rng, static_cast<Eigen::Index>(oracle.dim_x()), scale);
    const Vector fd = to::fd_gradient([&](const Vector& y) { return eval_smooth(oracle, y); }, x);
    EXPECT_LE(to::rel_err(full_gradient(oracle, x), fd), 1e-5);
  }
}

}  // namespace

TEST(FullGradient, FiniteDifferencesMeanVariance) {
  const MeanVarianceOracle oracle(small_instance());
  expect_fd_agreement(oracle, 1, 1.0);
}

TEST(FullGradient, FiniteDifferencesNonlinear) {
  const NonlinearComposition g(nonlinear_config());
  expect_fd_agreement(g, 2, 1.0);
}

TEST(FullGradient, FiniteDifferencesShifted) {
  const MeanVarInstance inst = generate_instance(5, 30, 1.0, 0.5, 0.0, 9);
  const MeanVarianceOracle base(inst);
  const StrongConvexityShift shifted(base, 0.3);
  expect_fd_agreement(shifted, 3, 1.0);
}

TEST(ProxL1, Examples) {
  Vector v(3);
  v << 3.0, -0.5, 0.0;
  Vector expected(3);
  expected << 2.0, 0.0, 0.0;
  EXPECT_EQ(prox_l1(v, 1.0), expected);
  EXPECT_EQ(prox_l1(v, 0.0), v);
  EXPECT_THROW((void)prox_l1(v, -1.0), std::invalid_argument);
}

TEST(ProxL1, MatchesGoldenSection) {
  std::mt19937_64 rng(7);
  const Vector v = to::random_vector(rng, 50);
  const Vector p = prox_l1(v, 0.3);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double vi = v[i];
    const double ref = to::grid_golden(
        [&](to::Quad u) { return 0.3 * to::qabs(u) + 0.5 * (u - vi) * (u - vi); }, -5.0, 5.0);
    EXPECT_NEAR(p[i], ref, 1e-9);
  }
}

TEST(ProxL1Shifted, ReducesToProxL1WithoutQuadratic) {
  std::mt19937_64 rng(8);
  const Vector v = to::random_vector(rng, 10);
  const Vector x0 = to::random_vector(rng, 10);
  EXPECT_LE((prox_l1_shifted(v, 0.7, 0.4, 0.0, x0) - prox_l1(v, 0.7 * 0.4)).norm(), 1e-15);
}

TEST(ProxL1Shifted, WeightedAverageWithoutL1) {
  std::mt19937_64 rng(9);
  const Vector v = to::random_vector(rng, 10);
  const Vector x0 = to::random_vector(rng, 10);
  const Vector expected = (v / 0.5 + 2.0 * x0) / (1.0 / 0.5 + 2.0);
  EXPECT_LE((prox_l1_shifted(v, 0.5, 0.0, 2.0, x0) - expected).norm(), 1e-15);
}

TEST(ProxL1Shifted, MatchesGoldenSection) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ud(0.05, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = to::random_vector(rng, 5);
    const Vector x0 = to::random_vector(rng, 5);
    const double step = ud(rng), lambda = ud(rng), mu_t = ud(rng);
    const Vector p = prox_l1_shifted(v, step, lambda, mu_t, x0);
    for (Eigen::Index i = 0; i < 5; ++i) {
      const double vi = v[i], ci = x0[i];
      const double ref = to::grid_golden(
          [&](to::Quad u) {
            return lambda * to::qabs(u) + 0.5 * mu_t * (u - ci) * (u - ci) +
                   (u - vi) * (u - vi) / (2.0 * step);
          },
          -10.0, 10.0);
      EXPECT_NEAR(p[i], ref, 1e-9);
    }
  }
}

TEST(ProxL1Shifted, RejectsNonpositiveStep) {
  EXPECT_THROW((void)prox_l1_shifted(Vector::Zero(2), 0.0, 1.0, 1.0, Vector::Zero(2)),
               std::invalid_argument);
}

TEST(Prox, FirmlyNonexpansive) {
  std::mt19937_64 rng(11);
  const Vector x0 = to::random_vector(rng, 8);
  for (int k = 0; k < 100; ++k) {
    const Vector a = to::random_vector(rng, 8, 2.0);
    const Vector b = to::random_vector(rng, 8, 2.0);
    const Vector pa = prox_l1(a, 0.4), pb = prox_l1(b, 0.4);
    EXPECT_LE((pa - pb).norm(), (a - b).norm() + 1e-15);
    EXPECT_LE((pa - pb).squaredNorm(), (pa - pb).dot(a - b) + 1e-14);
    const Vector qa = prox_l1_shifted(a, 0.3, 0.5, 1.5, x0);
    const Vector qb = prox_l1_shifted(b, 0.3, 0.5, 1.5, x0);
    EXPECT_LE((qa - qb).norm(), (a - b).norm() + 1e-15);
    EXPECT_LE((qa - qb).squaredNorm(), (qa - qb).dot(a - b) + 1e-14);
  }
}

TEST(Prox, OptimalityResidual) {
  std::mt19937_64 rng(12);
  const double step = 0.4, lambda = 0.3, mu_t = 0.8;
  for (int k = 0; k < 50; ++k) {
    const Vector v = to::random_vector(rng, 6);
    const Vector x0 = to::random_vector(rng, 6);
    const Vector y = prox_l1_shifted(v, step, lambda, mu_t, x0);
    for (Eigen::Index i = 0; i < 6; ++i) {
      // smooth part derivative must lie in -lambda * subdifferential of |y_i|
      const double g = (y[i] - v[i]) / step + mu_t * (y[i] - x0[i]);
      if (y[i] != 0.0) {
        EXPECT_NEAR(g, -lambda * std::copysign(1.0, y[i]), 1e-10);
      } else {
        EXPECT_LE(std::abs(g), lambda + 1e-10);
      }
    }
  }
}

TEST(Oracle, IndicesOutOfRangeThrow) {
  const MeanVarianceOracle oracle(small_instance());
  EXPECT_THROW((void)oracle.inner_value(40, Vector::Zero(6)), std::out_of_range);
  EXPECT_THROW((void)oracle.outer_gradient(40, Vector::Zero(7)), std::out_of_range);
  EXPECT_NO_THROW((void)oracle.inner_value(39, Vector::Zero(6)));
  EXPECT_THROW((void)oracle.prox_h(Vector::Zero(6), 0.0), std::invalid_argument);
  EXPECT_THROW((void)oracle.inner_jacobian(0, Vector::Zero(5)), DimensionError);
}

TEST(Oracle, EvaluationsArePure) {
  const NonlinearComposition g(nonlinear_config());
  std::mt19937_64 rng(13);
  const Vector x = to::random_vector(rng, 4);
  const Vector u = to::random_vector(rng, 3);
  for (std::size_t j = 0; j < 7; ++j) {
    EXPECT_EQ(g.inner_value(j, x), g.inner_value(j, x));
    EXPECT_EQ(g.inner_jacobian(j, x), g.inner_jacobian(j, x));
  }
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(g.outer_gradient(i, u), g.outer_gradient(i, u));
    EXPECT_EQ(g.outer_value(i, u), g.outer_value(i, u));
  }
}

TEST(SmoothnessProfile, Validation) {
  SmoothnessProfile p;
  p.L = 1.0;
  p.mu = 2.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p.mu = 0.5;
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.kappa(), 2.0);
  p.B_F = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(ProximalShift, ProxMatchesClosedForm) {
  const MeanVarInstance inst = small_instance(3, 0.2);
  const MeanVarianceOracle base(inst);
  std::mt19937_64 rng(14);
  const Vector x0 = to::random_vector(rng, 6);
  const ProximalShift shifted(base, 0.7, x0);
  for (int k = 0; k < 20; ++k) {
    const Vector v = to::random_vector(rng, 6);
    EXPECT_LE((shifted.prox_h(v, 0.25) - prox_l1_shifted(v, 0.25, 0.2, 0.7, x0)).norm(), 1e-14);
  }
  const Vector x = to::random_vector(rng, 6);
  EXPECT_NEAR(eval_objective(shifted, x),
              eval_objective(base, x) + 0.35 * (x - x0).squaredNorm(), 1e-12);
}

TEST(StrongConvexityShift, PreservesObjectiveAndGradient) {
  const MeanVarInstance inst = generate_instance(5, 30, 1.0, 0.5, 0.1, 21);
  const MeanVarianceOracle base(inst);
  const double mu = 0.4;
  const StrongConvexityShift shifted(base, mu);
  std::mt19937_64 rng(15);
  for (int k = 0; k < 20; ++k) {
    const Vector x = to::random_vector(rng, 5);
    EXPECT_NEAR(eval_objective(shifted, x), eval_objective(base, x), 1e-10 * (1 + std::abs(eval_objective(base, x))));
    EXPECT_LE((full_gradient(shifted, x) - (full_gradient(base, x) - mu * x)).norm(), 1e-10);
    EXPECT_NEAR(shifted.h_value(x), base.h_value(x) + 0.5 * mu * x.squaredNorm(), 1e-12);
  }
  // prox of lambda2 ||.||_1 + (mu/2)||.||^2 by scalar minimization
  const Vector v = to::random_vector(rng, 5);
  const Vector p = shifted.prox_h(v, 0.3);
  for (Eigen::Index i = 0; i < 5; ++i) {
    const double vi = v[i];
    const double ref = to::grid_golden(
        [&](to::Quad u) {
          return 0.1 * to::qabs(u) + 0.5 * mu * u * u + (u - vi) * (u - vi) / 0.6;
        },
        -10.0, 10.0);
    EXPECT_NEAR(p[i], ref, 1e-9);
  }
}

TEST(StrongConvexityShift, ShiftedProfile) {
  SmoothnessProfile p;
  p.L = 10.0;
  p.mu = 2.0;
  p.B_G = 3.0;
  p.L_F = 1.0;
  p.B_F = 4.0;
  const SmoothnessProfile s = shifted_profile(p, 1.5);
  EXPECT_DOUBLE_EQ(s.B_G, std::sqrt(10.0));
  EXPECT_DOUBLE_EQ(s.L_F, 2.0);
  EXPECT_DOUBLE_EQ(s.B_F, 5.0);
  EXPECT_DOUBLE_EQ(s.L, 10.0);
}

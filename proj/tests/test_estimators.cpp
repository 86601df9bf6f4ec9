#include "compkat/estimators.hpp"
#include "compkat/params.hpp"
#include "compkat/problems/mean_variance.hpp"
#include "compkat/problems/multilevel_linear.hpp"
#include "compkat/problems/synthetic.hpp"
#include "compkat/random.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace compkat;
namespace to = testing_oracles;

namespace {

NonlinearCompositionConfig nonlinear_config(std::uint64_t seed = 5) {
  NonlinearCompositionConfig cfg;
  cfg.n1 = 6;
  cfg.n2 = 9;
  cfg.dim_x = 4;
  cfg.dim_u = 3;
  cfg.wave_amplitude = 0.8;
  cfg.wave_frequency = 1.5;
  cfg.seed = seed;
  return cfg;
}

Batch batch_of(std::vector<std::size_t> idx) { return Batch::from_indices(std::move(idx)); }

}  // namespace

TEST(RandomStream, DeterministicAndResumable) {
  RandomStream a(99), b(99);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
  RandomStream c(99, a.position());
  EXPECT_EQ(a.next_u64(), c.next_u64());
  EXPECT_NE(RandomStream(99).child(1).next_u64(), RandomStream(99).child(2).next_u64());
  EXPECT_EQ(RandomStream(99).child(1, 7).next_u64(), RandomStream(99).child(1).child(7).next_u64());
  // child() leaves the parent untouched
  RandomStream d(5);
  (void)d.child(3);
  EXPECT_EQ(d.position(), 0u);
}

TEST(RandomStream, UniformDoubleRange) {
  RandomStream s(3);
  for (int k = 0; k < 10000; ++k) {
    const double u = s.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(SampleIndices, EdgeCases) {
  RandomStream s(1);
  EXPECT_TRUE(sample_indices(s, 10, 0).empty());
  EXPECT_EQ(sample_indices(s, 1, 5), std::vector<std::size_t>(5, 0));
  EXPECT_THROW((void)sample_indices(s, 0, 3), std::invalid_argument);
}

TEST(SampleIndices, ChiSquareUniformity) {
  RandomStream s(2024);
  const auto draws = sample_indices(s, 10, 100000);
  std::vector<double> freq(10, 0.0);
  for (auto d : draws) freq[d] += 1.0;
  double stat = 0.0;
  for (double f : freq) stat += (f - 10000.0) * (f - 10000.0) / 10000.0;
  EXPECT_LT(stat, 33.719948438964636);  // upper 1e-4 quantile, 9 degrees of freedom
}

TEST(SampleBatch, MultinomialPathConservesSizeAndIsUniform) {
  RandomStream s(7);
  const std::uint64_t size = 50000000000ULL;
  const Batch b = sample_batch(s, 20, size);
  EXPECT_EQ(b.size, size);
  EXPECT_EQ(std::accumulate(b.count.begin(), b.count.end(), std::uint64_t{0}), size);
  EXPECT_EQ(b.distinct(), 20u);
  const double expected = static_cast<double>(size) / 20.0;
  double stat = 0.0;
  for (auto c : b.count) stat += std::pow(static_cast<double>(c) - expected, 2) / expected;
  EXPECT_LT(stat, 50.795489665621886);  // upper 1e-4 quantile, 19 degrees of freedom
}

TEST(SampleBatch, DirectPathMatchesIndices) {
  RandomStream s1(8), s2(8);
  const Batch b = sample_batch(s1, 30, 100);
  const Batch ref = Batch::from_indices(sample_indices(s2, 30, 100));
  EXPECT_EQ(b.index, ref.index);
  EXPECT_EQ(b.count, ref.count);
  EXPECT_EQ(b.size, 100u);
}

TEST(EstimateInner, ExactAtSnapshot) {
  const NonlinearComposition g(nonlinear_config());
  OracleCounters c;
  const CountedOracle co(g, c);
  std::mt19937_64 rng(1);
  const Vector xt = to::random_vector(rng, 4);
  const Snapshot snap = take_snapshot(co, xt);
  RandomStream s(3);
  for (int k = 0; k < 10; ++k) {
    const Batch b = sample_batch(s, 9, 1 + k);
    EXPECT_EQ(estimate_inner(co, snap, xt, b), snap.inner_mean);
    EXPECT_EQ(estimate_jacobian(co, snap, xt, b), snap.inner_jac_mean);
  }
}

TEST(EstimateInner, SingleSampleFormulaAndCharges) {
  const NonlinearComposition g(nonlinear_config());
  OracleCounters c;
  const CountedOracle co(g, c);
  std::mt19937_64 rng(2);
  const Vector xt = to::random_vector(rng, 4), x = to::random_vector(rng, 4);
  const Snapshot snap = take_snapshot(co, xt);
  const OracleCounters before = c;
  const Vector est = estimate_inner(co, snap, x, batch_of({4}));
  EXPECT_LE((est - (g.inner_value(4, x) - g.inner_value(4, xt) + snap.inner_mean)).norm(), 1e-15);
  EXPECT_EQ(c.inner_value - before.inner_value, 2u);
  (void)estimate_jacobian(co, snap, x, batch_of({1, 1, 3}));
  EXPECT_EQ(c.inner_jac - before.inner_jac, 6u);
  EXPECT_THROW((void)estimate_inner(co, snap, x, Batch{}), std::invalid_argument);
}

TEST(EstimateInner, MonteCarloUnbiased) {
  const NonlinearComposition g(nonlinear_config());
  OracleCounters c;
  const CountedOracle co(g, c);
  std::mt19937_64 rng(3);
  const Vector xt = to::random_vector(rng, 4), x = to::random_vector(rng, 4);
  const Snapshot snap = take_snapshot(co, xt);
  const Vector truth = inner_mean(co, x);
  const Matrix jtruth = inner_jacobian_mean(co, x);
  const int draws = 100000;
  Vector sum = Vector::Zero(3), sumsq = Vector::Zero(3);
  Matrix jsum = Matrix::Zero(3, 4), jsumsq = Matrix::Zero(3, 4);
  RandomStream s(4);
  for (int k = 0; k < draws; ++k) {
    const Batch b = sample_batch(s, 9, 4);
    const Vector e = estimate_inner(co, snap, x, b);
    sum += e;
    sumsq += e.cwiseProduct(e);
    const Matrix je = estimate_jacobian(co, snap, x, b);
    jsum += je;
    jsumsq += je.cwiseProduct(je);
  }
  const Vector mean = sum / draws;
  const Vector se = ((sumsq / draws - mean.cwiseProduct(mean)) / draws).cwiseSqrt();
  for (int r = 0; r < 3; ++r) EXPECT_LE(std::abs(mean[r] - truth[r]), 4.0 * se[r] + 1e-14);
  const Matrix jmean = jsum / draws;
  const Matrix jse = ((jsumsq / draws - jmean.cwiseProduct(jmean)) / draws).cwiseSqrt();
  for (int r = 0; r < 3; ++r) {
    for (int q = 0; q < 4; ++q) {
      EXPECT_LE(std::abs(jmean(r, q) - jtruth(r, q)), 4.0 * jse(r, q) + 1e-14);
    }
  }
}

TEST(EstimateJacobian, LinearInnerMapsExact) {
  const MeanVarInstance inst = generate_instance(4, 12, 1.0, 1.0, 0.0, 3);
  const MeanVarianceOracle oracle(inst);
  OracleCounters c;
  const CountedOracle co(oracle, c);
  std::mt19937_64 rng(5);
  const Snapshot snap = take_snapshot(co, to::random_vector(rng, 4));
  Matrix expected(5, 4);
  expected << Matrix::Identity(4, 4), inst.mean_col.transpose();
  RandomStream s(6);
  for (int k = 0; k < 20; ++k) {
    const Matrix j = estimate_jacobian(co, snap, to::random_vector(rng, 4), sample_batch(s, 12, 3));
    EXPECT_LE((j - expected).norm(), 1e-13);
  }
}

TEST(TakeSnapshot, ConsistentAndCharged) {
  const NonlinearComposition g(nonlinear_config());
  OracleCounters c;
  const CountedOracle co(g, c);
  const Vector xt = Vector::LinSpaced(4, -1.0, 1.0);
  const Snapshot snap = take_snapshot(co, xt);
  EXPECT_EQ(c.inner_value, 9u);
  EXPECT_EQ(c.inner_jac, 9u);
  EXPECT_EQ(c.outer_grad, 6u);
  OracleCounters scratch;
  const CountedOracle cs(g, scratch);
  EXPECT_LE((snap.grad_mean - snap.inner_jac_mean.transpose() *
                                  outer_gradient_mean(cs, snap.inner_mean)).norm(),
            1e-12);
  EXPECT_LE((snap.grad_mean - full_gradient(g, xt)).norm(), 1e-12);
}

TEST(GradientOptions, ExactAtSnapshot) {
  const NonlinearComposition g(nonlinear_config());
  OracleCounters c;
  const CountedOracle co(g, c);
  const Snapshot snap = take_snapshot(co, Vector::Constant(4, 0.3));
  RandomStream s(7);
  EXPECT_EQ(gradient_option1(co, snap.inner_mean, snap.inner_jac_mean), snap.grad_mean);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(gradient_option2(co, snap, snap.inner_mean, snap.inner_jac_mean,
                               sample_batch(s, 6, 1 + k)),
              snap.grad_mean);
  }
}

TEST(GradientOptions, SingleOuterSummand) {
  NonlinearCompositionConfig cfg = nonlinear_config();
  cfg.n1 = 1;
  const NonlinearComposition g(cfg);
  OracleCounters c;
  const CountedOracle co(g, c);
  std::mt19937_64 rng(8);
  const Snapshot snap = take_snapshot(co, to::random_vector(rng, 4));
  const Vector x = to::random_vector(rng, 4);
  RandomStream s(9);
  const Vector ghat = estimate_inner(co, snap, x, sample_batch(s, 9, 3));
  const Matrix jhat = estimate_jacobian(co, snap, x, sample_batch(s, 9, 3));
  const Vector o1 = gradient_option1(co, ghat, jhat);
  EXPECT_LE((o1 - jhat.transpose() * g.outer_gradient(0, ghat)).norm(), 1e-14);
  const OracleCounters before = c;
  const Vector o2 = gradient_option2(co, snap, ghat, jhat, batch_of({0}));
  EXPECT_LE((o2 - o1).norm(), 1e-12 * (1 + o1.norm()));
  EXPECT_EQ(c.outer_grad - before.outer_grad, 2u);
  EXPECT_THROW((void)gradient_option2(co, snap, ghat, jhat, Batch{}), std::invalid_argument);
  EXPECT_THROW((void)gradient_option1(co, ghat, Matrix::Zero(2, 2)), DimensionError);
}

namespace {

struct MseResult {
  double mse1 = 0.0;
  double mse2 = 0.0;
};

MseResult estimator_mse(const CompositionalOracle& g, const Vector& xt, const Vector& x,
                        std::uint64_t A, std::uint64_t B, std::uint64_t C, int draws,
                        std::uint64_t seed) {
  OracleCounters c;
  const CountedOracle co(g, c);
  const Snapshot snap = take_snapshot(co, xt);
  const Vector truth = full_gradient(g, x);
  RandomStream root(seed);
  MseResult r;
  for (int k = 0; k < draws; ++k) {
    const RandomStream s = root.child(static_cast<std::uint64_t>(k));
    const Batch a = sample_level_batch(s, 1, false, g.inner_count(), A);
    const Batch b = sample_level_batch(s, 1, true, g.inner_count(), B);
    const Batch cb = sample_level_batch(s, 2, true, g.outer_count(), C);
    const Vector ghat = estimate_inner(co, snap, x, a);
    const Matrix jhat = estimate_jacobian(co, snap, x, b);
    r.mse1 += (gradient_option1(co, ghat, jhat) - truth).squaredNorm();
    r.mse2 += (gradient_option2(co, snap, ghat, jhat, cb) - truth).squaredNorm();
  }
  r.mse1 /= draws;
  r.mse2 /= draws;
  return r;
}

}  // namespace

TEST(GradientOptions, VarianceBoundsHoldOnCertifiedInstance) {
  const NonlinearComposition g(nonlinear_config(12));
  const SmoothnessProfile p = g.certified_profile();
  std::mt19937_64 rng(10);
  for (int pair = 0; pair < 3; ++pair) {
    const Vector xt = to::random_vector(rng, 4);
    const Vector x = xt + to::random_vector(rng, 4, 0.5);
    const double d2 = (x - xt).squaredNorm();
    const MseResult r = estimator_mse(g, xt, x, 2, 3, 2, 2000, 100 + pair);
    EXPECT_LE(r.mse1, option1_variance_factor(p, 2, 3) * d2);
    EXPECT_LE(r.mse2, option2_variance_factor(p, 2, 3, 2) * d2);
  }
}

TEST(GradientOptions, MseScalesQuadraticallyWithDisplacement) {
  const MeanVarInstance inst = generate_instance(4, 15, 1.0, 0.5, 0.0, 21);
  const MeanVarianceOracle oracle(inst);
  std::mt19937_64 rng(11);
  const Vector xt = to::random_vector(rng, 4);
  const Vector d = to::random_vector(rng, 4, 0.3);
  const MseResult small = estimator_mse(oracle, xt, xt + d, 2, 2, 2, 3000, 77);
  const MseResult large = estimator_mse(oracle, xt, xt + 2.0 * d, 2, 2, 2, 3000, 77);
  EXPECT_NEAR(large.mse2 / small.mse2, 4.0, 1e-6);
  // with the exact Jacobian mean, the inner-value error shifts the z and y
  // partials of the averaged outer gradient by opposite amounts
  EXPECT_LE(small.mse1, 1e-24);
  EXPECT_LE(large.mse1, 1e-24);
}

namespace {

MultiLevelLinearConfig three_level(bool identical) {
  MultiLevelLinearConfig cfg;
  cfg.counts = {6, 5, 4};
  cfg.dims = {5, 4, 3, 1};
  cfg.seed = 41;
  cfg.mu = 0.05;
  cfg.identical = identical;
  return cfg;
}

}  // namespace

TEST(MultiLevelSnapshot, ChainRuleConsistent) {
  const MultiLevelLinear ml(three_level(false));
  OracleCounters c;
  const CountedMultiLevel cm(ml, c);
  const Vector xt = Vector::LinSpaced(5, -1.0, 1.0);
  const MultiLevelSnapshot snap = take_multilevel_snapshot(cm, xt);
  ASSERT_EQ(snap.chain_values.size(), 2u);
  ASSERT_EQ(snap.chain_jacs.size(), 3u);
  for (std::size_t k = 1; k < 3; ++k) {
    EXPECT_LE((snap.chain_jacs[k] - snap.chain_level_jacs[k] * snap.chain_jacs[k - 1]).norm(),
              1e-12);
  }
  EXPECT_LE((row_to_vector(snap.chain_jacs[2]) - multilevel_full_gradient(ml, xt)).norm(), 1e-12);
  // values for levels 1..p-1, Jacobians for every level
  EXPECT_EQ(c.inner_value, 6u + 5u);
  EXPECT_EQ(c.inner_jac, 6u + 5u);
  EXPECT_EQ(c.outer_grad, 4u);
}

TEST(MultiLevelGradient, ExactAtSnapshot) {
  const MultiLevelLinear ml(three_level(false));
  OracleCounters c;
  const CountedMultiLevel cm(ml, c);
  const Vector xt = Vector::LinSpaced(5, -0.5, 1.5);
  const MultiLevelSnapshot snap = take_multilevel_snapshot(cm, xt);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_EQ(multilevel_gradient(cm, snap, xt, {3, 2}, {1, 4, 2}, RandomStream(seed)),
              row_to_vector(snap.chain_jacs.back()));
  }
}

TEST(MultiLevelGradient, IdenticalComponentsGiveExactGradient) {
  const MultiLevelLinear ml(three_level(true));
  OracleCounters c;
  const CountedMultiLevel cm(ml, c);
  std::mt19937_64 rng(12);
  const MultiLevelSnapshot snap = take_multilevel_snapshot(cm, to::random_vector(rng, 5));
  for (int k = 0; k < 10; ++k) {
    const Vector x = to::random_vector(rng, 5);
    EXPECT_LE(to::rel_err(multilevel_gradient(cm, snap, x, {2, 2}, {2, 2, 2}, RandomStream(k)),
                          multilevel_full_gradient(ml, x)),
              1e-12);
  }
}

TEST(MultiLevelGradient, ChargesPerLevel) {
  const MultiLevelLinear ml(three_level(false));
  OracleCounters c;
  const CountedMultiLevel cm(ml, c);
  const MultiLevelSnapshot snap = take_multilevel_snapshot(cm, Vector::Zero(5));
  const OracleCounters before = c;
  (void)multilevel_gradient(cm, snap, Vector::Ones(5), {3, 7}, {2, 5, 11}, RandomStream(1));
  EXPECT_EQ(c.inner_value - before.inner_value, 2u * (3 + 7));
  EXPECT_EQ(c.inner_jac - before.inner_jac, 2u * (2 + 5));
  EXPECT_EQ(c.outer_grad - before.outer_grad, 2u * 11);
  EXPECT_THROW((void)multilevel_gradient(cm, snap, Vector::Ones(5), {3}, {2, 5, 11}, RandomStream(1)),
               std::invalid_argument);
}

TEST(MultiLevelGradient, TwoLevelBitIdenticalToOptionII) {
  const NonlinearComposition g(nonlinear_config(19));
  const CompositionalAsMultiLevel ml(g);
  OracleCounters c2, cm;
  const CountedOracle co(g, c2);
  const CountedMultiLevel cml(ml, cm);
  std::mt19937_64 rng(13);
  for (int k = 0; k < 10; ++k) {
    const Vector xt = to::random_vector(rng, 4), x = to::random_vector(rng, 4);
    const Snapshot snap = take_snapshot(co, xt);
    const MultiLevelSnapshot msnap = take_multilevel_snapshot(cml, xt);
    const RandomStream s(1000 + k);
    const std::uint64_t A = 1 + k, B = 2 + k, C = 3 + 2 * k;
    const Vector ghat = estimate_inner(co, snap, x, sample_level_batch(s, 1, false, 9, A));
    const Matrix jhat = estimate_jacobian(co, snap, x, sample_level_batch(s, 1, true, 9, B));
    const Vector two = gradient_option2(co, snap, ghat, jhat, sample_level_batch(s, 2, true, 6, C));
    const Vector multi = multilevel_gradient(cml, msnap, x, {A}, {B, C}, s);
    EXPECT_EQ(two, multi);
  }
  EXPECT_EQ(c2, cm);
}

TEST(MultiLevelGradient, VarianceBoundHolds) {
  MultiLevelLinearConfig cfg = three_level(false);
  cfg.spread = 1.0;
  const MultiLevelLinear ml(cfg);
  const MultiLevelProfile p = ml.profile();
  OracleCounters c;
  const CountedMultiLevel cm(ml, c);
  std::mt19937_64 rng(14);
  const MultiLevelBatches batches{{2, 3}, {1, 2, 2}};
  const double factor = multilevel_variance_factor(p, batches);
  for (int pair = 0; pair < 3; ++pair) {
    const Vector xt = to::random_vector(rng, 5), x = xt + to::random_vector(rng, 5, 0.5);
    const MultiLevelSnapshot snap = take_multilevel_snapshot(cm, xt);
    const Vector truth = multilevel_full_gradient(ml, x);
    double mse = 0.0;
    for (int k = 0; k < 2000; ++k) {
      mse += (multilevel_gradient(cm, snap, x, batches.a, batches.b, RandomStream(pair).child(k)) -
              truth).squaredNorm();
    }
    EXPECT_LE(mse / 2000.0, factor * (x - xt).squaredNorm());
  }
}

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gpbucb/kernel.hpp"
#include "test_support.hpp"

using namespace gpbucb;
using testing_support::random_kernel;
using testing_support::to_spec;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

}  // namespace

TEST(Kernel, StationaryDiagonalIsSignalVariance) {
  const auto rbf = KernelSpec::rbf(2.5, vec({0.3, 0.7}));
  const auto x = vec({0.1, -4.0});
  EXPECT_EQ(eval(rbf, x, x), 2.5);
  for (auto nu : {MaternSmoothness::half, MaternSmoothness::three_halves, MaternSmoothness::five_halves}) {
    EXPECT_EQ(eval(KernelSpec::matern(1.7, vec({0.3, 0.7}), nu), x, x), 1.7);
  }
}

TEST(Kernel, ClosedFormValues) {
  const auto x = vec({0.0});
  const auto y = vec({1.0});
  EXPECT_NEAR(eval(KernelSpec::rbf(1.0, vec({1.0})), x, y), std::exp(-0.5), 1e-15);
  EXPECT_NEAR(eval(KernelSpec::matern(1.0, vec({1.0}), MaternSmoothness::half), x, y), std::exp(-1.0), 1e-15);
  const double s3 = std::sqrt(3.0);
  EXPECT_NEAR(eval(KernelSpec::matern(1.0, vec({1.0}), MaternSmoothness::three_halves), x, y),
              (1 + s3) * std::exp(-s3), 1e-15);
  const double s5 = std::sqrt(5.0);
  EXPECT_NEAR(eval(KernelSpec::matern(1.0, vec({1.0}), MaternSmoothness::five_halves), x, y),
              (1 + s5 + 5.0 / 3.0) * std::exp(-s5), 1e-15);
}

TEST(Kernel, MaternDecaysToZeroFarAway) {
  const auto k = KernelSpec::matern(1.0, vec({1.0}), MaternSmoothness::three_halves);
  EXPECT_LT(eval(k, vec({0.0}), vec({100.0})), 1e-60);
}

TEST(Kernel, LinearWeightedInnerProduct) {
  // Weights 1/l^2 = (1, 2).
  const auto k = KernelSpec::linear(vec({1.0, 1.0 / std::sqrt(2.0)}));
  EXPECT_NEAR(eval(k, vec({1.0, 1.0}), vec({2.0, 1.0})), 4.0, 1e-14);
  EXPECT_FALSE(k.stationary());
}

TEST(Kernel, DimensionMismatchThrows) {
  const auto k = KernelSpec::rbf(1.0, vec({1.0, 1.0}));
  EXPECT_THROW(eval(k, vec({1.0}), vec({1.0, 2.0})), InputError);
  EXPECT_THROW(eval_vector(k, vec({1.0}), Eigen::MatrixXd::Zero(2, 3)), InputError);
  EXPECT_THROW(eval_matrix(k, Eigen::MatrixXd::Zero(3, 2)), InputError);
}

TEST(Kernel, InvalidSpecRejected) {
  EXPECT_THROW(KernelSpec::rbf(0.0, vec({1.0})), InputError);
  EXPECT_THROW(KernelSpec::rbf(1.0, vec({-1.0})), InputError);
  EXPECT_THROW(KernelSpec::rbf(1.0, Eigen::VectorXd()), InputError);
}

TEST(Kernel, VectorAndMatrixAgreeWithPairwiseEval) {
  std::mt19937_64 rng(11);
  for (std::size_t fam = 0; fam < 5; ++fam) {
    const auto ok = random_kernel(rng, 3, fam);
    const auto spec = to_spec(ok);
    const auto pts = oracle::random_points(rng, 6, 3);
    const Eigen::MatrixXd cols = oracle::as_columns(pts, 3);
    const auto q = oracle::random_points(rng, 1, 3).front();

    EXPECT_EQ(eval_vector(spec, q, Eigen::MatrixXd(3, 0)).size(), 0);
    const Eigen::VectorXd v = eval_vector(spec, q, cols);
    const Eigen::MatrixXd m = eval_matrix(spec, cols);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      EXPECT_EQ(v[static_cast<Eigen::Index>(i)], eval(spec, q, pts[i]));
      EXPECT_NEAR(v[static_cast<Eigen::Index>(i)], ok(q, pts[i]), 1e-13);
      for (std::size_t j = 0; j < pts.size(); ++j) {
        EXPECT_NEAR(m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), ok(pts[i], pts[j]), 1e-13);
      }
    }
    EXPECT_TRUE(m == m.transpose());
    EXPECT_EQ(eval_matrix(spec, cols.leftCols(1))(0, 0), eval(spec, pts[0], pts[0]));
  }
}

TEST(Kernel, SymmetricAndBoundedAndPsd) {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t d = 1 + static_cast<std::size_t>(rep % 4);
    const auto ok = random_kernel(rng, d, static_cast<std::size_t>(rep));
    const auto spec = to_spec(ok);
    const auto pts = oracle::random_points(rng, 20, d);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = 0; j < pts.size(); ++j) {
        const double a = eval(spec, pts[i], pts[j]);
        EXPECT_EQ(a, eval(spec, pts[j], pts[i]));
        if (spec.stationary()) {
          EXPECT_GE(a, 0.0);
          EXPECT_LE(a, spec.signal_variance);
        }
      }
    }
    const Eigen::MatrixXd m = eval_matrix(spec, oracle::as_columns(pts, d));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * spec.signal_variance);
  }
}

TEST(Kernel, ArdScalingInvariance) {
  std::mt19937_64 rng(9);
  const auto base = KernelSpec::rbf(1.3, vec({0.4, 0.9, 0.2}));
  auto stretched = base;
  stretched.lengthscales[1] *= 2.0;
  const auto pts = oracle::random_points(rng, 8, 3);
  for (const auto& x : pts) {
    for (const auto& y : pts) {
      Eigen::VectorXd x2 = x, y2 = y;
      x2[1] *= 2.0;
      y2[1] *= 2.0;
      EXPECT_NEAR(eval(stretched, x2, y2), eval(base, x, y), 1e-15);
    }
  }
}

TEST(DecisionSet, GridAndValidation) {
  const std::vector<double> lo{0.0, -1.0}, hi{1.0, 1.0};
  const std::vector<std::size_t> res{3, 2};
  const auto g = DecisionSet::grid(lo, hi, res);
  ASSERT_EQ(g.size(), 6u);
  EXPECT_EQ(g.dimension(), 2u);
  EXPECT_DOUBLE_EQ(g.point(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(g.point(1)[0], 0.5);
  EXPECT_DOUBLE_EQ(g.point(2)[0], 1.0);
  EXPECT_DOUBLE_EQ(g.point(3)[1], 1.0);
  EXPECT_THROW(g.point(6), InputError);
  EXPECT_THROW(DecisionSet(Eigen::MatrixXd(2, 0)), InputError);
  EXPECT_THROW(DecisionSet::from_rows({{1.0, 2.0}, {1.0}}), InputError);
  EXPECT_THROW(DecisionSet::from_rows({{std::nan("")}}), InputError);
}

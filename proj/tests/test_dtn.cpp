#include <gtest/gtest.h>

#include "elastodtn/dtn.hpp"
#include "elastodtn/verify.hpp"

using namespace elastodtn;

namespace
{

// Brute force: first N past the peak with N q^N <= tol.
int scan_truncation(double ratio, double tol)
{
  const int peak = int(std::ceil(1.0 / std::log(1.0 / ratio)));
  for (int N = std::max(1, peak);; ++N)
    if (N * std::pow(ratio, N) <= tol)
      return N;
}

}  // namespace

TEST(Truncation, MatchesScan)
{
  EXPECT_EQ(select_truncation(SphericalGeometry(0.5, 1.0), 1.0, 1e-8), 32);
  EXPECT_EQ(select_truncation(SphericalGeometry(0.9, 1.0), 1.0, 1e-8), 227);
  for (double r : {0.3, 0.5, 0.75, 0.9})
    for (double tol : {1e-3, 1e-6, 1e-8})
      EXPECT_EQ(select_truncation(SphericalGeometry(r, 1.0), 1.0, tol), scan_truncation(r, tol));
}

TEST(Truncation, ErrorModelIsMonotonePastPeak)
{
  const SphericalGeometry g(0.6, 1.0);
  const int N = select_truncation(g, 2.0, 1e-6);
  EXPECT_LE(truncation_error(g, N, 2.0), 1e-6);
  EXPECT_GT(truncation_error(g, N - 1, 2.0), 1e-6);
}

TEST(Truncation, CapIsReported)
{
  EXPECT_THROW(select_truncation(SphericalGeometry(0.99, 1.0), 1.0, 1e-12, 100), CapacityError);
}

TEST(Dtn, LambdaImaginaryPartNegative)
{
  const ElasticParams p;
  for (int n = 0; n <= 200; ++n)
    EXPECT_LT(lambda_n_ext(p, 1.0, n).imag(), 0) << n;
}

TEST(Dtn, KnInverse)
{
  const ElasticParams p(1.0, 2.0, 5.0);
  for (int n : {1, 2, 10, 80, 200})
    EXPECT_LT((kn_matrix(p, 1.0, n) * kn_inverse(p, 1.0, n) - CMat3::Identity()).norm(), 1e-10)
        << n;
}

TEST(Dtn, ModeMatrixCacheReturnsSameBlock)
{
  const ElasticParams p;
  auto &c = mode_matrix_cache();
  const CMat3 a = c.get(p, 1.0, 7), b = dtn_mode_matrix(p, 1.0, 7);
  EXPECT_EQ((a - b).norm(), 0.0);
  EXPECT_GE(c.size(), 1u);
}

TEST(Dtn, Suite)
{
  SuiteSettings s;
  s.n_max = 120;
  for (const Check &c : verify_dtn_suite(s))
    EXPECT_TRUE(c.pass) << c.name << " value " << c.value << " " << c.detail;
}

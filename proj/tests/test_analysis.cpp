#include <gtest/gtest.h>

#include "elastodtn/analysis.hpp"
#include "elastodtn/dtn.hpp"

using namespace elastodtn;

namespace
{

const ElasticParams params;
const SphericalGeometry annulus(0.5, 1.0);

DualModeSolution sample_solution(int n)
{
  return DualModeSolution(params, annulus, n, RadialSource::random_smooth(3 + n),
                          {cplx(0.3, 0.1), cplx(-0.2, 0.5), cplx(0.7, -0.4)});
}

}  // namespace

TEST(DualSource, GridMatchesAdaptive)
{
  const int n = 2;
  const RadialSource xi = RadialSource::random_smooth(4);
  const RadialGrid grid = RadialGrid::uniform(annulus, 400);
  const auto [zeta, Z] = annulus_source_coeffs(sample_field(xi, n, 0, grid), annulus);
  for (int i = 0; i < grid.size(); i += 37)
  {
    const SourceCoeffs a = annulus_source_at(xi, n, annulus, grid.rho[i]);
    EXPECT_LT(std::abs(zeta.at(n, 0)[i][2] - a.zeta), 1e-8);
    EXPECT_LT((Z.at(n, 0)[i] - a.Z).norm(), 1e-8);
  }
}

TEST(DualSource, VanishesAtOuterRadius)
{
  const SourceCoeffs s = annulus_source_at(RadialSource::random_smooth(2), 3, annulus, 1.0);
  EXPECT_EQ(std::abs(s.zeta), 0.0);
  EXPECT_EQ(s.Z.norm(), 0.0);
}

TEST(DualMode, EndpointIdentitiesConverge)
{
  const DualModeSolution s = sample_solution(1);
  const EndpointReport a = dual_endpoint_check(s, 400), b = dual_endpoint_check(s, 800);
  EXPECT_LT(a.max(), 1e-6);
  EXPECT_GT(a.deriv_Rp / b.deriv_Rp, 2.0);
}

TEST(DualMode, SatisfiesNavierAndDecomposition)
{
  const DualModeSolution s = sample_solution(2);
  const PdeReport r = dual_pde_check(s, -1, 8);
  EXPECT_LT(r.navier, 1e-4);
  EXPECT_LT(r.decomposition, 1e-4);
  EXPECT_LT(r.div_Z, 1e-6);
  EXPECT_LT(r.div_q, 1e-6);
}

TEST(DualMode, AdjointBoundaryRelation)
{
  EXPECT_LT(dual_boundary_check(sample_solution(5)), 1e-5);
}

TEST(DualMode, ClampedTracesZeroInnerValue)
{
  const RadialSource xi = RadialSource::random_smooth(8);
  const DualModeSolution s(params, annulus, 3, xi,
                           DualModeSolution::clamped_traces(params, annulus, 3, xi));
  EXPECT_LT(s.p(annulus.r_inner).norm(), 1e-12 * (1.0 + s.p(0.75).norm()));
}

TEST(DualMode, StableAtHighDegree)
{
  const DualModeSolution s = sample_solution(40);
  const CVec3 pR = s.p(annulus.r_outer);
  EXPECT_TRUE(std::isfinite(pR.norm()));
  EXPECT_LT(pR.norm(), 10.0);
}

TEST(DualBound, FrozenConstantPersists)
{
  EXPECT_TRUE(dual_bound_check(params, annulus, 5, 25, 9, false).holds);
  EXPECT_TRUE(dual_bound_check(params, annulus, 5, 25, 9, true).holds);
}

TEST(Radiating, PropagationAndDtn)
{
  for (int n : {1, 3, 12})
  {
    const RadiatingMode m{params, n, cplx(1, 0.2), cplx(-0.5, 1), cplx(0.3, 0.3)};
    const PropagationReport r = propagation_check(m, annulus);
    EXPECT_LT(r.propagation, 1e-8) << n;
    EXPECT_LT(r.dtn, 1e-8) << n;
  }
}

#include <gtest/gtest.h>

#include "elastodtn/estimator.hpp"

using namespace elastodtn;

namespace
{

AdaptOptions example_options()
{
  const Example1 ex;
  AdaptOptions o;
  o.params = ex.params;
  o.incident = ex.incident;
  o.geometry = SphericalGeometry(0.5, 1.0);
  o.exact = [ex](const Vec3 &x) { return ex.exact(x); };
  o.n_trunc = 6;
  return o;
}

}  // namespace

TEST(Marking, MaxStrategy)
{
  const std::vector<double> eta{0.1, 1.0, 0.55, 0.5, 0.0};
  EXPECT_EQ(mark_max_strategy(eta, 0.5), (MarkSet{1, 2}));
  EXPECT_EQ(mark_max_strategy(eta, 0.99), (MarkSet{1}));
  EXPECT_THROW(mark_max_strategy(eta, 1.5), DomainError);
}

TEST(Fit, LogLogSlope)
{
  std::vector<double> x, y;
  for (int k = 1; k <= 6; ++k)
  {
    x.push_back(std::pow(2.0, k));
    y.push_back(3.0 * std::pow(x.back(), -1.0 / 3.0));
  }
  EXPECT_NEAR(loglog_slope(x, y, 3), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(loglog_slope(x, y, 6), -1.0 / 3.0, 1e-12);
}

TEST(Solve, CoarseExampleIsAccurate)
{
  const AdaptOptions o = example_options();
  const TetMesh m = gen_shell_mesh(o.geometry, 0.5, 1);
  const SolveResult s = solve_scattering(m, o, o.n_trunc);
  const double err = h1_error(m, s.u, o.exact);
  const CVector ui = interpolate(m, [&](const Vec3 &x) { return o.exact(x).u; });
  // Galerkin error is of the size of the interpolation error.
  EXPECT_LT(err, 3.0 * h1_error(m, ui, o.exact));
  EXPECT_GT(s.indicators.eps_h, 0.0);
  EXPECT_EQ(int(s.indicators.eta.size()), m.num_tets());
}

TEST(Adapt, LooseTargetStopsAfterOneSolve)
{
  AdaptOptions o = example_options();
  o.epsilon = 1e3;
  const RunRecord r = adapt_loop(gen_shell_mesh(o.geometry, 0.5, 0), o);
  EXPECT_EQ(r.status, AdaptStatus::Converged);
  EXPECT_EQ(r.iterations.size(), 1u);
}

TEST(Adapt, DofIncreasesAndCapStops)
{
  AdaptOptions o = example_options();
  o.epsilon = 1e-9;
  o.max_iterations = 4;
  std::vector<int> dofs;
  const RunRecord r = adapt_loop(gen_shell_mesh(o.geometry, 0.5, 0), o,
                                 [&](const IterationRecord &it, const TetMesh &, const CVector &,
                                     const IndicatorField &) { dofs.push_back(it.dof); });
  EXPECT_EQ(r.status, AdaptStatus::IterationCap);
  ASSERT_EQ(dofs.size(), 4u);
  for (size_t k = 1; k < dofs.size(); ++k)
    EXPECT_GT(dofs[k], dofs[k - 1]);
  for (const auto &it : r.iterations)
    ASSERT_TRUE(it.e_h.has_value());
}

TEST(Estimator, IndicatorsOnObstacleOnlyMesh)
{
  // Without Gamma_R faces the DtN term is absent and coeffs may be omitted.
  TetMesh m = gen_shell_mesh(SphericalGeometry(0.5, 1.0), 0.5, 0);
  for (auto &f : m.boundary_faces)
    f.tag = BoundaryTag::OBSTACLE;
  CVector u = CVector::Zero(m.num_dofs());
  const IndicatorField f = element_indicator(m, ElasticParams(), u, nullptr, nullptr);
  EXPECT_EQ(f.eta_l2, 0.0);
}

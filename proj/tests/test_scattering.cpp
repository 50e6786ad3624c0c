#include <gtest/gtest.h>

#include "elastodtn/scattering.hpp"

using namespace elastodtn;

namespace
{

// mu Lap u + (lambda + mu) grad div u + omega^2 u from differences of the Jacobian.
CVec3 navier_residual(const ElasticParams &p, const std::function<FieldJet(const Vec3 &)> &f,
                      const Vec3 &x, double h = 1e-4)
{
  CVec3 r = p.omega * p.omega * f(x).u;
  for (int b = 0; b < 3; ++b)
  {
    Vec3 xp = x, xm = x;
    xp[b] += h;
    xm[b] -= h;
    const CMat3 dJ = (f(xp).J - f(xm).J) / (2 * h);  // dJ(a, c) = d_b d_c u_a
    r += p.mu * dJ.col(b);
    r[b] += (p.lambda + p.mu) * dJ.trace();
  }
  return r;
}

}  // namespace

TEST(Incident, GreenColumnJacobianMatchesDifferences)
{
  const ElasticParams p;
  const Vec3 y(0.1, -0.2, 0.05), x(0.5, 0.3, -0.4);
  const double h = 1e-5;
  for (int col = 0; col < 3; ++col)
  {
    CMat3 J;
    for (int b = 0; b < 3; ++b)
    {
      Vec3 xp = x, xm = x;
      xp[b] += h;
      xm[b] -= h;
      J.col(b) = (green_tensor(p, xp, y).col(col) - green_tensor(p, xm, y).col(col)) / (2 * h);
    }
    EXPECT_LT((J - green_column_jacobian(p, x, y, col)).norm(), 1e-7);
  }
}

TEST(Incident, FieldsSolveNavier)
{
  const ElasticParams p(2.0, 1.0, pi);
  const IncidentField g = IncidentField::green_column(Vec3(0.1, 0, 0), 2, 10.0);
  const IncidentField w = IncidentField::plane_p(Vec3(0, 0.6, 0.8));
  for (const IncidentField *f : {&g, &w})
  {
    const auto jet = [&](const Vec3 &x) { return f->jet(p, x); };
    const Vec3 x(0.4, -0.5, 0.3);
    EXPECT_LT(navier_residual(p, jet, x).norm(), 1e-5 * (p.omega * p.omega * jet(x).u.norm()));
  }
}

TEST(Incident, GreenTensorSymmetric)
{
  const ElasticParams p;
  const CMat3 G = green_tensor(p, Vec3(0.3, 0.2, -0.1), Vec3::Zero());
  EXPECT_LT((G - G.transpose()).norm(), 1e-14);
  EXPECT_THROW(green_tensor(p, Vec3::Zero(), Vec3::Zero()), DomainError);
}

TEST(Incident, PlaneWaveHessianMatchesJacobianDifference)
{
  const ElasticParams p;
  const Vec3 d(0, 0.6, 0.8), x(0.2, 0.1, -0.3);
  const auto H = plane_wave_hessian(p, d, x);
  const double h = 1e-5;
  for (int b = 0; b < 3; ++b)
  {
    Vec3 xp = x, xm = x;
    xp[b] += h;
    xm[b] -= h;
    const CMat3 dJ = (plane_wave(p, d, xp).J - plane_wave(p, d, xm).J) / (2 * h);
    for (int a = 0; a < 3; ++a)
      EXPECT_LT((H[a].col(b) - dJ.row(a).transpose()).norm(), 1e-7);
  }
}

TEST(Exactness, InterpolationErrorIsFirstOrder)
{
  // Nodal interpolant of the exact field: e_h halves per uniform refinement.
  const Example1 ex;
  TetMesh m = gen_shell_mesh(SphericalGeometry(0.5, 1.0), 0.5, 0);
  double prev = 0;
  for (int lev = 0; lev < 3; ++lev)
  {
    const CVector u = interpolate(m, [&](const Vec3 &x) { return ex.exact(x).u; });
    const double e = ex.error(m, u);
    if (lev > 0)
      EXPECT_GE(prev / e, 1.8) << "level " << lev;
    prev = e;
    m = refine_uniform(m);
  }
}

#include <gtest/gtest.h>

#include <algorithm>

#include "elastodtn/fem.hpp"
#include "elastodtn/scattering.hpp"
#include "elastodtn/specfun.hpp"

using namespace elastodtn;

namespace
{

const SphericalGeometry shell(0.5, 1.0);

}  // namespace

TEST(Assembly, TranslationsInStiffnessKernel)
{
  const TetMesh m = gen_shell_mesh(shell, 0.5, 0);
  const InteriorSystem s = assemble_interior(m, ElasticParams());
  // mu grad:grad + (lambda+mu) div div; rotations are not in its kernel.
  const Vec3 c(1.0, 2.0, -0.5);
  RVector u(m.num_dofs());
  for (int v = 0; v < m.num_vertices(); ++v)
  {
    const Vec3 d = c;
    for (int k = 0; k < 3; ++k)
      u[dof_of(v, k)] = d[k];
  }
  EXPECT_LT((s.stiffness * u).norm(), 1e-12 * u.norm());
}

TEST(Assembly, MassIntegratesConstants)
{
  const TetMesh m = gen_shell_mesh(shell, 0.5, 1);
  const InteriorSystem s = assemble_interior(m, ElasticParams());
  RVector one = RVector::Zero(m.num_dofs());
  for (int v = 0; v < m.num_vertices(); ++v)
    one[dof_of(v, 0)] = 1.0;
  EXPECT_NEAR(one.dot(s.mass * one), mesh_volume(m), 1e-12);
}

TEST(Assembly, SymmetricSystem)
{
  const TetMesh m = gen_shell_mesh(shell, 0.5, 0);
  const InteriorSystem s = assemble_interior(m, ElasticParams());
  const SpMat d = SpMat(s.A.transpose()) - s.A;
  EXPECT_LT(d.norm(), 1e-13 * s.A.norm());
}

TEST(Assembly, StiffnessMatchesLinearFieldEnergy)
{
  // u = G x with constant gradient: a(u, u) = vol (mu G:G + (lambda+mu) tr(G)^2).
  const TetMesh m = gen_shell_mesh(shell, 0.5, 0);
  const ElasticParams p(2.0, 1.0, pi);
  const InteriorSystem s = assemble_interior(m, p);
  Mat3 G;
  G << 0.1, 0.4, -0.2, 0.3, -0.5, 0.0, 0.2, 0.1, 0.6;
  RVector u(m.num_dofs());
  for (int v = 0; v < m.num_vertices(); ++v)
  {
    const Vec3 d = G * m.vertices[v];
    for (int k = 0; k < 3; ++k)
      u[dof_of(v, k)] = d[k];
  }
  const double expect =
      mesh_volume(m) * (p.mu * G.squaredNorm() + (p.lambda + p.mu) * G.trace() * G.trace());
  EXPECT_NEAR(u.dot(s.stiffness * u), expect, 1e-10 * expect);
}

TEST(Tbc, LowRankMatchesModeSum)
{
  const TetMesh m = gen_shell_mesh(shell, 0.5, 0);
  const ElasticParams p;
  for (int N : {1, 3})
  {
    const BoundaryMoments mom = assemble_boundary_moments(m, shell, N);
    const LowRankTBC tbc(mom, p);
    const CMatrix B = tbc.dense_B(), S = mode_sum_B(mom, p);
    EXPECT_LT((B - S).norm(), 1e-12 * S.norm()) << "N=" << N;
  }
}

TEST(Tbc, FourierCoefficientsOfSingleHarmonic)
{
  const TetMesh m = refine_uniform(gen_shell_mesh(shell, 0.5, 1));
  const int N = 3;
  const BoundaryMoments mom = assemble_boundary_moments(m, shell, N);
  // Nodal interpolant of X_2^1 e_rho: the X coefficient of (2, 1) dominates.
  const CVector f = interpolate(m, [](const Vec3 &x) {
    const double r = x.norm(), th = std::acos(std::clamp(x[2] / r, -1.0, 1.0));
    const double ph = std::atan2(x[1], x[0]);
    return CVec3(vector_harmonics({2, 1}, th, ph, 1.0).X);
  });
  const ModeCoeffs c = sphere_fourier_coeffs(mom, f);
  EXPECT_NEAR(std::abs(c.at(2, 1)[2]), 1.0, 0.05);
  EXPECT_LT(std::abs(c.at(1, 0)[2]), 0.05);
  EXPECT_LT(std::abs(c.at(2, 1)[0]), 0.05);
}

TEST(Dirichlet, EliminationKeepsSymmetryAndLift)
{
  const TetMesh m = gen_shell_mesh(shell, 0.5, 0);
  const InteriorSystem s = assemble_interior(m, ElasticParams());
  const DirichletSystem d =
      apply_dirichlet(s.A, m, [](const Vec3 &x) { return CVec3(x.cast<cplx>()); });
  EXPECT_EQ(d.free_dofs.size() + d.fixed_dofs.size(), size_t(m.num_dofs()));
  const SpMat diff = SpMat(d.A_ff.transpose()) - d.A_ff;
  EXPECT_LT(diff.norm(), 1e-13 * d.A_ff.norm());
  const CVector full = d.expand(CVector::Zero(d.free_dofs.size()));
  for (size_t i = 0; i < d.fixed_dofs.size(); ++i)
    EXPECT_EQ(full[d.fixed_dofs[i]], d.g[i]);
}

#include <gtest/gtest.h>

#include <random>

#include "elastodtn/fem.hpp"
#include "elastodtn/solver.hpp"

using namespace elastodtn;

namespace
{

struct ShellProblem
{
  TetMesh mesh;
  InteriorSystem sys;
  DirichletSystem dir;
  LowRankTBC tbc;
};

ShellProblem make_problem(int N)
{
  const SphericalGeometry g(0.5, 1.0);
  const ElasticParams p;
  ShellProblem s;
  s.mesh = gen_shell_mesh(g, 0.5, 0);
  s.sys = assemble_interior(s.mesh, p);
  s.dir = apply_dirichlet(s.sys.A, s.mesh, nullptr);
  s.tbc = LowRankTBC(assemble_boundary_moments(s.mesh, g, N), p);
  return s;
}

CVector random_vector(int n, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> d;
  CVector b(n);
  for (int i = 0; i < n; ++i)
    b[i] = cplx(d(rng), d(rng));
  return b;
}

}  // namespace

TEST(Backend, NamesRoundTrip)
{
  for (Backend b : {Backend::Umfpack, Backend::Ldlt, Backend::Gmres})
    EXPECT_EQ(parse_backend(backend_name(b)), b);
  EXPECT_THROW(parse_backend("cholmod"), ContractError);
}

TEST(Factorization, BackendsAgree)
{
  const ShellProblem s = make_problem(1);
  const CVector b = random_vector(int(s.dir.A_ff.rows()), 3);
  std::vector<CVector> x;
  for (Backend bk : {Backend::Umfpack, Backend::Ldlt, Backend::Gmres})
  {
    SolverOptions o;
    o.backend = bk;
    o.tol = 1e-10;
    const auto f = Factorization::create(s.dir.A_ff, o);
    x.push_back(solve_A(*f, b));
    EXPECT_LT((s.dir.A_ff.cast<cplx>() * x.back() - b).norm(), 1e-9 * b.norm());
  }
  EXPECT_LT((x[0] - x[1]).norm(), 1e-8 * x[0].norm());
}

TEST(Woodbury, MatchesDenseSolve)
{
  const ShellProblem s = make_problem(4);
  ASSERT_LE(s.mesh.num_dofs(), 500);
  const LowRankFactors lr = LowRankFactors::from_tbc(s.tbc, s.dir);
  const int L = int(s.dir.A_ff.rows());
  CMatrix U = CMatrix::Zero(L, lr.K()), V = CMatrix::Zero(lr.K(), L);
  for (size_t i = 0; i < lr.support.size(); ++i)
  {
    U.row(lr.support[i]) = lr.U_s.row(i);
    V.col(lr.support[i]) = lr.V_s.col(i);
  }
  const CMatrix W = CMatrix(s.dir.A_ff.cast<cplx>()) - U * V;
  const auto f = Factorization::create(s.dir.A_ff);
  WoodburySolver ws(*f, lr);
  for (unsigned k = 0; k < 10; ++k)
  {
    const CVector b = random_vector(L, 100 + k);
    const CVector z = ws.solve(b), zd = dense_oracle_solve(W, b);
    EXPECT_LT((W * z - b).norm() / b.norm(), 1e-8);
    EXPECT_LT((z - zd).norm() / zd.norm(), 1e-8);
  }
  const CVector x = random_vector(L, 7);
  EXPECT_LT((ws.apply_W(x) - W * x).norm(), 1e-12 * (W * x).norm());
}

TEST(Woodbury, FreeFunctionFromDenseFactors)
{
  const ShellProblem s = make_problem(2);
  const int L = int(s.dir.A_ff.rows());
  const CMatrix U = 0.1 * CMatrix::Random(L, 6), V = 0.1 * CMatrix::Random(6, L);
  const auto f = Factorization::create(s.dir.A_ff);
  const CVector b = random_vector(L, 9);
  const CVector z = woodbury_solve(*f, U, V, b);
  const CMatrix W = CMatrix(s.dir.A_ff.cast<cplx>()) - U * V;
  EXPECT_LT((W * z - b).norm() / b.norm(), 1e-8);
}

TEST(Woodbury, CapacityCap)
{
  const ShellProblem s = make_problem(4);
  const LowRankFactors lr = LowRankFactors::from_tbc(s.tbc, s.dir);
  const auto f = Factorization::create(s.dir.A_ff);
  WoodburyOptions o;
  o.max_K = 10;
  EXPECT_THROW(WoodburySolver(*f, lr, o), CapacityError);
}

#include "elastodtn/fem.hpp"

#include <algorithm>
#include <cmath>

#include "elastodtn/dtn.hpp"
#include "elastodtn/quadrature.hpp"
#include "elastodtn/specfun.hpp"

namespace elastodtn
{

using Trip = Eigen::Triplet<double, int>;

InteriorSystem assemble_interior(const TetMesh &m, const ElasticParams &p)
{
  const int L = m.num_dofs();
  std::vector<Trip> ks, ms;
  ks.reserve(size_t(m.num_tets()) * 144);
  ms.reserve(size_t(m.num_tets()) * 48);
  const double lm = p.lambda + p.mu;
  for (int t = 0; t < m.num_tets(); ++t)
  {
    double vol;
    const auto G = barycentric_gradients(m, t, &vol);
    if (vol < 1e-14)
      throw AssemblyError("tetrahedron " + std::to_string(t) + " has volume " +
                          std::to_string(vol) + " below 1e-14");
    const auto &T = m.tets[t];
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
      {
        const double gg = p.mu * vol * G.col(i).dot(G.col(j));
        const double mij = vol / 20.0 * (i == j ? 2.0 : 1.0);
        for (int a = 0; a < 3; ++a)
        {
          const int r = dof_of(T[i], a);
          for (int b = 0; b < 3; ++b)
          {
            double v = lm * vol * G(a, i) * G(b, j);
            if (a == b)
              v += gg;
            ks.emplace_back(r, dof_of(T[j], b), v);
          }
          ms.emplace_back(r, dof_of(T[j], a), mij);
        }
      }
  }
  InteriorSystem s;
  s.stiffness.resize(L, L);
  s.mass.resize(L, L);
  s.stiffness.setFromTriplets(ks.begin(), ks.end());
  s.mass.setFromTriplets(ms.begin(), ms.end());
  s.A = s.stiffness - (p.omega * p.omega) * s.mass;
  s.A.makeCompressed();
  return s;
}

BoundaryMoments assemble_boundary_moments(const TetMesh &m, const SphericalGeometry &g, int N)
{
  if (N < 0)
    throw DomainError("assemble_boundary_moments: N must be nonnegative");
  BoundaryMoments mom;
  mom.N = N;
  mom.R = g.r_outer;
  mom.num_dofs = m.num_dofs();
  std::vector<int> verts;
  for (const auto &f : m.boundary_faces)
    if (f.tag == BoundaryTag::OUTER)
      verts.insert(verts.end(), f.v.begin(), f.v.end());
  if (verts.empty())
    throw MeshError("mesh has no OUTER faces");
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  std::vector<int> row_of(m.num_vertices(), -1);
  for (size_t i = 0; i < verts.size(); ++i)
  {
    row_of[verts[i]] = int(i);
    for (int a = 0; a < 3; ++a)
      mom.dofs.push_back(dof_of(verts[i], a));
  }
  const int nm = num_modes(N);
  mom.phi = CMatrix::Zero(Eigen::Index(mom.dofs.size()), 3 * nm);

  const auto &rule = triangle_rule_deg4();
  std::vector<VectorHarmonic> vh;
  for (const auto &f : m.boundary_faces)
  {
    if (f.tag != BoundaryTag::OUTER)
      continue;
    const double area = face_area(m, f.v);
    for (size_t q = 0; q < rule.weight.size(); ++q)
    {
      Vec3 x = Vec3::Zero();
      for (int k = 0; k < 3; ++k)
        x += rule.bary[q][k] * m.vertices[f.v[k]];
      const auto sp = SphericalPoint::from_cartesian(x);
      vector_harmonics_all(N, sp.theta, sp.phi, g.r_outer, vh);
      const double w = rule.weight[q] * area;
      for (int k = 0; k < 3; ++k)
      {
        const double wl = w * rule.bary[q][k];
        const int r0 = 3 * row_of[f.v[k]];
        for (int mi = 0; mi < nm; ++mi)
          for (int a = 0; a < 3; ++a)
          {
            mom.phi(r0 + a, 3 * mi + 0) += wl * vh[mi].U[a];
            mom.phi(r0 + a, 3 * mi + 1) += wl * vh[mi].V[a];
            mom.phi(r0 + a, 3 * mi + 2) += wl * vh[mi].X[a];
          }
      }
    }
  }
  return mom;
}

LowRankTBC::LowRankTBC(BoundaryMoments moments, const ElasticParams &p) : mom_(std::move(moments))
{
  const int nm = num_modes(mom_.N);
  blocks_.resize(nm);
  for (int n = 0; n <= mom_.N; ++n)
  {
    CMat3 M = mode_matrix_cache().get(p, mom_.R, n);
    if (n == 0)
    {
      const cplx m33 = M(2, 2);
      M.setZero();
      M(2, 2) = m33;
    }
    for (int m = -n; m <= n; ++m)
      blocks_[mode_index(n, m)] = M;
  }
}

CVector LowRankTBC::apply_blocks(const CVector &c) const
{
  CVector out(c.size());
  for (size_t k = 0; k < blocks_.size(); ++k)
    out.segment<3>(3 * k) = blocks_[k] * c.segment<3>(3 * k);
  return out;
}

CMatrix LowRankTBC::apply_blocks(const CMatrix &c) const
{
  CMatrix out(c.rows(), c.cols());
  for (size_t k = 0; k < blocks_.size(); ++k)
    out.middleRows<3>(3 * k) = blocks_[k] * c.middleRows<3>(3 * k);
  return out;
}

CVector LowRankTBC::apply_V(const CVector &x) const
{
  if (x.size() != L())
    throw ContractError("LowRankTBC::apply_V: length mismatch");
  CVector xb(mom_.dofs.size());
  for (size_t i = 0; i < mom_.dofs.size(); ++i)
    xb[i] = x[mom_.dofs[i]];
  return apply_blocks(CVector(mom_.phi.adjoint() * xb));
}

CVector LowRankTBC::apply_U(const CVector &y) const
{
  if (y.size() != K())
    throw ContractError("LowRankTBC::apply_U: length mismatch");
  CVector out = CVector::Zero(L());
  const CVector yb = mom_.phi * y;
  for (size_t i = 0; i < mom_.dofs.size(); ++i)
    out[mom_.dofs[i]] = yb[i];
  return out;
}

CMatrix LowRankTBC::dense_U() const
{
  CMatrix U = CMatrix::Zero(L(), K());
  for (size_t i = 0; i < mom_.dofs.size(); ++i)
    U.row(mom_.dofs[i]) = mom_.phi.row(i);
  return U;
}

CMatrix LowRankTBC::dense_V() const
{
  return apply_blocks(CMatrix(dense_U().adjoint()));
}

CMatrix LowRankTBC::dense_B() const { return dense_U() * dense_V(); }

CMatrix mode_sum_B(const BoundaryMoments &mom, const ElasticParams &p)
{
  const int L = mom.num_dofs;
  CMatrix B = CMatrix::Zero(L, L);
  CMatrix full = CMatrix::Zero(L, mom.K());
  for (size_t i = 0; i < mom.dofs.size(); ++i)
    full.row(mom.dofs[i]) = mom.phi.row(i);
  for (int n = 0; n <= mom.N; ++n)
  {
    const CMat3 M = dtn_mode_matrix(p, mom.R, n);
    for (int m = -n; m <= n; ++m)
    {
      const int k = mode_index(n, m);
      const auto pu = full.col(3 * k), pv = full.col(3 * k + 1), px = full.col(3 * k + 2);
      if (n > 0)
      {
        B += M(0, 0) * pu * pu.adjoint();
        B += M(0, 2) * pu * px.adjoint();
        B += M(1, 1) * pv * pv.adjoint();
        B += M(2, 0) * px * pu.adjoint();
      }
      B += M(2, 2) * px * px.adjoint();
    }
  }
  return B;
}

// ---------------------------------------------------------------------------

CVector DirichletSystem::restrict_free(const CVector &full) const
{
  CVector r(free_dofs.size());
  for (size_t i = 0; i < free_dofs.size(); ++i)
    r[i] = full[free_dofs[i]];
  return r;
}

CVector DirichletSystem::expand(const CVector &u_free) const
{
  if (u_free.size() != Eigen::Index(free_dofs.size()))
    throw ContractError("DirichletSystem::expand: length mismatch");
  CVector u(num_dofs);
  for (size_t i = 0; i < free_dofs.size(); ++i)
    u[free_dofs[i]] = u_free[i];
  for (size_t i = 0; i < fixed_dofs.size(); ++i)
    u[fixed_dofs[i]] = g[i];
  return u;
}

DirichletSystem apply_dirichlet(const SpMat &A, const TetMesh &m, const VectorField &gfun)
{
  DirichletSystem d;
  d.num_dofs = m.num_dofs();
  if (A.rows() != d.num_dofs || A.cols() != d.num_dofs)
    throw ContractError("apply_dirichlet: matrix size does not match mesh");
  std::vector<char> fixed_vertex(m.num_vertices(), 0);
  for (const auto &f : m.boundary_faces)
    if (f.tag == BoundaryTag::OBSTACLE)
      for (int v : f.v)
        fixed_vertex[v] = 1;
  d.free_index.assign(d.num_dofs, -1);
  std::vector<int> fixed_index(d.num_dofs, -1);
  std::vector<CVec3> gv;
  for (int v = 0; v < m.num_vertices(); ++v)
  {
    if (fixed_vertex[v])
    {
      const CVec3 val = gfun ? gfun(m.vertices[v]) : CVec3::Zero();
      if (!val.allFinite())
        throw DataError("Dirichlet data is not finite at vertex " + std::to_string(v) +
                        " (source point on the obstacle boundary?)");
      for (int a = 0; a < 3; ++a)
      {
        fixed_index[dof_of(v, a)] = int(d.fixed_dofs.size());
        d.fixed_dofs.push_back(dof_of(v, a));
      }
      gv.push_back(val);
    }
    else
      for (int a = 0; a < 3; ++a)
      {
        d.free_index[dof_of(v, a)] = int(d.free_dofs.size());
        d.free_dofs.push_back(dof_of(v, a));
      }
  }
  d.g.resize(d.fixed_dofs.size());
  for (size_t i = 0; i < gv.size(); ++i)
    d.g.segment<3>(3 * i) = gv[i];

  const int nf = int(d.free_dofs.size());
  std::vector<Trip> ff;
  ff.reserve(A.nonZeros());
  d.lift = CVector::Zero(nf);
  for (int c = 0; c < A.outerSize(); ++c)
  {
    const int fc = d.free_index[c];
    for (SpMat::InnerIterator it(A, c); it; ++it)
    {
      const int fr = d.free_index[it.row()];
      if (fr < 0)
        continue;
      if (fc >= 0)
        ff.emplace_back(fr, fc, it.value());
      else
        d.lift[fr] -= it.value() * d.g[fixed_index[c]];
    }
  }
  d.A_ff.resize(nf, nf);
  d.A_ff.setFromTriplets(ff.begin(), ff.end());
  d.A_ff.makeCompressed();
  return d;
}

CVector interpolate(const TetMesh &m, const VectorField &f)
{
  CVector u(m.num_dofs());
  for (int v = 0; v < m.num_vertices(); ++v)
    u.segment<3>(3 * v) = f(m.vertices[v]);
  return u;
}

ModeCoeffs sphere_fourier_coeffs(const BoundaryMoments &mom, const CVector &field)
{
  if (field.size() != mom.num_dofs)
    throw ContractError("sphere_fourier_coeffs: field length mismatch");
  CVector xb(mom.dofs.size());
  for (size_t i = 0; i < mom.dofs.size(); ++i)
    xb[i] = field[mom.dofs[i]];
  const CVector c = mom.phi.adjoint() * xb;
  ModeCoeffs out(mom.N);
  for (int k = 0; k < num_modes(mom.N); ++k)
    out.c[k] = c.segment<3>(3 * k);
  return out;
}

ModeCoeffs sphere_fourier_coeffs(const TetMesh &m, const SphericalGeometry &g,
                                 const CVector &field, int N)
{
  return sphere_fourier_coeffs(assemble_boundary_moments(m, g, N), field);
}

double hs_norm(const ModeCoeffs &c, double s)
{
  double sum = 0;
  for (int n = 0; n <= c.N; ++n)
  {
    const double w = std::pow(1.0 + n * (n + 1.0), s);
    for (int m = -n; m <= n; ++m)
      sum += w * c.at(n, m).squaredNorm();
  }
  return std::sqrt(sum);
}

CMat3 element_gradient(const TetMesh &m, int t, const CVector &field,
                       const Eigen::Matrix<double, 3, 4> &G)
{
  CMat3 J = CMat3::Zero();
  const auto &T = m.tets[t];
  for (int i = 0; i < 4; ++i)
    J += field.segment<3>(3 * T[i]) * G.col(i).transpose().cast<cplx>();
  return J;
}

namespace
{

// Returns (|grad u|^2, |div u|^2, |u|^2) integrated over the mesh.
std::array<double, 3> p1_integrals(const TetMesh &m, const CVector &field)
{
  if (field.size() != m.num_dofs())
    throw ContractError("field length does not match mesh");
  std::array<double, 3> s{0, 0, 0};
  for (int t = 0; t < m.num_tets(); ++t)
  {
    double vol;
    const auto G = barycentric_gradients(m, t, &vol);
    const CMat3 J = element_gradient(m, t, field, G);
    s[0] += vol * J.squaredNorm();
    s[1] += vol * std::norm(J.trace());
    const auto &T = m.tets[t];
    // Exact P1 mass: vol/20 (sum_i |u_i|^2 + |sum_i u_i|^2).
    CVec3 tot = CVec3::Zero();
    double sq = 0;
    for (int i = 0; i < 4; ++i)
    {
      tot += field.segment<3>(3 * T[i]);
      sq += field.segment<3>(3 * T[i]).squaredNorm();
    }
    s[2] += vol / 20.0 * (sq + tot.squaredNorm());
  }
  return s;
}

}  // namespace

double energy_norm(const TetMesh &m, const ElasticParams &p, const CVector &field)
{
  const auto s = p1_integrals(m, field);
  return std::sqrt(p.mu * s[0] + (p.lambda + p.mu) * s[1] + p.omega * p.omega * s[2]);
}

double h1_norm(const TetMesh &m, const CVector &field)
{
  const auto s = p1_integrals(m, field);
  return std::sqrt(s[0] + s[2]);
}

}  // namespace elastodtn

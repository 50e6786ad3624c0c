#include "elastodtn/scattering.hpp"

#include <cmath>

#include "elastodtn/quadrature.hpp"

namespace elastodtn
{

namespace
{

constexpr cplx I(0.0, 1.0);

// Radial derivatives of f(r) = e^{ikr}/(4 pi r) up to third order.
struct Radial
{
  cplx f, f1, f2, f3;
};

Radial kernel_radial(double k, double r)
{
  Radial d;
  const cplx a = I * k - 1.0 / r;
  d.f = std::exp(I * k * r) / (4 * pi * r);
  d.f1 = d.f * a;
  const cplx q = a * a + 1.0 / (r * r);
  d.f2 = d.f * q;
  d.f3 = d.f1 * q + d.f * (2.0 * a / (r * r) - 2.0 / (r * r * r));
  return d;
}

// Hessian of f(|x|): a I + b x x^T and the derivatives of a, b in r.
struct HessParts
{
  cplx a, b, da, db;
};

HessParts hess_parts(const Radial &d, double r)
{
  HessParts h;
  h.a = d.f1 / r;
  h.b = (d.f2 - d.f1 / r) / (r * r);
  h.da = d.f2 / r - d.f1 / (r * r);
  h.db = (d.f3 - d.f2 / r + d.f1 / (r * r)) / (r * r) - 2.0 * (d.f2 - d.f1 / r) / (r * r * r);
  return h;
}

double checked_distance(const Vec3 &x, const Vec3 &y)
{
  const double r = (x - y).norm();
  if (r < 1e-12)
    throw DomainError("Green function evaluated at its source point");
  return r;
}

}  // namespace

cplx helmholtz_kernel(double kappa, const Vec3 &x, const Vec3 &y)
{
  return kernel_radial(kappa, checked_distance(x, y)).f;
}

FieldJet plane_wave(const ElasticParams &p, const Vec3 &d, const Vec3 &x)
{
  const cplx e = std::exp(I * p.kappa_p * x.dot(d));
  FieldJet j;
  j.u = d.cast<cplx>() * e;
  j.J = (I * p.kappa_p * e) * (d * d.transpose()).cast<cplx>();
  return j;
}

std::array<CMat3, 3> plane_wave_hessian(const ElasticParams &p, const Vec3 &d, const Vec3 &x)
{
  const cplx e = std::exp(I * p.kappa_p * x.dot(d));
  std::array<CMat3, 3> H;
  for (int a = 0; a < 3; ++a)
    H[a] = (-p.kappa_p * p.kappa_p * d[a] * e) * (d * d.transpose()).cast<cplx>();
  return H;
}

CMat3 green_tensor(const ElasticParams &p, const Vec3 &x, const Vec3 &y)
{
  const double r = checked_distance(x, y);
  const Vec3 z = x - y;
  const Radial ds = kernel_radial(p.kappa_s, r), dp = kernel_radial(p.kappa_p, r);
  const HessParts hs = hess_parts(ds, r), hp = hess_parts(dp, r);
  const double w2 = p.omega * p.omega;
  CMat3 G = ((ds.f / p.mu + (hs.a - hp.a) / w2) * Mat3::Identity().cast<cplx>()).eval();
  G += ((hs.b - hp.b) / w2) * (z * z.transpose()).cast<cplx>();
  return G;
}

CMat3 green_column_jacobian(const ElasticParams &p, const Vec3 &x, const Vec3 &y, int col)
{
  if (col < 0 || col > 2)
    throw DomainError("Green tensor column must be 0, 1 or 2");
  const double r = checked_distance(x, y);
  const Vec3 z = x - y;
  const Radial ds = kernel_radial(p.kappa_s, r), dp = kernel_radial(p.kappa_p, r);
  const HessParts hs = hess_parts(ds, r), hp = hess_parts(dp, r);
  const double w2 = p.omega * p.omega;
  const cplx da = (hs.da - hp.da) / w2, db = (hs.db - hp.db) / w2, b = (hs.b - hp.b) / w2;
  const int j = col;
  CMat3 J;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
    {
      // d_k G_ij
      cplx v = (i == j ? ds.f1 * z[k] / (r * p.mu) : cplx(0));
      v += (i == j ? da * z[k] / r : cplx(0));
      v += db * z[k] / r * z[i] * z[j];
      v += b * ((i == k ? z[j] : 0.0) + (j == k ? z[i] : 0.0));
      J(i, k) = v;
    }
  return J;
}

IncidentField IncidentField::plane_p(const Vec3 &d)
{
  if (std::abs(d.norm() - 1.0) > 1e-12)
    throw DomainError("plane wave direction must be a unit vector");
  IncidentField f;
  f.kind = Kind::PlaneP;
  f.direction = d;
  f.scale = 1.0;
  return f;
}

IncidentField IncidentField::green_column(const Vec3 &y, int column, double scale)
{
  if (column < 0 || column > 2)
    throw DomainError("Green tensor column must be 0, 1 or 2");
  IncidentField f;
  f.kind = Kind::GreenColumn;
  f.source = y;
  f.column = column;
  f.scale = scale;
  return f;
}

FieldJet IncidentField::jet(const ElasticParams &p, const Vec3 &x) const
{
  if (kind == Kind::PlaneP)
  {
    FieldJet j = plane_wave(p, direction, x);
    j.u *= scale;
    j.J *= scale;
    return j;
  }
  FieldJet j;
  j.u = scale * green_tensor(p, x, source).col(column);
  j.J = scale * green_column_jacobian(p, x, source, column);
  return j;
}

double h1_error(const TetMesh &m, const CVector &uh, const JetFunction &exact)
{
  if (uh.size() != m.num_dofs())
    throw ContractError("h1_error: field length does not match mesh");
  const auto &rule = tet_rule_deg2();
  double sum = 0;
  for (int t = 0; t < m.num_tets(); ++t)
  {
    double vol;
    const auto G = barycentric_gradients(m, t, &vol);
    const CMat3 Jh = element_gradient(m, t, uh, G);
    const auto &T = m.tets[t];
    for (size_t q = 0; q < rule.weight.size(); ++q)
    {
      Vec3 x = Vec3::Zero();
      CVec3 u = CVec3::Zero();
      for (int i = 0; i < 4; ++i)
      {
        x += rule.bary[q][i] * m.vertices[T[i]];
        u += rule.bary[q][i] * uh.segment<3>(3 * T[i]);
      }
      const FieldJet e = exact(x);
      if (!e.u.allFinite() || !e.J.allFinite())
        throw DataError("exact field is singular inside the mesh");
      sum += rule.weight[q] * vol * ((u - e.u).squaredNorm() + (Jh - e.J).squaredNorm());
    }
  }
  return std::sqrt(sum);
}

double field_h1_norm(const TetMesh &m, const ElasticParams &p, const IncidentField &f)
{
  return h1_error(m, CVector::Zero(m.num_dofs()), [&](const Vec3 &x) { return f.jet(p, x); });
}

FieldJet Example1::exact(const Vec3 &x) const
{
  FieldJet j = incident.jet(params, x);
  j.u = -j.u;
  j.J = -j.J;
  return j;
}

double Example1::error(const TetMesh &m, const CVector &uh) const
{
  return h1_error(m, uh, [this](const Vec3 &x) { return exact(x); });
}

}  // namespace elastodtn

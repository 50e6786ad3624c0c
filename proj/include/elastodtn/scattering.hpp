#ifndef ELASTODTN_SCATTERING_HPP
#define ELASTODTN_SCATTERING_HPP

#include <array>

#include "elastodtn/common.hpp"
#include "elastodtn/fem.hpp"
#include "elastodtn/mesh.hpp"

namespace elastodtn
{

// e^{i k r} / (4 pi r), r = |x - y|.
cplx helmholtz_kernel(double kappa, const Vec3 &x, const Vec3 &y);

// Value and Jacobian J(a, b) = d u_a / d x_b.
struct FieldJet
{
  CVec3 u;
  CMat3 J;
};

// d exp(i k_p x.d).
FieldJet plane_wave(const ElasticParams &p, const Vec3 &d, const Vec3 &x);
// Second derivatives: H[a](b, c) = d^2 u_a / dx_b dx_c.
std::array<CMat3, 3> plane_wave_hessian(const ElasticParams &p, const Vec3 &d, const Vec3 &x);

// Kupradze tensor (1/mu) g_s I + (1/omega^2) grad grad^T (g_s - g_p).
CMat3 green_tensor(const ElasticParams &p, const Vec3 &x, const Vec3 &y);
// d G(:, col) / dx as a Jacobian.
CMat3 green_column_jacobian(const ElasticParams &p, const Vec3 &x, const Vec3 &y, int col);

struct IncidentField
{
  enum class Kind
  {
    PlaneP,
    GreenColumn
  };
  Kind kind = Kind::GreenColumn;
  Vec3 direction = Vec3(0, 0, 1);  // PlaneP
  Vec3 source = Vec3::Zero();      // GreenColumn
  int column = 2;                  // 0-based column of G
  double scale = 10.0;

  static IncidentField plane_p(const Vec3 &d);
  static IncidentField green_column(const Vec3 &y, int column, double scale);

  FieldJet jet(const ElasticParams &p, const Vec3 &x) const;
  CVec3 value(const ElasticParams &p, const Vec3 &x) const { return jet(p, x).u; }
};

// H1(Omega_h) norm of an analytic field by the 4-point rule.
double field_h1_norm(const TetMesh &m, const ElasticParams &p, const IncidentField &f);

// H1 norm of u_h - u for a P1 field u_h and an analytic u given as a jet.
using JetFunction = std::function<FieldJet(const Vec3 &)>;
double h1_error(const TetMesh &m, const CVector &uh, const JetFunction &exact);

// Clamped ball centred at a point source: the scattered field is -u_inc.
struct Example1
{
  ElasticParams params{2.0, 1.0, pi};
  IncidentField incident = IncidentField::green_column(Vec3::Zero(), 2, 10.0);

  FieldJet exact(const Vec3 &x) const;
  double error(const TetMesh &m, const CVector &uh) const;
};

}  // namespace elastodtn

#endif

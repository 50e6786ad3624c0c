#ifndef ELASTODTN_FEM_HPP
#define ELASTODTN_FEM_HPP

#include <functional>
#include <vector>

#include <Eigen/Sparse>

#include "elastodtn/common.hpp"
#include "elastodtn/mesh.hpp"

namespace elastodtn
{

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// DoF numbering: 3 * vertex + component.
inline int dof_of(int vertex, int comp) { return 3 * vertex + comp; }

// Interior blocks of the sesquilinear form without the TBC term.
struct InteriorSystem
{
  SpMat stiffness;  // mu grad:grad + (lambda + mu) div div
  SpMat mass;       // u . v
  SpMat A;          // stiffness - omega^2 mass
};
InteriorSystem assemble_interior(const TetMesh &m, const ElasticParams &p);

// Surface moments of the nodal basis against U, V and X e_rho for every
// (n, m) with n <= N. Only Gamma_R rows are stored.
struct BoundaryMoments
{
  int N = 0;
  double R = 1.0;
  int num_dofs = 0;          // L
  std::vector<int> dofs;     // global DoF of each stored row, sorted
  CMatrix phi;               // dofs.size() x 3 (N+1)^2; column 3k + c, c = U, V, X
  int K() const { return int(phi.cols()); }
};
BoundaryMoments assemble_boundary_moments(const TetMesh &m, const SphericalGeometry &g, int N);

// B = U V with U = phi (scattered to full rows) and V = blockdiag(M_n) phi^*.
// For n = 0 only the X channel couples.
class LowRankTBC
{
public:
  LowRankTBC() = default;
  LowRankTBC(BoundaryMoments moments, const ElasticParams &p);

  int L() const { return mom_.num_dofs; }
  int K() const { return mom_.K(); }
  int N() const { return mom_.N; }
  const BoundaryMoments &moments() const { return mom_; }
  const std::vector<CMat3> &blocks() const { return blocks_; }

  // V x for a full length vector, and U y.
  CVector apply_V(const CVector &x) const;
  CVector apply_U(const CVector &y) const;
  // Block multiply by blockdiag(M_n).
  CVector apply_blocks(const CVector &c) const;
  CMatrix apply_blocks(const CMatrix &c) const;
  // B x without forming B.
  CVector apply(const CVector &x) const { return apply_U(apply_V(x)); }

  // Dense forms, for small oracle problems only.
  CMatrix dense_U() const;
  CMatrix dense_V() const;
  CMatrix dense_B() const;

private:
  BoundaryMoments mom_;
  std::vector<CMat3> blocks_;  // per mode index
};

// Direct accumulation of the five rank-one terms per mode (oracle).
CMatrix mode_sum_B(const BoundaryMoments &mom, const ElasticParams &p);

// Symmetric elimination of the OBSTACLE DoF.
struct DirichletSystem
{
  int num_dofs = 0;
  std::vector<int> free_dofs, fixed_dofs;
  std::vector<int> free_index;  // global -> free position, -1 if fixed
  SpMat A_ff;
  CVector g;     // prescribed values on fixed_dofs
  CVector lift;  // -A_fd g, right side of the reduced system

  CVector restrict_free(const CVector &full) const;
  CVector expand(const CVector &u_free) const;
};
using VectorField = std::function<CVec3(const Vec3 &)>;
DirichletSystem apply_dirichlet(const SpMat &A, const TetMesh &m, const VectorField &g);

// Nodal interpolant of a vector field.
CVector interpolate(const TetMesh &m, const VectorField &f);

// Per-mode triples (u_1, u_2, u_3) of a field on Gamma_R.
struct ModeCoeffs
{
  int N = -1;
  std::vector<CVec3> c;  // indexed by mode_index(n, m)

  explicit ModeCoeffs(int N_ = -1) : N(N_), c(N_ >= 0 ? num_modes(N_) : 0, CVec3::Zero()) {}
  CVec3 &at(int n, int m) { return c[mode_index(n, m)]; }
  const CVec3 &at(int n, int m) const { return c[mode_index(n, m)]; }
};
ModeCoeffs sphere_fourier_coeffs(const BoundaryMoments &mom, const CVector &field);
ModeCoeffs sphere_fourier_coeffs(const TetMesh &m, const SphericalGeometry &g,
                                 const CVector &field, int N);

double hs_norm(const ModeCoeffs &c, double s);

// Weighted energy norm: mu |grad u|^2 + (lambda + mu) |div u|^2 + omega^2 |u|^2.
double energy_norm(const TetMesh &m, const ElasticParams &p, const CVector &field);
// Discrete H1 norm of a P1 field.
double h1_norm(const TetMesh &m, const CVector &field);

// Element gradient (row a = component, column = d/dx_b) of a P1 field.
CMat3 element_gradient(const TetMesh &m, int t, const CVector &field,
                       const Eigen::Matrix<double, 3, 4> &G);

}  // namespace elastodtn

#endif

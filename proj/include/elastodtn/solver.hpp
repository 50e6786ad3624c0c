#ifndef ELASTODTN_SOLVER_HPP
#define ELASTODTN_SOLVER_HPP

#include <memory>
#include <string>
#include <vector>

#include "elastodtn/common.hpp"
#include "elastodtn/fem.hpp"

namespace elastodtn
{

enum class Backend
{
  Umfpack,  // sparse LU, default
  Ldlt,     // simplicial LDL^T with AMD ordering
  Gmres     // restarted GMRES with a diagonal preconditioner
};

Backend parse_backend(const std::string &name);
std::string backend_name(Backend b);

struct SolverOptions
{
  Backend backend = Backend::Umfpack;
  double tol = 1e-10;        // relative residual required from solve_A
  int gmres_restart = 100;
  int gmres_max_iter = 10000;
};

// Reusable factorization (or iterative context) for a real square matrix.
// solve() is const and may be called concurrently.
class Factorization
{
public:
  virtual ~Factorization() = default;
  static std::unique_ptr<Factorization> create(const SpMat &A, const SolverOptions &opt = {});

  int size() const { return int(A_.rows()); }
  const SpMat &matrix() const { return A_; }
  const SolverOptions &options() const { return opt_; }

  // Raw real solves, one column at a time; no residual control.
  virtual RMatrix solve_raw(const RMatrix &b) const = 0;

protected:
  Factorization(const SpMat &A, const SolverOptions &opt) : A_(A), opt_(opt) {}
  SpMat A_;
  SolverOptions opt_;
};

// A z = b for complex b with real A: real and imaginary parts solved
// separately, then up to three refinement sweeps to reach opt.tol.
CVector solve_A(const Factorization &f, const CVector &b);
CMatrix solve_A(const Factorization &f, const CMatrix &b);

// Low rank term B = U V with U nonzero only on `support` rows and V nonzero
// only on `support` columns. V is kept as its support columns V_s.
struct LowRankFactors
{
  int L = 0;
  std::vector<int> support;
  CMatrix U_s;  // |support| x K
  CMatrix V_s;  // K x |support|
  // Optional: conj_of[k] = j means column k of U is conj(column j) (j < k);
  // -1 for independent columns. Halves the solves for harmonic moments.
  std::vector<int> conj_of;

  int K() const { return int(U_s.cols()); }
  static LowRankFactors from_dense(const CMatrix &U, const CMatrix &V);
  // Restriction of the TBC factors to the free DoF of a Dirichlet system.
  static LowRankFactors from_tbc(const LowRankTBC &tbc, const DirichletSystem &d);
  static LowRankFactors from_tbc(const LowRankTBC &tbc);
};

struct WoodburyOptions
{
  int max_K = 6000;
  double singular_tol = 1e-12;               // reciprocal condition guard for H
  size_t store_C_bytes = size_t(512) << 20;  // keep C = A^{-1} U when it fits
  int block = 32;                            // columns per solve block
  double residual_tol = 1e-8;
};

struct WoodburyStats
{
  int K = 0;
  int real_solves = 0;
  bool stored_C = false;
  double rcond_H = 0;
  double residual = 0;
  double setup_ms = 0;
};

// Solves (A - U V) z = b by the capacity matrix H = I - V A^{-1} U.
// Setup forms C = A^{-1} U block by block and factors H; each solve is then
// z1 = A^{-1} b, z2 = V z1, z3 = H^{-1} z2, z4 = C z3, z = z1 + z4.
class WoodburySolver
{
public:
  WoodburySolver(const Factorization &A, LowRankFactors lr, const WoodburyOptions &opt = {});

  CVector solve(const CVector &b);
  const WoodburyStats &stats() const { return stats_; }
  // (A - U V) x without forming U V.
  CVector apply_W(const CVector &x) const;

private:
  CVector apply_U(const CVector &y) const;
  CVector apply_V(const CVector &x) const;

  const Factorization &A_;
  LowRankFactors lr_;
  WoodburyOptions opt_;
  CMatrix C_;  // L x K when stored
  Eigen::PartialPivLU<CMatrix> H_;
  WoodburyStats stats_;
};

CVector woodbury_solve(const Factorization &A, const CMatrix &U, const CMatrix &V,
                       const CVector &b, const WoodburyOptions &opt = {});

// Dense partial-pivot LU, n <= 3000.
CVector dense_oracle_solve(const CMatrix &W, const CVector &b);

}  // namespace elastodtn

#endif

#include "elastodtn/solver.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <unsupported/Eigen/IterativeSolvers>

#include <umfpack.h>

namespace elastodtn
{

Backend parse_backend(const std::string &name)
{
  if (name == "umfpack" || name == "direct")
    return Backend::Umfpack;
  if (name == "ldlt")
    return Backend::Ldlt;
  if (name == "gmres")
    return Backend::Gmres;
  throw ContractError("unknown solver backend '" + name + "' (umfpack|ldlt|gmres)");
}

std::string backend_name(Backend b)
{
  switch (b)
  {
  case Backend::Umfpack: return "umfpack";
  case Backend::Ldlt: return "ldlt";
  case Backend::Gmres: return "gmres";
  }
  return "?";
}

namespace
{

using RowBlock = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Many right sides are pushed through the triangular factors together: each
// factor entry then updates a contiguous row of the block instead of a scalar.
constexpr int solve_block = 64;

// x_i -= a * x_j over a block row.
inline void row_axpy(double *xi, const double *xj, double a, int nb)
{
  for (int c = 0; c < nb; ++c)
    xi[c] -= a * xj[c];
}

// UMFPACK LU with METIS (or AMD) ordering; the factors are copied out so the
// solves can run blocked. P R A Q = L U.
class UmfpackFactorization final : public Factorization
{
public:
  UmfpackFactorization(const SpMat &A, const SolverOptions &opt) : Factorization(A, opt)
  {
    A_.makeCompressed();
    n_ = int(A_.rows());
    double control[UMFPACK_CONTROL], info[UMFPACK_INFO];
    umfpack_di_defaults(control);
    control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    control[UMFPACK_ORDERING] = UMFPACK_ORDERING_METIS;
    void *sym = nullptr, *num = nullptr;
    int st = umfpack_di_symbolic(n_, n_, A_.outerIndexPtr(), A_.innerIndexPtr(), A_.valuePtr(),
                                 &sym, control, info);
    if (st != UMFPACK_OK)
    {
      control[UMFPACK_ORDERING] = UMFPACK_ORDERING_AMD;
      st = umfpack_di_symbolic(n_, n_, A_.outerIndexPtr(), A_.innerIndexPtr(), A_.valuePtr(),
                               &sym, control, info);
    }
    if (st != UMFPACK_OK)
      throw SolverError("UMFPACK symbolic analysis failed (status " + std::to_string(st) + ")");
    st = umfpack_di_numeric(A_.outerIndexPtr(), A_.innerIndexPtr(), A_.valuePtr(), sym, &num,
                            control, info);
    umfpack_di_free_symbolic(&sym);
    if (st != UMFPACK_OK)
    {
      if (num)
        umfpack_di_free_numeric(&num);
      throw SolverError("sparse LU failed: matrix is singular (UMFPACK status " +
                        std::to_string(st) + ", rcond " + std::to_string(info[UMFPACK_RCOND]) +
                        ")");
    }
    rcond_ = info[UMFPACK_RCOND];
    int lnz, unz, nr, nc, nzud;
    umfpack_di_get_lunz(&lnz, &unz, &nr, &nc, &nzud, num);
    Lp_.resize(n_ + 1), Lj_.resize(lnz), Lx_.resize(lnz);
    Up_.resize(n_ + 1), Ui_.resize(unz), Ux_.resize(unz);
    P_.resize(n_), Q_.resize(n_), Dx_.resize(n_), Rs_.resize(n_);
    int recip = 0;
    st = umfpack_di_get_numeric(Lp_.data(), Lj_.data(), Lx_.data(), Up_.data(), Ui_.data(),
                                Ux_.data(), P_.data(), Q_.data(), Dx_.data(), &recip, Rs_.data(),
                                num);
    umfpack_di_free_numeric(&num);
    if (st != UMFPACK_OK)
      throw SolverError("UMFPACK factor extraction failed (status " + std::to_string(st) + ")");
    for (auto &r : Rs_)
      r = recip ? r : 1.0 / r;
  }

  RMatrix solve_raw(const RMatrix &b) const override
  {
    RMatrix x(b.rows(), b.cols());
    RowBlock X;
    for (Eigen::Index c0 = 0; c0 < b.cols(); c0 += solve_block)
    {
      const int nb = int(std::min<Eigen::Index>(solve_block, b.cols() - c0));
      X.resize(n_, nb);
      for (int k = 0; k < n_; ++k)
        X.row(k) = Rs_[P_[k]] * b.block(P_[k], c0, 1, nb);
      for (int i = 0; i < n_; ++i)
      {
        double *xi = X.row(i).data();
        for (int p = Lp_[i]; p < Lp_[i + 1]; ++p)
          if (Lj_[p] != i)
            row_axpy(xi, X.row(Lj_[p]).data(), Lx_[p], nb);
      }
      for (int j = n_ - 1; j >= 0; --j)
      {
        double *xj = X.row(j).data();
        const double inv = 1.0 / Dx_[j];
        for (int c = 0; c < nb; ++c)
          xj[c] *= inv;
        for (int p = Up_[j]; p < Up_[j + 1]; ++p)
          if (Ui_[p] != j)
            row_axpy(X.row(Ui_[p]).data(), xj, Ux_[p], nb);
      }
      for (int k = 0; k < n_; ++k)
        x.block(Q_[k], c0, 1, nb) = X.row(k);
    }
    return x;
  }

private:
  int n_ = 0;
  double rcond_ = 0;
  std::vector<int> Lp_, Lj_, Up_, Ui_, P_, Q_;
  std::vector<double> Lx_, Ux_, Dx_, Rs_;
};

class LdltFactorization final : public Factorization
{
public:
  LdltFactorization(const SpMat &A, const SolverOptions &opt) : Factorization(A, opt)
  {
    ldlt_.compute(A_);
    if (ldlt_.info() != Eigen::Success)
      throw SolverError("LDL^T factorization failed (zero pivot)");
    const auto D = ldlt_.vectorD();
    const double dmax = D.cwiseAbs().maxCoeff(), dmin = D.cwiseAbs().minCoeff();
    if (!(dmin > 1e-14 * dmax))
      throw SolverError("LDL^T factorization is numerically singular (pivot ratio " +
                        std::to_string(dmin / dmax) + ")");
  }

  RMatrix solve_raw(const RMatrix &b) const override
  {
    const auto &L = ldlt_.matrixL().nestedExpression();
    const auto D = ldlt_.vectorD();
    const int n = int(b.rows());
    RMatrix x(b.rows(), b.cols());
    RowBlock X;
    for (Eigen::Index c0 = 0; c0 < b.cols(); c0 += solve_block)
    {
      const int nb = int(std::min<Eigen::Index>(solve_block, b.cols() - c0));
      X = ldlt_.permutationP() * b.middleCols(c0, nb);
      for (int j = 0; j < n; ++j)
      {
        const double *xj = X.row(j).data();
        for (SpMat::InnerIterator it(L, j); it; ++it)
          if (it.row() > j)
            row_axpy(X.row(it.row()).data(), xj, it.value(), nb);
      }
      for (int j = 0; j < n; ++j)
        X.row(j) /= D[j];
      for (int j = n - 1; j >= 0; --j)
      {
        double *xj = X.row(j).data();
        for (SpMat::InnerIterator it(L, j); it; ++it)
          if (it.row() > j)
            row_axpy(xj, X.row(it.row()).data(), it.value(), nb);
      }
      x.middleCols(c0, nb) = ldlt_.permutationPinv() * RMatrix(X);
    }
    return x;
  }

private:
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

class GmresContext final : public Factorization
{
public:
  GmresContext(const SpMat &A, const SolverOptions &opt) : Factorization(A, opt)
  {
    for (int k = 0; k < A_.rows(); ++k)
      if (A_.coeff(k, k) == 0)
        throw SolverError("GMRES diagonal preconditioner: zero diagonal entry " +
                          std::to_string(k));
  }
  RMatrix solve_raw(const RMatrix &b) const override
  {
    Eigen::GMRES<SpMat, Eigen::DiagonalPreconditioner<double>> g;
    g.set_restart(opt_.gmres_restart);
    g.setTolerance(opt_.tol);
    g.setMaxIterations(opt_.gmres_max_iter);
    g.compute(A_);
    RMatrix x(b.rows(), b.cols());
    for (int c = 0; c < b.cols(); ++c)
    {
      x.col(c) = g.solve(b.col(c));
      if (g.info() != Eigen::Success)
        throw SolverError("GMRES did not converge in " + std::to_string(opt_.gmres_max_iter) +
                          " iterations (estimated error " + std::to_string(g.error()) + ")");
    }
    return x;
  }
};

}  // namespace

std::unique_ptr<Factorization> Factorization::create(const SpMat &A, const SolverOptions &opt)
{
  if (A.rows() != A.cols())
    throw ContractError("Factorization: matrix is not square");
  switch (opt.backend)
  {
  case Backend::Umfpack: return std::make_unique<UmfpackFactorization>(A, opt);
  case Backend::Ldlt: return std::make_unique<LdltFactorization>(A, opt);
  case Backend::Gmres: return std::make_unique<GmresContext>(A, opt);
  }
  throw ContractError("Factorization: bad backend");
}

CMatrix solve_A(const Factorization &f, const CMatrix &b)
{
  const int n = f.size(), nc = int(b.cols());
  if (b.rows() != n)
    throw ContractError("solve_A: right side has wrong length");
  if (!b.allFinite())
    throw SolverError("solve_A: right side is not finite");
  // Stack real and imaginary parts as 2 nc real columns.
  RMatrix rb(n, 2 * nc);
  rb.leftCols(nc) = b.real();
  rb.rightCols(nc) = b.imag();
  RMatrix x = RMatrix::Zero(n, 2 * nc);
  const RVector bn = rb.colwise().norm();
  double worst = 0;
  RMatrix r = rb;
  for (int sweep = 0; sweep < 4; ++sweep)
  {
    // Skip columns that are already converged (including zero columns).
    std::vector<int> active;
    worst = 0;
    for (int c = 0; c < 2 * nc; ++c)
    {
      const double rel = bn[c] > 0 ? r.col(c).norm() / bn[c] : 0.0;
      worst = std::max(worst, rel);
      if (rel > f.options().tol)
        active.push_back(c);
    }
    if (active.empty())
      break;
    RMatrix ra(n, active.size());
    for (size_t k = 0; k < active.size(); ++k)
      ra.col(k) = r.col(active[k]);
    const RMatrix dx = f.solve_raw(ra);
    for (size_t k = 0; k < active.size(); ++k)
      x.col(active[k]) += dx.col(k);
    r = rb - f.matrix() * x;
  }
  worst = 0;
  for (int c = 0; c < 2 * nc; ++c)
    if (bn[c] > 0)
      worst = std::max(worst, r.col(c).norm() / bn[c]);
  if (!(worst <= f.options().tol))
    throw SolverError("solve_A: relative residual " + std::to_string(worst) +
                      " above tolerance; A may be singular or ill-conditioned");
  CMatrix z(n, nc);
  z.real() = x.leftCols(nc);
  z.imag() = x.rightCols(nc);
  return z;
}

CVector solve_A(const Factorization &f, const CVector &b)
{
  return solve_A(f, CMatrix(b)).col(0);
}

// ---------------------------------------------------------------------------

LowRankFactors LowRankFactors::from_dense(const CMatrix &U, const CMatrix &V)
{
  if (U.cols() != V.rows() || U.rows() != V.cols())
    throw ContractError("low rank factors: U is L x K and V must be K x L");
  LowRankFactors lr;
  lr.L = int(U.rows());
  for (int i = 0; i < lr.L; ++i)
    lr.support.push_back(i);
  lr.U_s = U;
  lr.V_s = V;
  lr.conj_of.assign(U.cols(), -1);
  return lr;
}

namespace
{

LowRankFactors tbc_factors(const LowRankTBC &tbc, const std::vector<int> *free_index, int L)
{
  const auto &mom = tbc.moments();
  LowRankFactors lr;
  lr.L = L;
  for (int d : mom.dofs)
  {
    const int r = free_index ? (*free_index)[d] : d;
    if (r < 0)
      throw ContractError("TBC support intersects the Dirichlet boundary");
    lr.support.push_back(r);
  }
  lr.U_s = mom.phi;
  lr.V_s = tbc.apply_blocks(CMatrix(mom.phi.adjoint()));
  lr.conj_of.assign(mom.K(), -1);
  for (int n = 0; n <= mom.N; ++n)
    for (int m = 1; m <= n; ++m)
      for (int c = 0; c < 3; ++c)
        lr.conj_of[3 * mode_index(n, -m) + c] = 3 * mode_index(n, m) + c;
  return lr;
}

}  // namespace

LowRankFactors LowRankFactors::from_tbc(const LowRankTBC &tbc, const DirichletSystem &d)
{
  return tbc_factors(tbc, &d.free_index, int(d.free_dofs.size()));
}

LowRankFactors LowRankFactors::from_tbc(const LowRankTBC &tbc)
{
  return tbc_factors(tbc, nullptr, tbc.L());
}

WoodburySolver::WoodburySolver(const Factorization &A, LowRankFactors lr, const WoodburyOptions &opt)
    : A_(A), lr_(std::move(lr)), opt_(opt)
{
  const auto t0 = std::chrono::steady_clock::now();
  const int K = lr_.K(), L = lr_.L, S = int(lr_.support.size());
  stats_.K = K;
  if (L != A.size())
    throw ContractError("Woodbury: low rank factors do not match A");
  if (K > opt_.max_K)
    throw CapacityError("Woodbury: K = " + std::to_string(K) + " exceeds the limit " +
                        std::to_string(opt_.max_K) + "; relax the truncation tolerance");
  if (K == 0)
    return;
  if (lr_.conj_of.empty())
    lr_.conj_of.assign(K, -1);
  stats_.stored_C = double(L) * K * sizeof(cplx) <= double(opt_.store_C_bytes);
  if (stats_.stored_C)
    C_.resize(L, K);

  // VC = V_s C_s is accumulated per block; only support rows of C are needed.
  CMatrix C_s(S, K);
  std::vector<int> indep;
  for (int k = 0; k < K; ++k)
    if (lr_.conj_of[k] < 0)
      indep.push_back(k);
  for (size_t b0 = 0; b0 < indep.size(); b0 += opt_.block)
  {
    const int nb = int(std::min<size_t>(opt_.block, indep.size() - b0));
    // Only nonzero real or imaginary parts are solved.
    std::vector<std::pair<int, bool>> parts;  // (block column, imaginary)
    for (int c = 0; c < nb; ++c)
    {
      const auto col = lr_.U_s.col(indep[b0 + c]);
      if (col.real().squaredNorm() > 0)
        parts.push_back({c, false});
      if (col.imag().squaredNorm() > 0)
        parts.push_back({c, true});
    }
    RMatrix rhs = RMatrix::Zero(L, parts.size());
    for (size_t p = 0; p < parts.size(); ++p)
    {
      const auto col = lr_.U_s.col(indep[b0 + parts[p].first]);
      for (int i = 0; i < S; ++i)
        rhs(lr_.support[i], p) = parts[p].second ? col[i].imag() : col[i].real();
    }
    RMatrix sol = parts.empty() ? RMatrix() : A_.solve_raw(rhs);
    // One refinement sweep keeps the capacity matrix at solver accuracy.
    if (!parts.empty())
    {
      const RMatrix r = rhs - A_.matrix() * sol;
      if (r.norm() > opt_.residual_tol * 1e-2 * rhs.norm())
        sol += A_.solve_raw(r);
    }
    stats_.real_solves += int(parts.size());
    CMatrix X = CMatrix::Zero(L, nb);
    for (size_t p = 0; p < parts.size(); ++p)
    {
      if (parts[p].second)
        X.col(parts[p].first).imag() = sol.col(p);
      else
        X.col(parts[p].first).real() = sol.col(p);
    }
    for (int c = 0; c < nb; ++c)
    {
      const int k = indep[b0 + c];
      for (int i = 0; i < S; ++i)
        C_s(i, k) = X(lr_.support[i], c);
      if (stats_.stored_C)
        C_.col(k) = X.col(c);
    }
  }
  for (int k = 0; k < K; ++k)
  {
    const int j = lr_.conj_of[k];
    if (j < 0)
      continue;
    C_s.col(k) = C_s.col(j).conjugate();
    if (stats_.stored_C)
      C_.col(k) = C_.col(j).conjugate();
  }
  CMatrix H = CMatrix::Identity(K, K) - lr_.V_s * C_s;
  C_s.resize(0, 0);
  H_.compute(H);
  stats_.rcond_H = H_.rcond();
  if (!(stats_.rcond_H > opt_.singular_tol))
    throw SolverError("Woodbury capacity matrix is singular (rcond " +
                      std::to_string(stats_.rcond_H) +
                      "); the frequency may be near a resonance, perturb omega or change N");
  stats_.setup_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

CVector WoodburySolver::apply_U(const CVector &y) const
{
  CVector out = CVector::Zero(lr_.L);
  const CVector ys = lr_.U_s * y;
  for (size_t i = 0; i < lr_.support.size(); ++i)
    out[lr_.support[i]] = ys[i];
  return out;
}

CVector WoodburySolver::apply_V(const CVector &x) const
{
  CVector xs(lr_.support.size());
  for (size_t i = 0; i < lr_.support.size(); ++i)
    xs[i] = x[lr_.support[i]];
  return lr_.V_s * xs;
}

CVector WoodburySolver::apply_W(const CVector &x) const
{
  CVector y = A_.matrix().cast<cplx>() * x;
  if (lr_.K() > 0)
    y -= apply_U(apply_V(x));
  return y;
}

CVector WoodburySolver::solve(const CVector &b)
{
  if (b.size() != lr_.L)
    throw ContractError("Woodbury: right side has wrong length");
  const double bn = b.norm();
  if (bn == 0)
  {
    stats_.residual = 0;
    return CVector::Zero(lr_.L);
  }
  auto once = [&](const CVector &rhs) -> CVector {
    const CVector z1 = solve_A(A_, rhs);
    if (lr_.K() == 0)
      return z1;
    const CVector z2 = apply_V(z1);
    const CVector z3 = H_.solve(z2);
    const CVector z4 = stats_.stored_C ? CVector(C_ * z3) : solve_A(A_, apply_U(z3));
    return z1 + z4;
  };
  CVector z = once(b);
  CVector r = b - apply_W(z);
  stats_.residual = r.norm() / bn;
  for (int it = 0; it < 2 && stats_.residual > opt_.residual_tol; ++it)
  {
    z += once(r);
    r = b - apply_W(z);
    stats_.residual = r.norm() / bn;
  }
  if (!(stats_.residual <= opt_.residual_tol))
    throw SolverError("Woodbury solve: relative residual " + std::to_string(stats_.residual) +
                      " above " + std::to_string(opt_.residual_tol));
  return z;
}

CVector woodbury_solve(const Factorization &A, const CMatrix &U, const CMatrix &V,
                       const CVector &b, const WoodburyOptions &opt)
{
  if (U.cols() == 0)
    return solve_A(A, b);
  WoodburySolver w(A, LowRankFactors::from_dense(U, V), opt);
  return w.solve(b);
}

CVector dense_oracle_solve(const CMatrix &W, const CVector &b)
{
  if (W.rows() != W.cols() || W.rows() != b.size())
    throw ContractError("dense_oracle_solve: dimension mismatch");
  if (W.rows() > 3000)
    throw CapacityError("dense_oracle_solve: dimension above 3000");
  if (W.rows() == 0)
    return CVector();
  Eigen::PartialPivLU<CMatrix> lu(W);
  if (!(lu.rcond() > 1e-14))
    throw SolverError("dense_oracle_solve: matrix is singular (rcond " +
                      std::to_string(lu.rcond()) + ")");
  CVector z = lu.solve(b);
  CVector r = b - W * z;
  z += lu.solve(r);
  return z;
}

}  // namespace elastodtn

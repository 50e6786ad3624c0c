#include "elastodtn/dtn.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace elastodtn
{

namespace
{

cplx to_c(const ext_cplx &z)
{
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

struct ZPair
{
  ext_cplx zp, zs;
};

ZPair zvalues(const ElasticParams &p, double R, int n)
{
  return {log_deriv_ext(1, n, ext_real(p.kappa_p) * R), log_deriv_ext(1, n, ext_real(p.kappa_s) * R)};
}

ext_cplx lambda_from(const ZPair &z, int n)
{
  return z.zp * (1.0L + z.zs) - ext_real(n) * (n + 1);
}

void check_n(int n, int lo, const char *who)
{
  if (n < lo)
    throw DomainError(std::string(who) + ": degree " + std::to_string(n) + " below " +
                      std::to_string(lo));
}

}  // namespace

ext_cplx lambda_n_ext(const ElasticParams &p, double R, int n)
{
  check_n(n, 0, "lambda_n");
  return lambda_from(zvalues(p, R, n), n);
}

cplx lambda_n(const ElasticParams &p, double R, int n) { return to_c(lambda_n_ext(p, R, n)); }

CMat3 kn_matrix(const ElasticParams &p, double R, int n)
{
  check_n(n, 1, "kn_matrix");
  const auto z = zvalues(p, R, n);
  const double sq = std::sqrt(double(n) * (n + 1));
  const double ks2R2 = p.kappa_s * p.kappa_s * R * R;
  CMat3 K = CMat3::Zero();
  K(0, 0) = sq;
  K(0, 1) = -1.0 - to_c(z.zs);
  K(1, 2) = -ks2R2 / sq;
  K(2, 0) = to_c(z.zp);
  K(2, 1) = -sq;
  return K / R;
}

CMat3 kn_inverse(const ElasticParams &p, double R, int n)
{
  check_n(n, 1, "kn_inverse");
  const auto z = zvalues(p, R, n);
  const cplx L = to_c(lambda_from(z, n));
  const double sq = std::sqrt(double(n) * (n + 1));
  const double ks2R2 = p.kappa_s * p.kappa_s * R * R;
  CMat3 K = CMat3::Zero();
  K(0, 0) = -sq;
  K(0, 2) = 1.0 + to_c(z.zs);
  K(1, 0) = -to_c(z.zp);
  K(1, 2) = sq;
  K(2, 1) = -sq * L / ks2R2;
  return (R / L) * K;
}

CMat3 dtn_mode_matrix(const ElasticParams &p, double R, int n)
{
  check_n(n, 0, "dtn_mode_matrix");
  const auto z = zvalues(p, R, n);
  const ext_cplx L = lambda_from(z, n);
  const ext_real mu = p.mu, RR = R, w2 = ext_real(p.omega) * p.omega;
  const ext_real ks2R2 = ext_real(p.kappa_s) * p.kappa_s * RR * RR;
  const ext_real sq = std::sqrt(ext_real(n) * (n + 1));
  const ext_real c = mu / RR;
  CMat3 M = CMat3::Zero();
  M(0, 0) = to_c(-c * (1.0L + z.zp / L * ks2R2));
  M(0, 2) = to_c(sq * c * (1.0L + ks2R2 / L));
  M(1, 1) = to_c(c * z.zs);
  M(2, 0) = to_c(sq * c * (1.0L + w2 * RR * RR / (mu * L)));
  M(2, 2) = to_c(-c * (2.0L + w2 * RR * RR / (mu * L) * (1.0L + z.zs)));
  return M;
}

CMat3 mhat_matrix(const ElasticParams &p, double R, int n)
{
  const CMat3 M = dtn_mode_matrix(p, R, n);
  return -0.5 * (M + M.adjoint());
}

double mhat_definiteness(const ElasticParams &p, double R, int n)
{
  Eigen::SelfAdjointEigenSolver<CMat3> es(mhat_matrix(p, R, n), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

CMat3 propagation_matrix(const ElasticParams &p, const SphericalGeometry &g, int n)
{
  check_n(n, 1, "propagation_matrix");
  const double R = g.r_outer, Rp = g.r_inner;
  const ext_real kp = p.kappa_p, ks = p.kappa_s;
  const ext_cplx zpR = log_deriv_ext(1, n, kp * R), zsR = log_deriv_ext(1, n, ks * R);
  const ext_cplx zpRp = log_deriv_ext(1, n, kp * Rp), zsRp = log_deriv_ext(1, n, ks * Rp);
  const ext_cplx Lp = zpRp * (1.0L + zsRp) - ext_real(n) * (n + 1);
  const ext_cplx hp = hankel_ratio_ext(n, kp * R, kp * Rp);
  const ext_cplx hs = hankel_ratio_ext(n, ks * R, ks * Rp);
  const ext_real nn1 = ext_real(n) * (n + 1), sq = std::sqrt(nn1);
  const ext_cplx c = ext_real(Rp) / (ext_real(R) * Lp);
  CMat3 Q = CMat3::Zero();
  Q(0, 0) = to_c(c * (-nn1 * hp + zpRp * (1.0L + zsR) * hs));
  Q(0, 2) = to_c(c * sq * ((1.0L + zsRp) * hp - (1.0L + zsR) * hs));
  Q(1, 1) = to_c(hs);
  Q(2, 0) = to_c(c * sq * (-zpR * hp + zpRp * hs));
  Q(2, 2) = to_c(c * ((1.0L + zsRp) * zpR * hp - nn1 * hs));
  return Q;
}

PotentialSymbols potential_dtn_symbols(const ElasticParams &p, double R, int n)
{
  check_n(n, 0, "potential_dtn_symbols");
  PotentialSymbols s;
  s.t1 = log_deriv(1, n, p.kappa_p * R);
  const cplx zs = log_deriv(1, n, p.kappa_s * R);
  const cplx ikR(0.0, p.kappa_s * R);
  s.t2_u = ikR / (1.0 + zs);
  s.t2_v = (1.0 + zs) / ikR;
  return s;
}

double truncation_error(const SphericalGeometry &g, int N, double uinc_norm)
{
  return N * std::pow(g.r_inner / g.r_outer, N) * uinc_norm;
}

int select_truncation(const SphericalGeometry &g, double uinc_norm, double tol, int cap)
{
  if (!(tol > 0) || !(uinc_norm > 0))
    throw DomainError("select_truncation: tol and norm must be positive");
  const int peak = static_cast<int>(std::ceil(1.0 / std::log(g.r_outer / g.r_inner)));
  for (int N = 1; N <= cap; ++N)
  {
    if (truncation_error(g, N, uinc_norm) > tol)
      continue;
    // Below the peak the sequence still rises; require it to stay under tol
    // up to the peak, past which it is monotone.
    bool ok = true;
    for (int M = N + 1; M <= peak && ok; ++M)
      ok = truncation_error(g, M, uinc_norm) <= tol;
    if (ok)
      return N;
  }
  throw CapacityError("select_truncation: no N <= " + std::to_string(cap) +
                      " reaches tol " + std::to_string(tol) +
                      "; enlarge the gap between R and R'");
}

// ---------------------------------------------------------------------------

CMat3 ModeMatrixCache::get(const ElasticParams &p, double R, int n)
{
  const Key k{p.lambda, p.mu, p.omega, R, n};
  {
    std::shared_lock lock(mutex_);
    auto it = store_.find(k);
    if (it != store_.end())
      return it->second;
  }
  CMat3 M = dtn_mode_matrix(p, R, n);
  std::unique_lock lock(mutex_);
  return store_.emplace(k, M).first->second;
}

size_t ModeMatrixCache::size() const
{
  std::shared_lock lock(mutex_);
  return store_.size();
}

void ModeMatrixCache::clear()
{
  std::unique_lock lock(mutex_);
  store_.clear();
}

ModeMatrixCache &mode_matrix_cache()
{
  static ModeMatrixCache cache;
  return cache;
}

}  // namespace elastodtn

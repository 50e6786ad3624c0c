#ifndef ELASTODTN_DTN_HPP
#define ELASTODTN_DTN_HPP

#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "elastodtn/common.hpp"
#include "elastodtn/specfun.hpp"

namespace elastodtn
{

// Lambda_n(R) = z_n(k_p R) (1 + z_n(k_s R)) - n(n+1) with z = z^{(1)}.
cplx lambda_n(const ElasticParams &p, double R, int n);
// Extended range version; its imaginary part stays resolvable for n ~ 200.
ext_cplx lambda_n_ext(const ElasticParams &p, double R, int n);

// Maps potentials (phi, psi_2, psi_3) on the sphere to displacement
// coefficients (u_1, u_2, u_3). Requires n >= 1.
CMat3 kn_matrix(const ElasticParams &p, double R, int n);
CMat3 kn_inverse(const ElasticParams &p, double R, int n);

// Per-mode DtN matrix M_n(R). Full closed forms for every n >= 0; the n = 0
// rows and columns 1-2 are dropped by the low rank assembly, not here.
CMat3 dtn_mode_matrix(const ElasticParams &p, double R, int n);

// -(M_n + M_n^*)/2 and its smallest eigenvalue.
CMat3 mhat_matrix(const ElasticParams &p, double R, int n);
double mhat_definiteness(const ElasticParams &p, double R, int n);

// u_n(R) = Q_n u_n(R') for outgoing fields, n >= 1.
CMat3 propagation_matrix(const ElasticParams &p, const SphericalGeometry &g, int n);

struct PotentialSymbols
{
  cplx t1;    // z_n(k_p R)
  cplx t2_u;  // i k_s R / (1 + z_n(k_s R))
  cplx t2_v;  // (1 + z_n(k_s R)) / (i k_s R)
};
PotentialSymbols potential_dtn_symbols(const ElasticParams &p, double R, int n);

// eps_N = N (R'/R)^N ||u_inc||.
double truncation_error(const SphericalGeometry &g, int N, double uinc_norm);
// Smallest N >= 1 past the peak N* = ceil(1/ln(R/R')) with eps_N <= tol.
int select_truncation(const SphericalGeometry &g, double uinc_norm, double tol, int cap = 512);

// Thread safe cache of M_n keyed by (lambda, mu, omega, R, n).
class ModeMatrixCache
{
public:
  CMat3 get(const ElasticParams &p, double R, int n);
  size_t size() const;
  void clear();

private:
  using Key = std::tuple<double, double, double, double, int>;
  mutable std::shared_mutex mutex_;
  std::map<Key, CMat3> store_;
};

ModeMatrixCache &mode_matrix_cache();

}  // namespace elastodtn

#endif

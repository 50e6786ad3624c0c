#ifndef ELASTODTN_SPECFUN_HPP
#define ELASTODTN_SPECFUN_HPP

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "elastodtn/common.hpp"

namespace elastodtn
{

using ext_real = long double;
using ext_cplx = std::complex<long double>;

struct ModeIndex
{
  int n = 0;
  int m = 0;
};

struct SphericalPoint
{
  double rho = 1.0;
  double theta = 0.0;
  double phi = 0.0;

  static SphericalPoint from_cartesian(const Vec3 &x);
  Vec3 to_cartesian() const;
  Vec3 e_rho() const;
  Vec3 e_theta() const;
  Vec3 e_phi() const;
};

// ---------------------------------------------------------------------------
// Spherical Bessel functions.
//
// Fills j[0..nmax+1] and y[0..nmax+1] at x > 0. y by upward recurrence,
// j by Miller's downward recurrence normalized with sum (2k+1) j_k^2 = 1,
// and a short series when x < 1e-3.
// ---------------------------------------------------------------------------
template <class Real>
void sph_bessel_arrays(int nmax, Real x, std::vector<Real> &j, std::vector<Real> &y)
{
  using std::abs;
  using std::cos;
  using std::sin;
  using std::sqrt;
  if (!(x > 0))
    throw DomainError("sph_bessel: argument must be positive, got " +
                      std::to_string(static_cast<double>(x)));
  if (nmax < 0)
    throw DomainError("sph_bessel: negative degree");
  const int top = nmax + 1;
  j.assign(top + 1, Real(0));
  y.assign(top + 1, Real(0));

  const Real s = sin(x), c = cos(x);
  const Real huge = std::numeric_limits<Real>::max() / Real(1e10);
  y[0] = -c / x;
  if (top >= 1)
    y[1] = -c / (x * x) - s / x;
  for (int k = 1; k < top; ++k)
  {
    y[k + 1] = Real(2 * k + 1) / x * y[k] - y[k - 1];
    if (!(abs(y[k + 1]) < huge))
      throw RangeError("sph_bessel: y_" + std::to_string(k + 1) + "(" +
                       std::to_string(static_cast<double>(x)) +
                       ") overflows the floating point range");
  }

  if (x < Real(1e-3))
  {
    Real dfact = 1;  // (2k+1)!!
    Real xp = 1;     // x^k
    const Real x2 = x * x;
    for (int k = 0; k <= top; ++k)
    {
      dfact *= Real(2 * k + 1);
      if (k > 0)
        xp *= x;
      const Real a = Real(2 * k + 3), b = Real(2 * k + 5);
      j[k] = xp / dfact * (Real(1) - x2 / (2 * a) + x2 * x2 / (8 * a * b));
    }
    return;
  }

  const double xd = static_cast<double>(x);
  const int start = std::max(top, static_cast<int>(xd)) + 25 +
                    static_cast<int>(std::sqrt(40.0 * std::max<double>(top, xd)));
  const Real big = Real(1e100), shrink = Real(1e-100);
  Real fkp1 = 0, fk = Real(1e-30), sum = 0;
  for (int k = start; k >= 0; --k)
  {
    if (k <= top)
      j[k] = fk;
    sum += Real(2 * k + 1) * fk * fk;
    if (k == 0)
      break;
    Real fkm1 = Real(2 * k + 1) / x * fk - fkp1;
    fkp1 = fk;
    fk = fkm1;
    if (abs(fk) > big)
    {
      fk *= shrink;
      fkp1 *= shrink;
      sum *= shrink * shrink;
      for (int i = k; i <= top; ++i)
        j[i] *= shrink;
    }
  }
  Real scale = Real(1) / sqrt(sum);
  const Real j0 = s / x, j1 = s / (x * x) - c / x;
  if (abs(j0) > abs(j1) ? (j[0] * j0 < 0) : (j[1] * j1 < 0))
    scale = -scale;
  for (auto &v : j)
    v *= scale;
}

// Value and derivative of j_n, y_n at a single degree.
template <class Real>
struct SphBesselT
{
  Real j, y, dj, dy;
};

template <class Real>
SphBesselT<Real> sph_bessel_t(int n, Real x)
{
  if (n < 0 || n > 1000)
    throw DomainError("sph_bessel: degree out of range");
  std::vector<Real> j, y;
  sph_bessel_arrays<Real>(n, x, j, y);
  SphBesselT<Real> r;
  r.j = j[n];
  r.y = y[n];
  if (n == 0)
  {
    r.dj = -j[1];
    r.dy = -y[1];
  }
  else
  {
    r.dj = j[n - 1] - Real(n + 1) / x * j[n];
    r.dy = y[n - 1] - Real(n + 1) / x * y[n];
  }
  return r;
}

using SphBessel = SphBesselT<double>;

// Double precision values; throws RangeError if y_n exceeds double range.
SphBessel sph_bessel(int n, double x);

// h_n^{(kind)}(x) and its derivative.
struct HankelValue
{
  cplx h;
  cplx dh;
};
HankelValue sph_hankel(int kind, int n, double x);

// z_n^{(kind)}(t) = t h'/h. The imaginary part uses the Wronskian so it keeps
// its sign even when it is far below double precision relative to the real
// part; the extended version keeps magnitudes down to ~1e-4900.
ext_cplx log_deriv_ext(int kind, int n, ext_real t);
cplx log_deriv(int kind, int n, double t);

// h_n^{(1)}(a) / h_n^{(1)}(b) without forming either factor in double.
ext_cplx hankel_ratio_ext(int n, ext_real a, ext_real b);
cplx hankel_ratio(int n, double a, double b);

// ---------------------------------------------------------------------------
// Spherical harmonics (no Condon-Shortley phase, Y_n^{-m} = conj Y_n^m).
// ---------------------------------------------------------------------------
double clip_theta(double theta);

// Normalized associated Legendre values for all 0 <= m <= n <= N at theta.
class LegendreTable
{
public:
  LegendreTable() = default;
  LegendreTable(int N, double theta) { compute(N, theta); }
  void compute(int N, double theta);

  int degree() const { return N_; }
  // p(n,m) = normalized P_n^m(cos theta), q = p / sin theta (m >= 1),
  // d = d p / d theta.
  double p(int n, int m) const { return p_[idx(n, m)]; }
  double q(int n, int m) const { return q_[idx(n, m)]; }
  double d(int n, int m) const { return d_[idx(n, m)]; }

private:
  static int idx(int n, int m) { return n * (n + 1) / 2 + m; }
  int N_ = -1;
  std::vector<double> p_, q_, d_;
};

cplx sph_harmonic(const ModeIndex &mode, double theta, double phi);
cplx x_harmonic(const ModeIndex &mode, double theta, double phi, double R);

struct VectorHarmonic
{
  CVec3 U;  // tangential gradient field
  CVec3 V;  // e_rho x U
  CVec3 X;  // X_n^m e_rho
};

VectorHarmonic vector_harmonics(const ModeIndex &mode, double theta, double phi, double R);

// All modes n <= N at one direction; out[mode_index(n,m)].
void vector_harmonics_all(int N, double theta, double phi, double R,
                          std::vector<VectorHarmonic> &out);

// ---------------------------------------------------------------------------
// Verification of the vector calculus identities for f(rho) times the
// harmonics, by central differences in Cartesian coordinates.
// ---------------------------------------------------------------------------
struct RadialProfile
{
  std::function<cplx(double)> f, df, d2f;
};

struct IdentityReport
{
  double grad = 0;         // grad(f X)
  double curl = 0;         // curl of f U, f V, f X e_rho
  double div = 0;          // div of f U, f V, f X e_rho
  double laplacian = 0;    // Laplacian of f X
  double double_curl = 0;  // curl curl of f U, f V, f X e_rho
  double max() const;
};

IdentityReport verify_vector_identities(const ModeIndex &mode, const RadialProfile &f,
                                        double rho, double step = 1e-4, int samples = 4,
                                        unsigned seed = 7);

// ---------------------------------------------------------------------------
// Asymptotic Bessel inequalities. Each row records the smallest n from which
// the inequality holds for every tested index up to n_max.
// ---------------------------------------------------------------------------
struct LemmaRow
{
  std::string name;
  int onset = -1;          // -1 when it fails at n_max
  int n_max = 0;
  double worst_margin = 0; // min over n >= onset of (rhs - lhs) / |rhs|
};

std::vector<LemmaRow> verify_bessel_lemmas(int n_min, int n_max, double kappa_p,
                                           double kappa_s, double R, double R_inner,
                                           double z = pi);

}  // namespace elastodtn

#endif

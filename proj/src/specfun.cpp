#include "elastodtn/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace elastodtn
{

ElasticParams::ElasticParams(double lambda_, double mu_, double omega_)
    : lambda(lambda_), mu(mu_), omega(omega_)
{
  if (!(mu > 0) || !(lambda + mu > 0) || !(omega > 0))
    throw DomainError("ElasticParams: require mu > 0, lambda + mu > 0, omega > 0");
  kappa_p = omega / std::sqrt(lambda + 2 * mu);
  kappa_s = omega / std::sqrt(mu);
}

SphericalGeometry::SphericalGeometry(double r_inner_, double r_outer_)
    : r_inner(r_inner_), r_outer(r_outer_)
{
  if (!(r_inner > 0) || !(r_outer > r_inner))
    throw DomainError("SphericalGeometry: require 0 < R' < R");
}

// ---------------------------------------------------------------------------

SphericalPoint SphericalPoint::from_cartesian(const Vec3 &x)
{
  SphericalPoint p;
  p.rho = x.norm();
  if (p.rho == 0)
    return p;
  p.theta = std::acos(std::clamp(x.z() / p.rho, -1.0, 1.0));
  p.phi = std::atan2(x.y(), x.x());
  if (p.phi < 0)
    p.phi += 2 * pi;
  return p;
}

Vec3 SphericalPoint::to_cartesian() const { return rho * e_rho(); }

Vec3 SphericalPoint::e_rho() const
{
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

Vec3 SphericalPoint::e_theta() const
{
  return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)};
}

Vec3 SphericalPoint::e_phi() const { return {-std::sin(phi), std::cos(phi), 0.0}; }

// ---------------------------------------------------------------------------

SphBessel sph_bessel(int n, double x)
{
  if (n < 0 || n > 200)
    throw DomainError("sph_bessel: degree must lie in [0, 200], got " + std::to_string(n));
  auto r = sph_bessel_t<ext_real>(n, static_cast<ext_real>(x));
  const ext_real lim = std::numeric_limits<double>::max();
  if (std::abs(r.y) > lim || std::abs(r.dy) > lim)
    throw RangeError("sph_bessel: y_" + std::to_string(n) + "(" + std::to_string(x) +
                     ") exceeds double range; use the ratio or log-derivative forms");
  return {static_cast<double>(r.j), static_cast<double>(r.y), static_cast<double>(r.dj),
          static_cast<double>(r.dy)};
}

HankelValue sph_hankel(int kind, int n, double x)
{
  if (kind != 1 && kind != 2)
    throw DomainError("sph_hankel: kind must be 1 or 2");
  auto b = sph_bessel(n, x);
  const double s = kind == 1 ? 1.0 : -1.0;
  return {cplx(b.j, s * b.y), cplx(b.dj, s * b.dy)};
}

ext_cplx log_deriv_ext(int kind, int n, ext_real t)
{
  if (kind != 1 && kind != 2)
    throw DomainError("log_deriv: kind must be 1 or 2");
  auto b = sph_bessel_t<ext_real>(n, t);
  const ext_real den = b.j * b.j + b.y * b.y;
  if (!(den > 1e-600L))
    throw Error("log_deriv: Hankel magnitude vanished (internal error)");
  const ext_real re = t * (b.j * b.dj + b.y * b.dy) / den;
  // Im(h' conj h) = j y' - j' y = 1/t^2.
  const ext_real im = 1.0L / (t * den);
  return {re, kind == 1 ? im : -im};
}

cplx log_deriv(int kind, int n, double t)
{
  auto z = log_deriv_ext(kind, n, t);
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

ext_cplx hankel_ratio_ext(int n, ext_real a, ext_real b)
{
  auto A = sph_bessel_t<ext_real>(n, a);
  auto B = sph_bessel_t<ext_real>(n, b);
  // Divide by y(b) first to keep the magnitudes moderate.
  const ext_cplx num(A.j / B.y, A.y / B.y);
  const ext_cplx den(B.j / B.y, 1.0L);
  return num / den;
}

cplx hankel_ratio(int n, double a, double b)
{
  auto r = hankel_ratio_ext(n, a, b);
  return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
}

// ---------------------------------------------------------------------------

double clip_theta(double theta) { return std::clamp(theta, 1e-8, pi - 1e-8); }

void LegendreTable::compute(int N, double theta)
{
  if (N < 0)
    throw DomainError("LegendreTable: negative degree");
  N_ = N;
  const int size = (N + 2) * (N + 3) / 2;
  p_.assign(size, 0.0);
  q_.assign(size, 0.0);
  d_.assign(size, 0.0);
  theta = clip_theta(theta);
  const double x = std::cos(theta), s = std::sin(theta);
  const int top = N + 1;  // one extra degree for the derivative formula

  double pmm = 1.0 / std::sqrt(4 * pi);
  double qmm = 0.0;
  for (int m = 0; m <= top; ++m)
  {
    if (m > 0)
    {
      const double f = std::sqrt((2.0 * m + 1) / (2.0 * m));
      qmm = f * pmm;
      pmm = f * s * pmm;
    }
    if (m <= top)
    {
      p_[idx(m, m)] = pmm;
      q_[idx(m, m)] = qmm;
    }
    if (m + 1 <= top)
    {
      const double f = std::sqrt(2.0 * m + 3) * x;
      p_[idx(m + 1, m)] = f * pmm;
      q_[idx(m + 1, m)] = f * qmm;
    }
    for (int n = m + 2; n <= top; ++n)
    {
      const double nn = n, mm = m;
      const double a = std::sqrt((4 * nn * nn - 1) / (nn * nn - mm * mm));
      const double b = std::sqrt(((nn - 1) * (nn - 1) - mm * mm) / (4 * (nn - 1) * (nn - 1) - 1));
      p_[idx(n, m)] = a * (x * p_[idx(n - 1, m)] - b * p_[idx(n - 2, m)]);
      q_[idx(n, m)] = a * (x * q_[idx(n - 1, m)] - b * q_[idx(n - 2, m)]);
    }
  }
  for (int n = 0; n <= N; ++n)
  {
    d_[idx(n, 0)] = n > 0 ? -std::sqrt(double(n) * (n + 1)) * p_[idx(n, 1)] : 0.0;
    for (int m = 1; m <= n; ++m)
    {
      const double up = m + 1 <= n ? std::sqrt(double(n - m) * (n + m + 1)) * p_[idx(n, m + 1)] : 0.0;
      const double dn = std::sqrt(double(n + m) * (n - m + 1)) * p_[idx(n, m - 1)];
      d_[idx(n, m)] = 0.5 * (dn - up);
    }
  }
}

cplx sph_harmonic(const ModeIndex &mode, double theta, double phi)
{
  if (mode.n < 0 || std::abs(mode.m) > mode.n)
    throw DomainError("sph_harmonic: invalid mode");
  LegendreTable t(mode.n, theta);
  return t.p(mode.n, std::abs(mode.m)) * std::polar(1.0, mode.m * phi);
}

cplx x_harmonic(const ModeIndex &mode, double theta, double phi, double R)
{
  return sph_harmonic(mode, theta, phi) / R;
}

namespace
{

VectorHarmonic make_vh(const LegendreTable &t, int n, int m, const SphericalPoint &sp,
                       const Vec3 &er, const Vec3 &et, const Vec3 &ep, double R)
{
  const int am = std::abs(m);
  const cplx e = std::polar(1.0, m * sp.phi);
  VectorHarmonic v;
  v.X = (t.p(n, am) / R * e) * er.cast<cplx>();
  if (n == 0)
  {
    v.U.setZero();
    v.V.setZero();
    return v;
  }
  const double c = 1.0 / (R * std::sqrt(double(n) * (n + 1)));
  // conj symmetry in m for d and q; the azimuthal derivative brings i m.
  const cplx dth = c * t.d(n, am) * e;
  const cplx dph = c * cplx(0.0, m) * (am > 0 ? t.q(n, am) : 0.0) * e;
  v.U = dth * et.cast<cplx>() + dph * ep.cast<cplx>();
  v.V = dth * ep.cast<cplx>() - dph * et.cast<cplx>();
  return v;
}

}  // namespace

VectorHarmonic vector_harmonics(const ModeIndex &mode, double theta, double phi, double R)
{
  if (mode.n < 0 || std::abs(mode.m) > mode.n)
    throw DomainError("vector_harmonics: invalid mode");
  SphericalPoint sp{R, clip_theta(theta), phi};
  LegendreTable t(mode.n, sp.theta);
  return make_vh(t, mode.n, mode.m, sp, sp.e_rho(), sp.e_theta(), sp.e_phi(), R);
}

void vector_harmonics_all(int N, double theta, double phi, double R,
                          std::vector<VectorHarmonic> &out)
{
  SphericalPoint sp{R, clip_theta(theta), phi};
  LegendreTable t(N, sp.theta);
  const Vec3 er = sp.e_rho(), et = sp.e_theta(), ep = sp.e_phi();
  out.resize(num_modes(N));
  for (int n = 0; n <= N; ++n)
    for (int m = -n; m <= n; ++m)
      out[mode_index(n, m)] = make_vh(t, n, m, sp, er, et, ep, R);
}

// ---------------------------------------------------------------------------
// Identity checks.

double IdentityReport::max() const
{
  return std::max({grad, curl, div, laplacian, double_curl});
}

namespace
{

using VField = std::function<CVec3(const Vec3 &)>;
using SField = std::function<cplx(const Vec3 &)>;

// Jacobian J(i,j) = d F_i / d x_j by central differences.
CMat3 fd_jacobian(const VField &F, const Vec3 &x, double h)
{
  CMat3 J;
  for (int j = 0; j < 3; ++j)
  {
    Vec3 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (F(xp) - F(xm)) / (2 * h);
  }
  return J;
}

CVec3 fd_gradient(const SField &f, const Vec3 &x, double h)
{
  CVec3 g;
  for (int j = 0; j < 3; ++j)
  {
    Vec3 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2 * h);
  }
  return g;
}

CVec3 curl_of(const CMat3 &J)
{
  return {J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)};
}

// Curl of a field given as a callable, by differencing the callable.
VField curl_field(VField F, double h)
{
  return [F, h](const Vec3 &x) { return curl_of(fd_jacobian(F, x, h)); };
}

cplx fd_laplacian(const SField &f, const Vec3 &x, double h)
{
  cplx s = -6.0 * f(x);
  for (int j = 0; j < 3; ++j)
  {
    Vec3 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    s += f(xp) + f(xm);
  }
  return s / (h * h);
}

}  // namespace

IdentityReport verify_vector_identities(const ModeIndex &mode, const RadialProfile &prof,
                                        double rho, double step, int samples, unsigned seed)
{
  if (!(step > 1e-7))
    throw DomainError("verify_vector_identities: step too small for conditioning");
  const int n = mode.n, m = mode.m;
  const double nn1 = double(n) * (n + 1), sq = std::sqrt(nn1);
  // Harmonics live on a fixed sphere R0; fields are f(|x|) times the harmonic
  // in the direction of x.
  const double R0 = 1.0;
  auto H = [&](const Vec3 &x) {
    auto sp = SphericalPoint::from_cartesian(x);
    return vector_harmonics({n, m}, sp.theta, sp.phi, R0);
  };
  auto Xs = [&](const Vec3 &x) {
    auto sp = SphericalPoint::from_cartesian(x);
    return x_harmonic({n, m}, sp.theta, sp.phi, R0);
  };
  VField fU = [&](const Vec3 &x) -> CVec3 { return prof.f(x.norm()) * H(x).U; };
  VField fV = [&](const Vec3 &x) -> CVec3 { return prof.f(x.norm()) * H(x).V; };
  VField fXe = [&](const Vec3 &x) -> CVec3 { return prof.f(x.norm()) * H(x).X; };
  SField fX = [&](const Vec3 &x) -> cplx { return prof.f(x.norm()) * Xs(x); };

  IdentityReport rep;
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> uth(0.3, pi - 0.3), uph(0.0, 2 * pi);
  const double h = step;
  for (int s = 0; s < samples; ++s)
  {
    SphericalPoint sp{rho, uth(gen), uph(gen)};
    const Vec3 x = sp.to_cartesian();
    const auto h0 = H(x);
    const cplx X = Xs(x);
    const CVec3 Xe = h0.X;
    const cplx f = prof.f(rho), df = prof.df(rho), d2f = prof.d2f(rho);
    const cplx rf1 = f + rho * df;          // (rho f)'
    const cplx rf2 = 2.0 * df + rho * d2f;  // (rho f)''

    rep.grad = std::max(rep.grad,
                        (fd_gradient(fX, x, h) - (df * Xe + f * sq / rho * h0.U)).norm());

    const CVec3 cU = curl_of(fd_jacobian(fU, x, h)) - rf1 / rho * h0.V;
    const CVec3 cV = curl_of(fd_jacobian(fV, x, h)) - (-rf1 / rho * h0.U - sq / rho * f * Xe);
    const CVec3 cX = curl_of(fd_jacobian(fXe, x, h)) - (-sq / rho * f * h0.V);
    rep.curl = std::max({rep.curl, cU.norm(), cV.norm(), cX.norm()});

    const cplx dU = fd_jacobian(fU, x, h).trace() + f * sq / rho * X;
    const cplx dV = fd_jacobian(fV, x, h).trace();
    const cplx dX = fd_jacobian(fXe, x, h).trace() - (df + 2.0 * f / rho) * X;
    rep.div = std::max({rep.div, std::abs(dU), std::abs(dV), std::abs(dX)});

    const cplx lap = fd_laplacian(fX, x, h) - (2.0 / rho * df + d2f - nn1 / (rho * rho) * f) * X;
    rep.laplacian = std::max(rep.laplacian, std::abs(lap));

    const CVec3 ccU = curl_of(fd_jacobian(curl_field(fU, h), x, h)) -
                      (-rf2 / rho * h0.U - sq / (rho * rho) * rf1 * Xe);
    const CVec3 ccV = curl_of(fd_jacobian(curl_field(fV, h), x, h)) -
                      (-rf2 / rho + nn1 / (rho * rho) * f) * h0.V;
    const CVec3 ccX = curl_of(fd_jacobian(curl_field(fXe, h), x, h)) -
                      (sq / rho * df * h0.U + nn1 / (rho * rho) * f * Xe);
    rep.double_curl = std::max({rep.double_curl, ccU.norm(), ccV.norm(), ccX.norm()});
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Lemmas. Half-integer orders nu = n + 1/2 reduce Y_nu to sqrt(2z/pi) y_n.

namespace
{

ext_real y_ratio(int n, ext_real z)  // Y_{nu-1}(z)/Y_nu(z) = y_{n-1}/y_n
{
  std::vector<ext_real> j, y;
  sph_bessel_arrays<ext_real>(n, z, j, y);
  return y[n - 1] / y[n];
}

ext_real ybig_ratio(int n, ext_real a, ext_real b)  // Y_nu(a)/Y_nu(b)
{
  std::vector<ext_real> ja, ya, jb, yb;
  sph_bessel_arrays<ext_real>(n, a, ja, ya);
  sph_bessel_arrays<ext_real>(n, b, jb, yb);
  return std::sqrt(a / b) * ya[n] / yb[n];
}

LemmaRow finish_row(const std::string &name, const std::vector<double> &margin, int n_min)
{
  LemmaRow row;
  row.name = name;
  row.n_max = n_min + int(margin.size()) - 1;
  int onset = -1;
  for (int i = int(margin.size()) - 1; i >= 0; --i)
  {
    if (margin[i] >= 0)
      onset = n_min + i;
    else
      break;
  }
  row.onset = onset;
  row.worst_margin = std::numeric_limits<double>::infinity();
  if (onset >= 0)
    for (int i = onset - n_min; i < int(margin.size()); ++i)
      row.worst_margin = std::min(row.worst_margin, margin[i]);
  return row;
}

}  // namespace

std::vector<LemmaRow> verify_bessel_lemmas(int n_min, int n_max, double kp, double ks, double R,
                                           double Rp, double z)
{
  if (!(0 < kp && kp < ks) || !(0 < Rp && Rp < R))
    throw DomainError("verify_bessel_lemmas: need 0 < kappa_p < kappa_s and 0 < R' < R");
  n_min = std::max(n_min, 1);
  std::vector<double> m2lo, m2hi, m3, m4, m5;
  const ext_real zz = z;
  for (int n = n_min; n <= n_max; ++n)
  {
    const ext_real nu = n + 0.5L;
    // Y_{nu-1}/Y_nu two sided
    const ext_real r = y_ratio(n, zz);
    const ext_real lo = zz / (2 * nu) - zz / (6 * nu * nu);
    const ext_real hi = zz / (2 * nu) + 7 * zz / (6 * nu * nu);
    m2lo.push_back(double((r - lo) / std::abs(lo)));
    m2hi.push_back(double((hi - r) / std::abs(hi)));
    // G_nu(z) = z Y_{nu-1}/Y_nu - nu: two sided and negative
    const ext_real G = zz * r - nu;
    const ext_real glo = -nu + zz * zz / (2 * nu) - zz * zz / (6 * nu * nu);
    const ext_real ghi = -nu + zz * zz / (2 * nu) + 7 * zz * zz / (6 * nu * nu);
    const double mg = double(std::min({(G - glo) / std::abs(glo), (ghi - G) / std::abs(ghi),
                                       -G / std::abs(G)}));
    m3.push_back(mg);
    // Y ratio gap
    {
      const ext_real gap = std::abs(ybig_ratio(n, kp * R, kp * Rp) - ybig_ratio(n, ks * R, ks * Rp));
      const ext_real rhs = 7.0L / 3.0L * ks * (ks - kp) / nu * R * (R - Rp) *
                           std::pow(ext_real(Rp / R), nu);
      m4.push_back(double((rhs - gap) / rhs));
    }
    // Hankel ratio gap
    {
      const ext_cplx a = hankel_ratio_ext(n, kp * R, kp * Rp);
      const ext_cplx b = hankel_ratio_ext(n, ks * R, ks * Rp);
      const ext_real gap = std::abs(a - b);
      const ext_real rhs = 14.0L / 3.0L * ks * (ks - kp) / n * R * (R - Rp) *
                           std::pow(ext_real(Rp / R), ext_real(n + 1));
      m5.push_back(double((rhs - gap) / rhs));
    }
  }
  std::vector<double> m2(m2lo.size());
  for (size_t i = 0; i < m2.size(); ++i)
    m2[i] = std::min(m2lo[i], m2hi[i]);
  return {finish_row("Y ratio bounds", m2, n_min), finish_row("G_nu bounds", m3, n_min),
          finish_row("Y ratio gap", m4, n_min), finish_row("Hankel ratio gap", m5, n_min)};
}

}  // namespace elastodtn

#include "elastodtn/analysis.hpp"

#include <cmath>
#include <random>

#include "elastodtn/dtn.hpp"
#include "elastodtn/quadrature.hpp"
#include "elastodtn/specfun.hpp"

namespace elastodtn
{

namespace
{

// ---------------------------------------------------------------------------
// Adaptive Gauss-Legendre: 16 against 32 nodes, bisect on disagreement.

struct GLRule
{
  std::vector<double> x, w;
};

const GLRule &gl_rule(int n)
{
  static const GLRule r16 = [] {
    GLRule r;
    gauss_legendre(16, r.x, r.w);
    return r;
  }();
  static const GLRule r32 = [] {
    GLRule r;
    gauss_legendre(32, r.x, r.w);
    return r;
  }();
  return n == 16 ? r16 : r32;
}

template <int K>
using CVecK = Eigen::Matrix<cplx, K, 1>;

template <int K, class F>
CVecK<K> apply_rule(const GLRule &r, const F &f, double a, double b, double *l1)
{
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  CVecK<K> s = CVecK<K>::Zero();
  double mag = 0;
  for (size_t i = 0; i < r.x.size(); ++i)
  {
    const CVecK<K> v = f(c + h * r.x[i]);
    s += r.w[i] * v;
    mag += r.w[i] * v.template lpNorm<1>();
  }
  if (l1)
    *l1 = mag * h;
  return s * h;
}

template <int K, class F>
CVecK<K> integrate(const F &f, double a, double b, double tol = 1e-13, int depth = 0)
{
  if (b <= a)
    return CVecK<K>::Zero();
  double l1 = 0;
  const CVecK<K> coarse = apply_rule<K>(gl_rule(16), f, a, b, nullptr);
  const CVecK<K> fine = apply_rule<K>(gl_rule(32), f, a, b, &l1);
  if ((fine - coarse).template lpNorm<1>() <= tol * l1)
    return fine;
  if (depth > 40)
    throw DataError("dual analysis: radial quadrature did not converge");
  const double m = 0.5 * (a + b);
  return integrate<K>(f, a, m, tol, depth + 1) + integrate<K>(f, m, b, tol, depth + 1);
}

// ---------------------------------------------------------------------------

struct JY
{
  double j, y, dj, dy;  // derivatives in the argument
};

JY jy(int n, double x)
{
  const auto b = sph_bessel_t<double>(n, x);
  return {b.j, b.y, b.dj, b.dy};
}

cplx h2(const JY &b) { return {b.j, -b.y}; }
cplx dh2(const JY &b) { return {b.dj, -b.dy}; }

// t^2-weighted Green kernel of the radial Helmholtz operator with outgoing
// (second kind) behaviour at R, in real form to avoid cancellation between
// the two Hankel products: G(a, b) = k (j(ka) y(kb) - y(ka) j(kb)).
double green(double k, const JY &a, const JY &b) { return k * (a.j * b.y - a.y * b.j); }
double green_d2(double k, const JY &a, const JY &b) { return k * k * (a.j * b.dy - a.y * b.dj); }

double rel(cplx a, cplx b)
{
  const double s = std::max(std::abs(a), std::abs(b));
  return s > 0 ? std::abs(a - b) / s : 0.0;
}

double rel(const CVec3 &a, const CVec3 &b)
{
  const double s = std::max(a.norm(), b.norm());
  return s > 0 ? (a - b).norm() / s : 0.0;
}

void check_degree(int n)
{
  if (n < 1)
    throw DomainError("dual analysis needs degree n >= 1, got " + std::to_string(n));
}

// Decomposition kernels for one (rho, tau) pair; rows zeta, Z1, Z2, Z3 and
// columns xi_1, xi_2, xi_3.
Eigen::Matrix<double, 4, 3> decomposition_kernel(int n, double rho, double tau)
{
  const double nn = n, sq = std::sqrt(nn * (n + 1)), r = tau / rho;
  const double c1 = std::pow(r, n + 2), c2 = std::pow(r, n + 1);
  const double c3 = std::pow(r, -(n - 1)), c4 = std::pow(r, -n);
  Eigen::Matrix<double, 4, 3> k = Eigen::Matrix<double, 4, 3>::Zero();
  k(0, 2) = -nn * c2 - (nn + 1) * c4;
  k(0, 0) = -sq * (c2 - c4);
  k(1, 1) = -nn * c1 - (nn + 1) * c3;
  k(2, 2) = sq * (c2 - c4);
  k(2, 0) = (nn + 1) * c2 + nn * c4;
  k(3, 1) = sq * (c1 - c3);
  return k / (2 * nn + 1);
}

// ---------------------------------------------------------------------------
// Cartesian differences.

using VField = std::function<CVec3(const Vec3 &)>;
using SField = std::function<cplx(const Vec3 &)>;

CMat3 fd_jacobian(const VField &F, const Vec3 &x, double h)
{
  auto central = [&](double s) {
    CMat3 J;
    for (int j = 0; j < 3; ++j)
    {
      Vec3 xp = x, xm = x;
      xp[j] += s;
      xm[j] -= s;
      J.col(j) = (F(xp) - F(xm)) / (2 * s);
    }
    return J;
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

CVec3 fd_gradient(const SField &f, const Vec3 &x, double h)
{
  auto central = [&](double s) {
    CVec3 g;
    for (int j = 0; j < 3; ++j)
    {
      Vec3 xp = x, xm = x;
      xp[j] += s;
      xm[j] -= s;
      g[j] = (f(xp) - f(xm)) / (2 * s);
    }
    return g;
  };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

// Second derivatives H[a](i, j) of each component.
std::array<CMat3, 3> fd_hessians(const VField &F, const Vec3 &x, double h)
{
  auto central = [&](double s) {
    std::array<CMat3, 3> H;
    const CVec3 f0 = F(x);
    for (int i = 0; i < 3; ++i)
    {
      Vec3 xp = x, xm = x;
      xp[i] += s;
      xm[i] -= s;
      const CVec3 d = (F(xp) - 2.0 * f0 + F(xm)) / (s * s);
      for (int a = 0; a < 3; ++a)
        H[a](i, i) = d[a];
      for (int j = i + 1; j < 3; ++j)
      {
        Vec3 pp = x, pm = x, mp = x, mm = x;
        pp[i] += s, pp[j] += s;
        pm[i] += s, pm[j] -= s;
        mp[i] -= s, mp[j] += s;
        mm[i] -= s, mm[j] -= s;
        const CVec3 e = (F(pp) - F(pm) - F(mp) + F(mm)) / (4 * s * s);
        for (int a = 0; a < 3; ++a)
          H[a](i, j) = H[a](j, i) = e[a];
      }
    }
    return H;
  };
  auto Hh = central(h), Hh2 = central(0.5 * h);
  for (int a = 0; a < 3; ++a)
    Hh2[a] = (4.0 * Hh2[a] - Hh[a]) / 3.0;
  return Hh2;
}

CVec3 curl_of(const CMat3 &J) { return {J(2, 1) - J(1, 2), J(0, 2) - J(2, 0), J(1, 0) - J(0, 1)}; }

// Channel coefficients times the harmonics of degree n, order m at x.
CVec3 synthesize(int n, int m, double R, const CVec3 &c, const SphericalPoint &sp)
{
  const auto h = vector_harmonics({n, m}, sp.theta, sp.phi, R);
  return c[0] * h.U + c[1] * h.V + c[2] * h.X;
}

// Fourth order one-sided first derivative from five samples, f[0] at the
// endpoint and f[k] at distance k h inward.
cplx one_sided(const cplx *f, double h)
{
  return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
}

}  // namespace

// ---------------------------------------------------------------------------

RadialGrid RadialGrid::uniform(const SphericalGeometry &g, int intervals)
{
  if (intervals < 8)
    throw DomainError("radial grid needs at least 8 intervals");
  RadialGrid r;
  r.rho.resize(intervals + 1);
  const double h = (g.r_outer - g.r_inner) / intervals;
  for (int i = 0; i <= intervals; ++i)
    r.rho[i] = g.r_inner + i * h;
  r.rho.back() = g.r_outer;
  return r;
}

double RadialSource::sup_norm(const SphericalGeometry &g, int samples) const
{
  if (is_zero())
    return 0;
  double s = 0;
  for (int i = 0; i < samples; ++i)
  {
    const double r = g.r_inner + (g.r_outer - g.r_inner) * i / (samples - 1);
    s = std::max(s, f(r).cwiseAbs().maxCoeff());
  }
  return s;
}

RadialSource RadialSource::random_smooth(unsigned seed)
{
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<cplx, 9> c;
  std::array<double, 3> ph;
  for (auto &z : c)
    z = cplx(u(gen), u(gen));
  for (auto &p : ph)
    p = pi * u(gen);
  RadialSource s;
  s.f = [c, ph](double r) {
    CVec3 v;
    for (int k = 0; k < 3; ++k)
      v[k] = c[3 * k] + c[3 * k + 1] * std::cos(3 * r + ph[k]) + c[3 * k + 2] * r * r;
    return v;
  };
  return s;
}

const std::vector<CVec3> &AnnulusField::at(int n, int m) const
{
  auto it = modes.find({n, m});
  if (it == modes.end())
    throw ContractError("annulus field has no mode (" + std::to_string(n) + ", " +
                        std::to_string(m) + ")");
  return it->second;
}

AnnulusField sample_field(const RadialSource &xi, int n, int m, const RadialGrid &grid)
{
  AnnulusField f;
  f.grid = grid;
  auto &v = f.modes[{n, m}];
  v.reserve(grid.rho.size());
  for (double r : grid.rho)
    v.push_back(xi(r));
  return f;
}

SourceCoeffs annulus_source_at(const RadialSource &xi, int n, const SphericalGeometry &g,
                               double rho)
{
  check_degree(n);
  SourceCoeffs s;
  if (xi.is_zero() || rho >= g.r_outer)
    return s;
  const auto v = integrate<4>(
      [&](double tau) -> CVecK<4> { return decomposition_kernel(n, rho, tau).cast<cplx>() * xi(tau); },
      rho, g.r_outer);
  s.zeta = v[0];
  s.Z = v.tail<3>();
  return s;
}

std::pair<AnnulusField, AnnulusField> annulus_source_coeffs(const AnnulusField &xi,
                                                            const SphericalGeometry &g)
{
  const auto &rho = xi.grid.rho;
  const int N = xi.grid.size() - 1;
  if (N < 8 || std::abs(rho.front() - g.r_inner) > 1e-12 || std::abs(rho.back() - g.r_outer) > 1e-12)
    throw ContractError("annulus_source_coeffs: grid must span [R', R] with >= 8 intervals");
  const double h = xi.grid.step();
  std::pair<AnnulusField, AnnulusField> out;
  out.first.grid = out.second.grid = xi.grid;
  for (const auto &[key, samples] : xi.modes)
  {
    const int n = key.first;
    check_degree(n);
    auto &zeta = out.first.modes[key];
    auto &Z = out.second.modes[key];
    zeta.assign(N + 1, CVec3::Zero());
    Z.assign(N + 1, CVec3::Zero());
    std::vector<CVecK<4>> f(N + 1);
    for (int i = 0; i < N; ++i)
    {
      for (int j = std::max(0, i - 2); j <= N; ++j)
        f[j] = decomposition_kernel(n, rho[i], rho[j]).cast<cplx>() * samples[j];
      // Simpson from the top down; an odd leftover interval at the bottom
      // gets the three point rule through the next samples.
      CVecK<4> s = CVecK<4>::Zero();
      int lo = i;
      const int m = N - i;
      if (m % 2 == 1)
      {
        if (m >= 3)
          s += 3 * h / 8 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]), lo = i + 3;
        else
          s += h / 12 * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1]), lo = i + 1;
      }
      for (int k = lo; k + 2 <= N; k += 2)
        s += h / 3 * (f[k] + 4.0 * f[k + 1] + f[k + 2]);
      zeta[i][2] = s[0];
      Z[i] = s.tail<3>();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

DualModeSolution::DualModeSolution(const ElasticParams &p, const SphericalGeometry &g, int n,
                                   RadialSource xi, DualTraces traces)
    : p_(p), geo_(g), n_(n), xi_(std::move(xi)), tr_(traces)
{
  check_degree(n);
  if (!(g.r_inner > 0 && g.r_outer > g.r_inner))
    throw DomainError("dual analysis needs 0 < R' < R");
  if (xi_.is_zero())
    return;
  const double Rp = g.r_inner, kp = p.kappa_p, ks = p.kappa_s;
  const cplx h2p0 = h2(jy(n, kp * Rp)), h2s0 = h2(jy(n, ks * Rp));
  const auto B = integrate<3>(
      [&](double t) -> CVecK<3> {
        const auto src = annulus_source_at(xi_, n, g, t);
        const cplx Sp = h2(jy(n, kp * t)) / h2p0, Ss = h2(jy(n, ks * t)) / h2s0;
        CVecK<3> v;
        v << t * t * Sp * src.zeta / (p.lambda + 2 * p.mu), t * t * Ss * src.Z[1] / p.mu,
            t * t * Ss * t * src.Z[2] / p.mu;
        return v;
      },
      Rp, g.r_outer);
  Bp_ = B[0];
  Bs2_ = B[1];
  Bs3_ = B[2];
}

DualValues DualModeSolution::values(double rho) const
{
  const double Rp = geo_.r_inner, kp = p_.kappa_p, ks = p_.kappa_s;
  if (rho < Rp - 1e-14 || rho > geo_.r_outer + 1e-14)
    throw DomainError("dual solution evaluated outside the annulus");
  const int n = n_;
  const JY bp0 = jy(n, kp * Rp), bs0 = jy(n, ks * Rp);
  const JY bp = jy(n, kp * rho), bs = jy(n, ks * rho);
  const cplx h2p0 = h2(bp0), h2s0 = h2(bs0);

  DualValues d;
  const cplx Sp = h2(bp) / h2p0, dSp = kp * dh2(bp) / h2p0;
  const cplx Ss = h2(bs) / h2s0, dSs = ks * dh2(bs) / h2s0;
  const cplx v0 = Rp * tr_.q3;
  d.g = Sp * tr_.g;
  d.dg = dSp * tr_.g;
  d.q2 = Ss * tr_.q2;
  d.dq2 = dSs * tr_.q2;
  d.v = Ss * v0;
  d.dv = dSs * v0;
  if (xi_.is_zero())
    return d;

  // S(rho) times the integral below rho plus G(R', rho) times the one above:
  // both products stay bounded by one for any degree.
  const double lp = p_.lambda + 2 * p_.mu, mu = p_.mu;
  auto weights = [&](double t) {
    const auto src = annulus_source_at(xi_, n, geo_, t);
    CVecK<3> w;
    w << t * t * src.zeta / lp, t * t * src.Z[1] / mu, t * t * t * src.Z[2] / mu;
    return w;
  };
  const auto lower = integrate<3>(
      [&](double t) -> CVecK<3> {
        const CVecK<3> w = weights(t);
        const double Gp = green(kp, bp0, jy(n, kp * t)), Gs = green(ks, bs0, jy(n, ks * t));
        return CVecK<3>(Gp * w[0], Gs * w[1], Gs * w[2]);
      },
      Rp, rho);
  const auto upper = integrate<3>(
      [&](double t) -> CVecK<3> {
        const CVecK<3> w = weights(t);
        const cplx Sp_t = h2(jy(n, kp * t)) / h2p0, Ss_t = h2(jy(n, ks * t)) / h2s0;
        return CVecK<3>(Sp_t * w[0], Ss_t * w[1], Ss_t * w[2]);
      },
      rho, geo_.r_outer);
  d.g += Sp * lower[0] + green(kp, bp0, bp) * upper[0];
  d.dg += dSp * lower[0] + green_d2(kp, bp0, bp) * upper[0];
  d.q2 += Ss * lower[1] + green(ks, bs0, bs) * upper[1];
  d.dq2 += dSs * lower[1] + green_d2(ks, bs0, bs) * upper[1];
  d.v += Ss * lower[2] + green(ks, bs0, bs) * upper[2];
  d.dv += dSs * lower[2] + green_d2(ks, bs0, bs) * upper[2];
  d.src = annulus_source_at(xi_, n, geo_, rho);
  return d;
}

CVec3 DualModeSolution::p(const DualValues &d, double rho) const
{
  const double sq = std::sqrt(double(n_) * (n_ + 1));
  const cplx beta = rho * d.src.Z[2] / p_.mu;
  CVec3 r;
  r[0] = sq / rho * d.g - d.q2 / rho - d.dq2;
  r[1] = -(beta + p_.kappa_s * p_.kappa_s * d.v) / sq;
  r[2] = d.dg - sq / rho * d.q2;
  return r;
}

CVec3 DualModeSolution::p(double rho) const { return p(values(rho), rho); }

CVec3 DualModeSolution::q(double rho) const
{
  const auto d = values(rho);
  const double sq = std::sqrt(double(n_) * (n_ + 1));
  return {(d.v + rho * d.dv) / (sq * rho), d.q2, d.v / rho};
}

EndpointForms DualModeSolution::endpoint_forms() const
{
  const double Rp = geo_.r_inner, R = geo_.r_outer, kp = p_.kappa_p, ks = p_.kappa_s;
  const int n = n_;
  const JY bp0 = jy(n, kp * Rp), bs0 = jy(n, ks * Rp);
  const cplx SpR = h2(jy(n, kp * R)) / h2(bp0), SsR = h2(jy(n, ks * R)) / h2(bs0);
  const cplx zp = std::conj(log_deriv(1, n, kp * Rp)), zs = std::conj(log_deriv(1, n, ks * Rp));

  CVecK<3> A = CVecK<3>::Zero();
  if (!xi_.is_zero())
  {
    const double lp = p_.lambda + 2 * p_.mu, mu = p_.mu;
    A = integrate<3>(
        [&](double t) -> CVecK<3> {
          const auto src = annulus_source_at(xi_, n, geo_, t);
          const double Gp = green(kp, bp0, jy(n, kp * t)), Gs = green(ks, bs0, jy(n, ks * t));
          CVecK<3> v;
          v << t * t * Gp * src.zeta / lp, t * t * Gs * src.Z[1] / mu,
              t * t * t * Gs * src.Z[2] / mu;
          return v;
        },
        Rp, R);
  }
  EndpointForms e;
  e.g_R = SpR * (tr_.g + A[0]);
  e.dg_Rp = zp / Rp * tr_.g + Bp_ / (Rp * Rp);
  e.q2_R = SsR * (tr_.q2 + A[1]);
  e.dq2_Rp = zs / Rp * tr_.q2 + Bs2_ / (Rp * Rp);
  e.q3_R = SsR * (Rp * tr_.q3 + A[2]) / R;
  e.dq3_Rp = (zs - 1.0) / Rp * tr_.q3 + Bs3_ / (Rp * Rp * Rp);
  return e;
}

DualTraces DualModeSolution::clamped_traces(const ElasticParams &p, const SphericalGeometry &g,
                                            int n, const RadialSource &xi)
{
  const double Rp = g.r_inner;
  CMat3 A;
  const DualTraces unit[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int k = 0; k < 3; ++k)
    A.col(k) = DualModeSolution(p, g, n, RadialSource::zero(), unit[k]).p(Rp);
  const CVec3 d = DualModeSolution(p, g, n, xi, {}).p(Rp);
  const CVec3 t = A.partialPivLu().solve(-d);
  return {t[0], t[1], t[2]};
}

// ---------------------------------------------------------------------------

double EndpointReport::max() const { return std::max({value_R, deriv_Rp, robin_R}); }

EndpointReport dual_endpoint_check(const DualModeSolution &s, int intervals)
{
  const auto grid = RadialGrid::uniform(s.geometry(), intervals);
  const int N = grid.size() - 1;
  const double h = grid.step();
  std::vector<cplx> g(N + 1), q2(N + 1), q3(N + 1);
  for (int i = 0; i <= N; ++i)
  {
    const auto d = s.values(grid.rho[i]);
    g[i] = d.g;
    q2[i] = d.q2;
    q3[i] = d.v / grid.rho[i];
  }
  const auto e = s.endpoint_forms();
  EndpointReport r;
  r.intervals = intervals;
  r.value_R = std::max({rel(g[N], e.g_R), rel(q2[N], e.q2_R), rel(q3[N], e.q3_R)});
  r.deriv_Rp = std::max({rel(one_sided(g.data(), h), e.dg_Rp), rel(one_sided(q2.data(), h), e.dq2_Rp),
                         rel(one_sided(q3.data(), h), e.dq3_Rp)});

  const int n = s.degree();
  const double R = s.geometry().r_outer;
  auto top = [&](const std::vector<cplx> &f) {
    cplx w[5];
    for (int k = 0; k < 5; ++k)
      w[k] = f[N - k];
    return -one_sided(w, h);
  };
  const cplx zp = std::conj(log_deriv(1, n, s.params().kappa_p * R));
  const cplx zs = std::conj(log_deriv(1, n, s.params().kappa_s * R));
  std::vector<cplx> v(N + 1);
  for (int i = 0; i <= N; ++i)
    v[i] = q3[i] * grid.rho[i];
  r.robin_R = std::max({rel(top(g), zp / R * g[N]), rel(top(q2), zs / R * q2[N]),
                        rel(top(v), zs / R * v[N])});
  return r;
}

double PdeReport::max() const { return std::max({navier, decomposition, div_Z, div_q}); }

PdeReport dual_pde_check(const DualModeSolution &s, int m, int samples, unsigned seed)
{
  const int n = s.degree();
  if (std::abs(m) > n)
    throw DomainError("dual_pde_check: |m| > n");
  const auto &P = s.params();
  const double Rp = s.geometry().r_inner, R = s.geometry().r_outer;
  const double R0 = R;  // harmonic scale

  VField pfield = [&](const Vec3 &x) {
    const auto sp = SphericalPoint::from_cartesian(x);
    return synthesize(n, m, R0, s.p(sp.rho), sp);
  };
  VField qfield = [&](const Vec3 &x) {
    const auto sp = SphericalPoint::from_cartesian(x);
    return synthesize(n, m, R0, s.q(sp.rho), sp);
  };
  VField Zfield = [&](const Vec3 &x) {
    const auto sp = SphericalPoint::from_cartesian(x);
    return synthesize(n, m, R0, annulus_source_at(s.source(), n, s.geometry(), sp.rho).Z, sp);
  };
  SField zfield = [&](const Vec3 &x) {
    const auto sp = SphericalPoint::from_cartesian(x);
    return annulus_source_at(s.source(), n, s.geometry(), sp.rho).zeta *
           x_harmonic({n, m}, sp.theta, sp.phi, R0);
  };

  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> ur(Rp + 0.15 * (R - Rp), R - 0.15 * (R - Rp));
  std::uniform_real_distribution<double> uth(0.4, pi - 0.4), uph(0.0, 2 * pi);
  const double h = 2e-3 * (R - Rp);
  PdeReport rep;
  for (int k = 0; k < samples; ++k)
  {
    const SphericalPoint sp{ur(gen), uth(gen), uph(gen)};
    const Vec3 x = sp.to_cartesian();
    const CVec3 xi = synthesize(n, m, R0, s.source()(sp.rho), sp);
    const CVec3 p0 = pfield(x);

    const auto H = fd_hessians(pfield, x, h);
    CVec3 lap, gdiv;
    for (int a = 0; a < 3; ++a)
      lap[a] = H[a].trace();
    for (int i = 0; i < 3; ++i)
      gdiv[i] = H[0](i, 0) + H[1](i, 1) + H[2](i, 2);
    const CVec3 res = P.mu * lap + (P.lambda + P.mu) * gdiv + P.omega * P.omega * p0 + xi;
    const double scale = xi.norm() + P.omega * P.omega * p0.norm();
    rep.navier = std::max(rep.navier, scale > 0 ? res.norm() / scale : res.norm());

    if (!s.source().is_zero())
    {
      const CMat3 JZ = fd_jacobian(Zfield, x, h);
      const CVec3 dec = fd_gradient(zfield, x, h) + curl_of(JZ) - xi;
      rep.decomposition = std::max(rep.decomposition, dec.norm() / xi.norm());
      rep.div_Z = std::max(rep.div_Z, std::abs(JZ.trace()) / std::max(JZ.norm(), 1e-300));
    }
    const CMat3 Jq = fd_jacobian(qfield, x, h);
    rep.div_q = std::max(rep.div_q, Jq.norm() > 0 ? std::abs(Jq.trace()) / Jq.norm() : 0.0);
  }
  return rep;
}

double dual_boundary_check(const DualModeSolution &s)
{
  const auto &P = s.params();
  const int n = s.degree();
  const double R = s.geometry().r_outer, hd = 1e-3 * (R - s.geometry().r_inner);
  std::array<CVec3, 5> pk;
  for (int k = 0; k < 5; ++k)
    pk[k] = s.p(R - k * hd);
  CVec3 dp;
  for (int c = 0; c < 3; ++c)
  {
    cplx w[5];
    for (int k = 0; k < 5; ++k)
      w[k] = pk[k][c];
    dp[c] = -one_sided(w, hd);
  }
  const double sq = std::sqrt(double(n) * (n + 1));
  const cplx div = -sq / R * pk[0][0] + dp[2] + 2.0 * pk[0][2] / R;
  CVec3 D = P.mu * dp;
  D[2] += (P.lambda + P.mu) * div;
  const CVec3 T = dtn_mode_matrix(P, R, n).conjugate() * pk[0];
  return rel(D, T);
}

// ---------------------------------------------------------------------------

BoundScan dual_bound_check(const ElasticParams &p, const SphericalGeometry &g, int n_lo,
                           int n_hi, unsigned seed, bool zero_source, double slack)
{
  if (n_lo < 1 || n_hi < n_lo)
    throw DomainError("dual_bound_check: bad degree range");
  const RadialSource xi = zero_source ? RadialSource::zero() : RadialSource::random_smooth(seed);
  const double sup = xi.sup_norm(g), ratio_R = g.r_inner / g.r_outer;
  std::mt19937 gen(seed + 1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const DualTraces tr{{u(gen), u(gen)}, {u(gen), u(gen)}, {u(gen), u(gen)}};
  BoundScan b;
  for (int n = n_lo; n <= n_hi; ++n)
  {
    const DualModeSolution s(p, g, n, xi, tr);
    const CVec3 pR = s.p(g.r_outer), pRp = s.p(g.r_inner);
    const double denom = n * std::pow(ratio_R, n) * pRp.cwiseAbs().sum() + sup / n;
    const double lhs = pR.cwiseAbs().maxCoeff();
    b.n.push_back(n);
    b.ratio.push_back(denom > 0 ? lhs / denom : (lhs > 0 ? INFINITY : 0.0));
  }
  b.constant = slack * b.ratio.front();
  b.holds = true;
  for (double r : b.ratio)
    b.holds = b.holds && r <= b.constant;
  return b;
}

PairingScan truncation_pairing_scan(const ElasticParams &p, const SphericalGeometry &g, int band,
                                    int N_lo, int N_hi, unsigned seed)
{
  if (N_lo < 1 || N_hi < N_lo || band <= N_hi)
    throw DomainError("truncation_pairing_scan: need 1 <= N_lo <= N_hi < band");
  const double R = g.r_outer;
  std::vector<cplx> term(band + 1, 0.0);
  double h1sq = 0;
  for (int n = 1; n <= band; ++n)
  {
    const double a = 1.0 / (double(n) * n);
    const RadialSource base = RadialSource::random_smooth(seed + n);
    RadialSource xi;
    xi.f = [base, a](double r) { return CVec3(a * base(r)); };
    const DualModeSolution s(p, g, n, xi, DualModeSolution::clamped_traces(p, g, n, xi));
    const CVec3 Mxi = dtn_mode_matrix(p, R, n) * xi(R);
    term[n] = Mxi.dot(s.p(R));  // dot conjugates its first argument
    term[n] = std::conj(term[n]);
    // Mode-wise H1 proxy: |f|^2 (1 + n(n+1)/r^2) + |f'|^2 with weight r^2.
    const double nn = double(n) * (n + 1), hh = 1e-5;
    h1sq += integrate<1>(
                [&](double r) -> CVecK<1> {
                  const CVec3 f = xi(r), df = (xi(r + hh) - xi(r - hh)) / (2 * hh);
                  CVecK<1> v;
                  v[0] = r * r * (f.squaredNorm() * (1 + nn / (r * r)) + df.squaredNorm());
                  return v;
                },
                g.r_inner, R, 1e-10)[0]
                .real();
  }
  PairingScan sc;
  std::vector<double> x, y;
  for (int N = N_lo; N <= N_hi; ++N)
  {
    cplx tail = 0;
    for (int n = N + 1; n <= band; ++n)
      tail += term[n];
    sc.N.push_back(N);
    sc.value.push_back(std::abs(tail) / h1sq);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int k = static_cast<int>(sc.N.size());
  for (int i = 0; i < k; ++i)
  {
    const double lx = std::log(double(sc.N[i])), ly = std::log(sc.value[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  sc.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  return sc;
}

// ---------------------------------------------------------------------------

namespace
{

struct H1Val
{
  ext_cplx h, dh;  // h_n^{(1)}(k rho) and d/drho
};

H1Val hankel1(int n, ext_real k, ext_real rho)
{
  const auto b = sph_bessel_t<ext_real>(n, k * rho);
  return {ext_cplx(b.j, b.y), k * ext_cplx(b.dj, b.dy)};
}

cplx to_c(const ext_cplx &z) { return {double(z.real()), double(z.imag())}; }

}  // namespace

CVec3 RadiatingMode::coeffs(double rho) const
{
  check_degree(n);
  const ext_real r = rho, kp = params.kappa_p, ks = params.kappa_s;
  const ext_real sq = std::sqrt(ext_real(n) * (n + 1));
  const H1Val P = hankel1(n, kp, r), S = hankel1(n, ks, r);
  const ext_cplx A(a.real(), a.imag()), B(b.real(), b.imag()), C(c.real(), c.imag());
  const ext_cplx phi = A * P.h, dphi = A * P.dh, psi = B * S.h, dpsi = B * S.dh, v = C * S.h;
  CVec3 u;
  u[0] = to_c(sq / r * phi - psi / r - dpsi);
  u[1] = to_c(-ks * ks * v / sq);
  u[2] = to_c(dphi - sq / r * psi);
  return u;
}

CVec3 RadiatingMode::traction(double rho) const
{
  check_degree(n);
  const ext_real r = rho, kp = params.kappa_p, ks = params.kappa_s;
  const ext_real nn = ext_real(n) * (n + 1), sq = std::sqrt(nn);
  const H1Val P = hankel1(n, kp, r), S = hankel1(n, ks, r);
  const ext_cplx A(a.real(), a.imag()), B(b.real(), b.imag()), C(c.real(), c.imag());
  const ext_cplx phi = A * P.h, dphi = A * P.dh, psi = B * S.h, dpsi = B * S.dh, dv = C * S.dh;
  const ext_cplx d2phi = -2 / r * dphi - (kp * kp - nn / (r * r)) * phi;
  const ext_cplx d2psi = -2 / r * dpsi - (ks * ks - nn / (r * r)) * psi;
  const ext_cplx du1 = sq * (dphi / r - phi / (r * r)) + psi / (r * r) - dpsi / r - d2psi;
  const ext_cplx du2 = -ks * ks * dv / sq;
  const ext_cplx du3 = d2phi - sq * (dpsi / r - psi / (r * r));
  const ext_real mu = params.mu, lm = params.lambda + params.mu;
  CVec3 t;
  t[0] = to_c(mu * du1);
  t[1] = to_c(mu * du2);
  t[2] = to_c(mu * du3 - lm * kp * kp * phi);
  return t;
}

PropagationReport propagation_check(const RadiatingMode &mode, const SphericalGeometry &g)
{
  PropagationReport r;
  const CVec3 uRp = mode.coeffs(g.r_inner), uR = mode.coeffs(g.r_outer);
  r.propagation = rel(CVec3(propagation_matrix(mode.params, g, mode.n) * uRp), uR);
  r.dtn = rel(CVec3(dtn_mode_matrix(mode.params, g.r_outer, mode.n) * uR), mode.traction(g.r_outer));
  return r;
}

}  // namespace elastodtn

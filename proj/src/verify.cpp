#include "elastodtn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "elastodtn/analysis.hpp"
#include "elastodtn/dtn.hpp"
#include "elastodtn/quadrature.hpp"
#include "elastodtn/specfun.hpp"

namespace elastodtn
{

namespace
{

Check le(const char *suite, std::string name, double value, double tol, std::string detail = {})
{
  return {suite, std::move(name), value, tol, value <= tol, std::move(detail)};
}

Check flag(const char *suite, std::string name, bool ok, std::string detail = {})
{
  return {suite, std::move(name), ok ? 0.0 : 1.0, 0.0, ok, std::move(detail)};
}

std::string fmt(double v)
{
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

std::vector<Check> verify_bessel_suite(const SuiteSettings &s)
{
  std::vector<Check> out;
  double worst = 0;
  for (int n = 0; n <= 60; ++n)
    for (double x = 0.1; x <= 50.0; x *= 1.05)
    {
      const SphBessel b = sph_bessel(n, x);
      worst = std::max(worst, std::abs(x * x * (b.j * b.dy - b.dj * b.y) - 1.0));
    }
  out.push_back(le("bessel", "wronskian n<=60 x in [0.1,50]", worst, 1e-10));

  const auto rows = verify_bessel_lemmas(1, s.n_max, s.params.kappa_p, s.params.kappa_s,
                                         s.geometry.r_outer, s.geometry.r_inner);
  for (const auto &r : rows)
    out.push_back(flag("bessel", r.name + " holds from onset through n=" + std::to_string(r.n_max),
                       r.onset >= 0,
                       "onset " + std::to_string(r.onset) + ", worst margin " +
                           fmt(r.worst_margin)));
  return out;
}

std::vector<Check> verify_harmonics_suite(const SuiteSettings &s)
{
  std::vector<Check> out;
  // Gram matrix of (U, V, X) on the sphere of radius R with a product rule
  // exact for the degrees involved.
  const int N = 6, K = num_modes(N), nt = 2 * N + 4, np = 4 * N + 8;
  const double R = s.geometry.r_outer;
  std::vector<double> x, w;
  gauss_legendre(nt, x, w);
  CMatrix G = CMatrix::Zero(3 * K, 3 * K);
  std::vector<VectorHarmonic> h;
  CMatrix B(3, 3 * K);
  for (int i = 0; i < nt; ++i)
    for (int j = 0; j < np; ++j)
    {
      vector_harmonics_all(N, std::acos(x[i]), 2 * pi * j / np, R, h);
      for (int k = 0; k < K; ++k)
      {
        B.col(3 * k) = h[k].U;
        B.col(3 * k + 1) = h[k].V;
        B.col(3 * k + 2) = h[k].X;
      }
      G.noalias() += (w[i] * 2 * pi / np * R * R) * B.adjoint() * B;
    }
  // n = 0 has no tangential fields.
  G(0, 0) += 1.0;
  G(1, 1) += 1.0;
  out.push_back(le("harmonics", "Gram matrix n<=6 equals identity",
                   (G - CMatrix::Identity(3 * K, 3 * K)).cwiseAbs().maxCoeff(), 1e-7));

  const RadialProfile profiles[] = {
      {[](double r) { return cplx(r * r, 0.5 * r); }, [](double r) { return cplx(2 * r, 0.5); },
       [](double) { return cplx(2, 0); }},
      {[](double r) { return std::exp(cplx(0, 2) * r); },
       [](double r) { return cplx(0, 2) * std::exp(cplx(0, 2) * r); },
       [](double r) { return -4.0 * std::exp(cplx(0, 2) * r); }}};
  double worst = 0;
  for (const ModeIndex mode : {ModeIndex{1, 0}, ModeIndex{1, 1}, ModeIndex{2, -1},
                               ModeIndex{3, 2}, ModeIndex{5, -3}})
    for (const auto &f : profiles)
      worst = std::max(worst, verify_vector_identities(mode, f, 0.8).max());
  out.push_back(le("harmonics", "vector calculus identities by differences", worst, 1e-5));
  return out;
}

std::vector<Check> verify_dtn_suite(const SuiteSettings &s)
{
  std::vector<Check> out;
  const ElasticParams &p = s.params;
  const double R = s.geometry.r_outer;

  int bad = -1;
  for (int n = 0; n <= s.n_max && bad < 0; ++n)
    if (!(lambda_n_ext(p, R, n).imag() < 0))
      bad = n;
  out.push_back(flag("dtn", "Im Lambda_n < 0 for n<=" + std::to_string(s.n_max), bad < 0,
                     bad < 0 ? "" : "fails at n=" + std::to_string(bad)));

  // Coefficient maps (M_n, Q_n) decouple the V channel from U and X; K_n
  // takes u_2 from psi_3 alone and (u_1, u_3) from (phi, psi_2).
  auto pattern_ok = [](const CMat3 &A, const int (&zero)[4][2])
  {
    bool ok = true;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
      {
        bool z = false;
        for (const auto &e : zero)
          z = z || (e[0] == i && e[1] == j);
        ok = ok && (z ? A(i, j) == 0.0 : A(i, j) != 0.0);
      }
    return ok;
  };
  const int coeff_zero[4][2] = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  const int kn_zero[4][2] = {{0, 2}, {1, 0}, {1, 1}, {2, 2}};
  const int kinv_zero[4][2] = {{0, 1}, {1, 1}, {2, 0}, {2, 2}};
  bool zeros = true;
  double kk = 0;
  for (int n = 1; n <= s.n_max; ++n)
  {
    const CMat3 M = dtn_mode_matrix(p, R, n), Kn = kn_matrix(p, R, n),
                Ki = kn_inverse(p, R, n), Q = propagation_matrix(p, s.geometry, n);
    zeros = zeros && pattern_ok(M, coeff_zero) && pattern_ok(Q, coeff_zero) &&
            pattern_ok(Kn, kn_zero) && pattern_ok(Ki, kinv_zero);
    kk = std::max(kk, (Kn * Ki - CMat3::Identity()).norm());
  }
  out.push_back(flag("dtn", "zero pattern of M_n, K_n, Q_n exact", zeros));
  out.push_back(le("dtn", "K_n K_n^-1 = I", kk, 1e-10));

  int onset = -1;
  for (int n = s.n_max; n >= 1; --n)
  {
    if (!(mhat_definiteness(p, R, n) > 0))
      break;
    onset = n;
  }
  out.push_back(flag("dtn", "Mhat_n positive definite from onset through n=" +
                                std::to_string(s.n_max),
                     onset >= 1, "onset " + std::to_string(onset)));

  double prop = 0, dtn = 0;
  const cplx amps[3][3] = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {{1, 0.2}, {-0.5, 1}, {0.3, 0.3}}};
  for (int n : {1, 2, 5, 10, 20, 40})
    for (const auto &a : amps)
    {
      const RadiatingMode mode{p, n, a[0], a[1], a[2]};
      const PropagationReport r = propagation_check(mode, s.geometry);
      prop = std::max(prop, r.propagation);
      dtn = std::max(dtn, r.dtn);
    }
  out.push_back(le("dtn", "Q_n propagation of radiating modes", prop, 1e-8));
  out.push_back(le("dtn", "M_n against traction of radiating modes", dtn, 1e-8));
  return out;
}

std::vector<Check> verify_dual_suite(const SuiteSettings &s)
{
  std::vector<Check> out;
  const ElasticParams &p = s.params;
  const SphericalGeometry &g = s.geometry;
  for (int n : {1, 2, 5})
  {
    const std::string tag = "n=" + std::to_string(n) + " ";
    const DualModeSolution sol(p, g, n, RadialSource::random_smooth(3 + n),
                               {cplx(0.3, 0.1), cplx(-0.2, 0.5), cplx(0.7, -0.4)});
    const EndpointReport e1 = dual_endpoint_check(sol, 400), e2 = dual_endpoint_check(sol, 800);
    out.push_back(le("dual", tag + "endpoint identities, 400 intervals", e1.max(), 1e-6));
    // Components already at roundoff cannot halve; judge the others.
    double worst_gain = 1e300;
    for (auto [a, b] : {std::pair{e1.value_R, e2.value_R}, std::pair{e1.deriv_Rp, e2.deriv_Rp},
                        std::pair{e1.robin_R, e2.robin_R}})
      if (a > 1e-12)
        worst_gain = std::min(worst_gain, a / std::max(b, 1e-300));
    out.push_back(flag("dual", tag + "endpoint error halves under grid doubling",
                       worst_gain >= 2.0, "min ratio " + fmt(worst_gain)));
    const PdeReport pde = dual_pde_check(sol, std::min(n, 1));
    out.push_back(le("dual", tag + "Navier residual", pde.navier, 1e-4));
    out.push_back(le("dual", tag + "source decomposition",
                     std::max({pde.decomposition, pde.div_Z, pde.div_q}), 1e-4));
    out.push_back(le("dual", tag + "Dp = conj(M_n) p on Gamma_R", dual_boundary_check(sol), 1e-5));
  }
  for (bool zero : {false, true})
  {
    const BoundScan b = dual_bound_check(p, g, 5, 40, 9, zero);
    const double worst = *std::max_element(b.ratio.begin(), b.ratio.end());
    out.push_back(flag("dual",
                       std::string("coefficient bound, frozen constant, n in [5,40]") +
                           (zero ? ", zero source" : ""),
                       b.holds, "C " + fmt(b.constant) + ", max ratio " + fmt(worst)));
  }
  const PairingScan ps = truncation_pairing_scan(p, g, 60, 5, 30, 5);
  out.push_back(le("dual", "tail pairing decays with N (log-log slope)", ps.slope, -1.0));
  return out;
}

std::vector<Check> run_suite(const std::string &name, const SuiteSettings &s)
{
  if (name == "bessel")
    return verify_bessel_suite(s);
  if (name == "harmonics")
    return verify_harmonics_suite(s);
  if (name == "dtn")
    return verify_dtn_suite(s);
  if (name == "dual")
    return verify_dual_suite(s);
  if (name == "all")
  {
    std::vector<Check> all;
    for (const char *k : {"bessel", "harmonics", "dtn", "dual"})
    {
      auto part = run_suite(k, s);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  throw ContractError("unknown suite '" + name + "' (bessel, harmonics, dtn, dual, all)");
}

bool all_pass(const std::vector<Check> &checks)
{
  return std::all_of(checks.begin(), checks.end(), [](const Check &c) { return c.pass; });
}

std::string checks_to_jsonl(const std::vector<Check> &checks)
{
  std::string s;
  for (const auto &c : checks)
  {
    nlohmann::json j = {{"suite", c.suite}, {"check", c.name}, {"value", c.value},
                        {"tol", c.tol},     {"pass", c.pass},  {"detail", c.detail}};
    s += j.dump() + "\n";
  }
  return s;
}

}  // namespace elastodtn

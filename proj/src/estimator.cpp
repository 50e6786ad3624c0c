#include "elastodtn/estimator.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "elastodtn/dtn.hpp"
#include "elastodtn/quadrature.hpp"
#include "elastodtn/specfun.hpp"

namespace elastodtn
{

double IndicatorField::eta_max() const
{
  double m = 0;
  for (double e : eta)
    m = std::max(m, e);
  return m;
}

namespace
{

// sigma(u) nu for the form mu grad:grad + (lambda + mu) div div.
CVec3 traction(const ElasticParams &p, const CMat3 &J, const Vec3 &nu)
{
  return p.mu * (J * nu.cast<cplx>()) + ((p.lambda + p.mu) * J.trace()) * nu.cast<cplx>();
}

Vec3 face_normal(const TetMesh &m, const std::array<int, 3> &f)
{
  const Vec3 &a = m.vertices[f[0]];
  return (m.vertices[f[1]] - a).cross(m.vertices[f[2]] - a).normalized();
}

// Unit normal of face f pointing away from tet t.
Vec3 outward_normal(const TetMesh &m, const std::array<int, 3> &f, int t)
{
  Vec3 n = face_normal(m, f);
  Vec3 c = Vec3::Zero();
  for (int v : m.tets[t])
    c += 0.25 * m.vertices[v];
  if (n.dot(m.vertices[f[0]] - c) < 0)
    n = -n;
  return n;
}

}  // namespace

IndicatorField element_indicator(const TetMesh &m, const ElasticParams &p, const CVector &u,
                                 const ModeCoeffs *coeffs, const LowRankTBC *tbc)
{
  if (u.size() != m.num_dofs())
    throw ContractError("element_indicator: field length does not match mesh");
  const int nt = m.num_tets();
  if (nt == 0)
    throw MeshError("element_indicator: empty mesh");
  const auto top = build_face_topology(m);

  std::vector<CMat3> grad(nt);
  std::vector<double> vol_term(nt), face_sum(nt, 0.0);
  const double w2 = p.omega * p.omega;
  for (int t = 0; t < nt; ++t)
  {
    double vol;
    const auto G = barycentric_gradients(m, t, &vol);
    grad[t] = element_gradient(m, t, u, G);
    // R u = omega^2 u on P1; exact L2 norm on the tet.
    const auto &T = m.tets[t];
    CVec3 tot = CVec3::Zero();
    double sq = 0;
    for (int i = 0; i < 4; ++i)
    {
      tot += u.segment<3>(3 * T[i]);
      sq += u.segment<3>(3 * T[i]).squaredNorm();
    }
    vol_term[t] = tet_diameter(m, t) * w2 * std::sqrt(vol / 20.0 * (sq + tot.squaredNorm()));
  }

  for (const auto &f : top.interior)
  {
    const Vec3 nu = outward_normal(m, f.v, f.t0);
    const CVec3 jump = traction(p, grad[f.t0], nu) - traction(p, grad[f.t1], nu);
    const double c = face_diameter(m, f.v) * jump.squaredNorm() * face_area(m, f.v);
    face_sum[f.t0] += c;
    face_sum[f.t1] += c;
  }

  bool has_outer = false;
  for (const auto &f : m.boundary_faces)
    has_outer |= f.tag == BoundaryTag::OUTER;
  if (has_outer)
  {
    if (!coeffs || !tbc)
      throw ContractError("element_indicator: Gamma_R faces need mode coefficients and M_n");
    const int N = coeffs->N;
    if (tbc->N() != N)
      throw ContractError("element_indicator: truncation order mismatch");
    // b = M_n u_n per mode.
    std::vector<CVec3> b(num_modes(N));
    for (int k = 0; k < num_modes(N); ++k)
      b[k] = tbc->blocks()[k] * coeffs->c[k];
    const double R = tbc->moments().R;
    const auto &rule = triangle_rule_deg4();
    std::vector<VectorHarmonic> vh;
    for (size_t bf = 0; bf < m.boundary_faces.size(); ++bf)
    {
      const auto &f = m.boundary_faces[bf];
      if (f.tag != BoundaryTag::OUTER)
        continue;
      const int t = top.boundary_owner[bf];
      const double area = face_area(m, f.v);
      double sum = 0;
      for (size_t q = 0; q < rule.weight.size(); ++q)
      {
        Vec3 x = Vec3::Zero();
        for (int k = 0; k < 3; ++k)
          x += rule.bary[q][k] * m.vertices[f.v[k]];
        const auto sp = SphericalPoint::from_cartesian(x);
        vector_harmonics_all(N, sp.theta, sp.phi, R, vh);
        CVec3 tn = CVec3::Zero();
        for (int k = 0; k < num_modes(N); ++k)
          tn += b[k][0] * vh[k].U + b[k][1] * vh[k].V + b[k][2] * vh[k].X;
        const CVec3 J = 2.0 * (tn - traction(p, grad[t], x.normalized()));
        sum += rule.weight[q] * area * J.squaredNorm();
      }
      face_sum[t] += face_diameter(m, f.v) * sum;
    }
  }

  IndicatorField out;
  out.eta.resize(nt);
  double s2 = 0;
  for (int t = 0; t < nt; ++t)
  {
    out.eta[t] = vol_term[t] + std::sqrt(0.5 * face_sum[t]);
    s2 += out.eta[t] * out.eta[t];
  }
  out.eta_l2 = std::sqrt(s2);
  out.eps_h = out.eta_l2;
  return out;
}

double dirichlet_data_error(const TetMesh &m, const JetFunction &g, const CVector &gh)
{
  if (gh.size() != m.num_dofs())
    throw ContractError("dirichlet_data_error: field length does not match mesh");
  const auto &rule = triangle_rule_deg4();
  double l2 = 0, h1 = 0;
  for (const auto &f : m.boundary_faces)
  {
    if (f.tag != BoundaryTag::OBSTACLE)
      continue;
    const Vec3 &a = m.vertices[f.v[0]], &b = m.vertices[f.v[1]], &c = m.vertices[f.v[2]];
    const Vec3 n = (b - a).cross(c - a);
    const double area = 0.5 * n.norm();
    const Vec3 nu = n.normalized();
    // Surface gradients of the barycentric coordinates.
    std::array<Vec3, 3> gl;
    const std::array<Vec3, 3> P = {a, b, c};
    for (int k = 0; k < 3; ++k)
      gl[k] = nu.cross(P[(k + 2) % 3] - P[(k + 1) % 3]) / (2 * area);
    CMat3 Jh = CMat3::Zero();
    for (int k = 0; k < 3; ++k)
      Jh += gh.segment<3>(3 * f.v[k]) * gl[k].transpose().cast<cplx>();
    const CMat3 tang = (Mat3::Identity() - nu * nu.transpose()).cast<cplx>();
    for (size_t q = 0; q < rule.weight.size(); ++q)
    {
      Vec3 x = Vec3::Zero();
      CVec3 uh = CVec3::Zero();
      for (int k = 0; k < 3; ++k)
      {
        x += rule.bary[q][k] * P[k];
        uh += rule.bary[q][k] * gh.segment<3>(3 * f.v[k]);
      }
      const FieldJet e = g(x);
      const double w = rule.weight[q] * area;
      l2 += w * (e.u - uh).squaredNorm();
      h1 += w * ((e.J - Jh) * tang).squaredNorm();
    }
  }
  l2 = std::sqrt(l2);
  h1 = std::sqrt(h1);
  return std::sqrt(l2 * (l2 + h1));
}

MarkSet mark_max_strategy(const std::vector<double> &eta, double theta)
{
  if (eta.empty())
    throw MeshError("mark_max_strategy: no elements");
  if (!(theta > 0 && theta < 1))
    throw DomainError("mark_max_strategy: theta must lie in (0, 1)");
  double mx = 0;
  for (double e : eta)
    mx = std::max(mx, e);
  MarkSet marks;
  for (size_t t = 0; t < eta.size(); ++t)
    if (eta[t] > theta * mx)
      marks.push_back(int(t));
  return marks;
}

std::string status_name(AdaptStatus s)
{
  switch (s)
  {
  case AdaptStatus::Converged: return "converged";
  case AdaptStatus::DofCap: return "dof_cap";
  case AdaptStatus::IterationCap: return "iteration_cap";
  }
  return "?";
}

SolveResult solve_scattering(const TetMesh &m, const AdaptOptions &opt, int N)
{
  const auto &p = opt.params;
  const auto sys = assemble_interior(m, p);
  auto g = [&](const Vec3 &x) { return CVec3(-opt.incident.value(p, x)); };
  const auto d = apply_dirichlet(sys.A, m, g);
  LowRankTBC tbc(assemble_boundary_moments(m, opt.geometry, N), p);
  const auto fact = Factorization::create(d.A_ff, opt.solver);
  WoodburySolver w(*fact, LowRankFactors::from_tbc(tbc, d), opt.woodbury);
  SolveResult r;
  r.u = d.expand(w.solve(d.lift));
  r.stats = w.stats();
  r.n_trunc = N;
  r.coeffs = sphere_fourier_coeffs(tbc.moments(), r.u);
  r.indicators = element_indicator(m, p, r.u, &r.coeffs, &tbc);
  r.indicators.data_term = dirichlet_data_error(
      m,
      [&](const Vec3 &x) {
        FieldJet j = opt.incident.jet(p, x);
        j.u = -j.u;
        j.J = -j.J;
        return j;
      },
      r.u);
  r.indicators.eps_h = r.indicators.eta_l2 + r.indicators.data_term;
  return r;
}

RunRecord adapt_loop(const TetMesh &initial, const AdaptOptions &opt, const IterationHook &hook)
{
  if (!(opt.epsilon > 0) || !(opt.eps_N > 0))
    throw DomainError("adapt_loop: tolerances must be positive");
  if (!(opt.theta > 0 && opt.theta < 1))
    throw DomainError("adapt_loop: theta must lie in (0, 1)");
  require_valid(initial);
  RunRecord rec;
  rec.uinc_norm = field_h1_norm(initial, opt.params, opt.incident);
  const int N = opt.n_trunc >= 0 ? opt.n_trunc
                                 : select_truncation(opt.geometry, rec.uinc_norm, opt.eps_N);
  const double eps_N = truncation_error(opt.geometry, N, rec.uinc_norm);

  TetMesh mesh = initial;
  for (int it = 0;; ++it)
  {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult s = solve_scattering(mesh, opt, N);
    s.indicators.eps_N = eps_N;
    IterationRecord r;
    r.iter = it;
    r.dof = mesh.num_dofs();
    r.n_trunc = N;
    r.eps_h = s.indicators.eps_h;
    r.eps_N = eps_N;
    r.data_term = s.indicators.data_term;
    if (opt.exact)
      r.e_h = h1_error(mesh, s.u, opt.exact);
    r.eta_max = s.indicators.eta_max();

    AdaptStatus status;
    bool stop = true;
    MarkSet marks;
    TetMesh next;
    if (r.eps_h <= opt.epsilon)
      status = AdaptStatus::Converged;
    else if (it + 1 >= opt.max_iterations)
      status = AdaptStatus::IterationCap;
    else
    {
      marks = mark_max_strategy(s.indicators.eta, opt.theta);
      next = refine(mesh, marks);
      if (next.num_dofs() > opt.max_dof)
        status = AdaptStatus::DofCap;
      else
      {
        stop = false;
        status = AdaptStatus::IterationCap;
      }
    }
    r.marked = stop ? 0 : int(marks.size());
    r.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    rec.iterations.push_back(r);
    if (hook)
      hook(r, mesh, s.u, s.indicators);
    if (stop)
    {
      rec.status = status;
      rec.mesh = std::move(mesh);
      rec.solution = std::move(s.u);
      rec.indicators = std::move(s.indicators);
      return rec;
    }
    mesh = std::move(next);
  }
}

double loglog_slope(const std::vector<double> &x, const std::vector<double> &y, int count)
{
  if (x.size() != y.size() || count < 2 || int(x.size()) < count)
    return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = x.size() - count; i < x.size(); ++i)
  {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = count;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace elastodtn

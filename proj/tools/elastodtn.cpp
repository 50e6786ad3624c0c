// elastodtn: adaptive FEM-DtN solver for elastic obstacle scattering.
//
//   elastodtn adapt  --config run.json [--out DIR] [--theta F] [--epsilon F] [--epsN F] [--max-dof N]
//   elastodtn solve  --config run.json [--out DIR]
//   elastodtn verify --suite bessel|harmonics|dtn|dual|all [--out DIR]
//   elastodtn mesh   --config run.json --out FILE.msh
//
// Exit status: 0 success (adapt: converged), 2 adapt stopped at a cap,
// 1 configuration, file or numerical error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "elastodtn/config.hpp"
#include "elastodtn/dtn.hpp"
#include "elastodtn/estimator.hpp"
#include "elastodtn/verify.hpp"

namespace fs = std::filesystem;
using namespace elastodtn;

namespace
{

struct Overrides
{
  std::string config, out;
  std::optional<double> theta, epsilon, eps_N;
  std::optional<int> max_dof;
};

RunConfig resolve(const Overrides &o)
{
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (!o.out.empty())
    c.output_dir = o.out;
  if (o.theta)
    c.theta = *o.theta;
  if (o.epsilon)
    c.epsilon = *o.epsilon;
  if (o.eps_N)
    c.eps_N = *o.eps_N;
  if (o.max_dof)
    c.max_dof = *o.max_dof;
  validate_config(c);
  return c;
}

void write_text(const fs::path &p, const std::string &s)
{
  std::ofstream f(p);
  if (!f)
    throw Error("cannot write " + p.string());
  f << s;
}

void prepare_output(const RunConfig &c)
{
  fs::create_directories(c.output_dir);
  write_text(fs::path(c.output_dir) / "config.json", config_to_json(c) + "\n");
}

std::string csv_row(const IterationRecord &r)
{
  char buf[512];
  std::string eh;
  if (r.e_h)
  {
    std::snprintf(buf, sizeof buf, "%.10e", *r.e_h);
    eh = buf;
  }
  std::snprintf(buf, sizeof buf, "%d,%d,%d,%.10e,%.10e,%s,%.10e,%d,%.1f\n", r.iter, r.dof,
                r.n_trunc, r.eps_h, r.eps_N, eh.c_str(), r.eta_max, r.marked, r.wall_ms);
  return buf;
}

const char *csv_header = "iter,dof,n_trunc,eps_h,eps_N,e_h,eta_max,marked,wall_ms\n";

void write_iteration_vtk(const fs::path &dir, int k, const TetMesh &m, const CVector &u,
                         const IndicatorField &ind)
{
  std::vector<Vec3> re(m.num_vertices()), im(m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v)
    for (int c = 0; c < 3; ++c)
    {
      re[v][c] = u[dof_of(v, c)].real();
      im[v][c] = u[dof_of(v, c)].imag();
    }
  const std::string K = std::to_string(k);
  export_vtk(m, (dir / ("mesh_iter" + K + ".vtk")).string());
  export_vtk(m, (dir / ("solution_iter" + K + ".vtk")).string(),
             {{"displacement_re", re}, {"displacement_im", im}}, {{"eta", ind.eta}});
}

int cmd_adapt(const Overrides &ov)
{
  const RunConfig c = resolve(ov);
  prepare_output(c);
  const fs::path dir(c.output_dir);
  std::ofstream csv(dir / "convergence.csv");
  if (!csv)
    throw Error("cannot write convergence.csv");
  csv << csv_header;

  const TetMesh m0 = initial_mesh(c);
  std::vector<double> dof, eps, err;
  const RunRecord rec = adapt_loop(
      m0, adapt_options(c),
      [&](const IterationRecord &r, const TetMesh &m, const CVector &u, const IndicatorField &ind)
      {
        csv << csv_row(r) << std::flush;
        write_iteration_vtk(dir, r.iter, m, u, ind);
        dof.push_back(r.dof);
        eps.push_back(r.eps_h);
        if (r.e_h)
          err.push_back(*r.e_h);
        std::printf("iter %d  dof %d  N %d  eps_h %.4e  marked %d  %.1f s\n", r.iter, r.dof,
                    r.n_trunc, r.eps_h, r.marked, r.wall_ms / 1e3);
        std::fflush(stdout);
      });

  nlohmann::json summary = {{"status", status_name(rec.status)},
                             {"iterations", rec.iterations.size()}};
  const int tail = std::min<int>(4, int(dof.size()));
  if (tail >= 2)
  {
    summary["slope_points"] = tail;
    summary["slope_eps_h"] = loglog_slope(dof, eps, tail);
    if (err.size() == dof.size())
      summary["slope_e_h"] = loglog_slope(dof, err, tail);
  }
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  std::printf("status %s\n", status_name(rec.status).c_str());
  return rec.status == AdaptStatus::Converged ? 0 : 2;
}

int cmd_solve(const Overrides &ov)
{
  RunConfig c = resolve(ov);
  prepare_output(c);
  const fs::path dir(c.output_dir);
  const TetMesh m = initial_mesh(c);
  const AdaptOptions opt = adapt_options(c);
  int N = c.n_trunc;
  if (N < 0)
    N = select_truncation(c.geometry, field_h1_norm(m, c.material, c.incident), c.eps_N);
  const SolveResult s = solve_scattering(m, opt, N);
  IterationRecord r;
  r.dof = m.num_dofs();
  r.n_trunc = N;
  r.eps_h = s.indicators.eps_h;
  r.eps_N = s.indicators.eps_N;
  if (opt.exact)
    r.e_h = h1_error(m, s.u, opt.exact);
  r.eta_max = s.indicators.eta_max();
  write_text(dir / "convergence.csv", std::string(csv_header) + csv_row(r));
  write_iteration_vtk(dir, 0, m, s.u, s.indicators);
  std::printf("dof %d  N %d  K %d  eps_h %.4e", r.dof, N, s.stats.K, r.eps_h);
  if (r.e_h)
    std::printf("  e_h %.4e", *r.e_h);
  std::printf("\n");
  return 0;
}

int cmd_verify(const std::string &suite, const std::string &out)
{
  const auto checks = run_suite(suite);
  const std::string report = checks_to_jsonl(checks);
  std::cout << report;
  if (!out.empty())
  {
    fs::create_directories(out);
    write_text(fs::path(out) / ("verify_" + suite + ".jsonl"), report);
  }
  return all_pass(checks) ? 0 : 1;
}

int cmd_mesh(const Overrides &ov, const std::string &file)
{
  RunConfig c = ov.config.empty() ? RunConfig{} : load_config(ov.config);
  const TetMesh m = initial_mesh(c);
  if (file.empty())
    throw ContractError("mesh needs --out FILE.msh");
  if (fs::path(file).has_parent_path())
    fs::create_directories(fs::path(file).parent_path());
  export_msh(m, file);
  std::printf("vertices %d  tets %d  dof %d  -> %s\n", m.num_vertices(), m.num_tets(),
              m.num_dofs(), file.c_str());
  return 0;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Adaptive finite elements with a truncated DtN boundary for elastic scattering"};
  app.set_version_flag("--version", library_version());
  app.require_subcommand(1);

  Overrides ov;
  std::string suite = "all";
  auto add_common = [&](CLI::App *sc)
  {
    sc->add_option("--config", ov.config, "JSON run configuration")->check(CLI::ExistingFile);
    sc->add_option("--out", ov.out, "output directory (mesh: output file)");
  };
  auto *adapt = app.add_subcommand("adapt", "adaptive loop, writes convergence.csv and VTK");
  add_common(adapt);
  adapt->add_option("--theta", ov.theta, "marking parameter in (0, 1)");
  adapt->add_option("--epsilon", ov.epsilon, "target for eps_h");
  adapt->add_option("--epsN", ov.eps_N, "target for the truncation error model");
  adapt->add_option("--max-dof", ov.max_dof, "DoF cap");
  auto *solve = app.add_subcommand("solve", "one solve on the initial mesh");
  add_common(solve);
  solve->add_option("--epsN", ov.eps_N, "target for the truncation error model");
  auto *verify = app.add_subcommand("verify", "property suites, JSON lines report");
  verify->add_option("--suite", suite, "bessel, harmonics, dtn, dual or all");
  verify->add_option("--out", ov.out, "directory for the report file");
  auto *mesh = app.add_subcommand("mesh", "write the configured initial mesh as MSH 4.1");
  add_common(mesh);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try
  {
    if (*adapt)
      return cmd_adapt(ov);
    if (*solve)
      return cmd_solve(ov);
    if (*verify)
      return cmd_verify(suite, ov.out);
    if (*mesh)
      return cmd_mesh(ov, ov.out);
  }
  catch (const std::exception &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

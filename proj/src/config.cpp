#include "elastodtn/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace elastodtn
{

using nlohmann::json;

namespace
{

Vec3 read_vec3(const json &j, const char *key)
{
  const auto &a = j.at(key);
  if (!a.is_array() || a.size() != 3)
    throw ContractError(std::string("'") + key + "' must be an array of three numbers");
  return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

template <class T>
void take(const json &j, const char *key, T &out)
{
  if (j.contains(key))
    out = j.at(key).get<T>();
}

json vec_json(const Vec3 &v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

RunConfig parse_config(const std::string &text)
{
  json j;
  try
  {
    j = json::parse(text);
  }
  catch (const json::exception &e)
  {
    throw ContractError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object())
    throw ContractError("config must be a JSON object");

  RunConfig c;
  try
  {
    if (j.contains("geometry"))
    {
      const auto &g = j["geometry"];
      double R = c.geometry.r_outer, Rp = c.geometry.r_inner;
      take(g, "R", R);
      take(g, "R_prime", Rp);
      c.geometry = SphericalGeometry(Rp, R);
    }
    if (j.contains("material"))
    {
      const auto &m = j["material"];
      double l = c.material.lambda, mu = c.material.mu, w = c.material.omega;
      take(m, "lambda", l);
      take(m, "mu", mu);
      take(m, "omega", w);
      c.material = ElasticParams(l, mu, w);
    }
    if (j.contains("incident"))
    {
      const auto &in = j["incident"];
      const std::string type = in.value("type", std::string("green_column"));
      if (type == "plane_p")
      {
        c.incident = IncidentField::plane_p(
            in.contains("direction") ? Vec3(read_vec3(in, "direction")) : Vec3(0, 0, 1));
        take(in, "scale", c.incident.scale);
      }
      else if (type == "green_column")
      {
        // Columns are numbered 1..3 in the file.
        const int col = in.value("column", 3);
        c.incident = IncidentField::green_column(
            in.contains("source") ? Vec3(read_vec3(in, "source")) : Vec3::Zero(), col - 1,
            in.value("scale", 10.0));
      }
      else
        throw ContractError("unknown incident type '" + type + "'");
    }
    if (j.contains("tolerances"))
    {
      const auto &t = j["tolerances"];
      take(t, "epsilon", c.epsilon);
      take(t, "eps_N", c.eps_N);
      take(t, "solver_tol", c.solver_tol);
      take(t, "n_trunc", c.n_trunc);
    }
    take(j, "theta", c.theta);
    if (j.contains("caps"))
    {
      take(j["caps"], "max_dof", c.max_dof);
      take(j["caps"], "max_iterations", c.max_iterations);
    }
    if (j.contains("backend"))
      c.backend = parse_backend(j["backend"].get<std::string>());
    take(j, "exact_solution", c.exact_solution);
    take(j, "output_dir", c.output_dir);

    if (j.contains("mesh"))
    {
      const auto &m = j["mesh"];
      int sources = int(m.contains("generated_levels")) + int(m.contains("msh_path")) +
                    int(m.contains("lbracket"));
      if (sources != 1)
        throw ContractError("mesh needs exactly one of generated_levels, msh_path, lbracket");
      if (m.contains("generated_levels"))
      {
        c.mesh.kind = MeshSource::Kind::Generated;
        c.mesh.levels = m["generated_levels"].get<int>();
        take(m, "obstacle_radius", c.mesh.obstacle_radius);
      }
      else if (m.contains("msh_path"))
      {
        c.mesh.kind = MeshSource::Kind::Msh;
        c.mesh.path = m["msh_path"].get<std::string>();
      }
      else
      {
        c.mesh.kind = MeshSource::Kind::LBracket;
        const auto &b = m["lbracket"];
        take(b, "cells_per_half", c.mesh.lbracket.cells_per_half);
        take(b, "arm_cells", c.mesh.lbracket.arm_cells);
        take(b, "thickness_cells", c.mesh.lbracket.thickness_cells);
        c.mesh.lbracket.R = c.geometry.r_outer;
      }
    }
  }
  catch (const json::exception &e)
  {
    throw ContractError(std::string("bad config value: ") + e.what());
  }
  catch (const DomainError &e)
  {
    throw ContractError(std::string("bad config value: ") + e.what());
  }
  validate_config(c);
  return c;
}

RunConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw ContractError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig &c)
{
  json j;
  j["version"] = library_version();
  j["geometry"] = {{"R", c.geometry.r_outer}, {"R_prime", c.geometry.r_inner}};
  j["material"] = {{"lambda", c.material.lambda}, {"mu", c.material.mu},
                   {"omega", c.material.omega}};
  if (c.incident.kind == IncidentField::Kind::PlaneP)
    j["incident"] = {{"type", "plane_p"},
                     {"direction", vec_json(c.incident.direction)},
                     {"scale", c.incident.scale}};
  else
    j["incident"] = {{"type", "green_column"},
                     {"source", vec_json(c.incident.source)},
                     {"column", c.incident.column + 1},
                     {"scale", c.incident.scale}};
  j["tolerances"] = {{"epsilon", c.epsilon},
                     {"eps_N", c.eps_N},
                     {"solver_tol", c.solver_tol},
                     {"n_trunc", c.n_trunc}};
  j["theta"] = c.theta;
  j["caps"] = {{"max_dof", c.max_dof}, {"max_iterations", c.max_iterations}};
  j["backend"] = backend_name(c.backend);
  switch (c.mesh.kind)
  {
  case MeshSource::Kind::Generated:
    j["mesh"] = {{"generated_levels", c.mesh.levels},
                 {"obstacle_radius", c.mesh.obstacle_radius}};
    break;
  case MeshSource::Kind::Msh:
    j["mesh"] = {{"msh_path", c.mesh.path}};
    break;
  case MeshSource::Kind::LBracket:
    j["mesh"] = {{"lbracket",
                  {{"cells_per_half", c.mesh.lbracket.cells_per_half},
                   {"arm_cells", c.mesh.lbracket.arm_cells},
                   {"thickness_cells", c.mesh.lbracket.thickness_cells}}}};
    break;
  }
  j["exact_solution"] = c.exact_solution;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

void validate_config(const RunConfig &c)
{
  if (!(c.epsilon > 0) || !(c.eps_N > 0) || !(c.solver_tol > 0))
    throw ContractError("tolerances must be positive");
  if (!(c.theta > 0 && c.theta < 1))
    throw ContractError("theta must lie in (0, 1)");
  if (c.max_dof <= 0 || c.max_iterations <= 0)
    throw ContractError("caps must be positive");
  if (c.mesh.kind == MeshSource::Kind::Msh && c.mesh.path.empty())
    throw ContractError("msh_path is empty");
  if (c.mesh.kind == MeshSource::Kind::Generated &&
      (c.mesh.levels < 0 || !(c.mesh.obstacle_radius > 0) ||
       c.mesh.obstacle_radius > c.geometry.r_inner))
    throw ContractError("generated mesh needs levels >= 0 and 0 < obstacle_radius <= R'");
  if (c.output_dir.empty())
    throw ContractError("output_dir is empty");
}

AdaptOptions adapt_options(const RunConfig &c)
{
  AdaptOptions o;
  o.params = c.material;
  o.geometry = c.geometry;
  o.incident = c.incident;
  o.epsilon = c.epsilon;
  o.eps_N = c.eps_N;
  o.n_trunc = c.n_trunc;
  o.theta = c.theta;
  o.max_dof = c.max_dof;
  o.max_iterations = c.max_iterations;
  o.solver.backend = c.backend;
  o.solver.tol = c.solver_tol;
  if (c.exact_solution)
  {
    const ElasticParams p = c.material;
    const IncidentField f = c.incident;
    o.exact = [p, f](const Vec3 &x)
    {
      FieldJet j = f.jet(p, x);
      j.u = -j.u;
      j.J = -j.J;
      return j;
    };
  }
  return o;
}

TetMesh initial_mesh(const RunConfig &c)
{
  switch (c.mesh.kind)
  {
  case MeshSource::Kind::Generated:
    return gen_shell_mesh(c.geometry, c.mesh.obstacle_radius, c.mesh.levels);
  case MeshSource::Kind::LBracket:
  {
    LBracketSpec s = c.mesh.lbracket;
    s.R = c.geometry.r_outer;
    return gen_lbracket_mesh(s);
  }
  case MeshSource::Kind::Msh:
  {
    TetMesh m = import_msh(c.mesh.path);
    if (!snap_outer_radius(m, c.geometry.r_outer))
      throw MeshError("outer boundary of '" + c.mesh.path + "' is not the sphere of radius R");
    require_valid(m);
    return m;
  }
  }
  throw ContractError("unknown mesh source");
}

std::string library_version() { return ELASTODTN_VERSION; }

}  // namespace elastodtn

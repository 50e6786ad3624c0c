#ifndef ELASTODTN_CONFIG_HPP
#define ELASTODTN_CONFIG_HPP

#include <optional>
#include <string>

#include "elastodtn/estimator.hpp"
#include "elastodtn/mesh.hpp"
#include "elastodtn/scattering.hpp"
#include "elastodtn/solver.hpp"

namespace elastodtn
{

// Where the initial mesh comes from. Exactly one source per run.
struct MeshSource
{
  enum class Kind
  {
    Generated,  // icosahedral shell around a ball obstacle
    Msh,        // imported MSH 4.1 file
    LBracket    // toy L-bracket generator
  };
  Kind kind = Kind::Generated;
  int levels = 0;
  double obstacle_radius = 0.5;
  std::string path;
  LBracketSpec lbracket;
};

// JSON run description. See README for the schema; every key is optional and
// falls back to the clamped ball with a point source at its centre.
struct RunConfig
{
  SphericalGeometry geometry{0.5, 1.0};
  ElasticParams material{2.0, 1.0, pi};
  IncidentField incident = IncidentField::green_column(Vec3::Zero(), 2, 10.0);
  double epsilon = 1e-2;
  double eps_N = 1e-8;
  double solver_tol = 1e-10;
  int n_trunc = -1;  // fixed N when >= 0
  double theta = 0.5;
  int max_dof = 200000;
  int max_iterations = 25;
  Backend backend = Backend::Umfpack;
  MeshSource mesh;
  // Scattered field -u_inc, valid when the obstacle is a ball centred on a
  // point source with a clamped boundary.
  bool exact_solution = false;
  std::string output_dir = "out";
};

RunConfig parse_config(const std::string &json_text);
RunConfig load_config(const std::string &path);
std::string config_to_json(const RunConfig &c);

// Throws ContractError on the first violated invariant.
void validate_config(const RunConfig &c);

AdaptOptions adapt_options(const RunConfig &c);
TetMesh initial_mesh(const RunConfig &c);

std::string library_version();

}  // namespace elastodtn

#endif

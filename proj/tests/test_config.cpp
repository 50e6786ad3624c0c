#include <gtest/gtest.h>

#include <algorithm>

#include "elastodtn/config.hpp"
#include "elastodtn/verify.hpp"

using namespace elastodtn;

TEST(Config, DefaultsAreExampleOne)
{
  const RunConfig c = parse_config("{}");
  EXPECT_DOUBLE_EQ(c.geometry.r_inner, 0.5);
  EXPECT_DOUBLE_EQ(c.material.lambda, 2.0);
  EXPECT_EQ(c.incident.kind, IncidentField::Kind::GreenColumn);
  EXPECT_EQ(c.incident.column, 2);
  EXPECT_DOUBLE_EQ(c.eps_N, 1e-8);
  EXPECT_EQ(c.mesh.kind, MeshSource::Kind::Generated);
}

TEST(Config, ParsesAllSections)
{
  const RunConfig c = parse_config(R"({
    "geometry": {"R": 2.0, "R_prime": 1.2},
    "material": {"lambda": 1.0, "mu": 0.5, "omega": 3.0},
    "incident": {"type": "plane_p", "direction": [0, -1, 0]},
    "tolerances": {"epsilon": 0.1, "eps_N": 1e-4, "solver_tol": 1e-9},
    "theta": 0.3,
    "caps": {"max_dof": 1000, "max_iterations": 4},
    "mesh": {"msh_path": "x.msh"},
    "exact_solution": false,
    "output_dir": "o"
  })");
  EXPECT_DOUBLE_EQ(c.geometry.r_outer, 2.0);
  EXPECT_DOUBLE_EQ(c.material.kappa_s, 3.0 / std::sqrt(0.5));
  EXPECT_EQ(c.incident.kind, IncidentField::Kind::PlaneP);
  EXPECT_DOUBLE_EQ(c.incident.direction[1], -1.0);
  EXPECT_DOUBLE_EQ(c.theta, 0.3);
  EXPECT_EQ(c.max_iterations, 4);
  EXPECT_EQ(c.mesh.kind, MeshSource::Kind::Msh);
  EXPECT_EQ(c.mesh.path, "x.msh");
}

TEST(Config, RejectsInvalid)
{
  EXPECT_THROW(parse_config("{\"theta\": 1.0}"), ContractError);
  EXPECT_THROW(parse_config("{\"tolerances\": {\"epsilon\": 0}}"), ContractError);
  EXPECT_THROW(parse_config("{\"mesh\": {\"generated_levels\": 1, \"msh_path\": \"a\"}}"),
               ContractError);
  EXPECT_THROW(parse_config("{\"mesh\": {}}"), ContractError);
  EXPECT_THROW(parse_config("{\"incident\": {\"type\": \"sh\"}}"), ContractError);
  EXPECT_THROW(parse_config("[1, 2"), ContractError);
  EXPECT_THROW(parse_config("{\"geometry\": {\"R\": 0.4}}"), ContractError);
}

TEST(Config, EchoRoundTrips)
{
  RunConfig c = parse_config(R"({"mesh": {"lbracket": {"cells_per_half": 4}}, "theta": 0.4,
                                 "incident": {"type": "green_column", "column": 1, "scale": 2}})");
  const RunConfig d = parse_config(config_to_json(c));
  EXPECT_EQ(d.mesh.kind, MeshSource::Kind::LBracket);
  EXPECT_EQ(d.mesh.lbracket.cells_per_half, 4);
  EXPECT_EQ(d.incident.column, 0);
  EXPECT_DOUBLE_EQ(d.incident.scale, 2.0);
  EXPECT_DOUBLE_EQ(d.theta, 0.4);
  EXPECT_NE(config_to_json(c).find(library_version()), std::string::npos);
}

TEST(Config, ExactSolutionIsNegatedIncident)
{
  const RunConfig c = parse_config("{\"exact_solution\": true}");
  const AdaptOptions o = adapt_options(c);
  ASSERT_TRUE(bool(o.exact));
  const Vec3 x(0.7, 0.1, 0.2);
  EXPECT_LT((o.exact(x).u + c.incident.value(c.material, x)).norm(), 1e-15);
}

TEST(Verify, UnknownSuite)
{
  EXPECT_THROW(run_suite("nope"), ContractError);
}

TEST(Verify, JsonLinesReport)
{
  const std::vector<Check> c{{"s", "a", 1e-12, 1e-10, true, ""}, {"s", "b", 1.0, 0.0, false, "x"}};
  const std::string r = checks_to_jsonl(c);
  EXPECT_EQ(std::count(r.begin(), r.end(), '\n'), 2);
  EXPECT_FALSE(all_pass(c));
}

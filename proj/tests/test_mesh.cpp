#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "elastodtn/mesh.hpp"

using namespace elastodtn;

namespace
{

std::string temp_path(const std::string &name)
{
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(Mesh, ShellIsValidAndConvergesToAnnulusVolume)
{
  const SphericalGeometry g(0.5, 1.0);
  const double exact = 4.0 / 3.0 * pi * (1.0 - 0.125);
  double prev = 1e9;
  for (int lev = 0; lev < 3; ++lev)
  {
    const TetMesh m = gen_shell_mesh(g, 0.5, lev);
    EXPECT_TRUE(validate_mesh(m).ok);
    const double err = std::abs(mesh_volume(m) - exact);
    EXPECT_LT(err, prev);
    prev = err;
  }
}

TEST(Mesh, RandomBisectionStaysConforming)
{
  TetMesh m = gen_shell_mesh(SphericalGeometry(0.5, 1.0), 0.5, 0);
  const double vol = mesh_volume(m);
  std::mt19937 rng(1);
  for (int it = 0; it < 30; ++it)
  {
    std::vector<int> mk;
    for (int k = 0; k < 5; ++k)
      mk.push_back(int(rng() % m.num_tets()));
    const int before = m.num_tets();
    m = refine(m, make_markset(mk, m.num_tets()));
    ASSERT_TRUE(validate_mesh(m).ok) << "iteration " << it;
    EXPECT_GT(m.num_tets(), before);
  }
  // Boundary vertices are projected, so the volume only grows towards the annulus.
  EXPECT_GE(mesh_volume(m), vol - 1e-12);
}

TEST(Mesh, MarkSetRejectsOutOfRange)
{
  EXPECT_THROW(make_markset({0, 5}, 3), MeshError);
  EXPECT_EQ(make_markset({2, 0, 2}, 3), (MarkSet{0, 2}));
}

TEST(Mesh, UniformRefinementHalvesDiameter)
{
  const TetMesh m = gen_shell_mesh(SphericalGeometry(0.5, 1.0), 0.5, 1);
  const TetMesh u = refine_uniform(m);
  EXPECT_TRUE(validate_mesh(u).ok);
  EXPECT_EQ(u.num_tets(), 8 * m.num_tets());
  EXPECT_LT(max_element_diameter(u), 0.75 * max_element_diameter(m));
}

TEST(MeshIo, MshRoundTrip)
{
  const TetMesh m = gen_shell_mesh(SphericalGeometry(0.5, 1.0), 0.5, 0);
  const std::string path = temp_path("elastodtn_roundtrip.msh");
  export_msh(m, path);
  std::vector<std::string> warnings;
  const TetMesh r = import_msh(path, &warnings);
  EXPECT_TRUE(warnings.empty());
  EXPECT_EQ(r.tets, m.tets);
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v)
    EXPECT_LT((r.vertices[v] - m.vertices[v]).norm(), 1e-14);
  EXPECT_EQ(r.boundary_faces.size(), m.boundary_faces.size());
  std::remove(path.c_str());
}

TEST(MeshIo, RejectsBinaryAndMissingFiles)
{
  EXPECT_THROW(import_msh(temp_path("elastodtn_does_not_exist.msh")), ImportError);
  const std::string path = temp_path("elastodtn_bad.msh");
  {
    std::ofstream f(path);
    f << "$MeshFormat\n4.1 1 8\n$EndMeshFormat\n";
  }
  EXPECT_THROW(import_msh(path), ImportError);
  std::remove(path.c_str());
}

TEST(MeshIo, VtkHeader)
{
  const TetMesh m = gen_shell_mesh(SphericalGeometry(0.5, 1.0), 0.5, 0);
  const std::string path = temp_path("elastodtn_mesh.vtk");
  std::vector<double> eta(m.num_tets(), 1.0);
  export_vtk(m, path, {{"displacement_re", std::vector<Vec3>(m.num_vertices(), Vec3::Zero())}},
             {{"eta", eta}});
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "# vtk DataFile Version 3.0");
  std::string all((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  EXPECT_NE(all.find("CELL_DATA " + std::to_string(m.num_tets())), std::string::npos);
  EXPECT_NE(all.find("VECTORS displacement_re"), std::string::npos);
  std::remove(path.c_str());
}

TEST(LBracket, GeneratedMeshIsValid)
{
  LBracketSpec s;
  const TetMesh m = gen_lbracket_mesh(s);
  EXPECT_TRUE(validate_mesh(m).ok);
  int outer = 0, obstacle = 0;
  for (const auto &f : m.boundary_faces)
    (f.tag == BoundaryTag::OUTER ? outer : obstacle)++;
  EXPECT_GT(outer, 0);
  EXPECT_GT(obstacle, 0);
  // Every obstacle vertex sits inside the enclosing ball.
  for (const auto &f : m.boundary_faces)
    if (f.tag == BoundaryTag::OBSTACLE)
      for (int v : f.v)
        EXPECT_LE(m.vertices[v].norm(), s.enclosing_radius() + 1e-12);
}

TEST(LBracket, SuppliedMeshImportsAndSnaps)
{
  TetMesh m = import_msh(std::string(ELASTODTN_DATA_DIR) + "/lbracket.msh");
  EXPECT_TRUE(snap_outer_radius(m, 1.0));
  EXPECT_EQ(m.outer_radius, 1.0);
  EXPECT_TRUE(validate_mesh(m).ok);
  EXPECT_FALSE(snap_outer_radius(m, 0.9));
}

TEST(Geometry, DistanceToSegment)
{
  const Vec3 a(0, 0, -1), b(0, 0, 1);
  EXPECT_DOUBLE_EQ(distance_to_segment(Vec3(3, 4, 0), a, b), 5.0);
  EXPECT_DOUBLE_EQ(distance_to_segment(Vec3(0, 0, 3), a, b), 2.0);
}

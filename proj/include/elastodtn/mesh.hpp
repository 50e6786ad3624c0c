#ifndef ELASTODTN_MESH_HPP
#define ELASTODTN_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "elastodtn/common.hpp"

namespace elastodtn
{

enum class BoundaryTag : int
{
  OBSTACLE = 1,
  OUTER = 2
};

struct BoundaryFace
{
  std::array<int, 3> v;
  BoundaryTag tag;
};

struct TetMesh
{
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<BoundaryFace> boundary_faces;
  // Radii used to project new boundary vertices during refinement; zero
  // disables projection (imported meshes).
  double outer_radius = 0.0;
  double obstacle_radius = 0.0;

  int num_vertices() const { return int(vertices.size()); }
  int num_tets() const { return int(tets.size()); }
  int num_dofs() const { return 3 * num_vertices(); }
};

// Sorted element indices.
using MarkSet = std::vector<int>;
MarkSet make_markset(std::vector<int> idx, int num_tets);

inline std::uint64_t edge_key(int a, int b)
{
  if (a > b)
    std::swap(a, b);
  return (std::uint64_t(std::uint32_t(a)) << 32) | std::uint32_t(b);
}

double tet_signed_volume(const TetMesh &m, int t);
double mesh_volume(const TetMesh &m);
double tet_diameter(const TetMesh &m, int t);
double face_diameter(const TetMesh &m, const std::array<int, 3> &f);
double face_area(const TetMesh &m, const std::array<int, 3> &f);
double max_element_diameter(const TetMesh &m);
// Columns are gradients of the four barycentric coordinates.
Eigen::Matrix<double, 3, 4> barycentric_gradients(const TetMesh &m, int t, double *volume = nullptr);

// Faces of a tet opposite to local vertex i.
inline std::array<int, 3> tet_face(const std::array<int, 4> &t, int i)
{
  static const int opp[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  return {t[opp[i][0]], t[opp[i][1]], t[opp[i][2]]};
}

// Face adjacency: interior faces with both neighbours, boundary faces with
// their owning tet.
struct FaceTopology
{
  struct Interior
  {
    std::array<int, 3> v;
    int t0, t1;
  };
  std::vector<Interior> interior;
  std::vector<int> boundary_owner;  // per mesh.boundary_faces entry
};
FaceTopology build_face_topology(const TetMesh &m);

struct ValidationReport
{
  bool ok = true;
  std::vector<std::string> problems;
};
ValidationReport validate_mesh(const TetMesh &m, double radius_tol = 1e-9);
void require_valid(const TetMesh &m);

// Icosahedral shell between obstacle_radius and R with levels + 2 vertex layers.
TetMesh gen_shell_mesh(const SphericalGeometry &g, double obstacle_radius, int levels);

// Toy L-bracket obstacle in the ball of radius R: a structured cube grid on
// [-1, 1]^3 split into six tets per cube, the bracket cells removed and the
// layers outside the core blended onto the sphere along rays. Lengths are in
// cells of size 1 / cells_per_half.
struct LBracketSpec
{
  double R = 1.0;
  int cells_per_half = 5;
  int arm_cells = 2;        // bracket spans [-arm, arm]^2 minus the first quadrant
  int thickness_cells = 1;  // half thickness in z

  struct Edge
  {
    Vec3 a, b;
  };
  Edge reentrant_edge() const;     // convex obstacle corner line x = -a, y = a
  double enclosing_radius() const; // smallest ball around the bracket
};
TetMesh gen_lbracket_mesh(const LBracketSpec &spec);

// Sets outer_radius when every OUTER vertex lies on the sphere of radius R,
// so that refinement projects new boundary vertices onto it.
bool snap_outer_radius(TetMesh &m, double R, double tol = 1e-8);

double distance_to_segment(const Vec3 &x, const Vec3 &a, const Vec3 &b);

// Longest-edge bisection with conformity closure.
TetMesh refine(const TetMesh &m, const MarkSet &marks);
// Regular 1:8 subdivision (halves h); used for convergence oracles.
TetMesh refine_uniform(const TetMesh &m);

// ASCII MSH 4.1 I/O. Physical surface tags: 1 obstacle, 2 outer.
TetMesh import_msh(const std::string &path, std::vector<std::string> *warnings = nullptr);
void export_msh(const TetMesh &m, const std::string &path);

struct VtkPointVector
{
  std::string name;
  std::vector<Vec3> data;
};
struct VtkCellScalar
{
  std::string name;
  std::vector<double> data;
};
void export_vtk(const TetMesh &m, const std::string &path,
                const std::vector<VtkPointVector> &point_data = {},
                const std::vector<VtkCellScalar> &cell_data = {});

}  // namespace elastodtn

#endif

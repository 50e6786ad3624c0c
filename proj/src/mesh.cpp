#include "elastodtn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

namespace elastodtn
{

namespace
{

struct FaceKey
{
  std::array<int, 3> v;
  bool operator==(const FaceKey &o) const { return v == o.v; }
};

struct FaceHash
{
  size_t operator()(const FaceKey &k) const
  {
    size_t h = std::hash<int>()(k.v[0]);
    h = h * 1000003u ^ std::hash<int>()(k.v[1]);
    h = h * 1000003u ^ std::hash<int>()(k.v[2]);
    return h;
  }
};

FaceKey sorted_face(std::array<int, 3> f)
{
  std::sort(f.begin(), f.end());
  return {f};
}

}  // namespace

MarkSet make_markset(std::vector<int> idx, int num_tets)
{
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (int i : idx)
    if (i < 0 || i >= num_tets)
      throw MeshError("mark index " + std::to_string(i) + " out of range");
  return idx;
}

double tet_signed_volume(const TetMesh &m, int t)
{
  const auto &T = m.tets[t];
  const Vec3 &a = m.vertices[T[0]];
  return (m.vertices[T[1]] - a).dot((m.vertices[T[2]] - a).cross(m.vertices[T[3]] - a)) / 6.0;
}

double mesh_volume(const TetMesh &m)
{
  double v = 0;
  for (int t = 0; t < m.num_tets(); ++t)
    v += tet_signed_volume(m, t);
  return v;
}

double tet_diameter(const TetMesh &m, int t)
{
  const auto &T = m.tets[t];
  double d = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      d = std::max(d, (m.vertices[T[i]] - m.vertices[T[j]]).norm());
  return d;
}

double face_diameter(const TetMesh &m, const std::array<int, 3> &f)
{
  const Vec3 &a = m.vertices[f[0]], &b = m.vertices[f[1]], &c = m.vertices[f[2]];
  return std::max({(a - b).norm(), (b - c).norm(), (a - c).norm()});
}

double face_area(const TetMesh &m, const std::array<int, 3> &f)
{
  const Vec3 &a = m.vertices[f[0]];
  return 0.5 * (m.vertices[f[1]] - a).cross(m.vertices[f[2]] - a).norm();
}

double max_element_diameter(const TetMesh &m)
{
  double h = 0;
  for (int t = 0; t < m.num_tets(); ++t)
    h = std::max(h, tet_diameter(m, t));
  return h;
}

Eigen::Matrix<double, 3, 4> barycentric_gradients(const TetMesh &m, int t, double *volume)
{
  const auto &T = m.tets[t];
  const Vec3 &p0 = m.vertices[T[0]];
  Mat3 J;
  J.col(0) = m.vertices[T[1]] - p0;
  J.col(1) = m.vertices[T[2]] - p0;
  J.col(2) = m.vertices[T[3]] - p0;
  const double det = J.determinant();
  if (volume)
    *volume = det / 6.0;
  if (std::abs(det) < 6e-14)
    throw AssemblyError("degenerate tetrahedron " + std::to_string(t) + " (volume " +
                        std::to_string(det / 6.0) + ")");
  const Mat3 Jinv = J.inverse();
  Eigen::Matrix<double, 3, 4> G;
  // rows of Jinv are gradients of lambda_1..3
  G.col(1) = Jinv.row(0).transpose();
  G.col(2) = Jinv.row(1).transpose();
  G.col(3) = Jinv.row(2).transpose();
  G.col(0) = -(G.col(1) + G.col(2) + G.col(3));
  return G;
}

FaceTopology build_face_topology(const TetMesh &m)
{
  std::unordered_map<FaceKey, std::pair<int, int>, FaceHash> faces;
  faces.reserve(m.tets.size() * 3);
  for (int t = 0; t < m.num_tets(); ++t)
    for (int i = 0; i < 4; ++i)
    {
      auto [it, fresh] = faces.try_emplace(sorted_face(tet_face(m.tets[t], i)), t, -1);
      if (!fresh)
      {
        if (it->second.second >= 0)
          throw MeshError("face shared by more than two tetrahedra");
        it->second.second = t;
      }
    }
  FaceTopology top;
  top.boundary_owner.assign(m.boundary_faces.size(), -1);
  for (size_t b = 0; b < m.boundary_faces.size(); ++b)
  {
    auto it = faces.find(sorted_face(m.boundary_faces[b].v));
    if (it == faces.end())
      throw MeshError("boundary face " + std::to_string(b) + " is not a tetrahedron face");
    top.boundary_owner[b] = it->second.first;
  }
  top.interior.reserve(faces.size());
  std::vector<std::pair<FaceKey, std::pair<int, int>>> sorted(faces.begin(), faces.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto &a, const auto &b) { return a.first.v < b.first.v; });
  for (const auto &[k, tt] : sorted)
    if (tt.second >= 0)
      top.interior.push_back({k.v, tt.first, tt.second});
  return top;
}

ValidationReport validate_mesh(const TetMesh &m, double radius_tol)
{
  ValidationReport r;
  auto fail = [&](const std::string &s) {
    r.ok = false;
    if (r.problems.size() < 20)
      r.problems.push_back(s);
  };
  const int nv = m.num_vertices();
  for (int t = 0; t < m.num_tets(); ++t)
  {
    for (int v : m.tets[t])
      if (v < 0 || v >= nv)
      {
        fail("tet " + std::to_string(t) + " has invalid vertex index");
        return r;
      }
    if (!(tet_signed_volume(m, t) > 0))
      fail("tet " + std::to_string(t) + " has non-positive volume");
  }
  std::unordered_map<FaceKey, int, FaceHash> count;
  for (const auto &T : m.tets)
    for (int i = 0; i < 4; ++i)
      ++count[sorted_face(tet_face(T, i))];
  std::unordered_map<FaceKey, int, FaceHash> tagged;
  for (size_t b = 0; b < m.boundary_faces.size(); ++b)
  {
    const auto &f = m.boundary_faces[b];
    for (int v : f.v)
      if (v < 0 || v >= nv)
      {
        fail("boundary face " + std::to_string(b) + " has invalid vertex index");
        return r;
      }
    const auto k = sorted_face(f.v);
    if (++tagged[k] > 1)
      fail("boundary face " + std::to_string(b) + " tagged twice");
    auto it = count.find(k);
    if (it == count.end() || it->second != 1)
      fail("tagged face " + std::to_string(b) + " is not on the boundary");
    if (f.tag == BoundaryTag::OUTER && m.outer_radius > 0)
      for (int v : f.v)
        if (std::abs(m.vertices[v].norm() - m.outer_radius) > radius_tol * m.outer_radius)
          fail("OUTER vertex " + std::to_string(v) + " off the sphere");
  }
  for (const auto &[k, c] : count)
  {
    if (c > 2)
      fail("face shared by " + std::to_string(c) + " tetrahedra");
    else if (c == 1 && !tagged.count(k))
      fail("untagged boundary face (" + std::to_string(k.v[0]) + "," + std::to_string(k.v[1]) +
           "," + std::to_string(k.v[2]) + ")");
  }
  return r;
}

void require_valid(const TetMesh &m)
{
  auto r = validate_mesh(m);
  if (!r.ok)
  {
    std::ostringstream os;
    os << "invalid mesh:";
    for (const auto &p : r.problems)
      os << "\n  " << p;
    throw MeshError(os.str());
  }
}

// ---------------------------------------------------------------------------
// Icosahedral sphere.

namespace
{

void icosphere(int subdiv, std::vector<Vec3> &pts, std::vector<std::array<int, 3>> &tris)
{
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  pts = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
         {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  tris = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
          {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
          {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (auto &p : pts)
    p.normalize();
  for (int s = 0; s < subdiv; ++s)
  {
    std::unordered_map<std::uint64_t, int> mid;
    auto midpoint = [&](int a, int b) {
      auto [it, fresh] = mid.try_emplace(edge_key(a, b), int(pts.size()));
      if (fresh)
        pts.push_back((pts[a] + pts[b]).normalized());
      return it->second;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(tris.size() * 4);
    for (const auto &f : tris)
    {
      const int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    tris.swap(next);
  }
}

void orient_positive(TetMesh &m, std::array<int, 4> &T)
{
  const Vec3 &a = m.vertices[T[0]];
  const double v = (m.vertices[T[1]] - a).dot((m.vertices[T[2]] - a).cross(m.vertices[T[3]] - a));
  if (v < 0)
    std::swap(T[2], T[3]);
}

}  // namespace

TetMesh gen_shell_mesh(const SphericalGeometry &g, double obstacle_radius, int levels)
{
  if (levels < 0 || levels > 6)
    throw MeshError("gen_shell_mesh: levels must lie in [0, 6]");
  if (!(obstacle_radius > 0) || !(obstacle_radius < g.r_outer))
    throw MeshError("gen_shell_mesh: need 0 < obstacle radius < R");
  std::vector<Vec3> sph;
  std::vector<std::array<int, 3>> tris;
  icosphere(levels + 1, sph, tris);
  const int ns = int(sph.size());
  const int layers = levels + 2;

  TetMesh m;
  m.outer_radius = g.r_outer;
  m.obstacle_radius = obstacle_radius;
  m.vertices.reserve(ns * layers);
  for (int l = 0; l < layers; ++l)
  {
    const double r = obstacle_radius + (g.r_outer - obstacle_radius) * l / (layers - 1);
    for (const auto &p : sph)
      m.vertices.push_back(r * p);
  }
  for (int l = 0; l + 1 < layers; ++l)
    for (auto f : tris)
    {
      std::sort(f.begin(), f.end());
      const int a = f[0] + l * ns, b = f[1] + l * ns, c = f[2] + l * ns;
      const int A = a + ns, B = b + ns, C = c + ns;
      // Diagonal rule on each quad: larger bottom index to smaller top index,
      // which neighbouring prisms agree on.
      std::array<std::array<int, 4>, 3> split = {{{a, b, c, A}, {b, c, A, B}, {c, A, B, C}}};
      for (auto &T : split)
      {
        orient_positive(m, T);
        m.tets.push_back(T);
      }
    }
  for (const auto &f : tris)
  {
    m.boundary_faces.push_back({{f[0], f[1], f[2]}, BoundaryTag::OBSTACLE});
    const int o = (layers - 1) * ns;
    m.boundary_faces.push_back({{f[0] + o, f[1] + o, f[2] + o}, BoundaryTag::OUTER});
  }
  return m;
}


TetMesh gen_lbracket_mesh(const LBracketSpec &spec)
{
  const int c = spec.cells_per_half;
  if (c < 2 || c > 40)
    throw MeshError("gen_lbracket_mesh: cells_per_half must lie in [2, 40]");
  if (spec.arm_cells < 1 || spec.thickness_cells < 1 || spec.arm_cells >= c ||
      spec.thickness_cells > spec.arm_cells)
    throw MeshError("gen_lbracket_mesh: bracket must fit strictly inside the core");
  const double h = 1.0 / c;
  const double t0 = spec.arm_cells * h;  // identity core, infinity norm
  if (!(spec.R > std::sqrt(3.0) * t0))
    throw MeshError("gen_lbracket_mesh: sphere too small for the core");

  // Cube cells indexed by their lower corner in [-c, c).
  const int a = spec.arm_cells, t = spec.thickness_cells;
  auto solid = [&](int i, int j, int k) {
    const bool in_box = i >= -a && i < a && j >= -a && j < a && k >= -t && k < t;
    const bool notch = i >= 0 && j >= 0;
    return in_box && !notch;
  };

  TetMesh m;
  m.outer_radius = spec.R;
  std::map<std::array<int, 3>, int> vid;
  auto vertex = [&](int i, int j, int k) {
    auto [it, fresh] = vid.try_emplace({i, j, k}, m.num_vertices());
    if (fresh)
    {
      const Vec3 x(i * h, j * h, k * h);
      const double tinf = x.cwiseAbs().maxCoeff();
      Vec3 y = x;
      if (tinf > t0)
      {
        // Per-ray blend from the core surface to the sphere.
        const Vec3 d = x / tinf;
        const double w = (tinf - t0) / (1.0 - t0);
        y = d * (t0 + w * (spec.R / d.norm() - t0));
      }
      m.vertices.push_back(y);
    }
    return it->second;
  };

  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int i = -c; i < c; ++i)
    for (int j = -c; j < c; ++j)
      for (int k = -c; k < c; ++k)
      {
        if (solid(i, j, k))
          continue;
        for (const auto &p : perms)
        {
          std::array<int, 3> q = {i, j, k};
          std::array<int, 4> T;
          T[0] = vertex(q[0], q[1], q[2]);
          for (int s = 0; s < 3; ++s)
          {
            ++q[p[s]];
            T[s + 1] = vertex(q[0], q[1], q[2]);
          }
          orient_positive(m, T);
          m.tets.push_back(T);
        }
      }

  // Faces seen once are on the boundary; OUTER when on the cube surface.
  std::vector<std::array<int, 3>> grid_of(m.num_vertices());
  for (const auto &[g, v] : vid)
    grid_of[v] = g;
  std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> faces;
  for (const auto &T : m.tets)
    for (int f = 0; f < 4; ++f)
    {
      auto face = tet_face(T, f);
      auto key = face;
      std::sort(key.begin(), key.end());
      auto [it, fresh] = faces.try_emplace(key, 0, face);
      ++it->second.first;
    }
  auto on_cube = [&](int v) {
    const auto &g = grid_of[v];
    return std::abs(g[0]) == c || std::abs(g[1]) == c || std::abs(g[2]) == c;
  };
  for (const auto &[key, val] : faces)
  {
    if (val.first != 1)
      continue;
    const auto &f = val.second;
    const bool outer = on_cube(f[0]) && on_cube(f[1]) && on_cube(f[2]);
    m.boundary_faces.push_back({f, outer ? BoundaryTag::OUTER : BoundaryTag::OBSTACLE});
  }
  require_valid(m);
  return m;
}

LBracketSpec::Edge LBracketSpec::reentrant_edge() const
{
  // The notch corner is a 90 degree edge of the exterior domain; the
  // obstacle's convex corners are the re-entrant ones. Take the corner
  // facing the default incidence (0, -1, 0).
  const double h = 1.0 / cells_per_half, a = arm_cells * h, t = thickness_cells * h;
  return {Vec3(-a, a, -t), Vec3(-a, a, t)};
}

double LBracketSpec::enclosing_radius() const
{
  const double h = 1.0 / cells_per_half;
  return std::sqrt(2.0 * arm_cells * arm_cells + double(thickness_cells) * thickness_cells) * h;
}

bool snap_outer_radius(TetMesh &m, double R, double tol)
{
  bool any = false;
  for (const auto &f : m.boundary_faces)
    if (f.tag == BoundaryTag::OUTER)
      for (int v : f.v)
      {
        any = true;
        if (std::abs(m.vertices[v].norm() - R) > tol * R)
          return false;
      }
  if (any)
    m.outer_radius = R;
  return any;
}

double distance_to_segment(const Vec3 &x, const Vec3 &a, const Vec3 &b)
{
  const Vec3 d = b - a;
  const double s = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (x - (a + s * d)).norm();
}

}  // namespace elastodtn

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "elastodtn/mesh.hpp"

namespace elastodtn
{

namespace
{

// Working state for bisection. Tet slots are reused: the first child takes
// the parent's slot, the second is appended.
class Bisector
{
public:
  explicit Bisector(const TetMesh &m) : mesh_(m)
  {
    for (int t = 0; t < mesh_.num_tets(); ++t)
      link_tet(t);
    for (int b = 0; b < int(mesh_.boundary_faces.size()); ++b)
      link_face(b);
  }

  void refine_tet(int t, long budget)
  {
    budget_ = budget;
    bisect(longest_edge(t), 0);
  }

  long splits() const { return splits_; }
  const TetMesh &mesh() const { return mesh_; }
  TetMesh take() { return std::move(mesh_); }

private:
  struct Edge
  {
    int a, b;
  };

  void link_tet(int t)
  {
    const auto &T = mesh_.tets[t];
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        edge_tets_[edge_key(T[i], T[j])].push_back(t);
  }

  void unlink_tet(int t)
  {
    const auto &T = mesh_.tets[t];
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
      {
        auto it = edge_tets_.find(edge_key(T[i], T[j]));
        auto &v = it->second;
        v.erase(std::find(v.begin(), v.end(), t));
        if (v.empty())
          edge_tets_.erase(it);
      }
  }

  void link_face(int b)
  {
    const auto &f = mesh_.boundary_faces[b].v;
    for (int i = 0; i < 3; ++i)
      edge_faces_[edge_key(f[i], f[(i + 1) % 3])].push_back(b);
  }

  void unlink_face(int b)
  {
    const auto &f = mesh_.boundary_faces[b].v;
    for (int i = 0; i < 3; ++i)
    {
      auto it = edge_faces_.find(edge_key(f[i], f[(i + 1) % 3]));
      auto &v = it->second;
      v.erase(std::find(v.begin(), v.end(), b));
      if (v.empty())
        edge_faces_.erase(it);
    }
  }

  // Strict total order: length, then the vertex pair.
  bool longer(const Edge &x, const Edge &y) const
  {
    const double lx = (mesh_.vertices[x.a] - mesh_.vertices[x.b]).squaredNorm();
    const double ly = (mesh_.vertices[y.a] - mesh_.vertices[y.b]).squaredNorm();
    if (lx != ly)
      return lx > ly;
    return edge_key(x.a, x.b) > edge_key(y.a, y.b);
  }

  Edge longest_edge(int t) const
  {
    const auto &T = mesh_.tets[t];
    Edge best{T[0], T[1]};
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        if (longer(Edge{T[i], T[j]}, best))
          best = {T[i], T[j]};
    return best;
  }

  void bisect(Edge e, int depth)
  {
    if (depth > 200)
      throw MeshError("refine: longest-edge propagation path too deep");
    const auto key = edge_key(e.a, e.b);
    // Make e the longest edge of every tet around it.
    for (;;)
    {
      auto it = edge_tets_.find(key);
      if (it == edge_tets_.end())
        return;  // already split during closure
      bool again = false;
      for (int t : std::vector<int>(it->second))
      {
        const Edge le = longest_edge(t);
        if (edge_key(le.a, le.b) != key)
        {
          bisect(le, depth + 1);
          again = true;
          break;
        }
      }
      if (!again)
        break;
    }
    auto it = edge_tets_.find(key);
    if (it == edge_tets_.end())
      return;
    const std::vector<int> around = it->second;

    Vec3 mid = 0.5 * (mesh_.vertices[e.a] + mesh_.vertices[e.b]);
    std::vector<int> faces;
    if (auto f = edge_faces_.find(key); f != edge_faces_.end())
    {
      faces = f->second;
      const BoundaryTag tag = mesh_.boundary_faces[faces.front()].tag;
      const double r = tag == BoundaryTag::OUTER ? mesh_.outer_radius : mesh_.obstacle_radius;
      if (r > 0)
        mid *= r / mid.norm();
    }
    if (++splits_ > budget_)
      throw MeshError("refine: conformity closure exceeded its split budget "
                      "(pathological mesh)");
    const int mv = mesh_.num_vertices();
    mesh_.vertices.push_back(mid);

    for (int t : around)
    {
      unlink_tet(t);
      auto c1 = mesh_.tets[t], c2 = mesh_.tets[t];
      std::replace(c1.begin(), c1.end(), e.a, mv);
      std::replace(c2.begin(), c2.end(), e.b, mv);
      mesh_.tets[t] = c1;
      const int t2 = mesh_.num_tets();
      mesh_.tets.push_back(c2);
      link_tet(t);
      link_tet(t2);
    }
    for (int b : faces)
    {
      unlink_face(b);
      auto f1 = mesh_.boundary_faces[b], f2 = f1;
      std::replace(f1.v.begin(), f1.v.end(), e.a, mv);
      std::replace(f2.v.begin(), f2.v.end(), e.b, mv);
      mesh_.boundary_faces[b] = f1;
      const int b2 = int(mesh_.boundary_faces.size());
      mesh_.boundary_faces.push_back(f2);
      link_face(b);
      link_face(b2);
    }
  }

  TetMesh mesh_;
  std::unordered_map<std::uint64_t, std::vector<int>> edge_tets_;
  std::unordered_map<std::uint64_t, std::vector<int>> edge_faces_;
  long splits_ = 0;
  long budget_ = 0;
};

}  // namespace

TetMesh refine(const TetMesh &m, const MarkSet &marks)
{
  if (marks.empty())
    return m;
  const MarkSet ms = make_markset(marks, m.num_tets());
  Bisector bis(m);
  const long budget = 20L * long(ms.size());
  for (int t : ms)
  {
    // Closure may already have split this tet; its slot then holds a child.
    if (bis.mesh().tets[t] != m.tets[t])
      continue;
    bis.refine_tet(t, budget);
  }
  return bis.take();
}

TetMesh refine_uniform(const TetMesh &m)
{
  TetMesh out;
  out.outer_radius = m.outer_radius;
  out.obstacle_radius = m.obstacle_radius;
  out.vertices = m.vertices;

  // Midpoints, projected when the edge lies on a tagged surface.
  std::unordered_map<std::uint64_t, BoundaryTag> edge_tag;
  for (const auto &f : m.boundary_faces)
    for (int i = 0; i < 3; ++i)
      edge_tag[edge_key(f.v[i], f.v[(i + 1) % 3])] = f.tag;
  std::unordered_map<std::uint64_t, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto k = edge_key(a, b);
    auto [it, fresh] = mid.try_emplace(k, out.num_vertices());
    if (fresh)
    {
      Vec3 p = 0.5 * (m.vertices[a] + m.vertices[b]);
      if (auto t = edge_tag.find(k); t != edge_tag.end())
      {
        const double r = t->second == BoundaryTag::OUTER ? m.outer_radius : m.obstacle_radius;
        if (r > 0)
          p *= r / p.norm();
      }
      out.vertices.push_back(p);
    }
    return it->second;
  };

  auto push = [&](std::array<int, 4> T) {
    const Vec3 &a = out.vertices[T[0]];
    const double v = (out.vertices[T[1]] - a).dot((out.vertices[T[2]] - a).cross(out.vertices[T[3]] - a));
    if (v < 0)
      std::swap(T[2], T[3]);
    out.tets.push_back(T);
  };

  out.tets.reserve(8 * m.tets.size());
  for (const auto &T : m.tets)
  {
    int e[4][4];
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        e[i][j] = e[j][i] = midpoint(T[i], T[j]);
    push({T[0], e[0][1], e[0][2], e[0][3]});
    push({e[0][1], T[1], e[1][2], e[1][3]});
    push({e[0][2], e[1][2], T[2], e[2][3]});
    push({e[0][3], e[1][3], e[2][3], T[3]});
    // Octahedron: split along its shortest diagonal.
    const std::array<std::array<int, 2>, 3> diag = {
        {{e[0][1], e[2][3]}, {e[0][2], e[1][3]}, {e[0][3], e[1][2]}}};
    int best = 0;
    double len = 1e300;
    for (int d = 0; d < 3; ++d)
    {
      const double l = (out.vertices[diag[d][0]] - out.vertices[diag[d][1]]).squaredNorm();
      if (l < len)
        len = l, best = d;
    }
    const auto &p = diag[best];
    const auto &x = diag[(best + 1) % 3];
    const auto &y = diag[(best + 2) % 3];
    const std::array<int, 4> ring = {x[0], y[0], x[1], y[1]};
    for (int i = 0; i < 4; ++i)
      push({p[0], p[1], ring[i], ring[(i + 1) % 4]});
  }
  for (const auto &f : m.boundary_faces)
  {
    const int ab = midpoint(f.v[0], f.v[1]), bc = midpoint(f.v[1], f.v[2]),
              ca = midpoint(f.v[2], f.v[0]);
    out.boundary_faces.push_back({{f.v[0], ab, ca}, f.tag});
    out.boundary_faces.push_back({{f.v[1], bc, ab}, f.tag});
    out.boundary_faces.push_back({{f.v[2], ca, bc}, f.tag});
    out.boundary_faces.push_back({{ab, bc, ca}, f.tag});
  }
  return out;
}

}  // namespace elastodtn

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "elastodtn/mesh.hpp"

namespace elastodtn
{

namespace
{

// Reads whitespace separated tokens, skipping to named sections.
class MshReader
{
public:
  explicit MshReader(const std::string &path) : path_(path), in_(path)
  {
    if (!in_)
      throw ImportError("cannot open mesh file '" + path + "'");
  }

  bool next_section(std::string &name)
  {
    std::string tok;
    while (in_ >> tok)
      if (tok.size() > 1 && tok[0] == '$' && tok.rfind("$End", 0) != 0)
      {
        name = tok.substr(1);
        return true;
      }
    return false;
  }

  template <class T>
  T read(const char *what)
  {
    T v;
    if (!(in_ >> v))
      throw ImportError(path_ + ": unexpected end or bad token while reading " + what);
    return v;
  }

  void skip_section(const std::string &name)
  {
    std::string tok;
    while (in_ >> tok)
      if (tok == "$End" + name)
        return;
    throw ImportError(path_ + ": section $" + name + " not terminated");
  }

  void expect_end(const std::string &name)
  {
    std::string tok;
    in_ >> tok;
    if (tok != "$End" + name)
      throw ImportError(path_ + ": expected $End" + name + ", found '" + tok + "'");
  }

  std::string rest_of_line()
  {
    std::string s;
    std::getline(in_, s);
    return s;
  }

  const std::string &path() const { return path_; }

private:
  std::string path_;
  std::ifstream in_;
};

}  // namespace

TetMesh import_msh(const std::string &path, std::vector<std::string> *warnings)
{
  MshReader r(path);
  std::map<int, int> surface_physical;  // surface entity tag -> physical tag
  bool have_entities = false, have_nodes = false, have_elements = false;
  std::unordered_map<long, int> node_index;
  std::vector<Vec3> nodes;
  std::vector<std::array<long, 4>> tets;
  std::vector<std::pair<std::array<long, 3>, int>> tris;  // with surface entity tag

  std::string sec;
  while (r.next_section(sec))
  {
    if (sec == "MeshFormat")
    {
      const auto ver = r.read<std::string>("version");
      const int ftype = r.read<int>("file type");
      r.read<int>("data size");
      if (ver.rfind("4.1", 0) != 0 || ftype != 0)
        throw ImportError(path + ": only ASCII MSH 4.1 is supported (found version " + ver + ")");
      r.expect_end(sec);
    }
    else if (sec == "Entities")
    {
      have_entities = true;
      const long np = r.read<long>("points"), nc = r.read<long>("curves");
      const long ns = r.read<long>("surfaces"), nvol = r.read<long>("volumes");
      for (long i = 0; i < np; ++i)
      {
        r.read<int>("tag");
        for (int k = 0; k < 3; ++k)
          r.read<double>("coord");
        const int nphys = r.read<int>("physical count");
        for (int k = 0; k < nphys; ++k)
          r.read<int>("physical");
      }
      auto read_entity = [&](int dim) {
        const int tag = r.read<int>("tag");
        for (int k = 0; k < 6; ++k)
          r.read<double>("bbox");
        const int nphys = r.read<int>("physical count");
        int phys = 0;
        for (int k = 0; k < nphys; ++k)
        {
          const int p = r.read<int>("physical");
          if (k == 0)
            phys = p;
        }
        const int nb = r.read<int>("bounding count");
        for (int k = 0; k < nb; ++k)
          r.read<int>("bounding");
        if (dim == 2)
          surface_physical[tag] = phys;
      };
      for (long i = 0; i < nc; ++i)
        read_entity(1);
      for (long i = 0; i < ns; ++i)
        read_entity(2);
      for (long i = 0; i < nvol; ++i)
        read_entity(3);
      r.expect_end(sec);
    }
    else if (sec == "Nodes")
    {
      have_nodes = true;
      const long nblocks = r.read<long>("blocks");
      r.read<long>("nodes");
      r.read<long>("min tag");
      r.read<long>("max tag");
      for (long b = 0; b < nblocks; ++b)
      {
        r.read<int>("entity dim");
        r.read<int>("entity tag");
        const int parametric = r.read<int>("parametric");
        const long nn = r.read<long>("block size");
        if (parametric)
          throw ImportError(path + ": parametric node coordinates are not supported");
        std::vector<long> tags(nn);
        for (auto &t : tags)
          t = r.read<long>("node tag");
        for (long i = 0; i < nn; ++i)
        {
          Vec3 x;
          x.x() = r.read<double>("x");
          x.y() = r.read<double>("y");
          x.z() = r.read<double>("z");
          node_index[tags[i]] = int(nodes.size());
          nodes.push_back(x);
        }
      }
      r.expect_end(sec);
    }
    else if (sec == "Elements")
    {
      have_elements = true;
      const long nblocks = r.read<long>("blocks");
      r.read<long>("elements");
      r.read<long>("min tag");
      r.read<long>("max tag");
      for (long b = 0; b < nblocks; ++b)
      {
        const int dim = r.read<int>("entity dim");
        const int etag = r.read<int>("entity tag");
        const int type = r.read<int>("element type");
        const long ne = r.read<long>("block size");
        static const std::map<int, int> nodes_per = {{15, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 4},
                                                     {5, 8}, {6, 6}, {7, 5}, {8, 3}, {9, 6},
                                                     {11, 10}};
        auto np = nodes_per.find(type);
        if (np == nodes_per.end())
          throw ImportError(path + ": unsupported element type " + std::to_string(type) +
                            " in entity (" + std::to_string(dim) + "," + std::to_string(etag) + ")");
        if (dim == 3 && type != 4)
          throw ImportError(path + ": volume entity " + std::to_string(etag) +
                            " contains non-tetrahedral cells (type " + std::to_string(type) + ")");
        if (dim == 2 && type != 2)
          throw ImportError(path + ": surface entity " + std::to_string(etag) +
                            " contains non-triangular cells (type " + std::to_string(type) + ")");
        for (long e = 0; e < ne; ++e)
        {
          r.read<long>("element tag");
          std::array<long, 4> v{};
          for (int k = 0; k < np->second; ++k)
          {
            const long t = r.read<long>("element node");
            if (k < 4)
              v[k] = t;
          }
          if (dim == 3)
            tets.push_back(v);
          else if (dim == 2)
            tris.push_back({{v[0], v[1], v[2]}, etag});
        }
      }
      r.expect_end(sec);
    }
    else
      r.skip_section(sec);
  }
  if (!have_nodes || !have_elements)
    throw ImportError(path + ": missing $Nodes or $Elements section");

  auto idx = [&](long tag) {
    auto it = node_index.find(tag);
    if (it == node_index.end())
      throw ImportError(path + ": element references unknown node " + std::to_string(tag));
    return it->second;
  };

  TetMesh m;
  m.vertices = std::move(nodes);
  for (size_t t = 0; t < tets.size(); ++t)
  {
    std::array<int, 4> T = {idx(tets[t][0]), idx(tets[t][1]), idx(tets[t][2]), idx(tets[t][3])};
    m.tets.push_back(T);
    const double v = tet_signed_volume(m, int(t));
    if (v == 0)
      throw ImportError(path + ": tetrahedron " + std::to_string(t) + " is degenerate");
    if (v < 0)
    {
      std::swap(m.tets.back()[2], m.tets.back()[3]);
      if (warnings)
        warnings->push_back("tetrahedron " + std::to_string(t) +
                            " had negative orientation; vertices reordered");
    }
  }
  bool has_obstacle = false, has_outer = false;
  int ignored = 0;
  for (const auto &[v, etag] : tris)
  {
    int phys = etag;
    if (have_entities)
    {
      auto it = surface_physical.find(etag);
      phys = it == surface_physical.end() ? 0 : it->second;
    }
    if (phys == 1 || phys == 2)
    {
      const auto tag = phys == 1 ? BoundaryTag::OBSTACLE : BoundaryTag::OUTER;
      (phys == 1 ? has_obstacle : has_outer) = true;
      m.boundary_faces.push_back({{idx(v[0]), idx(v[1]), idx(v[2])}, tag});
    }
    else
      ++ignored;
  }
  if (ignored && warnings)
    warnings->push_back(std::to_string(ignored) + " triangles outside physical groups 1/2 ignored");
  if (!has_outer)
    throw ImportError(path + ": no OUTER surface group (physical tag 2)");
  if (!has_obstacle)
    throw ImportError(path + ": no OBSTACLE surface group (physical tag 1)");
  auto rep = validate_mesh(m);
  if (!rep.ok)
    throw ImportError(path + ": " + rep.problems.front());
  return m;
}

void export_msh(const TetMesh &m, const std::string &path)
{
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write '" + path + "'");
  out << std::setprecision(17);
  Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
  for (const auto &v : m.vertices)
  {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  auto bbox = [&] {
    std::ostringstream s;
    s << std::setprecision(17) << lo.x() << ' ' << lo.y() << ' ' << lo.z() << ' ' << hi.x()
      << ' ' << hi.y() << ' ' << hi.z();
    return s.str();
  };
  out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
  out << "$PhysicalNames\n3\n2 1 \"OBSTACLE\"\n2 2 \"OUTER\"\n3 3 \"DOMAIN\"\n$EndPhysicalNames\n";
  out << "$Entities\n0 0 2 1\n";
  out << "1 " << bbox() << " 1 1 0\n";
  out << "2 " << bbox() << " 1 2 0\n";
  out << "1 " << bbox() << " 1 3 2 1 2\n";
  out << "$EndEntities\n";
  const long nv = m.num_vertices();
  out << "$Nodes\n1 " << nv << " 1 " << nv << "\n3 1 0 " << nv << "\n";
  for (long i = 1; i <= nv; ++i)
    out << i << '\n';
  for (const auto &v : m.vertices)
    out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  out << "$EndNodes\n";

  std::vector<const BoundaryFace *> ob, ou;
  for (const auto &f : m.boundary_faces)
    (f.tag == BoundaryTag::OBSTACLE ? ob : ou).push_back(&f);
  const long ne = long(ob.size() + ou.size() + m.tets.size());
  out << "$Elements\n3 " << ne << " 1 " << ne << "\n";
  long tag = 1;
  for (int s = 1; s <= 2; ++s)
  {
    const auto &list = s == 1 ? ob : ou;
    out << "2 " << s << " 2 " << list.size() << '\n';
    for (const auto *f : list)
      out << tag++ << ' ' << f->v[0] + 1 << ' ' << f->v[1] + 1 << ' ' << f->v[2] + 1 << '\n';
  }
  out << "3 1 4 " << m.tets.size() << '\n';
  for (const auto &T : m.tets)
    out << tag++ << ' ' << T[0] + 1 << ' ' << T[1] + 1 << ' ' << T[2] + 1 << ' ' << T[3] + 1 << '\n';
  out << "$EndElements\n";
}

void export_vtk(const TetMesh &m, const std::string &path,
                const std::vector<VtkPointVector> &point_data,
                const std::vector<VtkCellScalar> &cell_data)
{
  std::ofstream out(path);
  if (!out)
    throw Error("cannot write '" + path + "'");
  out << std::setprecision(10);
  out << "# vtk DataFile Version 3.0\nelastodtn\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << m.num_vertices() << " double\n";
  for (const auto &v : m.vertices)
    out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
  out << "CELLS " << m.num_tets() << ' ' << 5 * m.num_tets() << '\n';
  for (const auto &T : m.tets)
    out << "4 " << T[0] << ' ' << T[1] << ' ' << T[2] << ' ' << T[3] << '\n';
  out << "CELL_TYPES " << m.num_tets() << '\n';
  for (int t = 0; t < m.num_tets(); ++t)
    out << "10\n";
  if (!point_data.empty())
  {
    out << "POINT_DATA " << m.num_vertices() << '\n';
    for (const auto &pd : point_data)
    {
      if (int(pd.data.size()) != m.num_vertices())
        throw Error("export_vtk: point field '" + pd.name + "' has wrong length");
      out << "VECTORS " << pd.name << " double\n";
      for (const auto &v : pd.data)
        out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    }
  }
  if (!cell_data.empty())
  {
    out << "CELL_DATA " << m.num_tets() << '\n';
    for (const auto &cd : cell_data)
    {
      if (int(cd.data.size()) != m.num_tets())
        throw Error("export_vtk: cell field '" + cd.name + "' has wrong length");
      out << "SCALARS " << cd.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : cd.data)
        out << v << '\n';
    }
  }
}

}  // namespace elastodtn

#include "dunif/mesh_core.hpp"

#include "dunif/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace dunif {

namespace {

std::uint64_t edge_key(int i, int j) {
  if (i > j) std::swap(i, j);
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j);
}

struct Incidence {
  int face;
  int corner; // corner opposite the edge
};

} // namespace

// ==========================================================
// ====================  Triangulation  =====================
// ==========================================================

Triangulation Triangulation::build(std::vector<Face> faces) {
  if (faces.empty()) {
    throw Error(ErrorCode::InvalidInput, "no faces");
  }
  int max_index = -1;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& fc = faces[f];
    for (int v : fc) {
      if (v < 0) throw Error(ErrorCode::InvalidInput, "negative vertex index", static_cast<std::int64_t>(f));
      max_index = std::max(max_index, v);
    }
    if (fc[0] == fc[1] || fc[1] == fc[2] || fc[0] == fc[2]) {
      throw Error(ErrorCode::InvalidInput, "repeated vertex within face " + std::to_string(f),
                  static_cast<std::int64_t>(f));
    }
  }
  const int nv = max_index + 1;
  const int nf = static_cast<int>(faces.size());

  // Edge incidences.
  std::unordered_map<std::uint64_t, std::vector<Incidence>> incidences;
  incidences.reserve(3 * faces.size());
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      incidences[edge_key(faces[f][(k + 1) % 3], faces[f][(k + 2) % 3])].push_back({f, k});
    }
  }
  for (const auto& [key, inc] : incidences) {
    if (inc.size() != 2) {
      throw Error(ErrorCode::NonManifoldEdge,
                  "edge (" + std::to_string(key >> 32) + "," + std::to_string(key & 0xffffffffu) + ") has " +
                      std::to_string(inc.size()) + " incident faces",
                  inc.front().face);
    }
  }

  // Duplicate faces (same vertex set). Checked after edge multiplicity, so
  // this only fires on the two-face closed pillow.
  {
    std::unordered_set<std::string> seen;
    for (int f = 0; f < nf; ++f) {
      Face s = faces[f];
      std::sort(s.begin(), s.end());
      std::string key = std::to_string(s[0]) + "," + std::to_string(s[1]) + "," + std::to_string(s[2]);
      if (!seen.insert(key).second) {
        throw Error(ErrorCode::DuplicateFace, "face " + std::to_string(f) + " listed twice", f);
      }
    }
  }

  // Orientation by BFS over the dual graph; also establishes face connectivity.
  auto directed = [&](int f, int k, bool flipped) {
    int a = faces[f][(k + 1) % 3], b = faces[f][(k + 2) % 3];
    if (flipped) std::swap(a, b);
    return std::pair{a, b};
  };
  std::vector<int> flip(nf, -1);
  std::queue<int> queue;
  flip[0] = 0;
  queue.push(0);
  int reached = 1;
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop();
    for (int k = 0; k < 3; ++k) {
      const auto& inc = incidences[edge_key(faces[f][(k + 1) % 3], faces[f][(k + 2) % 3])];
      const Incidence& other = inc[0].face == f && inc[0].corner == k ? inc[1] : inc[0];
      const auto [a, b] = directed(f, k, flip[f] == 1);
      const auto [c, d] = directed(other.face, other.corner, false);
      // Consistent orientation traverses the shared edge in opposite directions.
      const int need = (a == d && b == c) ? 0 : 1;
      if (flip[other.face] == -1) {
        flip[other.face] = need;
        ++reached;
        queue.push(other.face);
      } else if (flip[other.face] != need) {
        throw Error(ErrorCode::NonOrientable, "no consistent face orientation exists", other.face);
      }
    }
  }
  if (reached != nf) {
    // Components that touch at a vertex form a pinched surface.
    std::vector<bool> touched(nv, false);
    for (int f = 0; f < nf; ++f)
      if (flip[f] != -1)
        for (int v : faces[f]) touched[v] = true;
    for (int f = 0; f < nf; ++f)
      if (flip[f] == -1)
        for (int v : faces[f])
          if (touched[v])
            throw Error(ErrorCode::NonManifoldVertex, "vertex " + std::to_string(v) + " pinches two components", v);
    throw Error(ErrorCode::Disconnected, "faces form more than one component");
  }
  for (int f = 0; f < nf; ++f) {
    if (flip[f] == 1) std::swap(faces[f][1], faces[f][2]);
  }

  Triangulation t;
  t.vertex_count_ = nv;
  t.faces_ = std::move(faces);

  // Canonical edge list.
  std::vector<std::uint64_t> keys;
  keys.reserve(incidences.size());
  for (const auto& kv : incidences) keys.push_back(kv.first);
  std::sort(keys.begin(), keys.end());
  std::unordered_map<std::uint64_t, int> edge_id;
  edge_id.reserve(keys.size());
  t.edges_.reserve(keys.size());
  for (std::size_t e = 0; e < keys.size(); ++e) {
    edge_id[keys[e]] = static_cast<int>(e);
    t.edges_.push_back({static_cast<int>(keys[e] >> 32), static_cast<int>(keys[e] & 0xffffffffu)});
  }

  t.face_edges_.resize(nf);
  t.edge_faces_.assign(t.edges_.size(), EdgeFaces{});
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) {
      const int e = edge_id[edge_key(t.faces_[f][(k + 1) % 3], t.faces_[f][(k + 2) % 3])];
      t.face_edges_[f][k] = e;
      EdgeFaces& ef = t.edge_faces_[e];
      const int slot = ef.face[0] == -1 ? 0 : 1;
      ef.face[slot] = f;
      ef.corner[slot] = k;
    }
  }

  // Vertex adjacency (CSR).
  std::vector<int> degree(nv, 0);
  for (const Edge& e : t.edges_) {
    ++degree[e.v0];
    ++degree[e.v1];
  }
  for (int v = 0; v < nv; ++v) {
    if (degree[v] == 0) {
      throw Error(ErrorCode::Disconnected, "vertex " + std::to_string(v) + " is not used by any face", v);
    }
  }
  t.adj_offsets_.assign(nv + 1, 0);
  for (int v = 0; v < nv; ++v) t.adj_offsets_[v + 1] = t.adj_offsets_[v] + degree[v];
  t.adj_vertices_.resize(t.adj_offsets_[nv]);
  t.adj_edges_.resize(t.adj_offsets_[nv]);
  std::vector<int> fill(t.adj_offsets_.begin(), t.adj_offsets_.end() - 1);
  // Edges are sorted, so neighbor lists come out sorted as well.
  for (int e = 0; e < t.edge_count(); ++e) {
    const Edge& ed = t.edges_[e];
    t.adj_vertices_[fill[ed.v0]] = ed.v1;
    t.adj_edges_[fill[ed.v0]++] = e;
  }
  for (int e = 0; e < t.edge_count(); ++e) {
    const Edge& ed = t.edges_[e];
    t.adj_vertices_[fill[ed.v1]] = ed.v0;
    t.adj_edges_[fill[ed.v1]++] = e;
  }
  for (int v = 0; v < nv; ++v) {
    const int lo = t.adj_offsets_[v], hi = t.adj_offsets_[v + 1];
    std::vector<std::pair<int, int>> tmp;
    for (int p = lo; p < hi; ++p) tmp.emplace_back(t.adj_vertices_[p], t.adj_edges_[p]);
    std::sort(tmp.begin(), tmp.end());
    for (int p = lo; p < hi; ++p) {
      t.adj_vertices_[p] = tmp[p - lo].first;
      t.adj_edges_[p] = tmp[p - lo].second;
    }
  }

  // Vertex links must be single cycles: walk the faces around each vertex.
  std::vector<std::vector<std::pair<int, int>>> vertex_faces(nv); // (face, corner)
  for (int f = 0; f < nf; ++f) {
    for (int k = 0; k < 3; ++k) vertex_faces[t.faces_[f][k]].emplace_back(f, k);
  }
  for (int v = 0; v < nv; ++v) {
    const auto& vf = vertex_faces[v];
    int f = vf[0].first, k = vf[0].second;
    std::size_t steps = 0;
    do {
      // Cross the edge (v, next corner) into the neighboring face.
      const int e = t.face_edges_[f][(k + 2) % 3];
      const EdgeFaces& ef = t.edge_faces_[e];
      const int g = ef.face[0] == f ? ef.face[1] : ef.face[0];
      const Face& gf = t.faces_[g];
      k = gf[0] == v ? 0 : (gf[1] == v ? 1 : 2);
      f = g;
      ++steps;
    } while ((f != vf[0].first) && steps <= vf.size());
    if (steps != vf.size()) {
      throw Error(ErrorCode::NonManifoldVertex, "link of vertex " + std::to_string(v) + " is not a single cycle", v);
    }
  }
  return t;
}

int Triangulation::find_edge(int i, int j) const {
  if (i < 0 || j < 0 || i >= vertex_count_ || j >= vertex_count_) return -1;
  const auto nb = vertex_neighbors(i);
  const auto it = std::lower_bound(nb.begin(), nb.end(), j);
  if (it == nb.end() || *it != j) return -1;
  return adj_edges_[adj_offsets_[i] + static_cast<int>(it - nb.begin())];
}

std::span<const int> Triangulation::vertex_neighbors(int v) const {
  return std::span<const int>(adj_vertices_).subspan(adj_offsets_[v], adj_offsets_[v + 1] - adj_offsets_[v]);
}

std::span<const int> Triangulation::vertex_edges(int v) const {
  return std::span<const int>(adj_edges_).subspan(adj_offsets_[v], adj_offsets_[v + 1] - adj_offsets_[v]);
}

Triangulation grid_torus(int n) {
  if (n < 3) throw Error(ErrorCode::InvalidInput, "grid torus needs n >= 3");
  auto id = [n](int i, int j) { return ((j % n + n) % n) * n + ((i % n + n) % n); };
  std::vector<Face> faces;
  faces.reserve(2 * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      faces.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
      faces.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return Triangulation::build(std::move(faces));
}

Triangulation tetrahedron() { return Triangulation::build({{0, 1, 2}, {0, 3, 1}, {1, 3, 2}, {0, 2, 3}}); }

// ==========================================================
// =====================  MeshMetric  =======================
// ==========================================================

int find_triangle_violation(const Triangulation& t, std::span<const double> lengths) {
  for (int f = 0; f < t.face_count(); ++f) {
    const double a = lengths[t.face_edge(f, 0)], b = lengths[t.face_edge(f, 1)], c = lengths[t.face_edge(f, 2)];
    const double slack = kTriangleSlack * std::max({a, b, c});
    if (!(a + b - c >= slack && b + c - a >= slack && a + c - b >= slack)) return f;
  }
  return -1;
}

MeshMetric::MeshMetric(std::shared_ptr<const Triangulation> triangulation, std::vector<double> lengths,
                       Geometry geometry)
    : triangulation_(std::move(triangulation)), lengths_(std::move(lengths)), geometry_(geometry) {
  if (!triangulation_) throw Error(ErrorCode::InvalidInput, "null triangulation");
  if (geometry_ == Geometry::Spherical) {
    throw Error(ErrorCode::InvalidInput, "meshes must be Euclidean or hyperbolic");
  }
  if (static_cast<int>(lengths_.size()) != triangulation_->edge_count()) {
    throw Error(ErrorCode::InvalidInput, "expected " + std::to_string(triangulation_->edge_count()) +
                                             " edge lengths, got " + std::to_string(lengths_.size()));
  }
  for (std::size_t e = 0; e < lengths_.size(); ++e) {
    if (!std::isfinite(lengths_[e]) || lengths_[e] <= 0.0) {
      throw Error(ErrorCode::InvalidInput, "edge " + std::to_string(e) + " has non-positive length",
                  static_cast<std::int64_t>(e));
    }
  }
  const int bad = find_triangle_violation(*triangulation_, lengths_);
  if (bad >= 0) {
    throw Error(ErrorCode::TriangleInequalityViolated, "face " + std::to_string(bad), bad);
  }
}

TriangleSides MeshMetric::face_sides(int f) const {
  const Triangulation& t = *triangulation_;
  return {lengths_[t.face_edge(f, 0)], lengths_[t.face_edge(f, 1)], lengths_[t.face_edge(f, 2)]};
}

double MeshMetric::max_length() const { return *std::max_element(lengths_.begin(), lengths_.end()); }

std::vector<std::array<double, 3>> face_angles(const MeshMetric& m) {
  const int nf = m.triangulation().face_count();
  std::vector<std::array<double, 3>> out(nf);
  for (int f = 0; f < nf; ++f) {
    const TriangleAngles a = angles(m.face_sides(f), m.geometry());
    out[f] = {a.A, a.B, a.C};
  }
  return out;
}

// ==========================================================
// ====================  Regularity  ========================
// ==========================================================

bool RegularityReport::is_regular(double eps1, double eps2) const {
  return min_angle >= eps1 && max_opposite_angle_sum <= std::numbers::pi - eps2;
}

RegularityReport regularity_from_angles(const Triangulation& t, std::span<const std::array<double, 3>> angles) {
  RegularityReport r;
  r.min_angle = std::numeric_limits<double>::infinity();
  for (int f = 0; f < t.face_count(); ++f) {
    for (int k = 0; k < 3; ++k) {
      if (angles[f][k] < r.min_angle) {
        r.min_angle = angles[f][k];
        r.min_angle_face = f;
        r.min_angle_corner = k;
      }
    }
  }
  r.max_opposite_angle_sum = -std::numeric_limits<double>::infinity();
  for (int e = 0; e < t.edge_count(); ++e) {
    const EdgeFaces& ef = t.edge_faces(e);
    const double s = angles[ef.face[0]][ef.corner[0]] + angles[ef.face[1]][ef.corner[1]];
    if (s > r.max_opposite_angle_sum) {
      r.max_opposite_angle_sum = s;
      r.max_sum_edge = e;
    }
  }
  return r;
}

RegularityReport check_metric(const MeshMetric& m) {
  const auto a = face_angles(m);
  return regularity_from_angles(m.triangulation(), a);
}

} // namespace dunif

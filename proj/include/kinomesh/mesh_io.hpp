#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace kinomesh {

using Point3 = Eigen::Vector3d;
using Face = std::array<int, 3>;

/// One directed edge of the terrain graph.
struct DirectedEdge {
  int tail = -1;
  int head = -1;
};

/// Triangular terrain mesh plus its bidirected edge graph.
///
/// Directed edges are enumerated by sorting the undirected edges on
/// (min endpoint, max endpoint); undirected edge k yields directed edge 2k
/// (min -> max) and 2k+1 (max -> min), so twin(i) == i ^ 1. The graph is
/// immutable once constructed.
class MeshGraph {
 public:
  MeshGraph() = default;

  /// Builds the edge graph from faces. Throws ValidationError on degenerate
  /// or duplicate faces and on out-of-range indices.
  static MeshGraph from_faces(std::vector<Point3> vertices, std::vector<Face> faces);

  /// Builds a graph from explicit undirected edges (no faces). Used for
  /// line graphs and hand-made test graphs.
  static MeshGraph from_edges(std::vector<Point3> vertices,
                              const std::vector<std::pair<int, int>>& undirected);

  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<Face>& faces() const { return faces_; }
  const std::vector<DirectedEdge>& edges() const { return edges_; }
  const std::vector<double>& lengths() const { return lengths_; }
  const std::vector<Point3>& edge_vectors() const { return edge_vectors_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_undirected_edges() const { return num_edges() / 2; }

  static int twin(int edge) { return edge ^ 1; }
  const DirectedEdge& edge(int i) const { return edges_[static_cast<size_t>(i)]; }
  double length(int i) const { return lengths_[static_cast<size_t>(i)]; }
  const Point3& edge_vector(int i) const { return edge_vectors_[static_cast<size_t>(i)]; }

  /// Directed edges leaving / entering a vertex, in ascending edge order.
  const std::vector<int>& out_edges(int v) const { return out_[static_cast<size_t>(v)]; }
  const std::vector<int>& in_edges(int v) const { return in_[static_cast<size_t>(v)]; }

  /// Directed edge id for tail -> head, or -1.
  int find_edge(int tail, int head) const;

  /// Non-fatal findings from construction (non-manifold edges, unused vertices).
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

  /// FNV-1a hash of coordinates and faces; keys transition-table caches.
  std::uint64_t content_hash() const;

 private:
  void build_edges(std::vector<std::pair<int, int>> undirected);

  std::vector<Point3> vertices_;
  std::vector<Face> faces_;
  std::vector<DirectedEdge> edges_;
  std::vector<double> lengths_;
  std::vector<Point3> edge_vectors_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<std::string> diagnostics_;
};

enum class MeshFormat { Off, Obj };

/// Parses OFF or OBJ text. OBJ indices are 1-based (negative = relative);
/// non-triangular faces are rejected.
MeshGraph parse_mesh(std::istream& in, MeshFormat format);

/// Loads a mesh file, picking the format from the extension.
MeshGraph load_mesh(const std::string& path);

/// Canonical OFF text: full-precision coordinates, faces in stored order.
void write_off(std::ostream& out, const MeshGraph& mesh);

struct NearestVertex {
  int node = -1;
  double distance = 0.0;
};

/// Closest vertex by Euclidean distance; ties go to the lowest index.
NearestVertex nearest_vertex(const MeshGraph& mesh, const Point3& point);

}  // namespace kinomesh

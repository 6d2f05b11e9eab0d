#include "kinomesh/mesh_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "kinomesh/error.hpp"

namespace kinomesh {

namespace {

struct Token {
  std::string text;
  int line;
};

// Whitespace tokens with '#' comments removed, tagged with their line.
std::vector<Token> tokenize_lines(std::istream& in) {
  std::vector<Token> tokens;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back({tok, line_no});
  }
  return tokens;
}

double parse_double(const std::string& s, int line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw ParseError("expected a finite number, got '" + s + "'", line);
  }
  return value;
}

long parse_long(const std::string& s, int line) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("expected an integer, got '" + s + "'", line);
  }
  return value;
}

MeshGraph parse_off(std::istream& in) {
  auto tokens = tokenize_lines(in);
  size_t pos = 0;
  auto next = [&](const char* what) -> const Token& {
    if (pos >= tokens.size()) {
      int line = tokens.empty() ? 0 : tokens.back().line;
      throw ParseError(std::string("unexpected end of file, expected ") + what, line);
    }
    return tokens[pos++];
  };

  const Token& header = next("OFF header");
  if (header.text != "OFF") throw ParseError("missing OFF header", header.line);

  const Token& nv_tok = next("vertex count");
  const Token& nf_tok = next("face count");
  next("edge count");
  long nv = parse_long(nv_tok.text, nv_tok.line);
  long nf = parse_long(nf_tok.text, nf_tok.line);
  if (nv < 0 || nf < 0) throw ParseError("negative element count", nv_tok.line);

  std::vector<Point3> vertices;
  vertices.reserve(static_cast<size_t>(nv));
  for (long i = 0; i < nv; ++i) {
    Point3 p;
    int line = 0;
    for (int c = 0; c < 3; ++c) {
      const Token& t = next("vertex coordinate");
      p[c] = parse_double(t.text, t.line);
      line = t.line;
    }
    // Skip optional per-vertex extras (colors) that sit on the same line.
    while (pos < tokens.size() && tokens[pos].line == line) ++pos;
    vertices.push_back(p);
  }

  std::vector<Face> faces;
  faces.reserve(static_cast<size_t>(nf));
  for (long f = 0; f < nf; ++f) {
    const Token& count_tok = next("face vertex count");
    long count = parse_long(count_tok.text, count_tok.line);
    if (count != 3) {
      throw FormatError("line " + std::to_string(count_tok.line) + ": face with " +
                        std::to_string(count) + " vertices; only triangles are supported");
    }
    Face face{};
    for (int c = 0; c < 3; ++c) {
      const Token& t = next("face index");
      if (t.line != count_tok.line) throw ParseError("face continues past end of line", t.line);
      long idx = parse_long(t.text, t.line);
      if (idx < 0 || idx >= nv) throw ParseError("face index out of range", t.line);
      face[static_cast<size_t>(c)] = static_cast<int>(idx);
    }
    while (pos < tokens.size() && tokens[pos].line == count_tok.line) ++pos;
    faces.push_back(face);
  }
  if (pos != tokens.size()) throw ParseError("trailing data after faces", tokens[pos].line);
  return MeshGraph::from_faces(std::move(vertices), std::move(faces));
}

int obj_index(const std::string& ref, long num_vertices, int line) {
  std::string head = ref.substr(0, ref.find('/'));
  long idx = parse_long(head, line);
  long resolved = idx > 0 ? idx - 1 : num_vertices + idx;
  if (idx == 0 || resolved < 0 || resolved >= num_vertices) {
    throw ParseError("face index out of range", line);
  }
  return static_cast<int>(resolved);
}

MeshGraph parse_obj(std::istream& in) {
  std::vector<Point3> vertices;
  std::vector<Face> faces;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string keyword;
    if (!(ss >> keyword)) continue;
    std::vector<std::string> args;
    for (std::string a; ss >> a;) args.push_back(a);

    if (keyword == "v") {
      if (args.size() < 3 || args.size() > 4) {
        throw ParseError("vertex needs 3 coordinates", line_no);
      }
      vertices.emplace_back(parse_double(args[0], line_no), parse_double(args[1], line_no),
                            parse_double(args[2], line_no));
    } else if (keyword == "f") {
      if (args.size() < 3) throw ParseError("face needs at least 3 vertices", line_no);
      if (args.size() > 3) {
        throw FormatError("line " + std::to_string(line_no) + ": face with " +
                          std::to_string(args.size()) + " vertices; only triangles are supported");
      }
      Face face{};
      for (size_t c = 0; c < 3; ++c) {
        face[c] = obj_index(args[c], static_cast<long>(vertices.size()), line_no);
      }
      faces.push_back(face);
    } else if (keyword == "vn" || keyword == "vt" || keyword == "vp" || keyword == "g" ||
               keyword == "o" || keyword == "s" || keyword == "usemtl" || keyword == "mtllib") {
      continue;
    } else {
      throw ParseError("unsupported OBJ statement '" + keyword + "'", line_no);
    }
  }
  return MeshGraph::from_faces(std::move(vertices), std::move(faces));
}

}  // namespace

MeshGraph MeshGraph::from_faces(std::vector<Point3> vertices, std::vector<Face> faces) {
  MeshGraph mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.faces_ = std::move(faces);
  const int nv = mesh.num_vertices();

  std::set<Face> seen;
  std::map<std::pair<int, int>, int> edge_faces;
  for (size_t f = 0; f < mesh.faces_.size(); ++f) {
    const Face& face = mesh.faces_[f];
    for (int idx : face) {
      if (idx < 0 || idx >= nv) {
        throw ValidationError("face " + std::to_string(f) + " references missing vertex");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
      throw ValidationError("face " + std::to_string(f) + " is degenerate (repeated vertex)");
    }
    for (int c = 0; c < 3; ++c) {
      int a = face[static_cast<size_t>(c)];
      int b = face[static_cast<size_t>((c + 1) % 3)];
      if (mesh.vertices_[static_cast<size_t>(a)] == mesh.vertices_[static_cast<size_t>(b)]) {
        throw ValidationError("face " + std::to_string(f) +
                              " is degenerate (coincident vertex positions)");
      }
      ++edge_faces[{std::min(a, b), std::max(a, b)}];
    }
    Face key = face;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) {
      throw ValidationError("face " + std::to_string(f) + " duplicates an earlier face");
    }
  }

  std::vector<std::pair<int, int>> undirected;
  undirected.reserve(edge_faces.size());
  size_t non_manifold = 0;
  for (const auto& [key, count] : edge_faces) {
    undirected.push_back(key);
    if (count > 2) ++non_manifold;
  }
  if (non_manifold > 0) {
    mesh.diagnostics_.push_back("warning: " + std::to_string(non_manifold) +
                                " non-manifold edge(s) shared by more than two faces");
  }
  mesh.build_edges(std::move(undirected));
  return mesh;
}

MeshGraph MeshGraph::from_edges(std::vector<Point3> vertices,
                                const std::vector<std::pair<int, int>>& undirected) {
  MeshGraph mesh;
  mesh.vertices_ = std::move(vertices);
  const int nv = mesh.num_vertices();
  std::set<std::pair<int, int>> keys;
  for (auto [a, b] : undirected) {
    if (a < 0 || b < 0 || a >= nv || b >= nv) throw ValidationError("edge references missing vertex");
    if (a == b) throw ValidationError("self-loop edge");
    if (mesh.vertices_[static_cast<size_t>(a)] == mesh.vertices_[static_cast<size_t>(b)]) {
      throw ValidationError("zero-length edge");
    }
    keys.insert({std::min(a, b), std::max(a, b)});
  }
  mesh.build_edges({keys.begin(), keys.end()});
  return mesh;
}

void MeshGraph::build_edges(std::vector<std::pair<int, int>> undirected) {
  std::sort(undirected.begin(), undirected.end());
  const size_t nv = vertices_.size();
  edges_.clear();
  edges_.reserve(undirected.size() * 2);
  for (auto [a, b] : undirected) {
    edges_.push_back({a, b});
    edges_.push_back({b, a});
  }
  lengths_.resize(edges_.size());
  edge_vectors_.resize(edges_.size());
  out_.assign(nv, {});
  in_.assign(nv, {});
  for (size_t i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    edge_vectors_[i] = vertices_[static_cast<size_t>(e.head)] - vertices_[static_cast<size_t>(e.tail)];
    lengths_[i] = edge_vectors_[i].norm();
    out_[static_cast<size_t>(e.tail)].push_back(static_cast<int>(i));
    in_[static_cast<size_t>(e.head)].push_back(static_cast<int>(i));
  }
  size_t unused = 0;
  for (size_t v = 0; v < nv; ++v) {
    if (out_[v].empty()) ++unused;
  }
  if (unused > 0 && !faces_.empty()) {
    diagnostics_.push_back("warning: " + std::to_string(unused) + " vertex(es) not used by any face");
  }
}

int MeshGraph::find_edge(int tail, int head) const {
  if (tail < 0 || tail >= num_vertices()) return -1;
  for (int e : out_[static_cast<size_t>(tail)]) {
    if (edges_[static_cast<size_t>(e)].head == head) return e;
  }
  return -1;
}

std::uint64_t MeshGraph::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& p : vertices_) mix(p.data(), sizeof(double) * 3);
  for (const auto& f : faces_) mix(f.data(), sizeof(int) * 3);
  for (const auto& e : edges_) mix(&e, sizeof(DirectedEdge));
  return h;
}

MeshGraph parse_mesh(std::istream& in, MeshFormat format) {
  return format == MeshFormat::Off ? parse_off(in) : parse_obj(in);
}

MeshGraph load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file '" + path + "'");
  std::string ext = path.substr(path.find_last_of('.') + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == "off") return parse_mesh(in, MeshFormat::Off);
  if (ext == "obj") return parse_mesh(in, MeshFormat::Obj);
  throw FormatError("unknown mesh extension '." + ext + "' (expected .off or .obj)");
}

void write_off(std::ostream& out, const MeshGraph& mesh) {
  out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.faces().size() << ' '
      << mesh.num_undirected_edges() << '\n';
  out << std::setprecision(17);
  for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
  for (const auto& f : mesh.faces()) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

NearestVertex nearest_vertex(const MeshGraph& mesh, const Point3& point) {
  NearestVertex best{-1, std::numeric_limits<double>::infinity()};
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    double d = (mesh.vertices()[static_cast<size_t>(v)] - point).norm();
    if (d < best.distance) best = {v, d};
  }
  return best;
}

}  // namespace kinomesh

#include "kinomesh/kinematics.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "kinomesh/error.hpp"

namespace kinomesh {

void KinodynamicLimits::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("invalid limits: ") + what);
  };
  require(std::isfinite(a_max) && a_max > 0.0, "a_max must be > 0");
  require(std::isfinite(v_max) && v_max > 0.0, "v_max must be > 0");
  require(v_min >= 0.0 && v_min < v_max, "need 0 <= v_min < v_max");
  require(kappa >= 0.0 && kappa <= v_max, "need 0 <= kappa <= v_max");
  require(gamma >= 0.0 && gamma <= v_max, "need 0 <= gamma <= v_max");
  require(theta_max_yaw > 0.0 && theta_max_yaw < M_PI, "need 0 < theta_max_yaw < pi");
  require(phi_max > 0.0 && phi_max <= M_PI / 2.0, "need 0 < phi_max <= pi/2");
  require(theta_max_pitch > 0.0 && theta_max_pitch <= M_PI, "need 0 < theta_max_pitch <= pi");
  require(std::isfinite(s_upper) && s_upper > 1.0 / v_max, "s_upper must exceed 1/v_max");
}

double yaw_cosine(const Point3& from, const Point3& to) {
  const double nf = std::hypot(from.x(), from.y());
  const double nt = std::hypot(to.x(), to.y());
  if (nf < 1e-12 || nt < 1e-12) return 1.0;
  const double c = (from.x() * to.x() + from.y() * to.y()) / (nf * nt);
  return std::clamp(c, -1.0, 1.0);
}

double pitch_angle(const Point3& edge) {
  if (edge.x() == 0.0 && edge.y() == 0.0 && edge.z() == 0.0) {
    throw DomainError("pitch of a zero-length edge is undefined");
  }
  return std::atan2(edge.z(), std::hypot(edge.x(), edge.y()));
}

TransitionTable::TransitionTable(std::vector<double> edge_pitch, std::vector<bool> pitch_ok,
                                 std::vector<std::pair<int, int>> forbidden)
    : edge_pitch_(std::move(edge_pitch)), pitch_ok_(std::move(pitch_ok)), forbidden_(std::move(forbidden)) {
  std::sort(forbidden_.begin(), forbidden_.end());
}

bool TransitionTable::is_forbidden(int k, int l) const {
  return std::binary_search(forbidden_.begin(), forbidden_.end(), std::make_pair(k, l));
}

bool TransitionTable::operator==(const TransitionTable& other) const {
  return edge_pitch_ == other.edge_pitch_ && pitch_ok_ == other.pitch_ok_ &&
         forbidden_ == other.forbidden_;
}

namespace {

bool pitch_admissible(double pitch, const KinodynamicLimits& limits) {
  return std::abs(pitch) <= limits.phi_max + kAngleTolerance;
}

bool pair_allowed(const Point3& ek, const Point3& el, double pk, double pl,
                  const KinodynamicLimits& limits) {
  const double alpha = std::cos(limits.theta_max_yaw);
  if (yaw_cosine(ek, el) < alpha - kAngleTolerance) return false;
  if (!pitch_admissible(pk, limits) || !pitch_admissible(pl, limits)) return false;
  return std::abs(pl - pk) <= limits.theta_max_pitch + kAngleTolerance;
}

}  // namespace

bool transition_allowed(const MeshGraph& mesh, int k, int l, const KinodynamicLimits& limits) {
  const Point3& ek = mesh.edge_vector(k);
  const Point3& el = mesh.edge_vector(l);
  return pair_allowed(ek, el, pitch_angle(ek), pitch_angle(el), limits);
}

TransitionTable build_transition_table(const MeshGraph& mesh, const KinodynamicLimits& limits) {
  const int ne = mesh.num_edges();
  std::vector<double> pitch(static_cast<size_t>(ne));
  std::vector<bool> ok(static_cast<size_t>(ne));
  for (int i = 0; i < ne; ++i) {
    pitch[static_cast<size_t>(i)] = pitch_angle(mesh.edge_vector(i));
    ok[static_cast<size_t>(i)] = pitch_admissible(pitch[static_cast<size_t>(i)], limits);
  }
  std::vector<std::pair<int, int>> forbidden;
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    for (int k : mesh.in_edges(v)) {
      for (int l : mesh.out_edges(v)) {
        if (!pair_allowed(mesh.edge_vector(k), mesh.edge_vector(l), pitch[static_cast<size_t>(k)],
                          pitch[static_cast<size_t>(l)], limits)) {
          forbidden.emplace_back(k, l);
        }
      }
    }
  }
  return TransitionTable(std::move(pitch), std::move(ok), std::move(forbidden));
}

void write_edge_pitch_csv(std::ostream& out, const MeshGraph& mesh, const TransitionTable& table) {
  out << "edge_id,tail,head,pitch_rad,pitch_ok\n" << std::setprecision(17);
  for (int i = 0; i < mesh.num_edges(); ++i) {
    out << i << ',' << mesh.edge(i).tail << ',' << mesh.edge(i).head << ','
        << table.edge_pitch()[static_cast<size_t>(i)] << ',' << (table.pitch_ok(i) ? 1 : 0) << '\n';
  }
}

void write_forbidden_csv(std::ostream& out, const TransitionTable& table) {
  out << "k,l\n";
  for (auto [k, l] : table.forbidden_pairs()) out << k << ',' << l << '\n';
}

namespace {

nlohmann::json cache_key(const MeshGraph& mesh, const KinodynamicLimits& limits) {
  return {{"mesh_hash", mesh.content_hash()},
          {"num_edges", mesh.num_edges()},
          {"theta_max_yaw", limits.theta_max_yaw},
          {"theta_max_pitch", limits.theta_max_pitch},
          {"phi_max", limits.phi_max}};
}

}  // namespace

void save_transition_cache(const std::string& path, const MeshGraph& mesh,
                           const KinodynamicLimits& limits, const TransitionTable& table) {
  nlohmann::json doc;
  doc["key"] = cache_key(mesh, limits);
  doc["edge_pitch"] = table.edge_pitch();
  std::vector<int> ok;
  for (int i = 0; i < mesh.num_edges(); ++i) ok.push_back(table.pitch_ok(i) ? 1 : 0);
  doc["pitch_ok"] = ok;
  doc["forbidden"] = table.forbidden_pairs();
  std::ofstream out(path);
  if (!out) throw Error("cannot write transition cache '" + path + "'");
  out << doc.dump() << '\n';
}

bool load_transition_cache(const std::string& path, const MeshGraph& mesh,
                           const KinodynamicLimits& limits, TransitionTable& table) {
  std::ifstream in(path);
  if (!in) return false;
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception&) {
    return false;
  }
  if (!doc.contains("key") || doc["key"] != cache_key(mesh, limits)) return false;
  std::vector<int> ok_int = doc["pitch_ok"].get<std::vector<int>>();
  std::vector<bool> ok(ok_int.begin(), ok_int.end());
  table = TransitionTable(doc["edge_pitch"].get<std::vector<double>>(), std::move(ok),
                          doc["forbidden"].get<std::vector<std::pair<int, int>>>());
  return true;
}

}  // namespace kinomesh

#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kinomesh/mesh_io.hpp"

namespace kinomesh {

/// exp(-24): boundary velocity that is practically zero but keeps 1/v finite.
inline const double kNearZeroVelocity = std::exp(-24.0);

/// Vehicle limits. Angles in radians, velocities in m/s, acceleration in m/s^2.
struct KinodynamicLimits {
  double theta_max_yaw = M_PI / 3.0;
  double theta_max_pitch = M_PI / 4.0;
  double phi_max = M_PI / 4.0;
  double a_max = 0.5;
  double v_max = 0.5;
  double v_min = 0.0;
  double kappa = kNearZeroVelocity;
  double gamma = kNearZeroVelocity;
  /// Cap used for the slowness upper bound s_U when v_min == 0 (s/m).
  double s_upper = 1e6;

  /// Throws ValidationError when an invariant is violated.
  void validate() const;

  /// Slowness bounds [s_L, s_U] implied by the velocity range.
  double s_lower_bound() const { return 1.0 / v_max; }
  double s_upper_bound() const { return v_min > 0.0 ? 1.0 / v_min : s_upper; }
};

/// Tolerance applied to every threshold comparison in the transition test.
inline constexpr double kAngleTolerance = 1e-9;

/// Cosine of the heading change between two edges, measured on their
/// xy-projections. Returns 1 when either projection is (near) zero.
double yaw_cosine(const Point3& from, const Point3& to);

/// Signed slope angle of an edge; positive when climbing. Throws
/// DomainError for the zero vector.
double pitch_angle(const Point3& edge);

/// Precomputed transition feasibility for consecutive directed edges.
///
/// Only infeasible pairs are stored; a pair (k, l) with head(k) == tail(l)
/// that is not listed may be traversed back to back.
class TransitionTable {
 public:
  TransitionTable() = default;
  TransitionTable(std::vector<double> edge_pitch, std::vector<bool> pitch_ok,
                  std::vector<std::pair<int, int>> forbidden);

  const std::vector<double>& edge_pitch() const { return edge_pitch_; }
  bool pitch_ok(int edge) const { return pitch_ok_[static_cast<size_t>(edge)]; }
  const std::vector<std::pair<int, int>>& forbidden_pairs() const { return forbidden_; }

  /// Binary search over the sorted forbidden list.
  bool is_forbidden(int k, int l) const;

  bool operator==(const TransitionTable& other) const;

 private:
  std::vector<double> edge_pitch_;
  std::vector<bool> pitch_ok_;
  std::vector<std::pair<int, int>> forbidden_;  // sorted
};

/// The three transition conditions evaluated directly for one pair.
bool transition_allowed(const MeshGraph& mesh, int k, int l, const KinodynamicLimits& limits);

TransitionTable build_transition_table(const MeshGraph& mesh, const KinodynamicLimits& limits);

/// `edge_id,tail,head,pitch_rad,pitch_ok` rows.
void write_edge_pitch_csv(std::ostream& out, const MeshGraph& mesh, const TransitionTable& table);
/// `k,l` rows of forbidden pairs.
void write_forbidden_csv(std::ostream& out, const TransitionTable& table);

/// On-disk cache keyed by mesh hash and the geometric limits. Loading
/// returns false when the file is missing or the key does not match.
void save_transition_cache(const std::string& path, const MeshGraph& mesh,
                           const KinodynamicLimits& limits, const TransitionTable& table);
bool load_transition_cache(const std::string& path, const MeshGraph& mesh,
                           const KinodynamicLimits& limits, TransitionTable& table);

}  // namespace kinomesh

#pragma once

#include <iosfwd>
#include <string>

#include "kinomesh/kinematics.hpp"

namespace kinomesh {

/// Evaluates a numeric expression: literals, pi, e, inf, + - * / with
/// parentheses, unary minus, and exp/sqrt/cos/sin/tan/acos. "pi/3" and
/// "exp(-24)" are typical. Throws ParseError.
double parse_value(const std::string& text);

/// Sets one field by key (theta_max_yaw, theta_max_pitch, phi_max, a_max,
/// v_max, v_min, kappa, gamma, s_upper). Throws ValidationError on an
/// unknown key.
void set_limit(KinodynamicLimits& limits, const std::string& key, double value);

/// Applies "key=value".
void apply_override(KinodynamicLimits& limits, const std::string& assignment);

/// key=value lines; '#' starts a comment. Unset keys keep their value in
/// `base`. Does not validate.
KinodynamicLimits read_limits(std::istream& in, KinodynamicLimits base = {});
KinodynamicLimits load_limits(const std::string& path, KinodynamicLimits base = {});

void write_limits(std::ostream& out, const KinodynamicLimits& limits);

}  // namespace kinomesh

#include "kinomesh/limits_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>

#include "kinomesh/error.hpp"

namespace kinomesh {

namespace {

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  double parse() {
    const double v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("bad value '" + s_ + "': " + why, 0);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }

  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }

  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return atom();
  }

  double atom() {
    skip();
    if (eat('(')) {
      const double v = sum();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return v;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'");
    const size_t b = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string word = s_.substr(b, pos_ - b);
    if (word == "pi") return M_PI;
    if (word == "e") return M_E;
    if (word == "inf") return std::numeric_limits<double>::infinity();
    if (!eat('(')) fail("unknown name '" + word + "'");
    const double arg = sum();
    if (!eat(')')) fail("missing ')'");
    if (word == "exp") return std::exp(arg);
    if (word == "sqrt") return std::sqrt(arg);
    if (word == "cos") return std::cos(arg);
    if (word == "sin") return std::sin(arg);
    if (word == "tan") return std::tan(arg);
    if (word == "acos") return std::acos(arg);
    fail("unknown function '" + word + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

std::string trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_value(const std::string& text) { return ExprParser(text).parse(); }

void set_limit(KinodynamicLimits& limits, const std::string& key, double value) {
  if (key == "theta_max_yaw") limits.theta_max_yaw = value;
  else if (key == "theta_max_pitch") limits.theta_max_pitch = value;
  else if (key == "phi_max") limits.phi_max = value;
  else if (key == "a_max") limits.a_max = value;
  else if (key == "v_max") limits.v_max = value;
  else if (key == "v_min") limits.v_min = value;
  else if (key == "kappa") limits.kappa = value;
  else if (key == "gamma") limits.gamma = value;
  else if (key == "s_upper") limits.s_upper = value;
  else throw ValidationError("unknown limit '" + key + "'");
}

void apply_override(KinodynamicLimits& limits, const std::string& assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string::npos) throw ParseError("expected key=value, got '" + assignment + "'", 0);
  set_limit(limits, trim(assignment.substr(0, eq)), parse_value(assignment.substr(eq + 1)));
}

KinodynamicLimits read_limits(std::istream& in, KinodynamicLimits base) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    try {
      apply_override(base, line);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), lineno);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  return base;
}

KinodynamicLimits load_limits(const std::string& path, KinodynamicLimits base) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open limits file '" + path + "'");
  try {
    return read_limits(in, base);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

void write_limits(std::ostream& out, const KinodynamicLimits& l) {
  out << std::setprecision(17) << "theta_max_yaw=" << l.theta_max_yaw << "\ntheta_max_pitch=" << l.theta_max_pitch
      << "\nphi_max=" << l.phi_max << "\na_max=" << l.a_max << "\nv_max=" << l.v_max << "\nv_min=" << l.v_min
      << "\nkappa=" << l.kappa << "\ngamma=" << l.gamma << "\ns_upper=" << l.s_upper << '\n';
}

}  // namespace kinomesh

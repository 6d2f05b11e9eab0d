#include "kinomesh/model_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "kinomesh/error.hpp"

namespace kinomesh {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::optional<double> to_number(const std::string& tok) {
  const std::string l = lower(tok);
  if (l == "inf" || l == "+inf" || l == "infinity" || l == "+infinity") return kInf;
  if (l == "-inf" || l == "-infinity") return -kInf;
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

const char* sense_op(Sense s) {
  switch (s) {
    case Sense::LessEqual: return "<=";
    case Sense::GreaterEqual: return ">=";
    case Sense::Equal: return "=";
  }
  return "=";
}

// ---- LP writer -------------------------------------------------------------

void write_terms(std::ostream& out, const MilpModel& model, const std::vector<Term>& terms) {
  if (terms.empty()) {
    out << " 0 " << model.variables().front().name;
    return;
  }
  int on_line = 0;
  for (size_t t = 0; t < terms.size(); ++t) {
    if (on_line == 6) {
      out << "\n  ";
      on_line = 0;
    }
    const double c = terms[t].coef;
    const std::string& name = model.variables()[static_cast<size_t>(terms[t].var)].name;
    out << ' ' << (c < 0 ? '-' : '+') << ' ';
    if (std::abs(c) != 1.0) out << num(std::abs(c)) << ' ';
    out << name;
    ++on_line;
  }
}

void write_lp(std::ostream& out, const MilpModel& model) {
  out << "\\ kinomesh model: " << model.num_vars() << " columns, " << model.num_rows() << " rows\n";
  out << "Minimize\n obj:";
  std::vector<Term> cost;
  for (int j = 0; j < model.num_vars(); ++j) {
    const double c = model.variables()[static_cast<size_t>(j)].cost;
    if (c != 0.0) cost.push_back({j, c});
  }
  if (!cost.empty()) write_terms(out, model, cost);
  out << "\nSubject To\n";
  for (const Constraint& c : model.rows()) {
    out << ' ' << c.name << ':';
    write_terms(out, model, c.terms);
    out << ' ' << sense_op(c.sense) << ' ' << num(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (const Variable& v : model.variables()) {
    out << ' ';
    if (v.lower == -kInf && v.upper == kInf) {
      out << v.name << " free";
    } else if (v.lower == v.upper) {
      out << v.name << " = " << num(v.lower);
    } else if (v.upper == kInf) {
      out << v.name << " >= " << num(v.lower);
    } else {
      out << num(v.lower) << " <= " << v.name << " <= " << num(v.upper);
    }
    out << '\n';
  }
  bool any = false;
  int on_line = 0;
  for (const Variable& v : model.variables()) {
    if (!v.integer) continue;
    if (!any) out << "Binaries\n";
    any = true;
    out << ' ' << v.name;
    if (++on_line == 8) {
      out << '\n';
      on_line = 0;
    }
  }
  if (any && on_line != 0) out << '\n';
  out << "End\n";
}

// ---- MPS writer --------------------------------------------------------------

std::string field(const std::string& s, size_t width) {
  if (s.size() >= width) return s + " ";
  return s + std::string(width - s.size(), ' ');
}

void write_mps(std::ostream& out, const MilpModel& model) {
  out << "NAME          KINOMESH\n";
  out << "ROWS\n";
  out << " N  obj\n";
  for (const Constraint& c : model.rows()) {
    const char* t = c.sense == Sense::LessEqual ? "L" : (c.sense == Sense::GreaterEqual ? "G" : "E");
    out << ' ' << t << "  " << c.name << '\n';
  }
  // Column-wise view of the rows.
  std::vector<std::vector<std::pair<int, double>>> cols(static_cast<size_t>(model.num_vars()));
  for (int i = 0; i < model.num_rows(); ++i) {
    for (const Term& t : model.rows()[static_cast<size_t>(i)].terms) cols[static_cast<size_t>(t.var)].emplace_back(i, t.coef);
  }
  out << "COLUMNS\n";
  bool in_int = false;
  int marker = 0;
  auto entry = [&](const std::string& col, const std::string& row, double v) {
    out << "    " << field(col, 10) << field(row, 10) << num(v) << '\n';
  };
  for (int j = 0; j < model.num_vars(); ++j) {
    const Variable& v = model.variables()[static_cast<size_t>(j)];
    if (v.integer != in_int) {
      out << "    " << field("MARKER" + std::to_string(marker++), 10) << field("'MARKER'", 10)
          << (v.integer ? "'INTORG'" : "'INTEND'") << '\n';
      in_int = v.integer;
    }
    const auto& entries = cols[static_cast<size_t>(j)];
    if (v.cost != 0.0 || entries.empty()) entry(v.name, "obj", v.cost);
    for (auto [i, a] : entries) entry(v.name, model.rows()[static_cast<size_t>(i)].name, a);
  }
  if (in_int) out << "    " << field("MARKER" + std::to_string(marker++), 10) << field("'MARKER'", 10) << "'INTEND'\n";
  out << "RHS\n";
  for (const Constraint& c : model.rows()) {
    if (c.rhs != 0.0) out << "    " << field("RHS", 10) << field(c.name, 10) << num(c.rhs) << '\n';
  }
  out << "BOUNDS\n";
  auto bound = [&](const char* type, const std::string& name, std::optional<double> v) {
    out << ' ' << type << ' ' << field("BND", 10) << field(name, 10);
    if (v) out << num(*v);
    out << '\n';
  };
  for (const Variable& v : model.variables()) {
    if (v.integer && v.lower == 0.0 && v.upper == 1.0) {
      bound("BV", v.name, std::nullopt);
    } else if (v.lower == -kInf && v.upper == kInf) {
      bound("FR", v.name, std::nullopt);
    } else if (v.lower == v.upper) {
      bound("FX", v.name, v.lower);
    } else {
      if (v.lower == -kInf) {
        bound("MI", v.name, std::nullopt);
      } else {
        bound("LO", v.name, v.lower);
      }
      if (v.upper == kInf) {
        bound("PL", v.name, std::nullopt);
      } else {
        bound("UP", v.name, v.upper);
      }
    }
  }
  out << "ENDATA\n";
}

// ---- shared reader state -------------------------------------------------------

struct Builder {
  struct Col {
    std::string name;
    double lower = 0.0;
    double upper = kInf;
    double cost = 0.0;
    bool integer = false;
    int bounds_order = -1;
  };
  std::vector<Col> cols;
  std::unordered_map<std::string, int> col_index;
  std::vector<Constraint> rows;
  std::unordered_map<std::string, int> row_index;
  int bounds_seen = 0;

  int col(const std::string& name) {
    auto it = col_index.find(name);
    if (it != col_index.end()) return it->second;
    const int id = static_cast<int>(cols.size());
    cols.push_back({name});
    col_index.emplace(name, id);
    return id;
  }

  void mark_bounds(int c) {
    if (cols[static_cast<size_t>(c)].bounds_order < 0) cols[static_cast<size_t>(c)].bounds_order = bounds_seen++;
  }

  MilpModel finish() {
    // Column order: bounds-section order first, then first appearance.
    std::vector<int> order(cols.size());
    for (size_t i = 0; i < cols.size(); ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const int oa = cols[static_cast<size_t>(a)].bounds_order;
      const int ob = cols[static_cast<size_t>(b)].bounds_order;
      if ((oa < 0) != (ob < 0)) return oa >= 0;
      return oa >= 0 && oa < ob;
    });
    std::vector<int> remap(cols.size());
    MilpModel model;
    for (size_t k = 0; k < order.size(); ++k) {
      const Col& c = cols[static_cast<size_t>(order[k])];
      remap[static_cast<size_t>(order[k])] = static_cast<int>(k);
      Variable v;
      v.name = c.name;
      v.lower = c.lower;
      v.upper = c.upper;
      v.cost = c.cost;
      v.integer = c.integer;
      model.add_variable(v);
    }
    for (Constraint& r : rows) {
      // Merge repeated columns within a row.
      std::map<int, double> merged;
      std::vector<int> first_seen;
      for (const Term& t : r.terms) {
        const int c = remap[static_cast<size_t>(t.var)];
        if (!merged.count(c)) first_seen.push_back(c);
        merged[c] += t.coef;
      }
      r.terms.clear();
      for (int c : first_seen) r.terms.push_back({c, merged[c]});
      model.add_row(std::move(r));
    }
    model.infer_layout_from_names();
    return model;
  }
};

// ---- LP reader -------------------------------------------------------------------

struct Token {
  std::string text;
  int line;
  bool line_start;
};

std::vector<Token> tokenize_lp(std::istream& in) {
  std::vector<Token> toks;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto bs = raw.find('\\');
    if (bs != std::string::npos) raw.erase(bs);
    bool first = true;
    size_t i = 0;
    while (i < raw.size()) {
      const char ch = raw[i];
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
        continue;
      }
      std::string t;
      if (ch == '<' || ch == '>' || ch == '=') {
        t = ch;
        ++i;
        if (i < raw.size() && raw[i] == '=') {
          ++i;
          if (ch != '=') t += '=';
        } else if (ch == '=' && i < raw.size() && (raw[i] == '<' || raw[i] == '>')) {
          t = std::string(1, raw[i]) + "=";
          ++i;
        }
        if (t == "<") t = "<=";
        if (t == ">") t = ">=";
      } else if (ch == ':' || ch == '+' || ch == '-') {
        t = ch;
        ++i;
      } else {
        while (i < raw.size() && !std::isspace(static_cast<unsigned char>(raw[i])) && raw[i] != ':' &&
               raw[i] != '<' && raw[i] != '>' && raw[i] != '=' &&
               !((raw[i] == '+' || raw[i] == '-') && !t.empty() && std::tolower(t.back()) != 'e')) {
          t += raw[i++];
        }
      }
      toks.push_back({t, line, first});
      first = false;
    }
  }
  return toks;
}

enum class LpSection { None, Objective, Constraints, Bounds, Binaries, End };

// Returns the section a line-initial token (plus lookahead) opens, and how
// many tokens the keyword spans.
std::optional<std::pair<LpSection, int>> section_keyword(const std::vector<Token>& toks, size_t i) {
  if (!toks[i].line_start) return std::nullopt;
  const std::string w = lower(toks[i].text);
  auto next_is = [&](const char* s) {
    return i + 1 < toks.size() && toks[i + 1].line == toks[i].line && lower(toks[i + 1].text) == s;
  };
  if (w == "minimize" || w == "minimise" || w == "minimum" || w == "min") return std::make_pair(LpSection::Objective, 1);
  if (w == "subject" && next_is("to")) return std::make_pair(LpSection::Constraints, 2);
  if (w == "such" && next_is("that")) return std::make_pair(LpSection::Constraints, 2);
  if (w == "st" || w == "s.t." || w == "st.") return std::make_pair(LpSection::Constraints, 1);
  if (w == "bounds" || w == "bound") return std::make_pair(LpSection::Bounds, 1);
  if (w == "binaries" || w == "binary" || w == "bin") return std::make_pair(LpSection::Binaries, 1);
  if (w == "end") return std::make_pair(LpSection::End, 1);
  return std::nullopt;
}

bool is_unknown_section(const std::vector<Token>& toks, size_t i) {
  if (!toks[i].line_start) return false;
  const std::string w = lower(toks[i].text);
  static const char* known_unsupported[] = {"maximize", "maximise", "maximum", "max", "generals", "general",
                                            "gen", "semi-continuous", "semis", "semi", "sos"};
  for (const char* k : known_unsupported) {
    if (w == k) return true;
  }
  return false;
}

MilpModel read_lp(std::istream& in) {
  const auto toks = tokenize_lp(in);
  Builder b;
  LpSection sec = LpSection::None;
  size_t i = 0;
  auto fail = [&](const std::string& what, size_t at) -> void {
    throw ParseError(what, at < toks.size() ? toks[at].line : (toks.empty() ? 0 : toks.back().line));
  };

  // Linear expression: [+|-] [number] name ... until a sense token or section.
  auto parse_expr = [&](std::vector<Term>& terms, bool stop_at_sense) {
    while (i < toks.size()) {
      if (section_keyword(toks, i) || is_unknown_section(toks, i)) return;
      if (stop_at_sense && (toks[i].text == "<=" || toks[i].text == ">=" || toks[i].text == "=")) return;
      // A new "name:" label ends the expression.
      if (i + 1 < toks.size() && toks[i + 1].text == ":" && toks[i].line_start) return;
      double sign = 1.0;
      while (i < toks.size() && (toks[i].text == "+" || toks[i].text == "-")) {
        if (toks[i].text == "-") sign = -sign;
        ++i;
      }
      if (i >= toks.size()) fail("unexpected end of input in expression", i);
      double coef = 1.0;
      if (auto v = to_number(toks[i].text)) {
        coef = *v;
        ++i;
        if (i >= toks.size()) fail("coefficient without a variable", i);
        if (to_number(toks[i].text) || toks[i].text == "<=" || toks[i].text == ">=" || toks[i].text == "=") {
          fail("expected a variable name after '" + toks[i - 1].text + "'", i);
        }
      }
      const std::string& name = toks[i].text;
      if (name == ":" || name == "<=" || name == ">=" || name == "=") fail("unexpected '" + name + "'", i);
      terms.push_back({b.col(name), sign * coef});
      ++i;
    }
  };

  while (i < toks.size()) {
    if (auto kw = section_keyword(toks, i)) {
      sec = kw->first;
      i += static_cast<size_t>(kw->second);
      if (sec == LpSection::End) break;
      continue;
    }
    if (is_unknown_section(toks, i)) fail("unsupported section '" + toks[i].text + "'", i);
    switch (sec) {
      case LpSection::None:
        fail("expected 'Minimize', got '" + toks[i].text + "'", i);
        break;
      case LpSection::Objective: {
        if (i + 1 < toks.size() && toks[i + 1].text == ":") i += 2;
        std::vector<Term> terms;
        parse_expr(terms, false);
        for (const Term& t : terms) b.cols[static_cast<size_t>(t.var)].cost += t.coef;
        break;
      }
      case LpSection::Constraints: {
        Constraint c;
        if (i + 1 < toks.size() && toks[i + 1].text == ":") {
          c.name = toks[i].text;
          i += 2;
        } else {
          c.name = "R" + std::to_string(b.rows.size());
        }
        parse_expr(c.terms, true);
        if (i >= toks.size()) fail("row '" + c.name + "' has no sense", i);
        const std::string& op = toks[i].text;
        if (op == "<=") {
          c.sense = Sense::LessEqual;
        } else if (op == ">=") {
          c.sense = Sense::GreaterEqual;
        } else if (op == "=") {
          c.sense = Sense::Equal;
        } else {
          fail("row '" + c.name + "': expected a sense, got '" + op + "'", i);
        }
        ++i;
        double sign = 1.0;
        while (i < toks.size() && (toks[i].text == "+" || toks[i].text == "-")) {
          if (toks[i].text == "-") sign = -sign;
          ++i;
        }
        if (i >= toks.size()) fail("row '" + c.name + "' has no right-hand side", i);
        auto rhs = to_number(toks[i].text);
        if (!rhs) fail("row '" + c.name + "': bad right-hand side '" + toks[i].text + "'", i);
        c.rhs = sign * *rhs;
        ++i;
        if (b.row_index.count(c.name)) fail("duplicate row name '" + c.name + "'", i - 1);
        b.row_index.emplace(c.name, static_cast<int>(b.rows.size()));
        b.rows.push_back(std::move(c));
        break;
      }
      case LpSection::Bounds: {
        // Collect the tokens of this line.
        const int line = toks[i].line;
        std::vector<std::string> w;
        const size_t at = i;
        while (i < toks.size() && toks[i].line == line) w.push_back(toks[i++].text);
        // Join signs with numbers.
        std::vector<std::string> t;
        for (size_t k = 0; k < w.size(); ++k) {
          if ((w[k] == "-" || w[k] == "+") && k + 1 < w.size()) {
            t.push_back(w[k] + w[k + 1]);
            ++k;
          } else {
            t.push_back(w[k]);
          }
        }
        auto number = [&](const std::string& s) {
          auto v = to_number(s);
          if (!v) fail("bad bound value '" + s + "'", at);
          return *v;
        };
        if (t.size() == 2 && lower(t[1]) == "free") {
          const int c = b.col(t[0]);
          b.cols[static_cast<size_t>(c)].lower = -kInf;
          b.cols[static_cast<size_t>(c)].upper = kInf;
          b.mark_bounds(c);
        } else if (t.size() == 5 && t[1] == "<=" && t[3] == "<=") {
          const int c = b.col(t[2]);
          b.cols[static_cast<size_t>(c)].lower = number(t[0]);
          b.cols[static_cast<size_t>(c)].upper = number(t[4]);
          b.mark_bounds(c);
        } else if (t.size() == 3 && !to_number(t[0])) {
          const int c = b.col(t[0]);
          const double v = number(t[2]);
          if (t[1] == "<=") {
            b.cols[static_cast<size_t>(c)].upper = v;
          } else if (t[1] == ">=") {
            b.cols[static_cast<size_t>(c)].lower = v;
          } else if (t[1] == "=") {
            b.cols[static_cast<size_t>(c)].lower = b.cols[static_cast<size_t>(c)].upper = v;
          } else {
            fail("bad bound operator '" + t[1] + "'", at);
          }
          b.mark_bounds(c);
        } else if (t.size() == 3 && to_number(t[0])) {
          const int c = b.col(t[2]);
          const double v = number(t[0]);
          if (t[1] == "<=") {
            b.cols[static_cast<size_t>(c)].lower = v;
          } else if (t[1] == ">=") {
            b.cols[static_cast<size_t>(c)].upper = v;
          } else if (t[1] == "=") {
            b.cols[static_cast<size_t>(c)].lower = b.cols[static_cast<size_t>(c)].upper = v;
          } else {
            fail("bad bound operator '" + t[1] + "'", at);
          }
          b.mark_bounds(c);
        } else {
          fail("unrecognized bound", at);
        }
        break;
      }
      case LpSection::Binaries: {
        const int c = b.col(toks[i].text);
        b.cols[static_cast<size_t>(c)].integer = true;
        if (b.cols[static_cast<size_t>(c)].bounds_order < 0) {
          b.cols[static_cast<size_t>(c)].lower = 0.0;
          b.cols[static_cast<size_t>(c)].upper = 1.0;
        }
        ++i;
        break;
      }
      case LpSection::End:
        break;
    }
  }
  if (sec != LpSection::End) throw ParseError("missing 'End'", toks.empty() ? 0 : toks.back().line);
  return b.finish();
}

// ---- MPS reader --------------------------------------------------------------------

MilpModel read_mps(std::istream& in) {
  Builder b;
  std::string raw;
  int line = 0;
  std::string section;
  std::string objective;
  bool in_int = false;
  bool ended = false;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.empty() || raw[0] == '*') continue;
    std::istringstream ls(raw);
    std::vector<std::string> f;
    for (std::string w; ls >> w;) f.push_back(w);
    if (f.empty()) continue;
    if (!std::isspace(static_cast<unsigned char>(raw[0]))) {
      section = f[0];
      if (section == "NAME" || section == "ROWS" || section == "COLUMNS" || section == "RHS" ||
          section == "BOUNDS") {
        continue;
      }
      if (section == "ENDATA") {
        ended = true;
        break;
      }
      throw ParseError("unsupported MPS section '" + section + "'", line);
    }
    if (section == "ROWS") {
      if (f.size() != 2) throw ParseError("ROWS entry needs a type and a name", line);
      if (f[0] == "N") {
        if (!objective.empty()) throw ParseError("more than one objective row", line);
        objective = f[1];
        continue;
      }
      Constraint c;
      c.name = f[1];
      if (f[0] == "L") {
        c.sense = Sense::LessEqual;
      } else if (f[0] == "G") {
        c.sense = Sense::GreaterEqual;
      } else if (f[0] == "E") {
        c.sense = Sense::Equal;
      } else {
        throw ParseError("unknown row type '" + f[0] + "'", line);
      }
      if (b.row_index.count(c.name)) throw ParseError("duplicate row name '" + c.name + "'", line);
      b.row_index.emplace(c.name, static_cast<int>(b.rows.size()));
      b.rows.push_back(std::move(c));
    } else if (section == "COLUMNS") {
      if (f.size() == 3 && f[1] == "'MARKER'") {
        if (f[2] == "'INTORG'") {
          in_int = true;
        } else if (f[2] == "'INTEND'") {
          in_int = false;
        } else {
          throw ParseError("unknown marker " + f[2], line);
        }
        continue;
      }
      if (f.size() != 3 && f.size() != 5) throw ParseError("COLUMNS entry needs 3 or 5 fields", line);
      const int c = b.col(f[0]);
      if (in_int) {
        b.cols[static_cast<size_t>(c)].integer = true;
        b.cols[static_cast<size_t>(c)].upper = std::min(b.cols[static_cast<size_t>(c)].upper, 1.0);
      }
      for (size_t k = 1; k + 1 < f.size(); k += 2) {
        auto v = to_number(f[k + 1]);
        if (!v) throw ParseError("bad number '" + f[k + 1] + "'", line);
        if (f[k] == objective) {
          b.cols[static_cast<size_t>(c)].cost = *v;
          continue;
        }
        auto it = b.row_index.find(f[k]);
        if (it == b.row_index.end()) throw ParseError("unknown row '" + f[k] + "'", line);
        b.rows[static_cast<size_t>(it->second)].terms.push_back({c, *v});
      }
    } else if (section == "RHS") {
      if (f.size() != 3 && f.size() != 5) throw ParseError("RHS entry needs 3 or 5 fields", line);
      for (size_t k = 1; k + 1 < f.size(); k += 2) {
        auto v = to_number(f[k + 1]);
        if (!v) throw ParseError("bad number '" + f[k + 1] + "'", line);
        if (f[k] == objective) continue;
        auto it = b.row_index.find(f[k]);
        if (it == b.row_index.end()) throw ParseError("unknown row '" + f[k] + "'", line);
        b.rows[static_cast<size_t>(it->second)].rhs = *v;
      }
    } else if (section == "BOUNDS") {
      if (f.size() < 3) throw ParseError("BOUNDS entry too short", line);
      const std::string& type = f[0];
      auto it = b.col_index.find(f[2]);
      if (it == b.col_index.end()) throw ParseError("unknown column '" + f[2] + "'", line);
      auto& c = b.cols[static_cast<size_t>(it->second)];
      b.mark_bounds(it->second);
      auto value = [&]() {
        if (f.size() < 4) throw ParseError("bound '" + type + "' needs a value", line);
        auto v = to_number(f[3]);
        if (!v) throw ParseError("bad number '" + f[3] + "'", line);
        return *v;
      };
      if (type == "LO") {
        c.lower = value();
      } else if (type == "UP") {
        c.upper = value();
      } else if (type == "FX") {
        c.lower = c.upper = value();
      } else if (type == "FR") {
        c.lower = -kInf;
        c.upper = kInf;
      } else if (type == "MI") {
        c.lower = -kInf;
      } else if (type == "PL") {
        c.upper = kInf;
      } else if (type == "BV") {
        c.lower = 0.0;
        c.upper = 1.0;
        c.integer = true;
      } else {
        throw ParseError("unsupported bound type '" + type + "'", line);
      }
    } else {
      throw ParseError("data line outside a section", line);
    }
  }
  if (!ended) throw ParseError("missing ENDATA", line);
  return b.finish();
}

}  // namespace

ModelFormat parse_model_format(const std::string& text) {
  const std::string l = lower(text);
  if (l == "lp") return ModelFormat::Lp;
  if (l == "mps") return ModelFormat::Mps;
  throw ValidationError("unknown model format '" + text + "' (expected lp or mps)");
}

void export_model(std::ostream& out, const MilpModel& model, ModelFormat format) {
  if (format == ModelFormat::Lp) {
    write_lp(out, model);
  } else {
    write_mps(out, model);
  }
}

std::string export_model(const MilpModel& model, ModelFormat format) {
  std::ostringstream out;
  export_model(out, model, format);
  return out.str();
}

MilpModel import_model(std::istream& in, ModelFormat format) {
  return format == ModelFormat::Lp ? read_lp(in) : read_mps(in);
}

MilpModel import_model(const std::string& text, ModelFormat format) {
  std::istringstream in(text);
  return import_model(in, format);
}

}  // namespace kinomesh

#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "brute_force.hpp"
#include "fixture_models.hpp"
#include "kinomesh/error.hpp"
#include "kinomesh/model_io.hpp"
#include "kinomesh/simplex.hpp"
#include "meshes.hpp"

using namespace kinomesh;

namespace {

using testing::grid_model;
using testing::two_node_model;

void check_fixpoint(const MilpModel& m, ModelFormat f) {
  const std::string first = export_model(m, f);
  const MilpModel back = import_model(first, f);
  CHECK(back.same_as(m));
  CHECK(export_model(back, f) == first);
}

}  // namespace

TEST_CASE("two-node model as LP text") {
  const std::string lp = export_model(two_node_model(), ModelFormat::Lp);
  for (const char* section : {"Minimize", "Subject To", "Bounds", "Binaries", "End"}) {
    CHECK(lp.find(section) != std::string::npos);
  }
  const size_t bin = lp.find("Binaries");
  CHECK(lp.find("x_e0", bin) != std::string::npos);
  CHECK(lp.find("x_e1", bin) != std::string::npos);
}

TEST_CASE("export import export is a fixpoint") {
  for (ModelFormat f : {ModelFormat::Lp, ModelFormat::Mps}) {
    check_fixpoint(two_node_model(), f);
    check_fixpoint(grid_model(1, false), f);
    check_fixpoint(grid_model(2, true), f);
    std::mt19937_64 rng(12);
    for (int t = 0; t < 30; ++t) check_fixpoint(testing::random_model(rng, 6, 5, 3), f);
  }
}

TEST_CASE("imported planner model keeps its layout") {
  const MilpModel m = grid_model(5, false);
  for (ModelFormat f : {ModelFormat::Lp, ModelFormat::Mps}) {
    const MilpModel back = import_model(export_model(m, f), f);
    CHECK(back.layout().x == m.layout().x);
    CHECK(back.layout().s == m.layout().s);
    CHECK(back.layout().v_node == m.layout().v_node);
    CHECK(back.layout().start_node == m.layout().start_node);
  }
}

TEST_CASE("hand-written LP file") {
  const std::string text = R"(\ a small test
minimize
 cost: 2 x + 3 y - z
subject to
 c1: x + y >= 1
 c2: - 0.5 y + z <= 0
 x - y = 0
bounds
 0 <= x <= 4
 y <= 3
 z free
 -1 <= w <= 1
binaries
 w
end
)";
  const MilpModel m = import_model(text, ModelFormat::Lp);
  REQUIRE(m.num_vars() == 4);
  CHECK(m.variables()[0].name == "x");
  CHECK(m.variables()[2].lower == -kInf);
  CHECK(m.variables()[3].integer);
  CHECK(m.variables()[3].lower == -1.0);
  CHECK(m.rows()[2].name == "R2");
  CHECK(m.rows()[2].sense == Sense::Equal);
  // x = y = 0.5, z = 0.25 is optimal: 2.5 - 0.25.
  const LpResult r = solve_lp(m);
  REQUIRE(r.status == LpStatus::Optimal);
  CHECK(r.objective == doctest::Approx(2.25));
}

TEST_CASE("whitespace and comments do not change the model") {
  const MilpModel m = grid_model(3, false);
  std::string lp = export_model(m, ModelFormat::Lp);
  std::string noisy;
  std::mt19937_64 rng(6);
  for (char c : lp) {
    if (c == ' ') {
      noisy += std::string(1 + rng() % 3, rng() % 2 ? ' ' : '\t');
    } else if (c == '\n') {
      noisy += rng() % 4 == 0 ? "  \\ note\n\n" : "\n";
    } else {
      noisy += c;
    }
  }
  CHECK(import_model(noisy, ModelFormat::Lp).same_as(m));

  std::string mps = export_model(m, ModelFormat::Mps);
  std::string spaced;
  for (char c : mps) spaced += c == '\n' ? "   \n" : std::string(1, c);
  CHECK(import_model(spaced, ModelFormat::Mps).same_as(m));
}

TEST_CASE("unsupported input is rejected with a line number") {
  try {
    import_model("Minimize\n obj: x\nSubject To\n c: x >= 1\nGenerals\n x\nEnd\n", ModelFormat::Lp);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  CHECK_THROWS_AS(import_model("Maximize\n obj: x\nEnd\n", ModelFormat::Lp), ParseError);
  CHECK_THROWS_AS(import_model("Minimize\n obj: x\nSubject To\n c: x >= 1\n", ModelFormat::Lp), ParseError);
  CHECK_THROWS_AS(import_model("NAME t\nROWS\n N obj\nRANGES\nENDATA\n", ModelFormat::Mps), ParseError);
  CHECK_THROWS_AS(import_model("NAME t\nROWS\n N obj\nCOLUMNS\n x nope 1\nENDATA\n", ModelFormat::Mps), ParseError);
  CHECK_THROWS_AS(parse_model_format("xml"), ValidationError);
  CHECK(parse_model_format("MPS") == ModelFormat::Mps);
}

TEST_CASE("golden model files") {
  const std::string dir = std::string(KINOMESH_SOURCE_DIR) + "/tests/golden/";
  for (const auto& [name, model] : testing::golden_models()) {
    for (ModelFormat f : {ModelFormat::Lp, ModelFormat::Mps}) {
      const std::string path = dir + name + (f == ModelFormat::Lp ? ".lp" : ".mps");
      std::ifstream in(path);
      REQUIRE_MESSAGE(in.good(), path);
      std::stringstream ss;
      ss << in.rdbuf();
      CHECK_MESSAGE(export_model(model, f) == ss.str(), path);
      CHECK(import_model(ss.str(), f).same_as(model));
    }
  }
}

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "valtree/cli.hpp"
#include "valtree/jsonio.hpp"

using namespace valtree;

namespace {

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli_run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("invariants of a branch from the command line") {
  auto r = run({"invariants", "--branch", "n=2; y=t^3"});
  CHECK(r.code == 0);
  CHECK(r.out.find("kind: curve") != std::string::npos);
  CHECK(r.out.find("skewness: inf") != std::string::npos);
  CHECK(r.out.find("multiplicity: 2") != std::string::npos);
  CHECK(r.out.find("curve semigroup (x 2): 2 3") != std::string::npos);
}

TEST_CASE("desing emits dot with the cusp weights") {
  auto r = run({"desing", "--branch", "n=2; y=t^3", "--dot"});
  CHECK(r.code == 0);
  CHECK(r.out.find("E0 (2,1)") != std::string::npos);
  CHECK(r.out.find("E1 (3,1)") != std::string::npos);
  CHECK(r.out.find("E2 (5,2)") != std::string::npos);
}

TEST_CASE("mult computes e from the ideal string") {
  auto r = run({"mult", "--ideal", "x^2, y^3"});
  CHECK(r.code == 0);
  CHECK(r.out == "6\n");

  auto r2 = run({"mult", "--ideal", "m^2", "--ideal2", "m^3"});
  CHECK(r2.code == 0);
  CHECK(r2.out == "6\n");
}

TEST_CASE("eval and wedge verbs") {
  auto r = run({"eval", "--branch", "n=2; y=t^3", "--poly", "y^2 - x^3"});
  CHECK(r.code == 0);
  CHECK(r.out == "inf\n");

  auto w = run({"wedge", "--branch", "n=2; y=t^3", "--branch", "n=1; y=0"});
  CHECK(w.code == 0);
  CHECK(w.out.find("3/2") != std::string::npos);
}

TEST_CASE("closure membership") {
  auto yes = run({"closure", "--ideal", "x^2, y^2", "--poly", "x*y"});
  CHECK(yes.code == 0);
  CHECK(yes.out == "member\n");
  auto no = run({"closure", "--ideal", "x^2, y^2", "--poly", "x"});
  CHECK(no.code == 0);
  CHECK(no.out == "not a member\n");
}

TEST_CASE("exit codes distinguish usage and domain errors") {
  auto usage = run({"nonsense-verb"});
  CHECK(usage.code == 2);

  auto missing = run({"eval", "--poly", "x"});
  CHECK(missing.code == 2);

  auto domain = run({"invariants", "--branch", "n=2; y=t^4"});  // not primitive
  CHECK(domain.code == 1);
  CHECK(domain.err.find("error") != std::string::npos);

  auto syntax = run({"eval", "--branch", "n=2; y=t^3", "--poly", "x + "});
  CHECK(syntax.code == 1);
  CHECK(syntax.err.find("offset 4") != std::string::npos);
}

TEST_CASE("json round trips through the schemas") {
  // SKP
  auto r = run({"skp", "--branch", "n=2; y=t^3+t^5", "--json"});
  CHECK(r.code == 0);
  Json j = Json::parse(r.out);
  CHECK(j["schema"] == "skp.v1");
  Skp s = skp_from_json(j);
  CHECK(skp_to_json(s) == j);

  // measures
  auto m = run({"ideal-factor", "--ideal", "x^2, y^3", "--json"});
  Json jm = Json::parse(m.out);
  AtomicMeasure rho = measure_from_json(jm["measure"]);
  CHECK(measure_to_json(rho) == jm["measure"]);

  // equisingularity data: emit from branches, read back, desing agrees
  EquisingData data;
  data.branches.push_back({"C", 2, {Rat(Int(5), Int(2))}});
  Json je = equising_to_json(data);
  EquisingData back = equising_from_json(je);
  CHECK(minimal_desing_from_equising(back).canonical_string() ==
        minimal_desing_from_equising(data).canonical_string());

  // ideals
  IdealSpec spec;
  spec.branches = {axis_branch(true), axis_branch(false),
                   make_branch("C1", BranchParam::parse("n=2; y=t^3"))};
  spec.generators = {parse_generator("x^2*C1", spec.branches),
                     parse_generator("y^3", spec.branches)};
  Json ji = ideal_to_json(spec);
  IdealSpec back2 = ideal_from_json(ji);
  CHECK(laplacian(tree_transform(back2)) == laplacian(tree_transform(spec)));
}

TEST_CASE("desing-equi consumes an equi file") {
  std::string path = "/tmp/valtree_equi_test.json";
  {
    EquisingData data;
    data.branches.push_back({"C1", 2, {Rat(Int(5), Int(2))}});
    data.branches.push_back({"C2", 2, {Rat(Int(5), Int(2))}});
    data.contacts[{0, 1}] = Rat(Int(7), Int(2));
    std::ofstream f(path);
    f << equising_to_json(data).dump(2);
  }
  auto r = run({"desing-equi", "--equi", path});
  CHECK(r.code == 0);
  CHECK(r.out.find("(7,2)") != std::string::npos);
  CHECK(r.out.find("C1 -> E4") != std::string::npos);
}

TEST_CASE("classmeasure emits named-vertex measures") {
  auto r = run({"classmeasure", "--branch", "n=2; y=t^3", "--vertex", "2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("2 * [") != std::string::npos);
  CHECK(r.out.find("-1 * [") != std::string::npos);
}

TEST_CASE("eval from an SKP document") {
  std::string path = "/tmp/valtree_skp_test.json";
  {
    auto r = run({"skp", "--branch", "n=2; y=t^3", "--json"});
    std::ofstream f(path);
    f << r.out;
  }
  auto r = run({"eval", "--skp", path, "--poly", "y"});
  CHECK(r.code == 0);
  CHECK(r.out == "3/2\n");
}

TEST_CASE("truncation cap can be configured") {
  auto r = run({"invariants", "--branch", "n=2; y=t^3", "--trunc", "64"});
  CHECK(r.code == 0);
  setenv("VALTREE_TRUNC", "128", 1);
  auto r2 = run({"invariants", "--branch", "n=2; y=t^3"});
  unsetenv("VALTREE_TRUNC");
  CHECK(r2.code == 0);
  CHECK(r.out == r2.out);
}

TEST_CASE("equi file drives eggers and dot output") {
  std::string path = "/tmp/valtree_equi_test2.json";
  {
    EquisingData data;
    data.branches.push_back({"C1", 2, {Rat(Int(5), Int(2))}});
    std::ofstream f(path);
    f << equising_to_json(data).dump(2);
  }
  auto r = run({"eggers", "--equi", path});
  CHECK(r.code == 0);
  CHECK(r.out.find("3/2") != std::string::npos);
  auto d = run({"desing-equi", "--equi", path, "--dot"});
  CHECK(d.code == 0);
  CHECK(d.out.find("E2 (5,2)") != std::string::npos);
}

TEST_CASE("byte stability of representative outputs") {
  std::vector<std::vector<std::string>> commands = {
      {"invariants", "--branch", "n=3; y=t^4+t^5"},
      {"desing", "--branch", "n=4; y=t^6+t^7", "--json"},
      {"ideal-factor", "--ideal", "x^3, x*y, y^2"},
  };
  for (auto& cmd : commands) {
    auto a = run(cmd), b = run(cmd);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
}

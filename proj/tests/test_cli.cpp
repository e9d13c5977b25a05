#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli_app.hpp"
#include "doctest.h"
#include "json.hpp"

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "graphforms");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = graphforms::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string corpus(const std::string& name) {
  return std::string(GRAPHFORMS_CORPUS_DIR) + "/" + name + ".graph";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("symanzik of the theta graph") {
  const Result r = run({"symanzik", corpus("theta")});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "psi: a1*a2 + a1*a3 + a2*a3\n"));
}

TEST_CASE("main suite on the dunce's cap reports the ratio -1/4") {
  const Result r = run({"verify", "--suite", "main", corpus("dunce_cap"), "--tree", "2,4"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "ratio: -1/4\n"));
}

TEST_CASE("phi of the triangle is zero with a note") {
  const Result r = run({"phi", corpus("triangle")});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "expression: 0\n"));
  CHECK(contains(r.out, "odd loop number"));
}

TEST_CASE("every suite passes on the bundled corpus") {
  for (const auto& entry : std::filesystem::directory_iterator(GRAPHFORMS_CORPUS_DIR)) {
    INFO(entry.path().string());
    const Result r = run({"verify", "--suite", "all", entry.path().string()});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "checks_failed: 0\n"));
  }
}

TEST_CASE("output is reproducible and both modes carry the same fields") {
  const std::vector<std::string> args{"verify", "--suite", "forms", corpus("double_triangle")};
  const Result a = run(args);
  const Result b = run(args);
  CHECK(a.out == b.out);
  std::vector<std::string> json_args{"--output", "json"};
  json_args.insert(json_args.end(), args.begin(), args.end());
  const Result j = run(json_args);
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::ordered_json::parse(j.out);
  CHECK(doc["passed"] == true);
  for (const auto& [key, value] : doc.items()) CHECK(contains(a.out, key + ":"));
}

TEST_CASE("Monte Carlo runs are reproducible for a fixed seed") {
  const std::vector<std::string> args{"--seed", "7", "dipole", "--i", "2", "--integrate", "--scheme",
                                      "monte_carlo", "--samples", "200000", "--tolerance", "0.05"};
  const Result a = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == run(args).out);
  CHECK(contains(a.out, "seed: 7\n"));
}

TEST_CASE("dipole closed form and quadrature") {
  const Result r = run({"dipole", "--i", "1", "--integrate"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "closed form = Pfaffian route"));
}

TEST_CASE("dodgson accepts vertex indices") {
  const Result edges = run({"dodgson", "--a", "1", "--b", "3", corpus("dunce_cap")});
  CHECK(edges.code == 0);
  CHECK(contains(edges.out, "dodgson: -a4\n"));
  const Result vertex = run({"dodgson", "--a", "v1", "--b", "v1", corpus("dunce_cap")});
  CHECK(vertex.code == 0);
  const Result star = run({"dodgson", "--a", "v3", "--b", "1", corpus("dunce_cap")});
  CHECK(star.code == 2);
}

TEST_CASE("subdivide reports the new graph") {
  const Result r = run({"subdivide", "--edge", "1", corpus("theta")});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "subdivided_graph: [e 1 2 1, e 2 1 3, e 3 2 3, e 4 2 3, vstar 3]"));
}

TEST_CASE("input errors exit with status 2") {
  CHECK(run({"alpha", "/nonexistent/graph"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"phi", corpus("dunce_cap"), "--tree", "1,2,3"}).code == 2);
  CHECK(run({"phi", corpus("dunce_cap"), "--basis", "1,0;0,1"}).code == 2);
  CHECK(run({"phi", corpus("theta"), "--basis", "1,0;0,1;-1,-1"}).code == 0);
  CHECK(run({"phi", corpus("theta"), "--format", "json"}).code == 2);
  CHECK(run({"--max-loops", "0", "alpha", corpus("theta")}).code == 2);
  CHECK(run({"--max-loops", "2", "alpha", corpus("dipole5")}).code == 2);
  CHECK(run({"subdivide", "--edge", "9", corpus("theta")}).code == 2);
}

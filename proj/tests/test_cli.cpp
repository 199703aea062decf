#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "eqhms/cli.hpp"

using json = nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = eqhms::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(EQHMS_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("mirror") {
  auto r = run({"mirror", "--geometry", "cp1", "--lambda", R"({"terms":[[1,1,1,0]],"precision":[6,1]})"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["rows"].size() == 2);
  CHECK(r.doc()["precision"] == json::array({6, 1}));

  r = run({"mirror", "--geometry", "c", "--lambda", "T"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["rows"].size() == 1);

  r = run({"mirror", "--geometry", "cp1", "--lambda", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Lagrangians collapse") != std::string::npos);

  // Degenerate point without the flag.
  CHECK(run({"mirror", "--lambda", "2iT^{1/2}", "--precision", "2"}).code == 2);
  r = run({"mirror", "--lambda", "2iT^{1/2}", "--precision", "2", "--degenerate"});
  CHECK(r.code == 0);
  CHECK(r.doc()["degenerate"] == true);

  CHECK(run({"mirror", "--lambda", "T^{"}).code == 1);
  CHECK(run({"mirror", "--geometry", "cp2", "--lambda", "T"}).code == 1);
  CHECK(run({"mirror", "--lambda", "T", "--precision", "-1"}).code == 1);
  CHECK(run({"mirror"}).code == 1);
}

TEST_CASE("output is byte stable") {
  std::vector<std::string> args{"mirror", "--lambda", "T^{1/4}", "--precision", "2"};
  auto a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("tropical") {
  auto r = run({"tropical", "--fan", data("p2.json"), "--lambda-vec", "[T^{1/4},2T^{1/4}]"});
  REQUIRE(r.code == 0);
  auto d = r.doc();
  CHECK(d["critical_points"].size() == 3);
  CHECK(d["jacobian_count"]["count"] == 3);
  CHECK(d["jacobian_count"]["equal"] == true);
  CHECK(d["epsilon_P"] == json::array({1, 3}));
  for (const auto& pt : d["critical_points"]) CHECK(pt["lift"]["nondegenerate"] == true);

  // Equal entries put lambda^sigma = 0 on one cone.
  r = run({"tropical", "--fan", data("p2.json"), "--lambda-vec", "[T^{1/4},T^{1/4}]"});
  CHECK(r.code == 2);

  r = run({"tropical", "--fan", "c", "--lambda-vec", "[T]"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["epsilon_P"] == "inf");

  CHECK(run({"tropical", "--fan", "p2", "--lambda-vec", "[T]"}).code == 1);
  CHECK(run({"tropical", "--fan", R"({"n":1,"rays":[[2],[-1]],"max_cones":[[0],[1]],"phi":[0,1]})", "--lambda-vec", "[T]"})
            .code == 1);
  CHECK(run({"tropical", "--fan", "/nonexistent.json", "--lambda-vec", "[T]"}).code == 1);
}

TEST_CASE("mf") {
  auto r = run({"mf", "verify", "--input", data("koszul_x2.json")});
  REQUIRE(r.code == 0);
  CHECK(r.doc() == json{{"ok", true}});

  r = run({"mf", "verify", "--input", R"({"vars":["x"],"w":"x^2","phi":[["x"]],"psi":[["x^2"]]})"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["ok"] == false);

  r = run({"mf", "stabilize", "--input", R"({"vars":["x","y"],"f":["x","y"],"w_list":["x","y"]})"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["ok"] == true);
  CHECK(r.doc()["phi"].size() == 2);

  r = run({"mf", "homdim", "--input", R"({"vars":["x"],"source":{"f":["x"],"w_list":["x"]}})", "--jet-order", "3"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["even"] == 1);
  CHECK(r.doc()["odd"] == 1);

  CHECK(run({"mf", "verify", "--input", "{not json"}).code == 1);
  CHECK(run({"mf", "homdim", "--input", data("koszul_x2.json"), "--jet-order", "0"}).code == 1);
  CHECK(run({"mf"}).code == 1);
}

TEST_CASE("check") {
  auto r = run({"check", "ainfty", "--input", data("mirror_cp1.json")});
  REQUIRE(r.code == 0);
  auto d = r.doc();
  CHECK(d["pass"] == true);
  REQUIRE(!d["relations"].empty());
  for (const auto& row : d["relations"]) CHECK(row["residual"] == 0.0);

  r = run({"check", "cartan", "--input", R"({"space":"circle_free","lie_algebra":"u1"})"});
  REQUIRE(r.code == 0);
  d = r.doc();
  CHECK(d["cartan"]["0"] == 1);
  CHECK(d["cartan"]["1"] == 0);
  CHECK(d["weil"]["0"] == 1);
  CHECK(d["mathai_quillen"]["intertwines"] == true);

  r = run({"check", "cartan", "--input", R"({"space":"circle_trivial","lie_algebra":"u1"})"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["cartan"]["2"] == 1);

  r = run({"check", "gdiff", "--input", R"({"space":"chevalley_eilenberg","lie_algebra":"so3"})"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["pass"] == true);

  r = run({"check", "gdiff", "--input", data("mirror_cp1.json")});
  REQUIRE(r.code == 0);

  CHECK(run({"check", "gdiff", "--input", R"({"space":"torus"})"}).code == 1);
}

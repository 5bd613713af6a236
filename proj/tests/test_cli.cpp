#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <string>

#include <json.hpp>

#ifndef ENDSUM_CLI_PATH
#error "ENDSUM_CLI_PATH must point at the endsum binary"
#endif
#ifndef ENDSUM_FIXTURE_DIR
#error "ENDSUM_FIXTURE_DIR must point at the fixture directory"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd =
      env_prefix + (env_prefix.empty() ? "" : " ") + ENDSUM_CLI_PATH + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 512> buf;
  while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fx(const std::string& name) {
  return std::string(ENDSUM_FIXTURE_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("classify prints human and json reports") {
  auto r = run_cli("classify " + fx("plane.srf"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("genus 0") != std::string::npos);
  CHECK(r.output.find("pt(0,or)") != std::string::npos);

  auto j = run_cli("classify --json " + fx("lochness.srf"));
  CHECK(j.exit_code == 0);
  auto parsed = nlohmann::json::parse(j.output);
  const auto& comp = parsed["surfaces"][0]["components"][0];
  CHECK(comp["orientable"] == true);
  CHECK(comp["genus"]["infinite"] == true);
  CHECK(comp["parity"] == "even");
  CHECK(comp["boundary"] == 0);
  CHECK(comp["connected"] == true);
  CHECK(comp["ends"]["kind"] == "pt");
  CHECK(comp["ends"]["label"]["genus"] == "inf");
}

TEST_CASE("ends --census reports the graph oracle") {
  auto r = run_cli("ends --census " + fx("cantor_tree.srf"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("cantor(0,or)") != std::string::npos);
  CHECK(r.output.find("cantor-like") != std::string::npos);
}

TEST_CASE("endsum produces the punctured torus from the annulus") {
  auto r = run_cli("endsum " + fx("annulus.srf") + " --end c.a1 --end c.a2 --json");
  REQUIRE(r.exit_code == 0);
  auto parsed = nlohmann::json::parse(r.output);
  CHECK(parsed["oracle"]["verdict"] == "agree");
  const auto& comp = parsed["predicted"][0];
  CHECK(comp["orientable"] == true);
  CHECK(comp["genus"]["doubled"] == 2);
  CHECK(comp["parity"] == "even");
  CHECK(comp["boundary"] == 0);
}

TEST_CASE("endsum --non-oriented produces the punctured Klein bottle") {
  auto r = run_cli("endsum " + fx("annulus.srf") + " --end c.a1 --end c.a2 --non-oriented --json");
  REQUIRE(r.exit_code == 0);
  auto parsed = nlohmann::json::parse(r.output);
  CHECK(parsed["oracle"]["verdict"] == "agree");
  const auto& comp = parsed["predicted"][0];
  CHECK(comp["orientable"] == false);
  CHECK(comp["genus"]["doubled"] == 2);
  CHECK(comp["parity"] == "even");
}

TEST_CASE("deep end paths address individual ends of a fork anchor") {
  // The fork anchor presents union(pt(0,or), pt(inf,or)); index 0 picks the
  // planar end. The construction declines (nonlinear) but the prediction
  // and the exhaustion oracle still answer.
  auto r = run_cli("endsum " + fx("fork.srf") + " --end c.fork.0 --end c.lin --json");
  REQUIRE(r.exit_code == 0);
  auto parsed = nlohmann::json::parse(r.output);
  CHECK(parsed["oracle"]["verdict"] == "agree");
  CHECK(parsed["oracle"]["combinatorial"].is_null());
  CHECK(parsed["oracle"]["exhaustion"] == true);
  CHECK(parsed["descriptor"].is_null());
  CHECK(parsed["predicted"][0]["ends"]["kind"] == "union");
  CHECK(parsed["predicted"][0]["ends"]["parts"].size() == 2);

  // An index past the addressable ends is an input error.
  auto bad = run_cli("endsum " + fx("fork.srf") + " --end c.fork.7 --end c.lin");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("same-end attachment exits with the input-error code") {
  auto r = run_cli("endsum " + fx("plane.srf") + " --end c.a1 --end c.a1");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("distinct") != std::string::npos);
}

TEST_CASE("iso exit codes distinguish the verdicts") {
  auto same = run_cli("iso " + fx("plane.srf") + " " + fx("plane_period3.srf"));
  CHECK(same.exit_code == 0);
  CHECK(same.output.find("isomorphic") == 0);

  auto diff = run_cli("iso " + fx("punctured_torus.srf") + " " + fx("punctured_klein.srf"));
  CHECK(diff.exit_code == 1);
  CHECK(diff.output.find("not isomorphic") != std::string::npos);
  CHECK(diff.output.find("orientability") != std::string::npos);

  auto missing = run_cli("iso " + fx("plane.srf") + " /nonexistent.srf");
  CHECK(missing.exit_code == 2);
}

TEST_CASE("verify passes on the two-planes end sum") {
  auto r = run_cli("verify " + fx("two_planes.srf") + " --end 0.a1 --end 1.a1 --trials 2 --seed 7");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("all checks passed") != std::string::npos);
}

TEST_CASE("ENDSUM_SEED environment variable overrides --seed") {
  const std::string args =
      "verify " + fx("two_planes.srf") + " --end 0.a1 --end 1.a1 --trials 1 --seed 3 --json";
  auto plain = run_cli(args);
  REQUIRE(plain.exit_code == 0);
  CHECK(nlohmann::json::parse(plain.output)["seed"] == 3);

  auto with_env = run_cli(args, "ENDSUM_SEED=99");
  REQUIRE(with_env.exit_code == 0);
  CHECK(nlohmann::json::parse(with_env.output)["seed"] == 99);
}

TEST_CASE("unsupported shapes exit with code 3") {
  // A branching cycle region that emits its own ends is outside the
  // supported class for classification. Scratch file in the test's working
  // directory.
  const std::string path = "unsupported_tmp.srf";
  {
    FILE* f = fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    fputs("surface unsupported {\n"
          "  component {\n"
          "    core { genus2 0; orientable true; boundary 0; anchors [a1]; }\n"
          "    chain a1 {\n"
          "      node b0 { genus2 0; orientable true; children [b0 b0 r0]; }\n"
          "      node r0 { genus2 0; orientable true; children [r0]; }\n"
          "      start b0;\n"
          "    }\n"
          "  }\n"
          "}\n",
          f);
    fclose(f);
  }
  auto r = run_cli("classify " + path);
  CHECK(r.exit_code == 3);

  // The bare ends question has no answer either, but the graph-ends census
  // remains available as the fallback.
  auto bare = run_cli("ends " + path);
  CHECK(bare.exit_code == 3);
  auto census = run_cli("ends --census " + path);
  CHECK(census.exit_code == 0);
  CHECK(census.output.find("cantor-like") != std::string::npos);

  std::remove(path.c_str());
}

TEST_CASE("parse diagnostics exit with the input-error code") {
  const std::string path = "broken_tmp.srf";
  {
    FILE* f = fopen(path.c_str(), "w");
    REQUIRE(f != nullptr);
    fputs("surface broken { component { core { genus2 oops; } } }\n", f);
    fclose(f);
  }
  auto r = run_cli("classify " + path);
  CHECK(r.exit_code == 2);
  CHECK(r.output.find(":1:") != std::string::npos);  // line 1 span
  std::remove(path.c_str());
}

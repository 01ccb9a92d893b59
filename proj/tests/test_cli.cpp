#include "doctest.h"

#include "collapse/errors.hpp"
#include "collapse/scenarios.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace collapse;
using namespace collapse::cli;

namespace {

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigInvalid& e) {
    return e.what();
  }
  return "";
}

const Artifact& artifact(const ScenarioResult& r, const std::string& file) {
  for (const auto& a : r.artifacts)
    if (a.file == file) return a;
  FAIL("missing artifact " << file);
  throw std::logic_error("unreachable");
}

std::vector<std::vector<std::string>> rows(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}

}  // namespace

TEST_CASE("scenario listing") {
  const auto& list = list_scenarios();
  CHECK(list.size() >= 10);
  for (std::size_t i = 1; i < list.size(); ++i) CHECK(list[i - 1].name < list[i].name);
  auto has = [&](const std::string& n) {
    return std::any_of(list.begin(), list.end(), [&](const ScenarioInfo& s) { return s.name == n; });
  };
  for (const char* n : {"heisenberg", "gt-family", "mapping-torus", "ex-2-6-1", "ex-2-6-2", "torus-bundle", "tore-ex1",
                        "tore-ex2", "flat-threshold", "euler-bound", "vol-bound"})
    CHECK(has(n));
  CHECK_THROWS_AS(find_scenario("nope"), ScenarioUnknown);
  CHECK_THROWS_AS(make_config("nope"), ScenarioUnknown);
}

TEST_CASE("config validation names the key") {
  CHECK(message_of([] { make_config("heisenberg", Json::parse(R"({"params":{"bogus":1}})")); }).rfind("bogus:", 0) == 0);
  CHECK(message_of([] { make_config("heisenberg", Json::parse(R"({"params":{"tolerance":"x"}})")); }).rfind("tolerance:", 0) == 0);
  CHECK(message_of([] { make_config("heisenberg", Json::parse(R"({"extra":1})")); }).rfind("extra:", 0) == 0);
  CHECK(message_of([] { make_config("heisenberg", Json::parse(R"({"seed":-3})")); }).rfind("seed:", 0) == 0);
  CHECK(message_of([] { make_config("heisenberg", Json::parse(R"({"scenario":"gt-family"})")); }).rfind("scenario:", 0) == 0);

  auto c = make_config("heisenberg", Json::parse(R"({"params":{"tolerance":-1}})"));
  CHECK(message_of([&] { evaluate(c); }).rfind("tolerance:", 0) == 0);
  c = make_config("mapping-torus", Json::parse(R"({"params":{"B":"1 2\n3"}})"));
  CHECK(message_of([&] { evaluate(c); }).rfind("B:", 0) == 0);
  c = make_config("torus-bundle", Json::parse(R"({"params":{"a":[0,0]}})"));
  CHECK(message_of([&] { evaluate(c); }).rfind("a:", 0) == 0);
  c = make_config("tore-ex2", Json::parse(R"({"params":{"alpha":["1/2","x",0]}})"));
  CHECK(message_of([&] { evaluate(c); }).rfind("alpha[1]:", 0) == 0);

  c = make_config("heisenberg");
  CHECK(message_of([&] { override_eps_grid(c, {0.5, 1.5}); evaluate(c); }).rfind("eps_grid:", 0) == 0);
  auto r = make_config("ex-2-6-2");
  CHECK(message_of([&] { override_eps_grid(r, {0.5}); }).rfind("eps_grid:", 0) == 0);
  CHECK(parse_eps_list("0.5,0.25,1") == std::vector<double>{0.5, 0.25, 1});
  CHECK(message_of([] { parse_eps_list("0.5,,1"); }).rfind("eps_grid:", 0) == 0);
  CHECK(message_of([] { parse_eps_list("0.5x"); }).rfind("eps_grid:", 0) == 0);
}

TEST_CASE("matrix parameters accept text blocks and arrays") {
  const auto a = evaluate(make_config("mapping-torus", Json::parse(R"({"params":{"B":"0 1\n0 0","frames":3}})")));
  const auto b = evaluate(make_config("mapping-torus", Json::parse(R"({"params":{"B":[[0,1],[0,0]],"frames":3}})")));
  CHECK(a.artifacts.size() == b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) CHECK(a.artifacts[i].content == b.artifacts[i].content);
  const auto c = evaluate(make_config("mapping-torus", Json::parse(R"({"params":{"B":"0 1; 0 0","frames":3}})")));
  CHECK(c.artifacts.front().content == a.artifacts.front().content);
}

TEST_CASE("heisenberg scenario") {
  const auto r = evaluate(make_config("heisenberg", Json::parse(R"({"params":{"exponents":[[1,1,3]]}})")));
  CHECK(r.manifest.pass());
  const auto t = rows(artifact(r, "heisenberg.csv").content);
  REQUIRE(t.size() == 4);
  CHECK(t[0][4] == "lambda");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double eps = std::stod(t[i][3]), lam = std::stod(t[i][4]);
    CHECK(lam == doctest::Approx(eps * eps).epsilon(1e-10));
  }
}

TEST_CASE("zero monodromy gives zero spectra") {
  const auto r = evaluate(make_config("mapping-torus", Json::parse(R"({"params":{"B":"0 0\n0 0"}})")));
  CHECK(r.manifest.pass());
  const auto t = rows(artifact(r, "collapse_k0.csv").content);
  for (std::size_t i = 1; i < t.size(); ++i)
    for (std::size_t j = 4; j < t[i].size(); ++j) CHECK(t[i][j] == "0");
}

TEST_CASE("scenario checks fail when tolerances are impossible") {
  const auto r = evaluate(make_config("heisenberg", Json::parse(R"({"params":{"tolerance":1e-30}})")));
  CHECK_FALSE(r.manifest.pass());
}

TEST_CASE("every scenario passes with defaults and is deterministic") {
  for (const auto& info : list_scenarios()) {
    CAPTURE(info.name);
    const auto c = make_config(info.name);
    const auto a = evaluate(c), b = evaluate(c);
    CHECK(a.manifest.pass());
    CHECK(a.manifest.to_json() == b.manifest.to_json());
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) CHECK(a.artifacts[i].content == b.artifacts[i].content);
    CHECK(a.manifest.artifacts.size() == a.artifacts.size());
  }
}

TEST_CASE("seed and config hash") {
  auto a = make_config("euler-bound");
  auto b = a;
  b.seed = 99;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a) == config_hash(make_config("euler-bound")));
  CHECK(config_hash(a).size() == 16);
  const auto ra = evaluate(a), rb = evaluate(b);
  CHECK(ra.manifest.pass());
  CHECK(rb.manifest.pass());
  CHECK(artifact(ra, "chain.csv").content != artifact(rb, "chain.csv").content);
  a.out_dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(make_config("euler-bound")));
}

TEST_CASE("results are written with a manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "collapse-cli-test";
  std::filesystem::remove_all(dir);
  const auto m = run_scenario(make_config("tore-ex2"), dir);
  CHECK(m.pass());
  for (const auto& f : m.artifacts) CHECK(std::filesystem::exists(dir / f));
  std::ifstream in(dir / "manifest.json");
  const Json j = Json::parse(in);
  CHECK(j["scenario"] == "tore-ex2");
  CHECK(j["pass"] == true);
  CHECK(j["config_hash"] == m.config_hash);
  CHECK(j["checks"].size() == m.checks.size());
  std::filesystem::remove_all(dir);
}

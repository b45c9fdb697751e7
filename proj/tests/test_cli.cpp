#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "anarchy/artifacts.hpp"
#include "anarchy/cli.hpp"
#include "anarchy/io.hpp"

using namespace anarchy;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return Run{code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("anarchy-test-" + std::to_string(std::rand()) + "-" +
                                        std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = "") const {
    const auto p = (path / name).string();
    if (!content.empty()) write_file(p, content);
    return p;
  }
};

const char* kPigou = R"({"links": [{"a": 1, "b": 0}, {"a": 0, "b": 1}]})";

}  // namespace

TEST_CASE("solve prints the flow table") {
  TempDir dir;
  const auto net = dir.file("pigou.json", kPigou);
  auto r = run({"solve", net, "--rate", "1", "--which", "opt"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("         0.5") != std::string::npos);
  CHECK(r.out.find("cost 0.75") != std::string::npos);

  r = run({"solve", net, "--rate", "1", "--which", "nash"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("cost 1\n") != std::string::npos);
  CHECK(r.out.find("used_links 1") != std::string::npos);

  r = run({"solve", net, "--rate", "0"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("cost 0\n") != std::string::npos);

  const auto mech = dir.file("t.json", R"({"kind": "threshold", "R": [2]})");
  r = run({"solve", net, "--rate", "1", "--which", "mn", "--mechanism", mech});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("cost 0.75") != std::string::npos);
}

TEST_CASE("schema errors carry line and column") {
  TempDir dir;
  const auto bad = dir.file("bad.json", "{\"links\": [\n  {\"a\": 1, \"b\": 0},\n  {\"a\": \"x\", \"b\": 1}\n]}");
  auto r = run({"solve", bad, "--rate", "1"});
  CHECK(r.code == kExitParse);
  CHECK(r.err.find("line 3") != std::string::npos);

  try {
    parse_network("{\"links\": [\n  {\"a\": 1}\n]}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("missing \"b\"") != std::string::npos);
  }
  try {
    parse_network("{\"links\": [\n  {\"a\": 1 \"b\": 0}\n]}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() > 5);
  }
  CHECK_THROWS_AS(parse_network("[]"), ParseError);
  CHECK_THROWS_AS(parse_mechanism(R"({"kind": "magic"})"), ParseError);
  CHECK_THROWS_AS(parse_mechanism(R"({"kind": "plateau", "x1": 1})"), ParseError);
}

TEST_CASE("exit codes") {
  TempDir dir;
  const auto net = dir.file("pigou.json", kPigou);
  CHECK(run({"solve", net, "--rate", "-1"}).code == kExitDomain);
  CHECK(run({"solve", dir.file("neg.json", R"({"links": [{"a": -1, "b": 0}]})"), "--rate", "1"}).code == kExitDomain);
  CHECK(run({"solve", (dir.path / "missing.json").string(), "--rate", "1"}).code == kExitIo);
  CHECK(run({"curve", net, "--csv", (dir.path / "no" / "such" / "x.csv").string()}).code == kExitIo);
  CHECK(run({"bounds", "--kind", "lower", "--ratio", "5"}).code == kExitDomain);
  CHECK(run({"bounds", "--kind", "simple2", "--ratio", "1"}).code == kExitDomain);
  CHECK(run({"curve", net, "--samples", "1", "--csv", dir.file("c.csv")}).code == kExitDomain);
  CHECK(run({"frobnicate"}).code == kExitParse);
  CHECK(run({}).code == kExitParse);
}

TEST_CASE("bounds command") {
  auto r = run({"bounds", "--kind", "simple2", "--ratio", "4"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("value_exact 1.25\n") != std::string::npos);

  r = run({"bounds", "--kind", "benign", "--R", "4"});
  CHECK(r.out.find("1.31579") != std::string::npos);

  r = run({"bounds", "--kind", "lower", "--ratio", "2.1"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("x1 ") != std::string::npos);
  CHECK(r.out.find("r_star ") != std::string::npos);
  const auto pos = r.out.find("value_exact ");
  CHECK(std::stod(r.out.substr(pos + 12)) >= 1.191);

  r = run({"bounds", "--kind", "recurrence", "--greedy", "6"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("below_4/3 yes") != std::string::npos);
}

TEST_CASE("curve artifacts") {
  TempDir dir;
  const auto net = dir.file("pigou.json", kPigou);
  const auto csv = dir.file("pigou.csv");
  const auto svg = dir.file("pigou.svg");
  auto r = run({"curve", net, "--rmax", "3", "--samples", "30", "--csv", csv, "--svg", svg});
  REQUIRE(r.code == kExitOk);
  const auto text = read_file(csv);
  CHECK(text.rfind("r,cost_num,cost_den,ratio,regime\n", 0) == 0);
  CHECK(text.find("\n1,1,0.75,1.3333333333333333,") != std::string::npos);
  CHECK(text.find("inf,inf,inf,1,tail\n") != std::string::npos);
  CHECK(fs::exists(csv + ".manifest.json"));

  const auto svg_text = read_file(svg);
  CHECK(svg_text.find("viewBox=\"0 0 800 500\"") != std::string::npos);
  CHECK(svg_text.find("stroke-dasharray") != std::string::npos);
  CHECK(svg_text.find("<polyline") != std::string::npos);

  // Byte-identical reruns.
  const auto csv2 = dir.file("pigou2.csv");
  run({"curve", net, "--rmax", "3", "--samples", "30", "--csv", csv2});
  CHECK(read_file(csv2) == text);

  // Round trip to 1e-12 (exact, in fact).
  const auto rows = parse_curve_csv(text);
  const auto pigou = parse_network(kPigou);
  const auto rebuilt = build_curve(pigou, Unmodified{}, 3.0, 30);
  REQUIRE(rows.size() == rebuilt.rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::abs(rows[i].sample.ratio - rebuilt.rows[i].sample.ratio) <= 1e-12);
    CHECK(rows[i].regime == rebuilt.rows[i].regime);
  }

  const auto manifest = nlohmann::json::parse(read_file(csv + ".manifest.json"));
  CHECK(manifest["inputs"][0]["sha256"] == sha256_hex(kPigou));
  CHECK(manifest["outputs"].size() == 3);
  CHECK(manifest["tolerance"] == 1e-9);
}

TEST_CASE("curve with two samples on a single link") {
  TempDir dir;
  const auto net = dir.file("one.json", R"({"links": [{"a": 2, "b": 1}]})");
  const auto csv = dir.file("one.csv");
  REQUIRE(run({"curve", net, "--samples", "2", "--csv", csv}).code == kExitOk);
  const auto rows = parse_curve_csv(read_file(csv));
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].sample.ratio == 1.0);
  CHECK(rows[1].sample.ratio == 1.0);
  CHECK(rows[2].regime == "tail");
}

TEST_CASE("plateau curve shows the jump") {
  TempDir dir;
  const auto net = dir.file("r2.json", R"({"links": [{"a": 1, "b": 0}, {"a": 0.5, "b": 1}]})");
  const auto mech = dir.file("p.json", R"({"kind": "plateau"})");
  const auto csv = dir.file("p.csv");
  const auto svg = dir.file("p.svg");
  REQUIRE(run({"curve", net, "--mechanism", mech, "--csv", csv, "--svg", svg}).code == kExitOk);
  const auto rows = parse_curve_csv(read_file(csv));
  double before = 0.0, after = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].sample.ratio - rows[i - 1].sample.ratio > 0.1) {
      before = rows[i - 1].sample.ratio;
      after = rows[i].sample.ratio;
    }
  }
  CHECK(after - before > 0.1);
  CHECK(read_file(svg).find("fill=\"white\"/>") != std::string::npos);
}

TEST_CASE("mechanism files round trip") {
  TempDir dir;
  const auto net = dir.file("r2.json", R"({"links": [{"a": 1, "b": 0}, {"a": 0.5, "b": 1}]})");
  const auto out = dir.file("m.json");
  REQUIRE(run({"mechanism", net, "--kind", "plateau", "--out", out}).code == kExitOk);
  const auto spec = parse_mechanism(read_file(out));
  REQUIRE(spec.x1.has_value());
  const auto doc = nlohmann::json::parse(read_file(out));
  CHECK(doc["derived"]["identity"] == false);
  const auto solve = run({"solve", net, "--rate", "1.2", "--which", "mn", "--mechanism", out});
  CHECK(solve.code == kExitOk);

  auto r = run({"mechanism", net, "--kind", "threshold", "--R", "4"});
  CHECK(r.code == kExitOk);
  CHECK(nlohmann::json::parse(r.out)["kind"] == "threshold");
  CHECK(run({"mechanism", net, "--kind", "threshold", "--R", "4,4"}).code == kExitDomain);
}

TEST_CASE("verify suites write manifests") {
  TempDir dir;
  const auto out = (dir.path / "core").string();
  auto r = run({"verify", "--suite", "core", "--out", out});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(fs::path(out) / "manifest.json"));
  CHECK(r.out.find("FAIL") == std::string::npos);

  r = run({"verify", "--suite", "paper", "--out", out});
  CHECK(r.code == kExitOk);
  r = run({"verify", "--suite", "random", "--seed", "7", "--out", out});
  CHECK(r.code == kExitOk);
}

TEST_CASE("tolerance override") {
  TempDir dir;
  setenv("ANARCHY_TOL", "1e-6", 1);
  auto r = run({"verify", "--suite", "core", "--out", dir.path.string()});
  CHECK(r.code == kExitOk);
  const auto manifest = nlohmann::json::parse(read_file((dir.path / "manifest.json").string()));
  CHECK(manifest["tolerance"] == 1e-6);
  setenv("ANARCHY_TOL", "nonsense", 1);
  CHECK(run({"verify", "--suite", "core", "--out", dir.path.string()}).code == kExitParse);
  unsetenv("ANARCHY_TOL");
}

#include "grpheat/config.hpp"
#include "grpheat/run.hpp"

#include "support.hpp"

#include "json.hpp"

#include <fstream>
#include <map>
#include <random>
#include <sstream>

using namespace grpheat;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

nlohmann::json manifest(const std::filesystem::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

}  // namespace

TEST_CASE("minimal config gets the defaults") {
  const RunConfig c = parse_config("experiment=solve_classical\npotential=const:0\ninitial=sin:1");
  CHECK(c.experiment == Experiment::solve_classical);
  CHECK(c.n == 512);
  CHECK(c.m == 1024);
  CHECK(c.T == 1.0);
  CHECK(c.K == 64);
  CHECK(c.thresholds.rate_min == 0.35);
}

TEST_CASE("config errors name the offending key") {
  CHECK(parse_error("experiment=sweep").find("eps_list") != std::string::npos);
  CHECK(parse_error("colour = blue").find("colour") != std::string::npos);
  CHECK(parse_error("n = 3").find("n must") != std::string::npos);
  CHECK(parse_error("n = 100\nn = 200").find("duplicate") != std::string::npos);
  CHECK(parse_error("experiment = dance").find("experiment must be") != std::string::npos);
  CHECK(parse_error("gamma = 1.5").find("gamma") != std::string::npos);
  CHECK(parse_error("T = -1").find("T must") != std::string::npos);
  CHECK(parse_error("experiment = solve_regularized").find("epsilon") != std::string::npos);
  CHECK(parse_error("experiment = spectral\nn = 64\nK = 20").find("n/4") != std::string::npos);
  CHECK(parse_error("n = 64\nK = 64").find("K must") != std::string::npos);
  CHECK_THROWS_AS(parse_config("just words"), FormatError);
  CHECK_THROWS_AS(parse_config("potential = fbm:H=2"), ParameterError);
  CHECK_THROWS_AS(parse_config("initial = cos:2"), ParameterError);
  CHECK_NOTHROW(parse_config("# comment only\n\n  n = 64   # trailing\nK = 8\n"));
}

TEST_CASE("file potentials are checked against n") {
  const auto dir = test::scratch_dir("config-file");
  {
    std::ofstream out(dir / "w.txt");
    for (int i = 0; i < 257; ++i) out << "0\n";
  }
  {
    std::ofstream out(dir / "a.conf");
    out << "potential = file:w.txt\nn = 512\n";
  }
  {
    std::ofstream out(dir / "b.conf");
    out << "potential = file:w.txt\nn = 256\nK = 32\n";
  }
  CHECK_THROWS_WITH_AS(load_config(dir / "a.conf"), doctest::Contains("257"), ParameterError);
  const RunConfig ok = load_config(dir / "b.conf");
  CHECK(ok.potential == "file:" + (dir / "w.txt").lexically_normal().string());
}

TEST_CASE("property: rendered configs parse back unchanged") {
  std::mt19937_64 rng(31);
  const char* potentials[] = {"const:1.25", "weierstrass:alpha=0.3,terms=7", "fbm:H=0.6,seed=12"};
  const char* initials[] = {"sin:2", "polybump", "compensated:sin:1"};
  for (int trial = 0; trial < 20; ++trial) {
    RunConfig c;
    c.experiment = static_cast<Experiment>(rng() % 7);
    c.potential = potentials[rng() % 3];
    c.initial = initials[rng() % 3];
    c.n = 256 << (rng() % 3);
    c.m = 100 + static_cast<int>(rng() % 900);
    c.T = 0.1 + static_cast<Scalar>(rng() % 1000) / 997.0;
    c.K = 1 + static_cast<int>(rng() % (c.n / 4));
    c.eps_list = {0.3, 0.2, 0.1 / (1 + trial)};
    c.epsilon = 0.1 + trial * 1e-3;
    c.seed = rng();
    c.gamma = 0.1 + 0.01 * trial;
    if (trial % 2) c.floor_t = c.T / 7;
    c.dump_modes = trial % 3 == 0;
    c.format = trial % 2 ? FieldFormat::binary : FieldFormat::csv;
    c.thresholds.rate_min = 0.3 + 1e-3 * trial;
    const std::string text = render_config(c);
    const RunConfig back = parse_config(text);
    CHECK(render_config(back) == text);
    CHECK(back.T == c.T);
    CHECK(back.seed == c.seed);
  }
}

TEST_CASE("seed override rewrites fbm specs") {
  RunConfig c = parse_config("potential = fbm:H=0.5,seed=3");
  override_seed(c, 99);
  CHECK(c.seed == 99);
  CHECK(c.potential == "fbm:H=0.5,seed=99");
  RunConfig d = parse_config("potential = fbm:H=0.5");
  override_seed(d, 4);
  CHECK(d.potential == "fbm:H=0.5,seed=4");
  RunConfig e = parse_config("potential = const:1");
  override_seed(e, 4);
  CHECK(e.potential == "const:1");
}

TEST_CASE("initial data specs") {
  const SpaceGrid g(64);
  CHECK(make_initial("sin:2", g).values()[16] == doctest::Approx(std::sin(2 * g.node(16))));
  CHECK(make_initial("polybump", g).values()[32] == doctest::Approx(1.0));
  CHECK(make_initial("compensated:sin:1", g).kind() == InitialKind::compensated);
  CHECK_THROWS(make_initial("gauss", g));
}

TEST_CASE("heat oracle run passes and writes its artifacts") {
  const auto dir = test::scratch_dir("run-oracle");
  RunConfig c = parse_config("experiment=solve_classical\npotential=const:0\ninitial=sin:1\nn=128\nm=256");
  c.output_dir = dir / "out";
  std::ostringstream log;
  const RunResult r = run(c, &log);
  CHECK(r.exit_code == 0);
  CHECK(log.str().find("PASS") != std::string::npos);
  CHECK(log.str().find("FAIL") == std::string::npos);
  CHECK(std::filesystem::exists(c.output_dir / "field.csv"));
  const auto m = manifest(c.output_dir);
  CHECK(m["status"] == "pass");
  CHECK(m["config"]["n"] == "128");
  CHECK(m["version"] == kVersion);
  CHECK(m.contains("wall_time_seconds"));
  bool oracle = false;
  for (const auto& check : m["checks"]) oracle = oracle || check["name"] == "heat_oracle";
  CHECK(oracle);
}

TEST_CASE("reruns are byte identical apart from the manifest") {
  const auto dir = test::scratch_dir("run-determinism");
  const char* configs[] = {
      "experiment=solve_weak\npotential=fbm:H=0.5,seed=3\ninitial=polybump\nn=128\nm=64\nK=32",
      "experiment=spectral\npotential=weierstrass:alpha=0.5\nn=256\nK=16\ndump_modes=true",
      "experiment=sweep\npotential=weierstrass:alpha=0.5\nn=128\nm=64\neps_list=0.5,0.25,0.125",
      "experiment=solve_regularized\npotential=fbm:H=0.3,seed=1\nn=128\nm=64\nepsilon=0.2\nformat=binary",
  };
  int idx = 0;
  for (const char* text : configs) {
    RunConfig c = parse_config(text);
    std::vector<std::string> names;
    std::map<std::string, std::string> first;
    for (int rep = 0; rep < 2; ++rep) {
      c.output_dir = dir / ("c" + std::to_string(idx) + "-" + std::to_string(rep));
      const RunResult r = run(c);
      CHECK(r.exit_code != 2);
      for (const auto& name : r.artifacts) {
        if (name == "manifest.json") continue;
        const std::string bytes = slurp(c.output_dir / name);
        if (rep == 0) first[name] = bytes;
        else CHECK_MESSAGE(first[name] == bytes, name);
      }
    }
    CHECK(!first.empty());
    ++idx;
  }
}

TEST_CASE("errors are serialized to the manifest") {
  const auto dir = test::scratch_dir("run-error");
  RunConfig c = parse_config("experiment=solve_classical\npotential=const:300\nn=64\nm=16\nK=16");
  c.output_dir = dir / "out";
  std::ostringstream log;
  const RunResult r = run(c, &log);
  CHECK(r.exit_code == 2);
  REQUIRE(r.error);
  const auto m = manifest(c.output_dir);
  CHECK(m["status"] == "error");
  CHECK(m["error"].get<std::string>().find("overflow") != std::string::npos);
}

TEST_CASE("a failing check gives exit code one") {
  const auto dir = test::scratch_dir("run-fail");
  RunConfig c = parse_config(
      "experiment=solve_classical\npotential=const:0\ninitial=sin:1\nn=16\nm=4\nK=8\ntol_oracle=1e-12");
  c.output_dir = dir / "out";
  const RunResult r = run(c);
  CHECK(r.exit_code == 1);
  CHECK(manifest(c.output_dir)["status"] == "fail");
}

TEST_CASE("runs write only inside the output directory") {
  const auto dir = test::scratch_dir("run-confined");
  const auto before = std::distance(std::filesystem::directory_iterator(dir), {});
  RunConfig c = parse_config("experiment=maxprinciple\npotential=fbm:H=0.5,seed=7\nn=128\nm=64\nK=16");
  c.output_dir = dir / "inner";
  const RunResult r = run(c);
  CHECK(r.exit_code == 0);
  CHECK(std::distance(std::filesystem::directory_iterator(dir), {}) == before + 1);
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir))
    CHECK(entry.path().string().rfind(c.output_dir.string(), 0) == 0);
  for (const auto& name : r.artifacts) CHECK(std::filesystem::exists(c.output_dir / name));
}

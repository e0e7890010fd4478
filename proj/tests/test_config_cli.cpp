#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "helmcont/helmcont.hpp"

using namespace helmcont;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "helmcont_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& dir, std::string* out = nullptr,
            std::string* err = nullptr) {
  const fs::path out_txt = dir / "stdout.txt";
  const fs::path err_txt = dir / "stderr.txt";
  const std::string cmd = std::string(HELMCONT_CLI_PATH) + " " + args + " >" +
                          out_txt.string() + " 2>" + err_txt.string();
  const int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  if (out) *out = slurp(out_txt);
  if (err) *err = slurp(err_txt);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("default config resolves to the documented run parameters") {
  const RunConfig run = resolve_config(default_config());
  CHECK(run.kind == GeometryKind::strip);
  CHECK(run.strip.L == 2.0 * M_PI);
  CHECK(run.strip.n_tangential == 64);
  CHECK(run.strip.n_depth == 33);
  CHECK(run.strip.sponge_width == 0.1);
  CHECK(run.annulus.R == 2.0);
  CHECK(run.k == 10.0);
  REQUIRE(run.k_values.size() == 1);
  CHECK(run.k_values[0] == 10.0);
  CHECK(run.eps == 0.19);
  CHECK(run.experiment.solution_id == "low_band_b4");
  CHECK(run.experiment.delta == 1e-3);
  CHECK(run.experiment.theta == 0.1);
  CHECK(run.experiment.policy == ModePolicy::low_only);
  CHECK(run.experiment.eps == 0.19);
  CHECK(run.m_max == 0);
  CHECK(run.theta_plateau == 0.1);
  REQUIRE(run.mu_values.size() == 2);
  CHECK(run.mu_values[0] == 0.5);
  CHECK(run.mu_values[1] == 2.0);
  CHECK(run.out_dir == "out");
  CHECK(run.svg);
}

TEST_CASE("unknown config keys are rejected with their dotted path") {
  try {
    merge_config(json{{"bogus", 1}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "bogus");
  }
  try {
    merge_config(json{{"geometry", {{"n_bogus", 3}}}});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "geometry.n_bogus");
  }
}

TEST_CASE("config files merge over the defaults") {
  const fs::path dir = scratch_dir();
  const fs::path good = dir / "run.json";
  std::ofstream(good) << R"({"cutoff": {"k": 7.0}, "output": {"svg": false}})";
  const json cfg = load_config_file(good.string());
  CHECK(cfg["cutoff"]["k"] == 7.0);
  CHECK(cfg["cutoff"]["eps"] == 0.19);
  CHECK(cfg["geometry"]["kind"] == "strip");
  CHECK(cfg["output"]["svg"] == false);

  const fs::path bad = dir / "bad.json";
  std::ofstream(bad) << "{ not json";
  try {
    load_config_file(bad.string());
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "config");
  }
  CHECK_THROWS_AS(load_config_file((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("overrides parse JSON literals and fall back to strings") {
  json cfg = default_config();
  apply_override(cfg, "cutoff.k=12.5");
  CHECK(cfg["cutoff"]["k"] == 12.5);
  apply_override(cfg, "output.svg=false");
  CHECK(cfg["output"]["svg"] == false);
  apply_override(cfg, "cutoff.k_values=[5,10]");
  CHECK(cfg["cutoff"]["k_values"] == json::array({5, 10}));
  apply_override(cfg, "geometry.kind=annulus");
  CHECK(cfg["geometry"]["kind"] == "annulus");

  try {
    apply_override(cfg, "cutoff.nope=1");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "cutoff.nope");
  }
  try {
    apply_override(cfg, "geometry=5");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "geometry");
  }
  try {
    apply_override(cfg, "no_equals");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "set");
  }
}

TEST_CASE("resolution validates ranges and names the offending key") {
  const struct {
    const char* override_;
    const char* key;
  } cases[] = {{"cutoff.eps=1.5", "cutoff.eps"},
               {"cutoff.k=-1", "cutoff.k"},
               {"geometry.kind=torus", "geometry.kind"},
               {"geometry.sponge_width=0.7", "geometry"},
               {"coefficients.c=1.0", "coefficients.c"},
               {"coefficients.preset=rough", "coefficients.preset"},
               {"experiment.delta=-0.5", "experiment.delta"},
               {"experiment.policy=some", "experiment.policy"},
               {"experiment.seed=-3", "experiment.seed"},
               {"svd.theta_plateau=1.0", "svd.theta_plateau"},
               {"output.dir=", "output.dir"}};
  for (const auto& c : cases) {
    json cfg = default_config();
    apply_override(cfg, c.override_);
    try {
      resolve_config(cfg);
      FAIL("expected ConfigError for " << c.override_);
    } catch (const ConfigError& e) {
      CHECK(e.key() == c.key);
    }
  }

  json cfg = default_config();
  apply_override(cfg, "cutoff.k_values=[5,10,20]");
  const RunConfig run = resolve_config(cfg);
  REQUIRE(run.k_values.size() == 3);
  CHECK(run.experiment.k_values == run.k_values);
}

TEST_CASE("every shipped sample config loads and resolves") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(HELMCONT_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    const json cfg = load_config_file(entry.path().string());
    const RunConfig run = resolve_config(cfg);
    CHECK(!run.k_values.empty());
    CHECK(run.out_dir.rfind("out/", 0) == 0);
  }
  CHECK(seen >= 4);
}

TEST_CASE("the manifest echoes the resolved config") {
  const fs::path dir = scratch_dir();
  const json cfg = default_config();
  write_manifest(dir.string(), "sweep", cfg);
  const fs::path path = dir / "manifest.json";
  REQUIRE(fs::exists(path));
  const json doc = json::parse(slurp(path));
  CHECK(doc.at("command") == "sweep");
  CHECK(doc.at("config") == cfg);
}

TEST_CASE("continue run with all data modes excluded writes a zero field") {
  const fs::path dir = scratch_dir();
  const fs::path out = dir / "run";
  std::string stdout_text;
  const int rc = run_cli("continue --out " + out.string() +
                             " --set geometry.kind=annulus"
                             " --set geometry.n_angular=16"
                             " --set geometry.n_radial=65"
                             " --set cutoff.k=5"
                             " --set experiment.solution_id=single_mode_m6"
                             " --set experiment.delta=0",
                         dir, &stdout_text);
  CHECK(rc == 0);
  CHECK(stdout_text.find("field.csv") != std::string::npos);
  REQUIRE(fs::exists(out / "manifest.json"));
  REQUIRE(fs::exists(out / "field.csv"));
  REQUIRE(fs::exists(out / "diagnostics.csv"));
  REQUIRE(fs::exists(out / "trace.csv"));

  const json doc = json::parse(slurp(out / "manifest.json"));
  CHECK(doc.at("command") == "continue");
  CHECK(doc.at("config").at("cutoff").at("k") == 5);

  // the single data mode sits above the cutoff band, so the low-only
  // continuation carries nothing
  const Field field = read_field_csv((out / "field.csv").string());
  CHECK(field.grid.kind == GeometryKind::annulus);
  CHECK(field.grid.n_tan == 16);
  for (const cdouble& v : field.values) CHECK(v == cdouble{0.0, 0.0});
}

TEST_CASE("config errors exit with code 2 and name the key on stderr") {
  const fs::path dir = scratch_dir();
  std::string stderr_text;
  const int rc = run_cli("continue --out " + (dir / "run").string() +
                             " --set cutoff.eps=1.5",
                         dir, nullptr, &stderr_text);
  CHECK(rc == 2);
  CHECK(stderr_text.find("cutoff.eps") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "run" / "manifest.json"));
}

TEST_CASE("svd run with a single k skips the conjecture fit") {
  const fs::path dir = scratch_dir();
  const fs::path out = dir / "run";
  std::string stdout_text;
  const int rc = run_cli("svd --out " + out.string() +
                             " --set geometry.kind=annulus"
                             " --set geometry.n_radial=257"
                             " --set cutoff.k=5"
                             " --set svd.m_max=8",
                         dir, &stdout_text);
  CHECK(rc == 0);
  CHECK(fs::exists(out / "spectrum.csv"));
  CHECK_FALSE(fs::exists(out / "conjecture.txt"));
  CHECK(stdout_text.find("at least 3") != std::string::npos);

  std::ifstream in(out / "spectrum.csv");
  std::string header;
  REQUIRE(std::getline(in, header));
  CHECK(header == "k,m,sigma,resonant");
}

TEST_CASE("demo run writes the blow-up table") {
  const fs::path dir = scratch_dir();
  const fs::path out = dir / "run";
  const int rc = run_cli("demo-john --quiet --out " + out.string() +
                             " --set cutoff.k_values=[10,20]",
                         dir);
  CHECK(rc == 0);
  std::ifstream in(out / "john.csv");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "k,mu,mode,omega2,amplification,regime");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);
}

TEST_CASE("norms command reports the dump's norms verbatim") {
  const fs::path dir = scratch_dir();
  const fs::path dump = dir / "field.csv";

  StripGeometry geom{2.0 * M_PI, 16, 9, 0.1};
  Field field(geom.grid());
  GaussianStream gs(5u);
  for (cdouble& v : field.values) v = {gs.next(), gs.next()};
  write_field_csv(dump.string(), field);

  std::string stdout_text;
  const int rc = run_cli("norms --quiet --out " + (dir / "run").string() +
                             " --set norms.field_path=" + dump.string(),
                         dir, &stdout_text);
  CHECK(rc == 0);

  std::istringstream lines(stdout_text);
  std::string line;
  REQUIRE(std::getline(lines, line));
  REQUIRE(line.rfind("l2=", 0) == 0);
  CHECK(std::stod(line.substr(3)) == sobolev_norm(field, 0));
  REQUIRE(std::getline(lines, line));
  REQUIRE(line.rfind("h1=", 0) == 0);
  CHECK(std::stod(line.substr(3)) == sobolev_norm(field, 1));
}

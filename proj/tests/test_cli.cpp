#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "chcrit/io.hpp"
#include "chcrit/nucleation.hpp"
#include "chcrit/run.hpp"
#include "chcrit/string_method.hpp"
#include "helpers.hpp"

using namespace chcrit;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& tag) {
    dir = fs::temp_directory_path() / ("chcrit_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(CHCRIT_BIN) + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> summary(const fs::path& dir) {
  return read_kv(dir / "summary.txt");
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("CHF1 fields round-trip bitwise") {
  Scratch sc("chf1");
  Grid g = make_grid(0.4, 2.3);
  std::mt19937 rng(3);
  Field u = testutil::random_field(g, rng);
  write_field_chf1(sc / "u.chf1", u);

  CHECK(file_magic(sc / "u.chf1") == "CHF1");
  Field v = read_field_chf1(sc / "u.chf1");
  CHECK(v.grid == u.grid);
  CHECK(v.values == u.values);
}

TEST_CASE("CHF1 rejects corrupt files") {
  Scratch sc("chf1bad");
  Grid g = make_grid(0.4, 2.3);
  Field u(g, 0.0);
  write_field_chf1(sc / "u.chf1", u);

  std::string bytes = slurp(sc / "u.chf1");
  std::ofstream(sc / "trunc.chf1", std::ios::binary)
      << bytes.substr(0, bytes.size() / 2);
  CHECK_THROWS(read_field_chf1(sc / "trunc.chf1"));

  std::string wrong = bytes;
  wrong[0] = 'X';
  std::ofstream(sc / "magic.chf1", std::ios::binary) << wrong;
  CHECK_THROWS(read_field_chf1(sc / "magic.chf1"));

  std::ofstream(sc / "extra.chf1", std::ios::binary) << bytes << "garbage";
  CHECK_THROWS(read_field_chf1(sc / "extra.chf1"));

  CHECK_THROWS(read_field_chf1(sc / "missing.chf1"));
}

TEST_CASE("CHS1 strings round-trip with a reset displacement") {
  Scratch sc("chs1");
  Grid g = make_grid(0.4, 2.3);
  std::mt19937 rng(5);
  StringState s;
  int M = 4;
  s = init_linear(testutil::random_field(g, rng), testutil::random_field(g, rng), M);
  s.iter = 17;
  s.last_displacement = 0.125;
  write_string_chs1(sc / "s.chs1", s);

  CHECK(file_magic(sc / "s.chs1") == "CHS1");
  StringState t = read_string_chs1(sc / "s.chs1");
  REQUIRE(t.images.size() == s.images.size());
  for (std::size_t i = 0; i < s.images.size(); ++i) {
    CHECK(t.images[i].grid == s.images[i].grid);
    CHECK(t.images[i].values == s.images[i].values);
  }
  CHECK(t.alpha == s.alpha);
  CHECK(t.iter == 17);
  CHECK(std::isinf(t.last_displacement));
}

TEST_CASE("key=value files round-trip and tolerate comments") {
  Scratch sc("kv");
  write_kv(sc / "a.txt", {{"alpha", "1.5"}, {"name", "x y"}});
  std::ofstream(sc / "b.txt") << "# comment\n\nkey = value with = signs\n";

  auto a = read_kv(sc / "a.txt");
  CHECK(a.at("alpha") == "1.5");
  CHECK(a.at("name") == "x y");
  auto b = read_kv(sc / "b.txt");
  CHECK(b.at("key") == "value with = signs");
}

TEST_CASE("fmt_g17 round-trips doubles") {
  for (double v : {0.1, -4.30877207613422, 1e-300, 3.0, 0.0}) {
    CHECK(std::stod(fmt_g17(v)) == v);
  }
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64_str("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64_str("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64_str("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("constants subcommand writes values, csv, and a stable manifest") {
  Scratch sc("cli_const");
  fs::path out = sc / "run";
  REQUIRE(run_cli("constants --xi 2.3 --phi 0.4 --out " + out.string()) == 0);

  auto kv = read_kv(out / "constants.txt");
  NucleationConstants nc = critical_volumes(2.3, 2);
  CHECK(std::stod(kv.at("nu_s")) == doctest::Approx(nc.nu_s).epsilon(1e-14));
  CHECK(std::stod(kv.at("nu_m")) == doctest::Approx(nc.nu_m).epsilon(1e-14));
  CHECK(std::stod(kv.at("c_s")) == doctest::Approx(nc.c_s).epsilon(1e-14));
  CHECK(std::stod(kv.at("c_m")) == doctest::Approx(nc.c_m).epsilon(1e-14));
  CHECK(std::stod(kv.at("cbar1")) == doctest::Approx(cbar1(2)).epsilon(1e-14));
  CHECK(kv.at("exists_droplet") == "1");
  CHECK(fs::exists(out / "constants.csv"));

  std::string manifest = slurp(out / "manifest.txt");
  CHECK(manifest.find("config_hash ") != std::string::npos);
  CHECK(manifest.find("artifact constants.txt ") != std::string::npos);

  // Rerunning the same configuration reproduces the manifest byte for byte.
  REQUIRE(run_cli("constants --xi 2.3 --phi 0.4 --out " + out.string()) == 0);
  CHECK(manifest == slurp(out / "manifest.txt"));
}

TEST_CASE("constants exits 2 when no droplet branch exists") {
  Scratch sc("cli_nodrop");
  fs::path out = sc / "run";
  CHECK(run_cli("constants --xi 1.2 --phi 0.4 --out " + out.string()) == 2);
  auto kv = read_kv(out / "constants.txt");
  CHECK(kv.at("exists_droplet") == "0");
  CHECK(kv.find("nu_s") == kv.end());
}

TEST_CASE("minimize produces a converged droplet with artifacts") {
  Scratch sc("cli_min");
  fs::path out = sc / "run";
  REQUIRE(run_cli("minimize --xi 2.3 --phi 0.4 --out " + out.string()) == 0);

  auto kv = summary(out);
  CHECK(kv.at("converged") == "1");
  CHECK(std::stoll(kv.at("steps")) > 0);
  CHECK(std::abs(std::stod(kv.at("mean_value")) - (-0.6)) <= 1e-12);

  Field u = read_field_chf1(out / "minimizer.chf1");
  CHECK(u.grid == make_grid(0.4, 2.3));
  CHECK(count_lines(out / "observables.csv") == 2);

  std::string manifest = slurp(out / "manifest.txt");
  for (const char* name : {"minimizer.chf1", "observables.csv", "summary.txt"})
    CHECK(manifest.find(std::string("artifact ") + name + " ") != std::string::npos);
}

TEST_CASE("minimize accepts a config file equivalently to flags") {
  Scratch sc("cli_cfg");
  fs::path out1 = sc / "flags", out2 = sc / "config";
  REQUIRE(run_cli("minimize --xi 2.3 --phi 0.4 --tol-grad 1e-3 --out " + out1.string()) == 0);

  std::ofstream(sc / "run.cfg") << "xi=2.3\nphi=0.4\ntol-grad=1e-3\nout=" << out2.string()
                                << "\n";
  REQUIRE(run_cli("minimize --config " + (sc / "run.cfg").string()) == 0);

  CHECK(slurp(out1 / "minimizer.chf1") == slurp(out2 / "minimizer.chf1"));
  CHECK(slurp(out1 / "summary.txt") == slurp(out2 / "summary.txt"));
}

TEST_CASE("unknown config keys fail loudly") {
  Scratch sc("cli_badcfg");
  std::ofstream(sc / "bad.cfg") << "phi=0.4\nnot_a_key=1\n";
  CHECK(run_cli("minimize --config " + (sc / "bad.cfg").string()) != 0);

  RunConfig c;
  CHECK_THROWS_AS(apply_kv(c, {{"not_a_key", "1"}}), std::invalid_argument);
  CHECK_THROWS_AS(apply_kv(c, {{"phi", "fast"}}), std::invalid_argument);
  apply_kv(c, {{"tol-grad", "1e-4"}, {"max_iters", "7"}});
  CHECK(c.tol_grad == 1e-4);
  CHECK(c.max_iters == 7);
}

TEST_CASE("minimize exits 2 below the fold") {
  Scratch sc("cli_min2");
  fs::path out = sc / "run";
  CHECK(run_cli("minimize --xi 1.2 --phi 0.4 --out " + out.string()) == 2);
  CHECK_FALSE(fs::exists(out / "minimizer.chf1"));
}

TEST_CASE("minimize output is independent of the worker count") {
  Scratch sc("cli_workers");
  fs::path out1 = sc / "w1", out4 = sc / "w4";
  REQUIRE(run_cli("minimize --xi 2.3 --phi 0.4 --workers 1 --out " + out1.string()) == 0);
  REQUIRE(run_cli("minimize --xi 2.3 --phi 0.4 --workers 4 --out " + out4.string()) == 0);
  CHECK(slurp(out1 / "minimizer.chf1") == slurp(out4 / "minimizer.chf1"));
}

TEST_CASE("minimize resumes from a warm start on the same grid") {
  Scratch sc("cli_warm");
  fs::path out1 = sc / "a", out2 = sc / "b";
  REQUIRE(run_cli("minimize --xi 2.3 --phi 0.4 --out " + out1.string()) == 0);
  REQUIRE(run_cli("minimize --xi 2.3 --phi 0.4 --resume " + (out1 / "minimizer.chf1").string() +
                  " --out " + out2.string()) == 0);
  auto kv = summary(out2);
  CHECK(kv.at("converged") == "1");
  // A converged state passes the first convergence check.
  CHECK(std::stoll(kv.at("steps")) <= std::stoll(summary(out1).at("steps")));

  fs::path mismatched = sc / "c";
  CHECK(run_cli("minimize --xi 2.3 --phi 0.2 --resume " + (out1 / "minimizer.chf1").string() +
                " --out " + mismatched.string()) == 1);
}

TEST_CASE("diagnose reproduces the minimize observables") {
  Scratch sc("cli_diag");
  fs::path out = sc / "min", dout = sc / "diag";
  REQUIRE(run_cli("minimize --xi 2.3 --phi 0.4 --out " + out.string()) == 0);
  REQUIRE(run_cli("diagnose " + (out / "minimizer.chf1").string() + " --kind minimizer --out " +
                  dout.string()) == 0);
  CHECK(slurp(out / "observables.csv") == slurp(dout / "observables.csv"));

  CHECK(run_cli("diagnose " + (out / "summary.txt").string() + " --out " + (sc / "x").string()) ==
        1);
}

TEST_CASE("string runs, checkpoints, and resumes deterministically") {
  Scratch sc("cli_str");
  fs::path full = sc / "full", part = sc / "part", cont = sc / "cont";
  std::string base = "string --xi 2.3 --phi 0.4 --images 9 --checkpoint-every 1 ";

  REQUIRE(run_cli(base + "--max-iters 4 --out " + full.string()) == 3);
  for (const char* f : {"string.chs1", "profile.csv", "saddle.chf1", "observables.csv",
                        "summary.txt", "manifest.txt"})
    CHECK(fs::exists(full / f));
  CHECK(count_lines(full / "observables.csv") == 4);
  CHECK(count_lines(full / "profile.csv") == 10);

  REQUIRE(run_cli(base + "--max-iters 2 --out " + part.string()) == 3);
  REQUIRE(run_cli(base + "--max-iters 4 --resume " + (part / "string.chs1").string() +
                  " --out " + cont.string()) == 3);
  CHECK(slurp(full / "string.chs1") == slurp(cont / "string.chs1"));
  CHECK(slurp(full / "saddle.chf1") == slurp(cont / "saddle.chf1"));
}

TEST_CASE("string with flat endpoints finds no saddle") {
  Scratch sc("cli_flat");
  fs::path out = sc / "run";
  CHECK(run_cli("string --xi 2.3 --phi 0.4 --images 9 --endpoints constant-constant "
                "--max-iters 3 --out " +
                out.string()) == 4);
  CHECK(fs::exists(out / "summary.txt"));
  CHECK_FALSE(fs::exists(out / "saddle.chf1"));
}

TEST_CASE("geometry writes scans for a synthetic droplet") {
  Scratch sc("cli_geo");
  Grid g = make_grid(0.2, 2.3);
  double mid = g.coord(g.n / 2);
  Field u = testutil::bump_field(g, mid, mid, 1.2, 1.7);
  for (double& v : u.values) v -= 0.9;
  write_field_chf1(sc / "u.chf1", u);

  fs::path out = sc / "run";
  REQUIRE(run_cli("geometry " + (sc / "u.chf1").string() + " --levels 10 --rays 16 --c-star 0.6 " +
                  "--out " + out.string()) == 0);
  CHECK(count_lines(out / "convexity.csv") == 11);
  CHECK(fs::exists(out / "contours.csv"));
  CHECK(fs::exists(out / "rays.csv"));
  CHECK(fs::exists(out / "h2.csv"));
  auto kv = summary(out);
  CHECK(kv.count("t_star_lo") == 1);
  CHECK(kv.count("t_star_hi") == 1);
  CHECK(std::stoi(kv.at("ray_violations")) == 0);
  CHECK(kv.count("h2_holds") == 1);

  // c_star above the field maximum skips the H2 table instead of failing.
  fs::path out2 = sc / "skip";
  REQUIRE(run_cli("geometry " + (sc / "u.chf1").string() + " --c-star 5 --out " +
                  out2.string()) == 0);
  CHECK_FALSE(fs::exists(out2 / "h2.csv"));
  CHECK(summary(out2).count("h2_skipped") == 1);
}

TEST_CASE("table aggregates observables and emits rates") {
  Scratch sc("cli_table");
  const char* header = "phi,kind,interfacial,energy_gap,nu_gap,l2_gap,error\n";
  std::ofstream(sc / "a.csv") << header << "0.2,minimizer,4,1,3,2,0.5\n"
                              << "0.2,saddle,1,1,1,1,1\n";
  std::ofstream(sc / "b.csv") << header << "0.4,minimizer,8,4,3,1,0.5\n"
                              << "0.15,saddle,1,1,1,1,1\n";

  fs::path out = sc / "run";
  REQUIRE(run_cli("table " + (sc / "a.csv").string() + " " + (sc / "b.csv").string() +
                  " --out " + out.string()) == 0);
  CHECK(count_lines(out / "raw.csv") == 5);

  std::map<std::string, double> expect = {{"interfacial", 1.0},
                                          {"energy_gap", 2.0},
                                          {"nu_gap", 0.0},
                                          {"l2_gap", -1.0},
                                          {"error", 0.0}};
  std::ifstream rates(out / "rates.csv");
  std::string line;
  std::getline(rates, line);
  CHECK(line == "phi,obs,log2_ratio");
  std::size_t seen = 0;
  while (std::getline(rates, line)) {
    auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    CHECK(std::stod(line.substr(0, c1)) == doctest::Approx(0.2));
    std::string obs = line.substr(c1 + 1, c2 - c1 - 1);
    CHECK(std::stod(line.substr(c2 + 1)) == doctest::Approx(expect.at(obs)).epsilon(1e-14));
    ++seen;
  }
  CHECK(seen == expect.size());

  auto kv = summary(out);
  CHECK(kv.at("rates_minimizer") == "ok");
  CHECK(kv.at("rates_saddle").substr(0, 7) == "skipped");  // 0.2 to 0.15 is not a halving

  CHECK(run_cli("table --out " + (sc / "none").string()) == 1);
}

TEST_CASE("malformed invocations exit nonzero") {
  Scratch sc("cli_bad");
  CHECK(run_cli("") != 0);
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("minimize --no-such-flag 3 --out " + (sc / "x").string()) != 0);
  CHECK(run_cli("geometry " + (sc / "absent.chf1").string() + " --out " + (sc / "y").string()) ==
        1);
}

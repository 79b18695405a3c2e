#include <cmath>
#include <filesystem>
#include <limits>
#include <string>

#include <doctest.h>

#include "csgeo/errors.hpp"
#include "csgeo/io.hpp"

#include "helpers.hpp"

using namespace csgeo;
namespace fs = std::filesystem;

TEST_SUITE("cli") {

TEST_CASE("format_double emits the shortest string that round-trips") {
  // (stod refuses subnormals with ERANGE, so the smallest probe stays normal)
  for (double x : {3.141592653589793, 2.0 / 3.0, 0.1, std::sqrt(2.0 / 7.0),
                   1e300, 2.2250738585072014e-308, 0.0, -1.5, 1234567.0}) {
    const std::string s = format_double(x);
    CHECK(std::stod(s) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("text files round-trip and missing paths throw") {
  const std::string dir = tst::fresh_out_dir("io");
  const std::string path = dir + "/sample.txt";
  const std::string body = "line one\nline two\n";
  write_text_file(path, body);
  CHECK(read_text_file(path) == body);
  write_text_file(path, "replaced");
  CHECK(read_text_file(path) == "replaced");
  CHECK_THROWS_AS(read_text_file(dir + "/absent.txt"), ConfigError);
  fs::remove_all(dir);
}

#ifdef CSGEO_BIN

TEST_CASE("analyze accepts fixture names and spec files") {
  const std::string dir = tst::fresh_out_dir("an");
  CHECK(tst::run_cli("analyze legendrian_torus --out " + dir) == 0);
  CHECK(fs::exists(dir + "/analysis.json"));
  CHECK(fs::exists(dir + "/points.json"));

  const std::string dir2 = tst::fresh_out_dir("an");
  CHECK(tst::run_cli(std::string("analyze ") + CSGEO_FIXTURE_DIR +
                     "/legendrian_torus.json --grid 12x12 --out " + dir2) == 0);
  CHECK(fs::exists(dir2 + "/analysis.json"));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}

TEST_CASE("bad inputs exit with the configuration code") {
  const std::string dir = tst::fresh_out_dir("bad");
  write_text_file(dir + "/bad.json", "{\"components\": [\"u+\"]}");
  write_text_file(dir + "/notjson.json", "garbage");
  CHECK(tst::run_cli("analyze " + dir + "/bad.json --out " + dir) == 2);
  CHECK(tst::run_cli("analyze " + dir + "/notjson.json --out " + dir) == 2);
  CHECK(tst::run_cli("analyze no_such_fixture --out " + dir) == 2);
  CHECK(tst::run_cli("analyze legendrian_torus --grid 4x4 --out " + dir) == 2);
  CHECK(tst::run_cli("analyze legendrian_torus --grid abc --out " + dir) == 2);
  CHECK(tst::run_cli("bogus_subcommand") == 2);
  fs::remove_all(dir);
}

TEST_CASE("reconstruct exits 1 when no branch exists, 0 on success") {
  const std::string dir = tst::fresh_out_dir("rc");
  CHECK(tst::run_cli("reconstruct --beta 0.6 --out " + dir) == 1);
  CHECK(tst::run_cli("reconstruct --beta 1.0471975511965976 --grid 16x16 --out " +
                     dir) == 0);
  CHECK(fs::exists(dir + "/branches.json"));
  CHECK(fs::exists(dir + "/roundtrip.json"));
  CHECK(fs::exists(dir + "/immersion.csv"));
  fs::remove_all(dir);
}

TEST_CASE("family rejects degenerate angles and samples the circle") {
  const std::string dir = tst::fresh_out_dir("fam");
  CHECK(tst::run_cli("family --beta 0 --out " + dir) == 2);
  CHECK(tst::run_cli("family --beta 1.0471975511965976 -n 12 --out " + dir) == 0);
  CHECK(fs::exists(dir + "/family.csv"));
  fs::remove_all(dir);
}

TEST_CASE("verify: filter misses exit 2, hits exit 0, strict tol exits 1") {
  const std::string dir = tst::fresh_out_dir("vf");
  CHECK(tst::run_cli("verify --fixtures legendrian --out " + dir) == 0);
  CHECK(fs::exists(dir + "/verify_report.json"));
  CHECK(fs::exists(dir + "/verify_report.csv"));
  CHECK(tst::run_cli("verify --fixtures nomatch --out " + dir) == 2);
  // An absurdly tight global tolerance must fail honestly.
  CHECK(tst::run_cli("verify --tol 1e-12 --out " + dir) == 1);
  fs::remove_all(dir);
}

TEST_CASE("help and version exit cleanly") {
  CHECK(tst::run_cli("--help") == 0);
  CHECK(tst::run_cli("analyze --help") == 0);
  CHECK(tst::run_cli("--version") == 0);
}

#endif  // CSGEO_BIN

}  // TEST_SUITE

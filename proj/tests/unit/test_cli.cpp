#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <app/commands.hpp>
#include <app/config.hpp>
#include <kinscat/errors.hpp>

using namespace kinscat;
using namespace kinscat::app;

namespace {

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("kinscat_unit_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("empty text gives the defaults") {
    const RunConfig cfg = parse_config_text("# nothing here\n\n");
    const RunConfig def;
    CHECK(config_entries(cfg) == config_entries(def));
    CHECK_NOTHROW(validate(cfg));
  }

  TEST_CASE("key value parsing") {
    const auto cfg = parse_config_text(
        "model.preset = vpme  # comment\n"
        "gevrey.gamma = 0.6\n"
        "datum.modes = \"1:1e-3, 2:5e-4\"\n"
        "run.threads = 3\n");
    CHECK(cfg.model_preset == "vpme");
    CHECK(cfg.gevrey.gamma == 0.6);
    CHECK(cfg.threads == 3);
    const auto datum = build_datum(cfg);
    CHECK(datum(2, 0.0) == Complex(5e-4));
    CHECK(build_model(cfg).beta == 1.0);
    CHECK(parse_mode_list("1, 3,2") == std::vector<int>{1, 3, 2});
  }

  TEST_CASE("errors name the line and the violated hypothesis") {
    try {
      parse_config_text("grid.kmax = 4\nbogus.key = 1\n", "run.cfg");
      FAIL("unknown key accepted");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("run.cfg:2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("grid.kmax = four\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("grid.kmax\n"), ConfigError);

    auto cfg = parse_config_text("gevrey.gamma = 0.3\ngrid.hmax = 10\n");
    try {
      validate(cfg);
      FAIL("invalid config accepted");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("gamma in (1/3, 1)") != std::string::npos);
      CHECK(msg.find("grid.hmax") != std::string::npos);
    }
  }

  TEST_CASE("manifest round trip") {
    const auto dir = scratch_dir("manifest");
    auto cfg = parse_config_text("gevrey.sigma = 13.5\ndatum.width = 0.75\n");
    write_manifest(dir / "manifest.txt", "scatter", cfg);
    const auto again = parse_config(dir / "manifest.txt");
    CHECK(config_entries(again) == config_entries(cfg));
    CHECK(format_double(0.1) == "0.1");
    CHECK(csv_number(1.0) == "1.0000000000000000e+00");
  }

  TEST_CASE("exit codes") {
    std::ostringstream log;
    auto cfg = RunConfig{};
    cfg.output_dir = scratch_dir("penrose").string();
    cfg.penrose_kscan = 3;
    cfg.penrose_samples = 401;
    CHECK(run_command("penrose", cfg, log) == kExitOk);
    const auto csv = slurp(std::filesystem::path(cfg.output_dir) / "penrose.csv");
    CHECK(csv.rfind("k,omega_argmin,abs_D_min,winding,tail_bound,stable", 0) == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(cfg.output_dir) / "manifest.txt"));

    auto unstable = cfg;
    unstable.eq_kind = "two_stream";
    unstable.eq_v0 = 1.0;
    unstable.eq_width = 0.5;
    CHECK(run_command("penrose", unstable, log) == kExitHypothesis);

    auto big = cfg;
    big.output_dir = scratch_dir("scatter").string();
    big.datum_modes = "1:0.1";
    CHECK(run_command("scatter", big, log) == kExitNumerical);

    auto bad = cfg;
    bad.gevrey.gamma = 0.3;
    CHECK(run_command("penrose", bad, log) == kExitConfig);
    CHECK(run_command("nonsense", cfg, log) == kExitConfig);

    std::ostringstream st;
    CHECK(run_selftest(st) == 0);
    CHECK(st.str().find("FAIL") == std::string::npos);
  }
}

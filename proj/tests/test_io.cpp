#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "passlab/config.hpp"
#include "passlab/errors.hpp"
#include "passlab/output.hpp"
#include "passlab/run.hpp"
#include "passlab/units.hpp"

using namespace passlab;
namespace fs = std::filesystem;

namespace {

const char* kCompact = R"({
  "packet": {"x0": "0 um", "sigma": "1 um", "v0": "7.17 mm/s"},
  "detector1": {"start": "0 um", "end": "5 um", "rate": "2.3895e4 1/s"},
  "detector2": {"start": "20 um", "end": "25 um", "rate": "2.3895e4 1/s"},
  "grid": {"x_min": "-25 um", "x_max": "45 um", "points": 2048},
  "solver": {"dt": "0.1 us", "stage2_dt": "1 us", "entry_points": 64,
             "absorber_width": "8 um", "absorber_strength": "1e5 1/s", "tau_max": "auto"},
  "output": {"stride": 3},
  "kijowski": {"x": "10 um", "t_min": "0 ms", "t_max": "3 ms", "points": 301},
  "reset_state": {"snapshots": [{"rate": "2.3895e4 1/s", "time": "0.041 ms"}]}
})";

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("passlab_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "config.json";
  write_text(p, text);
  return p;
}

std::string config_error(const std::string& text) {
  try {
    parse_run_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("unit parsing") {
  CHECK(parse_quantity("1.83 um", Dimension::length) == doctest::Approx(1.83e-6));
  CHECK(parse_quantity("1.83 µm", Dimension::length) == doctest::Approx(1.83e-6));
  CHECK(parse_quantity("50nm", Dimension::length) == doctest::Approx(50e-9));
  CHECK(parse_quantity("0.717 cm/s", Dimension::velocity) == doctest::Approx(7.17e-3));
  CHECK(parse_quantity("7.17 mm/s", Dimension::velocity) == doctest::Approx(7.17e-3));
  CHECK(parse_quantity("0.041 ms", Dimension::time) == doctest::Approx(4.1e-5));
  CHECK(parse_quantity("1.959e3 1/s", Dimension::rate) == doctest::Approx(1959.0));
  CHECK(parse_quantity("2.3895e4 s^-1", Dimension::rate) == doctest::Approx(23895.0));
  CHECK(parse_quantity("3 1/ms", Dimension::rate) == doctest::Approx(3000.0));
  CHECK(parse_quantity("2782 s^-1/2", Dimension::coupling) == doctest::Approx(2782.0));
  CHECK(parse_quantity("132.905 u", Dimension::mass) == doctest::Approx(132.905 * 1.66053906660e-27));
  CHECK(parse_quantity("12.5", Dimension::length) == 12.5);
  CHECK(parse_quantity("174.8 um", Dimension::length) == 174.8e-6);
  CHECK(parse_quantity("0.167 ms", Dimension::time) == 0.167e-3);
  CHECK(parse_quantity("2.5e2 nm", Dimension::length) == 2.5e-7);
  CHECK_THROWS_AS(parse_quantity("1 furlong", Dimension::length), InvalidArgument);
  CHECK_THROWS_AS(parse_quantity("1 ms", Dimension::length), InvalidArgument);
  CHECK_THROWS_AS(parse_quantity("um", Dimension::length), InvalidArgument);
  CHECK_THROWS_AS(parse_quantity("", Dimension::length), InvalidArgument);
}

TEST_CASE("config parsing accepts units and keeps defaults") {
  const auto c = parse_run_config(kCompact);
  CHECK(c.experiment.packet.sigma_x == doctest::Approx(1e-6));
  CHECK(c.experiment.detector2.profile.support_begin() == doctest::Approx(20e-6));
  CHECK(c.experiment.absorber.width == doctest::Approx(8e-6));
  CHECK(std::isnan(c.experiment.tau_max));
  CHECK(c.output_stride == 3);
  const auto d = parse_run_config("{}");
  CHECK(d == default_run_config());
  CHECK(d.experiment.detector1.rates.decay_a == 2.3895e3);
  CHECK(d.discrete.config.bath.n_modes == 15);
  CHECK(d.discrete.exclusion == doctest::Approx(2.0 * d.discrete.config.packet.sigma_x));
}

TEST_CASE("config diagnostics name the field or the line") {
  CHECK(config_error(R"({"packet": {"sigma": "1 um", "speed": 1}})") == "packet.speed: unknown key");
  CHECK(config_error(R"({"solver": {"dt": "1 um"}})").find("solver.dt") == 0);
  CHECK(config_error(R"({"solver": {"method": "fast"}})").find("solver.method") == 0);
  CHECK(config_error(R"({"reset_state": {"snapshots": [{"rate": 1, "tme": 2}]}})")
            .find("reset_state.snapshots[0].tme") == 0);
  CHECK(config_error(R"({"grid": {"points": 1000}})").find("grid") == 0);
  CHECK(config_error(R"({"detector2": {"start": "10 um", "end": "30 um"}})").find("experiment") == 0);
  CHECK(config_error("{\n  \"packet\": {\n    \"sigma\": 1,,\n  }\n}").find("line 3:") == 0);
  CHECK(config_error("[1, 2]") == "expected an object");
}

TEST_CASE("config echo round-trips") {
  for (const char* text : {"{}", kCompact}) {
    const auto c = parse_run_config(text);
    const auto echo = echo_run_config(c);
    CHECK(parse_run_config(echo) == c);
    CHECK(echo_run_config(parse_run_config(echo)) == echo);
  }
  auto c = parse_run_config(R"({"detector1": {"chi": {"x": [0, 1e-5, 2e-5], "values": [0, 1, 0]}, "rate": 100},
                                "solver": {"t_end": "1 ms", "method": "per_entry"}})");
  CHECK(parse_run_config(echo_run_config(c)) == c);
  c.experiment.t_end = std::nan("");
  CHECK(!(parse_run_config(echo_run_config(c)) == parse_run_config(R"({"solver": {"t_end": "1 ms"}})")));
}

TEST_CASE("csv formatting") {
  CHECK(format_number(1.0) == "1.000000000e+00");
  CHECK(format_number(-2.5e-7) == "-2.500000000e-07");
  const auto dir = scratch("csv");
  const std::vector<double> a{1, 2, 3, 4, 5}, b{0.5, 0.25, 0.125, 0.0625, 0.03125};
  write_csv(dir / "t.csv", {{"x_m", a}, {"y_per_m", b}}, 2);
  CHECK(slurp(dir / "t.csv") ==
        "x_m,y_per_m\n1.000000000e+00,5.000000000e-01\n3.000000000e+00,1.250000000e-01\n"
        "5.000000000e+00,3.125000000e-02\n");
  const std::vector<double> short_col{1};
  CHECK_THROWS_AS(write_csv(dir / "u.csv", {{"x", a}, {"y", short_col}}), InvalidArgument);
}

TEST_CASE("missing or invalid config gives distinct exit codes") {
  std::ostringstream log;
  RunOptions opt;
  opt.subcommand = Subcommand::kijowski;
  opt.config_path = "/nonexistent/passlab.json";
  opt.out_dir = scratch("missing").string();
  CHECK(run(opt, log).exit_code == kExitUsage);
  CHECK(log.str().find("/nonexistent/passlab.json") != std::string::npos);

  const auto dir = scratch("invalid");
  opt.config_path = write_config(dir, R"({"packet": {"sigma": "-1 um"}})").string();
  opt.out_dir = dir.string();
  log.str("");
  CHECK(run(opt, log).exit_code == kExitConfig);
  CHECK(log.str().find("packet") != std::string::npos);

  CHECK(parse_subcommand("discrete-compare") == Subcommand::discrete_compare);
  CHECK(!parse_subcommand("fig3").has_value());
}

TEST_CASE("summary echoes the config and reruns are byte-identical") {
  const auto dir = scratch("rerun");
  const auto cfg_path = write_config(dir, kCompact);
  std::ostringstream log;
  for (auto sub : {Subcommand::kijowski, Subcommand::reset_state, Subcommand::passage}) {
    std::vector<std::string> first;
    RunOutcome a;
    for (int threads : {1, 4}) {
      RunOptions opt;
      opt.subcommand = sub;
      opt.config_path = cfg_path.string();
      opt.out_dir = (dir / (subcommand_name(sub) + std::to_string(threads))).string();
      opt.threads = threads;
      opt.emit_plots = true;
      const auto out = run(opt, log);
      REQUIRE(out.exit_code != kExitConfig);
      REQUIRE(out.exit_code != kExitNumerical);
      std::vector<std::string> csvs;
      for (const auto& f : out.files)
        if (f.ends_with(".csv")) csvs.push_back(slurp(fs::path(opt.out_dir) / f));
      CHECK(!csvs.empty());
      CHECK(fs::exists(fs::path(opt.out_dir) / "plot.py"));
      if (first.empty()) {
        first = csvs;
        a = out;
      } else {
        CHECK(csvs == first);
        CHECK(out.summary == a.summary);
      }
    }
    const auto summary = nlohmann::json::parse(a.summary);
    CHECK(parse_run_config(summary["config"].dump()) == parse_run_config(kCompact));
    CHECK(summary["subcommand"] == subcommand_name(sub));
  }
}

TEST_CASE("shipped configs parse") {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(PASSLAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto c = load_run_config(entry.path().string());
    CHECK(parse_run_config(echo_run_config(c)) == c);
    ++n;
  }
  CHECK(n >= 4);
  const auto cs = load_run_config(std::string(PASSLAB_CONFIG_DIR) + "/cesium.json");
  CHECK(cs == default_run_config());
  const auto bath = load_run_config(std::string(PASSLAB_CONFIG_DIR) + "/spin_bath.json");
  CHECK(bath.discrete.config.bath.omega_max == doctest::Approx(default_run_config().discrete.config.bath.omega_max));
  CHECK(bath.discrete.config.delta_t == doctest::Approx(default_run_config().discrete.config.delta_t));
}

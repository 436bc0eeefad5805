#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "output.hpp"
#include "qpgen/errors.hpp"

using namespace qpgen;
using nlohmann::json;

namespace {

json stark_config() {
  return json::parse(R"({
    "scenario": "stark_cut",
    "circuit": {"type": "transmon", "E_J_GHz": 3.025, "E_C_GHz": 0.056, "n_g": 0.0},
    "grid": {"omega_d_GHz": {"start": 40, "stop": 48, "count": 5}, "stark_shift_GHz": 0.003}
  })");
}

json kapitza_config() {
  return json::parse(R"({
    "scenario": "kapitza",
    "circuit": {"type": "squid", "E_J1_GHz": 81.6, "E_J2_GHz": 81.6, "E_C_GHz": 0.01},
    "grid": {"omega_d_GHz": 10, "phi_ac_over_2pi": [0.762, 0.765]}
  })");
}

}  // namespace

TEST(Config, ParsesAxesAndProfiles) {
  const auto c = cli::parse_config(stark_config(), "ci");
  EXPECT_EQ(c.scenario, cli::ScenarioKind::StarkCut);
  EXPECT_TRUE(c.ci);
  ASSERT_EQ(c.omega_d.size(), 5u);
  EXPECT_DOUBLE_EQ(c.omega_d[1], 42.0);
  EXPECT_DOUBLE_EQ(c.stark_target, 0.003);
  EXPECT_EQ(c.numerics.charge_cutoff, 20);
  EXPECT_EQ(c.stem, "stark_cut");
  const auto f = cli::parse_config(stark_config(), "full");
  EXPECT_EQ(f.numerics.charge_cutoff, 50);
  EXPECT_NE(c.hash, f.hash);

  const auto k = cli::parse_config(kapitza_config(), "full");
  EXPECT_NEAR(k.amplitude[0], 2 * M_PI * 0.762, 1e-15);
  EXPECT_EQ(k.numerics.m_initial, 5);
}

TEST(Config, RejectsUnknownKeys) {
  for (const char* path : {"/bogus", "/circuit/bogus", "/grid/bogus", "/environment/bogus"}) {
    json j = stark_config();
    j["environment"] = json::object();
    j[json::json_pointer(path)] = 1;
    EXPECT_THROW(cli::parse_config(j), ArgumentError) << path;
  }
  json j = stark_config();
  j["numerics"] = {{"m_maxx", 3}};
  EXPECT_THROW(cli::parse_config(j), ArgumentError);
}

TEST(Config, ValidationErrors) {
  json j = kapitza_config();
  j["circuit"]["c1"] = 0.6;
  j["circuit"]["c2"] = 0.6;
  try {
    cli::parse_config(j);
    FAIL() << "expected ContractError";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("c1 + c2 = 1"), std::string::npos);
  }
  j = stark_config();
  j["grid"]["omega_d_GHz"] = json::array({40.0, 40.0});
  EXPECT_THROW(cli::parse_config(j), ArgumentError);
  j = stark_config();
  j["circuit"]["type"] = "squid";
  EXPECT_THROW(cli::parse_config(j), ArgumentError);
  j = stark_config();
  j["scenario"] = "nope";
  EXPECT_THROW(cli::parse_config(j), ArgumentError);
  EXPECT_THROW(cli::parse_config(stark_config(), "huge"), ArgumentError);
  j = stark_config();
  j["numerics"] = {{"m_max", 10}, {"m_guard", 9}};
  EXPECT_THROW(cli::parse_config(j), ArgumentError);
}

TEST(Config, HashIgnoresKeyOrderAndOutput) {
  const auto a = cli::parse_config(stark_config());
  json reordered = json::parse(R"({
    "grid": {"stark_shift_GHz": 0.003, "omega_d_GHz": {"count": 5, "stop": 48, "start": 40}},
    "circuit": {"n_g": 0.0, "E_C_GHz": 0.056, "E_J_GHz": 3.025, "type": "transmon"},
    "scenario": "stark_cut",
    "output": {"dir": "elsewhere", "stem": "x"}
  })");
  const auto b = cli::parse_config(reordered);
  EXPECT_EQ(a.hash, b.hash);
  EXPECT_EQ(b.stem, "x");
  json changed = stark_config();
  changed["grid"]["stark_shift_GHz"] = 0.004;
  EXPECT_NE(a.hash, cli::parse_config(changed).hash);
  EXPECT_EQ(cli::hex64(cli::fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(cli::hex64(cli::fnv1a("a")), "af63dc4c8601ec8c");
}

TEST(Output, SeventeenDigitsRoundTrip) {
  for (double x : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 45.0}) {
    const std::string s = cli::fmt(x);
    EXPECT_EQ(std::strtod(s.c_str(), nullptr), x) << s;
  }
  EXPECT_EQ(cli::fmt(INFINITY), "inf");
  EXPECT_EQ(cli::fmt(-INFINITY), "-inf");
  EXPECT_EQ(cli::fmt(NAN), "nan");
  EXPECT_EQ(std::string(cli::kRateHeader),
            "grid_index,omega_d_GHz,amplitude,alpha,beta,n,junction,omega_GHz,gamma_per_s,T_s,xqp_star,flags");
}

TEST(Output, RateRowLayout) {
  scenarios::PointResult r;
  r.grid_index = 3;
  r.omega_d = 46.0;
  r.amplitude = 6.9;
  r.flags = {"restarted"};
  scenarios::StateRates s;
  s.name = "g";
  s.alpha = 0;
  rates::Channel c{0, 1, 2, 1, 95.5, 4.0, false};
  s.channels.channels = {c};
  s.summary = rates::parity_summary(s.channels);
  s.xqp = rates::steady_state_xqp(4.0);
  s.flags = {"truncation"};
  r.states = {s};
  const auto rows = cli::rate_rows(r, {});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "3,46,6.9000000000000004,0,*,*,*,*,4,0.25," + cli::fmt(s.xqp) + ",restarted;truncation");
  EXPECT_EQ(rows[1], "3,46,6.9000000000000004,0,1,2,1,95.5,4,0.25," + cli::fmt(s.xqp) + ",");
  // every row has the header's column count
  const auto cols = [](const std::string& x) { return std::count(x.begin(), x.end(), ','); };
  for (const auto& row : rows) EXPECT_EQ(cols(row), cols(cli::kRateHeader));

  scenarios::PointResult skipped;
  skipped.grid_index = 1;
  skipped.omega_d = 30.0;
  skipped.skipped = true;
  skipped.flags = {"no_bracket"};
  const auto srow = cli::rate_rows(skipped, {});
  ASSERT_EQ(srow.size(), 1u);
  EXPECT_EQ(srow[0], "1,30,0,*,*,*,*,*,nan,nan,nan,skipped;no_bracket");
}

TEST(Output, AtomicFileCommit) {
  const auto dir = std::filesystem::temp_directory_path() / "qpgen_atomic_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "rows.csv").string();
  std::filesystem::remove(path);
  {
    cli::AtomicFile f(path);
    f.line("a,b");
    f.flush();
    EXPECT_TRUE(std::filesystem::exists(f.partial_path()));
    EXPECT_FALSE(std::filesystem::exists(path));
    f.commit();
  }
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "a,b\n");
  EXPECT_FALSE(std::filesystem::exists(path + ".partial"));
  {
    cli::AtomicFile f((dir / "abandoned.csv").string());
    f.line("x");
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "abandoned.csv.partial"));
  std::filesystem::remove_all(dir);
}

TEST(Output, SvgBreaksOnNonFinite) {
  const std::string svg = cli::svg_plot("t", "x", "y", {{"s", {1, 2, 3, 4}, {1, NAN, 3, 4}}}, true);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  size_t count = 0;
  for (size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++count;
  EXPECT_EQ(count, 2u);
}

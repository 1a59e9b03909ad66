// Copyright 2026 The cscap Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "app/commands.hpp"

namespace fs = std::filesystem;
using cscap::app::CommandOptions;
using cscap::app::run_command;
using json = nlohmann::json;

namespace
{

const fs::path kConfigs = CSCAP_CONFIG_DIR;
const fs::path kTmp = CSCAP_TEST_TMP;

// Fresh scratch directory per call.
fs::path scratch(const std::string &name)
{
  const fs::path p = kTmp / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path &dir, const std::string &text)
{
  const fs::path p = dir / "run.ini";
  std::ofstream(p) << text;
  return p;
}

struct Run
{
  int code = -1;
  std::string out, err;
};

Run run(const std::string &cmd, CommandOptions opts)
{
  std::ostringstream out, err;
  Run r;
  r.code = run_command(cmd, opts, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json load(const fs::path &p) { return json::parse(slurp(p)); }

const char *kSmallSweep = R"(
[profile]
theta_im = 0.4
[potential]
kind = poschl_teller
V0 = 4
[grid]
L = 24
N = 800
[schedule]
start = 0.08
stop = 0.005
[window]
center_re = 3.5
center_im = -1.936491673103709
half_angle_deg = 10
rel = 0.25
[oracle]
region = 1 3 -1 -0.1
[tolerance]
rel = 1e-2
)";

}  // namespace

TEST_CASE("validate default profile")
{
  const fs::path out = scratch("validate");
  const Run r = run("validate", {.config = (kConfigs / "validate_default.ini").string(),
                                 .out_dir = out.string()});
  CHECK(r.code == 0);
  const json j = load(out / "validate.json");
  CHECK(j["passed"].get<bool>());
  CHECK(j["cutoff"]["margin"].get<double>() >= 0.01);
}

TEST_CASE("configuration errors exit with 2 and write nothing")
{
  const fs::path dir = scratch("bad");
  const fs::path out = dir / "out";
  auto expect_rejected = [&](const std::string &text) {
    const Run r = run("spectrum", {.config = write_config(dir, text).string(), .out_dir = out.string()});
    CHECK(r.code == 2);
    CHECK(!r.err.empty());
    CHECK(!fs::exists(out));
  };
  expect_rejected("[profile\nR = 1\n");
  expect_rejected("[profile]\nbeta0 = 0.7853981633974483\n");
  // |Re theta| + |Im theta| = tan(pi/8) sits on the boundary of the admissible set.
  expect_rejected("[profile]\ntheta_im = 0.41421356237309503\n");
  expect_rejected("[profile]\nunknown_key = 1\n");
  expect_rejected("[potential]\nkind = square_well\nV0 = -1\na = -2\n");
  expect_rejected("[grid]\nL = 5\n");

  const Run missing = run("spectrum", {.config = (dir / "nope.ini").string(), .out_dir = out.string()});
  CHECK(missing.code == 2);
  CHECK(run("frobnicate", {.config = write_config(dir, "").string()}).code == 2);
}

TEST_CASE("free CAP spectrum and compare")
{
  const fs::path out = scratch("davies");
  const CommandOptions opts{.config = (kConfigs / "davies_free.ini").string(), .out_dir = out.string()};
  REQUIRE(run("spectrum", opts).code == 0);
  const json s = load(out / "spectrum.json");
  CHECK(s["tag"] == "HepsTheta");
  CHECK(s["N"] == 1500);
  CHECK(s["eigenvalues"].size() == 1500);
  CHECK(s.contains("units"));

  REQUIRE(run("compare", opts).code == 0);
  const json fresh = load(out / "compare.json");
  CHECK(fresh["passed"].get<bool>());
  CHECK(fresh["rows"].size() == 5);

  // Re-ingesting the emitted spectrum gives the same verdict.
  const fs::path again = scratch("davies_reingest");
  CommandOptions re = opts;
  re.out_dir = again.string();
  re.spectrum_in = (out / "spectrum.json").string();
  REQUIRE(run("compare", re).code == 0);
  CHECK(load(again / "compare.json") == fresh);
}

TEST_CASE("deep square well has bound states on the negative axis")
{
  const fs::path out = scratch("well");
  REQUIRE(run("spectrum", {.config = (kConfigs / "square_well_bound_states.ini").string(),
                           .out_dir = out.string()})
            .code == 0);
  const json s = load(out / "spectrum.json");
  int negative = 0;
  for (const auto &e : s["eigenvalues"])
  {
    if (e["re"].get<double>() < -1.0)
    {
      ++negative;
      CHECK(std::abs(e["im"].get<double>()) < 1e-8);
    }
  }
  CHECK(negative == 2);
}

TEST_CASE("sweep output is deterministic and round-trips through compare")
{
  const fs::path dir = scratch("sweep");
  const fs::path cfg = write_config(dir, kSmallSweep);
  const fs::path a = dir / "a", b = dir / "b";
  REQUIRE(run("sweep", {.config = cfg.string(), .out_dir = a.string()}).code == 0);
  REQUIRE(run("sweep", {.config = cfg.string(), .out_dir = b.string(), .jobs = 2}).code == 0);
  CHECK(slurp(a / "tracks.csv") == slurp(b / "tracks.csv"));
  CHECK(slurp(a / "sweep.json") == slurp(b / "sweep.json"));
  CHECK(slurp(a / "tracks.csv").rfind("track_id,eps,re,im,residual\n", 0) == 0);

  const fs::path c = dir / "c", d = dir / "d";
  REQUIRE(run("compare", {.config = cfg.string(), .out_dir = c.string()}).code == 0);
  REQUIRE(run("compare", {.config = cfg.string(), .out_dir = d.string(),
                          .sweep_in = (a / "sweep.json").string()})
            .code == 0);
  const json fresh = load(c / "compare.json");
  CHECK(fresh["passed"].get<bool>());
  CHECK(fresh["rows"].size() == 1);
  CHECK(load(d / "compare.json") == fresh);
}

TEST_CASE("single eps sweep")
{
  const fs::path dir = scratch("single");
  std::string text = kSmallSweep;
  text.replace(text.find("start = 0.08\nstop = 0.005"), 25, "values = 0.02");
  REQUIRE(run("sweep", {.config = write_config(dir, text).string(), .out_dir = dir.string()}).code == 0);
  const std::string csv = slurp(dir / "tracks.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("multiplicity of the first resonance")
{
  const fs::path out = scratch("mult");
  const CommandOptions opts{.config = (kConfigs / "poschl_teller_multiplicity.ini").string(),
                            .out_dir = out.string()};
  REQUIRE(run("multiplicity", opts).code == 0);
  const std::string first = slurp(out / "multiplicity.json");
  const json j = json::parse(first);
  REQUIRE(j["contours"].size() == 2);
  CHECK(j["contours"][0]["name"] == "resonance");
  CHECK(j["contours"][0]["rounded"] == 1);
  CHECK(j["contours"][1]["rounded"] == 0);
  for (const auto &c : j["contours"])
  {
    CHECK(c["rounded"] == c["brute_force_count"]);
  }
  REQUIRE(run("multiplicity", opts).code == 0);
  CHECK(slurp(out / "multiplicity.json") == first);
}

TEST_CASE("oracle command")
{
  const fs::path dir = scratch("oracle");
  REQUIRE(run("oracle", {.config = write_config(dir, kSmallSweep).string(), .out_dir = dir.string()})
            .code == 0);
  const json j = load(dir / "oracle.json");
  REQUIRE(j["values"].size() == 1);
  CHECK(std::abs(j["values"][0]["z"]["re"].get<double>() - 3.5) < 1e-9);
}

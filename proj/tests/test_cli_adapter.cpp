// The command-line front end must be a thin adapter: byte-identical output
// to the corresponding library calls.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "msched/fixtures.hpp"
#include "msched/index_table.hpp"
#include "msched/simulate.hpp"

#ifndef MSCHED_CLI_PATH
#define MSCHED_CLI_PATH "msched"
#endif

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const std::string& out_path) {
  std::string cmd = std::string(MSCHED_CLI_PATH) + " " + args + " --out " + out_path;
  return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("index subcommand emits exactly the library CSV") {
  std::string jobs = msched::fixtures::fixture_dir() + "/jobs";
  std::string out_path = "cli_adapter_index.csv";
  REQUIRE(run_cli("index --job " + jobs + "/ihr-dhr-d.job --n 5", out_path) == 0);

  const auto& f = msched::fixtures::get("ihr-dhr-d");
  msched::discounted::Engine<double> e(msched::as_two_stage(f.job), f.beta);
  std::string expected = msched::discounted::to_csv(msched::discounted::build_index_table(e, 5));
  CHECK(slurp(out_path) == expected);
}

TEST_CASE("simulate subcommand emits exactly the library CSV") {
  std::string scn = msched::fixtures::fixture_dir() + "/scenarios/two-job-closed.scn";
  std::string out_path = "cli_adapter_sim.csv";
  REQUIRE(run_cli("simulate --scenario " + scn + " --policy fb --seed 31337", out_path) == 0);

  const auto& f = msched::fixtures::get("dhr-dhr-a");
  msched::sim::ScenarioSpec spec;
  spec.mode = msched::sim::ScenarioSpec::Mode::Closed;
  spec.classes = {{f.job, 0.0}, {f.job, 0.0}};
  spec.beta = 0.9;
  spec.replications = 2000;
  spec.seed = 31337;
  msched::sim::Policy fb;
  fb.kind = msched::sim::Policy::Kind::Fb;
  std::string expected = msched::sim::to_csv({msched::sim::run(spec, fb)});
  CHECK(slurp(out_path) == expected);
}

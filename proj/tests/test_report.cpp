#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "msched/index_table.hpp"
#include "msched/report.hpp"

namespace fx = msched::fixtures;
namespace disc = msched::discounted;

TEST_CASE("fixture catalog") {
  CHECK(fx::ids().size() == 13);
  CHECK(fx::get("dhr-dhr-a").kind == fx::Fixture::Kind::DiscountedTable);
  CHECK(fx::get("k-example-3").job.num_stages() == 3);
  CHECK_THROWS_AS(fx::get("nope"), msched::UnknownFixture);
}

TEST_CASE("golden comparison flags deviations without failing") {
  auto check = msched::report::check_fixture(fx::get("dhr-dhr-a"));
  CHECK(check.pass);
  CHECK(check.deviations == 2);
  CHECK(check.mismatches == 0);
  CHECK(check.checked == 84);
  std::string text = msched::report::render(check, false);
  CHECK(text.find("DEV") != std::string::npos);
  CHECK(text.find("PASS") != std::string::npos);
}

TEST_CASE("index table CSV layout") {
  const auto& f = fx::get("ihr-dhr-d");
  disc::Engine<double> e(msched::as_two_stage(f.job), f.beta);
  disc::IndexTable t = disc::build_index_table(e, 4);
  std::string csv = disc::to_csv(t);
  CHECK(csv.rfind("stage,n,mu,W,phi,case\n", 0) == 0);
  CHECK(csv.find("1,inf,,") != std::string::npos);
  CHECK(csv.find("2,0,0.3000,2.7000,,IHR-DHR-D") != std::string::npos);
  CHECK(csv.find("1,0,0.5000,1.2482,3,IHR-DHR-D") != std::string::npos);

  std::string table = disc::render_table(t);
  CHECK(table.find("case: IHR-DHR-D n2*=3") != std::string::npos);
  CHECK(table.find("phi") != std::string::npos);
}

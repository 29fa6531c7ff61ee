#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msched/discounted.hpp"
#include "msched/fixtures.hpp"

using msched::ExtInt;
using msched::JobState;
using msched::TwoStageJob;
namespace disc = msched::discounted;
namespace fx = msched::fixtures;

namespace {

const double kBeta = 0.9;

// four printed decimals: absolute tolerance 5e-5
bool near4(double a, double b) { return std::abs(a - b) <= 5e-5; }

disc::Engine<double> engine(const std::string& fixture_id) {
  return disc::Engine<double>(msched::as_two_stage(fx::get(fixture_id).job), kBeta);
}

void check_row(const disc::Engine<double>& e, const std::vector<double>& w1_expected) {
  for (std::size_t n = 0; n < w1_expected.size(); ++n) {
    double got = e.w1(ExtInt(static_cast<std::int64_t>(n)));
    CAPTURE(n);
    CAPTURE(got);
    CHECK(near4(got, w1_expected[n]));
  }
}

}  // namespace

TEST_CASE("dhr-dhr-a reference values") {
  auto e = engine("dhr-dhr-a");
  CHECK(e.whittle_case() == disc::Case::DhrDhr);
  CHECK(near4(e.w2(1), 2.2500));
  // the printed reference lists 4.0500 here; the defining formula gives 4.5
  CHECK(e.w2(0) == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(near4(e.psi(0, 0), 1.3966));
  CHECK(near4(e.psi(0, 1), 1.5011));
  CHECK(near4(e.psi(2, 3), 0.5503));
  CHECK(near4(e.psi(6, 6), 0.0420));
  CHECK(e.phi(0) == ExtInt(1));
  CHECK(e.phi(3) == ExtInt(3));
  CHECK(e.phi(6) == ExtInt(6));
  check_row(e, {1.5011, 0.9445, 0.5503, 0.3029, 0.1601, 0.0826, 0.0420});
  CHECK(near4(e.whittle(JobState::at(1, 2)), 0.5503));

  auto tag = e.classify();
  CHECK(tag.subcase == disc::Subcase::A);
  CHECK_FALSE(tag.n2_star.has_value());
  CHECK_FALSE(tag.n1_star.has_value());
}

TEST_CASE("dhr-dhr-b reference values") {
  auto e = engine("dhr-dhr-b");
  CHECK(near4(e.job().stage1.hazard(1), 0.4111));
  CHECK(near4(e.w2(1), 2.0455));
  CHECK(near4(e.w2(6), 0.9008));
  CHECK(near4(e.psi(2, 2), 1.0673));
  check_row(e, {1.4402, 1.2060, 1.0673, 1.0124, 0.9949, 0.9897, 0.9882});
  for (std::int64_t n1 = 0; n1 <= 6; ++n1)
    CHECK(e.phi(n1) == ExtInt(std::vector<std::int64_t>{1, 1, 2, 2, 2, 2, 2}[n1]));

  auto tag = e.classify();
  CHECK(tag.subcase == disc::Subcase::B);
  REQUIRE(tag.n2_star.has_value());
  CHECK(*tag.n2_star == ExtInt(2));
}

TEST_CASE("dhr-dhr-c reference values") {
  auto e = engine("dhr-dhr-c");
  CHECK(near4(e.psi(0, 1), 1.2771));
  CHECK(near4(e.psi(2, 5), 0.9029));
  check_row(e, {1.2771, 1.0645, 0.9029, 0.8264, 0.7914, 0.7772, 0.7717});
  CHECK(e.phi(0) == ExtInt(1));
  CHECK(e.phi(1) == ExtInt(2));
  CHECK(e.phi(2) == ExtInt(5));
  CHECK(e.phi(3).is_infinite());
  CHECK(e.phi(6).is_infinite());

  auto tag = e.classify();
  CHECK(tag.subcase == disc::Subcase::C);
  REQUIRE(tag.n1_star.has_value());
  CHECK(*tag.n1_star == ExtInt(2));
}

TEST_CASE("ihr-ihr reference values") {
  auto e = engine("ihr-ihr");
  CHECK(e.whittle_case() == disc::Case::IhrIhr);
  CHECK(near4(e.w2(0), 5.3967));
  CHECK(near4(e.w2(6), 8.9299));
  check_row(e, {2.4696, 2.8177, 2.9882, 3.0720, 3.1135, 3.1341, 3.1444});
  CHECK_THROWS_AS((void)e.phi(0), msched::NotApplicable);
  CHECK_THROWS_AS((void)e.psi(0, 0), msched::NotApplicable);
  // w1(inf) < w2(0)
  CHECK(e.w1(ExtInt::infinity()) < e.w2(0));
  CHECK(e.classify().subcase == disc::Subcase::None);
}

TEST_CASE("dhr-ihr reference values") {
  auto e = engine("dhr-ihr");
  CHECK(e.whittle_case() == disc::Case::DhrIhr);
  CHECK(near4(e.w2(0), 5.3967));
  check_row(e, {2.0922, 1.3076, 0.8504, 0.7096, 0.6756, 0.6679, 0.6661});
  // w2(0) > w1(0)
  CHECK(e.w2(0) > e.w1(0));
}

TEST_CASE("ihr-dhr-d reference values") {
  auto e = engine("ihr-dhr-d");
  CHECK(e.whittle_case() == disc::Case::IhrDhr);
  CHECK(near4(e.w2(0), 2.7000));
  CHECK(near4(e.w2(6), 1.0028));
  // the printed reference lists 1.2483; exact evaluation gives 1.2482484
  CHECK(near4(e.psi(0, 3), 1.24825));
  CHECK(near4(e.psi(6, 2), 1.5186));
  check_row(e, {1.24825, 1.3868, 1.4545, 1.4890, 1.5060, 1.5144, 1.5186});
  for (std::int64_t n1 = 0; n1 <= 6; ++n1)
    CHECK(e.phi(n1) == ExtInt(std::vector<std::int64_t>{3, 3, 2, 2, 2, 2, 2}[n1]));

  auto tag = e.classify();
  CHECK(tag.subcase == disc::Subcase::D);
  REQUIRE(tag.n2_star.has_value());
  CHECK(*tag.n2_star == ExtInt(3));
  REQUIRE(tag.n2_circ.has_value());
  CHECK(tag.n2_circ->is_finite());
}

TEST_CASE("ihr-dhr-e-finite reference values") {
  auto e = engine("ihr-dhr-e-finite");
  CHECK(near4(e.w2(0), 2.9250));
  CHECK(near4(e.psi(0, 3), 1.0627));
  CHECK(near4(e.psi(3, 6), 1.4513));
  CHECK(e.phi(0).is_infinite());
  CHECK(e.phi(1).is_infinite());
  CHECK(e.phi(2) == ExtInt(9));
  CHECK(e.phi(3) == ExtInt(6));
  CHECK(e.phi(6) == ExtInt(4));
  check_row(e, {1.1169, 1.2660, 1.3717, 1.4513, 1.5115, 1.5568, 1.5922});

  auto tag = e.classify();
  CHECK(tag.subcase == disc::Subcase::EFinite);
  REQUIRE(tag.n1_star.has_value());
  CHECK(*tag.n1_star == ExtInt(2));
}

TEST_CASE("ihr-dhr-e-infinite reference values") {
  auto e = engine("ihr-dhr-e-infinite");
  CHECK(near4(e.w2(0), 3.6000));
  CHECK(near4(e.psi(0, 0), 1.2618));
  CHECK(near4(e.psi(6, 6), 2.2808));
  for (std::int64_t n1 = 0; n1 <= 6; ++n1) CHECK(e.phi(n1).is_infinite());
  check_row(e, {1.8815, 2.0967, 2.1985, 2.2476, 2.2717, 2.2837, 2.2896});

  auto tag = e.classify();
  CHECK(tag.subcase == disc::Subcase::EInfinite);
  REQUIRE(tag.n1_star.has_value());
  CHECK(tag.n1_star->is_infinite());
}

TEST_CASE("ordering lemmas on the mixed fixtures") {
  for (const char* id : {"dhr-dhr-a", "dhr-dhr-b", "dhr-dhr-c"}) {
    auto e = engine(id);
    // psi(0,0) < w2(0)
    CHECK(e.psi(0, 0) < e.w2(0));
    // w2(n2) decreasing, w1(n1) decreasing
    for (std::int64_t n = 0; n < 12; ++n) {
      CHECK(e.w2(n) >= e.w2(n + 1));
      CHECK(e.w1(n) >= e.w1(n + 1));
    }
    // w2(phi(n1)) >= w1(n1) > w2(phi(n1)+1) whenever phi is finite
    for (std::int64_t n1 = 0; n1 < 8; ++n1) {
      ExtInt p = e.phi(n1);
      if (p.is_finite()) {
        CHECK(e.w2(p) >= e.w1(n1));
        CHECK(e.w1(n1) > e.w2(ExtInt(p.value() + 1)));
      } else {
        CHECK(e.w2(ExtInt::infinity()) >= e.w1(n1));
      }
    }
    // phi increasing
    for (std::int64_t n1 = 0; n1 < 8; ++n1) CHECK(e.phi(n1) <= e.phi(n1 + 1));
    // lemma (iv): psi(n1,n2) <= w2(n2+1)  iff  psi(n1,n2+1) <= w2(n2+1)
    for (std::int64_t n1 = 0; n1 < 4; ++n1)
      for (std::int64_t n2 = 0; n2 < 10; ++n2)
        CHECK((e.psi(n1, n2) <= e.w2(n2 + 1)) == (e.psi(n1, n2 + 1) <= e.w2(n2 + 1)));
  }
  for (const char* id : {"ihr-dhr-d", "ihr-dhr-e-finite", "ihr-dhr-e-infinite"}) {
    auto e = engine(id);
    // w1 increasing, phi decreasing
    for (std::int64_t n = 0; n < 10; ++n) {
      CHECK(e.w1(n) <= e.w1(n + 1));
      CHECK(e.phi(n) >= e.phi(n + 1));
    }
  }
  for (const char* id : {"ihr-ihr", "dhr-ihr"}) {
    auto e = engine(id);
    for (std::int64_t n = 0; n < 10; ++n) CHECK(e.w2(n) <= e.w2(n + 1));
  }
}

TEST_CASE("whittle index in exact mode matches float mode") {
  const fx::Fixture& f = fx::get("dhr-dhr-b");
  disc::Engine<double> ed(msched::as_two_stage(f.job), kBeta);
  disc::Engine<msched::Rational> ex(msched::as_two_stage(fx::exact_job("dhr-dhr-b")),
                                    msched::Rational(9, 10));
  for (std::int64_t n = 0; n <= 4; ++n) {
    CHECK(msched::to_double(ex.w2(n)) == doctest::Approx(ed.w2(n)).epsilon(1e-12));
    CHECK(msched::to_double(ex.w1(n)) == doctest::Approx(ed.w1(n)).epsilon(1e-9));
  }
  CHECK(ex.classify().subcase == disc::Subcase::B);
}

TEST_CASE("unsupported classes are rejected") {
  using DistD = msched::ServiceDistribution<double>;
  TwoStageJob<double> bad{DistD::from_hazards({0.5, 0.25, 1.0}), DistD::geometric(0.5), 1.0};
  CHECK_THROWS_AS(disc::Engine<double>(bad, kBeta), msched::UnsupportedClass);
}

TEST_CASE("subcase-A merge chain is nonincreasing toward a common limit") {
  auto e = engine("dhr-dhr-a");
  // greedy merge of the two per-stage sequences, largest remaining first
  std::int64_t i1 = 0, i2 = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (int m = 0; m < 60; ++m) {
    double head2 = e.w2(i2), head1 = e.w1(i1);
    double next = std::max(head1, head2);
    (head2 >= head1 ? i2 : i1) += 1;
    CHECK(next <= prev + 1e-12);
    prev = next;
  }
  CHECK(i1 > 0);
  CHECK(i2 > 0);
  // both chains close at the same limit
  CHECK(e.w1(msched::ExtInt::infinity()) ==
        doctest::Approx(e.w2(msched::ExtInt::infinity())).epsilon(1e-12));
}

TEST_CASE("geometric stages route through the general cases") {
  using DistD = msched::ServiceDistribution<double>;
  auto geo = [](double mu) { return DistD::geometric(mu); };
  auto mixd = [](double a, double b) {
    return DistD::geometric_mixture({0.5, 0.5}, {a, b});
  };

  // both geometric: routed DHR-DHR, subcase C with witness -1
  disc::Engine<double> gg({geo(0.6), geo(0.3), 1.0}, kBeta);
  CHECK(gg.whittle_case() == disc::Case::DhrDhr);
  auto tag = gg.classify();
  CHECK(tag.subcase == disc::Subcase::C);
  CHECK(*tag.n1_star == msched::ExtInt(-1));
  for (std::int64_t n : {0, 4}) {
    CHECK(gg.w2(n) == doctest::Approx(0.3 * 9.0));
    CHECK(gg.w1(n) ==
          doctest::Approx(0.3 * (0.9 * 0.6) / (0.1 + 0.9 * 0.9) * 9.0).epsilon(1e-12));
  }

  // geometric first, mixed-decay second: subcase B with n2* = phi(0)
  disc::Engine<double> gd({geo(0.9), mixd(0.5, 0.05), 1.0}, kBeta);
  auto tag_gd = gd.classify();
  CHECK(tag_gd.subcase == disc::Subcase::B);
  CHECK(*tag_gd.n2_star == gd.phi(0));
  for (std::int64_t n = 0; n < 6; ++n) CHECK(gd.w1(n) == doctest::Approx(gd.w1(n + 1)));

  // decaying first, geometric second: subcase C with witness -1
  disc::Engine<double> dg({mixd(0.8, 0.2), geo(0.4), 1.0}, kBeta);
  auto tag_dg = dg.classify();
  CHECK(tag_dg.subcase == disc::Subcase::C);
  CHECK(*tag_dg.n1_star == msched::ExtInt(-1));
  CHECK(dg.phi(0).is_infinite());

  // rising first, geometric second: routed IHR-DHR, subcase E with n1* inf
  using GH = DistD;
  disc::Engine<double> ig({GH::geom_hazard(0.2, 1.0, 0.5), geo(0.4), 1.0}, kBeta);
  CHECK(ig.whittle_case() == disc::Case::IhrDhr);
  auto tag_ig = ig.classify();
  CHECK(tag_ig.subcase == disc::Subcase::EInfinite);
}

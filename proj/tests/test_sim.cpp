#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "msched/fixtures.hpp"
#include "msched/jobspec.hpp"
#include "msched/joint_mdp.hpp"
#include "msched/philox.hpp"
#include "msched/simulate.hpp"

using msched::MultistageJob;
using DistD = msched::ServiceDistribution<double>;
namespace sim = msched::sim;

namespace {

sim::ScenarioSpec closed_spec(std::vector<MultistageJob<double>> jobs, double beta,
                              std::int64_t reps, std::uint64_t seed = 7) {
  sim::ScenarioSpec s;
  s.mode = sim::ScenarioSpec::Mode::Closed;
  for (auto& j : jobs) s.classes.push_back({std::move(j), 0.0});
  s.beta = beta;
  s.replications = reps;
  s.seed = seed;
  return s;
}

sim::Policy policy(sim::Policy::Kind kind) {
  sim::Policy p;
  p.kind = kind;
  return p;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  using sim::Philox;
  auto zero = Philox::round10({0, 0, 0, 0}, 0, 0);
  CHECK(zero == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu,
                                             0x9b00dbd8u});
  auto ones = Philox::round10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                              0xffffffffu, 0xffffffffu);
  CHECK(ones == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u,
                                             0x6d5451fdu});
  auto pi = Philox::round10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            0xa4093822u, 0x299f31d0u);
  CHECK(pi == std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u,
                                           0x24126ea1u});
}

TEST_CASE("duration sampling matches the law") {
  DistD table = DistD::from_hazards({0.5, 0.0, 0.0, 1.0});
  sim::Philox gen(99);
  std::int64_t ones = 0, fours = 0, n = 20000;
  for (std::int64_t i = 0; i < n; ++i) {
    std::int64_t s = sim::detail::sample_duration(table, gen.uniform(1, i, 0, 0));
    if (s == 1) ++ones;
    else if (s == 4) ++fours;
    else FAIL("impossible duration sampled");
  }
  CHECK(std::abs(ones / double(n) - 0.5) < 0.02);
  CHECK(ones + fours == n);

  // defective law: the never branch appears with the surviving mass
  DistD defective = DistD::geom_hazard(0.5, 0.0, 0.5);
  std::int64_t never = 0;
  for (std::int64_t i = 0; i < n; ++i)
    if (sim::detail::sample_duration(defective, gen.uniform(2, i, 0, 0)) ==
        sim::detail::kNever)
      ++never;
  CHECK(std::abs(never / double(n) - defective.survival_limit()) < 0.02);
}

TEST_CASE("one immediate job costs exactly one slot") {
  MultistageJob<double> job{{DistD::geometric(1.0)}, 1.0};
  for (auto kind : {sim::Policy::Kind::Fcfs, sim::Policy::Kind::Fb, sim::Policy::Kind::Srpt}) {
    sim::SimResult r = sim::run(closed_spec({job}, 0.9, 50), policy(kind));
    CHECK(r.find("discounted_cost")->mean == 1.0);
    CHECK(r.find("flowtime_cost")->mean == 1.0);
  }
}

TEST_CASE("deterministic stage chain conserves service slots") {
  // stages of fixed lengths 2 and 3: flow time is exactly 5 on every path
  MultistageJob<double> job{{DistD::from_hazards({0.0, 1.0}), DistD::from_hazards({0.0, 0.0, 1.0})},
                            1.0};
  sim::SimResult r = sim::run(closed_spec({job}, 0.9, 25), policy(sim::Policy::Kind::Fcfs));
  CHECK(r.find("flowtime_cost")->mean == 5.0);
  CHECK(r.raw_flowtime.maxCoeff() == 5.0);
  CHECK(r.raw_flowtime.minCoeff() == 5.0);
}

TEST_CASE("identical seeds reproduce bitwise, different seeds do not") {
  MultistageJob<double> job = msched::fixtures::get("dhr-dhr-b").job;
  sim::ScenarioSpec a = closed_spec({job, job}, 0.9, 200, 11);
  sim::SimResult r1 = sim::run(a, policy(sim::Policy::Kind::Fb));
  sim::SimResult r2 = sim::run(a, policy(sim::Policy::Kind::Fb));
  CHECK((r1.raw_discounted == r2.raw_discounted).all());
  a.seed = 12;
  sim::SimResult r3 = sim::run(a, policy(sim::Policy::Kind::Fb));
  CHECK_FALSE((r1.raw_discounted == r3.raw_discounted).all());
}

TEST_CASE("two identical geometric jobs: simulated cost matches the chain value") {
  // alive-count chain: v1 = 1/(1-beta(1-mu)), v2 = (2 + beta mu v1)/(1-beta(1-mu))
  double mu = 0.5, beta = 0.9;
  double v1 = 1.0 / (1.0 - beta * (1.0 - mu));
  double v2 = (2.0 + beta * mu * v1) / (1.0 - beta * (1.0 - mu));
  MultistageJob<double> job{{DistD::geometric(mu)}, 1.0};
  for (auto kind : {sim::Policy::Kind::Fcfs, sim::Policy::Kind::Fb,
                    sim::Policy::Kind::RandomNonIdle}) {
    sim::SimResult r = sim::run(closed_spec({job, job}, beta, 40000), policy(kind));
    const auto* m = r.find("discounted_cost");
    CAPTURE(r.policy);
    CHECK(std::abs(m->mean - v2) < 3.0 * (m->ci_hi - m->mean) + 1e-9);
  }
}

TEST_CASE("gittins policy tracks the two-job optimum on the benchmark scenario") {
  const auto& f = msched::fixtures::get("dhr-dhr-a");
  double opt = msched::mdp::exact_two_job_optimum(f.job, f.job, 0.9, {200});
  sim::SimResult r =
      sim::run(closed_spec({f.job, f.job}, 0.9, 4000, 3), policy(sim::Policy::Kind::Gittins));
  const auto* m = r.find("discounted_cost");
  CHECK(std::abs(m->mean - opt) < 3.0 * (m->ci_hi - m->mean));
}

TEST_CASE("open mode is stable, deterministic, and rejects overload") {
  sim::ScenarioSpec s;
  s.mode = sim::ScenarioSpec::Mode::Open;
  s.classes.push_back({{{DistD::geometric(0.5)}, 1.0}, 0.1});
  s.horizon = 30000;
  s.replications = 8;
  s.seed = 5;
  sim::SimResult r = sim::run(s, policy(sim::Policy::Kind::Fcfs));
  const auto* m = r.find("avg_queue_cost");
  REQUIRE(m != nullptr);
  CHECK(m->mean > 0.05);
  CHECK(m->mean < 2.0);
  CHECK_FALSE(r.instability_warning);
  sim::SimResult r2 = sim::run(s, policy(sim::Policy::Kind::Fcfs));
  CHECK((r.raw_average == r2.raw_average).all());

  sim::ScenarioSpec overload = s;
  overload.classes[0].arrival_prob = 0.6;  // lambda E[S] = 1.2
  CHECK_THROWS_AS(sim::Simulator(overload, policy(sim::Policy::Kind::Fcfs)),
                  msched::SpecParseError);
}

TEST_CASE("scenario and job-spec files round-trip") {
  std::string text =
      "mode closed\n"
      "beta 9/10\n"
      "seed 21\n"
      "reps 50\n"
      "job begin\n"
      "h 2\n"
      "stage geometric 1/2\n"
      "stage mixture 1/2 4/5 1/2 1/10\n"
      "job end\n"
      "job begin\n"
      "h 1\n"
      "stage geomhazard 1/2 0 1/2\n"
      "job end\n";
  sim::ScenarioSpec s = msched::spec::parse_scenario_string(text);
  CHECK(s.classes.size() == 2);
  CHECK(s.beta.value() == 0.9);
  CHECK(s.replications == 50);
  CHECK(s.classes[0].job.h == 2.0);
  CHECK(s.classes[0].job.stages[1].kind() ==
        DistD::Kind::GeometricMixture);

  // exact job spec round-trips bit-for-bit
  using msched::Rational;
  std::string jobtext =
      "h 3/2\nbeta 9/10\nstage hazard 1/2 0 0 1\nstage geometric 1/3\n"
      "stage mixture 1/2 4/5 1/2 3/10\nstage geomhazard 1/2 1 4/5\n";
  auto spec1 = msched::spec::parse_job_string<Rational>(jobtext);
  std::string written = msched::spec::write_job(spec1);
  auto spec2 = msched::spec::parse_job_string<Rational>(written);
  CHECK(msched::spec::write_job(spec2) == written);
  CHECK(spec1.job.h == spec2.job.h);
  CHECK(spec1.beta == spec2.beta);
  REQUIRE(spec1.job.stages.size() == spec2.job.stages.size());
  for (std::size_t i = 0; i < spec1.job.stages.size(); ++i)
    CHECK(spec1.job.stages[i] == spec2.job.stages[i]);

  CHECK_THROWS_AS(msched::spec::parse_job_string<Rational>("h 1\n"),
                  msched::SpecParseError);
  CHECK_THROWS_AS(msched::spec::parse_scenario_string("mode sideways\n"),
                  msched::SpecParseError);
}

TEST_CASE("gittins simulation attains the optimum on every discounted fixture") {
  for (const char* id : {"dhr-dhr-a", "dhr-dhr-b", "dhr-dhr-c", "ihr-ihr", "dhr-ihr",
                         "ihr-dhr-d", "ihr-dhr-e-finite", "ihr-dhr-e-infinite"}) {
    const auto& f = msched::fixtures::get(id);
    double opt = msched::mdp::exact_two_job_optimum(f.job, f.job, 0.9, {150});
    sim::SimResult r = sim::run(closed_spec({f.job, f.job}, 0.9, 100000, 404),
                                policy(sim::Policy::Kind::Gittins));
    const auto* m = r.find("discounted_cost");
    CAPTURE(id);
    CAPTURE(opt);
    CAPTURE(m->mean);
    CHECK(opt >= m->ci_lo);
    CHECK(opt <= m->ci_hi);
  }
}

TEST_CASE("queue-cap crossings raise the instability warning") {
  sim::ScenarioSpec s;
  s.mode = sim::ScenarioSpec::Mode::Open;
  s.classes.push_back({{{DistD::geometric(0.3)}, 1.0}, 0.25});  // load 0.83, bursty
  s.horizon = 4000;
  s.replications = 2;
  s.seed = 9;
  s.queue_cap = 4;
  sim::SimResult r = sim::run(s, policy(sim::Policy::Kind::Fcfs));
  CHECK(r.instability_warning);
}

TEST_CASE("decimal literals parse as exact rationals") {
  using msched::Rational;
  CHECK(msched::parse_rational("0.25") == Rational(1, 4));
  CHECK(msched::parse_rational("-1.5") == Rational(-3, 2));
  CHECK(msched::parse_rational("7") == Rational(7));
  CHECK(msched::parse_rational("3/4") == Rational(3, 4));
  CHECK_THROWS(msched::parse_rational("1/0"));
  CHECK_THROWS(msched::parse_rational("abc"));
  auto spec = msched::spec::parse_job_string<Rational>("h 1.5\nstage geometric 0.5\n");
  CHECK(spec.job.h == Rational(3, 2));
}

TEST_CASE("thread count does not change the results") {
  MultistageJob<double> job = msched::fixtures::get("dhr-dhr-b").job;
  sim::ScenarioSpec s = closed_spec({job, job}, 0.9, 600, 77);
  sim::SimResult serial = sim::run(s, policy(sim::Policy::Kind::Gittins));
  s.threads = 4;
  sim::SimResult parallel = sim::run(s, policy(sim::Policy::Kind::Gittins));
  CHECK((serial.raw_discounted == parallel.raw_discounted).all());
  CHECK((serial.raw_flowtime == parallel.raw_flowtime).all());
}

TEST_CASE("oracle-sourced index policy matches the closed-form one") {
  MultistageJob<double> job = msched::fixtures::get("dhr-dhr-b").job;
  sim::ScenarioSpec s = closed_spec({job, job}, 0.9, 200, 5);
  sim::Policy closed{sim::Policy::Kind::Gittins, sim::Policy::IndexSource::ClosedForm};
  sim::Policy oracle{sim::Policy::Kind::Gittins, sim::Policy::IndexSource::Oracle};
  sim::SimResult a = sim::run(s, closed);
  sim::SimResult b = sim::run(s, oracle);
  // the tables agree to ~1e-8; only deep-tail states whose own index gap is
  // below that can flip, so at most a few paths may differ, by almost nothing
  int differing = static_cast<int>(((a.raw_discounted - b.raw_discounted).abs() > 0).count());
  CHECK(differing <= 10);
  CHECK(std::abs(a.find("discounted_cost")->mean - b.find("discounted_cost")->mean) < 0.01);

  // the recursive source is the undiscounted index; it needs no beta
  sim::ScenarioSpec open_spec;
  open_spec.mode = sim::ScenarioSpec::Mode::Open;
  open_spec.classes.push_back({{{DistD::geometric(0.5), DistD::geometric(0.25)}, 1.0}, 0.05});
  open_spec.horizon = 2000;
  open_spec.replications = 3;
  sim::Policy rec{sim::Policy::Kind::Gittins, sim::Policy::IndexSource::Recursive};
  CHECK_NOTHROW(sim::run(open_spec, rec));
  CHECK_THROWS_AS(sim::Simulator(open_spec, oracle), msched::NotApplicable);
}

// Command-line front end: compute index tables, classify cases, verify the
// closed forms against the MDP oracle, cross-check the profit-envelope and
// recursive routes, run scheduling simulations, and reproduce the bundled
// reference tables.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

#include "msched/average.hpp"
#include "msched/fixtures.hpp"
#include "msched/index_table.hpp"
#include "msched/jobspec.hpp"
#include "msched/joint_mdp.hpp"
#include "msched/mdp.hpp"
#include "msched/report.hpp"
#include "msched/simulate.hpp"
#include "msched/sjp.hpp"

namespace {

using msched::JobState;
using msched::Rational;

struct Output {
  std::string path;  // empty: stdout
  void write(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream out(path);
    if (!out) throw msched::SpecParseError("cannot write " + path);
    out << text;
  }
};

template <typename Scalar>
msched::spec::JobSpec<Scalar> load_job(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw msched::SpecParseError("cannot open job spec " + path);
  return msched::spec::parse_job<Scalar>(in);
}

double resolve_beta(const msched::spec::JobSpec<double>& spec, std::optional<double> flag) {
  if (flag) return *flag;
  if (spec.has_beta) return spec.beta;
  throw msched::SpecParseError("no beta: pass --beta or put one in the job spec");
}

Rational resolve_beta_exact(const msched::spec::JobSpec<Rational>& spec,
                            const std::optional<std::string>& flag) {
  if (flag) return msched::parse_rational(*flag);
  if (spec.has_beta) return spec.beta;
  throw msched::SpecParseError("no beta: pass --beta or put one in the job spec");
}

int cmd_index(const std::string& job_path, const std::optional<std::string>& beta_flag,
              bool average, bool exact, std::int64_t depth, const std::string& format,
              const Output& out) {
  auto spec = load_job<double>(job_path);
  if (average) {
    std::string text = "stage,n,G,basis\n";
    std::int64_t rows = depth > 0 ? depth : 8;
    auto spec_x = exact ? load_job<Rational>(job_path) : msched::spec::JobSpec<Rational>{};
    for (int j = 1; j <= spec.job.num_stages(); ++j) {
      const auto& d = spec.job.stage(j);
      std::int64_t top = d.finite_support() ? d.support() - 1 : rows;
      for (std::int64_t n = 0; n <= top; ++n) {
        if (exact) {
          auto g = msched::average::gittins_multistage(spec_x.job, j, n);
          text += std::to_string(j) + "," + std::to_string(n) + "," +
                  msched::rational_to_string(g.value) + "," +
                  (g.conjectural ? "conjecture" : "proved") + "\n";
        } else {
          auto g = msched::average::gittins_multistage(spec.job, j, n);
          text += std::to_string(j) + "," + std::to_string(n) + "," +
                  msched::discounted::format4(g.value) + "," +
                  (g.conjectural ? "conjecture" : "proved") + "\n";
        }
      }
    }
    out.write(text);
    return 0;
  }
  auto two = msched::as_two_stage(spec.job);
  msched::discounted::IndexTable table;
  std::int64_t n_table = depth > 0 ? depth : msched::discounted::default_table_depth(two);
  if (exact) {
    auto spec_x = load_job<Rational>(job_path);
    msched::discounted::Engine<Rational> e(msched::as_two_stage(spec_x.job),
                                           resolve_beta_exact(spec_x, beta_flag));
    table = msched::discounted::build_index_table(e, n_table);
  } else {
    std::optional<double> bf;
    if (beta_flag) bf = msched::to_double(msched::parse_rational(*beta_flag));
    msched::discounted::Engine<double> e(two, resolve_beta(spec, bf));
    table = msched::discounted::build_index_table(e, n_table);
  }
  out.write(format == "table" ? msched::discounted::render_table(table)
                              : msched::discounted::to_csv(table));
  return 0;
}

int cmd_classify(const std::string& job_path, const std::optional<std::string>& beta_flag,
                 bool exact) {
  auto spec = load_job<double>(job_path);
  auto two = msched::as_two_stage(spec.job);
  std::cout << "stage classes: " << to_string(two.class1()) << " / "
            << to_string(two.class2()) << "\n";
  msched::discounted::CaseTag tag;
  if (exact) {
    auto spec_x = load_job<Rational>(job_path);
    tag = msched::discounted::classify_subcase(msched::as_two_stage(spec_x.job),
                                               resolve_beta_exact(spec_x, beta_flag));
  } else {
    std::optional<double> bf;
    if (beta_flag) bf = msched::to_double(msched::parse_rational(*beta_flag));
    tag = msched::discounted::classify_subcase(two, resolve_beta(spec, bf));
  }
  std::cout << "case: " << tag.str() << "\n";
  return 0;
}

int cmd_oracle_verify(const std::string& job_path, const std::optional<std::string>& beta_flag,
                      std::int64_t nmax, int grid_points, std::int64_t n_cap,
                      const Output& out) {
  auto spec = load_job<double>(job_path);
  std::optional<double> bf;
  if (beta_flag) bf = msched::to_double(msched::parse_rational(*beta_flag));
  double beta = resolve_beta(spec, bf);
  std::string text;
  double worst = 0.0;
  bool two_stage_monotone = false;
  std::optional<msched::discounted::Engine<double>> engine;
  if (spec.job.num_stages() == 2) {
    try {
      engine.emplace(msched::as_two_stage(spec.job), beta);
      two_stage_monotone = true;
    } catch (const msched::UnsupportedClass&) {
    }
  }
  for (int j = 1; j <= spec.job.num_stages(); ++j) {
    for (std::int64_t n = 0; n <= nmax; ++n) {
      const auto& d = spec.job.stage(j);
      if (d.finite_support() && n >= d.support()) break;
      msched::mdp::PriceOptions opt;
      opt.n_cap = n_cap;
      double oracle = msched::mdp::indifference_price(spec.job, beta, JobState::at(j, n), opt);
      text += "state (" + std::to_string(j) + "," + std::to_string(n) +
              "): oracle=" + std::to_string(oracle);
      if (two_stage_monotone) {
        double closed = engine->whittle(JobState::at(j, n));
        worst = std::max(worst, std::abs(closed - oracle));
        text += " closed=" + std::to_string(closed) +
                " |diff|=" + std::to_string(std::abs(closed - oracle));
      }
      text += "\n";
    }
  }
  {
    msched::mdp::RelaxedSubproblem sub{spec.job, 0.0, beta, n_cap};
    auto v = msched::mdp::solve(sub);
    text += "bellman residual at nu=0: " + std::to_string(v.residual()) + " after " +
            std::to_string(v.iterations()) + " iterations\n";
  }
  double top = two_stage_monotone ? engine->w2(0) : 1.0 / (1.0 - beta);
  std::vector<double> grid;
  for (int i = 0; i < grid_points; ++i)
    grid.push_back(-0.05 * top + 1.15 * top * i / std::max(grid_points - 1, 1));
  auto report = msched::mdp::verify_indexability(spec.job, beta, grid, n_cap);
  text += "indexability over " + std::to_string(grid_points) + " prices: " +
          (report.pass ? "PASS" : "FAIL") + "\n";
  for (const auto& v : report.violations) text += "  violation: " + v + "\n";
  if (two_stage_monotone)
    text += "max |closed - oracle| = " + std::to_string(worst) + "\n";
  out.write(text);
  bool ok = report.pass && (!two_stage_monotone || worst <= 1e-4);
  return ok ? 0 : 1;
}

int cmd_sjp_check(const std::string& job_path, const Output& out) {
  auto spec = load_job<Rational>(job_path);
  std::string text;
  bool all_equal = true;
  for (int j = 1; j <= spec.job.num_stages(); ++j) {
    const auto& d = spec.job.stage(j);
    for (std::int64_t n = 0; n < d.support(); ++n) {
      if (n > 0 && d.survival(0, n) == Rational(0)) break;
      auto v = msched::sjp::sjp_multistage(spec.job, j, n);
      Rational via_sjp = spec.job.h * msched::sjp::gittins_from_sjp(v);
      Rational rec = msched::average::gittins_multistage(spec.job, j, n).value;
      bool equal = via_sjp == rec;
      all_equal = all_equal && equal;
      text += "(" + std::to_string(j) + "," + std::to_string(n) + ") V = " +
              msched::sjp::to_string(v) + "\n";
      text += "    envelope G = " + msched::rational_to_string(via_sjp) +
              ", recursive G = " + msched::rational_to_string(rec) +
              (equal ? "  [equal]" : "  [MISMATCH]") + "\n";
    }
  }
  text += all_equal ? "sjp-check: PASS\n" : "sjp-check: FAIL\n";
  out.write(text);
  return all_equal ? 0 : 1;
}

int cmd_simulate(const std::string& scenario_path, std::vector<std::string> policies,
                 std::optional<std::uint64_t> seed, int threads, const Output& out) {
  std::ifstream in(scenario_path);
  if (!in) throw msched::SpecParseError("cannot open scenario " + scenario_path);
  msched::sim::ScenarioSpec spec = msched::spec::parse_scenario(in);
  if (seed) spec.seed = *seed;
  spec.threads = threads;
  if (policies.empty()) policies = {"gittins"};
  std::vector<msched::sim::SimResult> results;
  for (const std::string& name : policies) {
    msched::sim::Policy p;
    if (name == "gittins") p = {msched::sim::Policy::Kind::Gittins,
                                msched::sim::Policy::IndexSource::ClosedForm};
    else if (name == "gittins-oracle") p = {msched::sim::Policy::Kind::Gittins,
                                            msched::sim::Policy::IndexSource::Oracle};
    else if (name == "gittins-recursive") p = {msched::sim::Policy::Kind::Gittins,
                                               msched::sim::Policy::IndexSource::Recursive};
    else if (name == "fcfs") p.kind = msched::sim::Policy::Kind::Fcfs;
    else if (name == "fb") p.kind = msched::sim::Policy::Kind::Fb;
    else if (name == "random") p.kind = msched::sim::Policy::Kind::RandomNonIdle;
    else if (name == "npprio") p.kind = msched::sim::Policy::Kind::NonPreemptivePriority;
    else if (name == "srpt") p.kind = msched::sim::Policy::Kind::Srpt;
    else throw msched::SpecParseError("unknown policy '" + name + "'");
    results.push_back(msched::sim::run(spec, p));
    if (results.back().instability_warning)
      std::cerr << "warning: open-mode queue exceeded the cap; check the arrival rates\n";
  }
  out.write(msched::sim::to_csv(results));
  return 0;
}

int cmd_reproduce(const std::string& id, bool verbose, const Output& out) {
  if (id == "list") {
    std::string text;
    for (const auto& f : msched::fixtures::all()) text += f.id + "  (" + f.title + ")\n";
    out.write(text);
    return 0;
  }
  const auto& f = msched::fixtures::get(id);
  auto check = msched::report::check_fixture(f);
  std::string text = f.title + "\n";
  if (f.kind == msched::fixtures::Fixture::Kind::DiscountedTable) {
    msched::discounted::Engine<double> e(msched::as_two_stage(f.job), f.beta);
    text += msched::discounted::render_table(msched::discounted::build_index_table(e, 6));
  }
  text += msched::report::render(check, verbose);
  out.write(text);
  return check.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scheduling indexes for sequential multistage jobs"};
  app.require_subcommand(1);

  std::string job_path, scenario_path, fixture_id, format = "csv";
  Output out;
  std::optional<std::string> beta;
  std::optional<std::uint64_t> seed;
  bool exact = false, average = false, verbose = false;
  std::int64_t depth = -1, nmax = 6, n_cap = 200;
  int grid_points = 50, threads = 1;
  std::vector<std::string> policies;

  auto add_common = [&](CLI::App* cmd, bool needs_job) {
    if (needs_job) cmd->add_option("--job", job_path, "job-spec file")->required();
    cmd->add_option("--out", out.path, "write output to a file instead of stdout");
  };

  CLI::App* index = app.add_subcommand("index", "compute an index table for a job");
  add_common(index, true);
  index->add_option("--beta", beta, "discount factor in (0,1)");
  index->add_flag("--average", average, "undiscounted indexes via the stage recursion");
  index->add_flag("--exact", exact, "exact rational arithmetic");
  index->add_option("--n", depth, "table depth (default: effective support + 8)");
  index->add_option("--format", format, "csv|table")->check(CLI::IsMember({"csv", "table"}));

  CLI::App* classify = app.add_subcommand("classify", "report the case and subcase");
  add_common(classify, true);
  classify->add_option("--beta", beta, "discount factor in (0,1)");
  classify->add_flag("--exact", exact, "exact rational arithmetic");

  CLI::App* oracle = app.add_subcommand("oracle-verify",
                                        "check closed forms against the MDP oracle");
  add_common(oracle, true);
  oracle->add_option("--beta", beta, "discount factor in (0,1)");
  oracle->add_option("--nmax", nmax, "largest attained service to check");
  oracle->add_option("--grid", grid_points, "price-grid size for indexability");
  oracle->add_option("--ncap", n_cap, "state-space truncation");

  CLI::App* sjp = app.add_subcommand("sjp-check",
                                     "compare profit-envelope and recursive indexes");
  add_common(sjp, true);

  CLI::App* simulate = app.add_subcommand("simulate", "run the queue simulator");
  simulate->add_option("--scenario", scenario_path, "scenario file")->required();
  simulate->add_option("--policy", policies,
                       "gittins|gittins-oracle|gittins-recursive|fcfs|fb|random|npprio|srpt");
  simulate->add_option("--seed", seed, "override the scenario seed");
  simulate->add_option("--threads", threads, "replication worker threads");
  simulate->add_option("--out", out.path, "write CSV to a file");

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "recompute a bundled fixture and diff the golden file");
  reproduce->add_option("fixture", fixture_id, "fixture id, or 'list'")->required();
  reproduce->add_flag("--verbose", verbose, "print every cell");
  reproduce->add_option("--out", out.path, "write output to a file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(index))
      return cmd_index(job_path, beta, average, exact, depth, format, out);
    if (app.got_subcommand(classify)) return cmd_classify(job_path, beta, exact);
    if (app.got_subcommand(oracle))
      return cmd_oracle_verify(job_path, beta, nmax, grid_points, n_cap, out);
    if (app.got_subcommand(sjp)) return cmd_sjp_check(job_path, out);
    if (app.got_subcommand(simulate))
      return cmd_simulate(scenario_path, policies, seed, threads, out);
    if (app.got_subcommand(reproduce)) return cmd_reproduce(fixture_id, verbose, out);
  } catch (const msched::SpecParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const msched::UnknownFixture& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const msched::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

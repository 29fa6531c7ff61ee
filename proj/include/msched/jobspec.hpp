#pragma once

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "msched/job.hpp"
#include "msched/rational.hpp"
#include "msched/simulate.hpp"

namespace msched::spec {

/// Job-spec file: one directive per line, '#' comments, rationals written
/// "num/den" (decimals accepted on input).
///
///   h 3/2
///   beta 9/10                      # optional
///   stage geometric 1/2
///   stage mixture 1/2 4/5 1/2 1/10 # weight rate pairs
///   stage hazard 1/2 0 0 1
///   stage pmf 1/2 0 0 1/2
///   stage geomhazard 1/2 0 1/2     # start limit alpha
template <typename Scalar>
struct JobSpec {
  MultistageJob<Scalar> job;
  bool has_beta = false;
  Scalar beta = Scalar(0);
};

namespace detail {

inline std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string t;
  while (ss >> t) {
    if (t[0] == '#') break;
    out.push_back(t);
  }
  return out;
}

template <typename Scalar>
std::vector<Scalar> parse_values(const std::vector<std::string>& tok, std::size_t from) {
  std::vector<Scalar> v;
  for (std::size_t i = from; i < tok.size(); ++i) v.push_back(parse_scalar<Scalar>(tok[i]));
  return v;
}

template <typename Scalar>
ServiceDistribution<Scalar> parse_stage(const std::vector<std::string>& tok) {
  if (tok.size() < 3) throw SpecParseError("stage line needs a kind and parameters");
  const std::string& kind = tok[1];
  std::vector<Scalar> v = parse_values<Scalar>(tok, 2);
  if (kind == "geometric") {
    if (v.size() != 1) throw SpecParseError("geometric takes one rate");
    return ServiceDistribution<Scalar>::geometric(v[0]);
  }
  if (kind == "mixture") {
    if (v.size() < 4 || v.size() % 2 != 0)
      throw SpecParseError("mixture takes weight/rate pairs");
    std::vector<Scalar> w, r;
    for (std::size_t i = 0; i < v.size(); i += 2) {
      w.push_back(v[i]);
      r.push_back(v[i + 1]);
    }
    return ServiceDistribution<Scalar>::geometric_mixture(std::move(w), std::move(r));
  }
  if (kind == "hazard") return ServiceDistribution<Scalar>::from_hazards(std::move(v));
  if (kind == "pmf") return ServiceDistribution<Scalar>::from_pmf(std::move(v));
  if (kind == "geomhazard") {
    if (v.size() != 3) throw SpecParseError("geomhazard takes start, limit, alpha");
    return ServiceDistribution<Scalar>::geom_hazard(v[0], v[1], v[2]);
  }
  throw SpecParseError("unknown stage kind '" + kind + "'");
}

}  // namespace detail

template <typename Scalar>
JobSpec<Scalar> parse_job_lines(const std::vector<std::string>& lines) {
  JobSpec<Scalar> out;
  out.job.h = Scalar(1);
  for (const std::string& line : lines) {
    auto tok = detail::tokens(line);
    if (tok.empty()) continue;
    if (tok[0] == "h") {
      if (tok.size() != 2) throw SpecParseError("h takes one value");
      out.job.h = parse_scalar<Scalar>(tok[1]);
    } else if (tok[0] == "beta") {
      if (tok.size() != 2) throw SpecParseError("beta takes one value");
      out.beta = parse_scalar<Scalar>(tok[1]);
      out.has_beta = true;
    } else if (tok[0] == "stage") {
      out.job.stages.push_back(detail::parse_stage<Scalar>(tok));
    } else {
      throw SpecParseError("unknown job-spec directive '" + tok[0] + "'");
    }
  }
  if (out.job.stages.empty()) throw SpecParseError("job spec has no stages");
  return out;
}

template <typename Scalar>
JobSpec<Scalar> parse_job(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return parse_job_lines<Scalar>(lines);
}

template <typename Scalar>
JobSpec<Scalar> parse_job_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_job<Scalar>(ss);
}

namespace detail {

inline std::string scalar_text(const Rational& x) { return rational_to_string(x); }
inline std::string scalar_text(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

/// Serialization; in exact mode this round-trips bit-exactly.
template <typename Scalar>
std::string write_job(const JobSpec<Scalar>& spec) {
  std::string out;
  out += "h " + detail::scalar_text(spec.job.h) + "\n";
  if (spec.has_beta) out += "beta " + detail::scalar_text(spec.beta) + "\n";
  for (const auto& s : spec.job.stages) {
    using D = ServiceDistribution<Scalar>;
    out += "stage ";
    switch (s.kind()) {
      case D::Kind::Geometric:
        out += "geometric " + detail::scalar_text(s.geom_rate());
        break;
      case D::Kind::GeometricMixture: {
        out += "mixture";
        for (std::size_t k = 0; k < s.mixture_weights().size(); ++k)
          out += " " + detail::scalar_text(s.mixture_weights()[k]) + " " +
                 detail::scalar_text(s.mixture_rates()[k]);
        break;
      }
      case D::Kind::HazardTable:
      case D::Kind::FinitePmf: {
        out += "hazard";
        for (const Scalar& mu : s.hazards()) out += " " + detail::scalar_text(mu);
        break;
      }
      case D::Kind::GeomHazard:
      default:
        out += "geomhazard " + detail::scalar_text(s.gh_start()) + " " +
               detail::scalar_text(s.gh_limit()) + " " + detail::scalar_text(s.gh_alpha());
        break;
    }
    out += "\n";
  }
  return out;
}

/// Scenario file: shared directives plus inline job/class blocks.
///
///   mode closed            # or open
///   beta 9/10              # closed, optional
///   horizon 200000         # open
///   seed 42
///   reps 1000
///   tmax 1000000           # optional closed-mode slot cap
///   job begin ... job end            # closed mode
///   class 1/20 begin ... class end   # open mode, lambda then a job block
inline sim::ScenarioSpec parse_scenario(std::istream& in) {
  sim::ScenarioSpec out;
  bool mode_set = false;
  std::string line;
  std::vector<std::string> block;
  bool in_block = false;
  double pending_lambda = 0.0;
  while (std::getline(in, line)) {
    auto tok = detail::tokens(line);
    if (tok.empty()) continue;
    if (in_block) {
      if ((tok[0] == "job" || tok[0] == "class") && tok.size() == 2 && tok[1] == "end") {
        auto js = parse_job_lines<double>(block);
        if (js.has_beta) throw SpecParseError("beta belongs to the scenario, not a job block");
        out.classes.push_back({std::move(js.job), pending_lambda});
        block.clear();
        in_block = false;
      } else {
        block.push_back(line);
      }
      continue;
    }
    if (tok[0] == "mode") {
      if (tok.size() != 2) throw SpecParseError("mode takes closed|open");
      if (tok[1] == "closed") out.mode = sim::ScenarioSpec::Mode::Closed;
      else if (tok[1] == "open") out.mode = sim::ScenarioSpec::Mode::Open;
      else throw SpecParseError("mode takes closed|open");
      mode_set = true;
    } else if (tok[0] == "beta") {
      out.beta = parse_scalar<double>(tok.at(1));
    } else if (tok[0] == "horizon") {
      out.horizon = std::stoll(tok.at(1));
    } else if (tok[0] == "seed") {
      out.seed = std::stoull(tok.at(1));
    } else if (tok[0] == "reps") {
      out.replications = std::stoll(tok.at(1));
    } else if (tok[0] == "tmax") {
      out.t_max = std::stoll(tok.at(1));
    } else if (tok[0] == "job" && tok.size() == 2 && tok[1] == "begin") {
      pending_lambda = 0.0;
      in_block = true;
    } else if (tok[0] == "class" && tok.size() == 3 && tok[2] == "begin") {
      pending_lambda = parse_scalar<double>(tok[1]);
      in_block = true;
    } else {
      throw SpecParseError("unknown scenario directive '" + tok[0] + "'");
    }
  }
  if (in_block) throw SpecParseError("unterminated job/class block");
  if (!mode_set) throw SpecParseError("scenario needs a mode line");
  out.validate();
  return out;
}

inline sim::ScenarioSpec parse_scenario_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_scenario(ss);
}

}  // namespace msched::spec

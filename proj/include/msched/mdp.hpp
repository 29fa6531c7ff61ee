#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "msched/job.hpp"

namespace msched::mdp {

/// One-job subproblem with a price nu per served slot: minimize the
/// expected discounted holding costs plus nu times the discounted work.
struct RelaxedSubproblem {
  MultistageJob<double> job;
  double nu = 0.0;
  double beta = 0.9;
  /// attained-service cap per stage; beyond it the hazard is frozen at its
  /// limit, so the truncated tail is an exact geometric lump
  std::int64_t n_cap = 200;
  double tol_factor = 1e-12;  // residual target: tol_factor * h / (1-beta)
  std::int64_t max_iterations = 100000;
};

enum class Action { Idle, Serve, Both };

/// Solved value function on the truncated state space.
class ValueFunction {
 public:
  ValueFunction(std::int64_t stages, std::int64_t n_cap)
      : n_cap_(n_cap), values_(Eigen::VectorXd::Zero(stages * (n_cap + 1))),
        actions_(static_cast<std::size_t>(stages * (n_cap + 1)), Action::Idle) {}

  std::int64_t index(const JobState& s) const {
    if (s.is_completed() || s.stage < 1 || s.n < 0 || s.n > n_cap_)
      throw NotApplicable("state outside the truncated space");
    return (s.stage - 1) * (n_cap_ + 1) + s.n;
  }
  double value(const JobState& s) const {
    return s.is_completed() ? completed_value_ : values_[index(s)];
  }
  Action action(const JobState& s) const { return actions_[index(s)]; }

  double completed_value() const { return completed_value_; }
  double residual() const { return residual_; }
  std::int64_t iterations() const { return iterations_; }
  std::int64_t n_cap() const { return n_cap_; }

  Eigen::VectorXd& raw() { return values_; }
  const Eigen::VectorXd& raw() const { return values_; }

 private:
  friend class Solver;
  std::int64_t n_cap_;
  Eigen::VectorXd values_;
  std::vector<Action> actions_;
  double completed_value_ = 0.0;
  double residual_ = 0.0;
  std::int64_t iterations_ = 0;
};

/// Value-iteration solver; reusable across nearby prices so bisection can
/// warm-start from the previous fixed point.
class Solver {
 public:
  explicit Solver(const RelaxedSubproblem& p)
      : p_(p), v_(p.job.num_stages(), p.n_cap), scratch_(v_.raw().size()) {
    if (!(p_.beta > 0.0 && p_.beta < 1.0)) throw Error("beta must lie in (0,1)");
    const std::int64_t cap = p_.n_cap;
    for (int j = 1; j <= p_.job.num_stages(); ++j) {
      const auto& d = p_.job.stage(j);
      for (std::int64_t n = 0; n <= cap; ++n) {
        bool past = d.finite_support() && n >= d.support();
        double mu = (n == cap || past) ? to_double(d.hazard_limit())
                                       : to_double(d.hazard(n));
        hazards_.push_back(mu);
        reachable_.push_back(!past);
      }
    }
  }

  const RelaxedSubproblem& problem() const { return p_; }

  /// Whether (j,n) can actually occur (finite supports make the tail of a
  /// stage row unreachable).
  bool reachable(const JobState& s) const {
    return !s.is_completed() && s.n <= p_.n_cap &&
           reachable_[static_cast<std::size_t>(v_.index(s))];
  }

  const ValueFunction& solve(double nu) {
    p_.nu = nu;
    const double beta = p_.beta;
    const double h = to_double(p_.job.h);
    v_.completed_value_ = nu >= 0.0 ? 0.0 : nu / (1.0 - beta);
    const double tol = p_.tol_factor * h / (1.0 - beta);
    const std::int64_t cap = p_.n_cap;
    const int stages = p_.job.num_stages();
    Eigen::VectorXd& v = v_.raw();
    double residual = 0.0;
    std::int64_t iter = 0;
    for (; iter < p_.max_iterations; ++iter) {
      for (int j = stages; j >= 1; --j) {
        double next_stage_value =
            j == stages ? v_.completed_value_ : v[(j) * (cap + 1)];
        const std::int64_t base = (j - 1) * (cap + 1);
        for (std::int64_t n = cap; n >= 0; --n) {
          double mu = hazards_[base + n];
          double stay = v[base + std::min(n + 1, cap)];
          double serve = h + nu + beta * (mu * next_stage_value + (1.0 - mu) * stay);
          double idle = h + beta * v[base + n];
          scratch_[base + n] = std::min(serve, idle);
        }
      }
      residual = (scratch_ - v).cwiseAbs().maxCoeff();
      v.swap(scratch_);
      if (residual <= tol) break;
    }
    if (residual > tol)
      throw NonConvergence("value iteration residual " + std::to_string(residual) +
                           " after " + std::to_string(iter) + " iterations");
    v_.residual_ = residual;
    v_.iterations_ = iter + 1;
    // action map from the converged values
    const double tie = 1e-9 * h / (1.0 - beta);
    for (int j = stages; j >= 1; --j) {
      double next_stage_value = j == stages ? v_.completed_value_ : v[(j) * (cap + 1)];
      const std::int64_t base = (j - 1) * (cap + 1);
      for (std::int64_t n = cap; n >= 0; --n) {
        double mu = hazards_[base + n];
        double stay = v[base + std::min(n + 1, cap)];
        double serve = h + nu + beta * (mu * next_stage_value + (1.0 - mu) * stay);
        double idle = h + beta * v[base + n];
        double gap = idle - serve;
        v_.actions_[base + n] = gap > tie    ? Action::Serve
                                : gap < -tie ? Action::Idle
                                             : Action::Both;
      }
    }
    return v_;
  }

 private:
  RelaxedSubproblem p_;
  ValueFunction v_;
  Eigen::VectorXd scratch_;
  std::vector<double> hazards_;
  std::vector<bool> reachable_;
};

inline ValueFunction solve(const RelaxedSubproblem& p) {
  Solver s(p);
  return s.solve(p.nu);
}

struct PriceOptions {
  double tolerance = 1e-8;
  double bracket_margin = 1.05;
  std::int64_t n_cap = 200;
};

/// Bisection on the price: the state's index is the nu at which serving and
/// idling become equally good.
inline double indifference_price(const MultistageJob<double>& job, double beta,
                                 const JobState& state, PriceOptions opt = {}) {
  if (state.is_completed()) throw NotApplicable("completed jobs have no index");
  RelaxedSubproblem p{job, 0.0, beta, opt.n_cap};
  Solver solver(p);
  if (!solver.reachable(state)) throw QueryBeyondSupport("state is unreachable");
  const double h = to_double(job.h);
  double lo = -h / (1.0 - beta) * opt.bracket_margin;
  double hi = h * beta / (1.0 - beta) * opt.bracket_margin;
  if (solver.solve(lo).action(state) == Action::Idle)
    throw BracketFailure("idling optimal at the lower bracket endpoint");
  if (solver.solve(hi).action(state) == Action::Serve)
    throw BracketFailure("serving optimal at the upper bracket endpoint");
  while (hi - lo > opt.tolerance) {
    double mid = 0.5 * (lo + hi);
    (solver.solve(mid).action(state) != Action::Idle ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

struct IndexabilityReport {
  bool pass = true;
  std::vector<double> grid;
  std::vector<JobState> states;                 // reachable states, row order
  std::vector<std::vector<bool>> active;        // active[g][state]
  std::vector<std::string> violations;
};

/// Activity sets over an ascending price grid must be nested decreasing.
inline IndexabilityReport verify_indexability(const MultistageJob<double>& job, double beta,
                                              std::vector<double> nu_grid,
                                              std::int64_t n_cap = 200) {
  IndexabilityReport r;
  r.grid = std::move(nu_grid);
  RelaxedSubproblem p{job, 0.0, beta, n_cap};
  Solver solver(p);
  for (int j = 1; j <= job.num_stages(); ++j)
    for (std::int64_t n = 0; n <= n_cap; ++n)
      if (solver.reachable(JobState::at(j, n))) r.states.push_back(JobState::at(j, n));
  for (double nu : r.grid) {
    const ValueFunction& v = solver.solve(nu);
    std::vector<bool> act;
    act.reserve(r.states.size());
    for (const JobState& s : r.states) act.push_back(v.action(s) != Action::Idle);
    r.active.push_back(std::move(act));
  }
  for (std::size_t g = 1; g < r.active.size(); ++g) {
    if (r.grid[g] < r.grid[g - 1]) throw Error("price grid must ascend");
    for (std::size_t i = 0; i < r.states.size(); ++i) {
      if (r.active[g][i] && !r.active[g - 1][i]) {
        r.pass = false;
        r.violations.push_back("state " + r.states[i].str() + " activates between nu=" +
                               std::to_string(r.grid[g - 1]) + " and " +
                               std::to_string(r.grid[g]));
      }
    }
  }
  return r;
}

}  // namespace msched::mdp

#pragma once

#include <Eigen/Core>

#include <cstdint>

#include "msched/job.hpp"

namespace msched::mdp {

struct TwoJobOptions {
  std::int64_t n_cap = 150;
  double tol_factor = 1e-12;
  std::int64_t max_iterations = 100000;
  /// < 0: optimize; 0/1: always serve that job first while it is alive
  int forced_priority = -1;
};

namespace detail {

/// Per-job flattened state space: 0 = completed, 1 + (j-1)(cap+1) + n.
class JobSpace {
 public:
  JobSpace(const MultistageJob<double>& job, std::int64_t cap) : job_(&job), cap_(cap) {
    size_ = 1 + job.num_stages() * (cap + 1);
    mu_.resize(size_, 0.0);
    complete_to_.resize(size_, 0);
    fail_to_.resize(size_, 0);
    for (int j = 1; j <= job.num_stages(); ++j) {
      const auto& d = job.stage(j);
      for (std::int64_t n = 0; n <= cap; ++n) {
        std::int64_t s = id(j, n);
        bool past = d.finite_support() && n >= d.support();
        mu_[s] = (n == cap || past) ? to_double(d.hazard_limit()) : to_double(d.hazard(n));
        complete_to_[s] = j == job.num_stages() ? 0 : id(j + 1, 0);
        fail_to_[s] = id(j, std::min(n + 1, cap));
      }
    }
  }

  std::int64_t id(int stage, std::int64_t n) const { return 1 + (stage - 1) * (cap_ + 1) + n; }
  std::int64_t size() const { return size_; }
  double mu(std::int64_t s) const { return mu_[s]; }
  std::int64_t complete_to(std::int64_t s) const { return complete_to_[s]; }
  std::int64_t fail_to(std::int64_t s) const { return fail_to_[s]; }
  double h() const { return to_double(job_->h); }

 private:
  const MultistageJob<double>* job_;
  std::int64_t cap_, size_;
  std::vector<double> mu_;
  std::vector<std::int64_t> complete_to_, fail_to_;
};

}  // namespace detail

/// Minimal expected discounted holding cost of serving two jobs, one slot of
/// service at a time, both starting at (1,0); the answer no index policy can
/// beat.  Solved by value iteration on the product space.
inline double exact_two_job_optimum(const MultistageJob<double>& job_a,
                                    const MultistageJob<double>& job_b, double beta,
                                    TwoJobOptions opt = {}) {
  if (!(beta > 0.0 && beta < 1.0)) throw Error("beta must lie in (0,1)");
  detail::JobSpace a(job_a, opt.n_cap), b(job_b, opt.n_cap);
  const double ha = a.h(), hb = b.h();
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(a.size(), b.size());
  Eigen::MatrixXd next(a.size(), b.size());
  const double tol = opt.tol_factor * (ha + hb) / (1.0 - beta);
  double residual = 0.0;
  for (std::int64_t iter = 0; iter < opt.max_iterations; ++iter) {
    for (std::int64_t sa = 0; sa < a.size(); ++sa) {
      bool alive_a = sa != 0;
      for (std::int64_t sb = 0; sb < b.size(); ++sb) {
        bool alive_b = sb != 0;
        double cost = (alive_a ? ha : 0.0) + (alive_b ? hb : 0.0);
        double serve_a = 0.0, serve_b = 0.0;
        if (alive_a) {
          double mu = a.mu(sa);
          serve_a = mu * v(a.complete_to(sa), sb) + (1.0 - mu) * v(a.fail_to(sa), sb);
        }
        if (alive_b) {
          double mu = b.mu(sb);
          serve_b = mu * v(sa, b.complete_to(sb)) + (1.0 - mu) * v(sa, b.fail_to(sb));
        }
        double best;
        if (opt.forced_priority < 0) {
          best = v(sa, sb);  // idling is allowed but never helps
          if (alive_a) best = std::min(best, serve_a);
          if (alive_b) best = std::min(best, serve_b);
        } else {
          bool pick_a = opt.forced_priority == 0 ? alive_a : (alive_a && !alive_b);
          best = pick_a ? serve_a : alive_b ? serve_b : v(sa, sb);
        }
        next(sa, sb) = cost + beta * best;
      }
    }
    residual = (next - v).cwiseAbs().maxCoeff();
    v.swap(next);
    if (residual <= tol) break;
  }
  if (residual > tol) throw NonConvergence("joint value iteration did not converge");
  return v(a.id(1, 0), b.id(1, 0));
}

}  // namespace msched::mdp

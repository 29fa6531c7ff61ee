#pragma once

#include "msched/extint.hpp"
#include "msched/job.hpp"

namespace msched::discounted::special {

/// Direct closed forms for two-stage jobs with one geometric stage, written
/// out case by case exactly as stated, independently of the general engine's
/// reduction.  Used to cross-check the general code paths.

namespace detail {

template <typename S>
std::int64_t horizon(const ServiceDistribution<S>& d, const S& beta) {
  return d.convergence_horizon(to_double(beta));
}

}  // namespace detail

/// DHR first stage, geometric second stage.
template <typename S>
S dhr_geo(const TwoStageJob<S>& job, const JobState& s, const S& beta) {
  S mu2 = job.stage2.geom_rate();
  S tail = beta / (S(1) - beta);
  if (s.stage == 2) return job.h * mu2 * tail;
  S mu1 = job.stage1.hazard(s.n);
  return job.h * mu2 * beta * mu1 / (S(1) - beta + beta * (mu1 + mu2)) * tail;
}

/// Geometric first stage, DHR second stage; the first-stage index is flat
/// and sits at the threshold phi_beta.
template <typename S>
S geo_dhr(const TwoStageJob<S>& job, const JobState& s, const S& beta) {
  S tail = beta / (S(1) - beta);
  if (s.stage == 2) return job.h * job.stage2.hazard(s.n) * tail;
  S mu1 = job.stage1.geom_rate();
  const auto& d2 = job.stage2;
  std::int64_t hz = detail::horizon(d2, beta);
  S b(0), c(0), bpow(1);
  S best_b(0), best_c(0);
  bool crossed = false;
  for (std::int64_t n2 = 0; n2 <= hz && !crossed; ++n2) {
    b += bpow * d2.survival(n2, 0);
    c += bpow * d2.pmf_cond(n2, 0);
    bpow *= beta;
    S lhs = beta * mu1 * c / (S(1) + beta * mu1 * b);
    S mu2_next = (d2.finite_support() && n2 + 1 >= d2.support())
                     ? d2.hazard_limit()
                     : d2.hazard(n2 + 1);
    if (lhs > mu2_next) {
      best_b = b;
      best_c = c;
      crossed = true;
    }
  }
  if (!crossed) {
    best_b = d2.disc_survival_inf(beta, 0);
    best_c = d2.disc_pmf_inf(beta, 0);
  }
  return job.h * mu1 * beta * best_c / (S(1) + beta * mu1 * best_b) * tail;
}

/// IHR first stage, geometric second stage.
template <typename S>
S ihr_geo(const TwoStageJob<S>& job, const JobState& s, const S& beta) {
  S mu2 = job.stage2.geom_rate();
  S tail = beta / (S(1) - beta);
  if (s.stage == 2) return job.h * mu2 * tail;
  const auto& d1 = job.stage1;
  S factor = beta / (S(1) - beta * (S(1) - mu2));
  std::int64_t hz = detail::horizon(d1, beta) + s.n;
  S z(0), bpow(1);
  for (std::int64_t i = 0; i + s.n <= hz; ++i) {
    S sv = d1.survival(i, s.n);
    if (sv == S(0)) break;
    z += bpow * sv * (S(1) + factor * d1.hazard(s.n + i));
    bpow *= beta;
  }
  return job.h * (S(1) / (S(1) - beta) - z) / z;
}

/// Geometric first stage, IHR second stage.
template <typename S>
S geo_ihr(const TwoStageJob<S>& job, const JobState& s, const S& beta) {
  const auto& d2 = job.stage2;
  std::int64_t hz = detail::horizon(d2, beta);
  if (s.stage == 2) {
    S dsum(0), bpow(1);
    for (std::int64_t i = 0; i + s.n <= hz + s.n; ++i) {
      S sv = d2.survival(i, s.n);
      if (sv == S(0)) break;
      dsum += bpow * sv;
      bpow *= beta;
    }
    return job.h * (S(1) / (S(1) - beta) - dsum) / dsum;
  }
  S mu1 = job.stage1.geom_rate();
  S b(0), c(0), bpow(1);
  for (std::int64_t i = 0; i <= hz; ++i) {
    S sv = d2.survival(i, 0);
    if (sv == S(0)) break;
    b += bpow * sv;
    c += bpow * sv * d2.hazard(i);
    bpow *= beta;
  }
  return job.h * mu1 * beta * c / (S(1) + beta * mu1 * b) * beta / (S(1) - beta);
}

/// Both stages geometric.
template <typename S>
S geo_geo(const TwoStageJob<S>& job, const JobState& s, const S& beta) {
  S mu1 = job.stage1.geom_rate();
  S mu2 = job.stage2.geom_rate();
  S tail = beta / (S(1) - beta);
  if (s.stage == 2) return job.h * mu2 * tail;
  return job.h * mu2 * beta * mu1 / (S(1) - beta + beta * (mu1 + mu2)) * tail;
}

}  // namespace msched::discounted::special

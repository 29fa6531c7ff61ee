#pragma once

#include <cstdint>

#include "msched/job.hpp"

namespace msched::average {

/// sup over integer quitting horizons Delta >= 1 (plus Delta = inf when the
/// law is proper) of
///
///     P{S <= Delta} / (x + E[min{S, Delta}]),
///
/// the building block of every undiscounted first-stage index: x carries the
/// reciprocal index of the preceding work.
template <typename Scalar>
Scalar best_quit_ratio(const ServiceDistribution<Scalar>& dist, const Scalar& x) {
  std::int64_t horizon = dist.finite_support() ? dist.support() : dist.scan_horizon();
  Scalar best(0);
  Scalar emin(0);  // E[min{S, d}] accumulated as sum of survivals
  for (std::int64_t d = 1; d <= horizon; ++d) {
    emin += dist.survival(d - 1, 0) * Scalar(1);  // \bar p(d-1)
    Scalar num = dist.cdf(d);
    Scalar val = num / (x + emin);
    if (val > best) best = val;
  }
  if (!dist.finite_support() && dist.proper()) {
    Scalar val = Scalar(1) / (x + dist.mean());
    if (val > best) best = val;
  }
  return best;
}

namespace detail {
template <typename Scalar>
Scalar surv_u(const ServiceDistribution<Scalar>& dist, std::int64_t m) {
  return m == 0 ? Scalar(1) : dist.survival(m, 0);
}
}  // namespace detail

/// Single-stage Gittins index (h = 1):
/// G(a) = sup_{Delta} P{S-a <= Delta | S > a} / E[min{S-a, Delta} | S > a].
/// For DHR laws the sup sits at the first slot (G = mu(a)), for IHR at
/// Delta = inf (G = 1/E[S-a | S >= a+1]); both shortcuts are cross-checked.
template <typename Scalar>
Scalar gittins_single_stage(const ServiceDistribution<Scalar>& dist, std::int64_t a) {
  std::int64_t horizon =
      dist.finite_support() ? dist.support() - a : dist.scan_horizon();
  if (horizon <= 0) throw QueryBeyondSupport("no service left at this attained service");
  Scalar best(0);
  Scalar emin(0);
  for (std::int64_t d = 1; d <= horizon; ++d) {
    emin += dist.survival(d - 1, a);
    Scalar num = Scalar(1) - dist.survival(d, a);
    Scalar val = num / emin;
    if (val > best) best = val;
  }
  if (!dist.finite_support() && dist.proper()) {
    Scalar val = Scalar(1) / dist.mean_residual(a);
    if (val > best) best = val;
  }
  MonotonicityClass cls = dist.monotonicity();
  Scalar tol = scalar_traits<Scalar>::slack();
  if (cls == MonotonicityClass::DHR || cls == MonotonicityClass::CHR) {
    if (abs(best - dist.hazard(a)) > tol)
      throw Error("DHR shortcut disagrees with the quitting-horizon sup");
  }
  if (cls == MonotonicityClass::IHR && dist.proper()) {
    if (abs(best - Scalar(1) / dist.mean_residual(a)) > tol)
      throw Error("IHR shortcut disagrees with the quitting-horizon sup");
  }
  return best;
}

/// Index value together with its evidence status: values covered by the
/// proved two-stage monotone result are marked proved, everything reached
/// through the conjectured recursion is marked conjectural.
template <typename Scalar>
struct GittinsResult {
  Scalar value;
  bool conjectural = false;
};

namespace detail {

// Gittins index (h = 1) of the job made of stages [first..last] at attained
// service a in stage first, peeling the last stage off recursively.
template <typename Scalar>
Scalar gittins_peel(const MultistageJob<Scalar>& job, int first, int last, std::int64_t a) {
  if (first == last) return gittins_single_stage(job.stage(first), a);
  Scalar inner = gittins_peel(job, first, last - 1, a);
  return best_quit_ratio(job.stage(last), Scalar(1) / inner);
}

}  // namespace detail

/// Gittins index of a multistage job in state (stage j, attained a).
template <typename Scalar>
GittinsResult<Scalar> gittins_multistage(const MultistageJob<Scalar>& job, int stage,
                                         std::int64_t a) {
  if (stage < 1 || stage > job.num_stages()) throw NotApplicable("stage out of range");
  GittinsResult<Scalar> out{job.h * detail::gittins_peel(job, stage, job.num_stages(), a),
                            false};
  // proved ground: a single remaining stage (classical), or two remaining
  // stages with monotone hazards; everything else rests on the conjectured
  // recursion
  int remaining = job.num_stages() - stage + 1;
  bool monotone = true;
  for (int j = stage; j <= job.num_stages(); ++j)
    monotone = monotone && is_monotone(job.stage(j).monotonicity());
  out.conjectural = remaining > 2 || (remaining == 2 && !monotone);
  return out;
}

template <typename Scalar>
GittinsResult<Scalar> gittins_two_stage(const TwoStageJob<Scalar>& job, const JobState& state) {
  if (state.is_completed()) throw NotApplicable("completed jobs have no index");
  MultistageJob<Scalar> m = job.as_multistage();
  return gittins_multistage(m, state.stage, state.n);
}

/// Undiscounted Whittle index of a two-stage monotone job (the beta -> 1
/// limit of the discounted one); CHR stages route as DHR.
template <typename Scalar>
Scalar whittle_average(const TwoStageJob<Scalar>& job, const JobState& state) {
  if (state.is_completed()) throw NotApplicable("completed jobs have no index");
  MonotonicityClass c1 = job.class1(), c2 = job.class2();
  if (!is_monotone(c1) || !is_monotone(c2))
    throw UnsupportedClass("closed forms need monotone hazards; use the MDP oracle");
  bool dhr1 = c1 != MonotonicityClass::IHR;
  bool dhr2 = c2 != MonotonicityClass::IHR;
  if (state.stage == 2) {
    if (dhr2) return job.h * job.stage2.hazard(state.n);
    return job.h / job.stage2.mean_residual(state.n);
  }
  if (state.stage != 1) throw NotApplicable("two-stage job state expected");
  Scalar prior = dhr1 ? Scalar(1) / job.stage1.hazard(state.n)
                      : job.stage1.mean_residual(state.n);
  if (dhr2) return job.h * best_quit_ratio(job.stage2, prior);
  return job.h / (prior + job.stage2.mean());
}

}  // namespace msched::average

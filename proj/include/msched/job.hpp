#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msched/distribution.hpp"

namespace msched {

/// (stage j, attained service n) with j in {1..J}, or the completed mark.
struct JobState {
  static JobState at(int stage, std::int64_t n) { return JobState{stage, n}; }
  static JobState completed() { return JobState{0, 0}; }
  bool is_completed() const { return stage == 0; }

  int stage = 1;
  std::int64_t n = 0;

  friend bool operator==(const JobState&, const JobState&) = default;
  std::string str() const {
    return is_completed() ? "*" : "(" + std::to_string(stage) + "," + std::to_string(n) + ")";
  }
};

/// Ordered stage list with a holding-cost weight.
template <typename Scalar>
struct MultistageJob {
  std::vector<ServiceDistribution<Scalar>> stages;
  Scalar h = Scalar(1);

  int num_stages() const { return static_cast<int>(stages.size()); }
  const ServiceDistribution<Scalar>& stage(int j) const { return stages.at(j - 1); }
  bool proper() const {
    for (const auto& s : stages)
      if (!s.proper()) return false;
    return true;
  }
};

template <typename Scalar>
struct TwoStageJob {
  ServiceDistribution<Scalar> stage1;
  ServiceDistribution<Scalar> stage2;
  Scalar h = Scalar(1);

  MonotonicityClass class1() const { return stage1.monotonicity(); }
  MonotonicityClass class2() const { return stage2.monotonicity(); }

  MultistageJob<Scalar> as_multistage() const { return MultistageJob<Scalar>{{stage1, stage2}, h}; }
};

template <typename Scalar>
TwoStageJob<Scalar> as_two_stage(const MultistageJob<Scalar>& job) {
  if (job.num_stages() != 2) throw NotApplicable("job does not have exactly two stages");
  return TwoStageJob<Scalar>{job.stages[0], job.stages[1], job.h};
}

}  // namespace msched

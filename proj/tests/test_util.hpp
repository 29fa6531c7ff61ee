#pragma once

#include <random>
#include <vector>

#include "msched/job.hpp"
#include "msched/rational.hpp"

namespace msched::testutil {

/// Random finite-support law with small rational hazards; last hazard 1.
inline ServiceDistribution<Rational> random_table(std::mt19937& rng, int max_support = 6,
                                                  int denom = 8) {
  std::uniform_int_distribution<int> len(1, max_support);
  std::uniform_int_distribution<int> num(0, denom - 1);
  int n = len(rng);
  std::vector<Rational> h;
  for (int i = 0; i + 1 < n; ++i) h.emplace_back(num(rng), denom);
  h.emplace_back(1);
  return ServiceDistribution<Rational>::from_hazards(std::move(h));
}

inline MultistageJob<Rational> random_job(std::mt19937& rng, int stages, int max_support = 6) {
  MultistageJob<Rational> job;
  std::uniform_int_distribution<int> hnum(1, 5);
  job.h = Rational(hnum(rng), 2);
  for (int j = 0; j < stages; ++j) job.stages.push_back(random_table(rng, max_support));
  return job;
}

}  // namespace msched::testutil

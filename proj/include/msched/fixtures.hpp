#pragma once

#include <string>
#include <utility>
#include <vector>

#include "msched/job.hpp"
#include "msched/rational.hpp"

namespace msched::fixtures {

/// A bundled benchmark job whose reference values ship under fixtures/golden.
struct Fixture {
  enum class Kind {
    DiscountedTable,  // closed-form index table at beta = 0.9, h = 1
    ExactGittins      // exact undiscounted Gittins fractions
  };

  std::string id;
  std::string title;
  Kind kind = Kind::DiscountedTable;
  MultistageJob<double> job;
  double beta = 0.9;
  std::string golden_file;
};

const std::vector<Fixture>& all();
const Fixture& get(const std::string& id);  // throws UnknownFixture
std::vector<std::string> ids();

/// Exact-scalar copy of a fixture job; built on demand (the rational
/// hazard-prefix precomputations are not free).
MultistageJob<Rational> exact_job(const std::string& id);

/// Directory holding the golden files; MSCHED_FIXTURES in the environment
/// overrides the compiled-in source location.
std::string fixture_dir();

/// Golden table: named rows of cells (decimal strings, fractions, "inf").
struct Golden {
  std::vector<std::pair<std::string, std::vector<std::string>>> rows;
  const std::vector<std::string>* find(const std::string& name) const;
};

Golden load_golden(const Fixture& f);

}  // namespace msched::fixtures

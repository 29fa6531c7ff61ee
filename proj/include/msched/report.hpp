#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "msched/average.hpp"
#include "msched/fixtures.hpp"
#include "msched/index_table.hpp"
#include "msched/sjp.hpp"

namespace msched::report {

/// Reference-table entries that disagree with the defining formulas.  The
/// comparison harness asserts the formula value for these cells and reports
/// the shipped number as a known discrepancy instead of a failure.
struct KnownDeviation {
  const char* fixture;
  const char* row;
  int col;
  double asserted;  // value the formula gives (4-decimal check)
};

inline const std::vector<KnownDeviation>& known_deviations() {
  // Each entry was adjudicated in exact rational arithmetic; the asserted
  // value is the correctly rounded four-decimal evaluation of the defining
  // formula.  Most printed counterparts look truncated rather than rounded
  // (e.g. mu1(1) = 0.336363... printed 0.3363), two drift by ~1e-4.
  static const std::vector<KnownDeviation> v = {
      // printed as 4.0500; the per-state formula h mu2(0) beta/(1-beta) = 4.5
      {"dhr-dhr-a", "W2", 0, 4.5000},
      {"dhr-dhr-a", "psi0", 5, 1.3216},        // printed 1.3217, exact 1.3216455
      {"dhr-dhr-b", "psi0", 3, 1.3891},        // printed 1.3892, exact 1.3891487
      {"dhr-dhr-b", "psi1", 4, 1.1802},        // printed 1.1801, exact 1.1801846
      {"dhr-dhr-c", "psi4", 3, 0.7742},        // printed 0.7743, exact 0.7742496
      {"dhr-dhr-c", "mu1", 1, 0.3364},         // printed 0.3363, exact 0.3363636
      {"ihr-ihr", "W2", 2, 7.9365},            // printed 7.9364, exact 7.9364816
      {"ihr-ihr", "W2", 5, 8.8604},            // printed 8.8605, exact 8.8603603
      {"dhr-ihr", "W2", 2, 7.9365},            // same stage-2 law as ihr-ihr
      {"dhr-ihr", "W2", 5, 8.8604},
      {"ihr-dhr-d", "psi0", 3, 1.2482},        // printed 1.2483, exact 1.2482484
      {"ihr-dhr-d", "W1", 0, 1.2482},          // W1(0) = psi(0,3)
      {"ihr-dhr-d", "psi0", 5, 1.2398},        // printed 1.2399, exact 1.2398495
      {"ihr-dhr-d", "psi2", 4, 1.4375},        // printed 1.4376, exact 1.4375474
      {"ihr-dhr-e-finite", "psi0", 1, 0.9268},   // printed 0.9269, exact 0.9268495
      {"ihr-dhr-e-finite", "psi0", 2, 1.0202},   // printed 1.0203, exact 1.0202476
      {"ihr-dhr-e-finite", "psi1", 3, 1.2276},   // printed 1.2277, exact 1.2276469
      {"ihr-dhr-e-infinite", "psi3", 5, 2.2311},  // printed 2.2312, exact 2.2311452
      {"ihr-dhr-e-infinite", "psi4", 1, 2.0335},  // printed 2.0336, exact 2.0335485
  };
  return v;
}

/// Inclusive four-decimal tolerance: a true value sitting exactly on a
/// half (0.03125 printed as 0.0313) still matches.
inline constexpr double kFourDecimalTol = 5e-5 + 1e-9;

struct CellCheck {
  std::string row;
  int col = 0;
  std::string golden;
  std::string computed;
  enum class Status { Ok, KnownDeviation, Mismatch } status = Status::Ok;
};

struct FixtureCheck {
  std::string fixture;
  bool pass = true;
  int checked = 0;
  int mismatches = 0;
  int deviations = 0;
  std::vector<CellCheck> cells;

  void add(CellCheck c) {
    ++checked;
    if (c.status == CellCheck::Status::Mismatch) {
      ++mismatches;
      pass = false;
    }
    if (c.status == CellCheck::Status::KnownDeviation) ++deviations;
    cells.push_back(std::move(c));
  }
};

namespace detail {

inline const KnownDeviation* deviation_for(const std::string& fixture, const std::string& row,
                                           int col) {
  for (const KnownDeviation& d : known_deviations())
    if (fixture == d.fixture && row == d.row && col == d.col) return &d;
  return nullptr;
}

inline void check_value_cell(FixtureCheck& out, const std::string& row, int col,
                             const std::string& golden, double computed) {
  CellCheck c{row, col, golden, discounted::format4(computed), CellCheck::Status::Ok};
  if (const KnownDeviation* dev = deviation_for(out.fixture, row, col)) {
    c.status = std::abs(computed - dev->asserted) <= kFourDecimalTol
                   ? CellCheck::Status::KnownDeviation
                   : CellCheck::Status::Mismatch;
  } else if (std::abs(computed - std::stod(golden)) > kFourDecimalTol) {
    c.status = CellCheck::Status::Mismatch;
  }
  out.add(std::move(c));
}

inline void check_exact_cell(FixtureCheck& out, const std::string& row, int col,
                             const std::string& golden, const Rational& computed) {
  CellCheck c{row, col, golden, rational_to_string(computed), CellCheck::Status::Ok};
  if (parse_rational(golden) != computed) c.status = CellCheck::Status::Mismatch;
  out.add(std::move(c));
}

}  // namespace detail

/// Recompute a discounted fixture table and diff it cell by cell against the
/// golden file at the printed four-decimal resolution.
inline FixtureCheck check_discounted_fixture(const fixtures::Fixture& f) {
  FixtureCheck out;
  out.fixture = f.id;
  discounted::Engine<double> e(as_two_stage(f.job), f.beta);
  fixtures::Golden g = fixtures::load_golden(f);
  for (const auto& [row, cells] : g.rows) {
    for (int col = 0; col < static_cast<int>(cells.size()); ++col) {
      std::int64_t n = col;
      if (row == "mu1") {
        detail::check_value_cell(out, row, col, cells[col],
                                 to_double(e.job().stage1.hazard(n)));
      } else if (row == "mu2") {
        detail::check_value_cell(out, row, col, cells[col],
                                 to_double(e.job().stage2.hazard(n)));
      } else if (row == "W1") {
        detail::check_value_cell(out, row, col, cells[col], to_double(e.w1(n)));
      } else if (row == "W2") {
        detail::check_value_cell(out, row, col, cells[col], to_double(e.w2(n)));
      } else if (row == "phi") {
        CellCheck c{row, col, cells[col], e.phi(n).str(), CellCheck::Status::Ok};
        if (c.computed != c.golden) c.status = CellCheck::Status::Mismatch;
        out.add(std::move(c));
      } else if (row.rfind("psi", 0) == 0) {
        std::int64_t n1 = std::stoll(row.substr(3));
        detail::check_value_cell(out, row, col, cells[col], to_double(e.psi(n1, n)));
      } else {
        throw Error("unknown golden row '" + row + "' in " + f.id);
      }
    }
  }
  return out;
}

/// Recompute an exact fixture along BOTH routes (stage-peeling recursion and
/// profit-envelope composition) and require the golden fraction exactly.
inline FixtureCheck check_exact_fixture(const fixtures::Fixture& f) {
  FixtureCheck out;
  out.fixture = f.id;
  MultistageJob<Rational> job = fixtures::exact_job(f.id);
  fixtures::Golden g = fixtures::load_golden(f);
  for (const auto& [row, cells] : g.rows) {
    if (row.rfind("G", 0) != 0) throw Error("unknown golden row '" + row + "' in " + f.id);
    int stage = std::stoi(row.substr(1));
    for (int col = 0; col < static_cast<int>(cells.size()); ++col) {
      Rational rec = average::gittins_multistage(job, stage, col).value;
      Rational via_sjp =
          job.h * sjp::gittins_from_sjp(sjp::sjp_multistage(job, stage, col));
      detail::check_exact_cell(out, row + ".recursive", col, cells[col], rec);
      detail::check_exact_cell(out, row + ".sjp", col, cells[col], via_sjp);
    }
  }
  return out;
}

inline FixtureCheck check_fixture(const fixtures::Fixture& f) {
  return f.kind == fixtures::Fixture::Kind::DiscountedTable ? check_discounted_fixture(f)
                                                            : check_exact_fixture(f);
}

inline std::string render(const FixtureCheck& r, bool verbose) {
  std::string out;
  for (const CellCheck& c : r.cells) {
    if (!verbose && c.status == CellCheck::Status::Ok) continue;
    const char* mark = c.status == CellCheck::Status::Ok               ? "ok  "
                       : c.status == CellCheck::Status::KnownDeviation ? "DEV "
                                                                       : "FAIL";
    out += std::string(mark) + " " + c.row + "[" + std::to_string(c.col) + "]  golden=" +
           c.golden + "  computed=" + c.computed + "\n";
  }
  out += r.fixture + ": " + (r.pass ? "PASS" : "FAIL") + " (" + std::to_string(r.checked) +
         " cells";
  if (r.deviations) out += ", " + std::to_string(r.deviations) + " known deviations";
  if (r.mismatches) out += ", " + std::to_string(r.mismatches) + " mismatches";
  out += ")\n";
  return out;
}

}  // namespace msched::report

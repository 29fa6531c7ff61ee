#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "msched/discounted.hpp"

namespace msched::discounted {

/// Materialized index table for reporting: states (j, n) for n <= n_table
/// plus the n -> inf limits, with the psi grid and phi thresholds in the
/// *-DHR cases.
struct IndexTable {
  double beta = 0.9;
  double h = 1.0;
  std::int64_t n_table = 6;
  CaseTag tag;
  std::vector<double> mu1, mu2, w1, w2;
  std::vector<ExtInt> phi;                // empty when stage 2 is IHR
  std::vector<std::vector<double>> psi;   // psi[n1][n2], same caveat
  double w1_limit = 0.0, w2_limit = 0.0;
};

template <typename Scalar>
IndexTable build_index_table(const Engine<Scalar>& e, std::int64_t n_table) {
  IndexTable t;
  t.beta = to_double(e.beta());
  t.h = to_double(e.job().h);
  t.n_table = n_table;
  t.tag = e.classify();
  bool has_psi = t.tag.case_ == Case::DhrDhr || t.tag.case_ == Case::IhrDhr;
  for (std::int64_t n = 0; n <= n_table; ++n) {
    t.mu1.push_back(to_double(e.job().stage1.hazard(n)));
    t.mu2.push_back(to_double(e.job().stage2.hazard(n)));
    t.w1.push_back(to_double(e.w1(n)));
    t.w2.push_back(to_double(e.w2(n)));
    if (has_psi) {
      t.phi.push_back(e.phi(n));
      std::vector<double> row;
      for (std::int64_t n2 = 0; n2 <= n_table; ++n2)
        row.push_back(to_double(e.psi(n, n2)));
      t.psi.push_back(std::move(row));
    }
  }
  t.w1_limit = to_double(e.w1(ExtInt::infinity()));
  t.w2_limit = to_double(e.w2(ExtInt::infinity()));
  return t;
}

/// Default table depth: effective supports plus headroom.
template <typename Scalar>
std::int64_t default_table_depth(const TwoStageJob<Scalar>& job) {
  return std::max(job.stage1.effective_support(), job.stage2.effective_support()) + 8;
}

inline std::string format4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

/// CSV rows (state, value, case, phi); limits as n=inf rows.
inline std::string to_csv(const IndexTable& t) {
  std::string out = "stage,n,mu,W,phi,case\n";
  std::string tag = t.tag.str();
  for (std::int64_t n = 0; n <= t.n_table; ++n) {
    out += "1," + std::to_string(n) + "," + format4(t.mu1[n]) + "," + format4(t.w1[n]) + ",";
    out += t.phi.empty() ? "" : t.phi[n].str();
    out += "," + tag + "\n";
  }
  out += "1,inf,," + format4(t.w1_limit) + ",," + tag + "\n";
  for (std::int64_t n = 0; n <= t.n_table; ++n)
    out += "2," + std::to_string(n) + "," + format4(t.mu2[n]) + "," + format4(t.w2[n]) +
           ",," + tag + "\n";
  out += "2,inf,," + format4(t.w2_limit) + ",," + tag + "\n";
  return out;
}

/// Human-readable grid in the reference-table layout.
inline std::string render_table(const IndexTable& t) {
  auto row = [&](const std::string& name, auto cell) {
    std::string out = name;
    out.resize(8, ' ');
    for (std::int64_t n = 0; n <= t.n_table; ++n) {
      std::string c = cell(n);
      out += "  ";
      out.insert(out.end(), c.size() < 8 ? 8 - c.size() : 0, ' ');
      out += c;
    }
    return out + "\n";
  };
  std::string out = "case: " + t.tag.str() + "  (h=" + format4(t.h) +
                    ", beta=" + format4(t.beta) + ")\n";
  out += row("n", [&](std::int64_t n) { return std::to_string(n); });
  out += row("mu2", [&](std::int64_t n) { return format4(t.mu2[n]); });
  out += row("W2", [&](std::int64_t n) { return format4(t.w2[n]); });
  for (std::size_t n1 = 0; n1 < t.psi.size(); ++n1)
    out += row("psi" + std::to_string(n1),
               [&](std::int64_t n2) { return format4(t.psi[n1][n2]); });
  out += row("mu1", [&](std::int64_t n) { return format4(t.mu1[n]); });
  if (!t.phi.empty()) out += row("phi", [&](std::int64_t n) { return t.phi[n].str(); });
  out += row("W1", [&](std::int64_t n) { return format4(t.w1[n]); });
  out += "limits: W1(inf)=" + format4(t.w1_limit) + "  W2(inf)=" + format4(t.w2_limit) + "\n";
  return out;
}

}  // namespace msched::discounted

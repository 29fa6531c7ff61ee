#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "msched/average.hpp"
#include "msched/discounted.hpp"
#include "msched/job.hpp"
#include "msched/mdp.hpp"
#include "msched/philox.hpp"

namespace msched::sim {

struct ClassSpec {
  MultistageJob<double> job;
  double arrival_prob = 0.0;  // per-slot Bernoulli arrival probability (open mode)
};

struct ScenarioSpec {
  enum class Mode { Closed, Open };
  Mode mode = Mode::Closed;
  std::vector<ClassSpec> classes;  // closed mode: one entry = one initial job
  std::optional<double> beta;      // closed-mode discounting
  std::int64_t horizon = 100000;   // open-mode slots
  std::uint64_t seed = 1;
  std::int64_t replications = 1;
  std::int64_t t_max = 1 << 20;    // closed-mode slot cap
  std::int64_t queue_cap = 100000; // open-mode instability trigger
  int threads = 1;                 // replications are independent streams

  void validate() const {
    if (classes.empty()) throw SpecParseError("scenario has no jobs");
    if (replications < 1) throw SpecParseError("replications must be >= 1");
    if (beta && !(*beta > 0.0 && *beta < 1.0)) throw SpecParseError("beta outside (0,1)");
    if (mode == Mode::Open) {
      double load = 0.0;
      for (const ClassSpec& c : classes) {
        if (!(c.arrival_prob > 0.0 && c.arrival_prob < 1.0))
          throw SpecParseError("open-mode arrival probability outside (0,1)");
        double work = 0.0;
        for (const auto& s : c.job.stages) {
          if (!s.proper()) throw SpecParseError("open mode needs proper service laws");
          work += s.mean();
        }
        load += c.arrival_prob * work;
      }
      if (load >= 1.0) throw SpecParseError("unstable: sum lambda E[S] = " +
                                            std::to_string(load) + " >= 1");
    }
  }
};

struct Policy {
  enum class Kind { Gittins, Fcfs, Fb, RandomNonIdle, NonPreemptivePriority, Srpt };
  enum class IndexSource { ClosedForm, Oracle, Recursive };
  Kind kind = Kind::Gittins;
  IndexSource source = IndexSource::ClosedForm;

  std::string name() const {
    switch (kind) {
      case Kind::Gittins:
        return source == IndexSource::ClosedForm ? "gittins"
               : source == IndexSource::Oracle   ? "gittins-oracle"
                                                 : "gittins-recursive";
      case Kind::Fcfs: return "fcfs";
      case Kind::Fb: return "fb";
      case Kind::RandomNonIdle: return "random";
      case Kind::NonPreemptivePriority: return "npprio";
      default: return "srpt";
    }
  }
};

struct MetricSummary {
  std::string metric;
  double mean = 0.0, ci_lo = 0.0, ci_hi = 0.0;
  std::int64_t reps = 0;
};

struct SimResult {
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<MetricSummary> metrics;
  Eigen::ArrayXd raw_discounted;  // closed mode, when beta given
  Eigen::ArrayXd raw_flowtime;    // closed mode
  Eigen::ArrayXd raw_average;     // open mode
  bool instability_warning = false;
  bool incomplete_paths = false;  // a closed replication hit t_max

  const MetricSummary* find(const std::string& name) const {
    for (const auto& m : metrics)
      if (m.metric == name) return &m;
    return nullptr;
  }
};

namespace detail {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max() / 4;

constexpr std::uint32_t kTagArrival = 0xA1u;
constexpr std::uint32_t kTagDuration = 0xD0u;
constexpr std::uint32_t kTagPolicy = 0x90u;

/// Inverse-transform sample of a service time; kNever for the defective
/// never-completing branch.
inline std::int64_t sample_duration(const ServiceDistribution<double>& d, double u) {
  if (u <= d.survival_limit()) return kNever;
  double surv = 1.0;
  for (std::int64_t m = 1;; ++m) {
    surv *= 1.0 - d.hazard(m - 1);
    if (surv < u) return m;
    if (m > (1 << 26)) return kNever;  // u below double-resolved tail mass
  }
}

struct LiveJob {
  int cls = 0;
  std::int64_t uid = 0;
  std::int64_t arrival = 0;
  int stage = 1;  // 1-based; 0 = completed
  std::int64_t attained_in_stage = 0;
  std::int64_t attained_total = 0;
  std::vector<std::int64_t> durations;

  bool alive() const { return stage != 0; }
  std::int64_t remaining_total() const {
    if (!alive()) return 0;
    std::int64_t rem = 0;
    for (std::size_t j = stage - 1; j < durations.size(); ++j) {
      if (durations[j] >= kNever) return kNever;
      rem += durations[j];
    }
    return rem - attained_in_stage;
  }
};

/// Per-class index tables, precomputed up to a cap with the limit value as
/// the tail so the per-slot policy decision is a lookup.
class IndexTables {
 public:
  IndexTables() = default;
  IndexTables(const ScenarioSpec& spec, const Policy& policy, std::int64_t cap = 0) {
    if (policy.kind != Policy::Kind::Gittins) return;
    if (cap <= 0) cap = policy.source == Policy::IndexSource::Oracle ? 64 : 256;
    for (const ClassSpec& c : spec.classes) {
      std::vector<std::vector<double>> stages;
      std::vector<double> tails;
      for (int j = 1; j <= c.job.num_stages(); ++j) {
        std::vector<double> row;
        std::int64_t top = c.job.stage(j).finite_support()
                               ? c.job.stage(j).support()
                               : cap;
        for (std::int64_t n = 0; n < top; ++n)
          row.push_back(state_index(spec, policy, c.job, j, n));
        stages.push_back(std::move(row));
        tails.push_back(tail_index(spec, policy, c.job, j, top));
      }
      per_class_.push_back(std::move(stages));
      tails_.push_back(std::move(tails));
    }
  }

  double lookup(int cls, int stage, std::int64_t n) const {
    const auto& row = per_class_[cls][stage - 1];
    if (n < static_cast<std::int64_t>(row.size())) return row[n];
    return tails_[cls][stage - 1];
  }

 private:
  static double state_index(const ScenarioSpec& spec, const Policy& policy,
                            const MultistageJob<double>& job, int stage, std::int64_t n) {
    switch (policy.source) {
      case Policy::IndexSource::ClosedForm:
        if (spec.mode == ScenarioSpec::Mode::Closed && spec.beta) {
          discounted::Engine<double> e(as_two_stage(job), *spec.beta);
          return e.whittle(JobState::at(stage, n));
        }
        return average::whittle_average(as_two_stage(job), JobState::at(stage, n));
      case Policy::IndexSource::Oracle: {
        if (!(spec.mode == ScenarioSpec::Mode::Closed && spec.beta))
          throw NotApplicable("the oracle index source needs a discounted closed scenario");
        mdp::PriceOptions opt;
        opt.n_cap = 200;
        return mdp::indifference_price(job, *spec.beta, JobState::at(stage, n), opt);
      }
      case Policy::IndexSource::Recursive:
      default:
        return average::gittins_multistage(job, stage, n).value;
    }
  }

  static double tail_index(const ScenarioSpec& spec, const Policy& policy,
                           const MultistageJob<double>& job, int stage, std::int64_t top) {
    if (job.stage(stage).finite_support()) return 0.0;  // unreachable past support
    if (policy.source == Policy::IndexSource::ClosedForm && spec.mode ==
            ScenarioSpec::Mode::Closed && spec.beta) {
      discounted::Engine<double> e(as_two_stage(job), *spec.beta);
      return stage == 1 ? e.w1(ExtInt::infinity()) : e.w2(ExtInt::infinity());
    }
    return state_index(spec, policy, job, stage, top);
  }

  std::vector<std::vector<std::vector<double>>> per_class_;
  std::vector<std::vector<double>> tails_;
};

}  // namespace detail

/// Slot-by-slot single-server simulation of a scenario under one policy.
/// Identical (spec, policy, seed) triples give bitwise-identical results.
class Simulator {
 public:
  Simulator(ScenarioSpec spec, Policy policy)
      : spec_(std::move(spec)), policy_(policy), tables_(spec_, policy_) {
    spec_.validate();
  }

  SimResult run() {
    const std::int64_t reps = spec_.replications;
    Eigen::ArrayXd disc(reps), flow(reps), avg(reps);
    SimResult out;
    out.policy = policy_.name();
    out.seed = spec_.seed;
    // replications are pure functions of (seed, rep): sharding them across
    // threads cannot change the results
    int threads = std::clamp(spec_.threads, 1, 64);
    std::vector<char> unstable(threads, 0), hit_cap(threads, 0);
    auto worker = [&](int t) {
      for (std::int64_t rep = t; rep < reps; rep += threads) {
        Replication r = run_one(static_cast<std::uint32_t>(rep));
        disc[rep] = r.discounted;
        flow[rep] = r.flowtime;
        avg[rep] = r.average_queue_cost;
        unstable[t] |= r.unstable;
        hit_cap[t] |= r.hit_cap;
      }
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
      for (auto& th : pool) th.join();
    }
    for (int t = 0; t < threads; ++t) {
      out.instability_warning = out.instability_warning || unstable[t];
      out.incomplete_paths = out.incomplete_paths || hit_cap[t];
    }
    if (spec_.mode == ScenarioSpec::Mode::Closed) {
      if (spec_.beta) {
        out.raw_discounted = disc;
        out.metrics.push_back(summarize("discounted_cost", disc));
      }
      out.raw_flowtime = flow;
      out.metrics.push_back(summarize("flowtime_cost", flow));
    } else {
      out.raw_average = avg;
      out.metrics.push_back(summarize("avg_queue_cost", avg));
    }
    return out;
  }

 private:
  struct Replication {
    double discounted = 0.0;
    double flowtime = 0.0;
    double average_queue_cost = 0.0;
    bool unstable = false;
    bool hit_cap = false;
  };

  static MetricSummary summarize(const std::string& name, const Eigen::ArrayXd& raw) {
    MetricSummary m;
    m.metric = name;
    m.reps = raw.size();
    m.mean = raw.mean();
    double sd = raw.size() > 1
                    ? std::sqrt((raw - m.mean).square().sum() / double(raw.size() - 1))
                    : 0.0;
    double half = 1.959963984540054 * sd / std::sqrt(double(raw.size()));
    m.ci_lo = m.mean - half;
    m.ci_hi = m.mean + half;
    return m;
  }

  detail::LiveJob spawn(const Philox& gen, std::uint32_t rep, int cls, std::int64_t uid,
                        std::int64_t slot) const {
    detail::LiveJob job;
    job.cls = cls;
    job.uid = uid;
    job.arrival = slot;
    const auto& stages = spec_.classes[cls].job.stages;
    for (std::size_t j = 0; j < stages.size(); ++j) {
      double u = gen.uniform(detail::kTagDuration, static_cast<std::uint32_t>(uid),
                             static_cast<std::uint32_t>(j), rep);
      job.durations.push_back(detail::sample_duration(stages[j], u));
    }
    return job;
  }

  // index of the served job in jobs, or -1
  std::int64_t pick(const std::vector<detail::LiveJob>& jobs, const Philox& gen,
                    std::uint32_t rep, std::int64_t slot, std::int64_t keep_serving) const {
    std::int64_t best = -1;
    auto better = [&](std::int64_t i, std::int64_t j) {  // does i beat j
      const detail::LiveJob &a = jobs[i], &b = jobs[j];
      switch (policy_.kind) {
        case Policy::Kind::Gittins: {
          double ia = tables_.lookup(a.cls, a.stage, a.attained_in_stage);
          double ib = tables_.lookup(b.cls, b.stage, b.attained_in_stage);
          if (ia != ib) return ia > ib;
          return a.uid < b.uid;
        }
        case Policy::Kind::Fcfs:
          return std::pair(a.arrival, a.uid) < std::pair(b.arrival, b.uid);
        case Policy::Kind::Fb:
          return std::pair(a.attained_total, a.uid) < std::pair(b.attained_total, b.uid);
        case Policy::Kind::NonPreemptivePriority: {
          double ha = to_double(spec_.classes[a.cls].job.h);
          double hb = to_double(spec_.classes[b.cls].job.h);
          if (ha != hb) return ha > hb;
          return a.uid < b.uid;
        }
        case Policy::Kind::Srpt:
          return std::pair(a.remaining_total(), a.uid) <
                 std::pair(b.remaining_total(), b.uid);
        default:
          return a.uid < b.uid;
      }
    };
    if (policy_.kind == Policy::Kind::NonPreemptivePriority && keep_serving >= 0 &&
        jobs[keep_serving].alive())
      return keep_serving;
    if (policy_.kind == Policy::Kind::RandomNonIdle) {
      std::vector<std::int64_t> alive;
      for (std::size_t i = 0; i < jobs.size(); ++i)
        if (jobs[i].alive()) alive.push_back(i);
      if (alive.empty()) return -1;
      double u = gen.uniform(detail::kTagPolicy, static_cast<std::uint32_t>(slot), 0, rep);
      return alive[std::min<std::size_t>(alive.size() - 1,
                                         static_cast<std::size_t>(u * alive.size()))];
    }
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (!jobs[i].alive()) continue;
      if (best < 0 || better(i, best)) best = i;
    }
    return best;
  }

  Replication run_one(std::uint32_t rep) const {
    Philox gen(spec_.seed);
    Replication out;
    std::vector<detail::LiveJob> jobs;
    std::int64_t next_uid = 0;
    const bool closed = spec_.mode == ScenarioSpec::Mode::Closed;
    if (closed) {
      for (std::size_t k = 0; k < spec_.classes.size(); ++k)
        jobs.push_back(spawn(gen, rep, static_cast<int>(k), next_uid++, 0));
    }
    const double beta = spec_.beta.value_or(1.0);
    // stop adding discounted cost once the remaining mass is below 1e-15
    double total_h = 0.0;
    for (const auto& c : spec_.classes) total_h += to_double(c.job.h);
    const double disc_floor =
        spec_.beta ? 1e-15 * (1.0 - beta) / std::max(total_h, 1e-12) : 0.0;
    double disc_weight = 1.0;
    std::int64_t served_idx = -1;
    const std::int64_t t_end = closed ? spec_.t_max : spec_.horizon;
    std::int64_t alive_count = static_cast<std::int64_t>(jobs.size());

    for (std::int64_t t = 0; t < t_end; ++t) {
      if (!closed) {
        for (std::size_t k = 0; k < spec_.classes.size(); ++k) {
          double u = gen.uniform(detail::kTagArrival, static_cast<std::uint32_t>(t),
                                 static_cast<std::uint32_t>(k), rep);
          if (u <= spec_.classes[k].arrival_prob) {
            jobs.push_back(spawn(gen, rep, static_cast<int>(k), next_uid++, t));
            ++alive_count;
          }
        }
        if (alive_count > spec_.queue_cap) out.unstable = true;
      }
      // holding costs for jobs alive at the start of the slot
      double cost = 0.0;
      for (const auto& j : jobs)
        if (j.alive()) cost += to_double(spec_.classes[j.cls].job.h);
      if (closed) {
        if (spec_.beta) out.discounted += disc_weight * cost;
        out.flowtime += cost;
        disc_weight *= beta;
      } else {
        out.average_queue_cost += cost;
      }
      if (closed && alive_count == 0) break;
      if (closed && spec_.beta && disc_weight < disc_floor && alive_count > 0) {
        // remaining discounted mass is negligible; flow-time is truncated
        out.hit_cap = true;
        break;
      }
      std::int64_t pick_idx = pick(jobs, gen, rep, t, served_idx);
      if (pick_idx < 0) continue;
      detail::LiveJob& job = jobs[pick_idx];
      served_idx = pick_idx;
      ++job.attained_in_stage;
      ++job.attained_total;
      if (job.attained_in_stage == job.durations[job.stage - 1]) {
        job.stage = job.stage == static_cast<int>(job.durations.size()) ? 0 : job.stage + 1;
        job.attained_in_stage = 0;
        if (!job.alive()) {
          --alive_count;
          served_idx = -1;
        }
      }
      if (!closed) {
        // drop completed jobs so the vector stays small
        if (static_cast<std::int64_t>(jobs.size()) > 4 * std::max<std::int64_t>(alive_count, 16)) {
          std::vector<detail::LiveJob> keep;
          keep.reserve(alive_count);
          for (auto& j : jobs)
            if (j.alive()) keep.push_back(std::move(j));
          jobs.swap(keep);
          served_idx = -1;
        }
      }
    }
    if (closed && alive_count > 0 && !out.hit_cap) out.hit_cap = true;
    if (!closed) out.average_queue_cost /= static_cast<double>(spec_.horizon);
    return out;
  }

  ScenarioSpec spec_;
  Policy policy_;
  detail::IndexTables tables_;
};

inline SimResult run(const ScenarioSpec& spec, const Policy& policy) {
  return Simulator(spec, policy).run();
}

/// Results as CSV: policy, metric, mean, ci_lo, ci_hi, reps, seed.
inline std::string to_csv(const std::vector<SimResult>& results) {
  std::string out = "policy,metric,mean,ci_lo,ci_hi,reps,seed\n";
  char buf[256];
  for (const SimResult& r : results) {
    for (const MetricSummary& m : r.metrics) {
      std::snprintf(buf, sizeof buf, "%s,%s,%.9g,%.9g,%.9g,%lld,%llu\n", r.policy.c_str(),
                    m.metric.c_str(), m.mean, m.ci_lo, m.ci_hi,
                    static_cast<long long>(m.reps), static_cast<unsigned long long>(r.seed));
      out += buf;
    }
  }
  return out;
}

}  // namespace msched::sim

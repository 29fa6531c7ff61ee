#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "msched/errors.hpp"
#include "msched/rational.hpp"

namespace msched {

enum class MonotonicityClass { DHR, IHR, CHR, NonMonotone };

inline const char* to_string(MonotonicityClass c) {
  switch (c) {
    case MonotonicityClass::DHR: return "DHR";
    case MonotonicityClass::IHR: return "IHR";
    case MonotonicityClass::CHR: return "CHR";
    default: return "NonMonotone";
  }
}

inline bool is_monotone(MonotonicityClass c) { return c != MonotonicityClass::NonMonotone; }

/// Discrete service-time law on {1, 2, ...} described by its hazard sequence
/// mu(n) = P{S = n+1 | S >= n+1}.  Immutable after construction; all queries
/// are const and safe to share across threads.
///
/// Kinds:
///  - FinitePmf / HazardTable: finite support {1..N}, final hazard 1.
///  - Geometric(mu): constant hazard.
///  - GeometricMixture(p_k, mu_k): hazard is the posterior-weighted rate;
///    strictly decreasing whenever the rates differ.
///  - GeomHazard(start, limit, alpha): mu(n) = limit + (start-limit) alpha^n,
///    the hazard approaching its limit geometrically.  Covers e.g.
///    mu(n) = a^{n+1} (start=a, limit=0) and mu(n) = 1 - a^{n+1}.
template <typename Scalar>
class ServiceDistribution {
 public:
  enum class Kind { FinitePmf, HazardTable, Geometric, GeometricMixture, GeomHazard };

  static ServiceDistribution from_pmf(std::vector<Scalar> pmf) {
    ServiceDistribution d;
    d.kind_ = Kind::FinitePmf;
    while (!pmf.empty() && pmf.back() == Scalar(0)) pmf.pop_back();
    if (pmf.empty()) throw InvalidDistribution("pmf is empty");
    Scalar sum(0);
    for (const Scalar& p : pmf) {
      if (p < Scalar(0)) throw InvalidDistribution("pmf has a negative entry");
      sum += p;
    }
    check_one(sum, "pmf must sum to 1");
    // hazards from the pmf; stop early if the survival hits zero
    std::vector<Scalar> hazards;
    Scalar surv(1);
    for (std::size_t n = 0; n < pmf.size(); ++n) {
      if (surv == Scalar(0)) break;
      hazards.push_back(pmf[n] / surv);
      surv -= pmf[n];
    }
    if (!hazards.empty()) hazards.back() = Scalar(1);
    d.init_finite(std::move(hazards));
    return d;
  }

  static ServiceDistribution from_hazards(std::vector<Scalar> hazards) {
    ServiceDistribution d;
    d.kind_ = Kind::HazardTable;
    if (hazards.empty()) throw InvalidDistribution("hazard table is empty");
    for (const Scalar& mu : hazards)
      if (mu < Scalar(0) || mu > Scalar(1)) throw InvalidDistribution("hazard outside [0,1]");
    check_one(hazards.back(), "final hazard of a table must be 1");
    hazards.back() = Scalar(1);
    // an interior hazard of 1 ends the support
    for (std::size_t n = 0; n + 1 < hazards.size(); ++n) {
      if (hazards[n] == Scalar(1)) {
        hazards.resize(n + 1);
        break;
      }
    }
    d.init_finite(std::move(hazards));
    return d;
  }

  static ServiceDistribution geometric(Scalar mu) {
    ServiceDistribution d;
    d.kind_ = Kind::Geometric;
    if (mu <= Scalar(0) || mu > Scalar(1)) throw InvalidDistribution("geometric rate outside (0,1]");
    d.rates_ = {mu};
    d.weights_ = {Scalar(1)};
    d.class_ = MonotonicityClass::CHR;
    return d;
  }

  static ServiceDistribution geometric_mixture(std::vector<Scalar> weights,
                                               std::vector<Scalar> rates) {
    ServiceDistribution d;
    d.kind_ = Kind::GeometricMixture;
    if (weights.size() != rates.size() || weights.empty())
      throw InvalidDistribution("mixture needs matching weight/rate lists");
    Scalar sum(0);
    for (const Scalar& w : weights) {
      if (w <= Scalar(0)) throw InvalidDistribution("mixture weights must be positive");
      sum += w;
    }
    check_one(sum, "mixture weights must sum to 1");
    for (const Scalar& mu : rates)
      if (mu <= Scalar(0) || mu > Scalar(1)) throw InvalidDistribution("mixture rate outside (0,1]");
    d.weights_ = std::move(weights);
    d.rates_ = std::move(rates);
    bool all_equal = true;
    for (const Scalar& mu : d.rates_) all_equal = all_equal && (mu == d.rates_.front());
    d.class_ = all_equal ? MonotonicityClass::CHR : MonotonicityClass::DHR;
    return d;
  }

  /// mu(n) = limit + (start - limit) alpha^n with alpha in (0,1).
  static ServiceDistribution geom_hazard(Scalar start, Scalar limit, Scalar alpha) {
    ServiceDistribution d;
    d.kind_ = Kind::GeomHazard;
    if (alpha <= Scalar(0) || alpha >= Scalar(1))
      throw InvalidDistribution("geomhazard alpha outside (0,1)");
    for (const Scalar& mu : {start, limit})
      if (mu < Scalar(0) || mu > Scalar(1)) throw InvalidDistribution("geomhazard rate outside [0,1]");
    d.gh_start_ = start;
    d.gh_limit_ = limit;
    d.gh_alpha_ = alpha;
    d.class_ = start > limit   ? MonotonicityClass::DHR
               : start < limit ? MonotonicityClass::IHR
                               : MonotonicityClass::CHR;
    // prefix of survival probabilities \bar p(m); extended on demand
    d.surv_ = {Scalar(1)};
    std::int64_t prefix = d.decay_horizon(1e-18) + 8;
    for (std::int64_t m = 0; m < prefix; ++m)
      d.surv_.push_back(d.surv_.back() * (Scalar(1) - d.hazard(m)));
    return d;
  }

  Kind kind() const { return kind_; }
  MonotonicityClass monotonicity() const { return class_; }
  bool finite_support() const {
    return kind_ == Kind::FinitePmf || kind_ == Kind::HazardTable;
  }
  /// Support size N for finite kinds.
  std::int64_t support() const {
    if (!finite_support()) throw NotApplicable("support() on an infinite-support law");
    return static_cast<std::int64_t>(hazards_.size());
  }

  /// mu(n) = P{S = n+1 | S >= n+1}.
  Scalar hazard(std::int64_t n) const {
    if (n < 0) throw QueryBeyondSupport("negative attained service");
    switch (kind_) {
      case Kind::FinitePmf:
      case Kind::HazardTable:
        if (n >= static_cast<std::int64_t>(hazards_.size()))
          throw QueryBeyondSupport("hazard query at n=" + std::to_string(n) +
                                   " past support " + std::to_string(hazards_.size()));
        return hazards_[static_cast<std::size_t>(n)];
      case Kind::Geometric:
        return rates_[0];
      case Kind::GeometricMixture: {
        std::vector<Scalar> w = posterior(n);
        Scalar mu(0);
        for (std::size_t k = 0; k < w.size(); ++k) mu += w[k] * rates_[k];
        return mu;
      }
      case Kind::GeomHazard:
      default:
        return gh_limit_ + (gh_start_ - gh_limit_) * pow_int(gh_alpha_, n);
    }
  }

  /// mu(infinity); 1 by convention for finite supports (the job surely
  /// completes at the end of the table).
  Scalar hazard_limit() const {
    switch (kind_) {
      case Kind::FinitePmf:
      case Kind::HazardTable:
        return Scalar(1);
      case Kind::Geometric:
        return rates_[0];
      case Kind::GeometricMixture:
        return *std::min_element(rates_.begin(), rates_.end());
      case Kind::GeomHazard:
      default:
        return gh_limit_;
    }
  }

  /// \bar p(i|n) = P{S >= n+i+1 | S >= n+1}.
  Scalar survival(std::int64_t i, std::int64_t n) const {
    if (i < 0 || n < 0) throw QueryBeyondSupport("negative argument");
    if (i == 0) return Scalar(1);
    switch (kind_) {
      case Kind::FinitePmf:
      case Kind::HazardTable: {
        Scalar base = surv_unconditional(n);
        if (base == Scalar(0)) throw ConditioningOnNull("survival conditioned on P{S>=n+1}=0");
        return surv_unconditional(n + i) / base;
      }
      case Kind::Geometric:
        return pow_int(Scalar(1) - rates_[0], i);
      case Kind::GeometricMixture: {
        std::vector<Scalar> w = posterior(n);
        Scalar s(0);
        for (std::size_t k = 0; k < w.size(); ++k)
          s += w[k] * pow_int(Scalar(1) - rates_[k], i);
        return s;
      }
      case Kind::GeomHazard:
      default: {
        Scalar base = surv_unconditional(n);
        if (base == Scalar(0)) throw ConditioningOnNull("survival conditioned on P{S>=n+1}=0");
        return surv_unconditional(n + i) / base;
      }
    }
  }

  /// p(i|n) = P{S = n+i+1 | S >= n+1} = \bar p(i|n) mu(n+i).
  Scalar pmf_cond(std::int64_t i, std::int64_t n) const {
    if (finite_support() && n + i >= support()) {
      Scalar base = surv_unconditional(n);
      if (base == Scalar(0)) throw ConditioningOnNull("pmf conditioned on P{S>=n+1}=0");
      return Scalar(0);
    }
    return survival(i, n) * hazard(n + i);
  }

  /// P{S <= m}.
  Scalar cdf(std::int64_t m) const { return Scalar(1) - surv_unconditional(m); }

  /// E[min{S, m}] = sum_{i=0}^{m-1} \bar p(i).
  Scalar partial_mean(std::int64_t m) const {
    Scalar s(0);
    for (std::int64_t i = 0; i < m; ++i) {
      Scalar t = surv_unconditional(i);
      if (t == Scalar(0)) break;
      s += t;
    }
    return s;
  }

  /// The law is proper (completes with probability 1).
  bool proper() const {
    if (finite_support()) return true;
    if (kind_ == Kind::GeomHazard) return gh_limit_ > Scalar(0);
    return true;  // geometric kinds have rates in (0,1]
  }

  /// lim_m P{S >= m+1}: zero for proper laws, the never-completing mass for
  /// defective ones.
  double survival_limit() const {
    if (proper()) return 0.0;
    return to_double(surv_.back());
  }

  /// E[S]; requires a proper law.
  Scalar mean() const { return mean_residual(0); }

  /// E[S - n | S >= n+1] = sum_i \bar p(i|n).
  Scalar mean_residual(std::int64_t n) const {
    switch (kind_) {
      case Kind::FinitePmf:
      case Kind::HazardTable: {
        Scalar s(0);
        for (std::int64_t i = 0; n + i < support(); ++i) s += survival(i, n);
        return s;
      }
      case Kind::Geometric:
        return Scalar(1) / rates_[0];
      case Kind::GeometricMixture: {
        std::vector<Scalar> w = posterior(n);
        Scalar s(0);
        for (std::size_t k = 0; k < w.size(); ++k) s += w[k] / rates_[k];
        return s;
      }
      case Kind::GeomHazard:
      default: {
        if (!proper()) throw NotApplicable("mean of a defective law");
        // truncated sum plus a geometric tail at the limiting hazard
        Scalar s(0), sv(1);
        Scalar gap = (gh_start_ - gh_limit_) * pow_int(gh_alpha_, n);
        for (std::int64_t i = 0; i < (1 << 21); ++i) {
          s += sv;
          sv *= Scalar(1) - (gh_limit_ + gap);
          gap *= gh_alpha_;
          if (to_double(sv) < 1e-18) break;
        }
        s += sv / gh_limit_;
        return s;
      }
    }
  }

  /// D(n) = sum_{i>=0} beta^i \bar p(i|n); exact closed form for geometric
  /// kinds, finite sum for tables, truncation + limiting-hazard tail for
  /// GeomHazard (error below beta^T \bar p(T) / (1-beta)).
  Scalar disc_survival_inf(const Scalar& beta, std::int64_t n) const {
    switch (kind_) {
      case Kind::FinitePmf:
      case Kind::HazardTable: {
        if (surv_unconditional(n) == Scalar(0))
          throw ConditioningOnNull("discounted sum conditioned on P{S>=n+1}=0");
        Scalar s(0), b(1);
        for (std::int64_t i = 0; n + i < support(); ++i) {
          s += b * survival(i, n);
          b *= beta;
        }
        return s;
      }
      case Kind::Geometric:
        return Scalar(1) / (Scalar(1) - beta * (Scalar(1) - rates_[0]));
      case Kind::GeometricMixture: {
        std::vector<Scalar> w = posterior(n);
        Scalar s(0);
        for (std::size_t k = 0; k < w.size(); ++k)
          s += w[k] / (Scalar(1) - beta * (Scalar(1) - rates_[k]));
        return s;
      }
      case Kind::GeomHazard:
      default: {
        // truncate once beta^i \bar p(i|n) is negligible, then close with a
        // geometric tail at the limiting hazard
        Scalar s(0), b(1), sv(1);
        Scalar gap = (gh_start_ - gh_limit_) * pow_int(gh_alpha_, n);
        for (std::int64_t i = 0; i < (1 << 22); ++i) {
          s += b * sv;
          sv *= Scalar(1) - (gh_limit_ + gap);
          gap *= gh_alpha_;
          b *= beta;
          if (to_double(b) * to_double(sv) < 1e-18) break;
        }
        s += b * sv / (Scalar(1) - beta * (Scalar(1) - gh_limit_));
        return s;
      }
    }
  }

  /// sum_{i>=0} beta^i p(i|n) = (1 - (1-beta) D(n)) / beta.
  Scalar disc_pmf_inf(const Scalar& beta, std::int64_t n) const {
    return (Scalar(1) - (Scalar(1) - beta) * disc_survival_inf(beta, n)) / beta;
  }

  /// Geometric decay rate of the survival tail (1 when the law is defective
  /// and the tail mass never dies).
  double survival_decay_rate() const {
    switch (kind_) {
      case Kind::FinitePmf:
      case Kind::HazardTable:
        return 0.0;
      case Kind::Geometric:
        return 1.0 - to_double(rates_[0]);
      case Kind::GeometricMixture: {
        double q = 0.0;
        for (const Scalar& mu : rates_) q = std::max(q, 1.0 - to_double(mu));
        return q;
      }
      case Kind::GeomHazard:
      default:
        return gh_limit_ > Scalar(0) ? 1.0 - to_double(gh_limit_) : 1.0;
    }
  }

  /// Geometric rate at which the hazard sequence approaches its limit.
  double hazard_decay_rate() const {
    switch (kind_) {
      case Kind::FinitePmf:
      case Kind::HazardTable:
      case Kind::Geometric:
        return 0.0;
      case Kind::GeometricMixture: {
        double q = 0.0;
        for (const Scalar& mu : rates_) q = std::max(q, 1.0 - to_double(mu));
        return q;
      }
      case Kind::GeomHazard:
      default:
        return to_double(gh_alpha_);
    }
  }

  /// Horizon beyond which the hazard sits at its limit (finite kinds: the
  /// support) to within tol; used for table truncation.
  std::int64_t effective_support(double tol = 1e-12) const {
    if (finite_support()) return support();
    double q = std::max(hazard_decay_rate(), survival_decay_rate() < 1.0
                                                 ? survival_decay_rate()
                                                 : 0.0);
    if (q <= 0.0) return 1;
    double n = std::log(tol) / std::log(q);
    return std::min<std::int64_t>(static_cast<std::int64_t>(n) + 1, 1 << 20);
  }

  /// Horizon past which both the hazard and the beta-damped tail sums have
  /// converged to within tol; threshold crossings cannot hide beyond it.
  std::int64_t convergence_horizon(double beta, double tol = 1e-16) const {
    if (finite_support()) return support();
    double rho = std::max(hazard_decay_rate(),
                          std::min(beta * survival_decay_rate(), 0.9999999));
    if (rho <= 0.0) return 1;
    double n = std::log(tol) / std::log(rho);
    return std::min<std::int64_t>(static_cast<std::int64_t>(n) + 17, 1 << 22);
  }

  /// Scan horizon for threshold searches over the hazard sequence alone.
  std::int64_t scan_horizon() const {
    if (finite_support()) return support();
    double q = std::max(hazard_decay_rate(), 1e-6);
    return static_cast<std::int64_t>(std::log(1e-16) / std::log(std::min(q, 0.9999999))) + 17;
  }

  bool operator==(const ServiceDistribution& o) const {
    return kind_ == o.kind_ && hazards_ == o.hazards_ && weights_ == o.weights_ &&
           rates_ == o.rates_ && gh_start_ == o.gh_start_ && gh_limit_ == o.gh_limit_ &&
           gh_alpha_ == o.gh_alpha_;
  }

  // parameter accessors (for serialization)
  const std::vector<Scalar>& hazards() const { return hazards_; }
  const std::vector<Scalar>& pmf() const { return pmf_; }
  const std::vector<Scalar>& mixture_weights() const { return weights_; }
  const std::vector<Scalar>& mixture_rates() const { return rates_; }
  Scalar geom_rate() const { return rates_.at(0); }
  Scalar gh_start() const { return gh_start_; }
  Scalar gh_limit() const { return gh_limit_; }
  Scalar gh_alpha() const { return gh_alpha_; }

 private:
  ServiceDistribution() = default;

  static void check_one(const Scalar& x, const char* what) {
    if constexpr (scalar_traits<Scalar>::is_exact) {
      if (x != Scalar(1)) throw InvalidDistribution(what);
    } else {
      if (std::abs(to_double(x) - 1.0) > 1e-12) throw InvalidDistribution(what);
    }
  }

  void init_finite(std::vector<Scalar> hazards) {
    if (hazards.empty()) throw InvalidDistribution("empty support");
    if constexpr (!scalar_traits<Scalar>::is_exact) {
      for (Scalar& mu : hazards) mu = std::clamp(mu, Scalar(0), Scalar(1));
    }
    hazards_ = std::move(hazards);
    surv_ = {Scalar(1)};
    pmf_.clear();
    for (const Scalar& mu : hazards_) {
      pmf_.push_back(surv_.back() * mu);
      surv_.push_back(surv_.back() * (Scalar(1) - mu));
    }
    classify_finite();
  }

  void classify_finite() {
    // the sequence under test is mu(0..N-1) followed by the tail limit 1
    bool dhr = true, ihr = true;
    for (std::size_t n = 0; n + 1 < hazards_.size(); ++n) {
      if (hazards_[n] < hazards_[n + 1]) dhr = false;
      if (hazards_[n] > hazards_[n + 1]) ihr = false;
    }
    if (hazards_.back() < Scalar(1)) dhr = false;  // unreachable: back()==1
    class_ = dhr && ihr ? MonotonicityClass::CHR
             : dhr      ? MonotonicityClass::DHR
             : ihr      ? MonotonicityClass::IHR
                        : MonotonicityClass::NonMonotone;
  }

  // posterior mixture weights given survival to n, computed with the
  // components rescaled by the largest tail to stay stable in float mode
  std::vector<Scalar> posterior(std::int64_t n) const {
    std::size_t kmax = 0;
    for (std::size_t k = 1; k < rates_.size(); ++k)
      if (rates_[k] < rates_[kmax]) kmax = k;  // largest 1-mu
    Scalar qmax = Scalar(1) - rates_[kmax];
    std::vector<Scalar> w(rates_.size());
    Scalar z(0);
    for (std::size_t k = 0; k < rates_.size(); ++k) {
      Scalar q = Scalar(1) - rates_[k];
      Scalar ratio = qmax == Scalar(0) ? (k == kmax ? Scalar(1) : Scalar(0)) : q / qmax;
      w[k] = weights_[k] * pow_int(ratio, n);
      z += w[k];
    }
    if (z == Scalar(0)) throw ConditioningOnNull("mixture posterior at zero survival");
    for (Scalar& x : w) x /= z;
    return w;
  }

  Scalar surv_unconditional(std::int64_t m) const {
    if (finite_support() || kind_ == Kind::GeomHazard) {
      if (m < static_cast<std::int64_t>(surv_.size())) return surv_[static_cast<std::size_t>(m)];
      if (finite_support()) return Scalar(0);
      Scalar s = surv_.back();
      for (std::int64_t k = static_cast<std::int64_t>(surv_.size()) - 1; k < m; ++k)
        s *= Scalar(1) - hazard(k);
      return s;
    }
    if (kind_ == Kind::Geometric) return pow_int(Scalar(1) - rates_[0], m);
    Scalar s(0);
    for (std::size_t k = 0; k < rates_.size(); ++k)
      s += weights_[k] * pow_int(Scalar(1) - rates_[k], m);
    return s;
  }

  // horizon T with alpha^T and (1-limit-ish survival decay) below tol
  std::int64_t decay_horizon(double tol) const {
    double a = to_double(gh_alpha_);
    double q = 1.0 - to_double(gh_limit_);
    double r = std::max(a, std::min(q, 0.999999));
    if (gh_limit_ == Scalar(0)) r = a;  // survival need not decay; alpha drives convergence
    double n = std::log(tol) / std::log(r);
    return std::min<std::int64_t>(static_cast<std::int64_t>(n) + 1, 4096);
  }

  Kind kind_ = Kind::Geometric;
  MonotonicityClass class_ = MonotonicityClass::CHR;
  std::vector<Scalar> hazards_;         // finite kinds
  std::vector<Scalar> pmf_;             // finite kinds
  std::vector<Scalar> surv_;            // finite kinds + GeomHazard prefix
  std::vector<Scalar> weights_, rates_; // geometric kinds
  Scalar gh_start_ = Scalar(0), gh_limit_ = Scalar(0), gh_alpha_ = Scalar(0);
};

/// classify per the hazard-monotonicity classes; CHR wins ties.
template <typename Scalar>
MonotonicityClass classify(const ServiceDistribution<Scalar>& d) {
  return d.monotonicity();
}

template <typename Scalar>
Scalar hazard_at(const ServiceDistribution<Scalar>& d, std::int64_t n) {
  return d.hazard(n);
}

template <typename Scalar>
Scalar survival(const ServiceDistribution<Scalar>& d, std::int64_t i, std::int64_t n) {
  return d.survival(i, n);
}

template <typename Scalar>
Scalar pmf_cond(const ServiceDistribution<Scalar>& d, std::int64_t i, std::int64_t n) {
  return d.pmf_cond(i, n);
}

template <typename Scalar>
Scalar hazard_limit(const ServiceDistribution<Scalar>& d) {
  return d.hazard_limit();
}

}  // namespace msched

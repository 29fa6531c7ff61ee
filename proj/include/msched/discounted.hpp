#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msched/extint.hpp"
#include "msched/job.hpp"

namespace msched::discounted {

enum class Case { DhrDhr, IhrIhr, DhrIhr, IhrDhr };
enum class Subcase { None, A, B, C, D, EFinite, EInfinite };

inline const char* to_string(Case c) {
  switch (c) {
    case Case::DhrDhr: return "DHR-DHR";
    case Case::IhrIhr: return "IHR-IHR";
    case Case::DhrIhr: return "DHR-IHR";
    default: return "IHR-DHR";
  }
}

struct CaseTag {
  Case case_ = Case::DhrDhr;
  Subcase subcase = Subcase::None;
  std::optional<ExtInt> n2_star;  // subcases B and D
  std::optional<ExtInt> n1_star;  // subcases C and E (may be -1 in C, inf in E)
  std::optional<ExtInt> n2_circ;  // phi(inf), subcases D and E

  std::string str() const {
    std::string s = to_string(case_);
    switch (subcase) {
      case Subcase::A: s += "-A"; break;
      case Subcase::B: s += "-B"; break;
      case Subcase::C: s += "-C"; break;
      case Subcase::D: s += "-D"; break;
      case Subcase::EFinite:
      case Subcase::EInfinite: s += "-E"; break;
      default: break;
    }
    if (n2_star) s += " n2*=" + n2_star->str();
    if (n1_star) s += " n1*=" + n1_star->str();
    if (n2_circ) s += " n2o=" + n2_circ->str();
    return s;
  }
};

/// Closed-form Whittle index machinery for a sequential two-stage job with
/// monotone hazard rates under discounting.  All state values derive from
/// the pair of per-stage functions
///
///   w2(n2)       index of the second-stage states,
///   psi(n1,n2)   value of serving stage 1 at n1 when the follow-on stage-2
///                states up to n2 are also in the activity set,
///
/// with w1(n1) = psi(n1, phi(n1)) and phi the smallest n2 whose successor
/// falls out of the activity set.  A CHR stage is routed as DHR; the four
/// resulting cases differ only in which algebraic form each function takes.
///
/// Immutable after construction; queries are const and thread-safe.
template <typename Scalar>
class Engine {
 public:
  Engine(TwoStageJob<Scalar> job, Scalar beta) : job_(std::move(job)), beta_(beta) {
    if (!(beta_ > Scalar(0) && beta_ < Scalar(1)))
      throw Error("beta must lie in (0,1)");
    if (!is_monotone(job_.class1()) || !is_monotone(job_.class2()))
      throw UnsupportedClass("closed forms need monotone hazards; use the MDP oracle");
    dhr1_ = job_.class1() != MonotonicityClass::IHR;
    dhr2_ = job_.class2() != MonotonicityClass::IHR;
    case_ = dhr1_ ? (dhr2_ ? Case::DhrDhr : Case::DhrIhr)
                  : (dhr2_ ? Case::IhrDhr : Case::IhrIhr);

    const auto& s2 = job_.stage2;
    h2_ = s2.convergence_horizon(to_double(beta_));
    b2_.reserve(h2_ + 1);
    c2_.reserve(h2_ + 1);
    Scalar b(1), sv(1), acc_b(0), acc_c(0);
    for (std::int64_t i = 0; i <= h2_; ++i) {
      bool past = s2.finite_support() && i >= s2.support();
      Scalar surv = past ? Scalar(0) : sv;
      acc_b += b * surv;
      acc_c += past ? Scalar(0) : b * surv * s2.hazard(i);
      b2_.push_back(acc_b);
      c2_.push_back(acc_c);
      if (!past) sv *= Scalar(1) - s2.hazard(i);
      b *= beta_;
    }
    b2_inf_ = s2.disc_survival_inf(beta_, 0);
    c2_inf_ = s2.disc_pmf_inf(beta_, 0);
    mu1_inf_ = job_.stage1.hazard_limit();
    mu2_inf_ = s2.hazard_limit();
    slack_ = scalar_traits<Scalar>::slack();
  }

  Case whittle_case() const { return case_; }
  const TwoStageJob<Scalar>& job() const { return job_; }
  Scalar beta() const { return beta_; }

  /// Index of state (2, n2); n2 = inf gives the limit.
  Scalar w2(ExtInt n2) const {
    if (n2.is_finite() && n2.value() < 0) throw QueryBeyondSupport("negative n2");
    if (dhr2_) {
      Scalar mu = n2.is_infinite() ? mu2_inf_ : job_.stage2.hazard(n2.value());
      return job_.h * mu * beta_ / (Scalar(1) - beta_);
    }
    if (n2.is_infinite())
      return job_.h * mu2_inf_ * beta_ / (Scalar(1) - beta_);
    Scalar d = job_.stage2.disc_survival_inf(beta_, n2.value());
    return job_.h * (Scalar(1) / (Scalar(1) - beta_) - d) / d;
  }

  /// psi(n1, n2); either argument may be inf (evaluated through the hazard
  /// limits).  Defined in the *-DHR cases only.
  Scalar psi(ExtInt n1, ExtInt n2) const {
    if (!dhr2_) throw NotApplicable("psi is defined only when stage 2 is DHR");
    Scalar c = c2(n2), b = b2(n2);
    if (dhr1_ || n1.is_infinite()) {
      Scalar mu = n1.is_infinite() ? mu1_inf_ : job_.stage1.hazard(n1.value());
      Scalar den = Scalar(1) + beta_ * mu * b;
      return job_.h * mu * (beta_ * c / den) * beta_ / (Scalar(1) - beta_);
    }
    // IHR first stage, finite n1
    Scalar d1 = job_.stage1.disc_survival_inf(beta_, n1.value());
    Scalar p1 = (Scalar(1) - (Scalar(1) - beta_) * d1) / beta_;
    Scalar one_over = Scalar(1) / (Scalar(1) - beta_);
    Scalar num = one_over - d1 - beta_ * one_over * (Scalar(1) - beta_ * c) * p1;
    Scalar den = d1 + beta_ * b * p1;
    return job_.h * num / den;
  }

  /// phi(n1) = min{ n2 : psi(n1,n2) > w2(n2+1) }, or inf; n1 may be inf.
  ExtInt phi(ExtInt n1) const {
    if (!dhr2_) throw NotApplicable("phi is defined only when stage 2 is DHR");
    for (std::int64_t n2 = 0; n2 <= h2_; ++n2) {
      if (psi(n1, n2) > w2_tail(n2 + 1) + slack_) return n2;
    }
    // past the scan horizon both sides sit at their limits; the limit
    // comparison decides
    if (psi(n1, ExtInt::infinity()) > w2(ExtInt::infinity()) + slack_) {
      if constexpr (scalar_traits<Scalar>::is_exact) {
        for (std::int64_t n2 = h2_ + 1; n2 <= (1 << 14); ++n2)
          if (psi(n1, n2) > w2_tail(n2 + 1)) return n2;
        throw NonConvergence("phi crossing not located in exact mode");
      }
      // at double precision both sequences have converged here, so the
      // first index past the horizon is the crossing
      return h2_ + 1;
    }
    return ExtInt::infinity();
  }

  /// Index of state (1, n1); n1 = inf gives the limit.
  Scalar w1(ExtInt n1) const {
    switch (case_) {
      case Case::DhrDhr:
      case Case::IhrDhr:
        return psi(n1, phi(n1));
      case Case::DhrIhr: {
        Scalar mu = n1.is_infinite() ? mu1_inf_ : job_.stage1.hazard(n1.value());
        Scalar den = Scalar(1) + beta_ * mu * b2_inf_;
        return job_.h * mu * (beta_ * c2_inf_ / den) * beta_ / (Scalar(1) - beta_);
      }
      case Case::IhrIhr:
      default: {
        if (n1.is_infinite()) {
          Scalar den = Scalar(1) + beta_ * mu1_inf_ * b2_inf_;
          return job_.h * mu1_inf_ * (beta_ * c2_inf_ / den) * beta_ / (Scalar(1) - beta_);
        }
        Scalar d1 = job_.stage1.disc_survival_inf(beta_, n1.value());
        Scalar p1 = (Scalar(1) - (Scalar(1) - beta_) * d1) / beta_;
        Scalar z = d1 + beta_ * b2_inf_ * p1;
        return job_.h * (Scalar(1) / (Scalar(1) - beta_) - z) / z;
      }
    }
  }

  Scalar whittle(const JobState& state) const {
    if (state.is_completed()) throw NotApplicable("completed jobs have no index");
    if (state.stage == 1) return w1(ExtInt(state.n));
    if (state.stage == 2) return w2(ExtInt(state.n));
    throw NotApplicable("two-stage job state expected");
  }

  CaseTag classify() const {
    CaseTag tag;
    tag.case_ = case_;
    switch (case_) {
      case Case::IhrIhr:
      case Case::DhrIhr:
        return tag;
      case Case::DhrDhr: {
        Scalar w1l = w1(ExtInt::infinity());
        Scalar w2l = w2(ExtInt::infinity());
        if (abs(w1l - w2l) <= slack_) {
          tag.subcase = Subcase::A;
        } else if (w1l > w2l) {
          tag.subcase = Subcase::B;
          for (std::int64_t n2 = 0; n2 <= h2_; ++n2) {
            if (w2_tail(n2 + 1) < w1l - slack_) {
              tag.n2_star = ExtInt(n2);
              break;
            }
          }
          if (!tag.n2_star) throw NonConvergence("subcase-B witness not found in horizon");
        } else {
          tag.subcase = Subcase::C;
          std::int64_t cap = scan1_cap();
          for (std::int64_t m = -1; m <= cap; ++m) {
            if (w1(ExtInt(m + 1)) <= w2l + slack_) {
              tag.n1_star = ExtInt(m);
              break;
            }
          }
          if (!tag.n1_star) throw NonConvergence("subcase-C witness not found in horizon");
        }
        return tag;
      }
      case Case::IhrDhr:
      default: {
        ExtInt phi0 = phi(ExtInt(0));
        tag.n2_circ = phi(ExtInt::infinity());
        if (phi0.is_finite()) {
          tag.subcase = Subcase::D;
          tag.n2_star = phi0;
          return tag;
        }
        Scalar w2l = w2(ExtInt::infinity());
        std::int64_t cap = scan1_cap();
        for (std::int64_t m = 0; m <= cap; ++m) {
          if (w1(ExtInt(m)) > w2l + slack_) {
            if (m == 0) throw NonConvergence("inconsistent subcase-E boundary");
            tag.subcase = Subcase::EFinite;
            tag.n1_star = ExtInt(m);
            return tag;
          }
        }
        if (w1(ExtInt::infinity()) > w2l + slack_)
          throw NonConvergence("subcase-E witness lies past the scan horizon");
        tag.subcase = Subcase::EInfinite;
        tag.n1_star = ExtInt::infinity();
        return tag;
      }
    }
  }

 private:
  // partial sums over the second stage; infinite arguments use the closed
  // forms, arguments past the scan horizon the converged values
  Scalar b2(ExtInt m) const {
    if (m.is_infinite()) return b2_inf_;
    if (m.value() <= h2_) return b2_[static_cast<std::size_t>(m.value())];
    if constexpr (scalar_traits<Scalar>::is_exact) return exact_partial(m.value()).first;
    return b2_.back();
  }
  Scalar c2(ExtInt m) const {
    if (m.is_infinite()) return c2_inf_;
    if (m.value() <= h2_) return c2_[static_cast<std::size_t>(m.value())];
    if constexpr (scalar_traits<Scalar>::is_exact) return exact_partial(m.value()).second;
    return c2_.back();
  }
  std::pair<Scalar, Scalar> exact_partial(std::int64_t m) const {
    const auto& s2 = job_.stage2;
    Scalar b(1), sv(1), acc_b(0), acc_c(0);
    for (std::int64_t i = 0; i <= m; ++i) {
      if (s2.finite_support() && i >= s2.support()) break;
      acc_b += b * sv;
      acc_c += b * sv * s2.hazard(i);
      sv *= Scalar(1) - s2.hazard(i);
      b *= beta_;
    }
    return {acc_b, acc_c};
  }

  // w2 for threshold comparisons; states past a finite support are
  // unreachable and take the limiting-hazard value
  Scalar w2_tail(std::int64_t n2) const {
    if (job_.stage2.finite_support() && n2 >= job_.stage2.support())
      return w2(ExtInt::infinity());
    return w2(ExtInt(n2));
  }

  std::int64_t scan1_cap() const {
    const auto& s1 = job_.stage1;
    if (s1.finite_support()) return s1.support() - 1;
    return s1.convergence_horizon(to_double(beta_)) + 64;
  }

  TwoStageJob<Scalar> job_;
  Scalar beta_;
  bool dhr1_ = true, dhr2_ = true;
  Case case_ = Case::DhrDhr;
  std::int64_t h2_ = 0;
  std::vector<Scalar> b2_, c2_;  // sum_{i<=m} beta^i \bar p2(i), beta^i p2(i)
  Scalar b2_inf_ = Scalar(0), c2_inf_ = Scalar(0);
  Scalar mu1_inf_ = Scalar(0), mu2_inf_ = Scalar(0);
  Scalar slack_ = Scalar(0);
};

template <typename Scalar>
Scalar w2(const TwoStageJob<Scalar>& job, ExtInt n2, const Scalar& beta) {
  return Engine<Scalar>(job, beta).w2(n2);
}

template <typename Scalar>
Scalar psi(const TwoStageJob<Scalar>& job, ExtInt n1, ExtInt n2, const Scalar& beta) {
  return Engine<Scalar>(job, beta).psi(n1, n2);
}

template <typename Scalar>
ExtInt phi(const TwoStageJob<Scalar>& job, std::int64_t n1, const Scalar& beta) {
  return Engine<Scalar>(job, beta).phi(ExtInt(n1));
}

template <typename Scalar>
Scalar whittle_index(const TwoStageJob<Scalar>& job, const JobState& state, const Scalar& beta) {
  return Engine<Scalar>(job, beta).whittle(state);
}

template <typename Scalar>
CaseTag classify_subcase(const TwoStageJob<Scalar>& job, const Scalar& beta) {
  return Engine<Scalar>(job, beta).classify();
}

}  // namespace msched::discounted

#pragma once

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "msched/job.hpp"
#include "msched/rational.hpp"

namespace msched::sjp {

/// Upper envelope of affine functions r -> a r + b with slopes a >= 0
/// (slopes are completion probabilities).  Pieces are kept sorted by slope
/// with strictly increasing crossing points, so the function is convex and
/// nondecreasing.  Exact in rational mode, which is the intended one:
/// envelope reduction compares crossing points and float ties are fragile.
template <typename Scalar>
class PiecewiseMaxAffine {
 public:
  struct Piece {
    Scalar slope;
    Scalar intercept;
    friend bool operator==(const Piece&, const Piece&) = default;
  };

  PiecewiseMaxAffine() = default;
  explicit PiecewiseMaxAffine(std::vector<Piece> raw) { assign(std::move(raw)); }

  static PiecewiseMaxAffine identity() {
    return PiecewiseMaxAffine({Piece{Scalar(1), Scalar(0)}});
  }

  const std::vector<Piece>& pieces() const { return pieces_; }
  bool empty() const { return pieces_.empty(); }

  Scalar value(const Scalar& r) const {
    if (pieces_.empty()) throw Error("empty envelope");
    Scalar best = pieces_.front().slope * r + pieces_.front().intercept;
    for (std::size_t i = 1; i < pieces_.size(); ++i)
      best = std::max(best, pieces_[i].slope * r + pieces_[i].intercept);
    return best;
  }

  /// max(this, other) as an envelope.
  PiecewiseMaxAffine merged_with(const PiecewiseMaxAffine& other) const {
    std::vector<Piece> raw = pieces_;
    raw.insert(raw.end(), other.pieces_.begin(), other.pieces_.end());
    return PiecewiseMaxAffine(std::move(raw));
  }

 private:
  void assign(std::vector<Piece> raw) {
    if (raw.empty()) {
      pieces_.clear();
      return;
    }
    for (const Piece& p : raw)
      if (p.slope < Scalar(0)) throw Error("negative slope in profit envelope");
    std::sort(raw.begin(), raw.end(), [](const Piece& x, const Piece& y) {
      return x.slope < y.slope || (x.slope == y.slope && x.intercept < y.intercept);
    });
    // for equal slopes only the largest intercept can survive
    std::vector<Piece> lines;
    for (Piece& p : raw) {
      if (!lines.empty() && lines.back().slope == p.slope) lines.back() = p;
      else lines.push_back(p);
    }
    // hull sweep: drop the middle line whenever it is nowhere strictly above
    std::vector<Piece> hull;
    for (const Piece& line : lines) {
      while (hull.size() >= 2) {
        const Piece& p = hull.back();
        const Piece& q = hull[hull.size() - 2];
        // p is redundant iff cross(q,p) >= cross(p,line)
        if ((q.intercept - p.intercept) * (line.slope - p.slope) >=
            (p.intercept - line.intercept) * (p.slope - q.slope)) {
          hull.pop_back();
        } else {
          break;
        }
      }
      if (hull.size() == 1) {
        // with a single kept line, keep it only if it wins left of the cross
        const Piece& p = hull.back();
        if (p.slope == line.slope) {
          hull.pop_back();  // same slope, smaller intercept
        }
      }
      hull.push_back(line);
    }
    pieces_ = std::move(hull);
  }

  std::vector<Piece> pieces_;
};

/// Profit envelope of serving one stage from attained service a for a
/// completion reward r at cost 1 per slot: one affine piece per quitting
/// horizon Delta in {1..remaining support},
///
///   piece(Delta):  r P{S-a <= Delta | S > a}  -  E[min{S-a, Delta} | S > a].
template <typename Scalar>
PiecewiseMaxAffine<Scalar> sjp_single_stage(const ServiceDistribution<Scalar>& dist,
                                            std::int64_t a) {
  if (!dist.finite_support())
    throw NotApplicable("profit envelopes need a finite support");
  std::int64_t remaining = dist.support() - a;
  if (remaining <= 0) throw QueryBeyondSupport("no service left at this attained service");
  std::vector<typename PiecewiseMaxAffine<Scalar>::Piece> raw;
  Scalar emin(0);
  for (std::int64_t d = 1; d <= remaining; ++d) {
    emin += dist.survival(d - 1, a);
    raw.push_back({Scalar(1) - dist.survival(d, a), -emin});
  }
  return PiecewiseMaxAffine<Scalar>(std::move(raw));
}

/// Functional composition outer(inner(r)); exact because the outer slopes
/// are nonnegative, so substituting every inner piece into every outer piece
/// and reducing reproduces the envelope.
template <typename Scalar>
PiecewiseMaxAffine<Scalar> compose(const PiecewiseMaxAffine<Scalar>& outer,
                                   const PiecewiseMaxAffine<Scalar>& inner) {
  std::vector<typename PiecewiseMaxAffine<Scalar>::Piece> raw;
  raw.reserve(outer.pieces().size() * inner.pieces().size());
  for (const auto& po : outer.pieces())
    for (const auto& pi : inner.pieces())
      raw.push_back({po.slope * pi.slope, po.slope * pi.intercept + po.intercept});
  return PiecewiseMaxAffine<Scalar>(std::move(raw));
}

/// Profit envelope of a multistage job in state (stage j, attained a):
/// the last stage's fresh envelope is threaded backwards through the
/// earlier stages as their reward.
template <typename Scalar>
PiecewiseMaxAffine<Scalar> sjp_multistage(const MultistageJob<Scalar>& job, int stage,
                                          std::int64_t a) {
  if (stage < 1 || stage > job.num_stages()) throw NotApplicable("stage out of range");
  PiecewiseMaxAffine<Scalar> v = sjp_single_stage(job.stage(stage), a);
  for (int j = stage + 1; j <= job.num_stages(); ++j)
    v = compose(v, sjp_single_stage(job.stage(j), 0));
  return v;
}

/// G = 1 / inf{ r >= 0 : V(r) > 0 }.  On a reduced envelope the infimum is
/// min over pieces of -intercept/slope.
template <typename Scalar>
Scalar gittins_from_sjp(const PiecewiseMaxAffine<Scalar>& v) {
  bool has_positive_slope = false;
  Scalar root(0);
  for (const auto& p : v.pieces()) {
    if (p.slope == Scalar(0)) {
      if (p.intercept > Scalar(0)) throw Error("profit positive at r = 0");
      continue;
    }
    Scalar r = -p.intercept / p.slope;
    if (!has_positive_slope || r < root) root = r;
    has_positive_slope = true;
  }
  if (!has_positive_slope) throw NeverPositive("profit never becomes positive");
  if (root <= Scalar(0)) throw Error("profit positive at r = 0");
  return Scalar(1) / root;
}

/// "max{ r/2 - 1, r - 5/2 }" style rendering with rational coefficients.
inline std::string term_string(const Rational& slope, const Rational& intercept) {
  std::ostringstream os;
  if (slope == 0) {
    os << rational_to_string(intercept);
    return os.str();
  }
  auto num = numerator(slope);
  auto den = denominator(slope);
  if (num == 1 && den == 1) os << "r";
  else if (den == 1) os << num << "r";
  else if (num == 1) os << "r/" << den;
  else os << num << "r/" << den;
  if (intercept > 0) os << " + " << rational_to_string(intercept);
  if (intercept < 0) os << " - " << rational_to_string(Rational(-intercept));
  return os.str();
}

inline std::string to_string(const PiecewiseMaxAffine<Rational>& v) {
  if (v.pieces().size() == 1)
    return term_string(v.pieces()[0].slope, v.pieces()[0].intercept);
  std::string out = "max{ ";
  for (std::size_t i = 0; i < v.pieces().size(); ++i) {
    if (i) out += ", ";
    out += term_string(v.pieces()[i].slope, v.pieces()[i].intercept);
  }
  out += " }";
  return out;
}

}  // namespace msched::sjp

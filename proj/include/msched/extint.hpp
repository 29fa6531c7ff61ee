#pragma once

#include <cstdint>
#include <ostream>
#include <string>

namespace msched {

/// Integer extended with +infinity; used for attained-service thresholds
/// such as phi(n1), n1*, n2* which live in {-1, 0, 1, ...} ∪ {∞}.
class ExtInt {
 public:
  constexpr ExtInt() : value_(0), inf_(false) {}
  constexpr ExtInt(std::int64_t v) : value_(v), inf_(false) {}  // NOLINT(implicit)
  static constexpr ExtInt infinity() { return ExtInt(0, true); }

  constexpr bool is_infinite() const { return inf_; }
  constexpr bool is_finite() const { return !inf_; }
  constexpr std::int64_t value() const { return value_; }

  friend constexpr bool operator==(const ExtInt& a, const ExtInt& b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.value_ == b.value_);
  }
  friend constexpr bool operator!=(const ExtInt& a, const ExtInt& b) { return !(a == b); }
  friend constexpr bool operator<(const ExtInt& a, const ExtInt& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator<=(const ExtInt& a, const ExtInt& b) { return a < b || a == b; }
  friend constexpr bool operator>(const ExtInt& a, const ExtInt& b) { return b < a; }
  friend constexpr bool operator>=(const ExtInt& a, const ExtInt& b) { return b <= a; }

  std::string str() const { return inf_ ? "inf" : std::to_string(value_); }
  friend std::ostream& operator<<(std::ostream& os, const ExtInt& x) { return os << x.str(); }

 private:
  constexpr ExtInt(std::int64_t v, bool inf) : value_(v), inf_(inf) {}
  std::int64_t value_;
  bool inf_;
};

}  // namespace msched

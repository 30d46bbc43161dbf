#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

namespace mechcheck::kernel {

/// Integer arithmetic used by both the concrete and the abstract semantics.
/// Results saturate to the finite range; the two extreme int64 values are
/// reserved for the infinite interval bounds.
struct Saturating {
  static constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min() + 1;
  static constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max() - 1;

  static constexpr std::int64_t clamp(__int128 v) {
    if (v < kMin) return kMin;
    if (v > kMax) return kMax;
    return static_cast<std::int64_t>(v);
  }
  static constexpr std::int64_t add(std::int64_t a, std::int64_t b) { return clamp(__int128{a} + b); }
  static constexpr std::int64_t sub(std::int64_t a, std::int64_t b) { return clamp(__int128{a} - b); }
};

/// Element of the interval lattice: bottom, or [lo, hi] where lo may be
/// -inf and hi may be +inf.
class Interval {
 public:
  static constexpr std::int64_t kNegInf = std::numeric_limits<std::int64_t>::min();
  static constexpr std::int64_t kPosInf = std::numeric_limits<std::int64_t>::max();

  constexpr Interval() = default;

  static constexpr Interval bottom() { return Interval(); }
  static constexpr Interval top() { return Interval(kNegInf, kPosInf); }
  static constexpr Interval point(std::int64_t v) { return Interval(v, v); }
  /// Empty when lo > hi.
  static constexpr Interval of(std::int64_t lo, std::int64_t hi) { return lo > hi ? bottom() : Interval(lo, hi); }

  constexpr bool is_bottom() const { return bottom_; }
  constexpr std::int64_t lo() const { return lo_; }
  constexpr std::int64_t hi() const { return hi_; }
  constexpr bool lo_infinite() const { return !bottom_ && lo_ == kNegInf; }
  constexpr bool hi_infinite() const { return !bottom_ && hi_ == kPosInf; }
  constexpr bool finite() const { return !bottom_ && lo_ != kNegInf && hi_ != kPosInf; }
  constexpr bool singleton() const { return !bottom_ && lo_ == hi_; }

  constexpr bool contains(std::int64_t v) const { return !bottom_ && lo_ <= v && v <= hi_; }

  constexpr bool leq(const Interval& o) const {
    if (bottom_) return true;
    if (o.bottom_) return false;
    return o.lo_ <= lo_ && hi_ <= o.hi_;
  }

  constexpr Interval join(const Interval& o) const {
    if (bottom_) return o;
    if (o.bottom_) return *this;
    return Interval(std::min(lo_, o.lo_), std::max(hi_, o.hi_));
  }

  constexpr Interval meet(const Interval& o) const {
    if (bottom_ || o.bottom_) return bottom();
    return of(std::max(lo_, o.lo_), std::min(hi_, o.hi_));
  }

  /// Unstable bounds jump to infinity.
  constexpr Interval widen(const Interval& next) const {
    if (bottom_) return next;
    if (next.bottom_) return *this;
    return Interval(next.lo_ < lo_ ? kNegInf : lo_, next.hi_ > hi_ ? kPosInf : hi_);
  }

  /// Only infinite bounds are refined.
  constexpr Interval narrow(const Interval& next) const {
    if (bottom_ || next.bottom_) return bottom();
    return of(lo_ == kNegInf ? next.lo_ : lo_, hi_ == kPosInf ? next.hi_ : hi_);
  }

  std::string to_string() const {
    if (bottom_) return "bot";
    auto b = [](std::int64_t v) {
      if (v == kNegInf) return std::string("-inf");
      if (v == kPosInf) return std::string("+inf");
      return std::to_string(v);
    };
    return "[" + b(lo_) + ", " + b(hi_) + "]";
  }

  constexpr bool operator==(const Interval& o) const {
    if (bottom_ || o.bottom_) return bottom_ == o.bottom_;
    return lo_ == o.lo_ && hi_ == o.hi_;
  }

 private:
  constexpr Interval(std::int64_t lo, std::int64_t hi) : lo_(lo), hi_(hi), bottom_(false) {}

  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  bool bottom_ = true;
};

/// Interval transfer functions for + and -. Analyses take the arithmetic
/// as a template parameter so tests can substitute a faulty one.
struct IntervalArith {
  static constexpr Interval add(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
    std::int64_t lo = a.lo_infinite() || b.lo_infinite() ? Interval::kNegInf : Saturating::add(a.lo(), b.lo());
    std::int64_t hi = a.hi_infinite() || b.hi_infinite() ? Interval::kPosInf : Saturating::add(a.hi(), b.hi());
    return Interval::of(lo, hi);
  }

  static constexpr Interval sub(const Interval& a, const Interval& b) {
    if (a.is_bottom() || b.is_bottom()) return Interval::bottom();
    std::int64_t lo = a.lo_infinite() || b.hi_infinite() ? Interval::kNegInf : Saturating::sub(a.lo(), b.hi());
    std::int64_t hi = a.hi_infinite() || b.lo_infinite() ? Interval::kPosInf : Saturating::sub(a.hi(), b.lo());
    return Interval::of(lo, hi);
  }
};

}  // namespace mechcheck::kernel

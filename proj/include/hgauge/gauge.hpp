#ifndef HGAUGE_GAUGE_HPP
#define HGAUGE_GAUGE_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hgauge/rational.hpp"

namespace hgauge {

// The scale t = 2^-exponent. Gauges are only ever evaluated at these scales.
class DyadicScale {
 public:
  explicit DyadicScale(int exponent);
  int exponent() const { return exponent_; }

 private:
  int exponent_;
};

// Guard subtracted before flooring an inexact log2 in bound_table.
inline constexpr double kLogGuard = 1.0 / (1 << 20);

// A gauge function sampled at dyadic scales. Immutable; cheap to copy.
//
//   Power(s)       t^s
//   PowerLog(s,c)  t^s * max(1, log2(1/t))^c   (c <= s when c > 0)
//   Table          explicit values at listed exponents; log-linear between
//                  listed exponents, out-of-range outside them
//   Conjugate(g,n) g(t^(1/n)), interpolated log-linearly between the two
//                  neighbouring scales of g when n does not divide the exponent
class Gauge {
 public:
  struct Power {
    Rational s;
  };
  struct PowerLog {
    Rational s;
    Rational c;
  };
  struct Table {
    std::vector<std::pair<int, double>> entries;
  };
  struct Conjugate {
    std::shared_ptr<const Gauge> base;
    int n;
  };
  using Kind = std::variant<Power, PowerLog, Table, Conjugate>;

  static Gauge power(Rational s);
  static Gauge power_log(Rational s, Rational c);
  static Gauge table(std::vector<std::pair<int, double>> entries);
  static Gauge conjugate(const Gauge& base, int n);

  const Kind& kind() const { return kind_; }
  const std::string& description() const { return description_; }

  bool in_range(int exponent) const;
  // log2 g(2^-n). Throws OutOfRange for table gauges outside their range.
  double log2_value(int exponent) const;
  // log2 g(2^-n) when it is rational and representable; nullopt otherwise.
  std::optional<Rational> exact_log2(int exponent) const;

 private:
  Gauge(Kind kind, std::string description) : kind_(std::move(kind)), description_(std::move(description)) {}

  Kind kind_;
  std::string description_;
};

// g(2^-n). Exact when the value is a power of two; otherwise within a few
// ulps. Values below the smallest positive double underflow to 0, so callers
// working past exponent ~1000 should use Gauge::log2_value instead.
double eval(const Gauge& g, DyadicScale scale);

enum class OrderRelation { first_lower_order, second_lower_order, inconclusive };

struct OrderVerdict {
  OrderRelation relation = OrderRelation::inconclusive;
  // (n, g(2^-n) / f(2^-n)) for n = 1..max_exponent.
  std::vector<std::pair<int, double>> ratio_trace;
};

// Numerical order test over n = 1..max_exponent. first_lower_order means
// f < g (g/f -> 0): the ratio g/f is non-increasing over the second half of
// the trace, strictly drops across it, and ends below decay_threshold.
// second_lower_order is the same test on f/g.
OrderVerdict compare_order(const Gauge& f, const Gauge& g, int max_exponent, double decay_threshold);

const char* to_string(OrderRelation relation);

// Largest integer c with c <= log2(g(2^-n) * 2^n), clamped at 0.
int sparsity_bound(const Gauge& g, int exponent);
// sparsity_bound for n = 0..depth-1.
std::vector<int> bound_table(const Gauge& g, int depth);

// The set A of forced levels, truncated to [0, depth).
class BranchSchedule {
 public:
  BranchSchedule() = default;
  // Throws InvalidArgument unless indices are strictly increasing in [0, depth).
  BranchSchedule(int depth, std::vector<int> indices, int n0 = 0, std::optional<Gauge> gauge = std::nullopt);

  static BranchSchedule empty(int depth) { return BranchSchedule(depth, {}); }
  static BranchSchedule all_levels(int depth);
  static BranchSchedule odd_levels(int depth);

  int depth() const { return depth_; }
  const std::vector<int>& indices() const { return indices_; }
  int n0() const { return n0_; }
  const std::optional<Gauge>& gauge() const { return gauge_; }
  bool vacuous() const { return indices_.empty(); }

  bool contains(int level) const;
  // |A ∩ [0, n)|; levels past depth count as unforced.
  int count_below(int n) const;

 private:
  int depth_ = 0;
  std::vector<int> indices_;
  int n0_ = 0;
  std::optional<Gauge> gauge_;
};

// Greedy maximal schedule: level n joins A whenever |A ∩ m| <= c(m) still
// holds for every m in (n, depth]. The result satisfies the bound at every
// level from n0 on; an empty result (c ≡ 0) is legal and vacuous.
BranchSchedule sparsity_schedule(const Gauge& g, int depth);

}  // namespace hgauge

#endif  // HGAUGE_GAUGE_HPP

#include "hgauge/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hgauge/error.hpp"

namespace hgauge {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int ilog2(int n) {
  int k = 0;
  while ((1 << (k + 1)) <= n) ++k;
  return k;
}

// 2^r for an exact rational exponent, split into integer and fractional parts
// so only the fractional part goes through exp2.
double exp2_rational(const Rational& r) {
  std::int64_t k = r.floor();
  Rational frac = r - Rational(k);
  double mantissa = frac.num() == 0 ? 1.0 : std::exp2(frac.to_double());
  if (k < std::numeric_limits<int>::min() / 2) return 0.0;
  return std::ldexp(mantissa, static_cast<int>(k));
}

std::optional<Rational> table_exact_entry(double value) {
  int e = 0;
  double m = std::frexp(value, &e);
  if (m == 0.5) return Rational(e - 1);
  return std::nullopt;
}

// Position of exponent n inside a table: either an exact entry or the pair
// of neighbours bracketing it.
struct TableSlot {
  std::size_t lo;
  std::size_t hi;
};

TableSlot locate(const Gauge::Table& table, int n) {
  const auto& e = table.entries;
  if (n < e.front().first || n > e.back().first) {
    throw OutOfRange("table gauge covers exponents [" + std::to_string(e.front().first) + ", " +
                     std::to_string(e.back().first) + "], queried at " + std::to_string(n));
  }
  auto it = std::lower_bound(e.begin(), e.end(), n, [](const auto& entry, int x) { return entry.first < x; });
  auto hi = static_cast<std::size_t>(it - e.begin());
  if (it->first == n) return {hi, hi};
  return {hi - 1, hi};
}

std::string describe(const Rational& r) { return r.to_string(); }

}  // namespace

DyadicScale::DyadicScale(int exponent) : exponent_(exponent) {
  if (exponent < 0) throw InvalidArgument("dyadic scale exponent must be >= 0");
}

Gauge Gauge::power(Rational s) {
  if (s <= Rational(0)) throw InvalidArgument("power gauge needs s > 0, got " + s.to_string());
  return Gauge(Power{s}, "t^" + describe(s));
}

Gauge Gauge::power_log(Rational s, Rational c) {
  if (s <= Rational(0)) throw InvalidArgument("power_log gauge needs s > 0, got " + s.to_string());
  // n -> 2^-ns n^c is non-increasing on n >= 1 iff it is at n = 1, i.e. c <= s.
  if (c > s) throw InvalidArgument("power_log gauge with c > s is not monotone at small scales");
  return Gauge(PowerLog{s, c}, "t^" + describe(s) + "*log2(1/t)^" + describe(c));
}

Gauge Gauge::table(std::vector<std::pair<int, double>> entries) {
  if (entries.empty()) throw InvalidArgument("table gauge needs at least one entry");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& [n, v] = entries[i];
    if (n < 0) throw InvalidArgument("table gauge exponent must be >= 0");
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("table gauge values must be finite and > 0");
    if (i > 0) {
      if (n <= entries[i - 1].first) throw InvalidArgument("table gauge exponents must be strictly increasing");
      if (v > entries[i - 1].second) throw InvalidArgument("table gauge values must be non-increasing in n");
    }
  }
  std::string desc = "table[" + std::to_string(entries.front().first) + ".." + std::to_string(entries.back().first) + "]";
  return Gauge(Table{std::move(entries)}, std::move(desc));
}

Gauge Gauge::conjugate(const Gauge& base, int n) {
  if (n < 1) throw InvalidArgument("conjugation exponent must be >= 1");
  if (n == 1) return base;
  if (const auto* p = std::get_if<Power>(&base.kind_)) return power(p->s / Rational(n));
  return Gauge(Conjugate{std::make_shared<const Gauge>(base), n}, base.description_ + "(t^(1/" + std::to_string(n) + "))");
}

bool Gauge::in_range(int n) const {
  if (n < 0) return false;
  return std::visit(Overloaded{
                        [&](const Table& t) { return n >= t.entries.front().first && n <= t.entries.back().first; },
                        [&](const Conjugate& c) {
                          int q = n / c.n;
                          return c.base->in_range(q) && (n % c.n == 0 || c.base->in_range(q + 1));
                        },
                        [](const auto&) { return true; },
                    },
                    kind_);
}

double Gauge::log2_value(int n) const {
  if (n < 0) throw OutOfRange("negative scale exponent");
  return std::visit(Overloaded{
                        [&](const Power& p) { return (Rational(-n) * p.s).to_double(); },
                        [&](const PowerLog& p) {
                          double log_factor = n <= 1 ? 0.0 : p.c.to_double() * std::log2(static_cast<double>(n));
                          return (Rational(-n) * p.s).to_double() + log_factor;
                        },
                        [&](const Table& t) {
                          auto [lo, hi] = locate(t, n);
                          double a = std::log2(t.entries[lo].second);
                          if (lo == hi) return a;
                          double b = std::log2(t.entries[hi].second);
                          double theta = static_cast<double>(n - t.entries[lo].first) /
                                         static_cast<double>(t.entries[hi].first - t.entries[lo].first);
                          return a + theta * (b - a);
                        },
                        [&](const Conjugate& c) {
                          if (!in_range(n)) throw OutOfRange("conjugate gauge queried outside its base range");
                          int q = n / c.n;
                          int r = n % c.n;
                          double a = c.base->log2_value(q);
                          if (r == 0) return a;
                          double b = c.base->log2_value(q + 1);
                          return a + (b - a) * static_cast<double>(r) / static_cast<double>(c.n);
                        },
                    },
                    kind_);
}

std::optional<Rational> Gauge::exact_log2(int n) const {
  if (n < 0) throw OutOfRange("negative scale exponent");
  try {
    return std::visit(Overloaded{
                          [&](const Power& p) -> std::optional<Rational> { return Rational(-n) * p.s; },
                          [&](const PowerLog& p) -> std::optional<Rational> {
                            Rational base = Rational(-n) * p.s;
                            if (n <= 1 || p.c == Rational(0)) return base;
                            if (is_pow2(n)) return base + p.c * Rational(ilog2(n));
                            return std::nullopt;
                          },
                          [&](const Table& t) -> std::optional<Rational> {
                            auto [lo, hi] = locate(t, n);
                            auto a = table_exact_entry(t.entries[lo].second);
                            if (lo == hi || !a) return a;
                            auto b = table_exact_entry(t.entries[hi].second);
                            if (!b) return std::nullopt;
                            Rational theta(n - t.entries[lo].first, t.entries[hi].first - t.entries[lo].first);
                            return *a + (*b - *a) * theta;
                          },
                          [&](const Conjugate& c) -> std::optional<Rational> {
                            if (!in_range(n)) throw OutOfRange("conjugate gauge queried outside its base range");
                            int q = n / c.n;
                            int r = n % c.n;
                            auto a = c.base->exact_log2(q);
                            if (r == 0 || !a) return a;
                            auto b = c.base->exact_log2(q + 1);
                            if (!b) return std::nullopt;
                            return *a + (*b - *a) * Rational(r, c.n);
                          },
                      },
                      kind_);
  } catch (const InvalidArgument&) {
    // Rational overflow at extreme exponents: fall back to the float path.
    return std::nullopt;
  }
}

double eval(const Gauge& g, DyadicScale scale) {
  int n = scale.exponent();
  if (!g.in_range(n)) {
    (void)g.log2_value(n);  // throws the descriptive OutOfRange
    throw OutOfRange("gauge queried outside its range");
  }
  if (const auto* p = std::get_if<Gauge::Power>(&g.kind())) return exp2_rational(Rational(-n) * p->s);
  if (const auto* p = std::get_if<Gauge::PowerLog>(&g.kind())) {
    double power_part = exp2_rational(Rational(-n) * p->s);
    if (n <= 1 || p->c == Rational(0)) return power_part;
    return power_part * std::pow(static_cast<double>(n), p->c.to_double());
  }
  if (auto exact = g.exact_log2(n); exact && exact->is_integer()) {
    return std::ldexp(1.0, static_cast<int>(exact->num()));
  }
  if (const auto* t = std::get_if<Gauge::Table>(&g.kind())) {
    auto [lo, hi] = locate(*t, n);
    if (lo == hi) return t->entries[lo].second;
  }
  return std::exp2(g.log2_value(n));
}

const char* to_string(OrderRelation relation) {
  switch (relation) {
    case OrderRelation::first_lower_order:
      return "first_lower_order";
    case OrderRelation::second_lower_order:
      return "second_lower_order";
    case OrderRelation::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

OrderVerdict compare_order(const Gauge& f, const Gauge& g, int max_exponent, double decay_threshold) {
  if (max_exponent < 4) throw InsufficientData("compare_order needs max_exponent >= 4");
  std::vector<double> log_ratio;
  log_ratio.reserve(static_cast<std::size_t>(max_exponent));
  OrderVerdict verdict;
  for (int n = 1; n <= max_exponent; ++n) {
    double lr = g.log2_value(n) - f.log2_value(n);
    log_ratio.push_back(lr);
    verdict.ratio_trace.emplace_back(n, std::exp2(lr));
  }

  const double log_threshold = std::log2(decay_threshold);
  auto decays = [&](double sign) {
    std::size_t start = log_ratio.size() / 2;
    for (std::size_t i = start + 1; i < log_ratio.size(); ++i) {
      if (sign * log_ratio[i] > sign * log_ratio[i - 1]) return false;
    }
    return sign * log_ratio.back() < sign * log_ratio[start] && sign * log_ratio.back() < log_threshold;
  };
  if (decays(1.0)) {
    verdict.relation = OrderRelation::first_lower_order;
  } else if (decays(-1.0)) {
    verdict.relation = OrderRelation::second_lower_order;
  }
  return verdict;
}

int sparsity_bound(const Gauge& g, int n) {
  int bound = 0;
  if (auto exact = g.exact_log2(n)) {
    bound = static_cast<int>((*exact + Rational(n)).floor());
  } else {
    bound = static_cast<int>(std::floor(g.log2_value(n) + n - kLogGuard));
  }
  return std::max(0, bound);
}

std::vector<int> bound_table(const Gauge& g, int depth) {
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  std::vector<int> out(static_cast<std::size_t>(depth));
  for (int n = 0; n < depth; ++n) out[static_cast<std::size_t>(n)] = sparsity_bound(g, n);
  return out;
}

BranchSchedule::BranchSchedule(int depth, std::vector<int> indices, int n0, std::optional<Gauge> gauge)
    : depth_(depth), indices_(std::move(indices)), n0_(n0), gauge_(std::move(gauge)) {
  if (depth_ < 0) throw InvalidArgument("schedule depth must be >= 0");
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 0 || indices_[i] >= depth_) throw InvalidArgument("schedule index outside [0, depth)");
    if (i > 0 && indices_[i] <= indices_[i - 1]) throw InvalidArgument("schedule indices must be strictly increasing");
  }
  if (n0_ < 0) throw InvalidArgument("schedule threshold must be >= 0");
}

BranchSchedule BranchSchedule::all_levels(int depth) {
  std::vector<int> idx(static_cast<std::size_t>(std::max(depth, 0)));
  for (int i = 0; i < depth; ++i) idx[static_cast<std::size_t>(i)] = i;
  return BranchSchedule(depth, std::move(idx));
}

BranchSchedule BranchSchedule::odd_levels(int depth) {
  std::vector<int> idx;
  for (int i = 1; i < depth; i += 2) idx.push_back(i);
  return BranchSchedule(depth, std::move(idx));
}

bool BranchSchedule::contains(int level) const { return std::binary_search(indices_.begin(), indices_.end(), level); }

int BranchSchedule::count_below(int n) const {
  return static_cast<int>(std::lower_bound(indices_.begin(), indices_.end(), n) - indices_.begin());
}

BranchSchedule sparsity_schedule(const Gauge& g, int depth) {
  if (depth < 0) throw InvalidArgument("depth must be >= 0");
  std::vector<int> bound(static_cast<std::size_t>(depth) + 1);
  for (int m = 0; m <= depth; ++m) bound[static_cast<std::size_t>(m)] = sparsity_bound(g, m);

  // suffix_min[n] = min c(m) over m in [n, depth].
  std::vector<int> suffix_min(bound.size());
  int running = std::numeric_limits<int>::max();
  for (int m = depth; m >= 0; --m) {
    running = std::min(running, bound[static_cast<std::size_t>(m)]);
    suffix_min[static_cast<std::size_t>(m)] = running;
  }

  std::vector<int> indices;
  for (int n = 0; n < depth; ++n) {
    // Adding n raises |A ∩ m| by one for every m > n.
    if (static_cast<int>(indices.size()) + 1 <= suffix_min[static_cast<std::size_t>(n) + 1]) indices.push_back(n);
  }

  int n0 = 0;
  for (int m = 0; m <= depth; ++m) {
    int count = static_cast<int>(std::lower_bound(indices.begin(), indices.end(), m) - indices.begin());
    if (count > bound[static_cast<std::size_t>(m)]) n0 = m + 1;
  }
  return BranchSchedule(depth, std::move(indices), n0, g);
}

}  // namespace hgauge

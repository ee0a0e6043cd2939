#include "hgauge/transfer.hpp"

#include <cmath>
#include <limits>

#include "hgauge/error.hpp"

namespace hgauge {

DyadicInterval::DyadicInterval(int level, BigInt index) : m(level), p(std::move(index)) {
  if (m < 0) throw InvalidArgument("dyadic interval level must be >= 0");
  if (p < 0 || p >= (BigInt(1) << m)) throw InvalidArgument("dyadic interval index outside [0, 2^m)");
}

CoverTransferRule::CoverTransferRule(std::uint64_t multiplicity, int root) : k(multiplicity), h_root(root) {
  if (k < 1) throw InvalidArgument("cover multiplicity must be >= 1");
  if (h_root < 1) throw InvalidArgument("distortion root must be >= 1");
}

DyadicInterval expand(const Node& t) {
  BigInt p = 0;
  for (std::size_t i = 0; i < t.size(); ++i) p = (p << 1) + t[i];
  return DyadicInterval(static_cast<int>(t.size()), std::move(p));
}

std::vector<Node> interleave(const Node& t, int n) {
  if (n < 1) throw InvalidArgument("interleave needs n >= 1");
  std::vector<Node> out(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < t.size(); ++i) out[i % static_cast<std::size_t>(n)].push_back(t[i]);
  return out;
}

Node deinterleave(const std::vector<Node>& components) {
  if (components.empty()) throw InvalidArgument("deinterleave needs at least one component");
  const std::size_t n = components.size();
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    // Block-aligned lengths are non-increasing and differ by at most one.
    if (i > 0 && (components[i].size() > components[i - 1].size() ||
                  components[0].size() > components[i].size() + 1)) {
      throw InvalidArgument("component lengths do not come from one interleaved node");
    }
    total += components[i].size();
  }
  Node out;
  for (std::size_t pos = 0; pos < total; ++pos) out.push_back(components[pos % n][pos / n]);
  return out;
}

MetricCheck interleave_metric_check(const Node& x, const Node& y, int n) {
  if (n < 1) throw InvalidArgument("interleave needs n >= 1");
  if (x.size() != y.size()) throw InvalidArgument("metric check needs equal lengths");
  if (x.size() % static_cast<std::size_t>(n) != 0) throw InvalidArgument("length must be a multiple of n");
  if (x == y) throw InvalidArgument("distance undefined: x = y");

  MetricCheck out;
  while (x[static_cast<std::size_t>(out.k)] == y[static_cast<std::size_t>(out.k)]) ++out.k;
  out.expected = Dyadic::pow2(-(out.k / n));

  auto xs = interleave(x, n);
  auto ys = interleave(y, n);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < xs[i].size(); ++j) {
      if (xs[i][j] != ys[i][j]) {
        Dyadic d = Dyadic::pow2(-static_cast<std::int64_t>(j));
        if (d > out.observed) out.observed = d;
        break;
      }
    }
  }
  return out;
}

CubePoint to_cube(const Node& t, int n) {
  if (n < 1) throw InvalidArgument("to_cube needs n >= 1");
  Node padded = t;
  while (padded.size() % static_cast<std::size_t>(n) != 0) padded.push_back(0);
  CubePoint out;
  out.precision = static_cast<int>(padded.size()) / n;
  for (const Node& c : interleave(padded, n)) out.coords.push_back(expand(c).left());
  return out;
}

std::vector<DyadicInterval> dyadic_four_cover(const Rational& a, const Rational& b) {
  if (a < Rational(0) || b > Rational(1)) throw InvalidArgument("interval must lie in [0, 1]");
  if (!(a < b)) throw InvalidArgument("degenerate interval: need a < b");
  const Rational diam = b - a;
  if (diam > Rational(1, 2)) return {DyadicInterval(0, 0)};

  // m with 2^-m < diam <= 2^-m+1. Compare diam*2^m against 1 in 128 bits.
  using i128 = __int128;
  auto scaled_cmp = [&](int m) {  // sign of diam * 2^m - 1
    i128 lhs = static_cast<i128>(diam.num()) << m;
    i128 rhs = diam.den();
    return lhs < rhs ? -1 : (lhs == rhs ? 0 : 1);
  };
  int m = 1;
  while (scaled_cmp(m) <= 0) {
    if (m >= 62) throw InvalidArgument("interval too short for the 128-bit search");
    ++m;
  }
  // Least p with a < p/2^m, i.e. p = floor(a*2^m) + 1; it lies below b since
  // b - a > 2^-m.
  i128 p = (static_cast<i128>(a.num()) << m) / a.den() + 1;
  const i128 limit = i128{1} << m;
  std::vector<DyadicInterval> out;
  for (i128 q = p - 2; q < p + 2; ++q) {
    if (q >= 0 && q < limit) out.emplace_back(m, BigInt(static_cast<long long>(q)));
  }
  return out;
}

double pushforward_cover(const std::vector<int>& diameter_exponents, const CoverTransferRule& rule, const Gauge& g) {
  // (g∘h^-1)(h(δ)) = g(δ), so the distortion only relabels scales.
  double total = 0.0;
  for (int e : diameter_exponents) total += eval(g, DyadicScale(e));
  return static_cast<double>(rule.k) * total;
}

std::uint64_t sup_to_euclid_multiplicity(int n) {
  if (n < 1) throw InvalidArgument("dimension must be >= 1");
  std::uint64_t side = 1;
  while (side * side < static_cast<std::uint64_t>(n)) ++side;
  std::uint64_t out = 1;
  for (int i = 0; i < n; ++i) {
    if (out > std::numeric_limits<std::uint64_t>::max() / side) throw ResourceExceeded("multiplicity overflows 64 bits", 0);
    out *= side;
  }
  return out;
}

Gauge gauge_conjugate(const Gauge& g, int n) { return Gauge::conjugate(g, n); }

}  // namespace hgauge

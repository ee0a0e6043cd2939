#ifndef HGAUGE_TRANSFER_HPP
#define HGAUGE_TRANSFER_HPP

#include <cstdint>
#include <vector>

#include "hgauge/dyadic.hpp"
#include "hgauge/gauge.hpp"
#include "hgauge/node.hpp"
#include "hgauge/rational.hpp"

namespace hgauge {

// [p/2^m, (p+1)/2^m].
struct DyadicInterval {
  int m = 0;
  BigInt p;

  DyadicInterval() = default;
  // Throws InvalidArgument unless 0 <= p < 2^m.
  DyadicInterval(int level, BigInt index);

  Dyadic left() const { return Dyadic(p, static_cast<std::uint32_t>(m)); }
  Dyadic right() const { return Dyadic(p + 1, static_cast<std::uint32_t>(m)); }
  Dyadic diameter() const { return Dyadic::pow2(-m); }

  friend bool operator==(const DyadicInterval&, const DyadicInterval&) = default;
};

struct CubePoint {
  std::vector<Dyadic> coords;
  int precision = 0;  // bits per coordinate

  friend bool operator==(const CubePoint&, const CubePoint&) = default;
};

// Each set of d1-diameter δ is covered by at most k sets of d2-diameter h(δ),
// with h(δ) = δ^(1/h_root) (h_root = 1 is the identity).
struct CoverTransferRule {
  std::uint64_t k = 1;
  int h_root = 1;

  CoverTransferRule() = default;
  // Throws InvalidArgument for k < 1 or h_root < 1.
  CoverTransferRule(std::uint64_t multiplicity, int root);
};

// The interval whose binary digits are t.
DyadicInterval expand(const Node& t);

// Component i holds the bits of t at positions ≡ i (mod n). Throws
// InvalidArgument for n < 1.
std::vector<Node> interleave(const Node& t, int n);
// Inverse of interleave on full blocks; components must have lengths that
// some block-aligned t would produce.
Node deinterleave(const std::vector<Node>& components);

struct MetricCheck {
  int k = 0;          // first differing position
  Dyadic expected;    // 2^-floor(k/n)
  Dyadic observed;    // sup over components of 2^-(first difference)
};

// Throws InvalidArgument when x = y, lengths differ, or the length is not a
// multiple of n.
MetricCheck interleave_metric_check(const Node& x, const Node& y, int n);

// Left corner of the subcube at precision ceil(|t|/n). A ragged final block
// is padded with zeros, which leaves every left endpoint unchanged.
CubePoint to_cube(const Node& t, int n);

// At most four level-m dyadic intervals covering [a,b], where
// 2^-m < b - a <= 2^-m+1; the single interval [0,1] when b - a > 1/2.
// Throws InvalidArgument unless 0 <= a < b <= 1.
std::vector<DyadicInterval> dyadic_four_cover(const Rational& a, const Rational& b);

// k * Σ g(diameter) over a cover given by dyadic exponents.
double pushforward_cover(const std::vector<int>& diameter_exponents, const CoverTransferRule& rule, const Gauge& g);

// ceil(sqrt(n))^n: a sup-metric cube splits into this many subcubes of no
// larger Euclidean diameter.
std::uint64_t sup_to_euclid_multiplicity(int n);

// g'(t) = g(t^(1/n)).
Gauge gauge_conjugate(const Gauge& g, int n);

}  // namespace hgauge

#endif  // HGAUGE_TRANSFER_HPP

#include "hgauge/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>

#include "hgauge/error.hpp"

namespace hgauge {
namespace {

using Wide = __int128;

std::int64_t narrow(Wide v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw InvalidArgument("rational overflow");
  }
  return static_cast<std::int64_t>(v);
}

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Rational make(Wide num, Wide den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational(narrow(num), narrow(den));
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidArgument("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidArgument("rational with zero denominator");
  if (den < 0) {
    if (num == std::numeric_limits<std::int64_t>::min() || den == std::numeric_limits<std::int64_t>::min()) {
      throw InvalidArgument("rational overflow");
    }
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw InvalidArgument("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
  }
  auto dot = text.find('.');
  if (dot == std::string_view::npos) return Rational(parse_int(text));

  bool negative = text.front() == '-';
  std::string_view int_part = text.substr(negative ? 1 : 0, dot - (negative ? 1 : 0));
  std::string_view frac_part = text.substr(dot + 1);
  if (frac_part.empty() || frac_part.size() > 18 || (int_part.empty() && frac_part.empty())) {
    throw InvalidArgument("malformed decimal '" + std::string(text) + "'");
  }
  for (char c : frac_part) {
    if (c < '0' || c > '9') throw InvalidArgument("malformed decimal '" + std::string(text) + "'");
  }
  Wide scale = 1;
  for (std::size_t i = 0; i < frac_part.size(); ++i) scale *= 10;
  Wide whole = int_part.empty() ? 0 : parse_int(int_part);
  if (whole < 0) throw InvalidArgument("malformed decimal '" + std::string(text) + "'");
  Wide num = whole * scale + parse_int(frac_part);
  return make(negative ? -num : num, scale);
}

std::int64_t Rational::floor() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::int64_t Rational::ceil() const {
  std::int64_t q = num_ / den_;
  if (num_ % den_ != 0 && num_ > 0) ++q;
  return q;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
  return make(Wide(a.num_) * b.den_ + Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return make(Wide(a.num_) * b.den_ - Wide(b.num_) * a.den_, Wide(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return make(Wide(a.num_) * b.num_, Wide(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw InvalidArgument("rational division by zero");
  return make(Wide(a.num_) * b.den_, Wide(a.den_) * b.num_);
}

Rational Rational::operator-() const { return make(-Wide(num_), den_); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  Wide lhs = Wide(a.num_) * b.den_;
  Wide rhs = Wide(b.num_) * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace hgauge

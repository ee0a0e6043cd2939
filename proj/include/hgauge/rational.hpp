#ifndef HGAUGE_RATIONAL_HPP
#define HGAUGE_RATIONAL_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hgauge {

// Small exact rational with 64-bit parts, always normalized (den > 0,
// gcd(num, den) = 1). Arithmetic throws InvalidArgument on overflow.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  // Accepts "p/q", "p" and finite decimals such as "0.6" or "-1.25".
  static Rational parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  std::int64_t floor() const;
  std::int64_t ceil() const;
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  // "p/q", or "p" when den == 1.
  std::string to_string() const;

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace hgauge

#endif  // HGAUGE_RATIONAL_HPP

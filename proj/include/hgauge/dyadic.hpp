#ifndef HGAUGE_DYADIC_HPP
#define HGAUGE_DYADIC_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hgauge {

using BigInt = boost::multiprecision::cpp_int;

// Exact dyadic rational num / 2^exp. Normalized: exp == 0 or num is odd.
// All measure arithmetic in the library goes through this type.
class Dyadic {
 public:
  Dyadic() = default;
  explicit Dyadic(BigInt integer) : num_(std::move(integer)) {}
  Dyadic(BigInt num, std::uint32_t exp);

  // 2^power for any integer power.
  static Dyadic pow2(std::int64_t power);
  // "p/2^q" or an integer "p".
  static Dyadic parse(std::string_view text);

  const BigInt& numerator() const { return num_; }
  std::uint32_t exponent() const { return exp_; }
  bool is_zero() const { return num_ == 0; }

  Dyadic half() const { return scaled(-1); }
  // this * 2^power.
  Dyadic scaled(std::int64_t power) const;

  double to_double() const;
  // "p/2^q"; integers print as "p/2^0" so the format is uniform.
  std::string to_string() const;

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  Dyadic& operator+=(const Dyadic& other) { return *this = *this + other; }

  friend bool operator==(const Dyadic& a, const Dyadic& b) { return a.exp_ == b.exp_ && a.num_ == b.num_; }
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);

 private:
  void normalize();

  BigInt num_ = 0;
  std::uint32_t exp_ = 0;
};

}  // namespace hgauge

#endif  // HGAUGE_DYADIC_HPP

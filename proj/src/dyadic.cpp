#include "hgauge/dyadic.hpp"

#include <cmath>

#include "hgauge/error.hpp"

namespace hgauge {

Dyadic::Dyadic(BigInt num, std::uint32_t exp) : num_(std::move(num)), exp_(exp) { normalize(); }

void Dyadic::normalize() {
  if (num_ == 0) {
    exp_ = 0;
    return;
  }
  if (exp_ == 0) return;
  BigInt magnitude = num_ < 0 ? BigInt(-num_) : num_;
  std::uint32_t zeros = static_cast<std::uint32_t>(boost::multiprecision::lsb(magnitude));
  std::uint32_t shift = zeros < exp_ ? zeros : exp_;
  if (shift > 0) {
    num_ >>= shift;
    exp_ -= shift;
  }
}

Dyadic Dyadic::pow2(std::int64_t power) {
  if (power >= 0) return Dyadic(BigInt(1) << static_cast<unsigned>(power));
  return Dyadic(BigInt(1), static_cast<std::uint32_t>(-power));
}

Dyadic Dyadic::parse(std::string_view text) {
  auto fail = [&] { return InvalidArgument("malformed dyadic '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  std::string_view num_text = text;
  std::uint32_t exp = 0;
  if (auto slash = text.find("/2^"); slash != std::string_view::npos) {
    num_text = text.substr(0, slash);
    std::string_view exp_text = text.substr(slash + 3);
    if (exp_text.empty()) throw fail();
    std::uint64_t e = 0;
    for (char c : exp_text) {
      if (c < '0' || c > '9') throw fail();
      e = e * 10 + static_cast<unsigned>(c - '0');
      if (e > 1u << 24) throw fail();
    }
    exp = static_cast<std::uint32_t>(e);
  }
  std::size_t start = (!num_text.empty() && num_text.front() == '-') ? 1 : 0;
  if (num_text.size() == start) throw fail();
  for (std::size_t i = start; i < num_text.size(); ++i) {
    if (num_text[i] < '0' || num_text[i] > '9') throw fail();
  }
  return Dyadic(BigInt(std::string(num_text)), exp);
}

Dyadic Dyadic::scaled(std::int64_t power) const {
  if (num_ == 0) return {};
  if (power >= 0) {
    auto p = static_cast<std::uint64_t>(power);
    if (p <= exp_) return Dyadic(num_, exp_ - static_cast<std::uint32_t>(p));
    return Dyadic(num_ << static_cast<unsigned>(p - exp_), 0);
  }
  return Dyadic(num_, exp_ + static_cast<std::uint32_t>(-power));
}

double Dyadic::to_double() const {
  // Scale down large numerators before converting so huge exponents do not
  // overflow the intermediate double.
  BigInt magnitude = num_ < 0 ? BigInt(-num_) : num_;
  std::int64_t shift = 0;
  if (magnitude != 0) {
    auto bits = static_cast<std::int64_t>(boost::multiprecision::msb(magnitude)) + 1;
    if (bits > 64) {
      shift = bits - 64;
      magnitude >>= static_cast<unsigned>(shift);
    }
  }
  double v = std::ldexp(magnitude.convert_to<double>(), static_cast<int>(shift - static_cast<std::int64_t>(exp_)));
  return num_ < 0 ? -v : v;
}

std::string Dyadic::to_string() const { return num_.str() + "/2^" + std::to_string(exp_); }

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.exp_ == b.exp_) return Dyadic(a.num_ + b.num_, a.exp_);
  if (a.exp_ > b.exp_) return Dyadic(a.num_ + (b.num_ << (a.exp_ - b.exp_)), a.exp_);
  return Dyadic((a.num_ << (b.exp_ - a.exp_)) + b.num_, b.exp_);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) {
  Dyadic neg = b;
  neg.num_ = -neg.num_;
  return a + neg;
}

Dyadic operator*(const Dyadic& a, const Dyadic& b) { return Dyadic(a.num_ * b.num_, a.exp_ + b.exp_); }

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  BigInt lhs = a.num_;
  BigInt rhs = b.num_;
  if (a.exp_ > b.exp_) {
    rhs <<= (a.exp_ - b.exp_);
  } else if (b.exp_ > a.exp_) {
    lhs <<= (b.exp_ - a.exp_);
  }
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace hgauge

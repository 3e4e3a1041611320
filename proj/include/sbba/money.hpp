#ifndef SBBA_MONEY_HPP_
#define SBBA_MONEY_HPP_

#include <compare>
#include <concepts>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace sbba {

/// Exact rational amount of currency. Also used for dimensionless ratios
/// and probabilities. Always held in canonical reduced form with a positive
/// denominator, so equality is structural.
class Money {
 public:
  using Integer = boost::multiprecision::cpp_int;
  using Rational = boost::multiprecision::cpp_rational;

  Money() = default;

  template <std::integral T>
  Money(T value) : value_(static_cast<std::int64_t>(value)) {}  // NOLINT

  Money(std::int64_t numerator, std::int64_t denominator) {
    if (denominator == 0) throw std::domain_error("Money: zero denominator");
    if (denominator < 0) value_ = Rational(-Integer(numerator), -Integer(denominator));
    else value_ = Rational(Integer(numerator), Integer(denominator));
  }

  static Money from_rational(Rational r) {
    Money m;
    m.value_ = std::move(r);
    return m;
  }

  /// Parses "12", "-3", "2.75" or "5/2" exactly.
  static Money parse(std::string_view text);

  Integer numerator() const { return boost::multiprecision::numerator(value_); }
  Integer denominator() const { return boost::multiprecision::denominator(value_); }
  const Rational& rational() const { return value_; }

  bool is_integer() const { return denominator() == 1; }
  double to_double() const { return value_.convert_to<double>(); }

  /// "7", "-3" or "58/3".
  std::string to_string() const {
    if (is_integer()) return numerator().str();
    return numerator().str() + "/" + denominator().str();
  }

  Money& operator+=(const Money& o) { value_ += o.value_; return *this; }
  Money& operator-=(const Money& o) { value_ -= o.value_; return *this; }
  Money& operator*=(const Money& o) { value_ *= o.value_; return *this; }
  Money& operator/=(const Money& o) {
    if (o.value_ == 0) throw std::domain_error("Money: division by zero");
    value_ /= o.value_;
    return *this;
  }

  friend Money operator+(Money a, const Money& b) { return a += b; }
  friend Money operator-(Money a, const Money& b) { return a -= b; }
  friend Money operator*(Money a, const Money& b) { return a *= b; }
  friend Money operator/(Money a, const Money& b) { return a /= b; }
  friend Money operator-(const Money& a) { return from_rational(-a.value_); }

  friend bool operator==(const Money& a, const Money& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Money& a, const Money& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend std::ostream& operator<<(std::ostream& os, const Money& m) { return os << m.to_string(); }

 private:
  Rational value_{0};
};

inline Money Money::parse(std::string_view text) {
  auto fail = [&]() -> Money {
    throw std::invalid_argument("Money: cannot parse '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();

  auto parse_integer = [&](std::string_view digits, bool allow_sign) -> Integer {
    std::size_t start = 0;
    bool negative = false;
    if (allow_sign && !digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
      negative = digits[0] == '-';
      start = 1;
    }
    if (start >= digits.size()) fail();
    Integer out = 0;
    for (std::size_t i = start; i < digits.size(); ++i) {
      char c = digits[i];
      if (c < '0' || c > '9') fail();
      out = out * 10 + (c - '0');
    }
    return negative ? Integer(-out) : out;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash), true);
    Integer den = parse_integer(text.substr(slash + 1), false);
    if (den == 0) return fail();
    return from_rational(Rational(num, den));
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.empty()) return fail();
    bool negative = !whole.empty() && whole[0] == '-';
    if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.remove_prefix(1);
    Integer int_part = whole.empty() ? Integer(0) : parse_integer(whole, false);
    Integer frac_part = parse_integer(frac, false);
    Integer scale = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(frac.size()));
    Rational r(int_part * scale + frac_part, scale);
    return from_rational(negative ? Rational(-r) : r);
  }
  return from_rational(Rational(parse_integer(text, true)));
}

inline Money min(const Money& a, const Money& b) { return b < a ? b : a; }
inline Money max(const Money& a, const Money& b) { return a < b ? b : a; }

/// Money extended with +infinity. Only used for the s_{k+1} sentinel; it
/// never takes part in arithmetic.
class BoundedMoney {
 public:
  BoundedMoney(Money value) : value_(std::move(value)), infinite_(false) {}  // NOLINT
  static BoundedMoney infinity() { return BoundedMoney(); }

  bool is_infinite() const { return infinite_; }
  const Money& value() const {
    if (infinite_) throw std::logic_error("BoundedMoney: value() of +infinity");
    return value_;
  }
  Money value_or(const Money& fallback) const { return infinite_ ? fallback : value_; }

  friend bool operator==(const BoundedMoney& a, const BoundedMoney& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend bool operator<=(const BoundedMoney& a, const Money& b) { return !a.infinite_ && a.value_ <= b; }
  friend bool operator>(const BoundedMoney& a, const Money& b) { return !(a <= b); }

  std::string to_string() const { return infinite_ ? "inf" : value_.to_string(); }
  friend std::ostream& operator<<(std::ostream& os, const BoundedMoney& m) { return os << m.to_string(); }

 private:
  BoundedMoney() : infinite_(true) {}
  Money value_;
  bool infinite_;
};

inline Money min(const Money& a, const BoundedMoney& b) { return b.is_infinite() ? a : min(a, b.value()); }

}  // namespace sbba

#endif  // SBBA_MONEY_HPP_

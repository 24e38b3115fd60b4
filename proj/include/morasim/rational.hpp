#ifndef MORASIM_RATIONAL_HPP
#define MORASIM_RATIONAL_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace morasim {

using BigRational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Exact rational number.
//
// Values whose reduced numerator and denominator fit in int64 are stored
// inline; anything larger is promoted to a shared, immutable BigRational.
// The representation is canonical: a value that fits inline is never stored
// big, so equality on the inline fields is value equality.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t value) : num_(value) {  // NOLINT(google-explicit-constructor)
        if (value == INT64_MIN) promote(BigRational(value));
    }
    Rational(int value) : Rational(static_cast<std::int64_t>(value)) {}  // NOLINT
    Rational(std::int64_t num, std::int64_t den);
    explicit Rational(const BigRational& value);

    // Parses "12", "-0.15", "3/20" or "1.5/4". Throws std::invalid_argument.
    static Rational parse(std::string_view text);

    [[nodiscard]] bool is_big() const { return static_cast<bool>(big_); }
    [[nodiscard]] BigRational to_big() const;
    [[nodiscard]] BigInt numerator() const;
    [[nodiscard]] BigInt denominator() const;

    [[nodiscard]] int sign() const;
    [[nodiscard]] bool is_zero() const { return !big_ && num_ == 0; }
    [[nodiscard]] bool is_integer() const;
    [[nodiscard]] double to_double() const;

    // "n" for integers, "n/d" otherwise.
    [[nodiscard]] std::string str() const;
    // Fixed-point rendering rounded half away from zero.
    [[nodiscard]] std::string decimal(int digits = 6) const;

    [[nodiscard]] BigInt floor() const;
    [[nodiscard]] BigInt ceil() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    Rational operator-() const;

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b);
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

    [[nodiscard]] std::size_t hash() const;

private:
    static Rational make_reduced(std::int64_t num, std::int64_t den);
    void promote(const BigRational& value);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
    std::shared_ptr<const BigRational> big_;
};

Rational abs(const Rational& r);
std::ostream& operator<<(std::ostream& os, const Rational& r);

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

// Least common multiple of two positive rationals: the smallest positive
// rational that is an integer multiple of both.
Rational lcm(const Rational& a, const Rational& b);

}  // namespace morasim

template <>
struct std::hash<morasim::Rational> {
    std::size_t operator()(const morasim::Rational& r) const noexcept { return r.hash(); }
};

#endif  // MORASIM_RATIONAL_HPP

#include "morasim/rational.hpp"

#include <cctype>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace morasim {

namespace {

constexpr std::int64_t kMin = std::numeric_limits<std::int64_t>::min();
constexpr std::int64_t kMax = std::numeric_limits<std::int64_t>::max();

bool mul_overflows(std::int64_t a, std::int64_t b, std::int64_t& out) {
    return __builtin_mul_overflow(a, b, &out) || out == kMin;
}

bool add_overflows(std::int64_t a, std::int64_t b, std::int64_t& out) {
    return __builtin_add_overflow(a, b, &out) || out == kMin;
}

bool fits(const BigInt& v) { return v >= kMin + 1 && v <= kMax; }

BigInt pow10(int digits) {
    BigInt p = 1;
    for (int i = 0; i < digits; ++i) p *= 10;
    return p;
}

// Digits with an optional single '.'; no sign.
BigRational parse_unsigned_decimal(std::string_view s, std::string_view whole) {
    if (s.empty()) throw std::invalid_argument("empty number in '" + std::string(whole) + "'");
    int exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view ex = s.substr(e + 1);
        s = s.substr(0, e);
        bool neg = false;
        if (!ex.empty() && (ex.front() == '-' || ex.front() == '+')) {
            neg = ex.front() == '-';
            ex.remove_prefix(1);
        }
        if (ex.empty() || ex.size() > 2) throw std::invalid_argument("malformed exponent in '" + std::string(whole) + "'");
        for (char c : ex) {
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw std::invalid_argument("malformed exponent in '" + std::string(whole) + "'");
            exponent = exponent * 10 + (c - '0');
        }
        if (neg) exponent = -exponent;
    }
    std::string digits;
    int frac = 0;
    bool seen_dot = false;
    for (char c : s) {
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (seen_dot) ++frac;
        } else {
            throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
        }
    }
    if (digits.empty()) throw std::invalid_argument("malformed number '" + std::string(whole) + "'");
    // a leading zero would make boost read the digits as octal
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    BigRational value(BigInt(digits), pow10(frac));
    if (exponent > 0) value *= pow10(exponent);
    if (exponent < 0) value /= pow10(-exponent);
    return value;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    *this = make_reduced(num, den);
}

Rational::Rational(const BigRational& value) { promote(value); }

Rational Rational::make_reduced(std::int64_t num, std::int64_t den) {
    if (num == kMin || den == kMin) return Rational(BigRational(BigInt(num), BigInt(den)));
    if (den < 0) {
        num = -num;
        den = -den;
    }
    Rational r;
    if (num == 0) return r;
    const std::int64_t g = std::gcd(num, den);
    r.num_ = num / g;
    r.den_ = den / g;
    return r;
}

void Rational::promote(const BigRational& value) {
    const BigInt n = boost::multiprecision::numerator(value);
    const BigInt d = boost::multiprecision::denominator(value);
    if (fits(n) && d <= kMax) {
        num_ = static_cast<std::int64_t>(n);
        den_ = static_cast<std::int64_t>(d);
        big_.reset();
    } else {
        num_ = 0;
        den_ = 1;
        big_ = std::make_shared<const BigRational>(value);
    }
}

Rational Rational::parse(std::string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::string_view s = text.substr(b, e - b);
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    BigRational value;
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        const BigRational den = parse_unsigned_decimal(s.substr(slash + 1), text);
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        value = parse_unsigned_decimal(s.substr(0, slash), text) / den;
    } else {
        value = parse_unsigned_decimal(s, text);
    }
    if (negative) value = -value;
    return Rational(value);
}

BigRational Rational::to_big() const {
    if (big_) return *big_;
    return BigRational(BigInt(num_), BigInt(den_));
}

BigInt Rational::numerator() const {
    return big_ ? BigInt(boost::multiprecision::numerator(*big_)) : BigInt(num_);
}

BigInt Rational::denominator() const {
    return big_ ? BigInt(boost::multiprecision::denominator(*big_)) : BigInt(den_);
}

int Rational::sign() const {
    if (big_) return big_->sign();
    return (num_ > 0) - (num_ < 0);
}

bool Rational::is_integer() const { return big_ ? denominator() == 1 : den_ == 1; }

double Rational::to_double() const {
    if (big_) return big_->convert_to<double>();
    return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::str() const {
    if (big_) {
        std::string s = numerator().str();
        if (denominator() != 1) s += "/" + denominator().str();
        return s;
    }
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
}

std::string Rational::decimal(int digits) const {
    const BigInt n = numerator();
    const BigInt d = denominator();
    const BigInt scaled = (n < 0 ? BigInt(-n) : n) * pow10(digits);
    BigInt q = scaled / d;
    const BigInt r = scaled % d;
    if (2 * r >= d) ++q;
    std::string body = q.str();
    if (digits > 0) {
        if (static_cast<int>(body.size()) <= digits) body.insert(0, digits + 1 - body.size(), '0');
        body.insert(body.size() - digits, ".");
    }
    if (n < 0 && q != 0) body.insert(0, "-");
    return body;
}

BigInt Rational::floor() const {
    const BigInt n = numerator();
    const BigInt d = denominator();
    BigInt q = n / d;
    if (n < 0 && q * d != n) --q;
    return q;
}

BigInt Rational::ceil() const {
    const BigInt n = numerator();
    const BigInt d = denominator();
    BigInt q = n / d;
    if (n > 0 && q * d != n) ++q;
    return q;
}

Rational operator+(const Rational& x, const Rational& y) {
    if (!x.big_ && !y.big_) {
        if (x.num_ == 0) return y;
        if (y.num_ == 0) return x;
        const std::int64_t g = std::gcd(x.den_, y.den_);
        const std::int64_t xd = x.den_ / g;
        const std::int64_t yd = y.den_ / g;
        std::int64_t t1 = 0;
        std::int64_t t2 = 0;
        std::int64_t t = 0;
        if (!mul_overflows(x.num_, yd, t1) && !mul_overflows(y.num_, xd, t2) && !add_overflows(t1, t2, t)) {
            if (t == 0) return {};
            const std::int64_t g2 = std::gcd(t, g);
            std::int64_t den = 0;
            if (!mul_overflows(xd, y.den_ / g2, den)) {
                Rational r;
                r.num_ = t / g2;
                r.den_ = den;
                return r;
            }
        }
    }
    return Rational(x.to_big() + y.to_big());
}

Rational Rational::operator-() const {
    if (big_) return Rational(BigRational(-*big_));
    Rational r = *this;
    r.num_ = -num_;
    return r;
}

Rational operator-(const Rational& x, const Rational& y) { return x + (-y); }

Rational operator*(const Rational& x, const Rational& y) {
    if (!x.big_ && !y.big_) {
        if (x.num_ == 0 || y.num_ == 0) return {};
        const std::int64_t g1 = std::gcd(x.num_, y.den_);
        const std::int64_t g2 = std::gcd(y.num_, x.den_);
        std::int64_t num = 0;
        std::int64_t den = 0;
        if (!mul_overflows(x.num_ / g1, y.num_ / g2, num) && !mul_overflows(x.den_ / g2, y.den_ / g1, den)) {
            Rational r;
            r.num_ = num;
            r.den_ = den;
            return r;
        }
    }
    return Rational(x.to_big() * y.to_big());
}

Rational operator/(const Rational& x, const Rational& y) {
    if (y.is_zero()) throw std::domain_error("rational division by zero");
    if (!y.big_) {
        Rational inv;
        inv.num_ = y.num_ < 0 ? -y.den_ : y.den_;
        inv.den_ = y.num_ < 0 ? -y.num_ : y.num_;
        return x * inv;
    }
    return Rational(x.to_big() / y.to_big());
}

bool operator==(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) return a.num_ == b.num_ && a.den_ == b.den_;
    if (a.big_ && b.big_) return *a.big_ == *b.big_;
    return false;  // canonical form: a big value never equals an inline one
}

__extension__ using Wide = __int128;

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (!a.big_ && !b.big_) {
        const Wide lhs = static_cast<Wide>(a.num_) * b.den_;
        const Wide rhs = static_cast<Wide>(b.num_) * a.den_;
        return lhs <=> rhs;
    }
    const BigRational lhs = a.to_big();
    const BigRational rhs = b.to_big();
    if (lhs < rhs) return std::strong_ordering::less;
    if (rhs < lhs) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::size_t Rational::hash() const {
    if (big_) return std::hash<std::string>{}(str());
    const std::size_t h1 = std::hash<std::int64_t>{}(num_);
    const std::size_t h2 = std::hash<std::int64_t>{}(den_);
    return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6) + (h1 >> 2));
}

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational lcm(const Rational& a, const Rational& b) {
    if (a.sign() <= 0 || b.sign() <= 0) throw std::domain_error("lcm of non-positive rationals");
    const BigInt num = boost::multiprecision::lcm(a.numerator(), b.numerator());
    const BigInt den = boost::multiprecision::gcd(a.denominator(), b.denominator());
    return Rational(BigRational(num, den));
}

}  // namespace morasim

#include "crashsched/rational.hpp"

#include <limits>

namespace crashsched {

namespace {

__int128 abs128(__int128 v) { return v < 0 ? -v : v; }

__int128 gcd128(__int128 a, __int128 b) {
    a = abs128(a);
    b = abs128(b);
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::int64_t narrow(__int128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
        throw overflow_error(std::string("rational overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

} // namespace

Rational Rational::make(__int128 num, __int128 den) {
    if (den == 0) throw validation_error("rational with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    Rational r;
    r.num_ = narrow(num, "normalize");
    r.den_ = narrow(den, "normalize");
    if (r.den_ == 0) throw overflow_error("rational overflow in normalize");
    return r;
}

Rational Rational::operator+(const Rational& o) const {
    return make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
                static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator-(const Rational& o) const {
    return make(static_cast<__int128>(num_) * o.den_ - static_cast<__int128>(o.num_) * den_,
                static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
    return make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num_ == 0) throw validation_error("rational division by zero");
    return make(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}

int Rational::compare(const Rational& o) const {
    __int128 lhs = static_cast<__int128>(num_) * o.den_;
    __int128 rhs = static_cast<__int128>(o.num_) * den_;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

std::int64_t Rational::floor() const {
    if (num_ >= 0) return num_ / den_;
    return -ceil_div(-num_, den_);
}

std::int64_t Rational::ceil() const {
    if (num_ >= 0) return ceil_div(num_, den_);
    return -((-num_) / den_);
}

std::string Rational::str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw validation_error("empty rational literal");
    auto parse_int = [](const std::string& part) -> std::int64_t {
        if (part.empty()) throw validation_error("empty integer in rational literal");
        std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
        if (i == part.size()) throw validation_error("sign without digits in rational literal");
        for (; i < part.size(); ++i)
            if (part[i] < '0' || part[i] > '9')
                throw validation_error("bad character in rational literal: '" + part + "'");
        try {
            return std::stoll(part);
        } catch (const std::exception&) {
            throw overflow_error("rational literal out of range: '" + part + "'");
        }
    };
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_int(text));
    std::int64_t num = parse_int(text.substr(0, slash));
    std::int64_t den = parse_int(text.substr(slash + 1));
    return Rational(num, den);
}

Rational div_by_speedup(std::int64_t cost, const Rational& speedup) {
    if (speedup.num() <= 0) throw precondition_error("speedup must be positive");
    return Rational::make(static_cast<__int128>(cost) * speedup.den(), speedup.num());
}

Rational min(const Rational& a, const Rational& b) { return a <= b ? a : b; }
Rational max(const Rational& a, const Rational& b) { return a >= b ? a : b; }

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    if (b <= 0) throw precondition_error("ceil_div needs a positive divisor");
    if (a <= 0) return -((-a) / b);
    __int128 r = (static_cast<__int128>(a) + b - 1) / b;
    return static_cast<std::int64_t>(r);
}

} // namespace crashsched

#pragma once

#include <cstdint>
#include <string>

#include "crashsched/errors.hpp"

namespace crashsched {

// Exact rational time value. Kept in lowest terms with a positive
// denominator; every operation that would leave int64 range throws
// overflow_error instead of silently wrapping.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t value) : num_(value), den_(1) {} // NOLINT: implicit by design
    Rational(std::int64_t num, std::int64_t den) { *this = make(num, den); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    static Rational make(__int128 num, __int128 den);

    bool is_integer() const { return den_ == 1; }
    bool is_zero() const { return num_ == 0; }

    Rational operator-() const { return make(-static_cast<__int128>(num_), den_); }
    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    // -1, 0, 1 comparison against another rational, exact.
    int compare(const Rational& o) const;

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return compare(o) < 0; }
    bool operator<=(const Rational& o) const { return compare(o) <= 0; }
    bool operator>(const Rational& o) const { return compare(o) > 0; }
    bool operator>=(const Rational& o) const { return compare(o) >= 0; }

    std::int64_t floor() const;
    std::int64_t ceil() const;

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // "7" when integral, "7/2" otherwise.
    std::string str() const;

    // Accepts "7", "-7", "7/2"; whitespace is not allowed.
    static Rational parse(const std::string& text);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

using TimePoint = Rational;

// cost / s, the exact execution span of a task on a speed-s processor.
Rational div_by_speedup(std::int64_t cost, const Rational& speedup);

Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

// Exact ceil(a/b) for integers, b > 0.
std::int64_t ceil_div(std::int64_t a, std::int64_t b);

} // namespace crashsched

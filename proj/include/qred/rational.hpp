#pragma once

#include "qred/error.hpp"

#include <cstdint>
#include <numeric>
#include <string>

namespace qred {

// Exact fraction over 64-bit integers, always kept in lowest terms with a
// positive denominator. Overflow raises LimitError instead of wrapping;
// bisimulation checks compare weights for exact equality, so silently
// losing precision is never acceptable.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}

    Rational(std::int64_t n, std::int64_t d) {
        if (d == 0)
            throw ParseError("rational with zero denominator");
        if (d < 0) {
            n = checked_negate(n);
            d = checked_negate(d);
        }
        const std::int64_t g = std::gcd(n, d);
        num_ = (g == 0) ? 0 : n / g;
        den_ = (g == 0) ? 1 : d / g;
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool is_zero() const { return num_ == 0; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const __int128 n = static_cast<__int128>(a.num_) * b.den_ +
                           static_cast<__int128>(b.num_) * a.den_;
        const __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from_wide(n, d);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }

    friend bool operator<(const Rational& a, const Rational& b) {
        return static_cast<__int128>(a.num_) * b.den_ <
               static_cast<__int128>(b.num_) * a.den_;
    }

    std::string str() const {
        if (den_ == 1)
            return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Accepts "n" or "n/d" with optional leading '-'; anything else
    // (notably decimal points) is rejected.
    static Rational parse(const std::string& text);

private:
    static std::int64_t checked_negate(std::int64_t v) {
        if (v == INT64_MIN)
            throw LimitError("rational overflow");
        return -v;
    }

    static Rational from_wide(__int128 n, __int128 d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const __int128 g = wide_gcd(n < 0 ? -n : n, d);
        if (g != 0) {
            n /= g;
            d /= g;
        }
        if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX)
            throw LimitError("rational overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = d == 0 ? 1 : static_cast<std::int64_t>(d);
        return r;
    }

    static __int128 wide_gcd(__int128 a, __int128 b) {
        while (b != 0) {
            const __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    std::int64_t num_;
    std::int64_t den_;
};

} // namespace qred

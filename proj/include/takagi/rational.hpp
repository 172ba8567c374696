#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>

#include "takagi/bigint.hpp"

namespace takagi {

// Exact rational number; denominator kept positive, fraction always reduced.
class Rational {
public:
    Rational() : num_(0), den_(1) {}
    template <typename T>
        requires std::integral<T>
    Rational(T v) : num_(v), den_(1) {}
    Rational(BigInt n) : num_(std::move(n)), den_(1) {}
    Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }
    template <typename T, typename U>
        requires std::integral<T> && std::integral<U>
    Rational(T n, U d) : num_(n), den_(d) { normalize(); }

    const BigInt& num() const { return num_; }
    const BigInt& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_integer() const { return den_ == BigInt(1); }
    int sign() const { return num_.sign(); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(a.num_ * b.den_, a.den_ * b.num_);
    }
    Rational operator-() const {
        Rational r = *this;
        r.num_ = -r.num_;
        return r;
    }
    Rational& operator+=(const Rational& o) { *this = *this + o; return *this; }
    Rational& operator-=(const Rational& o) { *this = *this - o; return *this; }
    Rational& operator*=(const Rational& o) { *this = *this * o; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend int cmp(const Rational& a, const Rational& b) {
        return cmp(a.num_ * b.den_, b.num_ * a.den_);
    }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const Rational& a, const Rational& b) { return cmp(a, b) <= 0; }
    friend bool operator>(const Rational& a, const Rational& b) { return cmp(a, b) > 0; }
    friend bool operator>=(const Rational& a, const Rational& b) { return cmp(a, b) >= 0; }

    friend Rational abs(const Rational& a) {
        Rational r = a;
        r.num_ = abs(r.num_);
        return r;
    }

    double to_double() const {
        // Shrink each side into double range separately, then restore the
        // exponent difference.
        size_t bn = num_.bit_length(), bd = den_.bit_length();
        if (bn < 900 && bd < 900) return num_.to_double() / den_.to_double();
        unsigned sn = bn > 512 ? static_cast<unsigned>(bn - 512) : 0;
        unsigned sd = bd > 512 ? static_cast<unsigned>(bd - 512) : 0;
        double base = num_.shifted_right(sn).to_double() / den_.shifted_right(sd).to_double();
        return std::ldexp(base, static_cast<int>(static_cast<long>(sn) - static_cast<long>(sd)));
    }

    // floor(num/den) as BigInt.
    BigInt floor() const {
        BigInt q, r;
        divmod(num_, den_, q, r);
        if (r.is_negative()) q -= BigInt(1);
        return q;
    }

    std::string to_string() const {
        if (is_integer()) return num_.to_string();
        return num_.to_string() + "/" + den_.to_string();
    }

    // Accepts "a", "a/b" and "k/2^n".
    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(BigInt::from_string(s));
        std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
        auto caret = ds.find('^');
        if (caret != std::string::npos) {
            BigInt base = BigInt::from_string(ds.substr(0, caret));
            unsigned long e = std::stoul(ds.substr(caret + 1));
            if (base != BigInt(2)) throw std::invalid_argument("rational: only 2^n denominators");
            return Rational(BigInt::from_string(ns), BigInt::pow2(static_cast<unsigned>(e)));
        }
        return Rational(BigInt::from_string(ns), BigInt::from_string(ds));
    }

private:
    void normalize() {
        if (den_.is_zero()) throw std::domain_error("Rational: zero denominator");
        if (den_.is_negative()) { num_ = -num_; den_ = -den_; }
        if (num_.is_zero()) { den_ = BigInt(1); return; }
        BigInt g = gcd(num_, den_);
        if (g != BigInt(1)) { num_ = num_ / g; den_ = den_ / g; }
    }

    BigInt num_;
    BigInt den_;
};

}  // namespace takagi

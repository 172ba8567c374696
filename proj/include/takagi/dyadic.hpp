#pragma once

#include <stdexcept>
#include <string>

#include "takagi/bigint.hpp"
#include "takagi/rational.hpp"

namespace takagi {

// Dyadic rational num / 2^exp, kept canonical (num odd or exp == 0).
class Dyadic {
public:
    Dyadic() : num_(0), exp_(0) {}
    Dyadic(BigInt num, unsigned exp) : num_(std::move(num)), exp_(exp) { normalize(); }
    Dyadic(long long num, unsigned exp) : num_(num), exp_(exp) { normalize(); }
    Dyadic(long long v) : num_(v), exp_(0) {}

    static Dyadic from_rational(const Rational& r) {
        const BigInt& d = r.den();
        unsigned k = d.trailing_zero_bits();
        if (BigInt::pow2(k) != d)
            throw std::domain_error("Dyadic: denominator not a power of two");
        return Dyadic(r.num(), k);
    }

    const BigInt& num() const { return num_; }
    unsigned exp() const { return exp_; }

    Rational to_rational() const { return Rational(num_, BigInt::pow2(exp_)); }
    double to_double() const { return std::ldexp(num_.to_double(), -static_cast<int>(exp_)); }

    friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
        unsigned e = std::max(a.exp_, b.exp_);
        return Dyadic(a.num_.shifted_left(e - a.exp_) + b.num_.shifted_left(e - b.exp_), e);
    }
    friend Dyadic operator-(const Dyadic& a, const Dyadic& b) {
        unsigned e = std::max(a.exp_, b.exp_);
        return Dyadic(a.num_.shifted_left(e - a.exp_) - b.num_.shifted_left(e - b.exp_), e);
    }
    Dyadic operator-() const { return Dyadic(-num_, exp_); }

    friend int cmp(const Dyadic& a, const Dyadic& b) {
        unsigned e = std::max(a.exp_, b.exp_);
        return cmp(a.num_.shifted_left(e - a.exp_), b.num_.shifted_left(e - b.exp_));
    }
    friend bool operator==(const Dyadic& a, const Dyadic& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) != 0; }
    friend bool operator<(const Dyadic& a, const Dyadic& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) <= 0; }
    friend bool operator>(const Dyadic& a, const Dyadic& b) { return cmp(a, b) > 0; }
    friend bool operator>=(const Dyadic& a, const Dyadic& b) { return cmp(a, b) >= 0; }

    std::string to_string() const {
        if (exp_ == 0) return num_.to_string();
        return num_.to_string() + "/2^" + std::to_string(exp_);
    }

    // Exact finite decimal expansion (every dyadic has one).
    std::string to_decimal() const {
        if (exp_ == 0) return num_.to_string();
        BigInt scaled = abs(num_) * BigInt::pow(BigInt(5), exp_);
        std::string digits = scaled.to_string();
        if (digits.size() <= exp_) digits.insert(0, exp_ + 1 - digits.size(), '0');
        digits.insert(digits.size() - exp_, ".");
        while (digits.back() == '0') digits.pop_back();
        if (digits.back() == '.') digits.pop_back();
        return (num_.is_negative() ? "-" : "") + digits;
    }

private:
    void normalize() {
        if (num_.is_zero()) { exp_ = 0; return; }
        unsigned t = num_.trailing_zero_bits();
        unsigned s = std::min(t, exp_);
        if (s) { num_ = num_.shifted_right(s); exp_ -= s; }
    }

    BigInt num_;
    unsigned exp_;
};

}  // namespace takagi

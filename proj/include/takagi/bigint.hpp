#pragma once

#include <algorithm>
#include <concepts>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace takagi {

// Signed arbitrary-precision integer, base 2^32 little-endian magnitude.
// Sizes in this library stay small (a few thousand bits), so schoolbook
// multiplication and long division are enough.
class BigInt {
public:
    BigInt() = default;

    template <typename T>
        requires std::integral<T>
    BigInt(T v) {
        unsigned long long m;
        if constexpr (std::is_signed_v<T>) {
            neg_ = v < 0;
            m = neg_ ? ~static_cast<unsigned long long>(v) + 1ULL
                     : static_cast<unsigned long long>(v);
        } else {
            m = static_cast<unsigned long long>(v);
        }
        while (m) { limbs_.push_back(static_cast<uint32_t>(m & 0xffffffffULL)); m >>= 32; }
    }

    static BigInt from_string(const std::string& s) {
        BigInt r;
        size_t i = 0;
        bool neg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) { neg = s[i] == '-'; ++i; }
        if (i == s.size()) throw std::invalid_argument("BigInt: empty string");
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') throw std::invalid_argument("BigInt: bad digit");
            r.mul_small(10);
            r.add_small(static_cast<uint32_t>(s[i] - '0'));
        }
        r.neg_ = neg && !r.is_zero();
        return r;
    }

    bool is_zero() const { return limbs_.empty(); }
    bool is_negative() const { return neg_; }
    int sign() const { return is_zero() ? 0 : (neg_ ? -1 : 1); }

    // Number of bits in the magnitude; 0 for zero.
    size_t bit_length() const {
        if (limbs_.empty()) return 0;
        uint32_t top = limbs_.back();
        size_t b = (limbs_.size() - 1) * 32;
        while (top) { ++b; top >>= 1; }
        return b;
    }

    bool fits_int64() const {
        return bit_length() <= 62;  // conservative
    }
    long long to_int64() const {
        unsigned long long m = 0;
        for (size_t i = limbs_.size(); i-- > 0;) m = (m << 32) | limbs_[i];
        long long v = static_cast<long long>(m);
        return neg_ ? -v : v;
    }

    double to_double() const {
        if (limbs_.empty()) return 0.0;
        double m = 0.0;
        // Top three limbs carry more than a double's mantissa.
        size_t n = limbs_.size();
        size_t take = std::min<size_t>(3, n);
        for (size_t i = 0; i < take; ++i)
            m = m * 4294967296.0 + static_cast<double>(limbs_[n - 1 - i]);
        double r = std::ldexp(m, static_cast<int>(32 * (n - take)));
        return neg_ ? -r : r;
    }

    friend int cmp_magnitude(const BigInt& a, const BigInt& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() < b.limbs_.size() ? -1 : 1;
        for (size_t i = a.limbs_.size(); i-- > 0;)
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i] ? -1 : 1;
        return 0;
    }
    friend int cmp(const BigInt& a, const BigInt& b) {
        if (a.sign() != b.sign()) return a.sign() < b.sign() ? -1 : 1;
        int c = cmp_magnitude(a, b);
        return a.neg_ ? -c : c;
    }
    friend bool operator==(const BigInt& a, const BigInt& b) { return cmp(a, b) == 0; }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return cmp(a, b) != 0; }
    friend bool operator<(const BigInt& a, const BigInt& b) { return cmp(a, b) < 0; }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return cmp(a, b) <= 0; }
    friend bool operator>(const BigInt& a, const BigInt& b) { return cmp(a, b) > 0; }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return cmp(a, b) >= 0; }

    BigInt operator-() const {
        BigInt r = *this;
        if (!r.is_zero()) r.neg_ = !r.neg_;
        return r;
    }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.neg_ == b.neg_) {
            BigInt r = add_mag(a, b);
            r.neg_ = a.neg_ && !r.is_zero();
            return r;
        }
        int c = cmp_magnitude(a, b);
        if (c == 0) return BigInt();
        BigInt r = c > 0 ? sub_mag(a, b) : sub_mag(b, a);
        r.neg_ = (c > 0 ? a.neg_ : b.neg_) && !r.is_zero();
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { return a + (-b); }

    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        if (a.is_zero() || b.is_zero()) return BigInt();
        BigInt r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            uint64_t carry = 0;
            uint64_t ai = a.limbs_[i];
            for (size_t j = 0; j < b.limbs_.size(); ++j) {
                uint64_t cur = r.limbs_[i + j] + ai * b.limbs_[j] + carry;
                r.limbs_[i + j] = static_cast<uint32_t>(cur);
                carry = cur >> 32;
            }
            size_t k = i + b.limbs_.size();
            while (carry) {
                uint64_t cur = r.limbs_[k] + carry;
                r.limbs_[k] = static_cast<uint32_t>(cur);
                carry = cur >> 32;
                ++k;
            }
        }
        r.trim();
        r.neg_ = (a.neg_ != b.neg_);
        return r;
    }

    // Truncated division (quotient rounds toward zero).
    friend void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
        if (b.is_zero()) throw std::domain_error("BigInt: division by zero");
        q = BigInt();
        r = BigInt();
        if (cmp_magnitude(a, b) < 0) { r = a; return; }
        // Bitwise long division on magnitudes.
        size_t n = a.bit_length();
        q.limbs_.assign((n + 31) / 32, 0);
        for (size_t i = n; i-- > 0;) {
            r.shl1();
            if (a.bit(i)) r.set_bit(0);
            if (cmp_magnitude(r, b) >= 0) {
                BigInt t = sub_mag(r, b);
                r = t;
                q.limbs_[i / 32] |= (uint32_t{1} << (i % 32));
            }
        }
        q.trim(); r.trim();
        q.neg_ = (a.neg_ != b.neg_) && !q.is_zero();
        r.neg_ = a.neg_ && !r.is_zero();
    }
    friend BigInt operator/(const BigInt& a, const BigInt& b) {
        BigInt q, r; divmod(a, b, q, r); return q;
    }
    friend BigInt operator%(const BigInt& a, const BigInt& b) {
        BigInt q, r; divmod(a, b, q, r); return r;
    }

    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }
    BigInt& operator*=(const BigInt& o) { *this = *this * o; return *this; }

    friend BigInt abs(const BigInt& a) {
        BigInt r = a; r.neg_ = false; return r;
    }

    friend BigInt gcd(BigInt a, BigInt b) {
        a.neg_ = false; b.neg_ = false;
        while (!b.is_zero()) {
            BigInt q, r;
            divmod(a, b, q, r);
            a = b;
            b = r;
        }
        return a;
    }

    BigInt shifted_left(unsigned k) const {
        if (is_zero()) return BigInt();
        BigInt r;
        size_t words = k / 32, bits = k % 32;
        r.limbs_.assign(limbs_.size() + words + 1, 0);
        for (size_t i = 0; i < limbs_.size(); ++i) {
            uint64_t v = static_cast<uint64_t>(limbs_[i]) << bits;
            r.limbs_[i + words] |= static_cast<uint32_t>(v);
            r.limbs_[i + words + 1] |= static_cast<uint32_t>(v >> 32);
        }
        r.trim();
        r.neg_ = neg_;
        return r;
    }

    static BigInt pow2(unsigned k) { return BigInt(1).shifted_left(k); }

    static BigInt pow(const BigInt& base, unsigned e) {
        BigInt r(1), b = base;
        while (e) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    // True if magnitude is divisible by 2 (zero counts as even).
    bool is_even() const { return limbs_.empty() || (limbs_[0] & 1u) == 0; }

    // Largest k with 2^k dividing the magnitude (0 for zero).
    unsigned trailing_zero_bits() const {
        if (limbs_.empty()) return 0;
        unsigned k = 0;
        size_t i = 0;
        while (limbs_[i] == 0) { k += 32; ++i; }
        uint32_t w = limbs_[i];
        while ((w & 1u) == 0) { ++k; w >>= 1; }
        return k;
    }

    BigInt shifted_right(unsigned k) const {
        size_t words = k / 32, bits = k % 32;
        if (words >= limbs_.size()) return BigInt();
        BigInt r;
        r.limbs_.assign(limbs_.size() - words, 0);
        for (size_t i = 0; i < r.limbs_.size(); ++i) {
            uint64_t v = limbs_[i + words] >> bits;
            if (bits && i + words + 1 < limbs_.size())
                v |= static_cast<uint64_t>(limbs_[i + words + 1]) << (32 - bits);
            r.limbs_[i] = static_cast<uint32_t>(v);
        }
        r.trim();
        r.neg_ = neg_ && !r.is_zero();
        return r;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        BigInt t = *this;
        t.neg_ = false;
        std::string digits;
        BigInt ten(10);
        while (!t.is_zero()) {
            BigInt q, r;
            divmod(t, ten, q, r);
            digits.push_back(static_cast<char>('0' + (r.is_zero() ? 0 : r.limbs_[0])));
            t = q;
        }
        if (neg_) digits.push_back('-');
        std::reverse(digits.begin(), digits.end());
        return digits;
    }

private:
    bool bit(size_t i) const {
        size_t w = i / 32;
        if (w >= limbs_.size()) return false;
        return (limbs_[w] >> (i % 32)) & 1u;
    }
    void set_bit(size_t i) {
        size_t w = i / 32;
        if (w >= limbs_.size()) limbs_.resize(w + 1, 0);
        limbs_[w] |= (uint32_t{1} << (i % 32));
    }
    void shl1() {
        uint32_t carry = 0;
        for (auto& w : limbs_) {
            uint32_t nc = w >> 31;
            w = (w << 1) | carry;
            carry = nc;
        }
        if (carry) limbs_.push_back(carry);
    }
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) neg_ = false;
    }
    void mul_small(uint32_t m) {
        uint64_t carry = 0;
        for (auto& w : limbs_) {
            uint64_t cur = static_cast<uint64_t>(w) * m + carry;
            w = static_cast<uint32_t>(cur);
            carry = cur >> 32;
        }
        if (carry) limbs_.push_back(static_cast<uint32_t>(carry));
        trim();
    }
    void add_small(uint32_t a) {
        uint64_t carry = a;
        for (size_t i = 0; carry && i < limbs_.size(); ++i) {
            uint64_t cur = limbs_[i] + carry;
            limbs_[i] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
        }
        if (carry) limbs_.push_back(static_cast<uint32_t>(carry));
    }
    static BigInt add_mag(const BigInt& a, const BigInt& b) {
        BigInt r;
        const auto& x = a.limbs_.size() >= b.limbs_.size() ? a.limbs_ : b.limbs_;
        const auto& y = a.limbs_.size() >= b.limbs_.size() ? b.limbs_ : a.limbs_;
        r.limbs_.assign(x.size() + 1, 0);
        uint64_t carry = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            uint64_t cur = static_cast<uint64_t>(x[i]) + (i < y.size() ? y[i] : 0) + carry;
            r.limbs_[i] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
        }
        r.limbs_[x.size()] = static_cast<uint32_t>(carry);
        r.trim();
        return r;
    }
    // Requires |a| >= |b|.
    static BigInt sub_mag(const BigInt& a, const BigInt& b) {
        BigInt r;
        r.limbs_.assign(a.limbs_.size(), 0);
        int64_t borrow = 0;
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            int64_t cur = static_cast<int64_t>(a.limbs_[i]) -
                          (i < b.limbs_.size() ? b.limbs_[i] : 0) - borrow;
            if (cur < 0) { cur += (int64_t{1} << 32); borrow = 1; } else borrow = 0;
            r.limbs_[i] = static_cast<uint32_t>(cur);
        }
        r.trim();
        return r;
    }

    std::vector<uint32_t> limbs_;
    bool neg_ = false;
};

}  // namespace takagi

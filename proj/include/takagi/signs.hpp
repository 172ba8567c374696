#pragma once

#include <cstdint>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "takagi/rational.hpp"

namespace takagi {

// A sign value is always -1 or +1.
using Sign = int;

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter-based generator: the value for (seed, n, j) is a pure hash of the
// triple, so trials replay identically under any execution order.
inline uint64_t counter_hash(uint64_t seed, uint64_t n, uint64_t j) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ n);
    h = splitmix64(h ^ j);
    return h;
}

// floor(p * 2^64) for rational p in [0,1]; a draw u < threshold has probability p.
inline uint64_t bernoulli_threshold(const Rational& p) {
    if (p.sign() < 0 || p > Rational(1)) throw std::domain_error("probability outside [0,1]");
    BigInt scaled = (p.num().shifted_left(64)) / p.den();
    if (!(scaled < BigInt::pow2(64))) return ~uint64_t{0};
    uint64_t lo = static_cast<uint64_t>((scaled % BigInt::pow2(32)).to_int64());
    uint64_t hi = static_cast<uint64_t>((scaled.shifted_right(32) % BigInt::pow2(32)).to_int64());
    return (hi << 32) | lo;
}

}  // namespace detail

// Deterministic total source of the signs w(n,j) in {-1,+1}: one provider
// defines one function f(x) = sum 2^-n w_n(x) phi(2^n x). sign(n,j) is the
// value of w_n on [j/2^n, (j+1)/2^n). Providers are immutable; concurrent
// reads are safe.
class SignProvider {
public:
    virtual ~SignProvider() = default;

    Sign sign(unsigned n, uint64_t j) const {
        if (n < 64 && j >= (uint64_t{1} << n))
            throw std::domain_error("sign cell index out of range");
        return sign_impl(n, j);
    }

    virtual std::string serialize() const = 0;

protected:
    virtual Sign sign_impl(unsigned n, uint64_t j) const = 0;
};

using ProviderPtr = std::shared_ptr<const SignProvider>;

class AllPlusProvider final : public SignProvider {
public:
    std::string serialize() const override { return "all-plus\n"; }

protected:
    Sign sign_impl(unsigned, uint64_t) const override { return 1; }
};

// w_n = (-1)^n, constant per level (the alternating Takagi function).
class AlternatingProvider final : public SignProvider {
public:
    std::string serialize() const override { return "alternating\n"; }

protected:
    Sign sign_impl(unsigned n, uint64_t) const override { return (n % 2 == 0) ? 1 : -1; }
};

// w_n(x) = r_n(x) = (-1)^floor(2^n x): the Gray Takagi function.
class RademacherProvider final : public SignProvider {
public:
    std::string serialize() const override { return "rademacher\n"; }

protected:
    Sign sign_impl(unsigned, uint64_t j) const override { return (j & 1) ? -1 : 1; }
};

// w_n(x) = r_1(x) r_2(x) ... r_n(x) (Kawamura's T^3).
class RademacherProductProvider final : public SignProvider {
public:
    std::string serialize() const override { return "rademacher-product\n"; }

protected:
    Sign sign_impl(unsigned n, uint64_t j) const override {
        // r_k on cell (n,j) is (-1)^floor(j / 2^(n-k)); the product over
        // k = 1..n telescopes into the parity of j + j/2 + ... + j/2^(n-1).
        uint64_t acc = 0;
        for (unsigned i = 0; i < n; ++i) acc ^= (j >> i);
        return (acc & 1) ? -1 : 1;
    }
};

// Level-constant signs from a finite table, default below it: the class T_c.
class ConstantLevelsProvider final : public SignProvider {
public:
    explicit ConstantLevelsProvider(std::vector<Sign> levels, Sign dflt = 1)
        : levels_(std::move(levels)), default_(dflt) {
        for (Sign s : levels_)
            if (s != 1 && s != -1) throw std::domain_error("sign must be +1 or -1");
    }

    std::string serialize() const override {
        std::string out = "constant-levels ";
        for (Sign s : levels_) out += (s > 0 ? '+' : '-');
        out += " default=";
        out += (default_ > 0 ? '+' : '-');
        out += '\n';
        return out;
    }

    const std::vector<Sign>& levels() const { return levels_; }

protected:
    Sign sign_impl(unsigned n, uint64_t) const override {
        return n < levels_.size() ? levels_[n] : default_;
    }

private:
    std::vector<Sign> levels_;
    Sign default_;
};

// Explicit per-cell signs to a finite depth, bit-packed one row per level;
// cells beyond the stored depth fall back to a constant default.
class ExplicitTreeProvider final : public SignProvider {
public:
    explicit ExplicitTreeProvider(unsigned depth, Sign dflt = 1)
        : depth_(depth), default_(dflt) {
        rows_.resize(depth_);
        for (unsigned n = 0; n < depth_; ++n)
            rows_[n].assign(((uint64_t{1} << n) + 63) / 64, dflt > 0 ? ~uint64_t{0} : 0);
    }

    unsigned stored_depth() const { return depth_; }

    void set(unsigned n, uint64_t j, Sign s) {
        if (n >= depth_ || j >= (uint64_t{1} << n))
            throw std::domain_error("explicit tree: cell out of stored range");
        uint64_t mask = uint64_t{1} << (j % 64);
        if (s > 0) rows_[n][j / 64] |= mask;
        else rows_[n][j / 64] &= ~mask;
    }

    std::string serialize() const override {
        std::string out = "explicit-tree default=";
        out += (default_ > 0 ? '+' : '-');
        out += '\n';
        for (unsigned n = 0; n < depth_; ++n) {
            for (uint64_t j = 0; j < (uint64_t{1} << n); ++j)
                out += sign_impl(n, j) > 0 ? '+' : '-';
            out += '\n';
        }
        return out;
    }

protected:
    Sign sign_impl(unsigned n, uint64_t j) const override {
        if (n >= depth_) return default_;
        return (rows_[n][j / 64] >> (j % 64)) & 1 ? 1 : -1;
    }

private:
    unsigned depth_;
    Sign default_;
    std::vector<std::vector<uint64_t>> rows_;
};

// Model 1: i.i.d. level signs w_n with P(w_n = 1) = p; the cell index is
// ignored. Pure function of (seed, n).
class SeededModel1Provider final : public SignProvider {
public:
    SeededModel1Provider(uint64_t seed, Rational p)
        : seed_(seed), p_(std::move(p)), threshold_(detail::bernoulli_threshold(p_)) {}

    uint64_t seed() const { return seed_; }
    const Rational& p() const { return p_; }

    std::string serialize() const override {
        return "model1 seed=" + std::to_string(seed_) + " p=" + p_.to_string() + "\n";
    }

protected:
    Sign sign_impl(unsigned n, uint64_t) const override {
        return detail::counter_hash(seed_, n, 0) < threshold_ ? 1 : -1;
    }

private:
    uint64_t seed_;
    Rational p_;
    uint64_t threshold_;
};

// Model 2: i.i.d. cell signs w_{n,j} with P(w_{n,j} = 1) = p.
class SeededModel2Provider final : public SignProvider {
public:
    SeededModel2Provider(uint64_t seed, Rational p)
        : seed_(seed), p_(std::move(p)), threshold_(detail::bernoulli_threshold(p_)) {}

    uint64_t seed() const { return seed_; }
    const Rational& p() const { return p_; }

    std::string serialize() const override {
        return "model2 seed=" + std::to_string(seed_) + " p=" + p_.to_string() + "\n";
    }

protected:
    Sign sign_impl(unsigned n, uint64_t j) const override {
        return detail::counter_hash(seed_, n, j + 1) < threshold_ ? 1 : -1;
    }

private:
    uint64_t seed_;
    Rational p_;
    uint64_t threshold_;
};

// Signs of g(x) = prefix * sum_{k<m} 2^-k phi(2^k x) + 2^-m f(2^m x) for a
// 1-periodic f: levels below m are the constant prefix sign, level m+n cell j
// reads f's sign at (n, j mod 2^n).
class LineLiftProvider final : public SignProvider {
public:
    LineLiftProvider(ProviderPtr inner, unsigned m, Sign prefix)
        : inner_(std::move(inner)), m_(m), prefix_(prefix) {}

    std::string serialize() const override {
        std::string out = "line-lift m=" + std::to_string(m_) + " prefix=";
        out += (prefix_ > 0 ? '+' : '-');
        out += '\n';
        out += inner_->serialize();
        return out;
    }

    const ProviderPtr& inner() const { return inner_; }
    unsigned shift() const { return m_; }

protected:
    Sign sign_impl(unsigned n, uint64_t j) const override {
        if (n < m_) return prefix_;
        unsigned inner_n = n - m_;
        uint64_t mask = inner_n >= 64 ? ~uint64_t{0} : (uint64_t{1} << inner_n) - 1;
        return inner_->sign(inner_n, j & mask);
    }

private:
    ProviderPtr inner_;
    unsigned m_;
    Sign prefix_;
};

// Negates every sign of the wrapped provider (the function -f).
class NegatedProvider final : public SignProvider {
public:
    explicit NegatedProvider(ProviderPtr inner) : inner_(std::move(inner)) {}

    std::string serialize() const override { return "negate\n" + inner_->serialize(); }

protected:
    Sign sign_impl(unsigned n, uint64_t j) const override { return -inner_->sign(n, j); }

private:
    ProviderPtr inner_;
};

namespace detail {

inline std::vector<Sign> parse_sign_run(const std::string& s) {
    std::vector<Sign> out;
    for (char c : s) {
        if (c == '+') out.push_back(1);
        else if (c == '-') out.push_back(-1);
        else throw std::invalid_argument("sign run: expected '+' or '-'");
    }
    return out;
}

inline std::string get_kv(const std::string& tok, const std::string& key) {
    if (tok.rfind(key + "=", 0) != 0)
        throw std::invalid_argument("provider: expected " + key + "=...");
    return tok.substr(key.size() + 1);
}

inline ProviderPtr parse_provider_lines(std::istream& in) {
    std::string line;
    do {
        if (!std::getline(in, line)) throw std::invalid_argument("provider: empty spec");
    } while (line.empty() || line[0] == '#');

    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (kind == "all-plus") return std::make_shared<AllPlusProvider>();
    if (kind == "alternating") return std::make_shared<AlternatingProvider>();
    if (kind == "rademacher" || kind == "gray") return std::make_shared<RademacherProvider>();
    if (kind == "rademacher-product") return std::make_shared<RademacherProductProvider>();
    if (kind == "constant-levels") {
        std::string run, dflt = "default=+";
        ls >> run;
        if (!(ls >> dflt)) dflt = "default=+";
        return std::make_shared<ConstantLevelsProvider>(
            parse_sign_run(run), get_kv(dflt, "default") == "+" ? 1 : -1);
    }
    if (kind == "model1" || kind == "model2") {
        std::string seed_tok, p_tok;
        ls >> seed_tok >> p_tok;
        uint64_t seed = std::stoull(get_kv(seed_tok, "seed"));
        Rational p = Rational::parse(get_kv(p_tok, "p"));
        if (kind == "model1") return std::make_shared<SeededModel1Provider>(seed, p);
        return std::make_shared<SeededModel2Provider>(seed, p);
    }
    if (kind == "explicit-tree") {
        std::string dflt_tok;
        ls >> dflt_tok;
        Sign dflt = get_kv(dflt_tok, "default") == "+" ? 1 : -1;
        std::vector<std::vector<Sign>> rows;
        std::string row;
        std::streampos before = in.tellg();
        while (std::getline(in, row)) {
            if (row.empty() || (row[0] != '+' && row[0] != '-')) { in.seekg(before); break; }
            auto signs = parse_sign_run(row);
            if (signs.size() != (uint64_t{1} << rows.size()))
                throw std::invalid_argument("explicit-tree: row length must double per level");
            rows.push_back(std::move(signs));
            before = in.tellg();
        }
        auto tree = std::make_shared<ExplicitTreeProvider>(static_cast<unsigned>(rows.size()), dflt);
        for (unsigned n = 0; n < rows.size(); ++n)
            for (uint64_t j = 0; j < rows[n].size(); ++j) tree->set(n, j, rows[n][j]);
        return tree;
    }
    if (kind == "line-lift") {
        std::string m_tok, prefix_tok;
        ls >> m_tok >> prefix_tok;
        unsigned m = static_cast<unsigned>(std::stoul(get_kv(m_tok, "m")));
        Sign prefix = get_kv(prefix_tok, "prefix") == "+" ? 1 : -1;
        return std::make_shared<LineLiftProvider>(parse_provider_lines(in), m, prefix);
    }
    if (kind == "negate") return std::make_shared<NegatedProvider>(parse_provider_lines(in));
    throw std::invalid_argument("unknown provider kind: " + kind);
}

}  // namespace detail

inline ProviderPtr parse_provider(const std::string& text) {
    std::istringstream in(text);
    return detail::parse_provider_lines(in);
}

inline ProviderPtr negate_provider(ProviderPtr p) {
    return std::make_shared<NegatedProvider>(std::move(p));
}

}  // namespace takagi

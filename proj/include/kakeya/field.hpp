#pragma once

// Prime-field scalars and the ambient space Z = F_p^d in which configurations
// live. Elements of Z are packed into a single integer (base-p digits) so that
// they hash and sort cheaply.

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "kakeya/errors.hpp"

namespace kakeya {

inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (std::uint64_t f = 3; f * f <= n; f += 2)
        if (n % f == 0) return false;
    return true;
}

/// Largest modulus accepted; keeps every product below 2^62.
inline constexpr std::uint64_t kMaxModulus = (1ULL << 31) - 1;

class FieldElem {
public:
    FieldElem() = default;
    FieldElem(std::int64_t value, std::uint64_t modulus) : modulus_(modulus) {
        if (modulus < 2 || modulus > kMaxModulus)
            throw InvalidInput("field modulus out of range: " + std::to_string(modulus));
        const auto m = static_cast<std::int64_t>(modulus);
        std::int64_t v = value % m;
        if (v < 0) v += m;
        value_ = static_cast<std::uint64_t>(v);
    }

    std::uint64_t value() const noexcept { return value_; }
    std::uint64_t modulus() const noexcept { return modulus_; }
    bool is_zero() const noexcept { return value_ == 0; }

    FieldElem operator+(const FieldElem& o) const {
        check(o);
        return raw((value_ + o.value_) % modulus_);
    }
    FieldElem operator-(const FieldElem& o) const {
        check(o);
        return raw((value_ + modulus_ - o.value_) % modulus_);
    }
    FieldElem operator*(const FieldElem& o) const {
        check(o);
        return raw((value_ * o.value_) % modulus_);
    }
    FieldElem operator/(const FieldElem& o) const { return *this * o.inverse(); }
    FieldElem operator-() const { return raw((modulus_ - value_) % modulus_); }

    FieldElem inverse() const {
        if (value_ == 0) throw InvalidInput("inverse of zero in F_" + std::to_string(modulus_));
        // extended Euclid on (value, modulus)
        std::int64_t t = 0, new_t = 1;
        auto r = static_cast<std::int64_t>(modulus_), new_r = static_cast<std::int64_t>(value_);
        while (new_r != 0) {
            const std::int64_t q = r / new_r;
            t = t - q * new_t;
            std::swap(t, new_t);
            r = r - q * new_r;
            std::swap(r, new_r);
        }
        return FieldElem(t, modulus_);
    }

    FieldElem pow(std::uint64_t e) const {
        FieldElem out = raw(1 % modulus_);
        FieldElem b = *this;
        while (e) {
            if (e & 1U) out = out * b;
            b = b * b;
            e >>= 1U;
        }
        return out;
    }

    bool operator==(const FieldElem& o) const noexcept {
        return value_ == o.value_ && modulus_ == o.modulus_;
    }
    std::strong_ordering operator<=>(const FieldElem& o) const noexcept {
        if (auto c = modulus_ <=> o.modulus_; c != 0) return c;
        return value_ <=> o.value_;
    }

private:
    FieldElem raw(std::uint64_t v) const {
        FieldElem f;
        f.value_ = v;
        f.modulus_ = modulus_;
        return f;
    }
    void check(const FieldElem& o) const {
        if (modulus_ != o.modulus_) throw ModulusMismatch(modulus_, o.modulus_);
    }

    std::uint64_t value_ = 0;
    std::uint64_t modulus_ = 0;
};

inline std::string to_string(const FieldElem& x) { return std::to_string(x.value()); }

/// An element of Z = F_p^d, packed as sum digit_i * p^i.
struct ZElem {
    std::uint64_t code = 0;
    auto operator<=>(const ZElem&) const = default;
};

/// A point (a, b) of Z x Z.
struct Point {
    ZElem a;
    ZElem b;
    auto operator<=>(const Point&) const = default;
};

/// The ambient vector space F_p^d. p must be an odd prime.
class Space {
public:
    Space() = default;
    Space(std::uint64_t p, unsigned d = 1) : p_(p), d_(d) {
        if (!is_prime(p)) throw InvalidInput("modulus " + std::to_string(p) + " is not prime");
        if (p == 2) throw InvalidInput("characteristic 2 is not supported (-1 = 1)");
        if (p > kMaxModulus) throw InvalidInput("modulus too large");
        if (d == 0) throw InvalidInput("dimension must be at least 1");
        size_ = 1;
        for (unsigned i = 0; i < d; ++i) {
            if (size_ > (1ULL << 62) / p) throw InvalidInput("p^d too large");
            size_ *= p;
        }
    }

    std::uint64_t p() const noexcept { return p_; }
    unsigned d() const noexcept { return d_; }
    /// Number of elements of Z.
    std::uint64_t size() const noexcept { return size_; }

    FieldElem scalar(std::int64_t v) const { return FieldElem(v, p_); }

    ZElem make(const std::vector<std::int64_t>& digits) const {
        if (digits.size() != d_) throw InvalidInput("vector length does not match dimension");
        std::uint64_t code = 0;
        for (unsigned i = d_; i-- > 0;) code = code * p_ + FieldElem(digits[i], p_).value();
        return ZElem{code};
    }
    ZElem make(std::int64_t v) const {
        if (d_ != 1) throw InvalidInput("scalar element requires d = 1");
        return ZElem{FieldElem(v, p_).value()};
    }
    std::vector<std::int64_t> digits(ZElem x) const {
        std::vector<std::int64_t> out(d_);
        for (unsigned i = 0; i < d_; ++i) {
            out[i] = static_cast<std::int64_t>(x.code % p_);
            x.code /= p_;
        }
        return out;
    }
    bool contains(ZElem x) const noexcept { return x.code < size_; }

    ZElem add(ZElem x, ZElem y) const {
        if (d_ == 1) return ZElem{(x.code + y.code) % p_};
        return combine(x, y, 1, 1);
    }
    ZElem sub(ZElem x, ZElem y) const {
        if (d_ == 1) return ZElem{(x.code + p_ - y.code) % p_};
        return combine(x, y, 1, p_ - 1);
    }
    /// c*x + e*y with scalar coefficients given as residues.
    ZElem axpby(const FieldElem& c, ZElem x, const FieldElem& e, ZElem y) const {
        check(c);
        check(e);
        if (d_ == 1) return ZElem{(c.value() * x.code + e.value() * y.code) % p_};
        return combine(x, y, c.value(), e.value());
    }
    ZElem scale(const FieldElem& c, ZElem x) const { return axpby(c, x, scalar(0), ZElem{}); }

    bool operator==(const Space&) const = default;

private:
    void check(const FieldElem& c) const {
        if (c.modulus() != p_) throw ModulusMismatch(c.modulus(), p_);
    }
    ZElem combine(ZElem x, ZElem y, std::uint64_t cx, std::uint64_t cy) const {
        std::uint64_t out = 0, place = 1;
        for (unsigned i = 0; i < d_; ++i) {
            const std::uint64_t dx = x.code % p_, dy = y.code % p_;
            x.code /= p_;
            y.code /= p_;
            out += ((cx * dx + cy * dy) % p_) * place;
            place *= p_;
        }
        return ZElem{out};
    }

    std::uint64_t p_ = 3;
    unsigned d_ = 1;
    std::uint64_t size_ = 3;
};

}  // namespace kakeya

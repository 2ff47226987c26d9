#pragma once

// Exact integer and rational arithmetic shared by every farey_lab module.
//
// Hot loops run on int64_t with overflow-checked operations. Anything that
// can grow without bound (continuants, polygon coordinates, long sums) goes
// through GMP.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace farey_lab {

using BigInt = mpz_class;
using Rat = mpq_class;

/// Raised when a caller hands in data that breaks an operation's
/// precondition about Farey structure (e.g. a non-unimodular pair).
class contract_violation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline std::optional<std::int64_t> checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
    return r;
}

inline std::optional<std::int64_t> checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
    return r;
}

inline std::optional<std::int64_t> checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
    return r;
}

inline BigInt to_big(std::int64_t v) {
    // mpz_class has no int64_t constructor on every platform; go through
    // long which is 64-bit on LP64.
    static_assert(sizeof(long) == sizeof(std::int64_t));
    return BigInt(static_cast<long>(v));
}

inline BigInt to_big(std::uint64_t v) {
    static_assert(sizeof(unsigned long) == sizeof(std::uint64_t));
    return BigInt(static_cast<unsigned long>(v));
}

/// a*d - b*c, exact. Falls back to GMP when the 64-bit path overflows.
inline BigInt cross(std::int64_t a, std::int64_t d, std::int64_t b, std::int64_t c) {
    auto ad = checked_mul(a, d);
    auto bc = checked_mul(b, c);
    if (ad && bc) {
        if (auto r = checked_sub(*ad, *bc)) return to_big(*r);
    }
    return to_big(a) * to_big(d) - to_big(b) * to_big(c);
}

/// Exact integer accumulator: int64 fast path that spills into a GMP
/// integer whenever the running value would overflow.
class ExactSum {
public:
    void add(std::int64_t v) {
        if (auto r = checked_add(fast_, v)) {
            fast_ = *r;
            return;
        }
        slow_ += to_big(fast_);
        fast_ = v;
        spilled_ = true;
    }

    void add(const BigInt& v) {
        if (v.fits_slong_p()) {
            add(static_cast<std::int64_t>(v.get_si()));
            return;
        }
        slow_ += v;
        spilled_ = true;
    }

    void merge(const ExactSum& other) {
        add(other.fast_);
        if (other.spilled_) {
            slow_ += other.slow_;
            spilled_ = true;
        }
    }

    [[nodiscard]] BigInt value() const { return slow_ + to_big(fast_); }
    [[nodiscard]] bool spilled() const { return spilled_; }

private:
    std::int64_t fast_ = 0;
    BigInt slow_ = 0;
    bool spilled_ = false;
};

inline std::int64_t to_int64(const BigInt& v) {
    if (!v.fits_slong_p()) throw std::overflow_error("value does not fit in 64 bits: " + v.get_str());
    return static_cast<std::int64_t>(v.get_si());
}

/// floor(r) for an exact rational.
inline BigInt floor_rat(const Rat& r) {
    BigInt q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline BigInt ceil_rat(const Rat& r) {
    BigInt q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return q;
}

inline Rat make_rat(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::domain_error("zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat make_rat(std::int64_t num, std::int64_t den) { return make_rat(to_big(num), to_big(den)); }

/// Parses "p/q" or "p" into a canonical rational.
inline Rat parse_rat(const std::string& text) {
    Rat r;
    if (r.set_str(text, 10) != 0) throw std::invalid_argument("not a rational: '" + text + "'");
    if (r.get_den() == 0) throw std::domain_error("zero denominator: '" + text + "'");
    r.canonicalize();
    return r;
}

/// Always "p/q" (denominator 1 included) so CSV cells have one shape.
inline std::string rat_text(const Rat& r) { return r.get_num().get_str() + "/" + r.get_den().get_str(); }

inline double rat_to_double(const Rat& r) { return r.get_d(); }

}  // namespace farey_lab

#pragma once

// Streaming enumeration of the Farey sequence F_Q and its k-indices.
//
// Indexing follows the periodic extension: gamma_0 = 0/1, gamma_1 = 1/Q,
// ..., gamma_N = 1/1 with N = N(Q), and gamma_{i+N} = gamma_i + 1. The
// next-term recurrence continues past 1/1 into the extension on its own
// (2/3, 1/1 -> 4/3 for Q = 3), so windows that wrap need no special case.

#include "farey_lab/exact.hpp"
#include "farey_lab/parallel.hpp"

#include <compare>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace farey_lab {

struct FareyFraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    friend bool operator==(const FareyFraction&, const FareyFraction&) = default;

    friend std::strong_ordering operator<=>(const FareyFraction& a, const FareyFraction& b) {
        const __int128 lhs = static_cast<__int128>(a.num) * b.den;
        const __int128 rhs = static_cast<__int128>(b.num) * a.den;
        return lhs <=> rhs;
    }

    [[nodiscard]] Rat value() const { return make_rat(num, den); }
    [[nodiscard]] std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

    friend std::ostream& operator<<(std::ostream& os, const FareyFraction& f) { return os << f.str(); }
};

/// Checked constructor: reduced, non-negative numerator, positive denominator.
inline FareyFraction make_fraction(std::int64_t num, std::int64_t den) {
    if (den < 1) throw std::domain_error("Farey fraction needs a positive denominator");
    if (num < 0) throw std::domain_error("Farey fraction needs a non-negative numerator");
    if (std::gcd(num, den) != 1) throw std::domain_error("Farey fraction must be reduced: " + std::to_string(num) + "/" + std::to_string(den));
    return {num, den};
}

/// p_b q_a - p_a q_b for a < b; equals 1 exactly when a, b are Farey neighbours.
inline BigInt farey_det(const FareyFraction& a, const FareyFraction& b) { return cross(b.num, a.den, a.num, b.den); }

inline bool is_unimodular(const FareyFraction& a, const FareyFraction& b) { return farey_det(a, b) == 1; }

// ---------------------------------------------------------------------------
// N(Q)

/// Euler phi for 1..limit by a linear sieve (each composite struck once).
inline std::vector<std::uint32_t> totient_table(std::uint32_t limit) {
    std::vector<std::uint32_t> phi(static_cast<std::size_t>(limit) + 1, 0);
    std::vector<std::uint32_t> primes;
    if (limit >= 1) phi[1] = 1;
    for (std::uint32_t i = 2; i <= limit; ++i) {
        if (phi[i] == 0) {
            phi[i] = i - 1;
            primes.push_back(i);
        }
        for (std::uint32_t p : primes) {
            const std::uint64_t m = static_cast<std::uint64_t>(i) * p;
            if (m > limit) break;
            if (i % p == 0) {
                phi[m] = phi[i] * p;
                break;
            }
            phi[m] = phi[i] * (p - 1);
        }
    }
    return phi;
}

inline std::uint64_t count_farey_sieve(std::uint64_t order) {
    if (order == 0) throw std::domain_error("Farey order must be >= 1");
    if (order > 0xFFFFFFFFull) throw std::domain_error("sieve path limited to 32-bit orders");
    const auto phi = totient_table(static_cast<std::uint32_t>(order));
    std::uint64_t total = 0;
    for (std::size_t q = 1; q < phi.size(); ++q) total += phi[q];
    return total;
}

/// Sum of phi(q) for q <= order via Phi(n) = n(n+1)/2 - sum_{d>=2} Phi(n/d),
/// grouped over equal quotients, with a sieved table below ~order^(2/3).
/// Memory is O(order^(2/3)) instead of O(order).
inline std::uint64_t count_farey_sublinear(std::uint64_t order) {
    if (order == 0) throw std::domain_error("Farey order must be >= 1");
    if (order > 0xFFFFFFFFull) throw std::domain_error("order must fit in 32 bits");
    std::uint64_t small = 1;
    while (small * small * small < order * order) ++small;
    small = std::max<std::uint64_t>(small, 16);
    small = std::min(small, order);
    const auto phi = totient_table(static_cast<std::uint32_t>(small));
    std::vector<std::uint64_t> prefix(phi.size(), 0);
    for (std::size_t i = 1; i < phi.size(); ++i) prefix[i] = prefix[i - 1] + phi[i];

    std::unordered_map<std::uint64_t, std::uint64_t> memo;
    auto phi_sum = [&](auto&& self, std::uint64_t n) -> std::uint64_t {
        if (n <= small) return prefix[n];
        if (auto it = memo.find(n); it != memo.end()) return it->second;
        std::uint64_t result = n * (n + 1) / 2;
        for (std::uint64_t d = 2; d <= n;) {
            const std::uint64_t quotient = n / d;
            const std::uint64_t last = n / quotient;
            result -= (last - d + 1) * self(self, quotient);
            d = last + 1;
        }
        memo.emplace(n, result);
        return result;
    };
    return phi_sum(phi_sum, order);
}

inline constexpr std::uint64_t kSieveOrderLimit = 20'000'000;

/// N(Q) = sum_{q=1..Q} phi(q), exactly.
inline std::uint64_t count_farey(std::uint64_t order) {
    if (order == 0) throw std::domain_error("Farey order must be >= 1");
    return order <= kSieveOrderLimit ? count_farey_sieve(order) : count_farey_sublinear(order);
}

struct FareyContext {
    std::int64_t order = 1;
    std::uint64_t count = 1;

    static FareyContext of(std::int64_t order) {
        if (order < 1) throw std::domain_error("Farey order must be >= 1");
        return {order, count_farey(static_cast<std::uint64_t>(order))};
    }
};

// ---------------------------------------------------------------------------
// Successor, stream, seek

inline void require_order(std::int64_t order) {
    if (order < 1) throw std::domain_error("Farey order must be >= 1");
}

inline void require_neighbours(const FareyFraction& prev, const FareyFraction& cur, std::int64_t order) {
    if (prev.den < 1 || cur.den < 1 || prev.den > order || cur.den > order)
        throw contract_violation("denominators must lie in [1, Q]: " + prev.str() + ", " + cur.str());
    if (!is_unimodular(prev, cur) || prev.den + cur.den <= order)
        throw contract_violation("not consecutive Farey fractions: " + prev.str() + ", " + cur.str());
}

/// floor((Q + q_{i-1}) / q_i): the index nu_2(gamma_i) of the middle term.
inline std::int64_t nu2_floor(const FareyFraction& prev, const FareyFraction& cur, std::int64_t order) {
    require_order(order);
    require_neighbours(prev, cur, order);
    return (order + prev.den) / cur.den;
}

inline FareyFraction farey_next(const FareyFraction& prev, const FareyFraction& cur, std::int64_t order) {
    const std::int64_t t = nu2_floor(prev, cur, order);
    const auto scaled = checked_mul(t, cur.num);
    const auto num = scaled ? checked_sub(*scaled, prev.num) : std::nullopt;
    if (!num) throw std::overflow_error("numerator overflow in periodic extension");
    return {*num, t * cur.den - prev.den};
}

/// Unbounded walk along the periodic extension of F_Q starting at a
/// consecutive pair. current() is gamma_i, previous() is gamma_{i-1}.
class FareyWalker {
public:
    FareyWalker(std::int64_t order, FareyFraction prev, FareyFraction cur) : order_(order), prev_(prev), cur_(cur) {
        require_order(order);
        require_neighbours(prev, cur, order);
    }

    /// Starts at (gamma_0, gamma_1) = (0/1, 1/Q).
    explicit FareyWalker(std::int64_t order) : FareyWalker(order, {0, 1}, {1, order}) {}

    [[nodiscard]] const FareyFraction& previous() const { return prev_; }
    [[nodiscard]] const FareyFraction& current() const { return cur_; }
    [[nodiscard]] std::int64_t order() const { return order_; }

    /// nu_2 of current().
    [[nodiscard]] std::int64_t index() const { return (order_ + prev_.den) / cur_.den; }

    void advance() {
        const std::int64_t t = index();
        FareyFraction next{t * cur_.num - prev_.num, t * cur_.den - prev_.den};
        prev_ = cur_;
        cur_ = next;
    }

private:
    std::int64_t order_;
    FareyFraction prev_;
    FareyFraction cur_;
};

/// Range over one period gamma_1 .. gamma_{N(Q)} (or, when seeded, from the
/// seed's second element up to and including 1/1).
class FareyStream {
public:
    class iterator {
    public:
        using value_type = FareyFraction;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(FareyWalker walker) : walker_(std::move(walker)), done_(false) {}

        const FareyFraction& operator*() const { return walker_.current(); }
        iterator& operator++() {
            if (walker_.current().num >= walker_.current().den) {
                done_ = true;
            } else {
                walker_.advance();
            }
            return *this;
        }
        void operator++(int) { ++*this; }
        friend bool operator==(const iterator& it, std::default_sentinel_t) { return it.done_; }

    private:
        FareyWalker walker_{1};
        bool done_ = true;
    };

    explicit FareyStream(std::int64_t order) : walker_(order) {}
    FareyStream(std::int64_t order, FareyFraction prev, FareyFraction cur) : walker_(order, prev, cur) {
        if (!(cur.num <= cur.den)) throw contract_violation("seed must lie in (0, 1]");
    }

    [[nodiscard]] iterator begin() const { return iterator(walker_); }
    [[nodiscard]] std::default_sentinel_t end() const { return {}; }

private:
    FareyWalker walker_;
};

inline std::vector<FareyFraction> farey_sequence(std::int64_t order) {
    std::vector<FareyFraction> out;
    for (const auto& f : FareyStream(order)) out.push_back(f);
    return out;
}

/// Consecutive pair (gamma_{i-1}, gamma_i) with gamma_{i-1} <= x < gamma_i,
/// found by Stern-Brocot descent with batched runs, O(log Q) steps.
inline std::pair<FareyFraction, FareyFraction> seek(const Rat& x, std::int64_t order) {
    require_order(order);
    if (x < 0 || x >= 1) throw std::domain_error("seek point must lie in [0, 1)");
    const BigInt r = x.get_num();
    const BigInt s = x.get_den();
    const BigInt limit = to_big(order);
    BigInt a = 0, b = 1;  // left  a/b <= x
    BigInt c = 1, d = 0;  // right c/d >  x
    while (true) {
        bool moved = false;
        // Left moves: a/b <- (a + k c)/(b + k d), staying <= x.
        {
            const BigInt room = r * b - s * a;
            const BigInt gap = s * c - r * d;
            BigInt k = room / gap;
            if (d > 0) k = std::min(k, BigInt((limit - b) / d));
            if (k > 0) {
                a += k * c;
                b += k * d;
                moved = true;
            }
        }
        // Right moves: c/d <- (c + k a)/(d + k b), staying > x.
        {
            const BigInt room = s * c - r * d;
            const BigInt gap = r * b - s * a;
            BigInt k = (limit - d) / b;
            if (gap > 0) k = std::min(k, BigInt((room - 1) / gap));
            if (k > 0) {
                c += k * a;
                d += k * b;
                moved = true;
            }
        }
        if (!moved) break;
    }
    return {FareyFraction{to_int64(a), to_int64(b)}, FareyFraction{to_int64(c), to_int64(d)}};
}

/// Smallest Farey fraction >= x, together with its predecessor.
inline std::pair<FareyFraction, FareyFraction> seek_at_or_after(const Rat& x, std::int64_t order) {
    auto [lo, hi] = seek(x, order);
    if (lo.value() == x) return {lo, hi};
    return {hi, farey_next(lo, hi, order)};
}

// ---------------------------------------------------------------------------
// k-indices

/// nu_k(gamma_i) = p_{i+k-1} q_{i-1} - p_{i-1} q_{i+k-1} with first = gamma_{i-1},
/// last = gamma_{i+k-1}.
inline std::int64_t nu_k(const FareyFraction& first, const FareyFraction& last) {
    if (!(first < last)) throw std::domain_error("nu_k needs first < last");
    return to_int64(farey_det(first, last));
}

/// a, b are consecutive denominators q_i, q_{i+1} of F_Q.
inline bool neighbor_criterion(std::int64_t a, std::int64_t b, std::int64_t order) {
    return a >= 1 && b >= 1 && a <= order && b <= order && std::gcd(a, b) == 1 && a + b > order;
}

/// nu_2(gamma_1) .. nu_2(gamma_N) for one period (test/verification sizes).
inline std::vector<std::int64_t> nu2_sequence(std::int64_t order) {
    std::vector<std::int64_t> out;
    FareyWalker w(order);
    const auto n = count_farey(static_cast<std::uint64_t>(order));
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        out.push_back(w.index());
        w.advance();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Chunked exact sums

/// Half-open slice of the period: terms i with gamma_{i-1} in [first, stop).
struct ChunkBounds {
    FareyFraction first_prev;  // gamma_{i-1} of the first owned term
    FareyFraction first_cur;   // gamma_i of the first owned term
    FareyFraction stop;        // first gamma_{i-1} NOT owned (1/1 for the last chunk)
};

/// Cut [0, 1) at c/chunks and align each cut to the Farey pair that starts there.
inline std::vector<ChunkBounds> plan_chunks(std::int64_t order, std::int64_t chunks) {
    require_order(order);
    if (chunks < 1) throw std::domain_error("chunk count must be >= 1");
    std::vector<std::pair<FareyFraction, FareyFraction>> starts;
    starts.reserve(static_cast<std::size_t>(chunks));
    for (std::int64_t c = 0; c < chunks; ++c) starts.push_back(seek_at_or_after(make_rat(c, chunks), order));
    std::vector<ChunkBounds> out;
    out.reserve(starts.size());
    for (std::size_t c = 0; c < starts.size(); ++c) {
        const FareyFraction stop = c + 1 < starts.size() ? starts[c + 1].first : FareyFraction{1, 1};
        out.push_back({starts[c].first, starts[c].second, stop});
    }
    return out;
}

namespace detail {

inline std::int64_t checked_nu(std::int64_t pl, std::int64_t qf, std::int64_t pf, std::int64_t ql) {
    std::int64_t a, b, r;
    if (__builtin_mul_overflow(pl, qf, &a) || __builtin_mul_overflow(pf, ql, &b) || __builtin_sub_overflow(a, b, &r))
        throw std::overflow_error("nu_k exceeds 64 bits");
    return r;
}

/// floor(num / den) for the successor step. The quotient is nu_2, which is
/// small on all but a vanishing fraction of terms, so a few subtractions beat
/// the latency of a hardware divide on the serial dependency chain.
inline std::int64_t quotient(std::int64_t num, std::int64_t den) {
    if (num < 4 * den) {
        std::int64_t t = 1;
        num -= den;
        while (num >= den) {
            num -= den;
            ++t;
        }
        return t;
    }
    return num / den;
}

/// Calls fn(nu_k(gamma_i)) for every term owned by one chunk; determinant
/// definition on a sliding window of k+1 fractions.
template <typename Fn>
void visit_chunk_nu_k(std::int64_t order, std::int64_t k, const ChunkBounds& chunk, Fn&& fn) {
    if (!(chunk.first_prev < chunk.stop)) return;
    std::size_t cap = 1;
    while (cap < static_cast<std::size_t>(k) + 1) cap <<= 1;
    const std::size_t mask = cap - 1;
    std::vector<std::int64_t> p(cap), q(cap);
    p[0] = chunk.first_prev.num;
    q[0] = chunk.first_prev.den;
    p[1 & mask] = chunk.first_cur.num;
    q[1 & mask] = chunk.first_cur.den;
    for (std::int64_t j = 2; j <= k; ++j) {
        const std::size_t a = static_cast<std::size_t>(j - 2) & mask, b = static_cast<std::size_t>(j - 1) & mask;
        const std::int64_t t = (order + q[a]) / q[b];
        p[static_cast<std::size_t>(j) & mask] = t * p[b] - p[a];
        q[static_cast<std::size_t>(j) & mask] = t * q[b] - q[a];
    }
    const std::int64_t stop_num = chunk.stop.num, stop_den = chunk.stop.den;
    std::size_t head = 0;  // slot of gamma_{i-1}
    while (true) {
        const std::size_t tail = (head + static_cast<std::size_t>(k)) & mask;
        fn(checked_nu(p[tail], q[head], p[head], q[tail]));
        const std::size_t before = (tail - 1) & mask;
        const std::size_t fresh = (tail + 1) & mask;
        const std::int64_t t = quotient(order + q[before], q[tail]);
        p[fresh] = t * p[tail] - p[before];
        q[fresh] = t * q[tail] - q[before];
        head = (head + 1) & mask;
        if (p[head] == stop_num && q[head] == stop_den) break;
    }
}

inline ExactSum chunk_sum_nu_k(std::int64_t order, std::int64_t k, const ChunkBounds& chunk) {
    ExactSum sum;
    visit_chunk_nu_k(order, k, chunk, [&](std::int64_t v) { sum.add(v); });
    return sum;
}

inline ExactSum chunk_correlation(std::int64_t order, std::int64_t lag, const ChunkBounds& chunk) {
    ExactSum sum;
    if (!(chunk.first_prev < chunk.stop)) return sum;
    FareyWalker lagging(order, chunk.first_prev, chunk.first_cur);
    FareyWalker leading = lagging;
    for (std::int64_t j = 0; j < lag; ++j) leading.advance();
    while (true) {
        std::int64_t term;
        if (__builtin_mul_overflow(lagging.index(), leading.index(), &term)) throw std::overflow_error("correlation term exceeds 64 bits");
        sum.add(term);
        lagging.advance();
        leading.advance();
        if (lagging.previous() == chunk.stop) break;
    }
    return sum;
}

}  // namespace detail

/// sum_{i=1..N(Q)} nu_k(gamma_i), exact and independent of the chunking.
inline BigInt sum_nu_k(std::int64_t order, std::int64_t k, std::int64_t chunks = 1, unsigned threads = 0) {
    require_order(order);
    if (k < 1) throw std::domain_error("k must be >= 1");
    const auto plan = plan_chunks(order, chunks);
    const auto parts = parallel_map(plan.size(), threads, [&](std::size_t c) { return detail::chunk_sum_nu_k(order, k, plan[c]); });
    ExactSum total;
    for (const auto& part : parts) total.merge(part);
    return total.value();
}

/// Serial visit of nu_k(gamma_1) .. nu_k(gamma_N) in order.
template <typename Fn>
void for_each_nu_k(std::int64_t order, std::int64_t k, Fn&& fn) {
    require_order(order);
    if (k < 1) throw std::domain_error("k must be >= 1");
    // One chunk covering the whole period: gamma_0 = 0/1 up to gamma_N = 1/1.
    const ChunkBounds whole{{0, 1}, {1, order}, {1, 1}};
    detail::visit_chunk_nu_k(order, k, whole, std::forward<Fn>(fn));
}

/// sum_{i=1..N(Q)} nu_2(gamma_i) nu_2(gamma_{i+h}); the lag is taken mod N(Q).
inline BigInt correlation_sum(std::int64_t order, std::int64_t h, std::int64_t chunks = 1, unsigned threads = 0) {
    require_order(order);
    if (h < 1) throw std::domain_error("lag h must be >= 1");
    const auto n = count_farey(static_cast<std::uint64_t>(order));
    const auto lag = static_cast<std::int64_t>(static_cast<std::uint64_t>(h) % n);
    const auto plan = plan_chunks(order, chunks);
    const auto parts = parallel_map(plan.size(), threads, [&](std::size_t c) { return detail::chunk_correlation(order, lag, plan[c]); });
    ExactSum total;
    for (const auto& part : parts) total.merge(part);
    return total.value();
}

}  // namespace farey_lab

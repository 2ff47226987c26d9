#pragma once

// Continuants K_n (convergent polynomials), their monomial expansion, the
// Kronecker symbol (n/2), and the signed continuant that expresses nu_k in
// terms of consecutive nu_2 values.

#include "farey_lab/exact.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <stdexcept>
#include <vector>

namespace farey_lab {

/// K_n by the recurrence K_n = x_n K_{n-1} + K_{n-2}, K_0 = 1, K_1 = x_1.
inline BigInt continuant_eval(std::span<const BigInt> args) {
    BigInt before = 0;   // K_{-1}
    BigInt current = 1;  // K_0
    for (const BigInt& x : args) {
        BigInt next = x * current + before;
        before = std::move(current);
        current = std::move(next);
    }
    return current;
}

inline BigInt continuant_eval(std::span<const std::int64_t> args) {
    std::vector<BigInt> big;
    big.reserve(args.size());
    for (auto v : args) big.push_back(to_big(v));
    return continuant_eval(std::span<const BigInt>(big));
}

/// One monomial of K_n: the 1-based variable positions it multiplies.
/// Empty means the constant term 1.
struct ContinuantMonomial {
    std::vector<int> indices;

    friend bool operator==(const ContinuantMonomial&, const ContinuantMonomial&) = default;

    [[nodiscard]] int degree() const { return static_cast<int>(indices.size()); }

    template <typename T>
    [[nodiscard]] BigInt evaluate(std::span<const T> args) const {
        BigInt product = 1;
        for (int j : indices) {
            if constexpr (std::is_same_v<T, BigInt>)
                product *= args[static_cast<std::size_t>(j - 1)];
            else
                product *= to_big(args[static_cast<std::size_t>(j - 1)]);
        }
        return product;
    }
};

/// Monomials of K_n, ordered by their indicator vectors (x_1 first) in
/// decreasing order: full product first, constant term last.
inline std::vector<ContinuantMonomial> continuant_monomials(int n) {
    if (n < 0) throw std::domain_error("continuant length must be >= 0");
    std::vector<std::vector<ContinuantMonomial>> table;
    table.push_back({ContinuantMonomial{}});
    table.push_back({ContinuantMonomial{{1}}});
    for (int m = 2; m <= n; ++m) {
        std::vector<ContinuantMonomial> level;
        for (const auto& mono : table[static_cast<std::size_t>(m - 1)]) {
            auto extended = mono;
            extended.indices.push_back(m);
            level.push_back(std::move(extended));
        }
        for (const auto& mono : table[static_cast<std::size_t>(m - 2)]) level.push_back(mono);
        table.push_back(std::move(level));
    }
    auto result = table[static_cast<std::size_t>(n)];
    auto indicator = [n](const ContinuantMonomial& m) {
        std::vector<char> bits(static_cast<std::size_t>(n), 0);
        for (int j : m.indices) bits[static_cast<std::size_t>(j - 1)] = 1;
        return bits;
    };
    std::sort(result.begin(), result.end(), [&](const auto& a, const auto& b) { return indicator(a) > indicator(b); });
    return result;
}

/// Number of monomials of K_n: 1, 1, 2, 3, 5, ... (Fibonacci with seeds 1, 1).
inline BigInt continuant_monomial_count(int n) {
    if (n < 0) throw std::domain_error("continuant length must be >= 0");
    BigInt a = 1, b = 1;
    for (int i = 1; i < n; ++i) {
        BigInt c = a + b;
        a = std::move(b);
        b = std::move(c);
    }
    return b;
}

/// Kronecker symbol (n/2).
constexpr int kronecker2(std::int64_t n) {
    if (n % 2 == 0) return 0;
    const std::int64_t r = ((n % 8) + 8) % 8;
    return (r == 1 || r == 7) ? 1 : -1;
}

/// ((2k-1)/2) K_{k-1}(-v_1, v_2, ..., (-1)^{k-1} v_{k-1}) in structured form.
struct SignedContinuantExpr {
    int k = 1;
    int sign_prefactor = 1;           // ((2k-1)/2)
    std::vector<int> argument_signs;  // (-1)^j for j = 1..k-1

    static SignedContinuantExpr for_k(int k) {
        if (k < 1) throw std::domain_error("k must be >= 1");
        SignedContinuantExpr e;
        e.k = k;
        e.sign_prefactor = kronecker2(2 * static_cast<std::int64_t>(k) - 1);
        for (int j = 1; j <= k - 1; ++j) e.argument_signs.push_back(j % 2 == 0 ? 1 : -1);
        return e;
    }

    template <typename T>
    [[nodiscard]] BigInt evaluate(std::span<const T> nu2_values) const {
        if (nu2_values.size() != argument_signs.size())
            throw std::domain_error("signed continuant for k=" + std::to_string(k) + " takes " + std::to_string(argument_signs.size()) + " values");
        std::vector<BigInt> args;
        args.reserve(nu2_values.size());
        for (std::size_t j = 0; j < nu2_values.size(); ++j) {
            if constexpr (std::is_same_v<T, BigInt>)
                args.push_back(argument_signs[j] * nu2_values[j]);
            else
                args.push_back(argument_signs[j] * to_big(nu2_values[j]));
        }
        return sign_prefactor * continuant_eval(std::span<const BigInt>(args));
    }

    /// Sign this expression gives the monomial x_{j_1}...x_{j_n} of K_{k-1}.
    [[nodiscard]] int monomial_sign(const ContinuantMonomial& m) const {
        int sign = sign_prefactor;
        for (int j : m.indices) sign *= argument_signs[static_cast<std::size_t>(j - 1)];
        return sign;
    }
};

template <typename T>
inline BigInt theorem1_rhs(int k, std::span<const T> nu2_values) {
    return SignedContinuantExpr::for_k(k).evaluate(nu2_values);
}

inline BigInt theorem1_rhs(int k, const std::vector<std::int64_t>& nu2_values) {
    return theorem1_rhs(k, std::span<const std::int64_t>(nu2_values));
}

}  // namespace farey_lab

#pragma once

// Exhaustive checks of the k-index identities over full periods of F_Q.
// Every verifier recomputes nu_k from the determinant definition and
// compares it with one other route; nothing here reuses the route it checks.

#include "farey_lab/continuant.hpp"
#include "farey_lab/exact.hpp"
#include "farey_lab/farey_core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace farey_lab {

struct VerificationFailure {
    std::int64_t index = 0;  // i, 1-based within the period
    std::int64_t k = 0;
    std::string expected;
    std::string got;
};

struct VerificationReport {
    static constexpr std::size_t kMaxStoredFailures = 100;

    std::string identity_name;
    std::int64_t order = 0;
    std::int64_t k_min = 0;
    std::int64_t k_max = 0;
    std::uint64_t checked = 0;
    std::uint64_t failure_count = 0;
    std::vector<VerificationFailure> failures;

    [[nodiscard]] bool pass() const { return failure_count == 0; }

    void record(std::int64_t index, std::int64_t k, const BigInt& expected, const BigInt& got) {
        ++checked;
        if (expected == got) return;
        ++failure_count;
        if (failures.size() < kMaxStoredFailures) failures.push_back({index, k, expected.get_str(), got.get_str()});
    }

    void merge(const VerificationReport& other) {
        checked += other.checked;
        failure_count += other.failure_count;
        for (const auto& f : other.failures) {
            if (failures.size() >= kMaxStoredFailures) break;
            failures.push_back(f);
        }
    }
};

/// gamma_0 .. gamma_{N + extra} of the periodic extension, materialized.
class FareyPeriod {
public:
    FareyPeriod(std::int64_t order, std::int64_t extra) : order_(order), count_(count_farey(static_cast<std::uint64_t>(order))) {
        FareyWalker w(order);
        fractions_.push_back(w.previous());
        const auto total = static_cast<std::int64_t>(count_) + extra;
        for (std::int64_t i = 1; i <= total; ++i) {
            fractions_.push_back(w.current());
            w.advance();
        }
    }

    [[nodiscard]] std::int64_t order() const { return order_; }
    [[nodiscard]] std::int64_t count() const { return static_cast<std::int64_t>(count_); }
    [[nodiscard]] const FareyFraction& at(std::int64_t i) const { return fractions_.at(static_cast<std::size_t>(i)); }

    /// Determinant definition p_{i+k-1} q_{i-1} - p_{i-1} q_{i+k-1}.
    [[nodiscard]] BigInt nu(std::int64_t i, std::int64_t k) const { return farey_det(at(i - 1), at(i + k - 1)); }

    /// floor((Q + q_{i-1}) / q_i).
    [[nodiscard]] std::int64_t nu2_floor_at(std::int64_t i) const { return (order_ + at(i - 1).den) / at(i).den; }

private:
    std::int64_t order_;
    std::uint64_t count_;
    std::vector<FareyFraction> fractions_;
};

inline void require_recurrence_domain(std::int64_t order, std::int64_t k) {
    if (order < 2) throw std::domain_error("identity stated for Q >= 2");
    if (k < 3) throw std::domain_error("identity stated for k >= 3");
}

/// nu_k(gamma_i) == ((2k-1)/2) K_{k-1}(-nu_2(gamma_i), ..., (-1)^{k-1} nu_2(gamma_{i+k-2})).
inline VerificationReport verify_theorem1(std::int64_t order, std::int64_t k_max) {
    require_order(order);
    if (k_max < 1) throw std::domain_error("k_max must be >= 1");
    FareyPeriod period(order, k_max + 1);
    VerificationReport report{"continuant_form", order, 1, k_max};
    std::vector<SignedContinuantExpr> exprs;
    for (std::int64_t k = 1; k <= k_max; ++k) exprs.push_back(SignedContinuantExpr::for_k(static_cast<int>(k)));
    std::vector<std::int64_t> nu2;
    for (std::int64_t i = 1; i <= period.count(); ++i) {
        nu2.clear();
        for (std::int64_t j = i; j <= i + k_max - 2; ++j) nu2.push_back(period.nu2_floor_at(j));
        for (std::int64_t k = 1; k <= k_max; ++k) {
            const auto args = std::span<const std::int64_t>(nu2.data(), static_cast<std::size_t>(k - 1));
            report.record(i, k, period.nu(i, k), exprs[static_cast<std::size_t>(k - 1)].evaluate(args));
        }
    }
    return report;
}

/// nu_{k-1}(g_i) nu_{k-1}(g_{i+1}) - nu_k(g_i) nu_{k-2}(g_{i+1}) == 1.
inline VerificationReport verify_sl2_lemma(std::int64_t order, std::int64_t k) {
    require_recurrence_domain(order, k);
    FareyPeriod period(order, k + 1);
    VerificationReport report{"sl2_determinant", order, k, k};
    for (std::int64_t i = 1; i <= period.count(); ++i) {
        const BigInt det = period.nu(i, k - 1) * period.nu(i + 1, k - 1) - period.nu(i, k) * period.nu(i + 1, k - 2);
        report.record(i, k, 1, det);
    }
    return report;
}

/// nu_k(g_i) == nu_2(g_{i+k-2}) nu_{k-1}(g_i) - nu_{k-2}(g_i).
inline VerificationReport verify_three_term(std::int64_t order, std::int64_t k) {
    require_recurrence_domain(order, k);
    FareyPeriod period(order, k + 1);
    VerificationReport report{"three_term", order, k, k};
    for (std::int64_t i = 1; i <= period.count(); ++i) {
        const BigInt rhs = period.nu(i + k - 2, 2) * period.nu(i, k - 1) - period.nu(i, k - 2);
        report.record(i, k, period.nu(i, k), rhs);
    }
    return report;
}

/// nu_k(g_i) == (nu_{k-1}(g_i) nu_{k-1}(g_{i+1}) - 1) / nu_{k-2}(g_{i+1}), division exact.
inline VerificationReport verify_division_form(std::int64_t order, std::int64_t k) {
    require_recurrence_domain(order, k);
    FareyPeriod period(order, k + 1);
    VerificationReport report{"division_form", order, k, k};
    for (std::int64_t i = 1; i <= period.count(); ++i) {
        const BigInt numerator = period.nu(i, k - 1) * period.nu(i + 1, k - 1) - 1;
        const BigInt divisor = period.nu(i + 1, k - 2);
        BigInt quotient, remainder;
        mpz_tdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), numerator.get_mpz_t(), divisor.get_mpz_t());
        if (remainder != 0) {
            // Record an inexact division as a failure against remainder 0.
            report.record(i, k, 0, remainder);
            continue;
        }
        report.record(i, k, period.nu(i, k), quotient);
    }
    return report;
}

/// sum nu_2 over one period == 3 N(Q) - 1.
inline VerificationReport verify_hall_shiu(std::int64_t order, std::int64_t chunks = 1) {
    require_order(order);
    VerificationReport report{"hall_shiu", order, 2, 2};
    const BigInt expected = 3 * to_big(count_farey(static_cast<std::uint64_t>(order))) - 1;
    report.record(0, 2, expected, sum_nu_k(order, 2, chunks));
    return report;
}

/// (q_{i-1} + q_{i+1}) / q_i  ==  p_{i+1} q_{i-1} - p_{i-1} q_{i+1}  ==  floor((Q + q_{i-1}) / q_i).
inline VerificationReport verify_index_formulas(std::int64_t order) {
    require_order(order);
    FareyPeriod period(order, 2);
    VerificationReport report{"index_formulas", order, 2, 2};
    for (std::int64_t i = 1; i <= period.count(); ++i) {
        const BigInt det = period.nu(i, 2);
        const std::int64_t outer = period.at(i - 1).den + period.at(i + 1).den;
        const std::int64_t middle = period.at(i).den;
        if (outer % middle != 0) {
            report.record(i, 2, 0, to_big(outer % middle));
        } else {
            report.record(i, 2, det, to_big(outer / middle));
        }
        report.record(i, 2, det, to_big(period.nu2_floor_at(i)));
    }
    return report;
}

/// Full suite for one order: index formulas, Hall-Shiu, the continuant form up to
/// k_max, and the three recurrence identities for 3 <= k <= k_max (Q >= 2).
inline std::vector<VerificationReport> verify_all(std::int64_t order, std::int64_t k_max, std::int64_t chunks = 1) {
    std::vector<VerificationReport> out;
    out.push_back(verify_index_formulas(order));
    out.push_back(verify_hall_shiu(order, chunks));
    out.push_back(verify_theorem1(order, k_max));
    if (order >= 2) {
        for (std::int64_t k = 3; k <= k_max; ++k) {
            out.push_back(verify_sl2_lemma(order, k));
            out.push_back(verify_three_term(order, k));
            out.push_back(verify_division_form(order, k));
        }
    }
    return out;
}

}  // namespace farey_lab

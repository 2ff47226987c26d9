#pragma once

// The limiting averages B(k) = lim (1/N(Q)) sum_i nu_k(gamma_i) and their
// empirical counterparts.
//
// Geometric side. Along the orbit of (q_{i-1}/Q, q_i/Q) under the BCZ map the
// itinerary kappa_1, kappa_2, ... reproduces nu_2(gamma_i), nu_2(gamma_{i+1}),
// ..., and denominator pairs equidistribute in T (area 1/2). Hence
//
//     B(k) = 2 * sum over depth-(k-1) cells of w(cell) * area(cell),
//
// with w = theorem1_rhs(k, itinerary). Cells with an entry above kappa_max are
// dropped; the dropped mass is put back in closed form when tail_pattern()
// certifies the itinerary around a large entry, otherwise bounded.
//
// The same number is also computed monomial by monomial from the continuant
// expansion (the "star form"): the integral of kappa_{j_1} ... kappa_{j_n}
// over T, each carrying the sign the signed continuant gives that monomial.

#include "farey_lab/cell_cache.hpp"
#include "farey_lab/continuant.hpp"
#include "farey_lab/exact.hpp"
#include "farey_lab/farey_core.hpp"
#include "farey_lab/geometry.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace farey_lab {

inline constexpr std::int64_t kDefaultKappaMax = 60;

struct BkOptions {
    unsigned threads = 0;
    std::optional<std::filesystem::path> cell_cache;  // directory; one file per (depth, kappa_max)
    bool check_star_form = true;
    bool certify_tail = true;  // false forces the coarse tail bound (tests, comparison)
};

struct BkInterval {
    int k = 1;
    Rat lo;
    Rat hi;
    std::int64_t kappa_max = 0;
    std::size_t depth = 0;
    Rat tail_bound;             // closed-form tail that was added, or the width of the bound
    bool exact_tail = true;     // lo == hi by the certified tail
    std::size_t cell_count = 0;
    std::optional<Rat> star_lo;  // star-form evaluation, when requested
    std::optional<Rat> star_hi;

    [[nodiscard]] Rat width() const { return hi - lo; }
    [[nodiscard]] bool contains(const Rat& x) const { return lo <= x && x <= hi; }

    /// 0 inside, otherwise the gap to the nearer endpoint.
    [[nodiscard]] Rat distance_to(const Rat& x) const {
        if (x < lo) return lo - x;
        if (x > hi) return x - hi;
        return 0;
    }
};

/// sum_{l > L} l * area(T_l) = 4 / (L + 2).
inline Rat weighted_tail_area(std::int64_t kappa_max) { return make_rat(4, kappa_max + 2); }

/// sum_{l > L} area(T_l) = area(T^*_{L+1}) = 2 / ((L + 1)(L + 2)).
inline Rat plain_tail_area(std::int64_t kappa_max) { return make_rat(2, (kappa_max + 1) * (kappa_max + 2)); }

/// F_{k-1} * (4k + 2)^k: monomial count of K_{k-1} times the disjointness
/// cap to the k-th power. A coarse ceiling for B(k).
inline BigInt bk_trivial_bound(int k) {
    if (k < 2) throw std::domain_error("trivial bound stated for k >= 2");
    BigInt c = 4 * k + 2, power;
    mpz_pow_ui(power.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(k));
    return continuant_monomial_count(k - 1) * power;
}

namespace detail {

inline std::vector<CellSummary> load_cells(std::size_t depth, std::int64_t kappa_max, const BkOptions& opts) {
    std::optional<std::filesystem::path> file;
    if (opts.cell_cache) {
        std::filesystem::create_directories(*opts.cell_cache);
        file = *opts.cell_cache / ("cells_d" + std::to_string(depth) + "_L" + std::to_string(kappa_max) + ".txt");
    }
    return cached_cell_summaries(file, depth, kappa_max, opts.threads);
}

/// Disjointness cap for a window of the given depth: two entries h apart
/// cannot both exceed 4h + 2, and h <= depth - 1.
inline std::int64_t window_cap(std::size_t depth) { return depth <= 1 ? 0 : 4 * static_cast<std::int64_t>(depth - 1) + 2; }

inline void require_bound_domain(std::size_t depth, std::int64_t kappa_max) {
    if (kappa_max < window_cap(depth))
        throw std::domain_error("kappa_max = " + std::to_string(kappa_max) + " is below the disjointness cap " +
                                std::to_string(window_cap(depth)) + " and no tail certificate exists");
}

/// Itinerary of a tail cell whose only large entry sits at position pos (1-based).
inline std::vector<std::int64_t> tail_itinerary(const TailPattern& pattern, std::size_t depth, std::size_t pos, std::int64_t large) {
    std::vector<std::int64_t> it(depth);
    for (std::size_t j = 1; j <= depth; ++j) {
        const auto offset = static_cast<std::int64_t>(j) - static_cast<std::int64_t>(pos);
        it[j - 1] = offset == 0 ? large : pattern.at(offset);
    }
    return it;
}

/// Integral of a function affine in the large entry over all tail cells:
/// f(l) = alpha l + beta integrates against area(T_l), l > L, in closed form.
template <typename Weight>
Rat certified_tail(const TailPattern& pattern, std::size_t depth, std::int64_t kappa_max, Weight&& weight) {
    Rat total = 0;
    for (std::size_t pos = 1; pos <= depth; ++pos) {
        const Rat beta(weight(tail_itinerary(pattern, depth, pos, 0)));
        const Rat alpha = Rat(weight(tail_itinerary(pattern, depth, pos, 1))) - beta;
        total += alpha * weighted_tail_area(kappa_max) + beta * plain_tail_area(kappa_max);
    }
    return total;
}

/// Without a certificate: on a tail cell one entry l exceeds L and the others
/// are capped, so |f| <= multiplier * l; integrate over the depth positions.
inline Rat bounded_tail(std::size_t depth, std::int64_t kappa_max, const BigInt& multiplier) {
    return Rat(multiplier) * Rat(to_big(static_cast<std::int64_t>(depth))) * weighted_tail_area(kappa_max);
}

}  // namespace detail

/// Literal monomial-by-monomial evaluation. terms[m] holds the monomial's
/// sign and an enclosure of its integral over T.
struct StarFormTerm {
    ContinuantMonomial monomial;
    int sign = 1;
    Rat lo;
    Rat hi;
};

struct StarForm {
    int k = 1;
    Rat lo;
    Rat hi;
    std::vector<StarFormTerm> terms;
};

inline StarForm bk_star_form(int k, std::int64_t kappa_max, const BkOptions& opts = {}) {
    if (k < 1) throw std::domain_error("B(k) is defined for k >= 1");
    if (kappa_max < 1) throw std::domain_error("kappa_max must be >= 1");
    const auto expr = SignedContinuantExpr::for_k(k);
    StarForm out;
    out.k = k;
    out.lo = out.hi = 0;
    std::map<std::size_t, std::vector<CellSummary>> cells_by_window;
    for (const auto& mono : continuant_monomials(k - 1)) {
        StarFormTerm term{mono, expr.monomial_sign(mono), 0, 0};
        const int n = mono.degree();
        if (n == 0) {
            term.lo = term.hi = Rat(1) / 2;  // integral of 1 over T
        } else if (n == 1) {
            // Layer cake: integral of kappa_j = sum_l area(T^*_l), the tail l > L
            // telescoping to 2 / (L + 1).
            Rat s = 0;
            for (std::int64_t l = 1; l <= kappa_max; ++l) s += area(region_Tk_star(l));
            term.lo = term.hi = s + make_rat(2, kappa_max + 1);
        } else {
            // Shift the monomial to start at position 1; T preserves area.
            const int first = mono.indices.front();
            const auto window = static_cast<std::size_t>(mono.indices.back() - first + 1);
            std::vector<std::size_t> slots;
            for (int j : mono.indices) slots.push_back(static_cast<std::size_t>(j - first));
            auto product = [&](const std::vector<std::int64_t>& it) {
                BigInt p = 1;
                for (auto s : slots) p *= to_big(it[s]);
                return p;
            };
            auto [pos, fresh] = cells_by_window.try_emplace(window);
            if (fresh) pos->second = detail::load_cells(window, kappa_max, opts);
            Rat s = 0;
            for (const auto& c : pos->second) s += c.area * Rat(product(c.itinerary));
            if (const auto pattern = opts.certify_tail ? tail_pattern(window, kappa_max) : std::nullopt) {
                term.lo = term.hi = s + detail::certified_tail(*pattern, window, kappa_max, product);
            } else {
                detail::require_bound_domain(window, kappa_max);
                BigInt cap = 1;
                for (int j = 1; j < n; ++j) cap *= detail::window_cap(window);
                term.lo = s;
                term.hi = s + detail::bounded_tail(window, kappa_max, cap);
            }
        }
        if (term.sign > 0) {
            out.lo += term.lo;
            out.hi += term.hi;
        } else {
            out.lo -= term.hi;
            out.hi -= term.lo;
        }
        out.terms.push_back(std::move(term));
    }
    out.lo *= 2;
    out.hi *= 2;
    return out;
}

/// B(k) in the cell form. With check_star_form the star form is evaluated
/// too and a disagreement beyond the two enclosures throws std::logic_error.
inline BkInterval bk_exact(int k, std::int64_t kappa_max = kDefaultKappaMax, const BkOptions& opts = {}) {
    if (k < 1) throw std::domain_error("B(k) is defined for k >= 1");
    if (kappa_max < 1) throw std::domain_error("kappa_max must be >= 1");
    BkInterval out;
    out.k = k;
    out.kappa_max = kappa_max;
    if (k == 1) {
        out.lo = out.hi = 1;
        out.tail_bound = 0;
        out.star_lo = out.star_hi = bk_star_form(1, kappa_max, opts).lo;
        return out;
    }
    const auto depth = static_cast<std::size_t>(k - 1);
    out.depth = depth;
    const auto expr = SignedContinuantExpr::for_k(k);
    auto weight = [&](const std::vector<std::int64_t>& it) { return expr.evaluate(std::span<const std::int64_t>(it)); };

    const auto cells = detail::load_cells(depth, kappa_max, opts);
    out.cell_count = cells.size();
    Rat s = 0;
    for (const auto& c : cells) {
        const BigInt w = weight(c.itinerary);
        if (w < 1) throw std::logic_error("cell weight below 1: the signed continuant must be a positive nu_k");
        s += c.area * Rat(w);
    }
    if (const auto pattern = opts.certify_tail ? tail_pattern(depth, kappa_max) : std::nullopt) {
        const Rat tail = detail::certified_tail(*pattern, depth, kappa_max, weight);
        out.lo = out.hi = 2 * (s + tail);
        out.tail_bound = 2 * tail;
        out.exact_tail = true;
    } else {
        detail::require_bound_domain(depth, kappa_max);
        // |w| <= sum over monomials of |prod| <= F_{k-1} * cap^{k-2} * l.
        BigInt mult = continuant_monomial_count(k - 1);
        for (std::size_t j = 1; j < depth; ++j) mult *= detail::window_cap(depth);
        out.tail_bound = 2 * detail::bounded_tail(depth, kappa_max, mult);
        out.lo = 2 * s;
        out.hi = out.lo + out.tail_bound;
        out.exact_tail = false;
    }
    if (opts.check_star_form) {
        const auto star = bk_star_form(k, kappa_max, opts);
        out.star_lo = star.lo;
        out.star_hi = star.hi;
        if (star.hi < out.lo || out.hi < star.lo)
            throw std::logic_error("cell form [" + rat_text(out.lo) + ", " + rat_text(out.hi) + "] and star form [" + rat_text(star.lo) +
                                   ", " + rat_text(star.hi) + "] disagree for k=" + std::to_string(k));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Empirical side

struct EmpiricalOptions {
    std::int64_t chunks = 64;
    unsigned threads = 0;
};

/// (1 / N(Q)) sum_{i=1..N(Q)} nu_k(gamma_i), exact.
inline Rat bk_empirical(int k, std::int64_t order, const EmpiricalOptions& opts = {}) {
    if (k < 1) throw std::domain_error("k must be >= 1");
    const BigInt n = to_big(count_farey(static_cast<std::uint64_t>(order)));
    return make_rat(sum_nu_k(order, k, opts.chunks, opts.threads), n);
}

/// (1 / N(Q)) sum_{i=1..N(Q)} nu_2(gamma_i) nu_2(gamma_{i+h}), exact.
inline Rat a_h_empirical(std::int64_t h, std::int64_t order, const EmpiricalOptions& opts = {}) {
    const BigInt n = to_big(count_farey(static_cast<std::uint64_t>(order)));
    return make_rat(correlation_sum(order, h, opts.chunks, opts.threads), n);
}

/// (log Q)^2 / Q, the shape of the error term.
inline double error_model(std::int64_t order) {
    const double q = static_cast<double>(order);
    const double l = std::log(q);
    return l * l / q;
}

struct ErrorConstant {
    double value = 0;            // sup of |avg_2(Q) - 3| / ((log Q)^2 / Q)
    std::int64_t argmax = 0;
    std::int64_t q_min = 2;
    std::int64_t q_max = 2;
};

/// C for the error term, calibrated on k = 2 where B(2) = 3 is exact:
/// the supremum of |bk_empirical(2, Q) - 3| Q / (log Q)^2 over q_min..q_max.
/// Q = 1 is skipped (log 1 = 0).
inline ErrorConstant calibrate_error_constant(std::int64_t q_max, std::int64_t q_min = 2) {
    if (q_min < 2 || q_max < q_min) throw std::domain_error("calibration needs 2 <= q_min <= q_max");
    ErrorConstant c{0, q_min, q_min, q_max};
    for (std::int64_t q = q_min; q <= q_max; ++q) {
        const Rat gap = abs(bk_empirical(2, q, {1, 1}) - 3);
        const double ratio = rat_to_double(gap) / error_model(q);
        if (ratio > c.value) {
            c.value = ratio;
            c.argmax = q;
        }
    }
    return c;
}

/// Is x within C (log Q)^2 / Q of the interval?
struct EnclosureCheck {
    Rat value;
    Rat distance;
    double allowance = 0;
    bool inside = false;
};

inline EnclosureCheck check_widened(const Rat& value, const BkInterval& interval, double c, std::int64_t order) {
    EnclosureCheck e;
    e.value = value;
    e.distance = interval.distance_to(value);
    e.allowance = order >= 2 ? c * error_model(order) : 0.0;
    e.inside = e.distance == 0 || rat_to_double(e.distance) <= e.allowance;
    return e;
}

/// B(3) = A(1) - 1 on both sides: sum nu_3 = sum nu_2 nu_2' - N(Q) exactly, and
/// both empirical estimates sit in the widened B(3) enclosure.
struct B3CrossCheck {
    std::int64_t order = 0;
    Rat bk3;
    Rat a1_minus_1;
    bool equal = false;
    EnclosureCheck bk3_check;
    EnclosureCheck a1_check;

    [[nodiscard]] bool pass() const { return equal && bk3_check.inside && a1_check.inside; }
};

inline B3CrossCheck b3_cross_check(std::int64_t order, const BkInterval& b3, double c, const EmpiricalOptions& opts = {}) {
    if (b3.k != 3) throw std::domain_error("b3_cross_check needs the B(3) interval");
    B3CrossCheck out;
    out.order = order;
    out.bk3 = bk_empirical(3, order, opts);
    out.a1_minus_1 = a_h_empirical(1, order, opts) - 1;
    out.equal = out.bk3 == out.a1_minus_1;
    out.bk3_check = check_widened(out.bk3, b3, c, order);
    out.a1_check = check_widened(out.a1_minus_1, b3, c, order);
    return out;
}

inline B3CrossCheck b3_cross_check(std::int64_t order, std::int64_t kappa_max, double c, const EmpiricalOptions& opts = {}) {
    return b3_cross_check(order, bk_exact(3, kappa_max), c, opts);
}

// ---------------------------------------------------------------------------
// Convergence

struct ConvergenceRow {
    std::int64_t order = 0;
    std::uint64_t count = 0;
    Rat empirical;
    Rat distance;
    double model = 0;  // (log Q)^2 / Q
};

struct ConvergenceReport {
    int k = 1;
    BkInterval interval;
    std::vector<ConvergenceRow> rows;
    bool violation = false;  // some distance failed to shrink along the list

    /// distance(first) / distance(last); nullopt when the last is 0.
    [[nodiscard]] std::optional<double> shrink_ratio() const {
        if (rows.empty() || rows.back().distance == 0) return std::nullopt;
        return rat_to_double(rows.front().distance / rows.back().distance);
    }
};

inline ConvergenceReport convergence_report(int k, const std::vector<std::int64_t>& orders, const BkInterval& interval,
                                            const EmpiricalOptions& opts = {}) {
    if (orders.empty()) throw std::domain_error("convergence report needs at least one Q");
    for (std::size_t i = 1; i < orders.size(); ++i)
        if (orders[i] <= orders[i - 1]) throw std::domain_error("Q list must be strictly ascending");
    if (interval.k != k) throw std::domain_error("interval is for a different k");
    ConvergenceReport report{k, interval, {}, false};
    for (auto q : orders) {
        ConvergenceRow row;
        row.order = q;
        row.count = count_farey(static_cast<std::uint64_t>(q));
        row.empirical = bk_empirical(k, q, opts);
        row.distance = interval.distance_to(row.empirical);
        row.model = error_model(q);
        if (!report.rows.empty() && report.rows.back().distance > 0 && row.distance >= report.rows.back().distance) report.violation = true;
        report.rows.push_back(std::move(row));
    }
    return report;
}

inline ConvergenceReport convergence_report(int k, const std::vector<std::int64_t>& orders, std::int64_t kappa_max,
                                            const EmpiricalOptions& opts = {}, const BkOptions& bk = {}) {
    return convergence_report(k, orders, bk_exact(k, kappa_max, bk), opts);
}

// ---------------------------------------------------------------------------
// Value distribution of nu_k

struct DistributionEntry {
    std::int64_t value = 0;
    Rat measure;               // 2 * area of the cells with this weight
    std::uint64_t count = 0;   // occurrences over one period
    Rat empirical;             // count / N(Q)
};

struct DistributionTable {
    int k = 2;
    std::int64_t kappa_max = 0;
    std::int64_t order = 0;
    std::uint64_t period = 0;
    std::vector<DistributionEntry> entries;  // ascending value
    Rat deficit;                             // 1 - sum of measures (truncated cells)
};

inline DistributionTable nu_k_distribution(int k, std::int64_t kappa_max, std::int64_t order, const BkOptions& opts = {}) {
    if (k < 2) throw std::domain_error("distribution is tabulated for k >= 2");
    if (kappa_max < 1) throw std::domain_error("kappa_max must be >= 1");
    require_order(order);
    const auto expr = SignedContinuantExpr::for_k(k);
    std::map<std::int64_t, DistributionEntry> table;
    Rat covered = 0;
    for (const auto& c : detail::load_cells(static_cast<std::size_t>(k - 1), kappa_max, opts)) {
        const auto v = to_int64(expr.evaluate(std::span<const std::int64_t>(c.itinerary)));
        auto& e = table[v];
        e.value = v;
        e.measure += 2 * c.area;
        covered += 2 * c.area;
    }
    for_each_nu_k(order, k, [&](std::int64_t v) {
        auto& e = table[v];
        e.value = v;
        ++e.count;
    });
    DistributionTable out;
    out.k = k;
    out.kappa_max = kappa_max;
    out.order = order;
    out.period = count_farey(static_cast<std::uint64_t>(order));
    out.deficit = 1 - covered;
    const BigInt n = to_big(out.period);
    for (auto& [v, e] : table) {
        e.empirical = make_rat(to_big(e.count), n);
        out.entries.push_back(std::move(e));
    }
    return out;
}

}  // namespace farey_lab

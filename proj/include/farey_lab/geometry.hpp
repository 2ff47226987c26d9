#pragma once

// Exact rational geometry of the Farey triangle
//
//     T = {(x, y) in [0,1]^2 : x + y > 1}
//
// and of the area-preserving map T(x, y) = (y, floor((1+x)/y) y - x).
// On the slab T_k = {floor((1+x)/y) = k} the map is the unimodular matrix
// (0 1; -1 k), so a fixed itinerary (k_1, ..., k_d) cuts out a convex
// polygon (a cylinder cell). Everything here is GMP rationals; there is no
// floating point on any path that produces a reported value.

#include "farey_lab/exact.hpp"
#include "farey_lab/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace farey_lab {

struct Point {
    Rat x;
    Rat y;

    friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
    friend std::ostream& operator<<(std::ostream& os, const Point& p) { return os << '(' << rat_text(p.x) << ", " << rat_text(p.y) << ')'; }
};

/// The closed half-plane a x + b y <= c.
struct HalfPlane {
    Rat a;
    Rat b;
    Rat c;

    [[nodiscard]] Rat excess(const Point& p) const { return a * p.x + b * p.y - c; }
    [[nodiscard]] bool contains(const Point& p) const { return excess(p) <= 0; }
};

namespace detail {

inline Rat cross3(const Point& o, const Point& a, const Point& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

inline Rat twice_signed_area(const std::vector<Point>& v) {
    Rat s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return s;
}

}  // namespace detail

/// Convex polygon with counterclockwise vertices starting at the smallest
/// (x, y), no repeated vertices and no three consecutive collinear vertices. Zero-area input normalizes to empty.
class ConvexPolygon {
public:
    ConvexPolygon() = default;

    /// Accepts the vertices of a convex polygon in either orientation.
    explicit ConvexPolygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) { normalize(); }

    [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
    [[nodiscard]] bool empty() const { return vertices_.empty(); }
    [[nodiscard]] std::size_t size() const { return vertices_.size(); }

    /// Checks the class invariants (used by tests on engine output).
    [[nodiscard]] bool is_valid_convex() const {
        if (vertices_.empty()) return true;
        if (vertices_.size() < 3) return false;
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            const auto& a = vertices_[i];
            const auto& b = vertices_[(i + 1) % vertices_.size()];
            const auto& c = vertices_[(i + 2) % vertices_.size()];
            if (a == b) return false;
            if (detail::cross3(a, b, c) <= 0) return false;
        }
        return true;
    }

    [[nodiscard]] Point centroid_of_vertices() const {
        Point c{0, 0};
        for (const auto& v : vertices_) {
            c.x += v.x;
            c.y += v.y;
        }
        const Rat n(static_cast<long>(vertices_.size()));
        c.x /= n;
        c.y /= n;
        return c;
    }

    friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

private:
    void normalize() {
        // Drop repeats (including the wrap-around pair).
        std::vector<Point> v;
        v.reserve(vertices_.size());
        for (auto& p : vertices_) {
            if (v.empty() || !(v.back() == p)) v.push_back(std::move(p));
        }
        while (v.size() > 1 && v.front() == v.back()) v.pop_back();
        if (v.size() < 3) {
            vertices_.clear();
            return;
        }
        if (detail::twice_signed_area(v) < 0) std::reverse(v.begin(), v.end());
        // Drop collinear middles until none remain.
        bool changed = true;
        while (changed && v.size() >= 3) {
            changed = false;
            for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
                const std::size_t prev = (i + v.size() - 1) % v.size();
                const std::size_t next = (i + 1) % v.size();
                if (detail::cross3(v[prev], v[i], v[next]) == 0) {
                    v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                    changed = true;
                    break;
                }
            }
        }
        if (v.size() < 3 || detail::twice_signed_area(v) == 0) v.clear();
        // Canonical start so that equal polygons compare equal.
        const auto first = std::min_element(v.begin(), v.end(), [](const Point& a, const Point& b) {
            return a.x < b.x || (a.x == b.x && a.y < b.y);
        });
        std::rotate(v.begin(), first, v.end());
        vertices_ = std::move(v);
    }

    std::vector<Point> vertices_;
};

/// Shoelace area, exact and non-negative.
inline Rat area(const ConvexPolygon& poly) {
    if (poly.empty()) return 0;
    Rat a = detail::twice_signed_area(poly.vertices()) / 2;
    return abs(a);
}

/// Intersection with the closed half-plane (Sutherland-Hodgman, one edge).
inline ConvexPolygon clip(const ConvexPolygon& poly, const HalfPlane& h) {
    const auto& v = poly.vertices();
    if (v.empty()) return {};
    std::vector<Rat> s;
    s.reserve(v.size());
    bool all_inside = true;
    bool all_outside = true;
    for (const auto& p : v) {
        s.push_back(h.excess(p));
        if (s.back() > 0) all_inside = false;
        if (s.back() < 0) all_outside = false;
    }
    if (all_inside) return poly;
    if (all_outside) return {};
    std::vector<Point> out;
    out.reserve(v.size() + 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const std::size_t j = (i + 1) % v.size();
        if (s[i] <= 0) out.push_back(v[i]);
        if ((s[i] < 0 && s[j] > 0) || (s[i] > 0 && s[j] < 0)) {
            const Rat t = s[i] / (s[i] - s[j]);
            out.push_back({v[i].x + (v[j].x - v[i].x) * t, v[i].y + (v[j].y - v[i].y) * t});
        }
    }
    return ConvexPolygon(std::move(out));
}

/// Integer 2x2 matrix of determinant 1 acting on column vectors (x, y).
struct UnimodularMap {
    BigInt a = 1, b = 0, c = 0, d = 1;

    static UnimodularMap identity() { return {}; }

    /// The branch of the BCZ map on T_k: (x, y) -> (y, k y - x).
    static UnimodularMap branch(std::int64_t k) { return {0, 1, -1, to_big(k)}; }

    /// Inverse branch on the swapped slab: (u, v) -> (k u - v, u).
    static UnimodularMap inverse_branch(std::int64_t k) { return {to_big(k), -1, 1, 0}; }

    static UnimodularMap make(BigInt a, BigInt b, BigInt c, BigInt d) {
        UnimodularMap m{std::move(a), std::move(b), std::move(c), std::move(d)};
        if (m.det() != 1) throw std::domain_error("matrix is not in SL2(Z)");
        return m;
    }

    [[nodiscard]] BigInt det() const { return a * d - b * c; }
    [[nodiscard]] UnimodularMap inverse() const { return {d, -b, -c, a}; }

    [[nodiscard]] Point apply(const Point& p) const { return {a * p.x + b * p.y, c * p.x + d * p.y}; }

    /// (this * other)(p) == this(other(p)).
    friend UnimodularMap operator*(const UnimodularMap& m, const UnimodularMap& n) {
        return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d, m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
    }

    friend bool operator==(const UnimodularMap&, const UnimodularMap&) = default;
};

/// Image polygon; determinant 1 keeps orientation and area.
inline ConvexPolygon map_polygon(const ConvexPolygon& poly, const UnimodularMap& m) {
    std::vector<Point> out;
    out.reserve(poly.size());
    for (const auto& p : poly.vertices()) out.push_back(m.apply(p));
    return ConvexPolygon(std::move(out));
}

/// Reflection (x, y) -> (y, x).
inline ConvexPolygon swap_axes(const ConvexPolygon& poly) {
    std::vector<Point> out;
    out.reserve(poly.size());
    for (const auto& p : poly.vertices()) out.push_back({p.y, p.x});
    return ConvexPolygon(std::move(out));
}

// ---------------------------------------------------------------------------
// The Farey triangle and the BCZ map

inline ConvexPolygon farey_triangle() { return ConvexPolygon({{1, 0}, {1, 1}, {0, 1}}); }

/// Membership in T itself (the edge x + y = 1 is excluded).
inline bool in_farey_triangle(const Point& p) { return p.x >= 0 && p.y >= 0 && p.x <= 1 && p.y <= 1 && p.x + p.y > 1; }

inline void require_in_triangle(const Point& p) {
    if (!in_farey_triangle(p)) {
        std::ostringstream os;
        os << "point " << p << " is outside the Farey triangle";
        throw std::domain_error(os.str());
    }
}

/// kappa_1 = floor((1 + x) / y).
inline std::int64_t kappa1(const Point& p) {
    require_in_triangle(p);
    return to_int64(floor_rat((1 + p.x) / p.y));
}

inline Point bcz_apply(const Point& p) {
    const std::int64_t k = kappa1(p);
    return {p.y, to_big(k) * p.y - p.x};
}

/// kappa_i = kappa_1 o T^{i-1}.
inline std::int64_t kappa(const Point& p, std::int64_t i) {
    if (i < 1) throw std::domain_error("kappa index must be >= 1");
    Point q = p;
    for (std::int64_t step = 1; step < i; ++step) q = bcz_apply(q);
    return kappa1(q);
}

/// y <= (1 + x) / k.
inline HalfPlane slab_upper(std::int64_t k) { return {-1, Rat(to_big(k)), 1}; }
/// y >= (1 + x) / (k + 1), closed; the shared edge has measure zero.
inline HalfPlane slab_lower(std::int64_t k) { return {1, Rat(-to_big(k + 1)), -1}; }

inline ConvexPolygon clip_to_slab(const ConvexPolygon& poly, std::int64_t k) {
    ConvexPolygon upper = k == 1 ? poly : clip(poly, slab_upper(k));
    return clip(upper, slab_lower(k));
}

/// T_k = {p in T : kappa_1(p) = k}.
inline ConvexPolygon region_Tk(std::int64_t k) {
    if (k < 1) throw std::domain_error("k must be >= 1");
    return clip_to_slab(farey_triangle(), k);
}

/// T_k^* = union of T_l for l >= k = {p in T : y <= (1 + x) / k}.
inline ConvexPolygon region_Tk_star(std::int64_t k) {
    if (k < 1) throw std::domain_error("k must be >= 1");
    return clip(farey_triangle(), slab_upper(k));
}

/// Closed-form area(T_k^*) for k >= 2 (area(T_1^*) = area(T) = 1/2).
inline Rat star_area_formula(std::int64_t k) { return make_rat(2, k * (k + 1)); }

/// Range of floor((1 + x) / y) over a convex polygon; the function is
/// monotone along segments, so vertices give the extremes. A vertex with
/// y = 0 means the range is unbounded and the upper end is clamped to cap.
inline std::pair<std::int64_t, std::int64_t> kappa_range(const ConvexPolygon& poly, std::int64_t cap) {
    std::int64_t lo = cap, hi = 1;
    for (const auto& v : poly.vertices()) {
        std::int64_t k = cap;
        if (v.y > 0) {
            const BigInt f = floor_rat((1 + v.x) / v.y);
            k = f > cap ? cap : to_int64(f);
        }
        lo = std::min(lo, std::max<std::int64_t>(k, 1));
        hi = std::max(hi, k);
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Cylinder cells

struct CylinderCell {
    std::vector<std::int64_t> itinerary;  // k_1 .. k_d
    ConvexPolygon region;                 // cell in T
    ConvexPolygon forward_image;          // T^{d-1}(region)
    UnimodularMap composed_map;           // region -> forward_image
};

/// Product of branch maps for k_1 .. k_m (applied in that order).
inline UnimodularMap itinerary_map(const std::vector<std::int64_t>& itinerary, std::size_t count) {
    UnimodularMap m = UnimodularMap::identity();
    for (std::size_t j = 0; j < count && j < itinerary.size(); ++j) m = UnimodularMap::branch(itinerary[j]) * m;
    return m;
}

/// Visitor form of the enumeration. For every itinerary of length depth with
/// entries <= kappa_max whose cell has positive area, calls
/// visit(itinerary, piece, map) where piece = T^{depth-1}(cell) and map is
/// the composed branch map of the first depth-1 steps.
using CellVisitor = std::function<void(const std::vector<std::int64_t>&, const ConvexPolygon&, const UnimodularMap&)>;

namespace detail {

inline void cell_dfs(std::vector<std::int64_t>& itinerary, const ConvexPolygon& image, const UnimodularMap& map, std::size_t depth,
                     std::int64_t kappa_max, const CellVisitor& visit) {
    const auto [lo, hi] = kappa_range(image, kappa_max);
    for (std::int64_t k = lo; k <= std::min(hi, kappa_max); ++k) {
        ConvexPolygon piece = clip_to_slab(image, k);
        if (piece.empty()) continue;
        itinerary.push_back(k);
        if (itinerary.size() == depth) {
            visit(itinerary, piece, map);
        } else {
            const auto branch = UnimodularMap::branch(k);
            cell_dfs(itinerary, map_polygon(piece, branch), branch * map, depth, kappa_max, visit);
        }
        itinerary.pop_back();
    }
}

}  // namespace detail

/// Depth-first enumeration rooted at one first-level branch k_1.
inline void for_each_cell_from(std::int64_t first, std::size_t depth, std::int64_t kappa_max, const CellVisitor& visit) {
    if (depth < 1) throw std::domain_error("depth must be >= 1");
    ConvexPolygon piece = region_Tk(first);
    if (piece.empty()) return;
    std::vector<std::int64_t> itinerary{first};
    if (depth == 1) {
        visit(itinerary, piece, UnimodularMap::identity());
        return;
    }
    const auto branch = UnimodularMap::branch(first);
    detail::cell_dfs(itinerary, map_polygon(piece, branch), branch, depth, kappa_max, visit);
}

inline void for_each_cell(std::size_t depth, std::int64_t kappa_max, const CellVisitor& visit) {
    if (kappa_max < 1) throw std::domain_error("kappa_max must be >= 1");
    for (std::int64_t k = 1; k <= kappa_max; ++k) for_each_cell_from(k, depth, kappa_max, visit);
}

/// Itinerary and exact area only; what the constants need.
struct CellSummary {
    std::vector<std::int64_t> itinerary;
    Rat area;
};

/// Summaries in lexicographic itinerary order; first-level branches run in
/// parallel and are concatenated in branch order.
inline std::vector<CellSummary> cell_summaries(std::size_t depth, std::int64_t kappa_max, unsigned threads = 0) {
    if (kappa_max < 1) throw std::domain_error("kappa_max must be >= 1");
    if (depth < 1) throw std::domain_error("depth must be >= 1");
    auto parts = parallel_map(static_cast<std::size_t>(kappa_max), threads, [&](std::size_t idx) {
        std::vector<CellSummary> local;
        for_each_cell_from(static_cast<std::int64_t>(idx) + 1, depth, kappa_max,
                           [&](const std::vector<std::int64_t>& it, const ConvexPolygon& piece, const UnimodularMap&) {
                               local.push_back({it, area(piece)});
                           });
        return local;
    });
    std::vector<CellSummary> out;
    for (auto& part : parts) std::move(part.begin(), part.end(), std::back_inserter(out));
    return out;
}

/// All cells of the given depth with every itinerary entry <= kappa_max and
/// positive area, in lexicographic itinerary order.
inline std::vector<CylinderCell> enumerate_cells(std::size_t depth, std::int64_t kappa_max, unsigned threads = 0) {
    if (kappa_max < 1) throw std::domain_error("kappa_max must be >= 1");
    if (depth < 1) throw std::domain_error("depth must be >= 1");
    auto parts = parallel_map(static_cast<std::size_t>(kappa_max), threads, [&](std::size_t idx) {
        std::vector<CylinderCell> local;
        for_each_cell_from(static_cast<std::int64_t>(idx) + 1, depth, kappa_max,
                           [&](const std::vector<std::int64_t>& it, const ConvexPolygon& piece, const UnimodularMap& map) {
                               local.push_back({it, map_polygon(piece, map.inverse()), piece, map});
                           });
        return local;
    });
    std::vector<CylinderCell> out;
    for (auto& part : parts) std::move(part.begin(), part.end(), std::back_inserter(out));
    return out;
}

/// Rebuilds a cell from its itinerary and region (cache loading).
inline CylinderCell cell_from_region(std::vector<std::int64_t> itinerary, ConvexPolygon region) {
    CylinderCell cell;
    cell.composed_map = itinerary_map(itinerary, itinerary.empty() ? 0 : itinerary.size() - 1);
    cell.forward_image = map_polygon(region, cell.composed_map);
    cell.region = std::move(region);
    cell.itinerary = std::move(itinerary);
    return cell;
}

// ---------------------------------------------------------------------------
// Tail certificate
//
// Near the corner (1, 0) the BCZ orbit is rigid: a point with a huge
// kappa_1 is preceded and followed by a fixed short itinerary (1, 2, 2, ...).
// tail_pattern() proves this exactly for every point of T^*_{kappa_max+1}
// over a window of depth-1 steps in each direction, by pushing the whole
// triangle forward and backward and checking it never splits.

struct TailPattern {
    std::int64_t kappa_max = 0;
    std::vector<std::int64_t> forward;   // forward[h-1]  = kappa_1(T^h p)
    std::vector<std::int64_t> backward;  // backward[h-1] = kappa_1(T^{-h} p)

    /// Entry at relative offset (nonzero, |offset| <= window).
    [[nodiscard]] std::int64_t at(std::int64_t offset) const {
        if (offset > 0) return forward.at(static_cast<std::size_t>(offset - 1));
        if (offset < 0) return backward.at(static_cast<std::size_t>(-offset - 1));
        throw std::domain_error("offset 0 is the unbounded entry");
    }
};

namespace detail {

/// Returns the single slab index whose clip carries all of poly's area, or
/// nullopt if poly straddles two slabs with positive area.
inline std::optional<std::int64_t> single_slab(const ConvexPolygon& poly, bool swapped) {
    const ConvexPolygon probe = swapped ? swap_axes(poly) : poly;
    const Rat total = area(probe);
    // A bounded range suffices: the probe regions stay away from y = 0.
    const auto [lo, hi] = kappa_range(probe, std::int64_t{1} << 40);
    for (std::int64_t k = lo; k <= hi && k < lo + 4; ++k) {
        const Rat a = area(clip_to_slab(probe, k));
        if (a == total) return k;
        if (a > 0) return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace detail

inline std::optional<TailPattern> tail_pattern(std::size_t depth, std::int64_t kappa_max) {
    if (depth < 1) throw std::domain_error("depth must be >= 1");
    TailPattern pattern;
    pattern.kappa_max = kappa_max;
    const std::size_t window = depth - 1;
    const ConvexPolygon star = region_Tk_star(kappa_max + 1);
    // Forward: T(T_l) is the mirror image of T_l, hence T(T^*_M) = swap(T^*_M).
    ConvexPolygon region = swap_axes(star);
    for (std::size_t h = 1; h <= window; ++h) {
        const auto k = detail::single_slab(region, false);
        if (!k || *k > kappa_max) return std::nullopt;
        pattern.forward.push_back(*k);
        region = map_polygon(region, UnimodularMap::branch(*k));
    }
    // Backward: kappa_1(T^{-1} p) = floor((1 + y) / x) for p = (x, y).
    region = star;
    for (std::size_t h = 1; h <= window; ++h) {
        const auto k = detail::single_slab(region, true);
        if (!k || *k > kappa_max) return std::nullopt;
        pattern.backward.push_back(*k);
        region = map_polygon(region, UnimodularMap::inverse_branch(*k));
    }
    return pattern;
}

// ---------------------------------------------------------------------------
// Visible lattice points

namespace detail {

/// Closed x-interval of poly at height y, if the line meets it.
inline std::optional<std::pair<Rat, Rat>> row_interval(const ConvexPolygon& poly, const Rat& y) {
    const auto& v = poly.vertices();
    std::optional<Rat> lo, hi;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& p = v[i];
        const Point& q = v[(i + 1) % v.size()];
        const Rat ymin = std::min(p.y, q.y), ymax = std::max(p.y, q.y);
        if (y < ymin || y > ymax) continue;
        std::vector<Rat> xs;
        if (p.y == q.y) {
            xs = {p.x, q.x};
        } else {
            xs = {p.x + (q.x - p.x) * (y - p.y) / (q.y - p.y)};
        }
        for (const auto& x : xs) {
            if (!lo || x < *lo) lo = x;
            if (!hi || x > *hi) hi = x;
        }
    }
    if (!lo) return std::nullopt;
    return std::make_pair(*lo, *hi);
}

template <typename RowCounter>
std::uint64_t sweep_rows(const ConvexPolygon& poly, std::int64_t order, RowCounter&& count_row) {
    if (order < 1) throw std::domain_error("Q must be >= 1");
    if (poly.empty()) return 0;
    const Rat scale(to_big(order));
    Rat ymin = poly.vertices()[0].y, ymax = ymin;
    for (const auto& v : poly.vertices()) {
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    const std::int64_t first_row = to_int64(ceil_rat(ymin * scale));
    const std::int64_t last_row = to_int64(floor_rat(ymax * scale));
    std::uint64_t total = 0;
    for (std::int64_t b = first_row; b <= last_row; ++b) {
        const auto span = row_interval(poly, make_rat(b, order));
        if (!span) continue;
        std::int64_t a_lo = to_int64(ceil_rat(span->first * scale));
        const std::int64_t a_hi = to_int64(floor_rat(span->second * scale));
        a_lo = std::max(a_lo, order - b + 1);  // open edge a + b > Q
        if (a_lo > a_hi) continue;
        total += count_row(a_lo, a_hi, b);
    }
    return total;
}

}  // namespace detail

/// #{(a, b) in Z^2 : gcd(a, b) = 1, (a/Q, b/Q) in poly, a + b > Q}. The polygon
/// is read as closed except along x + y = 1, matching T's own boundary.
/// Row sweep with a gcd test per point.
inline std::uint64_t visible_count_sweep(const ConvexPolygon& poly, std::int64_t order) {
    return detail::sweep_rows(poly, order, [](std::int64_t lo, std::int64_t hi, std::int64_t b) {
        std::uint64_t n = 0;
        for (std::int64_t a = lo; a <= hi; ++a) n += std::gcd(a, b) == 1 ? 1 : 0;
        return n;
    });
}

/// Same count; each row is done by Moebius inversion over the squarefree
/// divisors of b, using a smallest-prime-factor table.
inline std::uint64_t visible_count_mobius(const ConvexPolygon& poly, std::int64_t order) {
    std::int64_t max_row = 0;
    for (const auto& v : poly.vertices()) max_row = std::max(max_row, to_int64(floor_rat(v.y * to_big(order))));
    std::vector<std::int64_t> spf(static_cast<std::size_t>(std::max<std::int64_t>(max_row, 1)) + 1, 0);
    for (std::int64_t i = 2; i <= max_row; ++i) {
        if (spf[static_cast<std::size_t>(i)] != 0) continue;
        for (std::int64_t j = i; j <= max_row; j += i)
            if (spf[static_cast<std::size_t>(j)] == 0) spf[static_cast<std::size_t>(j)] = i;
    }
    return detail::sweep_rows(poly, order, [&](std::int64_t lo, std::int64_t hi, std::int64_t b) -> std::uint64_t {
        if (b == 0) return (lo <= 1 && 1 <= hi ? 1 : 0) + (lo <= -1 && -1 <= hi ? 1 : 0);
        std::vector<std::int64_t> primes;
        for (std::int64_t r = b < 0 ? -b : b; r > 1;) {
            const std::int64_t p = spf[static_cast<std::size_t>(r)];
            primes.push_back(p);
            while (r % p == 0) r /= p;
        }
        auto floor_div = [](std::int64_t x, std::int64_t d) { return x >= 0 ? x / d : -((-x + d - 1) / d); };
        std::int64_t count = 0;
        const std::size_t subsets = std::size_t{1} << primes.size();
        for (std::size_t mask = 0; mask < subsets; ++mask) {
            std::int64_t d = 1;
            int sign = 1;
            for (std::size_t j = 0; j < primes.size(); ++j) {
                if (mask & (std::size_t{1} << j)) {
                    d *= primes[j];
                    sign = -sign;
                }
            }
            count += sign * (floor_div(hi, d) - floor_div(lo - 1, d));
        }
        return static_cast<std::uint64_t>(count);
    });
}

inline constexpr std::int64_t kSweepOrderLimit = 2000;

inline std::uint64_t visible_count(const ConvexPolygon& poly, std::int64_t order) {
    return order <= kSweepOrderLimit ? visible_count_sweep(poly, order) : visible_count_mobius(poly, order);
}

}  // namespace farey_lab

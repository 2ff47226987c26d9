#include "farey_lab/cell_cache.hpp"
#include "farey_lab/farey_core.hpp"
#include "farey_lab/geometry.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

using namespace farey_lab;

namespace {

Rat R(std::int64_t p, std::int64_t q = 1) { return make_rat(p, q); }
Point P(std::int64_t a, std::int64_t b, std::int64_t den) { return {R(a, den), R(b, den)}; }

Point random_point_in_T(std::mt19937_64& rng) {
    const std::int64_t den = std::uniform_int_distribution<std::int64_t>(2, 500)(rng);
    while (true) {
        const std::int64_t a = std::uniform_int_distribution<std::int64_t>(0, den)(rng);
        const std::int64_t b = std::uniform_int_distribution<std::int64_t>(1, den)(rng);
        if (a + b > den) return P(a, b, den);
    }
}

bool in_closed_T(const Point& p) { return p.x >= 0 && p.y >= 0 && p.x <= 1 && p.y <= 1 && p.x + p.y >= 1; }

}  // namespace

TEST(ConvexPolygon, NormalizesInput) {
    // Clockwise square with a repeated vertex and a collinear midpoint.
    ConvexPolygon sq({{R(0), R(0)}, {R(0), R(1)}, {R(0), R(1)}, {R(1), R(1)}, {R(1), R(1, 2)}, {R(1), R(0)}});
    EXPECT_EQ(sq.size(), 4u);
    EXPECT_TRUE(sq.is_valid_convex());
    EXPECT_EQ(area(sq), 1);
    EXPECT_TRUE(ConvexPolygon({{R(0), R(0)}, {R(1), R(1)}, {R(2), R(2)}}).empty());
    EXPECT_TRUE(ConvexPolygon({{R(0), R(0)}, {R(1), R(1)}}).empty());
    EXPECT_EQ(area(ConvexPolygon{}), 0);
}

TEST(FareyTriangle, Basics) {
    const auto t = farey_triangle();
    EXPECT_EQ(area(t), R(1, 2));
    EXPECT_TRUE(in_farey_triangle({R(2, 3), R(1, 2)}));
    EXPECT_FALSE(in_farey_triangle({R(1, 2), R(1, 2)}));
    EXPECT_FALSE(in_farey_triangle({R(3, 2), R(1, 2)}));
}

TEST(BczMap, Examples) {
    EXPECT_EQ(bcz_apply({R(2, 3), R(1, 2)}), (Point{R(1, 2), R(5, 6)}));
    EXPECT_EQ(bcz_apply({R(1), R(1)}), (Point{R(1), R(1)}));
    EXPECT_EQ(bcz_apply({R(3, 5), R(4, 5)}), (Point{R(4, 5), R(1)}));
    EXPECT_THROW(bcz_apply({R(1, 2), R(1, 2)}), std::domain_error);
    EXPECT_THROW(bcz_apply({R(1), R(0)}), std::domain_error);
}

TEST(Kappa, Examples) {
    EXPECT_EQ(kappa({R(1, 3), R(1)}, 1), 1);
    EXPECT_EQ(kappa({R(1, 3), R(1)}, 2), 3);
    for (int i = 1; i <= 6; ++i) EXPECT_EQ(kappa({R(1), R(1)}, i), 2);
    EXPECT_THROW(kappa({R(1), R(1)}, 0), std::domain_error);
    EXPECT_THROW(kappa({R(0), R(1, 2)}, 1), std::domain_error);
}

TEST(BczMap, StaysInTriangleAndConjugatesKappa) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const Point p = random_point_in_T(rng);
        Point q = p;
        for (int i = 1; i <= 4; ++i) {
            q = bcz_apply(q);
            ASSERT_TRUE(in_farey_triangle(q)) << q;
            EXPECT_EQ(kappa1(q), kappa(p, i + 1));
        }
    }
}

TEST(BczMap, ShiftsDenominatorPairs) {
    for (std::int64_t order = 1; order <= 50; ++order) {
        const auto ref = oracle::farey(order);
        const auto n = static_cast<std::int64_t>(ref.size());
        for (std::int64_t j = 1; j <= n; ++j) {
            const Point p{R(oracle::gamma(ref, j - 1).q, order), R(oracle::gamma(ref, j).q, order)};
            const Point next{R(oracle::gamma(ref, j).q, order), R(oracle::gamma(ref, j + 1).q, order)};
            EXPECT_EQ(bcz_apply(p), next);
            for (std::int64_t i = 0; i < 4; ++i) EXPECT_EQ(kappa(p, i + 1), oracle::nu(ref, j + i, 2));
        }
    }
}

TEST(Regions, TkExamples) {
    EXPECT_EQ(region_Tk(1), ConvexPolygon({{R(0), R(1)}, {R(1, 3), R(2, 3)}, {R(1), R(1)}}));
    EXPECT_EQ(area(region_Tk(1)), R(1, 6));
    EXPECT_EQ(area(region_Tk(2)), R(1, 6));
    EXPECT_EQ(area(region_Tk(3)), R(1, 15));
    for (std::int64_t k = 2; k <= 50; ++k) EXPECT_EQ(area(region_Tk(k)), R(2, k * (k + 1)) - R(2, (k + 1) * (k + 2))) << k;
    EXPECT_THROW(region_Tk(0), std::domain_error);
}

TEST(Regions, StarAreas) {
    EXPECT_EQ(area(region_Tk_star(1)), R(1, 2));
    EXPECT_EQ(area(region_Tk_star(2)), R(1, 3));
    EXPECT_EQ(area(region_Tk_star(3)), R(1, 6));
    for (std::int64_t k = 2; k <= 100; ++k) EXPECT_EQ(area(region_Tk_star(k)), star_area_formula(k)) << k;
    // The closed form read at k = 1 gives 1, twice the area of T.
    EXPECT_EQ(star_area_formula(1), 1);
}

TEST(Regions, Partition) {
    for (std::int64_t limit = 1; limit <= 40; ++limit) {
        Rat covered = 0;
        for (std::int64_t k = 1; k <= limit; ++k) covered += area(region_Tk(k));
        EXPECT_EQ(area(farey_triangle()) - covered, area(region_Tk_star(limit + 1))) << limit;
    }
}

TEST(Clip, Examples) {
    const auto t = farey_triangle();
    EXPECT_EQ(clip(t, {R(1), R(0), R(1)}), t);
    EXPECT_TRUE(clip(t, {R(1), R(0), R(0)}).empty());
    const auto q = clip(t, {R(-1), R(2), R(1)});
    EXPECT_EQ(q, ConvexPolygon({{R(1, 3), R(2, 3)}, {R(1), R(0)}, {R(1), R(1)}}));
    EXPECT_EQ(area(q), R(1, 3));
    EXPECT_EQ(q, region_Tk_star(2));
    EXPECT_TRUE(clip(ConvexPolygon{}, {R(1), R(0), R(1)}).empty());
}

TEST(UnimodularMap, Algebra) {
    EXPECT_THROW(UnimodularMap::make(2, 0, 0, 1), std::domain_error);
    const auto m = UnimodularMap::make(2, 1, 1, 1);
    EXPECT_EQ(m * m.inverse(), UnimodularMap::identity());
    for (std::int64_t k = 1; k <= 5; ++k) {
        EXPECT_EQ(UnimodularMap::branch(k).det(), 1);
        EXPECT_EQ(UnimodularMap::branch(k).inverse(), UnimodularMap::inverse_branch(k));
    }
    const Point p{R(1, 3), R(3, 4)};
    const auto a = UnimodularMap::branch(2), b = UnimodularMap::branch(3);
    EXPECT_EQ((a * b).apply(p), a.apply(b.apply(p)));
}

TEST(MapPolygon, Examples) {
    const auto t1 = region_Tk(1);
    EXPECT_EQ(area(map_polygon(t1, UnimodularMap::branch(1))), R(1, 6));
    EXPECT_EQ(map_polygon(t1, UnimodularMap::identity()), t1);
    const auto img = map_polygon(region_Tk(2), UnimodularMap::branch(2));
    EXPECT_EQ(area(img), R(1, 6));
    for (const auto& v : img.vertices()) EXPECT_TRUE(in_closed_T(v)) << v;
}

TEST(MapPolygon, ImageOfSlabIsItsMirror) {
    for (std::int64_t k = 1; k <= 30; ++k) EXPECT_EQ(map_polygon(region_Tk(k), UnimodularMap::branch(k)), swap_axes(region_Tk(k))) << k;
}

TEST(Cells, DepthOneExamples) {
    const auto cells = enumerate_cells(1, 3);
    ASSERT_EQ(cells.size(), 3u);
    EXPECT_EQ(area(cells[0].region), R(1, 6));
    EXPECT_EQ(area(cells[1].region), R(1, 6));
    EXPECT_EQ(area(cells[2].region), R(1, 15));
    EXPECT_THROW(enumerate_cells(0, 3), std::domain_error);
    EXPECT_THROW(enumerate_cells(1, 0), std::domain_error);
}

TEST(Cells, DisjointnessExcludesLargePairs) {
    const auto cells = enumerate_cells(2, 12);
    for (const auto& c : cells) EXPECT_FALSE(c.itinerary[0] > 6 && c.itinerary[1] > 6) << c.itinerary[0] << ' ' << c.itinerary[1];
    bool seen77 = false;
    for (const auto& c : cells) seen77 |= c.itinerary == std::vector<std::int64_t>{7, 7};
    EXPECT_FALSE(seen77);
    for (const auto& c : enumerate_cells(4, 16))
        for (std::size_t a = 0; a < c.itinerary.size(); ++a)
            for (std::size_t b = a + 1; b < c.itinerary.size(); ++b) {
                const auto h = static_cast<std::int64_t>(b - a);
                EXPECT_FALSE(c.itinerary[a] > 4 * h + 2 && c.itinerary[b] > 4 * h + 2);
            }
}

TEST(Cells, InvariantsAtModerateDepth) {
    for (std::size_t depth : {1u, 2u, 3u}) {
        for (std::int64_t limit : {2, 5, 12}) {
            const auto cells = enumerate_cells(depth, limit);
            Rat covered = 0;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                const auto& c = cells[i];
                ASSERT_EQ(c.itinerary.size(), depth);
                EXPECT_TRUE(c.region.is_valid_convex());
                EXPECT_EQ(area(c.region), area(c.forward_image));
                EXPECT_GT(area(c.region), 0);
                EXPECT_EQ(map_polygon(c.region, c.composed_map), c.forward_image);
                if (i) { EXPECT_LT(cells[i - 1].itinerary, c.itinerary); }
                const Point centre = c.region.centroid_of_vertices();
                for (std::size_t j = 0; j < depth; ++j) EXPECT_EQ(kappa(centre, static_cast<std::int64_t>(j + 1)), c.itinerary[j]);
                covered += area(c.region);
            }
            EXPECT_LE(covered, R(1, 2));
            EXPECT_LE(R(1, 2) - covered, Rat(static_cast<long>(depth)) * R(2, (limit + 1) * (limit + 2)));
        }
    }
}

TEST(Cells, SummariesMatchFullCells) {
    const auto full = enumerate_cells(3, 9, 2);
    const auto brief = cell_summaries(3, 9, 3);
    ASSERT_EQ(full.size(), brief.size());
    for (std::size_t i = 0; i < full.size(); ++i) {
        EXPECT_EQ(full[i].itinerary, brief[i].itinerary);
        EXPECT_EQ(area(full[i].region), brief[i].area);
    }
}

TEST(TailPattern, CertifiedWindow) {
    const auto none = tail_pattern(1, 5);
    ASSERT_TRUE(none);
    EXPECT_TRUE(none->forward.empty());
    const auto p = tail_pattern(3, 60);
    ASSERT_TRUE(p);
    EXPECT_EQ(p->forward, (std::vector<std::int64_t>{1, 2}));
    EXPECT_EQ(p->backward, (std::vector<std::int64_t>{1, 2}));
    EXPECT_EQ(p->at(1), 1);
    EXPECT_EQ(p->at(-2), 2);
    EXPECT_THROW((void)p->at(0), std::domain_error);
    EXPECT_FALSE(tail_pattern(3, 4));
}

TEST(TailPattern, MatchesSampledOrbits) {
    const std::int64_t limit = 30;
    const auto p = tail_pattern(5, limit);
    ASSERT_TRUE(p);
    std::mt19937_64 rng(23);
    int tested = 0;
    while (tested < 300) {
        const Point x = random_point_in_T(rng);
        if (kappa1(x) <= limit) continue;
        ++tested;
        Point fwd = x;
        for (std::size_t h = 1; h <= p->forward.size(); ++h) {
            fwd = bcz_apply(fwd);
            EXPECT_EQ(kappa1(fwd), p->forward[h - 1]);
        }
        // T^{-1}(x, y) = (k x - y, x) with k = floor((1 + y) / x).
        Point back = x;
        for (std::size_t h = 1; h <= p->backward.size(); ++h) {
            const auto k = floor_rat((1 + back.y) / back.x);
            back = {Rat(k) * back.x - back.y, back.x};
            ASSERT_TRUE(in_farey_triangle(back));
            EXPECT_EQ(kappa1(back), p->backward[h - 1]);
        }
    }
}

TEST(VisibleCount, Examples) {
    EXPECT_EQ(visible_count(farey_triangle(), 3), 4u);
    EXPECT_EQ(visible_count(farey_triangle(), 5), 10u);
    EXPECT_EQ(visible_count(farey_triangle(), 1), 1u);
    EXPECT_THROW(visible_count(farey_triangle(), 0), std::domain_error);
    EXPECT_EQ(visible_count(ConvexPolygon{}, 10), 0u);
}

TEST(VisibleCount, BijectionWithFareyPairs) {
    for (std::int64_t q = 1; q <= 150; ++q) EXPECT_EQ(visible_count(farey_triangle(), q), count_farey(static_cast<std::uint64_t>(q))) << q;
}

TEST(VisibleCount, SweepAndMobiusAgree) {
    for (std::int64_t q : {1, 7, 60, 211}) {
        for (const auto& poly : {farey_triangle(), region_Tk(1), region_Tk(3), region_Tk_star(2), region_Tk_star(5)})
            EXPECT_EQ(visible_count_sweep(poly, q), visible_count_mobius(poly, q)) << q;
    }
}

TEST(VisibleCount, SlabCountsMatchKappaOfDenominatorPairs) {
    for (std::int64_t q : {10, 37}) {
        const auto seq = nu2_sequence(q);
        for (std::int64_t k = 1; k <= 5; ++k) {
            // Points on a shared slab edge are counted by both closed slabs, so
            // compare the exclusive tail instead: kappa >= k is T^*_k, closed at y = (1+x)/k.
            const auto expect = static_cast<std::uint64_t>(std::count_if(seq.begin(), seq.end(), [&](auto v) { return v >= k; }));
            EXPECT_EQ(visible_count(region_Tk_star(k), q), expect) << q << ' ' << k;
        }
    }
}

TEST(CellCache, RoundTrip) {
    const auto dir = std::filesystem::temp_directory_path() / "farey_lab_cache_test";
    std::filesystem::create_directories(dir);
    const auto file = dir / "cells.txt";
    const auto cells = enumerate_cells(2, 6);
    write_cell_cache(file, 2, 6, cells);
    const auto back = read_cell_cache(file, 2, 6);
    ASSERT_TRUE(back);
    ASSERT_EQ(back->size(), cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        EXPECT_EQ((*back)[i].itinerary, cells[i].itinerary);
        EXPECT_EQ((*back)[i].region, cells[i].region);
        EXPECT_EQ((*back)[i].forward_image, cells[i].forward_image);
        EXPECT_EQ((*back)[i].composed_map, cells[i].composed_map);
    }
    EXPECT_FALSE(read_cell_cache(file, 2, 7));
    EXPECT_FALSE(read_cell_cache(dir / "missing.txt", 2, 6));
    EXPECT_EQ(parse_cell_record(cell_record(cells[0])).region, cells[0].region);

    std::ofstream(dir / "bad.txt") << cache_header(2, 6) << "\n1 2 | 1/2,x\n";
    EXPECT_THROW(read_cell_cache(dir / "bad.txt", 2, 6), std::exception);
    std::filesystem::remove_all(dir);
}

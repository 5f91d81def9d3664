#include "uniwalsh/error.hpp"
#include "uniwalsh/series.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace uniwalsh;

namespace {

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<Coefficient2D> random_block(std::mt19937_64& rng, Freq lo, Freq hi, int count) {
    std::uniform_int_distribution<Freq> f(lo, hi - 1);
    std::uniform_real_distribution<double> u(-1, 1);
    std::map<std::pair<Freq, Freq>, double> m;
    for (int i = 0; i < count; ++i) m[{f(rng), f(rng)}] = u(rng);
    std::vector<Coefficient2D> out;
    for (auto& [kv, c] : m) out.push_back({kv.first, kv.second, c});
    return out;
}

double max_abs_diff(const Grid2D& a, const Grid2D& b) {
    double d = 0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

// Exhaustive max over subsets e of E of integral_e (|g| - budget).
double brute_worst_subset(const Grid2D& g, const Grid2D& budget, const DyadicSet2D& E) {
    double best = 0.0;
    for (unsigned mask = 0; mask < (1u << g.size()); ++mask) {
        double s = 0.0;
        bool inside = true;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (mask >> k & 1) {
                if (!E.contains(k)) inside = false;
                s += (std::abs(g[k]) - budget[k]) * g.cell_area();
            }
        if (inside) best = std::max(best, s);
    }
    return best;
}

}  // namespace

TEST(Coefficients, NormalizeSortsAndDropsZeros) {
    std::vector<Coefficient2D> c{{3, 1, 0.5}, {1, 2, 0.0}, {1, 1, -1.0}};
    normalize(c);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0], (Coefficient2D{1, 1, -1.0}));
    EXPECT_EQ(max_frequency(c), 3);
    std::vector<Coefficient2D> dup{{1, 1, 1.0}, {1, 1, 2.0}};
    EXPECT_THROW(normalize(dup), std::invalid_argument);
}

TEST(Series, BlocksAndBoundaries) {
    WalshSeries2D s;
    EXPECT_EQ(s.depth(), 0u);
    EXPECT_EQ(s.nnz(), 0u);
    s.append_block({{1, 1, 0.5}}, 2);
    s.append_block({{3, 4, 0.25}, {2, 2, -1}}, 5);
    EXPECT_EQ(s.depth(), 2u);
    EXPECT_EQ(std::vector<Freq>(s.boundaries().begin(), s.boundaries().end()), (std::vector<Freq>{1, 2, 5}));
    EXPECT_EQ(s.block(2).size(), 2u);
    EXPECT_EQ(s.block(2)[0].k, 2);
    EXPECT_TRUE(s.block_diagonal());
    EXPECT_THROW(s.append_block({{4, 9, 1.0}}, 8), std::invalid_argument);
    EXPECT_THROW(s.append_block({}, 5), std::invalid_argument);
}

TEST(PartialSums, EmptyAndSingleTerm) {
    const std::vector<Coefficient2D> none;
    const Grid2D zero = rect_partial_sum(none, 3, 3, 2, 2);
    for (double v : zero.values()) EXPECT_EQ(v, 0.0);
    const std::vector<Coefficient2D> one{{1, 1, 1.0}};
    const Grid2D r = rect_partial_sum(one, 1, 1, 1, 1);
    EXPECT_EQ(as_vector(r.values()), (std::vector<double>{1, -1, -1, 1}));
    EXPECT_THROW(rect_partial_sum(one, 1, 1, 0, 1), ResolutionError);
}

TEST(PartialSums, FullRectangleIsTransformReconstruction) {
    std::mt19937_64 rng(21);
    const auto c = random_block(rng, 0, 16, 40);
    std::vector<double> dense(256, 0.0);
    for (const auto& x : c) dense[static_cast<std::size_t>(x.k * 16 + x.v)] = x.value;
    const Grid2D full = inverse_fwht2d(dense, 4, 4);
    EXPECT_LT(max_abs_diff(rect_partial_sum(c, 15, 20, 4, 4), full), 1e-12);
    EXPECT_LT(max_abs_diff(synthesize(c, 4, 4), full), 1e-12);
}

TEST(PartialSums, SphericalSingleTerm) {
    const std::vector<Coefficient2D> one{{1, 1, 1.0}};
    const Grid2D a = sph_partial_sum(one, radius_squared_floor(std::sqrt(2.0)), 0, 1, 1);
    EXPECT_EQ(as_vector(a.values()), (std::vector<double>{1, -1, -1, 1}));
    // No lattice point 1 <= k, v with 2 < k^2 + v^2 <= 4.
    const Grid2D b = sph_partial_sum(one, radius_squared_floor(2.0), 0, 1, 1);
    EXPECT_EQ(as_vector(b.values()), as_vector(a.values()));
    const Grid2D outside = sph_partial_sum(one, 4, 5, 1, 1);
    for (double v : outside.values()) EXPECT_EQ(v, 0.0);
}

TEST(PartialSums, RadiusSquaredFloor) {
    EXPECT_EQ(radius_squared_floor(std::sqrt(2.0)), 2);
    EXPECT_EQ(radius_squared_floor(std::sqrt(2.0) * 7), 98);
    EXPECT_EQ(radius_squared_floor(2.5), 6);
}

TEST(DistinctCuts, SingleCoefficient) {
    const std::vector<Coefficient2D> one{{2, 3, 1.0}};
    const auto cuts = distinct_cuts(one, CutRange{2, 3}, CutRange{2, 3});
    EXPECT_EQ(cuts.rect_x, (std::vector<Freq>{2}));
    EXPECT_EQ(cuts.rect_y, (std::vector<Freq>{-1, 3}));
    EXPECT_EQ(cuts.sph, (std::vector<std::int64_t>{-1, 13}));
}

TEST(DistinctCuts, BlockOnFourCoefficients) {
    const std::vector<Coefficient2D> c{{3, 9, 0.5}, {3, 10, -0.25}, {4, 9, 0.125}, {4, 10, 1.0}};
    const CutRange range{3, 10};
    std::set<std::vector<double>> brute;
    for (Freq n = range.lo; n <= range.hi; ++n)
        for (Freq m = range.lo; m <= range.hi; ++m) {
            const Grid2D g = rect_partial_sum(c, n, m, 4, 4);
            if (sup_norm(g) > 0) brute.insert(as_vector(g.values()));
        }
    EXPECT_EQ(brute.size(), 4u);

    const auto cuts = distinct_cuts(c, range, range);
    std::set<std::vector<double>> swept;
    sweep_rect(c, cuts, 4, 4, [&](Freq, Freq, const Grid2D& g) {
        if (sup_norm(g) > 0) swept.insert(as_vector(g.values()));
    });
    EXPECT_EQ(swept, brute);
    EXPECT_EQ(cuts.sph, (std::vector<std::int64_t>{-1, 90, 97, 109, 116}));
    EXPECT_TRUE(std::is_sorted(cuts.sph.begin(), cuts.sph.end()));
    EXPECT_TRUE(std::adjacent_find(cuts.sph.begin(), cuts.sph.end()) == cuts.sph.end());
}

TEST(Sweeps, MatchDirectSumsAtEveryCut) {
    std::mt19937_64 rng(33);
    const auto c = random_block(rng, 5, 14, 25);
    const CutRange range{5, 13};
    const auto cuts = distinct_cuts(c, range, range);
    sweep_rect(c, cuts, 4, 4, [&](Freq n, Freq m, const Grid2D& g) {
        ASSERT_LT(max_abs_diff(g, rect_partial_sum(c, n, m, 4, 4)), 1e-12) << n << "," << m;
    });
    sweep_sph(c, cuts, 4, 4, [&](std::int64_t t, const Grid2D& g) {
        ASSERT_LT(max_abs_diff(g, sph_partial_sum(c, t, cuts.sph_lower, 4, 4)), 1e-12) << t;
    });
    // Every cut value in the range reproduces one of the swept grids.
    for (Freq n = range.lo; n <= range.hi; ++n)
        for (Freq m = range.lo; m <= range.hi; ++m) {
            const Grid2D g = rect_partial_sum(c, n, m, 4, 4);
            bool found = false;
            sweep_rect(c, cuts, 4, 4, [&](Freq, Freq, const Grid2D& h) { found |= max_abs_diff(g, h) < 1e-12; });
            ASSERT_TRUE(found) << n << "," << m;
        }
}

TEST(Sweeps, PrefixSums1D) {
    const std::vector<Coefficient1D> c{{2, 0.5}, {5, -1.0}, {6, 0.25}};
    const auto cuts = distinct_cuts_1d(c, CutRange{2, 7});
    EXPECT_EQ(cuts, (std::vector<Freq>{2, 5, 6}));
    std::vector<Freq> seen;
    sweep_prefix(c, cuts, 3, [&](Freq m, const Grid1D& g) {
        seen.push_back(m);
        std::vector<Coefficient1D> head;
        for (const auto& x : c)
            if (x.k <= m) head.push_back(x);
        const Grid1D direct = synthesize(head, 3);
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], direct[i], 1e-14);
    });
    EXPECT_EQ(seen, cuts);
}

TEST(PowerNorm, Values) {
    EXPECT_EQ(coeff_power_norm(std::vector<Coefficient2D>{}, 2.5), 0.0);
    EXPECT_NEAR(coeff_power_norm(std::vector<Coefficient2D>{{1, 1, 0.1}}, 3.0), 0.001, 1e-15);
    EXPECT_THROW(coeff_power_norm(std::vector<Coefficient2D>{{1, 1, 0.1}}, 0.0), std::invalid_argument);
}

TEST(PowerNorm, DecreasingInExponentForSmallCoefficients) {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        const auto c = random_block(rng, 1, 30, 20);
        double prev = coeff_power_norm(c, 2.0);
        for (double e : {2.1, 2.5, 3.0, 4.0}) {
            const double cur = coeff_power_norm(c, e);
            EXPECT_LE(cur, prev);
            prev = cur;
        }
    }
}

TEST(WorstSubset, TrivialCases) {
    EXPECT_EQ(worst_subset_margin(Grid2D(2, 2), Grid2D(2, 2), DyadicSet2D(2, 2)), 0.0);
    EXPECT_EQ(worst_subset_margin(Grid2D(2, 2, 1.0), Grid2D(2, 2), DyadicSet2D(2, 2)), 1.0);
}

TEST(WorstSubset, FrozenExhaustiveValue) {
    DyadicSet2D E(1, 1);
    E.set(2, false);
    EXPECT_EQ(worst_subset_margin(Grid2D(1, 1, {1.5, -0.5, 2.0, -3.0}), Grid2D(1, 1, 1.0), E), 0.625);
}

TEST(WorstSubset, MatchesExhaustiveSearch) {
    // Multiples of 1/8 keep every partial sum exact, so equality is exact.
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> u(-16, 16), b(0, 12);
    std::bernoulli_distribution coin(0.7);
    for (int t = 0; t < 200; ++t) {
        Grid2D g(1, 1), budget(1, 1);
        DyadicSet2D E(1, 1);
        for (std::size_t k = 0; k < 4; ++k) {
            g[k] = u(rng) / 8.0;
            budget[k] = b(rng) / 8.0;
            E.set(k, coin(rng));
        }
        EXPECT_EQ(worst_subset_margin(g, budget, E), brute_worst_subset(g, budget, E));
    }
}

TEST(CombinedSums, ConstantBudgetIsSumOfMaxima) {
    std::mt19937_64 rng(8);
    const auto c = random_block(rng, 2, 8, 12);
    DyadicSet2D E(3, 3);
    for (std::size_t k = 0; k < E.size(); k += 5) E.set(k, false);
    const auto cuts = distinct_cuts(c, CutRange{2, 7}, CutRange{2, 8});
    const auto s = combined_sums_constant(c, cuts, E);
    double rect = 0, sph = 0;
    sweep_rect(c, cuts, 3, 3, [&](Freq, Freq, const Grid2D& g) { rect = std::max(rect, restricted_l1(g, E)); });
    sweep_sph(c, cuts, 3, 3, [&](std::int64_t, const Grid2D& g) { sph = std::max(sph, restricted_l1(g, E)); });
    EXPECT_NEAR(s.rect_max, rect, 1e-14);
    EXPECT_NEAR(s.sph_max, sph, 1e-14);
    EXPECT_NEAR(s.excess, rect + sph, 1e-14);
}

TEST(CombinedSums, DensityPairsMatchBruteForceAndSplitBoundsIt) {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(0, 1);
    const auto c = random_block(rng, 2, 4, 4);
    DyadicSet2D E(2, 2);
    E.set(3, false);
    Grid2D density(2, 2);
    for (std::size_t k = 0; k < density.size(); ++k) density[k] = u(rng);
    const auto cuts = distinct_cuts(c, CutRange{2, 3}, CutRange{2, 4});

    std::vector<Grid2D> rects, sphs;
    sweep_rect(c, cuts, 2, 2, [&](Freq, Freq, const Grid2D& g) { rects.push_back(g); });
    sweep_sph(c, cuts, 2, 2, [&](std::int64_t, const Grid2D& g) { sphs.push_back(g); });
    double brute = 0.0;
    for (const auto& r : rects)
        for (const auto& s : sphs) {
            Grid2D lhs(2, 2);
            for (std::size_t k = 0; k < lhs.size(); ++k) lhs[k] = std::abs(r[k]) + std::abs(s[k]);
            brute = std::max(brute, brute_worst_subset(lhs, density, E));
        }
    const auto exact = combined_sums_density(c, cuts, E, density);
    EXPECT_EQ(exact.mode, "pairs");
    EXPECT_NEAR(exact.excess, brute, 1e-14);

    PairLimits none;
    none.max_pairs = 0;
    const auto split = combined_sums_density(c, cuts, E, density, none);
    EXPECT_EQ(split.mode, "split");
    EXPECT_GE(split.excess, exact.excess - 1e-14);
}

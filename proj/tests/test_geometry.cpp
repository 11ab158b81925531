#include "extlab/geometry.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace extlab;
using testutil::box;
using testutil::collection;

namespace {

CubeCollection remark_collection() {
    return collection(2, {box({{1, 4}, {2, 3}}), box({{0, 2}, {0, 1}}), box({{3, 5}, {0, 1}})});
}

CubeCollection diagonal_triple() {
    return collection(2, {uniform_cube(2, 0, 1), uniform_cube(2, 2, 3), uniform_cube(2, 4, 5)});
}

}  // namespace

TEST(Projections, ClosedDisjointness) {
    EXPECT_TRUE(closed_projections_disjoint(uniform_cube(2, 0, 1), uniform_cube(2, 2, 3), 0));
    EXPECT_FALSE(closed_projections_disjoint(uniform_cube(2, 0, 1), uniform_cube(2, 1, 2), 0));
    EXPECT_FALSE(closed_projections_disjoint(box({{1, 4}, {2, 3}}), box({{0, 2}, {0, 1}}), 0));
    EXPECT_TRUE(closed_projections_disjoint(box({{1, 4}, {2, 3}}), box({{0, 2}, {0, 1}}), 1));
    EXPECT_THROW(closed_projections_disjoint(uniform_cube(2, 0, 1), uniform_cube(2, 2, 3), 2), std::out_of_range);
}

TEST(Projections, PointProjectionsFollowClosedRule) {
    EXPECT_FALSE(closed_projections_disjoint(box({{1, 1}}), box({{1, 2}}), 0));
    EXPECT_TRUE(closed_projections_disjoint(box({{1, 1}}), box({{ratio(11, 10), 2}}), 0));
}

TEST(WeakTransversality, DiagonalTripleAssignment) {
    auto a = weakly_transversal_with_pivot(diagonal_triple(), 0);
    ASSERT_TRUE(a);
    EXPECT_EQ(a->axis_of.at(1), 0u);
    EXPECT_EQ(a->axis_of.at(2), 1u);
    EXPECT_EQ(a->min_separation, 1);
    EXPECT_TRUE(is_weakly_transversal(diagonal_triple()));
}

TEST(WeakTransversality, IdenticalCubesFail) {
    auto c = collection(2, {uniform_cube(2, 0, 1), uniform_cube(2, 0, 1)});
    EXPECT_FALSE(weakly_transversal_with_pivot(c, 0));
    EXPECT_FALSE(is_weakly_transversal(collection(1, {box({{0, 1}}), box({{0, 1}})})));
}

TEST(WeakTransversality, RemarkCollectionFailsAtFirstPivot) {
    EXPECT_FALSE(weakly_transversal_with_pivot(remark_collection(), 0));
}

TEST(WeakTransversality, StaircaseExamples) {
    auto c = collection(2, {uniform_cube(2, 0, 1), box({{4, 5}, {0, 1}}), uniform_cube(2, 2, 3)});
    EXPECT_TRUE(is_weakly_transversal(c));
    for (std::size_t d = 1; d <= 4; ++d)
        for (std::size_t k = 1; k <= d + 1; ++k) EXPECT_TRUE(is_weakly_transversal(testutil::staircase(d, k)));
}

TEST(WeakTransversality, PivotOutOfRange) {
    EXPECT_THROW(weakly_transversal_with_pivot(diagonal_triple(), 3), std::out_of_range);
}

TEST(WeakTransversality, MatchesExhaustiveOracle) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 3000; ++trial) {
        std::size_t d = 1 + rng() % 5;
        std::size_t k = 1 + rng() % std::min<std::size_t>(6, d + 1);
        std::vector<RationalCube> cubes;
        for (std::size_t j = 0; j < k; ++j) cubes.push_back(testutil::random_cube(rng, d, 6, true));
        auto coll = collection(d, cubes);
        for (std::size_t p = 0; p < k; ++p) {
            auto a = weakly_transversal_with_pivot(coll, p);
            ASSERT_EQ(a.has_value(), testutil::exhaustive_weakly_transversal(coll, p));
            if (!a) continue;
            std::vector<bool> used(d, false);
            for (auto [j, axis] : a->axis_of) {
                EXPECT_FALSE(used[axis]);
                used[axis] = true;
                EXPECT_TRUE(closed_projections_disjoint(coll.cubes[p], coll.cubes[j], axis));
            }
            EXPECT_EQ(a->axis_of.size(), k - 1);
        }
    }
}

TEST(TransversalityVector, Examples) {
    for (std::size_t d = 1; d <= 5; ++d)
        for (std::size_t k = 2; k <= d + 1; ++k) {
            auto tv = transversality_vector(testutil::staircase(d, k));
            EXPECT_EQ(tv.total, static_cast<int>(k - 1));
            for (std::size_t i = 0; i < d; ++i) EXPECT_EQ(tv.bits[i], i + 1 < k ? 1 : 0);
        }
    auto same = transversality_vector(collection(2, {uniform_cube(2, 0, 1), uniform_cube(2, 0, 1)}));
    EXPECT_EQ(same.bits, (std::vector<int>{0, 0}));
    EXPECT_EQ(same.total, 0);
    auto apart = transversality_vector(collection(2, {uniform_cube(2, 0, 1), uniform_cube(2, 2, 3)}));
    EXPECT_EQ(apart.bits, (std::vector<int>{1, 1}));
    EXPECT_EQ(apart.total, 2);
}

TEST(TransversalityVector, InvariantUnderPermutationAndDuplication) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        std::size_t d = 1 + rng() % 4, k = 1 + rng() % 5;
        std::vector<RationalCube> cubes;
        for (std::size_t j = 0; j < k; ++j) cubes.push_back(testutil::random_cube(rng, d, 3, true));
        auto base = transversality_vector(collection(d, cubes));
        auto shuffled = cubes;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(transversality_vector(collection(d, shuffled)).bits, base.bits);
        shuffled.push_back(cubes[rng() % k]);
        auto dup = transversality_vector(collection(d, shuffled));
        EXPECT_EQ(dup.bits, base.bits);
        EXPECT_EQ(dup.total, base.total);
    }
}

TEST(Wedge, HandComputedValues) {
    EXPECT_NEAR(wedge_volume(std::vector<RationalVector>{{0}, {2}}), 4.0 / std::sqrt(17.0), 1e-15);
    EXPECT_EQ(wedge_volume(std::vector<RationalVector>{{ratio(1, 3), 2}, {ratio(1, 3), 2}}), 0.0);
    EXPECT_DOUBLE_EQ(wedge_volume(std::vector<RationalVector>{{0, 0}}), 1.0);
    EXPECT_THROW(wedge_volume(std::vector<RationalVector>{{0}, {1}, {2}}), std::invalid_argument);
}

TEST(Wedge, OneDimensionalGramFormula) {
    // For d=1 the volume is |sin| of the angle between (-2a,1) and (-2b,1).
    for (double a : {-1.0, 0.0, 0.5, 3.0})
        for (double b : {-2.0, 0.25, 1.0, 4.0}) {
            double ua = 1 / std::sqrt(1 + 4 * a * a), ub = 1 / std::sqrt(1 + 4 * b * b);
            double cosang = (4 * a * b + 1) * ua * ub;
            EXPECT_NEAR(wedge_volume(std::vector<std::vector<double>>{{a}, {b}}), std::sqrt(1 - cosang * cosang), 1e-12);
        }
}

TEST(Wedge, GridEstimateDetectsDiagonalLine) {
    EXPECT_LT(min_wedge_grid_estimate(diagonal_triple(), 8), 0.05);
}

TEST(Wedge, GridEstimateOneDimensional) {
    auto c = collection(1, {box({{0, 1}}), box({{4, 5}})});
    double closest = wedge_volume(std::vector<RationalVector>{{1}, {4}});
    double est = min_wedge_grid_estimate(c, 4);
    EXPECT_GE(est, closest - 1e-12);
    EXPECT_NEAR(est, closest, 1e-12);
}

TEST(Wedge, SharedPointGivesZero) {
    auto c = collection(2, {uniform_cube(2, 0, 1), box({{1, 2}, {1, 3}}), box({{1, 5}, {0, 1}})});
    EXPECT_EQ(min_wedge_grid_estimate(c, 2), 0.0);
}

TEST(Refinement, SplitsAtEndpoints) {
    auto ref = refine_collection(collection(1, {box({{0, 1}}), box({{0, 2}})}));
    EXPECT_TRUE(ref.conditions_met);
    ASSERT_EQ(ref.pieces(0).size(), 1u);
    auto second = ref.pieces(1);
    ASSERT_EQ(second.size(), 2u);
    EXPECT_EQ(second[0], box({{0, 1}}));
    EXPECT_EQ(second[1], box({{1, 2}}));
}

TEST(Refinement, DisjointCollectionUnchanged) {
    auto coll = diagonal_triple();
    auto ref = refine_collection(coll);
    for (std::size_t j = 0; j < coll.size(); ++j) {
        ASSERT_EQ(ref.piece_count(j), 1u);
        EXPECT_EQ(ref.pieces(j)[0], coll.cubes[j]);
    }
}

TEST(Refinement, HalvesIntervalTouchedAtBothEnds) {
    auto ref = refine_collection(collection(1, {box({{-1, 0}}), box({{0, 2}}), box({{2, 3}})}));
    EXPECT_TRUE(ref.conditions_met);
    auto mid = ref.pieces(1);
    ASSERT_EQ(mid.size(), 2u);
    EXPECT_EQ(mid[0], box({{0, 1}}));
    EXPECT_EQ(mid[1], box({{1, 2}}));
}

TEST(Refinement, SharedPieceWithNeighboursOnBothSidesCannotConverge) {
    // Any partition leaves a selection where the shared piece is touched on both sides.
    auto ref = refine_collection(collection(1, {box({{0, 2}}), box({{0, 2}}), box({{-1, 0}}), box({{2, 3}})}));
    EXPECT_FALSE(ref.conditions_met);
}

TEST(Refinement, SelectionsSatisfyConditionsWhenConverged) {
    std::mt19937_64 rng(99);
    int converged = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t d = 1 + rng() % 3, k = 2 + rng() % d;
        std::vector<RationalCube> cubes;
        for (std::size_t j = 0; j < k; ++j) cubes.push_back(testutil::random_cube(rng, d, 5, trial % 3 == 0));
        auto coll = collection(d, cubes);
        auto dec = decompose_weakly_transversal(coll);
        if (!dec.refinement.conditions_met) continue;
        ++converged;
        std::uint64_t total = 0;
        for (const auto& sc : dec.classes) {
            EXPECT_TRUE(refinement_conditions_hold(sc.cubes));
            total += sc.multiplicity;
        }
        EXPECT_EQ(total, dec.selection_count);
    }
    EXPECT_GT(converged, 150);
}

TEST(Refinement, PivotModeGivesCommonContactPoints) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t d = 1 + rng() % 3, k = d + 1;
        std::vector<RationalCube> cubes;
        for (std::size_t j = 0; j < k; ++j) cubes.push_back(testutil::random_cube(rng, d, 5, trial % 4 == 0));
        auto dec = decompose_for_pivot(collection(d, cubes), 0);
        for (const auto& sc : dec.classes) EXPECT_TRUE(has_common_contact_points(sc.cubes, 0));
    }
}

TEST(Refinement, ClassesCoverEverySelection) {
    // Brute-force every selection and compare verdicts with the class representatives.
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t d = 1 + rng() % 2, k = d + 1;
        std::vector<RationalCube> cubes;
        for (std::size_t j = 0; j < k; ++j) cubes.push_back(testutil::random_cube(rng, d, 4, false));
        auto coll = collection(d, cubes);
        auto dec = decompose_weakly_transversal(coll);
        std::vector<std::vector<RationalCube>> pieces(k);
        for (std::size_t j = 0; j < k; ++j) pieces[j] = dec.refinement.pieces(j);
        std::uint64_t failing_direct = 0, failing_classes = 0;
        std::vector<std::size_t> idx(k, 0);
        while (true) {
            std::vector<RationalCube> sel;
            for (std::size_t j = 0; j < k; ++j) sel.push_back(pieces[j][idx[j]]);
            if (!is_weakly_transversal(collection(d, sel))) ++failing_direct;
            std::size_t j = 0;
            while (j < k && ++idx[j] == pieces[j].size()) idx[j++] = 0;
            if (j == k) break;
        }
        for (const auto& sc : dec.classes)
            if (!sc.weakly_transversal) failing_classes += sc.multiplicity;
        EXPECT_EQ(failing_direct, failing_classes);
    }
}

TEST(Decomposition, RemarkCollectionDecomposes) {
    auto dec = decompose_weakly_transversal(remark_collection());
    EXPECT_TRUE(dec.refinement.conditions_met);
    EXPECT_TRUE(dec.all_weakly_transversal);
    for (const auto& sc : dec.classes) {
        EXPECT_TRUE(sc.weakly_transversal);
        for (const auto& a : sc.per_pivot) EXPECT_TRUE(a.has_value());
    }
    EXPECT_GT(dec.selection_count, 1u);
}

TEST(Decomposition, WeaklyTransversalInputIsSingleSelection) {
    auto dec = decompose_weakly_transversal(diagonal_triple());
    EXPECT_EQ(dec.selection_count, 1u);
    ASSERT_EQ(dec.classes.size(), 1u);
    EXPECT_TRUE(dec.classes[0].weakly_transversal);
    EXPECT_EQ(dec.subcube_counts, (std::vector<std::uint64_t>{1, 1, 1}));
}

TEST(Decomposition, TransversalFuzzCorpusDecomposes) {
    std::mt19937_64 rng(2024);
    int transversal = 0;
    for (int trial = 0; trial < 400 && transversal < 40; ++trial) {
        std::size_t d = 1 + rng() % 2, k = 2 + rng() % d;
        std::vector<RationalCube> cubes;
        for (std::size_t j = 0; j < k; ++j) cubes.push_back(testutil::random_cube(rng, d, 6, false));
        auto coll = collection(d, cubes);
        if (min_wedge_grid_estimate(coll, 16) < 0.1) continue;
        ++transversal;
        auto dec = decompose_weakly_transversal(coll);
        EXPECT_TRUE(dec.refinement.conditions_met);
        for (const auto& sc : dec.classes) EXPECT_TRUE(is_weakly_transversal(sc.cubes));
    }
    EXPECT_GE(transversal, 20);
}

namespace {

// Exhaustive oracle for the matrix lemma: some (k-1)-row subset and permutation works.
bool matrix_lemma_oracle(const RationalMatrix& m, std::size_t column) {
    const std::size_t k = m.cols(), d = m.rows() - 1;
    std::vector<std::size_t> others;
    for (std::size_t c = 0; c < k; ++c)
        if (c != column) others.push_back(c);
    std::vector<std::size_t> rows(d);
    std::iota(rows.begin(), rows.end(), 0);
    do {
        bool ok = true;
        for (std::size_t l = 0; l < others.size() && ok; ++l) ok = m(rows[l], column) != m(rows[l], others[l]);
        if (ok) return true;
    } while (std::next_permutation(rows.begin(), rows.end()));
    return false;
}

}  // namespace

TEST(MatrixLemma, TwoColumns) {
    auto m = RationalMatrix::from_rows({{3, 7}, {1, 1}});
    auto r = matrix_lemma_rows(m, 0);
    EXPECT_EQ(r.rows, (std::vector<std::size_t>{0}));
    EXPECT_EQ(r.paired_columns, (std::vector<std::size_t>{1}));
}

TEST(MatrixLemma, Errors) {
    EXPECT_THROW(matrix_lemma_rows(RationalMatrix::from_rows({{0, 2, 4}, {0, 2, 4}, {1, 1, 1}}), 0),
                 std::invalid_argument);
    EXPECT_THROW(matrix_lemma_rows(RationalMatrix::from_rows({{0, 2}, {1, 2}}), 0), std::invalid_argument);
    EXPECT_THROW(matrix_lemma_rows(RationalMatrix::from_rows({{0, 2}, {1, 1}}), 2), std::invalid_argument);
    try {
        matrix_lemma_rows(RationalMatrix::from_rows({{0, 2, 4}, {0, 2, 4}, {1, 1, 1}}), 0);
    } catch (const std::invalid_argument& e) {
        EXPECT_STREQ(e.what(), "rank deficient");
    }
}

TEST(MatrixLemma, FuzzAgainstPermutationOracle) {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> entry(-5, 5);
    int cases = 0;
    while (cases < 400) {
        std::size_t k = 1 + rng() % 6, d = k - 1 + rng() % 3;
        if (d == 0) continue;
        RationalMatrix m(d + 1, k);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < k; ++c) m(r, c) = entry(rng);
        for (std::size_t c = 0; c < k; ++c) m(d, c) = 1;
        if (rank(m) != k) continue;
        ++cases;
        for (std::size_t col = 0; col < k; ++col) {
            ASSERT_TRUE(matrix_lemma_oracle(m, col));
            auto res = matrix_lemma_rows(m, col);
            ASSERT_EQ(res.rows.size(), k - 1);
            std::vector<bool> row_used(d, false), col_used(k, false);
            for (std::size_t l = 0; l < res.rows.size(); ++l) {
                EXPECT_LT(res.rows[l], d);
                EXPECT_FALSE(row_used[res.rows[l]]);
                EXPECT_FALSE(col_used[res.paired_columns[l]]);
                EXPECT_NE(res.paired_columns[l], col);
                row_used[res.rows[l]] = col_used[res.paired_columns[l]] = true;
                EXPECT_NE(m(res.rows[l], col), m(res.rows[l], res.paired_columns[l]));
            }
        }
    }
}

TEST(MinimalSubset, Examples) {
    EXPECT_FALSE(find_minimal_property_p_subset(diagonal_triple(), 0));

    auto one = find_minimal_property_p_subset(collection(1, {box({{0, 1}}), box({{0, 1}})}), 0);
    ASSERT_TRUE(one);
    EXPECT_EQ(one->members, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(one->directions, (std::vector<std::size_t>{0}));

    auto two = find_minimal_property_p_subset(collection(2, {uniform_cube(2, 0, 1), uniform_cube(2, 0, 1)}), 0);
    ASSERT_TRUE(two);
    EXPECT_EQ(two->members.size(), 2u);
    EXPECT_EQ(two->directions, (std::vector<std::size_t>{0, 1}));
}

TEST(MinimalSubset, RemarkCollectionNeedsAllThree) {
    auto ms = find_minimal_property_p_subset(remark_collection(), 0);
    ASSERT_TRUE(ms);
    EXPECT_EQ(ms->members, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(ms->directions, (std::vector<std::size_t>{0}));
}

TEST(MinimalSubset, MinimalityProperty) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t d = 1 + rng() % 3, k = d + 1;
        std::vector<RationalCube> cubes;
        for (std::size_t j = 0; j < k; ++j) cubes.push_back(testutil::random_cube(rng, d, 4, true));
        auto coll = collection(d, cubes);
        auto ms = find_minimal_property_p_subset(coll, 0);
        if (!ms) {
            EXPECT_TRUE(weakly_transversal_with_pivot(coll, 0));
            continue;
        }
        // Removing any single non-pivot member restores weak transversality.
        for (auto drop : ms->members) {
            if (drop == 0) continue;
            std::vector<RationalCube> sub;
            for (auto j : ms->members)
                if (j != drop) sub.push_back(coll.cubes[j]);
            EXPECT_TRUE(weakly_transversal_with_pivot(collection(d, sub), 0));
        }
        EXPECT_EQ(ms->directions.size() + ms->members.size(), d + 2);
    }
}

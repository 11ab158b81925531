#include "extlab/linalg.hpp"
#include "extlab/matching.hpp"
#include "extlab/rational.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace extlab;

TEST(Rational, ParsesFractionsAndDecimals) {
    EXPECT_EQ(parse_rational("3/6"), ratio(1, 2));
    EXPECT_EQ(parse_rational("-10/4"), ratio(-5, 2));
    EXPECT_EQ(parse_rational("0.125"), ratio(1, 8));
    EXPECT_EQ(parse_rational("-1.5"), ratio(-3, 2));
    EXPECT_EQ(parse_rational("2.5e-1"), ratio(1, 4));
    EXPECT_EQ(parse_rational("3e2"), Rational(300));
    EXPECT_EQ(parse_rational(" 7 "), Rational(7));
    EXPECT_EQ(parse_rational(".5"), ratio(1, 2));
}

TEST(Rational, RejectsMalformed) {
    EXPECT_THROW(parse_rational(""), std::invalid_argument);
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    EXPECT_THROW(parse_rational("a/2"), std::invalid_argument);
    EXPECT_THROW(parse_rational("1.2.3"), std::invalid_argument);
    EXPECT_THROW(parse_rational("."), std::invalid_argument);
    EXPECT_THROW(parse_rational("1/-2"), std::invalid_argument);
}

TEST(Rational, DecimalRoundTrip) {
    for (const char* s : {"0", "1", "-3", "0.5", "-0.25", "12.375", "0.0001", "1/3", "-2/7"}) {
        Rational r = parse_rational(s);
        EXPECT_EQ(parse_rational(to_decimal_string(r)), r) << s;
    }
    EXPECT_EQ(to_decimal_string(ratio(1, 8)), "0.125");
    EXPECT_EQ(to_decimal_string(ratio(-1, 20)), "-0.05");
    EXPECT_EQ(to_decimal_string(ratio(1, 3)), "1/3");
    EXPECT_EQ(to_decimal_string(from_double(0.1)), to_decimal_string(from_double(0.1)));
    EXPECT_EQ(from_double(0.75), ratio(3, 4));
}

TEST(Linalg, RankAndNullspace) {
    auto m = RationalMatrix::from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}});
    EXPECT_EQ(rank(m), 2u);
    auto ns = nullspace(m);
    ASSERT_EQ(ns.size(), 1u);
    auto image = m.apply(ns[0]);
    for (const auto& x : image) EXPECT_EQ(x, 0);
}

TEST(Linalg, SubspaceCanonicalForm) {
    auto a = Subspace::span(3, {{1, 1, 0}, {0, 1, 1}});
    auto b = Subspace::span(3, {{1, 2, 1}, {1, 0, -1}, {2, 2, 0}});
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.key(), b.key());
    EXPECT_EQ(a.dim(), 2u);
}

TEST(Linalg, SumIntersectionDimensionFormula) {
    auto u = Subspace::span(4, {{1, 0, 0, 0}, {0, 1, 1, 0}});
    auto w = Subspace::span(4, {{0, 1, 0, 0}, {0, 0, 1, 0}, {1, 0, 0, 1}});
    auto s = u.sum(w), i = u.intersect(w);
    EXPECT_EQ(s.dim() + i.dim(), u.dim() + w.dim());
    EXPECT_TRUE(i.contains({0, 1, 1, 0}));
    EXPECT_EQ(i.dim(), 1u);
    EXPECT_EQ(Subspace::whole(3).intersect(Subspace::zero(3)).dim(), 0u);
}

TEST(Linalg, ImageDim) {
    auto id = RationalMatrix::identity(3);
    auto v = Subspace::span(3, {{1, 2, 3}, {0, 1, 0}});
    EXPECT_EQ(image_dim(id, v), 2u);
    Rational x(3, 4);
    auto row = RationalMatrix::from_rows({{1, 2 * x}});
    EXPECT_EQ(image_dim(row, Subspace::span(2, {{-2 * x, 1}})), 0u);
    auto wide = RationalMatrix::from_rows({{1, 0, 2 * x}, {0, 1, -2 * x}});
    EXPECT_EQ(image_dim(wide, Subspace::whole(3)), 2u);
    EXPECT_THROW(image_dim(wide, Subspace::whole(2)), std::invalid_argument);
}

TEST(Matching, PrefersLowIndicesAndAugments) {
    // Left 0 can use {0,1}; left 1 only {0}: augmenting path moves left 0 to 1.
    auto m = max_bipartite_matching({{0, 1}, {0}}, 2);
    ASSERT_TRUE(is_left_perfect(m));
    EXPECT_EQ(*m[0], 1u);
    EXPECT_EQ(*m[1], 0u);
    auto none = max_bipartite_matching({{0}, {0}}, 1);
    EXPECT_FALSE(is_left_perfect(none));
}

namespace {

bool is_rref(const RationalMatrix& r, const std::vector<std::size_t>& pivots) {
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        if (r(i, pivots[i]) != 1) return false;
        for (std::size_t j = 0; j < pivots[i]; ++j)
            if (r(i, j) != 0) return false;
        for (std::size_t k = 0; k < r.rows(); ++k)
            if (k != i && r(k, pivots[i]) != 0) return false;
        if (i > 0 && pivots[i] <= pivots[i - 1]) return false;
    }
    for (std::size_t i = pivots.size(); i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j)
            if (r(i, j) != 0) return false;
    return true;
}

}  // namespace

TEST(Linalg, RrefFuzzSmallAndHugeEntries) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 600; ++trial) {
        const std::size_t rows = 1 + rng() % 5, cols = 1 + rng() % 5;
        const bool huge = trial % 3 == 0;
        RationalMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) {
                if (rng() % 3 == 0) continue;
                Rational x = ratio(static_cast<long>(rng() % 11) - 5, static_cast<long>(rng() % 6) + 1);
                if (huge) x *= Rational(mpz_class("123456789012345678901"));
                m(i, j) = x;
            }
        if (trial % 5 == 0 && rows > 1)
            for (std::size_t j = 0; j < cols; ++j) m(rows - 1, j) = 3 * m(0, j);
        std::vector<std::size_t> pivots;
        RationalMatrix r = rref(m, &pivots);
        EXPECT_TRUE(is_rref(r, pivots));
        EXPECT_EQ(rank(m), pivots.size());
        std::vector<RationalVector> stacked;
        for (std::size_t i = 0; i < rows; ++i) stacked.push_back(m.row(i));
        for (std::size_t i = 0; i < pivots.size(); ++i) stacked.push_back(r.row(i));
        EXPECT_EQ(rank(RationalMatrix::from_rows(stacked)), pivots.size());
        auto ns = nullspace(m);
        EXPECT_EQ(ns.size() + pivots.size(), cols);
        for (const auto& v : ns)
            for (const auto& x : m.apply(v)) EXPECT_EQ(x, 0);
    }
}

TEST(Linalg, SumIntersectFuzzAgainstDefinitions) {
    std::mt19937_64 rng(13);
    auto random_span = [&](std::size_t n, bool huge) {
        std::vector<RationalVector> vs(rng() % (n + 1), RationalVector(n));
        for (auto& v : vs)
            for (auto& x : v) {
                x = rng() % 2 ? Rational(0) : ratio(static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 3) + 1);
                if (huge) x *= Rational(mpz_class("98765432109876543210"));
            }
        return Subspace::span(n, vs);
    };
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 5;
        auto u = random_span(n, trial % 4 == 0);
        auto w = random_span(n, trial % 7 == 0);
        auto s = u.sum(w), i = u.intersect(w);
        EXPECT_EQ(s.dim() + i.dim(), u.dim() + w.dim());
        for (const auto& v : i.basis()) {
            EXPECT_TRUE(u.contains(v));
            EXPECT_TRUE(w.contains(v));
        }
        for (const auto& v : u.basis()) EXPECT_TRUE(s.contains(v));
        for (const auto& v : w.basis()) EXPECT_TRUE(s.contains(v));
        EXPECT_EQ(i, u.annihilator().sum(w.annihilator()).annihilator());
        EXPECT_EQ(i.key(), w.intersect(u).key());
        EXPECT_EQ(s, w.sum(u));
    }
}

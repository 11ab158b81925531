#pragma once

#include "extlab/geometry.hpp"
#include "extlab/linalg.hpp"

#include <optional>
#include <vector>

namespace extlab {

struct BLDatum {
    std::size_t ambient_dim = 0;
    std::vector<RationalMatrix> maps;
    std::vector<Rational> exponents;

    BLDatum() = default;
    /// Throws std::invalid_argument on length or column mismatch, or a negative exponent.
    BLDatum(std::size_t n, std::vector<RationalMatrix> maps_, std::vector<Rational> exponents_);
};

struct CapPointSet {
    std::size_t d = 0;
    std::vector<RationalVector> points;  // exactly d+1

    CapPointSet() = default;
    CapPointSet(std::size_t d_, std::vector<RationalVector> pts);
};

/// L_l = row e_l + 2x^1_l e_{d+1} for l <= d and L_{d+l} = [I_d | 2x^{l+1}]; exponents 1/d.
BLDatum bl_datum_from_caps(const CapPointSet& pts);

bool scaling_condition(const BLDatum& datum);

struct DimensionCheck {
    bool holds = true;
    std::size_t lhs = 0;  // dim V
    Rational rhs;         // sum p_j dim(L_j V)
};

DimensionCheck dimension_condition_on(const BLDatum& datum, const Subspace& v);

struct CandidateFamily {
    std::vector<Subspace> subspaces;
    bool truncated = false;
};

struct CandidateOptions {
    std::size_t max_size = 4096;
    /// Rounds of pairwise sums and intersections after seeding with kernels, kernel
    /// intersections and coordinate subspaces.
    std::size_t max_rounds = 2;
};

/// Kernels of the maps, intersections of every subset of kernels, coordinate subspaces, and
/// closure under sum and intersection (bounded by the options), plus `extra`.
CandidateFamily candidate_subspaces(const BLDatum& datum, const std::vector<Subspace>& extra = {},
                                    const CandidateOptions& options = {});

struct FinitenessVerdict {
    enum class Kind { Infinite, FiniteOnCandidates };
    Kind kind = Kind::FiniteOnCandidates;
    bool scaling_failed = false;
    std::optional<Subspace> witness;
    DimensionCheck witness_check;
};

FinitenessVerdict check_finiteness(const BLDatum& datum, const std::vector<Subspace>& candidates);

struct ViolationWitness {
    Subspace v;
    CapPointSet points;
    MinimalSubset subset;
    DimensionCheck check;  // dimension condition of the cap datum at `points` on `v`
    Rational predicted_rhs;  // ((n-1)d - 1)/d
};

/// Requires k = d+1 and, for the pivot, a common contact point on every axis (use
/// refine_collection_for_pivot or refine_collection first); throws std::invalid_argument
/// otherwise. Absent when the collection is weakly transversal with the pivot.
std::optional<ViolationWitness> construct_violating_subspace(const CubeCollection& coll, std::size_t pivot);

struct CapVerdict {
    enum class Kind { FiniteForAllPoints, InfiniteForSomePoints };
    Kind kind = Kind::FiniteForAllPoints;
    std::optional<ViolationWitness> witness;
    std::uint64_t selection_count = 0;
    std::size_t class_count = 0;
};

/// Decides whether the cap datum is finite at every choice of points x^j in Q_j.
/// Throws std::invalid_argument unless k = d+1.
CapVerdict cap_finiteness_via_geometry(const CubeCollection& coll);

}  // namespace extlab

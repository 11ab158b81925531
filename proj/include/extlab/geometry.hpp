#pragma once

#include "extlab/linalg.hpp"
#include "extlab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace extlab {

/// Closed interval [lo, hi] with lo <= hi.
struct Interval {
    Rational lo, hi;

    Interval() = default;
    Interval(Rational lo_, Rational hi_);

    Rational length() const { return hi - lo; }
    Rational midpoint() const { return (lo + hi) / 2; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool intersects(const Interval& o) const { return !(hi < o.lo || o.hi < lo); }
    bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
    bool operator<(const Interval& o) const { return lo < o.lo || (lo == o.lo && hi < o.hi); }
};

/// Axis-aligned box, one interval per axis.
struct RationalCube {
    std::vector<Interval> intervals;

    RationalCube() = default;
    explicit RationalCube(std::vector<Interval> iv);

    std::size_t dim() const { return intervals.size(); }
    RationalVector center() const;
    bool contains(const RationalVector& x) const;
    bool operator==(const RationalCube& o) const { return intervals == o.intervals; }
};

/// Cube with the same interval on every axis.
RationalCube uniform_cube(std::size_t d, const Rational& lo, const Rational& hi);

struct CubeCollection {
    std::size_t d = 0;
    std::vector<RationalCube> cubes;

    CubeCollection() = default;
    /// Throws std::invalid_argument if d == 0 or a cube has the wrong dimension.
    CubeCollection(std::size_t d_, std::vector<RationalCube> cubes_);

    std::size_t size() const { return cubes.size(); }
    /// k > d+1 is allowed but unusual for transversality questions.
    bool exceeds_transversal_size() const { return cubes.size() > d + 1; }
};

struct DirectionAssignment {
    std::size_t pivot = 0;
    std::map<std::size_t, std::size_t> axis_of;  // other cube -> axis
    /// Smallest gap between the pivot's projection and an assigned cube's projection.
    Rational min_separation;
};

struct TransversalityVector {
    std::vector<int> bits;
    int total = 0;
};

bool closed_projections_disjoint(const RationalCube& c1, const RationalCube& c2, std::size_t axis);

std::optional<DirectionAssignment> weakly_transversal_with_pivot(const CubeCollection& coll, std::size_t pivot);
bool is_weakly_transversal(const CubeCollection& coll);
TransversalityVector transversality_vector(const CubeCollection& coll);

/// Volume spanned by the unit normals (-2x, 1)/|.| at the given points.
double wedge_volume(const std::vector<RationalVector>& points);
double wedge_volume(const std::vector<std::vector<double>>& points);

/// Minimum of wedge_volume over one sample per cube, each drawn from the tensor grid with
/// `subdivisions` parts per axis. Throws std::invalid_argument when the number of
/// combinations exceeds `max_combinations`.
double min_wedge_grid_estimate(const CubeCollection& coll, std::size_t subdivisions,
                               double max_combinations = 2e9);

/// Per-axis partition of every cube; the subcubes of cube j are the products of its
/// per-axis pieces.
struct Refinement {
    std::vector<std::vector<std::vector<Interval>>> axis_pieces;  // [cube][axis] -> pieces
    bool conditions_met = true;
    std::size_t rounds = 0;

    std::uint64_t piece_count(std::size_t cube) const;
    RationalCube piece(std::size_t cube, const std::vector<std::size_t>& index) const;
    std::vector<RationalCube> pieces(std::size_t cube) const;
};

/// Splits every projection at all endpoints of the collection, then halves pieces that are
/// touched at both ends by pieces of two different cubes, repeating until no such piece is
/// left or `max_rounds` is reached (`conditions_met` reports which).
Refinement refine_collection(const CubeCollection& coll, std::size_t max_rounds = 4);

/// Endpoint split followed by halving of the pivot's pieces only. Always terminates after
/// one round and guarantees that, in every selection, the pivot's projection and all
/// projections meeting it share a common point on every axis.
Refinement refine_collection_for_pivot(const CubeCollection& coll, std::size_t pivot);

/// (a) every pair of projections is disjoint, equal, or meets at one shared endpoint;
/// (b) the projections meeting a given one (and distinct from it) meet it at the same endpoint.
bool refinement_conditions_hold(const CubeCollection& selection);

/// On every axis, the projection of `cube` and those meeting it have a common point.
bool has_common_contact_points(const CubeCollection& selection, std::size_t cube);

/// Selections with identical per-axis intersection patterns share every verdict; one
/// representative per pattern is kept together with the number of selections it stands for.
struct SelectionClass {
    std::vector<std::vector<std::size_t>> choice;  // [cube][axis] -> piece index
    CubeCollection cubes;
    std::uint64_t multiplicity = 0;
    bool weakly_transversal = false;
    std::vector<std::optional<DirectionAssignment>> per_pivot;
};

struct Decomposition {
    Refinement refinement;
    std::vector<std::uint64_t> subcube_counts;
    std::uint64_t selection_count = 0;  // saturates at UINT64_MAX
    std::vector<SelectionClass> classes;
    bool all_weakly_transversal = true;
};

/// Global refinement, every pivot checked.
Decomposition decompose_weakly_transversal(const CubeCollection& coll);

/// Pivot refinement, only the given pivot checked (`weakly_transversal` means "with this pivot").
Decomposition decompose_for_pivot(const CubeCollection& coll, std::size_t pivot);

struct MatrixLemmaResult {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> paired_columns;  // paired_columns[l] goes with rows[l]
};

/// M is (d+1) x k with last row all ones and rank k. Finds k-1 rows among the first d and a
/// bijection to the columns other than `column` with M(row, column) != M(row, paired).
/// Throws std::invalid_argument ("rank deficient", missing ones row, bad column).
MatrixLemmaResult matrix_lemma_rows(const RationalMatrix& m, std::size_t column);

struct MinimalSubset {
    std::vector<std::size_t> members;     // sorted, includes the pivot
    std::vector<std::size_t> directions;  // axes where the pivot meets every member
};

/// Smallest subset containing the pivot that is not weakly transversal with it (breadth
/// first by size, lexicographic within a size), with d-n+2 axes where the pivot's closed
/// projection meets every member's. Absent if the collection is weakly transversal with the pivot.
std::optional<MinimalSubset> find_minimal_property_p_subset(const CubeCollection& coll, std::size_t pivot);

}  // namespace extlab

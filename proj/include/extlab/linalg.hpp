#pragma once

#include "extlab/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace extlab {

using RationalVector = std::vector<Rational>;

/// Dense row-major matrix over the rationals.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols);
    /// Throws std::invalid_argument on ragged input.
    static RationalMatrix from_rows(const std::vector<RationalVector>& rows, std::size_t cols_if_empty = 0);
    static RationalMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rational& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }
    const std::vector<Rational>& entries() const { return entries_; }
    RationalVector row(std::size_t r) const;

    RationalMatrix transpose() const;
    RationalMatrix operator*(const RationalMatrix& rhs) const;
    RationalVector apply(const RationalVector& v) const;
    bool operator==(const RationalMatrix& rhs) const;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> entries_;
};

/// Reduced row echelon form; zero rows are kept at the bottom.
RationalMatrix rref(RationalMatrix m, std::vector<std::size_t>* pivot_cols = nullptr);
std::size_t rank(const RationalMatrix& m);
/// Basis of {x : m x = 0}, one vector per free column.
std::vector<RationalVector> nullspace(const RationalMatrix& m);
/// Row-major entries with each row multiplied by the lcm of its denominators;
/// nullopt when an entry does not fit in 64 bits.
std::optional<std::vector<std::int64_t>> integer_rows(const RationalMatrix& m);

/// Linear subspace of Q^n stored as a canonical RREF basis, so equal subspaces compare equal.
class Subspace {
public:
    Subspace() = default;
    static Subspace span(std::size_t ambient_dim, const std::vector<RationalVector>& vectors);
    static Subspace whole(std::size_t ambient_dim);
    static Subspace zero(std::size_t ambient_dim);
    static Subspace coordinate(std::size_t ambient_dim, const std::vector<std::size_t>& axes);
    static Subspace kernel(const RationalMatrix& map);

    std::size_t ambient_dim() const { return ambient_dim_; }
    std::size_t dim() const { return dim_; }
    /// Built from the integer rows on first use when those exist.
    const std::vector<RationalVector>& basis() const;

    bool contains(const RationalVector& v) const;
    Subspace sum(const Subspace& other) const;
    Subspace intersect(const Subspace& other) const;
    /// Vectors orthogonal (for the standard pairing) to every basis vector.
    Subspace annihilator() const;

    /// Canonical text key for hashing and ordering.
    std::string key() const;
    bool operator==(const Subspace& other) const;

    /// Basis rows scaled to primitive integer vectors (row-major), when they fit in 64 bits.
    const std::optional<std::vector<std::int64_t>>& integer_basis() const { return ints_; }

private:
    struct RationalBasis {
        std::once_flag once;
        std::vector<RationalVector> rows;
    };

    static Subspace from_integer_rows(std::size_t ambient_dim, std::vector<std::int64_t> rows, std::size_t count);
    static Subspace from_rational_basis(std::size_t ambient_dim, std::vector<RationalVector> basis);
    Subspace rational_sum(const Subspace& other) const;

    std::size_t ambient_dim_ = 0;
    std::size_t dim_ = 0;
    std::optional<std::vector<std::int64_t>> ints_;
    std::shared_ptr<RationalBasis> rational_;
};

/// dim(map V), exact.
std::size_t image_dim(const RationalMatrix& map, const Subspace& v);
/// Same, reusing integer_rows(map) computed by the caller.
std::size_t image_dim(const RationalMatrix& map, const std::optional<std::vector<std::int64_t>>& map_ints,
                      const Subspace& v);

}  // namespace extlab

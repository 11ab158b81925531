#include "extlab/linalg.hpp"

#include <numeric>
#include <stdexcept>

namespace extlab {

RationalMatrix::RationalMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Rational(0)) {}

RationalMatrix RationalMatrix::from_rows(const std::vector<RationalVector>& rows, std::size_t cols_if_empty) {
    std::size_t cols = rows.empty() ? cols_if_empty : rows.front().size();
    RationalMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RationalVector RationalMatrix::row(std::size_t r) const {
    return RationalVector(entries_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                          entries_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

RationalMatrix RationalMatrix::operator*(const RationalMatrix& rhs) const {
    if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product dimension mismatch");
    RationalMatrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Rational& a = (*this)(r, k);
            if (a == 0) continue;
            for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
        }
    return out;
}

RationalVector RationalMatrix::apply(const RationalVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector dimension mismatch");
    RationalVector out(rows_, Rational(0));
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out[r] += (*this)(r, c) * v[c];
    return out;
}

bool RationalMatrix::operator==(const RationalMatrix& rhs) const {
    return rows_ == rhs.rows_ && cols_ == rhs.cols_ && entries_ == rhs.entries_;
}

namespace {

using Ints = std::vector<std::int64_t>;

bool fits(__int128 v) {
    return v <= INT64_MAX && v >= INT64_MIN;
}

struct Echelon {
    Ints a;
    std::vector<std::size_t> pivots;
};

// Fraction-free Gauss-Jordan; nullopt on overflow or an inexact division.
std::optional<Echelon> integer_gauss_jordan(Ints a, std::size_t rows, std::size_t cols) {
    std::vector<std::size_t> pivots;
    std::int64_t prev = 1;
    std::size_t lead = 0;
    for (std::size_t c = 0; c < cols && lead < rows; ++c) {
        std::size_t p = lead;
        while (p < rows && a[p * cols + c] == 0) ++p;
        if (p == rows) continue;
        if (p != lead)
            for (std::size_t j = 0; j < cols; ++j) std::swap(a[p * cols + j], a[lead * cols + j]);
        const std::int64_t piv = a[lead * cols + c];
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == lead) continue;
            const std::int64_t f = a[r * cols + c];
            for (std::size_t j = 0; j < cols; ++j) {
                std::int64_t x, y, w;
                if (!__builtin_mul_overflow(piv, a[r * cols + j], &x) &&
                    !__builtin_mul_overflow(f, a[lead * cols + j], &y) && !__builtin_sub_overflow(x, y, &w)) {
                    if (w % prev != 0) return std::nullopt;
                    a[r * cols + j] = w / prev;
                    continue;
                }
                __int128 v = static_cast<__int128>(piv) * a[r * cols + j] - static_cast<__int128>(f) * a[lead * cols + j];
                if (v % prev != 0) return std::nullopt;
                v /= prev;
                if (!fits(v)) return std::nullopt;
                a[r * cols + j] = static_cast<std::int64_t>(v);
            }
        }
        prev = piv;
        pivots.push_back(c);
        ++lead;
    }
    return Echelon{std::move(a), std::move(pivots)};
}

// Bareiss elimination; the divisions are exact because every entry is a minor.
std::optional<std::size_t> integer_rank(Ints a, std::size_t rows, std::size_t cols) {
    std::size_t rank = 0;
    std::int64_t prev = 1;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && a[p * cols + c] == 0) ++p;
        if (p == rows) continue;
        if (p != rank)
            for (std::size_t j = 0; j < cols; ++j) std::swap(a[p * cols + j], a[rank * cols + j]);
        const std::int64_t piv = a[rank * cols + c];
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const std::int64_t f = a[r * cols + c];
            for (std::size_t j = c; j < cols; ++j) {
                std::int64_t x, y, w;
                if (!__builtin_mul_overflow(piv, a[r * cols + j], &x) &&
                    !__builtin_mul_overflow(f, a[rank * cols + j], &y) && !__builtin_sub_overflow(x, y, &w)) {
                    a[r * cols + j] = w / prev;
                    continue;
                }
                __int128 v = static_cast<__int128>(piv) * a[r * cols + j] - static_cast<__int128>(f) * a[rank * cols + j];
                v /= prev;
                if (!fits(v)) return std::nullopt;
                a[r * cols + j] = static_cast<std::int64_t>(v);
            }
        }
        prev = piv;
        ++rank;
    }
    return rank;
}

// Row i of the echelon result divided by its gcd, pivot made positive.
Ints primitive_rows(const Echelon& e, std::size_t cols) {
    Ints out(e.pivots.size() * cols);
    for (std::size_t i = 0; i < e.pivots.size(); ++i) {
        std::int64_t g = 0;
        for (std::size_t j = 0; j < cols; ++j) g = std::gcd(g, e.a[i * cols + j]);
        if (e.a[i * cols + e.pivots[i]] < 0) g = -g;
        for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] = e.a[i * cols + j] / g;
    }
    return out;
}

std::optional<Ints> primitive_from_rational(const std::vector<RationalVector>& basis, std::size_t cols) {
    RationalMatrix m = RationalMatrix::from_rows(basis, cols);
    return integer_rows(m);
}

RationalMatrix rational_rref(RationalMatrix m, std::vector<std::size_t>* pivot_cols) {
    if (pivot_cols) pivot_cols->clear();
    std::size_t lead = 0;
    for (std::size_t c = 0; c < m.cols() && lead < m.rows(); ++c) {
        std::size_t p = lead;
        while (p < m.rows() && m(p, c) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != lead)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(lead, j));
        Rational inv = 1 / m(lead, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(lead, j) *= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == lead || m(r, c) == 0) continue;
            Rational f = m(r, c);
            for (std::size_t j = c; j < m.cols(); ++j) m(r, j) -= f * m(lead, j);
        }
        if (pivot_cols) pivot_cols->push_back(c);
        ++lead;
    }
    return m;
}

}  // namespace

std::optional<std::vector<std::int64_t>> integer_rows(const RationalMatrix& m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    Ints a(rows * cols);
    mpz_class l, v;
    for (std::size_t r = 0; r < rows; ++r) {
        bool integral = true;
        for (std::size_t c = 0; c < cols && integral; ++c) integral = m(r, c).get_den() == 1;
        if (integral) {
            for (std::size_t c = 0; c < cols; ++c) {
                if (!m(r, c).get_num().fits_slong_p()) return std::nullopt;
                a[r * cols + c] = m(r, c).get_num().get_si();
            }
            continue;
        }
        l = 1;
        for (std::size_t c = 0; c < cols; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
        for (std::size_t c = 0; c < cols; ++c) {
            mpz_divexact(v.get_mpz_t(), l.get_mpz_t(), m(r, c).get_den_mpz_t());
            v *= m(r, c).get_num();
            if (!v.fits_slong_p()) return std::nullopt;
            a[r * cols + c] = v.get_si();
        }
    }
    return a;
}

RationalMatrix rref(RationalMatrix m, std::vector<std::size_t>* pivot_cols) {
    if (auto ints = integer_rows(m))
        if (auto e = integer_gauss_jordan(std::move(*ints), m.rows(), m.cols())) {
            RationalMatrix out(m.rows(), m.cols());
            for (std::size_t i = 0; i < e->pivots.size(); ++i) {
                const std::int64_t piv = e->a[i * m.cols() + e->pivots[i]];
                for (std::size_t j = 0; j < m.cols(); ++j)
                    if (e->a[i * m.cols() + j] != 0) out(i, j) = ratio(e->a[i * m.cols() + j], piv);
            }
            if (pivot_cols) *pivot_cols = std::move(e->pivots);
            return out;
        }
    return rational_rref(std::move(m), pivot_cols);
}

std::size_t rank(const RationalMatrix& m) {
    if (auto ints = integer_rows(m))
        if (auto r = integer_rank(std::move(*ints), m.rows(), m.cols())) return *r;
    std::vector<std::size_t> pivots;
    rational_rref(m, &pivots);
    return pivots.size();
}

std::vector<RationalVector> nullspace(const RationalMatrix& m) {
    std::vector<std::size_t> pivots;
    RationalMatrix r = rref(m, &pivots);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<RationalVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        RationalVector v(m.cols(), Rational(0));
        v[free] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -r(i, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

Subspace Subspace::span(std::size_t ambient_dim, const std::vector<RationalVector>& vectors) {
    for (const auto& v : vectors)
        if (v.size() != ambient_dim) throw std::invalid_argument("vector dimension mismatch");
    if (vectors.empty()) {
        Subspace s;
        s.ambient_dim_ = ambient_dim;
        s.ints_ = Ints{};
        return s;
    }
    RationalMatrix m = RationalMatrix::from_rows(vectors);
    if (auto ints = integer_rows(m)) return from_integer_rows(ambient_dim, std::move(*ints), vectors.size());
    std::vector<std::size_t> pivots;
    RationalMatrix r = rational_rref(std::move(m), &pivots);
    std::vector<RationalVector> basis;
    for (std::size_t i = 0; i < pivots.size(); ++i) basis.push_back(r.row(i));
    return from_rational_basis(ambient_dim, std::move(basis));
}

Subspace Subspace::from_rational_basis(std::size_t ambient_dim, std::vector<RationalVector> basis) {
    Subspace s;
    s.ambient_dim_ = ambient_dim;
    s.dim_ = basis.size();
    s.ints_ = primitive_from_rational(basis, ambient_dim);
    s.rational_ = std::make_shared<RationalBasis>();
    std::call_once(s.rational_->once, [&] { s.rational_->rows = std::move(basis); });
    return s;
}

const std::vector<RationalVector>& Subspace::basis() const {
    static const std::vector<RationalVector> empty;
    if (!rational_) return empty;
    std::call_once(rational_->once, [this] {
        const std::size_t n = ambient_dim_;
        const Ints& prim = *ints_;
        for (std::size_t i = 0; i < dim_; ++i) {
            std::size_t p = 0;
            while (prim[i * n + p] == 0) ++p;
            const std::int64_t piv = prim[i * n + p];
            RationalVector v(n, Rational(0));
            for (std::size_t j = 0; j < n; ++j)
                if (prim[i * n + j] != 0) v[j] = ratio(prim[i * n + j], piv);
            rational_->rows.push_back(std::move(v));
        }
    });
    return rational_->rows;
}

Subspace Subspace::from_integer_rows(std::size_t ambient_dim, std::vector<std::int64_t> rows, std::size_t count) {
    const std::size_t n = ambient_dim;
    auto e = integer_gauss_jordan(rows, count, n);
    if (!e) {
        std::vector<RationalVector> vectors(count, RationalVector(n));
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < n; ++j) vectors[i][j] = Rational(static_cast<long>(rows[i * n + j]));
        std::vector<std::size_t> pivots;
        RationalMatrix r = rational_rref(RationalMatrix::from_rows(vectors), &pivots);
        std::vector<RationalVector> basis;
        for (std::size_t i = 0; i < pivots.size(); ++i) basis.push_back(r.row(i));
        return from_rational_basis(n, std::move(basis));
    }
    Subspace s;
    s.ambient_dim_ = n;
    s.dim_ = e->pivots.size();
    s.ints_ = primitive_rows(*e, n);
    if (s.dim_ > 0) s.rational_ = std::make_shared<RationalBasis>();
    return s;
}

Subspace Subspace::whole(std::size_t ambient_dim) {
    return coordinate(ambient_dim, [&] {
        std::vector<std::size_t> all(ambient_dim);
        for (std::size_t i = 0; i < ambient_dim; ++i) all[i] = i;
        return all;
    }());
}

Subspace Subspace::zero(std::size_t ambient_dim) {
    return span(ambient_dim, {});
}

Subspace Subspace::coordinate(std::size_t ambient_dim, const std::vector<std::size_t>& axes) {
    std::vector<RationalVector> vectors;
    for (auto a : axes) {
        if (a >= ambient_dim) throw std::out_of_range("coordinate axis out of range");
        RationalVector v(ambient_dim, Rational(0));
        v[a] = 1;
        vectors.push_back(std::move(v));
    }
    return span(ambient_dim, vectors);
}

Subspace Subspace::kernel(const RationalMatrix& map) {
    return span(map.cols(), nullspace(map));
}

bool Subspace::contains(const RationalVector& v) const {
    if (v.size() != ambient_dim_) throw std::invalid_argument("vector dimension mismatch");
    auto vectors = basis();
    vectors.push_back(v);
    return rank(RationalMatrix::from_rows(vectors)) == dim_;
}

Subspace Subspace::rational_sum(const Subspace& other) const {
    auto vectors = basis();
    vectors.insert(vectors.end(), other.basis().begin(), other.basis().end());
    return span(ambient_dim_, vectors);
}

Subspace Subspace::sum(const Subspace& other) const {
    if (other.ambient_dim_ != ambient_dim_) throw std::invalid_argument("subspace dimension mismatch");
    if (dim_ == 0) return other;
    if (other.dim_ == 0) return *this;
    if (!ints_ || !other.ints_) return rational_sum(other);
    Ints rows = *ints_;
    rows.insert(rows.end(), other.ints_->begin(), other.ints_->end());
    return from_integer_rows(ambient_dim_, std::move(rows), dim() + other.dim());
}

Subspace Subspace::annihilator() const {
    if (dim_ == 0) return whole(ambient_dim_);
    return span(ambient_dim_, nullspace(RationalMatrix::from_rows(basis())));
}

Subspace Subspace::intersect(const Subspace& other) const {
    if (other.ambient_dim_ != ambient_dim_) throw std::invalid_argument("subspace dimension mismatch");
    const std::size_t n = ambient_dim_;
    if (dim_ == 0 || other.dim_ == 0) return zero(n);
    const std::size_t a = dim(), b = other.dim(), cols = a + b;
    // Columns u_1..u_a, -w_1..-w_b; each null vector (c, e) gives the common vector sum c_i u_i.
    if (ints_ && other.ints_) {
        const Ints& u = *ints_;
        const Ints& w = *other.ints_;
        Ints m(n * cols);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < a; ++j) m[i * cols + j] = u[j * n + i];
            for (std::size_t j = 0; j < b; ++j) m[i * cols + a + j] = -w[j * n + i];
        }
        if (auto e = integer_gauss_jordan(std::move(m), n, cols)) {
            std::vector<bool> is_pivot(cols, false);
            for (auto c : e->pivots) is_pivot[c] = true;
            Ints rows;
            std::size_t count = 0;
            bool ok = true;
            for (std::size_t f = 0; f < cols && ok; ++f) {
                if (is_pivot[f]) continue;
                // c_f = 1, c_{p_k} = -A_k[f] / A_k[p_k], scaled by the lcm of the pivots involved.
                __int128 l = 1;
                for (std::size_t k = 0; k < e->pivots.size() && ok; ++k) {
                    const std::int64_t piv = e->a[k * cols + e->pivots[k]];
                    if (e->a[k * cols + f] == 0) continue;
                    l = l / std::gcd(static_cast<std::int64_t>(l), piv) * (piv < 0 ? -piv : piv);
                    ok = fits(l);
                }
                if (!ok) break;
                std::vector<__int128> c(a, 0);
                if (f < a) c[f] = l;
                for (std::size_t k = 0; k < e->pivots.size(); ++k) {
                    if (e->pivots[k] >= a) continue;
                    const std::int64_t piv = e->a[k * cols + e->pivots[k]];
                    c[e->pivots[k]] = -(l / piv) * e->a[k * cols + f];
                }
                for (std::size_t i = 0; i < n && ok; ++i) {
                    __int128 x = 0;
                    for (std::size_t j = 0; j < a && ok; ++j) {
                        if (c[j] == 0) continue;
                        if (!fits(c[j])) {
                            ok = false;
                            break;
                        }
                        x += c[j] * u[j * n + i];
                        ok = fits(x);
                    }
                    rows.push_back(static_cast<std::int64_t>(x));
                }
                ++count;
            }
            if (ok) {
                if (count == 0) return zero(n);
                return from_integer_rows(n, std::move(rows), count);
            }
        }
    }
    const auto& ub = basis();
    const auto& wb = other.basis();
    RationalMatrix m(n, cols);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < a; ++j) m(i, j) = ub[j][i];
        for (std::size_t j = 0; j < b; ++j) m(i, a + j) = -wb[j][i];
    }
    std::vector<RationalVector> common;
    for (const auto& c : nullspace(m)) {
        RationalVector x(n, Rational(0));
        for (std::size_t j = 0; j < a; ++j)
            if (c[j] != 0)
                for (std::size_t i = 0; i < n; ++i) x[i] += c[j] * ub[j][i];
        common.push_back(std::move(x));
    }
    return span(n, common);
}

std::string Subspace::key() const {
    std::string k = std::to_string(ambient_dim_) + ":";
    if (ints_) {
        for (auto x : *ints_) k += std::to_string(x) + ",";
        return k;
    }
    k += "q";
    for (const auto& v : basis()) {
        for (const auto& x : v) k += x.get_str() + ",";
        k += ";";
    }
    return k;
}

bool Subspace::operator==(const Subspace& other) const {
    if (ambient_dim_ != other.ambient_dim_ || dim_ != other.dim_) return false;
    if (ints_ && other.ints_) return *ints_ == *other.ints_;
    return basis() == other.basis();
}

std::size_t image_dim(const RationalMatrix& map, const std::optional<std::vector<std::int64_t>>& map_ints,
                      const Subspace& v) {
    if (map.cols() != v.ambient_dim()) throw std::invalid_argument("image_dim: map columns do not match subspace dimension");
    if (v.dim() == 0) return 0;
    const auto& b = v.integer_basis();
    if (b && map_ints) {
        const std::size_t n = map.cols(), k = v.dim(), r = map.rows();
        Ints prod(k * r);
        bool ok = true;
        for (std::size_t i = 0; i < k && ok; ++i)
            for (std::size_t j = 0; j < r && ok; ++j) {
                __int128 acc = 0;
                for (std::size_t t = 0; t < n; ++t) acc += static_cast<__int128>((*b)[i * n + t]) * (*map_ints)[j * n + t];
                ok = fits(acc);
                prod[i * r + j] = static_cast<std::int64_t>(acc);
            }
        if (ok)
            if (auto rk = integer_rank(std::move(prod), k, r)) return *rk;
    }
    std::vector<RationalVector> images;
    images.reserve(v.dim());
    for (const auto& basis_vector : v.basis()) images.push_back(map.apply(basis_vector));
    return rank(RationalMatrix::from_rows(images, map.rows()));
}

std::size_t image_dim(const RationalMatrix& map, const Subspace& v) {
    return image_dim(map, integer_rows(map), v);
}

}  // namespace extlab

#include "extlab/geometry.hpp"

#include "extlab/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace extlab {

Interval::Interval(Rational lo_, Rational hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (hi < lo) throw std::invalid_argument("interval with lo > hi: [" + to_string(lo) + ", " + to_string(hi) + "]");
}

RationalCube::RationalCube(std::vector<Interval> iv) : intervals(std::move(iv)) {
    if (intervals.empty()) throw std::invalid_argument("cube must have dimension >= 1");
}

RationalVector RationalCube::center() const {
    RationalVector c;
    c.reserve(intervals.size());
    for (const auto& iv : intervals) c.push_back(iv.midpoint());
    return c;
}

bool RationalCube::contains(const RationalVector& x) const {
    if (x.size() != intervals.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!intervals[i].contains(x[i])) return false;
    return true;
}

RationalCube uniform_cube(std::size_t d, const Rational& lo, const Rational& hi) {
    return RationalCube(std::vector<Interval>(d, Interval(lo, hi)));
}

CubeCollection::CubeCollection(std::size_t d_, std::vector<RationalCube> cubes_) : d(d_), cubes(std::move(cubes_)) {
    if (d == 0) throw std::invalid_argument("collection dimension must be >= 1");
    for (std::size_t j = 0; j < cubes.size(); ++j)
        if (cubes[j].dim() != d)
            throw std::invalid_argument("cube " + std::to_string(j) + " has dimension " +
                                        std::to_string(cubes[j].dim()) + ", expected " + std::to_string(d));
}

bool closed_projections_disjoint(const RationalCube& c1, const RationalCube& c2, std::size_t axis) {
    if (axis >= c1.dim() || axis >= c2.dim()) throw std::out_of_range("axis out of range");
    return !c1.intervals[axis].intersects(c2.intervals[axis]);
}

namespace {

Rational gap(const Interval& a, const Interval& b) {
    return b.lo > a.hi ? Rational(b.lo - a.hi) : Rational(a.lo - b.hi);
}

void check_pivot(const CubeCollection& coll, std::size_t pivot) {
    if (pivot >= coll.size()) throw std::out_of_range("pivot " + std::to_string(pivot) + " out of range");
}

}  // namespace

std::optional<DirectionAssignment> weakly_transversal_with_pivot(const CubeCollection& coll, std::size_t pivot) {
    check_pivot(coll, pivot);
    const auto& p = coll.cubes[pivot];
    std::vector<std::size_t> others;
    std::vector<std::vector<std::size_t>> adj;
    for (std::size_t j = 0; j < coll.size(); ++j) {
        if (j == pivot) continue;
        others.push_back(j);
        std::vector<std::size_t> axes;
        for (std::size_t i = 0; i < coll.d; ++i)
            if (closed_projections_disjoint(p, coll.cubes[j], i)) axes.push_back(i);
        adj.push_back(std::move(axes));
    }
    auto match = max_bipartite_matching(adj, coll.d);
    if (!is_left_perfect(match)) return std::nullopt;

    DirectionAssignment a;
    a.pivot = pivot;
    bool first = true;
    for (std::size_t l = 0; l < others.size(); ++l) {
        std::size_t axis = *match[l];
        a.axis_of[others[l]] = axis;
        Rational g = gap(p.intervals[axis], coll.cubes[others[l]].intervals[axis]);
        if (first || g < a.min_separation) a.min_separation = g;
        first = false;
    }
    return a;
}

bool is_weakly_transversal(const CubeCollection& coll) {
    for (std::size_t j = 0; j < coll.size(); ++j)
        if (!weakly_transversal_with_pivot(coll, j)) return false;
    return true;
}

TransversalityVector transversality_vector(const CubeCollection& coll) {
    TransversalityVector tv;
    tv.bits.assign(coll.d, 0);
    for (std::size_t i = 0; i < coll.d; ++i) {
        for (std::size_t j = 1; j < coll.size(); ++j)
            if (!(coll.cubes[j].intervals[i] == coll.cubes[0].intervals[i])) {
                tv.bits[i] = 1;
                break;
            }
        tv.total += tv.bits[i];
    }
    return tv;
}

namespace {

std::vector<double> unit_normal(const std::vector<double>& x) {
    std::vector<double> v(x.size() + 1);
    double norm2 = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        v[i] = -2.0 * x[i];
        norm2 += v[i] * v[i];
    }
    v.back() = 1.0;
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& c : v) c *= inv;
    return v;
}

// Squared volume through Gram-Schmidt: product of squared residual norms.
double wedge_from_normals(const std::vector<std::vector<double>>& normals) {
    std::vector<std::vector<double>> ortho;
    double det = 1.0;
    for (const auto& v : normals) {
        std::vector<double> r = v;
        for (const auto& q : ortho) {
            double dot = 0;
            for (std::size_t i = 0; i < r.size(); ++i) dot += r[i] * q[i];
            for (std::size_t i = 0; i < r.size(); ++i) r[i] -= dot * q[i];
        }
        double n2 = 0;
        for (double c : r) n2 += c * c;
        det *= n2;
        if (n2 < 1e-30) return 0.0;
        double inv = 1.0 / std::sqrt(n2);
        for (auto& c : r) c *= inv;
        ortho.push_back(std::move(r));
    }
    return std::min(1.0, std::sqrt(std::max(0.0, det)));
}

}  // namespace

double wedge_volume(const std::vector<std::vector<double>>& points) {
    if (points.empty()) return 1.0;
    std::size_t d = points.front().size();
    if (points.size() > d + 1) throw std::invalid_argument("wedge_volume needs k <= d+1 points");
    std::vector<std::vector<double>> normals;
    for (const auto& x : points) {
        if (x.size() != d) throw std::invalid_argument("wedge_volume: points of mixed dimension");
        normals.push_back(unit_normal(x));
    }
    return wedge_from_normals(normals);
}

double wedge_volume(const std::vector<RationalVector>& points) {
    // Exact dependence test first so repeated or dependent normals give exactly 0.
    if (!points.empty()) {
        std::size_t d = points.front().size();
        std::vector<RationalVector> rows;
        for (const auto& x : points) {
            if (x.size() != d) throw std::invalid_argument("wedge_volume: points of mixed dimension");
            RationalVector v;
            for (const auto& c : x) v.push_back(-2 * c);
            v.push_back(1);
            rows.push_back(std::move(v));
        }
        if (points.size() > d + 1) throw std::invalid_argument("wedge_volume needs k <= d+1 points");
        if (rank(RationalMatrix::from_rows(rows)) < points.size()) return 0.0;
    }
    std::vector<std::vector<double>> pts;
    for (const auto& x : points) {
        std::vector<double> p;
        for (const auto& c : x) p.push_back(to_double(c));
        pts.push_back(std::move(p));
    }
    return wedge_volume(pts);
}

double min_wedge_grid_estimate(const CubeCollection& coll, std::size_t subdivisions, double max_combinations) {
    if (subdivisions == 0) throw std::invalid_argument("subdivisions must be >= 1");
    const std::size_t k = coll.size();
    if (k == 0) return 1.0;
    if (k > coll.d + 1) throw std::invalid_argument("wedge estimate needs k <= d+1 cubes");

    std::vector<std::vector<std::vector<double>>> normals(k);
    double combos = 1;
    for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::vector<double>> axis_samples(coll.d);
        for (std::size_t i = 0; i < coll.d; ++i) {
            const auto& iv = coll.cubes[j].intervals[i];
            if (iv.lo == iv.hi) {
                axis_samples[i] = {to_double(iv.lo)};
                continue;
            }
            for (std::size_t s = 0; s <= subdivisions; ++s)
                axis_samples[i].push_back(to_double(iv.lo + (iv.hi - iv.lo) * ratio(static_cast<long>(s), static_cast<long>(subdivisions))));
        }
        std::vector<std::size_t> idx(coll.d, 0);
        while (true) {
            std::vector<double> x(coll.d);
            for (std::size_t i = 0; i < coll.d; ++i) x[i] = axis_samples[i][idx[i]];
            normals[j].push_back(unit_normal(x));
            std::size_t i = 0;
            while (i < coll.d && ++idx[i] == axis_samples[i].size()) idx[i++] = 0;
            if (i == coll.d) break;
        }
        combos *= static_cast<double>(normals[j].size());
    }
    if (combos > max_combinations)
        throw std::invalid_argument("wedge grid too large: " + std::to_string(combos) + " combinations");

    const std::size_t dim = coll.d + 1;
    double best = 1.0;
    // Incremental Gram-Schmidt: residuals at level j depend only on the prefix.
    std::vector<std::vector<double>> ortho(k, std::vector<double>(dim));
    auto recurse = [&](auto&& self, std::size_t level, double det) -> void {
        if (best == 0.0) return;
        for (const auto& v : normals[level]) {
            auto& r = ortho[level];
            r = v;
            for (std::size_t q = 0; q < level; ++q) {
                double dot = 0;
                for (std::size_t i = 0; i < dim; ++i) dot += r[i] * ortho[q][i];
                for (std::size_t i = 0; i < dim; ++i) r[i] -= dot * ortho[q][i];
            }
            double n2 = 0;
            for (double c : r) n2 += c * c;
            double next = det * n2;
            if (n2 < 1e-30 || next <= 0) {
                best = 0.0;
                return;
            }
            if (level + 1 == k) {
                best = std::min(best, std::sqrt(next));
                continue;
            }
            double inv = 1.0 / std::sqrt(n2);
            for (auto& c : r) c *= inv;
            self(self, level + 1, next);
        }
    };
    recurse(recurse, 0, 1.0);
    return best;
}

// ---------------------------------------------------------------------------
// Refinement

std::uint64_t Refinement::piece_count(std::size_t cube) const {
    std::uint64_t n = 1;
    for (const auto& axis : axis_pieces.at(cube)) n *= axis.size();
    return n;
}

RationalCube Refinement::piece(std::size_t cube, const std::vector<std::size_t>& index) const {
    const auto& axes = axis_pieces.at(cube);
    if (index.size() != axes.size()) throw std::invalid_argument("piece index has wrong length");
    std::vector<Interval> iv;
    for (std::size_t i = 0; i < axes.size(); ++i) iv.push_back(axes[i].at(index[i]));
    return RationalCube(std::move(iv));
}

std::vector<RationalCube> Refinement::pieces(std::size_t cube) const {
    const auto& axes = axis_pieces.at(cube);
    std::vector<RationalCube> out;
    std::vector<std::size_t> idx(axes.size(), 0);
    while (true) {
        out.push_back(piece(cube, idx));
        std::size_t i = 0;
        while (i < axes.size() && ++idx[i] == axes[i].size()) idx[i++] = 0;
        if (i == axes.size()) break;
    }
    return out;
}

namespace {

std::vector<Interval> split_at(const Interval& iv, const std::set<Rational>& breaks) {
    std::vector<Interval> out;
    Rational start = iv.lo;
    for (auto it = breaks.upper_bound(iv.lo); it != breaks.end() && *it < iv.hi; ++it) {
        out.emplace_back(start, *it);
        start = *it;
    }
    out.emplace_back(start, iv.hi);
    return out;
}

// Is the intersection of a and b exactly the single point x?
bool meets_only_at(const Interval& a, const Interval& b, const Rational& x) {
    return std::max(a.lo, b.lo) == x && std::min(a.hi, b.hi) == x;
}

// Piece p of cube r on this axis is touched at both ends by pieces of two different cubes.
bool needs_halving(const std::vector<std::vector<Interval>>& axis, std::size_t r, const Interval& p) {
    if (p.lo == p.hi) return false;
    std::vector<std::size_t> at_lo, at_hi;
    for (std::size_t s = 0; s < axis.size(); ++s) {
        if (s == r) continue;
        for (const auto& q : axis[s]) {
            if (meets_only_at(p, q, p.lo)) at_lo.push_back(s);
            if (meets_only_at(p, q, p.hi)) at_hi.push_back(s);
        }
    }
    for (auto s : at_lo)
        for (auto t : at_hi)
            if (s != t) return true;
    return false;
}

std::vector<std::set<Rational>> endpoint_sets(const CubeCollection& coll) {
    std::vector<std::set<Rational>> breaks(coll.d);
    for (const auto& c : coll.cubes)
        for (std::size_t i = 0; i < coll.d; ++i) {
            breaks[i].insert(c.intervals[i].lo);
            breaks[i].insert(c.intervals[i].hi);
        }
    return breaks;
}

}  // namespace

Refinement refine_collection(const CubeCollection& coll, std::size_t max_rounds) {
    auto breaks = endpoint_sets(coll);
    Refinement ref;
    ref.axis_pieces.assign(coll.size(), std::vector<std::vector<Interval>>(coll.d));
    for (std::size_t round = 0;; ++round) {
        for (std::size_t j = 0; j < coll.size(); ++j)
            for (std::size_t i = 0; i < coll.d; ++i)
                ref.axis_pieces[j][i] = split_at(coll.cubes[j].intervals[i], breaks[i]);
        ref.rounds = round;

        bool changed = false;
        for (std::size_t i = 0; i < coll.d; ++i) {
            std::vector<std::vector<Interval>> axis(coll.size());
            for (std::size_t j = 0; j < coll.size(); ++j) axis[j] = ref.axis_pieces[j][i];
            for (std::size_t r = 0; r < coll.size(); ++r)
                for (const auto& p : axis[r])
                    if (needs_halving(axis, r, p)) changed |= breaks[i].insert(p.midpoint()).second;
        }
        if (!changed) {
            ref.conditions_met = true;
            return ref;
        }
        if (round + 1 >= max_rounds) {
            ref.conditions_met = false;
            return ref;
        }
    }
}

Refinement refine_collection_for_pivot(const CubeCollection& coll, std::size_t pivot) {
    check_pivot(coll, pivot);
    auto breaks = endpoint_sets(coll);
    Refinement ref;
    ref.axis_pieces.assign(coll.size(), std::vector<std::vector<Interval>>(coll.d));
    for (std::size_t j = 0; j < coll.size(); ++j)
        for (std::size_t i = 0; i < coll.d; ++i)
            ref.axis_pieces[j][i] = split_at(coll.cubes[j].intervals[i], breaks[i]);

    for (std::size_t i = 0; i < coll.d; ++i) {
        std::vector<std::vector<Interval>> axis(coll.size());
        for (std::size_t j = 0; j < coll.size(); ++j) axis[j] = ref.axis_pieces[j][i];
        std::vector<Interval> halved;
        for (const auto& p : axis[pivot]) {
            if (needs_halving(axis, pivot, p)) {
                halved.emplace_back(p.lo, p.midpoint());
                halved.emplace_back(p.midpoint(), p.hi);
            } else {
                halved.push_back(p);
            }
        }
        ref.axis_pieces[pivot][i] = std::move(halved);
    }
    ref.rounds = 1;
    ref.conditions_met = true;
    return ref;
}

bool refinement_conditions_hold(const CubeCollection& selection) {
    for (std::size_t i = 0; i < selection.d; ++i) {
        for (std::size_t r = 0; r < selection.size(); ++r) {
            const auto& a = selection.cubes[r].intervals[i];
            bool touched_lo = false, touched_hi = false;
            for (std::size_t s = 0; s < selection.size(); ++s) {
                if (s == r) continue;
                const auto& b = selection.cubes[s].intervals[i];
                if (!a.intersects(b) || a == b) continue;
                if (meets_only_at(a, b, a.lo)) touched_lo = true;
                else if (meets_only_at(a, b, a.hi)) touched_hi = true;
                else return false;
            }
            if (touched_lo && touched_hi && a.lo != a.hi) return false;
        }
    }
    return true;
}

bool has_common_contact_points(const CubeCollection& selection, std::size_t cube) {
    check_pivot(selection, cube);
    for (std::size_t i = 0; i < selection.d; ++i) {
        Interval common = selection.cubes[cube].intervals[i];
        for (std::size_t s = 0; s < selection.size(); ++s) {
            const auto& b = selection.cubes[s].intervals[i];
            if (s == cube || !selection.cubes[cube].intervals[i].intersects(b)) continue;
            Rational lo = std::max(common.lo, b.lo), hi = std::min(common.hi, b.hi);
            if (hi < lo) return false;
            common = Interval(lo, hi);
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Decomposition

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > kSaturated / a) return kSaturated;
    return a * b;
}

struct AxisPattern {
    std::vector<std::size_t> choice;  // per cube
    std::uint64_t count = 0;
};

// Bit for every pair (r < s) whose chosen pieces intersect.
std::uint64_t contact_mask(const std::vector<const Interval*>& chosen) {
    std::uint64_t mask = 0;
    std::size_t bit = 0;
    for (std::size_t r = 0; r < chosen.size(); ++r)
        for (std::size_t s = r + 1; s < chosen.size(); ++s, ++bit)
            if (chosen[r]->intersects(*chosen[s])) mask |= std::uint64_t(1) << bit;
    return mask;
}

Decomposition decompose(const CubeCollection& coll, Refinement ref, std::optional<std::size_t> only_pivot) {
    const std::size_t k = coll.size();
    if (k * (k - 1) / 2 > 64) throw std::invalid_argument("decomposition supports at most 11 cubes");
    Decomposition dec;
    dec.selection_count = 1;
    for (std::size_t j = 0; j < k; ++j) {
        dec.subcube_counts.push_back(ref.piece_count(j));
        dec.selection_count = sat_mul(dec.selection_count, dec.subcube_counts.back());
    }

    // Distinct contact patterns per axis.
    std::vector<std::vector<AxisPattern>> patterns(coll.d);
    for (std::size_t i = 0; i < coll.d; ++i) {
        std::map<std::uint64_t, std::size_t> seen;
        std::vector<std::size_t> idx(k, 0);
        while (true) {
            std::vector<const Interval*> chosen(k);
            for (std::size_t j = 0; j < k; ++j) chosen[j] = &ref.axis_pieces[j][i][idx[j]];
            std::uint64_t mask = contact_mask(chosen);
            auto [it, inserted] = seen.emplace(mask, patterns[i].size());
            if (inserted) patterns[i].push_back({idx, 0});
            ++patterns[i][it->second].count;
            std::size_t j = 0;
            while (j < k && ++idx[j] == ref.axis_pieces[j][i].size()) idx[j++] = 0;
            if (j == k) break;
        }
    }

    std::vector<std::size_t> combo(coll.d, 0);
    while (true) {
        SelectionClass sc;
        sc.choice.assign(k, std::vector<std::size_t>(coll.d));
        sc.multiplicity = 1;
        for (std::size_t i = 0; i < coll.d; ++i) {
            const auto& pat = patterns[i][combo[i]];
            sc.multiplicity = sat_mul(sc.multiplicity, pat.count);
            for (std::size_t j = 0; j < k; ++j) sc.choice[j][i] = pat.choice[j];
        }
        std::vector<RationalCube> cubes;
        for (std::size_t j = 0; j < k; ++j) cubes.push_back(ref.piece(j, sc.choice[j]));
        sc.cubes = CubeCollection(coll.d, std::move(cubes));
        sc.per_pivot.resize(k);
        sc.weakly_transversal = true;
        for (std::size_t p = 0; p < k; ++p) {
            if (only_pivot && p != *only_pivot) continue;
            sc.per_pivot[p] = weakly_transversal_with_pivot(sc.cubes, p);
            if (!sc.per_pivot[p]) sc.weakly_transversal = false;
        }
        dec.all_weakly_transversal = dec.all_weakly_transversal && sc.weakly_transversal;
        dec.classes.push_back(std::move(sc));

        std::size_t i = 0;
        while (i < coll.d && ++combo[i] == patterns[i].size()) combo[i++] = 0;
        if (i == coll.d) break;
    }
    dec.refinement = std::move(ref);
    return dec;
}

}  // namespace

Decomposition decompose_weakly_transversal(const CubeCollection& coll) {
    if (coll.size() == 0) return Decomposition{};
    return decompose(coll, refine_collection(coll), std::nullopt);
}

Decomposition decompose_for_pivot(const CubeCollection& coll, std::size_t pivot) {
    check_pivot(coll, pivot);
    return decompose(coll, refine_collection_for_pivot(coll, pivot), pivot);
}

// ---------------------------------------------------------------------------
// Matrix lemma and minimal subsets

MatrixLemmaResult matrix_lemma_rows(const RationalMatrix& m, std::size_t column) {
    const std::size_t k = m.cols();
    if (m.rows() < 1 || k < 1) throw std::invalid_argument("matrix lemma needs a non-empty matrix");
    if (column >= k) throw std::invalid_argument("column index out of range");
    for (std::size_t c = 0; c < k; ++c)
        if (m(m.rows() - 1, c) != 1) throw std::invalid_argument("last row must be all ones");
    if (rank(m) < k) throw std::invalid_argument("rank deficient");

    const std::size_t d = m.rows() - 1;
    std::vector<std::size_t> others;
    std::vector<std::vector<std::size_t>> adj;
    for (std::size_t c = 0; c < k; ++c) {
        if (c == column) continue;
        others.push_back(c);
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < d; ++r)
            if (m(r, column) != m(r, c)) rows.push_back(r);
        adj.push_back(std::move(rows));
    }
    auto match = max_bipartite_matching(adj, d);
    if (!is_left_perfect(match)) throw std::runtime_error("matrix lemma: no matching despite full rank");

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t l = 0; l < others.size(); ++l) pairs.emplace_back(*match[l], others[l]);
    std::sort(pairs.begin(), pairs.end());
    MatrixLemmaResult res;
    for (auto [r, c] : pairs) {
        res.rows.push_back(r);
        res.paired_columns.push_back(c);
    }
    return res;
}

std::optional<MinimalSubset> find_minimal_property_p_subset(const CubeCollection& coll, std::size_t pivot) {
    check_pivot(coll, pivot);
    if (weakly_transversal_with_pivot(coll, pivot)) return std::nullopt;

    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < coll.size(); ++j)
        if (j != pivot) others.push_back(j);

    for (std::size_t size = 1; size <= others.size(); ++size) {
        std::vector<bool> pick(others.size(), false);
        std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(size), true);
        do {
            std::vector<std::size_t> members{pivot};
            for (std::size_t l = 0; l < others.size(); ++l)
                if (pick[l]) members.push_back(others[l]);
            std::sort(members.begin(), members.end());
            std::vector<RationalCube> cubes;
            std::size_t local_pivot = 0;
            for (std::size_t l = 0; l < members.size(); ++l) {
                if (members[l] == pivot) local_pivot = l;
                cubes.push_back(coll.cubes[members[l]]);
            }
            if (weakly_transversal_with_pivot(CubeCollection(coll.d, cubes), local_pivot)) continue;

            MinimalSubset ms;
            ms.members = members;
            const std::size_t n = members.size();
            for (std::size_t i = 0; i < coll.d && ms.directions.size() + n < coll.d + 2; ++i) {
                bool meets_all = true;
                for (auto j : members)
                    if (j != pivot && closed_projections_disjoint(coll.cubes[pivot], coll.cubes[j], i)) meets_all = false;
                if (meets_all) ms.directions.push_back(i);
            }
            if (ms.directions.size() + n != coll.d + 2)
                throw std::runtime_error("minimal subset has fewer than d-n+2 common directions");
            return ms;
        } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    throw std::runtime_error("no minimal subset found for a non weakly transversal collection");
}

}  // namespace extlab

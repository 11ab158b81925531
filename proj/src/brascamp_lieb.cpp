#include "extlab/brascamp_lieb.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace extlab {

BLDatum::BLDatum(std::size_t n, std::vector<RationalMatrix> maps_, std::vector<Rational> exponents_)
    : ambient_dim(n), maps(std::move(maps_)), exponents(std::move(exponents_)) {
    if (maps.size() != exponents.size())
        throw std::invalid_argument("datum has " + std::to_string(maps.size()) + " maps but " +
                                    std::to_string(exponents.size()) + " exponents");
    for (std::size_t j = 0; j < maps.size(); ++j) {
        if (maps[j].cols() != n)
            throw std::invalid_argument("map " + std::to_string(j) + " has " + std::to_string(maps[j].cols()) +
                                        " columns, expected " + std::to_string(n));
        if (exponents[j] < 0) throw std::invalid_argument("exponent " + std::to_string(j) + " is negative");
    }
}

CapPointSet::CapPointSet(std::size_t d_, std::vector<RationalVector> pts) : d(d_), points(std::move(pts)) {
    if (d == 0) throw std::invalid_argument("cap points need d >= 1");
    if (points.size() != d + 1)
        throw std::invalid_argument("cap point set needs exactly d+1 = " + std::to_string(d + 1) + " points");
    for (const auto& p : points)
        if (p.size() != d) throw std::invalid_argument("cap point has wrong dimension");
}

BLDatum bl_datum_from_caps(const CapPointSet& pts) {
    const std::size_t d = pts.d;
    std::vector<RationalMatrix> maps;
    for (std::size_t l = 0; l < d; ++l) {
        RationalMatrix m(1, d + 1);
        m(0, l) = 1;
        m(0, d) = 2 * pts.points[0][l];
        maps.push_back(std::move(m));
    }
    for (std::size_t l = 0; l < d; ++l) {
        RationalMatrix m(d, d + 1);
        for (std::size_t i = 0; i < d; ++i) {
            m(i, i) = 1;
            m(i, d) = 2 * pts.points[l + 1][i];
        }
        maps.push_back(std::move(m));
    }
    return BLDatum(d + 1, std::move(maps), std::vector<Rational>(2 * d, ratio(1, static_cast<long>(d))));
}

bool scaling_condition(const BLDatum& datum) {
    Rational sum = 0;
    for (std::size_t j = 0; j < datum.maps.size(); ++j) sum += datum.exponents[j] * datum.maps[j].rows();
    return sum == datum.ambient_dim;
}

namespace {

using MapInts = std::vector<std::optional<std::vector<std::int64_t>>>;

MapInts map_integer_rows(const BLDatum& datum) {
    MapInts out;
    for (const auto& m : datum.maps) out.push_back(integer_rows(m));
    return out;
}

DimensionCheck dimension_check(const BLDatum& datum, const MapInts& ints, const Subspace& v) {
    if (v.ambient_dim() != datum.ambient_dim) throw std::invalid_argument("subspace dimension does not match datum");
    DimensionCheck c;
    c.lhs = v.dim();
    c.rhs = 0;
    for (std::size_t j = 0; j < datum.maps.size(); ++j) {
        if (datum.exponents[j] == 0) continue;
        c.rhs += datum.exponents[j] * image_dim(datum.maps[j], ints[j], v);
    }
    c.holds = Rational(c.lhs) <= c.rhs;
    return c;
}

}  // namespace

DimensionCheck dimension_condition_on(const BLDatum& datum, const Subspace& v) {
    return dimension_check(datum, map_integer_rows(datum), v);
}

namespace {

struct IntsHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto x : v) {
            h ^= static_cast<std::uint64_t>(x);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h ^ v.size());
    }
};

}  // namespace

CandidateFamily candidate_subspaces(const BLDatum& datum, const std::vector<Subspace>& extra,
                                    const CandidateOptions& options) {
    const std::size_t n = datum.ambient_dim;
    CandidateFamily fam;
    std::unordered_set<std::vector<std::int64_t>, IntsHash> int_keys;
    std::unordered_set<std::string> text_keys;
    auto seen = [&](const Subspace& s) {
        if (const auto& ints = s.integer_basis()) return int_keys.count(*ints) > 0;
        return text_keys.count(s.key()) > 0;
    };
    auto add = [&](Subspace s) {
        if (seen(s)) return false;
        if (fam.subspaces.size() >= options.max_size) {
            fam.truncated = true;
            return false;
        }
        if (const auto& ints = s.integer_basis()) int_keys.insert(*ints);
        else text_keys.insert(s.key());
        fam.subspaces.push_back(std::move(s));
        return true;
    };

    for (const auto& e : extra) {
        if (e.ambient_dim() != n) throw std::invalid_argument("extra candidate has wrong ambient dimension");
        add(e);
    }
    add(Subspace::zero(n));
    add(Subspace::whole(n));

    std::vector<Subspace> kernels;
    for (const auto& m : datum.maps) kernels.push_back(Subspace::kernel(m));
    for (const auto& k : kernels) add(k);

    if (kernels.size() <= 12) {
        for (std::uint32_t mask = 1; mask < (1u << kernels.size()); ++mask) {
            if ((mask & (mask - 1)) == 0) continue;
            std::vector<RationalVector> rows;
            for (std::size_t j = 0; j < datum.maps.size(); ++j)
                if (mask & (1u << j))
                    for (std::size_t r = 0; r < datum.maps[j].rows(); ++r) rows.push_back(datum.maps[j].row(r));
            add(Subspace::kernel(RationalMatrix::from_rows(rows, n)));
        }
    } else {
        fam.truncated = true;
    }

    if (n <= 12) {
        for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
            std::vector<std::size_t> axes;
            for (std::size_t i = 0; i < n; ++i)
                if (mask & (1u << i)) axes.push_back(i);
            add(Subspace::coordinate(n, axes));
        }
    } else {
        fam.truncated = true;
    }

    std::size_t fresh_from = 0;
    for (std::size_t round = 0; round < options.max_rounds; ++round) {
        std::size_t before = fam.subspaces.size();
        for (std::size_t a = fresh_from; a < before; ++a)
            for (std::size_t b = 0; b < before; ++b) {
                if (b >= fresh_from && b <= a) continue;
                const Subspace& u = fam.subspaces[a];
                const Subspace& w = fam.subspaces[b];
                if (u.dim() == 0 || w.dim() == 0 || u.dim() == n || w.dim() == n) continue;
                Subspace s = u.sum(w);
                const std::size_t common = u.dim() + w.dim() - s.dim();
                const std::size_t smaller = std::min(u.dim(), w.dim());
                add(std::move(s));
                // zero or nested intersections are already in the family
                if (common == 0 || common == smaller) continue;
                add(fam.subspaces[a].intersect(fam.subspaces[b]));
            }
        if (fam.subspaces.size() == before) return fam;
        fresh_from = before;
        if (round + 1 == options.max_rounds) fam.truncated = true;
    }
    return fam;
}

FinitenessVerdict check_finiteness(const BLDatum& datum, const std::vector<Subspace>& candidates) {
    FinitenessVerdict v;
    if (!scaling_condition(datum)) {
        v.kind = FinitenessVerdict::Kind::Infinite;
        v.scaling_failed = true;
        return v;
    }
    const MapInts ints = map_integer_rows(datum);
    for (const auto& s : candidates) {
        DimensionCheck c = dimension_check(datum, ints, s);
        if (!c.holds) {
            v.kind = FinitenessVerdict::Kind::Infinite;
            v.witness = s;
            v.witness_check = c;
            return v;
        }
    }
    v.kind = FinitenessVerdict::Kind::FiniteOnCandidates;
    return v;
}

std::optional<ViolationWitness> construct_violating_subspace(const CubeCollection& coll, std::size_t pivot) {
    const std::size_t d = coll.d;
    if (coll.size() != d + 1)
        throw std::invalid_argument("violating subspace construction needs k = d+1 cubes");
    if (pivot >= coll.size()) throw std::out_of_range("pivot out of range");
    if (!has_common_contact_points(coll, pivot))
        throw std::invalid_argument(
            "collection does not meet the contact conditions at the pivot; refine it first "
            "(refine_collection_for_pivot) and pass one selection");

    auto subset = find_minimal_property_p_subset(coll, pivot);
    if (!subset) return std::nullopt;
    const std::size_t n = subset->members.size();
    const auto& dirs = subset->directions;

    std::vector<bool> in_subset(coll.size(), false);
    for (auto j : subset->members) in_subset[j] = true;

    std::vector<Rational> gamma(d);
    for (auto v : dirs) {
        Rational lo = coll.cubes[pivot].intervals[v].lo, hi = coll.cubes[pivot].intervals[v].hi;
        for (auto j : subset->members) {
            lo = std::max(lo, coll.cubes[j].intervals[v].lo);
            hi = std::min(hi, coll.cubes[j].intervals[v].hi);
        }
        if (hi < lo) throw std::logic_error("no common point on a shared direction");
        gamma[v] = (lo + hi) / 2;
    }

    // Cap points are ordered with the pivot first.
    std::vector<std::size_t> order{pivot};
    for (std::size_t j = 0; j < coll.size(); ++j)
        if (j != pivot) order.push_back(j);

    std::vector<RationalVector> points;
    for (auto j : order) {
        RationalVector x = coll.cubes[j].center();
        if (in_subset[j]) {
            for (auto v : dirs) x[v] = gamma[v];
        } else {
            bool matches = true;
            for (auto v : dirs) matches = matches && x[v] == gamma[v];
            if (matches) {
                // Keep the kernel line of a non-member out of V when the cube allows it.
                for (auto v : dirs) {
                    const auto& iv = coll.cubes[j].intervals[v];
                    if (iv.lo != iv.hi) {
                        x[v] = iv.lo != gamma[v] ? iv.lo : iv.hi;
                        break;
                    }
                }
            }
        }
        points.push_back(std::move(x));
    }

    ViolationWitness w;
    w.points = CapPointSet(d, points);
    w.subset = *subset;
    BLDatum datum = bl_datum_from_caps(w.points);
    Subspace v = Subspace::whole(d + 1);
    for (auto r : dirs) v = v.intersect(Subspace::kernel(datum.maps[r]));
    if (v.dim() != n - 1) throw std::logic_error("constructed subspace has unexpected dimension");
    w.v = v;
    w.check = dimension_condition_on(datum, v);
    w.predicted_rhs = ratio(static_cast<long>((n - 1) * d) - 1, static_cast<long>(d));
    if (w.check.holds) throw std::logic_error("constructed subspace does not violate the dimension condition");
    return w;
}

CapVerdict cap_finiteness_via_geometry(const CubeCollection& coll) {
    if (coll.size() != coll.d + 1)
        throw std::invalid_argument("cap finiteness needs k = d+1 cubes, got " + std::to_string(coll.size()));
    Decomposition dec = decompose_for_pivot(coll, 0);
    CapVerdict verdict;
    verdict.selection_count = dec.selection_count;
    verdict.class_count = dec.classes.size();
    for (const auto& sc : dec.classes) {
        if (sc.weakly_transversal) continue;
        auto w = construct_violating_subspace(sc.cubes, 0);
        if (!w) throw std::logic_error("failing selection produced no witness");
        for (std::size_t j = 0; j < coll.size(); ++j)
            if (!coll.cubes[j].contains(w->points.points[j]))
                throw std::logic_error("witness point outside its cube");
        verdict.kind = CapVerdict::Kind::InfiniteForSomePoints;
        verdict.witness = std::move(w);
        return verdict;
    }
    verdict.kind = CapVerdict::Kind::FiniteForAllPoints;
    return verdict;
}

}  // namespace extlab

#include "extlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace extlab {

CoefficientField::CoefficientField(std::vector<IndexRange> n_ranges_, IndexRange m_range_)
    : n_ranges(std::move(n_ranges_)), m_range(m_range_) {
    if (n_ranges.empty()) throw std::invalid_argument("CoefficientField: no n axes");
    for (const auto& r : n_ranges)
        if (r.size() == 0) throw std::invalid_argument("CoefficientField: empty n range");
    if (m_range.size() == 0) throw std::invalid_argument("CoefficientField: empty m range");
    values.assign(n_count() * m_range.size(), Complex{});
}

std::size_t CoefficientField::n_count() const {
    std::size_t c = 1;
    for (const auto& r : n_ranges) c *= r.size();
    return c;
}

std::size_t CoefficientField::index(const std::vector<long>& n, long m) const {
    if (n.size() != n_ranges.size()) throw std::invalid_argument("CoefficientField: wrong index dimension");
    if (m < m_range.lo || m > m_range.hi) throw std::out_of_range("CoefficientField: m out of range");
    std::size_t flat = static_cast<std::size_t>(m - m_range.lo);
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] < n_ranges[i].lo || n[i] > n_ranges[i].hi) throw std::out_of_range("CoefficientField: n out of range");
        flat = flat * n_ranges[i].size() + static_cast<std::size_t>(n[i] - n_ranges[i].lo);
    }
    return flat;
}

std::pair<std::vector<long>, long> CoefficientField::position(std::size_t flat) const {
    std::vector<long> n(n_ranges.size());
    for (std::size_t i = n_ranges.size(); i-- > 0;) {
        std::size_t s = n_ranges[i].size();
        n[i] = n_ranges[i].lo + static_cast<long>(flat % s);
        flat /= s;
    }
    return {n, m_range.lo + static_cast<long>(flat)};
}

namespace {

bool cube_inside(const RationalCube& inner, const RationalCube& outer) {
    if (inner.dim() != outer.dim()) return false;
    for (std::size_t i = 0; i < inner.dim(); ++i)
        if (inner.intervals[i].lo < outer.intervals[i].lo || inner.intervals[i].hi > outer.intervals[i].hi) return false;
    return true;
}

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double power_sum(const CoefficientField& field, double p) {
    double s = 0.0;
    for (const auto& c : field.values) s += std::pow(std::abs(c), p);
    return s;
}

double max_abs(const CoefficientField& field) {
    double s = 0.0;
    for (const auto& c : field.values) s = std::max(s, std::abs(c));
    return s;
}

}  // namespace

MultilinearSpec::MultilinearSpec(CubeCollection cubes_, std::vector<GridFunction> inputs_)
    : MultilinearSpec(cubes_, inputs_, {}) {}

MultilinearSpec::MultilinearSpec(CubeCollection cubes_, std::vector<GridFunction> inputs_,
                                 std::vector<BumpProfile> profiles_)
    : cubes(std::move(cubes_)), inputs(std::move(inputs_)), profiles(std::move(profiles_)) {
    if (inputs.size() != cubes.size()) throw std::invalid_argument("MultilinearSpec: one input per cube required");
    if (profiles.empty())
        for (const auto& c : cubes.cubes) profiles.push_back(BumpProfile::sharp(c));
    if (profiles.size() != cubes.size()) throw std::invalid_argument("MultilinearSpec: one profile per cube required");
    for (std::size_t j = 0; j < inputs.size(); ++j) {
        if (!cube_inside(inputs[j].cube(), cubes.cubes[j]))
            throw std::invalid_argument("MultilinearSpec: input " + std::to_string(j) + " is not supported in its cube");
        if (profiles[j].dim() != cubes.d) throw std::invalid_argument("MultilinearSpec: profile dimension mismatch");
    }
}

CoefficientField e_d_coefficients(const GridFunction& g, const BumpProfile& profile,
                                  const std::vector<IndexRange>& n_ranges, IndexRange m_range, std::size_t threads) {
    if (n_ranges.size() != g.dim()) throw std::invalid_argument("e_d_coefficients: n range dimension mismatch");
    CoefficientField field(n_ranges, m_range);
    const std::size_t per_m = field.n_count();
    parallel_for(m_range.size(), threads, [&](std::size_t k) {
        CoefficientSlab slab = coefficient_slab(g, profile, m_range.lo + static_cast<long>(k), n_ranges);
        std::copy(slab.values.begin(), slab.values.end(), field.values.begin() + static_cast<std::ptrdiff_t>(k * per_m));
    });
    return field;
}

CoefficientField e_d_coefficients(const GridFunction& g, const std::vector<IndexRange>& n_ranges, IndexRange m_range,
                                  std::size_t threads) {
    return e_d_coefficients(g, BumpProfile::sharp(g.cube()), n_ranges, m_range, threads);
}

CoefficientField me_kd_coefficients(const MultilinearSpec& spec, const std::vector<IndexRange>& n_ranges,
                                    IndexRange m_range, std::size_t threads) {
    if (spec.inputs.empty()) throw std::invalid_argument("me_kd_coefficients: no inputs");
    CoefficientField out;
    for (std::size_t j = 0; j < spec.inputs.size(); ++j) {
        CoefficientField f = e_d_coefficients(spec.inputs[j], spec.profiles[j], n_ranges, m_range, threads);
        if (j == 0) {
            out = std::move(f);
            continue;
        }
        for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= f.values[i];
    }
    return out;
}

double lp_norm(const CoefficientField& field, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1 (use lq_quasinorm)");
    if (std::isinf(p)) return max_abs(field);
    return std::pow(power_sum(field, p), 1.0 / p);
}

double lq_quasinorm(const CoefficientField& field, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("lq_quasinorm: q must be positive");
    if (std::isinf(q)) return max_abs(field);
    return std::pow(power_sum(field, q), 1.0 / q);
}

double mixed_norm(const CoefficientField& field, const std::vector<std::size_t>& inner_axes, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("mixed_norm: q must be positive");
    std::vector<bool> inner(field.dim(), false);
    for (auto a : inner_axes) {
        if (a >= field.dim()) throw std::invalid_argument("mixed_norm: axis out of range");
        inner[a] = true;
    }
    // Outer index: m, then the outer n axes in order.
    std::vector<std::size_t> outer_stride(field.dim(), 0);
    std::size_t outer_per_m = 1;
    for (std::size_t i = field.dim(); i-- > 0;) {
        if (inner[i]) continue;
        outer_stride[i] = outer_per_m;
        outer_per_m *= field.n_ranges[i].size();
    }
    std::vector<double> sq(outer_per_m * field.m_range.size(), 0.0);
    const std::size_t per_m = field.n_count();
    for (std::size_t flat = 0; flat < field.values.size(); ++flat) {
        std::size_t mi = flat / per_m, rest = flat % per_m, outer = 0;
        for (std::size_t i = field.dim(); i-- > 0;) {
            std::size_t s = field.n_ranges[i].size();
            if (!inner[i]) outer += (rest % s) * outer_stride[i];
            rest /= s;
        }
        sq[mi * outer_per_m + outer] += std::norm(field.values[flat]);
    }
    if (std::isinf(q)) {
        double m = 0.0;
        for (double v : sq) m = std::max(m, std::sqrt(v));
        return m;
    }
    double s = 0.0;
    for (double v : sq) s += std::pow(v, q / 2.0);
    return std::pow(s, 1.0 / q);
}

double tail_fraction(const CoefficientField& field, double p) {
    const std::size_t per_m = field.n_count();
    auto shell_mass = [&](std::size_t mi) {
        double s = 0.0;
        for (std::size_t i = 0; i < per_m; ++i) {
            double a = std::abs(field.values[mi * per_m + i]);
            s += std::isinf(p) ? a : std::pow(a, p);
        }
        return s;
    };
    if (std::isinf(p)) {
        double total = max_abs(field);
        if (total == 0.0) return 0.0;
        double edge = 0.0;
        for (std::size_t mi : {std::size_t{0}, field.m_range.size() - 1})
            for (std::size_t i = 0; i < per_m; ++i) edge = std::max(edge, std::abs(field.values[mi * per_m + i]));
        return edge / total;
    }
    double total = power_sum(field, p);
    if (total == 0.0) return 0.0;
    double edge = shell_mass(0);
    if (field.m_range.size() > 1) edge += shell_mass(field.m_range.size() - 1);
    return edge / total;
}

NormReport norm_report(const CoefficientField& field, double p) {
    NormReport r;
    r.p = p;
    r.quasi = p < 1.0;
    r.value = r.quasi ? lq_quasinorm(field, p) : lp_norm(field, p);
    r.tail_fraction = tail_fraction(field, p);
    return r;
}

double grid_lp_norm(const GridFunction& g, double p) {
    if (!(p > 0.0)) throw std::invalid_argument("grid_lp_norm: p must be positive");
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& c : g.samples()) m = std::max(m, std::abs(c));
        return m;
    }
    double s = 0.0;
    for (const auto& c : g.samples()) s += std::pow(std::abs(c), p);
    return std::pow(s * g.cell_volume(), 1.0 / p);
}

Complex continuous_extension(const std::vector<WeightedBox>& g, const ExtensionPoint& point) {
    Complex total{};
    for (const auto& term : g) {
        if (term.box.dim() != point.xi.size())
            throw std::invalid_argument("continuous_extension: point dimension mismatch");
        Complex prod = term.weight;
        for (std::size_t i = 0; i < term.box.dim(); ++i)
            prod *= chirp_segment_integral(to_double(term.box.intervals[i].lo), to_double(term.box.intervals[i].hi),
                                           point.xi[i], point.t);
        total += prod;
    }
    return total;
}

std::vector<Complex> continuous_extension(const std::vector<WeightedBox>& g,
                                          const std::vector<ExtensionPoint>& points) {
    std::vector<Complex> out;
    out.reserve(points.size());
    for (const auto& pt : points) out.push_back(continuous_extension(g, pt));
    return out;
}

namespace {

NormRatio finish_ratio(const CoefficientField& field, double q_out, double denominator) {
    if (!(denominator > 0.0)) throw std::invalid_argument("norm_ratio: input norm is zero");
    NormReport r = norm_report(field, q_out);
    NormRatio out;
    out.numerator = r.value;
    out.denominator = denominator;
    out.ratio = r.value / denominator;
    out.tail_fraction = r.tail_fraction;
    out.tail_exceeded = r.tail_fraction > kTailLimit;
    return out;
}

}  // namespace

NormRatio norm_ratio(const GridFunction& g, double p_in, double q_out, const std::vector<IndexRange>& n_ranges,
                     IndexRange m_range, std::size_t threads) {
    return finish_ratio(e_d_coefficients(g, n_ranges, m_range, threads), q_out, grid_lp_norm(g, p_in));
}

NormRatio norm_ratio(const MultilinearSpec& spec, double p_in, double q_out, const std::vector<IndexRange>& n_ranges,
                     IndexRange m_range, std::size_t threads) {
    double denom = 1.0;
    for (const auto& g : spec.inputs) denom *= grid_lp_norm(g, p_in);
    return finish_ratio(me_kd_coefficients(spec, n_ranges, m_range, threads), q_out, denom);
}

std::size_t LevelSetHistogram::total() const {
    std::size_t t = 0;
    for (const auto& [l, c] : counts) t += c;
    return t;
}

LevelSetHistogram level_set_histogram(const CoefficientField& field, double floor) {
    if (!(floor > 0.0)) throw std::invalid_argument("level_set_histogram: floor must be positive");
    LevelSetHistogram h;
    h.floor = floor;
    for (const auto& c : field.values) {
        double a = std::abs(c);
        if (a < floor) {
            ++h.below_floor;
            continue;
        }
        int e = 0;
        std::frexp(a, &e);  // a in [2^(e-1), 2^e)
        ++h.counts[1 - e];
    }
    return h;
}

GridFunction random_corpus_sample(std::mt19937_64& rng, const RationalCube& cube, std::size_t cells,
                                  std::size_t n) {
    const std::size_t d = cube.dim();
    if (d == 0 || cells == 0 || n == 0) throw std::invalid_argument("random_corpus_sample: empty grid");
    if (n % cells != 0) throw std::invalid_argument("random_corpus_sample: resolution must be a multiple of cells");
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= cells;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Complex> s(total);
    for (auto& v : s) {
        double re = gauss(rng);
        v = Complex(re, gauss(rng));
    }
    std::size_t stride = total;
    for (std::size_t axis = 0; axis < d; ++axis) {
        stride /= cells;
        std::vector<Complex> next(total);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t k = (flat / stride) % cells;
            Complex acc = s[flat];
            int taps = 1;
            if (k > 0) acc += s[flat - stride], ++taps;
            if (k + 1 < cells) acc += s[flat + stride], ++taps;
            next[flat] = acc / static_cast<double>(taps);
        }
        s.swap(next);
    }
    const std::size_t r = n / cells;
    std::size_t fine_total = 1;
    for (std::size_t i = 0; i < d; ++i) fine_total *= n;
    std::vector<Complex> fine(fine_total);
    for (std::size_t flat = 0; flat < fine_total; ++flat) {
        std::size_t rest = flat, coarse = 0, scale = 1;
        for (std::size_t i = d; i-- > 0;) {
            coarse += ((rest % n) / r) * scale;
            rest /= n;
            scale *= cells;
        }
        fine[flat] = s[coarse];
    }
    return GridFunction(cube, n, std::move(fine));
}

std::vector<IndexRange> full_n_box(const GridFunction& g) {
    std::vector<IndexRange> box;
    for (std::size_t i = 0; i < g.dim(); ++i) {
        double side = to_double(g.cube().intervals[i].length());
        long half = static_cast<long>(std::floor(static_cast<double>(g.resolution()) / (2.0 * side) + 1e-9));
        box.push_back(IndexRange{-half, std::max(-half, half - 1)});
    }
    return box;
}

}  // namespace extlab

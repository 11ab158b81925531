#include "extlab/wavepackets.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace extlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(2 pi i phase), reducing the phase modulo 1 first.
Complex turn(double phase) {
    phase -= std::floor(phase);
    return std::polar(1.0, kTwoPi * phase);
}

double mollifier(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < Rule::abscissa().size(); ++i)
        s += Rule::weights()[i] * (f(mid - half * Rule::abscissa()[i]) + f(mid + half * Rule::abscissa()[i]));
    return half * s;
}

// Cumulative integral of the mollifier from -1 at 2^k+1 equally spaced nodes.
struct MollifierTable {
    static constexpr std::size_t cells = 512;
    std::vector<double> cumulative;

    MollifierTable() : cumulative(cells + 1, 0.0) {
        for (std::size_t k = 0; k < cells; ++k)
            cumulative[k + 1] = cumulative[k] + gauss_legendre(mollifier, node(k), node(k + 1));
    }
    static double node(std::size_t k) { return -1.0 + 2.0 * static_cast<double>(k) / cells; }

    double from_minus_one(double u) const {
        const auto k = std::min<std::size_t>(cells - 1, static_cast<std::size_t>((u + 1.0) * 0.5 * cells));
        return cumulative[k] + gauss_legendre(mollifier, node(k), u);
    }
};

const MollifierTable& mollifier_table() {
    static const MollifierTable table;
    return table;
}

void require_finite(std::initializer_list<double> values, const char* what) {
    for (double v : values)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

// Forward DFT plans keyed by (d, N), unaligned so any buffers can be passed to fftw_execute_dft.
fftw_plan forward_plan(std::size_t d, std::size_t n) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, std::size_t>, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = plans.find({d, n});
    if (it != plans.end()) return it->second;
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= n;
    std::vector<Complex> in(total), out(total);
    std::vector<int> dims(d, static_cast<int>(n));
    fftw_plan plan = fftw_plan_dft(static_cast<int>(d), dims.data(), reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans.emplace(std::make_pair(d, n), plan);
    return plan;
}

}  // namespace

double mollifier_transition(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const auto& table = mollifier_table();
    const double total = table.cumulative.back();
    const double u = 2.0 * s - 1.0;
    // Integrate toward the nearer end; the mollifier is even.
    if (u < 0.0) return 1.0 - table.from_minus_one(u) / total;
    return table.from_minus_one(-u) / total;
}

BumpProfile::BumpProfile(Mode mode_, RationalCube cube_, double margin_)
    : mode(mode_), cube(std::move(cube_)), margin(margin_) {
    if (cube.dim() == 0) throw std::invalid_argument("profile cube must have dimension >= 1");
    if (mode == Mode::Smooth && !(margin > 0.0 && std::isfinite(margin)))
        throw std::invalid_argument("smooth profile margin must be positive");
}

namespace {

double profile_factor(BumpProfile::Mode mode, double lo, double hi, double margin, double x) {
    if (mode == BumpProfile::Mode::Sharp) return lo <= x && x <= hi ? 1.0 : 0.0;
    const double dist = std::max({lo - x, x - hi, 0.0});
    if (dist == 0.0) return 1.0;
    return mollifier_transition(dist / margin);
}

}  // namespace

double BumpProfile::axis_value(std::size_t axis, double x) const {
    return profile_factor(mode, to_double(cube.intervals[axis].lo), to_double(cube.intervals[axis].hi), margin, x);
}

double BumpProfile::operator()(const std::vector<double>& x) const {
    if (x.size() != dim()) throw std::invalid_argument("profile evaluated at a point of the wrong dimension");
    double v = 1.0;
    for (std::size_t a = 0; a < x.size() && v != 0.0; ++a) v *= axis_value(a, x[a]);
    return v;
}

std::pair<double, double> BumpProfile::support(std::size_t axis) const {
    double lo = to_double(cube.intervals[axis].lo), hi = to_double(cube.intervals[axis].hi);
    if (mode == Mode::Smooth) {
        lo -= margin;
        hi += margin;
    }
    return {lo, hi};
}

GridFunction::GridFunction(RationalCube cube, std::size_t n, std::vector<Complex> samples)
    : cube_(std::move(cube)), n_(n), samples_(std::move(samples)) {
    if (cube_.dim() == 0) throw std::invalid_argument("grid function needs d >= 1");
    if (n_ == 0) throw std::invalid_argument("grid resolution must be positive");
    std::size_t expected = 1;
    for (std::size_t a = 0; a < cube_.dim(); ++a) {
        if (cube_.intervals[a].length() == 0) throw std::invalid_argument("grid function cube is degenerate");
        expected *= n_;
    }
    if (samples_.size() != expected)
        throw std::invalid_argument("grid function has " + std::to_string(samples_.size()) + " samples, expected " +
                                    std::to_string(expected));
    for (const auto& z : samples_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw std::invalid_argument("grid function sample is not finite");
    for (const auto& iv : cube_.intervals) {
        lo_.push_back(to_double(iv.lo));
        width_.push_back(to_double(iv.length()) / static_cast<double>(n_));
    }
}

GridFunction GridFunction::sample(const RationalCube& cube, std::size_t n,
                                  const std::function<Complex(const std::vector<double>&)>& f) {
    std::size_t total = 1;
    for (std::size_t a = 0; a < cube.dim(); ++a) total *= n;
    GridFunction shape(cube, n, std::vector<Complex>(total));
    std::vector<Complex> values(total);
    for (std::size_t i = 0; i < total; ++i) values[i] = f(shape.cell_center(i));
    return GridFunction(cube, n, std::move(values));
}

double GridFunction::cell_width(std::size_t axis) const {
    return width_.at(axis);
}

double GridFunction::cell_volume() const {
    double v = 1.0;
    for (double w : width_) v *= w;
    return v;
}

std::vector<double> GridFunction::cell_center(std::size_t flat_index) const {
    std::vector<double> x(dim());
    for (std::size_t a = dim(); a-- > 0;) {
        const std::size_t i = flat_index % n_;
        flat_index /= n_;
        x[a] = lo_[a] + (static_cast<double>(i) + 0.5) * width_[a];
    }
    return x;
}

double GridFunction::norm_squared() const {
    double s = 0.0;
    for (const auto& z : samples_) s += std::norm(z);
    return s * cell_volume();
}

Complex eval_wavepacket(const WavePacket& wp, const std::vector<double>& x) {
    if (x.size() != wp.profile.dim() || wp.n.size() != wp.profile.dim())
        throw std::invalid_argument("wave packet evaluated at a point of the wrong dimension");
    const double p = wp.profile(x);
    if (p == 0.0) return 0.0;
    double phase = 0.0, r2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) {
        phase += x[a] * static_cast<double>(wp.n[a]);
        r2 += x[a] * x[a];
    }
    phase += r2 * static_cast<double>(wp.m);
    return p * turn(phase);
}

Complex oscillatory_integral(const std::function<double(double)>& w, double a, double b, double alpha, double beta,
                             std::size_t min_panels) {
    require_finite({a, b, alpha, beta}, "oscillatory_integral");
    if (a > b) throw std::invalid_argument("oscillatory_integral: a > b");
    if (a == b) return 0.0;
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const auto& nodes = Rule::abscissa();
    const auto& weights = Rule::weights();
    const double turns = (std::abs(alpha) + 2.0 * std::abs(beta) * std::max(std::abs(a), std::abs(b))) * (b - a);
    const std::size_t panels = std::max<std::size_t>(min_panels, static_cast<std::size_t>(std::ceil(turns)) + 1);
    const double h = (b - a) / static_cast<double>(panels);
    auto f = [&](double x) {
        const double wx = w(x);
        return wx == 0.0 ? Complex(0.0) : wx * turn(alpha * x + beta * x * x);
    };
    Complex total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h, half = 0.5 * h;
        Complex s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            s += weights[i] * (f(mid - half * nodes[i]) + f(mid + half * nodes[i]));
        total += half * s;
    }
    return total;
}

Complex chirp_segment_integral(double a, double b, double xi, double t) {
    require_finite({a, b, xi, t}, "chirp_segment_integral");
    if (a > b) throw std::invalid_argument("chirp_segment_integral: a > b");
    return oscillatory_integral([](double) { return 1.0; }, a, b, -xi, -t);
}

bool resolution_inadequate(std::size_t n, const std::vector<long>& freq, long m) {
    long top = 0;
    for (long f : freq) top = std::max(top, std::abs(f));
    return static_cast<double>(n) < 8.0 * static_cast<double>(top + std::abs(m) + 1);
}

InnerProduct inner_product(const GridFunction& g, const WavePacket& wp) {
    const std::size_t d = g.dim();
    if (wp.profile.dim() != d || wp.n.size() != d)
        throw std::invalid_argument("inner_product: packet and grid function dimensions differ");
    for (std::size_t a = 0; a < d; ++a) {
        auto [lo, hi] = wp.profile.support(a);
        if (lo > to_double(g.cube().intervals[a].lo) || hi < to_double(g.cube().intervals[a].hi))
            throw std::invalid_argument("inner_product: packet profile does not cover the grid function's cube");
    }
    InnerProduct out;
    out.resolution_warning = resolution_inadequate(g.resolution(), wp.n, wp.m);
    Complex s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) s += g.samples()[i] * std::conj(eval_wavepacket(wp, g.cell_center(i)));
    out.value = s * g.cell_volume();
    return out;
}

const Complex& CoefficientSlab::at(const std::vector<long>& n) const {
    if (n.size() != n_box.size()) throw std::invalid_argument("coefficient index has the wrong dimension");
    std::size_t idx = 0;
    for (std::size_t a = 0; a < n.size(); ++a) {
        if (n[a] < n_box[a].lo || n[a] > n_box[a].hi) throw std::out_of_range("coefficient index outside the slab box");
        idx = idx * n_box[a].size() + static_cast<std::size_t>(n[a] - n_box[a].lo);
    }
    return values[idx];
}

CoefficientSlab coefficient_slab(const GridFunction& g, const BumpProfile& profile, long m,
                                 const std::vector<IndexRange>& n_box) {
    const std::size_t d = g.dim(), N = g.resolution();
    if (profile.dim() != d || n_box.size() != d)
        throw std::invalid_argument("coefficient_slab: profile or box dimension differs from the grid function");
    CoefficientSlab slab;
    slab.m = m;
    slab.n_box = n_box;
    std::size_t count = 1;
    std::vector<long> corner;
    for (const auto& r : n_box) {
        if (r.size() == 0) throw std::invalid_argument("coefficient_slab: empty index range");
        count *= r.size();
        corner.push_back(std::max(std::abs(r.lo), std::abs(r.hi)));
    }
    slab.resolution_warning = resolution_inadequate(N, corner, m);

    bool integer_sides = true;
    std::vector<long> side(d);
    for (std::size_t a = 0; a < d; ++a) {
        const Rational len = g.cube().intervals[a].length();
        integer_sides = integer_sides && len.get_den() == 1 && len.get_num().fits_slong_p();
        if (integer_sides) side[a] = len.get_num().get_si();
        const double reach = static_cast<double>(corner[a]) * to_double(len);
        if (reach > static_cast<double>(N) / 2.0)
            throw std::invalid_argument("coefficient_slab: frequency " + std::to_string(corner[a]) +
                                        " exceeds the grid's range N/2 on axis " + std::to_string(a) +
                                        "; increase resolution");
    }

    std::vector<double> first_center(d);
    for (std::size_t a = 0; a < d; ++a) first_center[a] = to_double(g.cube().intervals[a].lo) + 0.5 * g.cell_width(a);

    // Profile and chirp both factor over axes.
    std::vector<std::vector<Complex>> axis_weight(d, std::vector<Complex>(N));
    for (std::size_t a = 0; a < d; ++a) {
        const double lo = to_double(profile.cube.intervals[a].lo), hi = to_double(profile.cube.intervals[a].hi);
        const double h = g.cell_width(a);
        for (std::size_t i = 0; i < N; ++i) {
            const double x = first_center[a] + static_cast<double>(i) * h;
            const double w = profile_factor(profile.mode, lo, hi, profile.margin, x);
            axis_weight[a][i] = w == 0.0 ? Complex{} : w * turn(-static_cast<double>(m) * x * x);
        }
    }
    std::vector<Complex> chirped(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        Complex w = g.samples()[i];
        std::size_t r = i;
        for (std::size_t a = d; a-- > 0;) {
            w *= axis_weight[a][r % N];
            r /= N;
        }
        chirped[i] = w;
    }
    const double vol = g.cell_volume();
    slab.values.assign(count, 0.0);

    if (integer_sides) {
        std::vector<Complex> spectrum(g.size());
        fftw_execute_dft(forward_plan(d, N), reinterpret_cast<fftw_complex*>(chirped.data()),
                         reinterpret_cast<fftw_complex*>(spectrum.data()));
        const long Nl = static_cast<long>(N);
        std::vector<std::vector<std::size_t>> bin(d);
        std::vector<std::vector<Complex>> shift(d);
        for (std::size_t a = 0; a < d; ++a)
            for (long n = n_box[a].lo; n <= n_box[a].hi; ++n) {
                bin[a].push_back(static_cast<std::size_t>(((n * side[a]) % Nl + Nl) % Nl));
                shift[a].push_back(turn(-static_cast<double>(n) * first_center[a]));
            }
        for (std::size_t out = 0; out < count; ++out) {
            std::size_t rest = out, flat = 0, stride = 1;
            Complex c = vol;
            for (std::size_t a = d; a-- > 0;) {
                const std::size_t j = rest % n_box[a].size();
                rest /= n_box[a].size();
                flat += bin[a][j] * stride;
                stride *= N;
                c *= shift[a][j];
            }
            slab.values[out] = c * spectrum[flat];
        }
        return slab;
    }

    // Direct summation: separable per-axis phase tables.
    std::vector<std::vector<Complex>> table(d);
    for (std::size_t a = 0; a < d; ++a) {
        table[a].resize(n_box[a].size() * N);
        for (std::size_t j = 0; j < n_box[a].size(); ++j)
            for (std::size_t i = 0; i < N; ++i) {
                const double x = first_center[a] + static_cast<double>(i) * g.cell_width(a);
                table[a][j * N + i] = turn(-static_cast<double>(n_box[a].lo + static_cast<long>(j)) * x);
            }
    }
    for (std::size_t out = 0; out < count; ++out) {
        std::vector<std::size_t> j(d);
        std::size_t rest = out;
        for (std::size_t a = d; a-- > 0;) {
            j[a] = rest % n_box[a].size();
            rest /= n_box[a].size();
        }
        Complex s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            std::size_t r = i;
            Complex w = chirped[i];
            for (std::size_t a = d; a-- > 0;) {
                w *= table[a][j[a] * N + r % N];
                r /= N;
            }
            s += w;
        }
        slab.values[out] = vol * s;
    }
    return slab;
}

CoefficientSlab coefficient_slab(const GridFunction& g, long m, const std::vector<IndexRange>& n_box) {
    return coefficient_slab(g, BumpProfile::sharp(g.cube()), m, n_box);
}

double partition_bump(double u) {
    const double a = std::abs(u);
    if (a >= 1.0) return 0.0;
    auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double s = 1.0 - a;
    return f(s) / (f(s) + f(1.0 - s));
}

Complex eval_chirp_atom(const ChirpAtom& atom, double x) {
    if (!(atom.t > 0.0)) throw std::invalid_argument("chirp atom needs t > 0");
    // Extended precision keeps the phase accurate when t x^2 spans many turns.
    const long double u = std::sqrt(static_cast<long double>(atom.t)) * x;
    const long double nd = static_cast<long double>(atom.n);
    const double w = partition_bump(static_cast<double>(u - nd));
    if (w == 0.0) return 0.0;
    long double phase = 2.0L * nd * u + ((u - nd) * (u - nd) - nd * nd);
    phase -= std::floor(phase);
    return w * std::polar(1.0, kTwoPi * static_cast<double>(phase));
}

HeisenbergBox heisenberg_box(const ChirpAtom& atom) {
    if (!(atom.t > 0.0)) throw std::invalid_argument("chirp atom needs t > 0");
    const double st = std::sqrt(atom.t), nd = static_cast<double>(atom.n);
    return {nd / st, (nd + 1.0) / st, 2.0 * nd * st, (2.0 * nd + 1.0) * st};
}

std::vector<ChirpAtomValue> chirp_unit_decomposition(double t, double x, IndexRange n_range) {
    require_finite({t, x}, "chirp_unit_decomposition");
    if (!(t > 0.0)) throw std::invalid_argument("chirp_unit_decomposition: t must be positive");
    std::vector<ChirpAtomValue> out;
    for (long n = n_range.lo; n <= n_range.hi; ++n) out.push_back({n, eval_chirp_atom({n, t}, x)});
    return out;
}

Complex packet_overlap(const WavePacket& a, const WavePacket& b) {
    const std::size_t d = a.profile.dim();
    if (b.profile.dim() != d || a.n.size() != d || b.n.size() != d)
        throw std::invalid_argument("packet_overlap: packets have different dimensions");
    const double beta = static_cast<double>(a.m - b.m);
    Complex total = 1.0;
    for (std::size_t axis = 0; axis < d; ++axis) {
        auto [alo, ahi] = a.profile.support(axis);
        auto [blo, bhi] = b.profile.support(axis);
        const double lo = std::max(alo, blo), hi = std::min(ahi, bhi);
        if (lo >= hi) return 0.0;
        std::vector<double> cuts{lo, hi};
        for (const auto* p : {&a.profile, &b.profile})
            for (const auto& e : {p->cube.intervals[axis].lo, p->cube.intervals[axis].hi}) {
                const double v = to_double(e);
                if (v > lo && v < hi) cuts.push_back(v);
            }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        auto weight = [&](double x) { return a.profile.axis_value(axis, x) * b.profile.axis_value(axis, x); };
        const double alpha = static_cast<double>(a.n[axis] - b.n[axis]);
        Complex s = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
            const bool flat = a.profile.axis_value(axis, mid) == 1.0 && b.profile.axis_value(axis, mid) == 1.0;
            s += oscillatory_integral(weight, cuts[i], cuts[i + 1], alpha, beta, flat ? 1 : 32);
        }
        total *= s;
    }
    return total;
}

}  // namespace extlab

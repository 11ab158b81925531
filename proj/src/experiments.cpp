#include "extlab/experiments.hpp"

#include "extlab/wavepackets.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace extlab {

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Cube: return "cube";
        case FamilyKind::Slab: return "slab";
        case FamilyKind::Rhombus: return "rhombus";
    }
    return "unknown";
}

FamilyKind parse_family_kind(const std::string& text) {
    if (text == "cube") return FamilyKind::Cube;
    if (text == "slab") return FamilyKind::Slab;
    if (text == "rhombus") return FamilyKind::Rhombus;
    throw std::invalid_argument("unknown family kind '" + text + "' (expected cube, slab or rhombus)");
}

void validate_family(const ExampleFamily& f) {
    if (!(f.delta > 0.0 && f.delta <= 0.125)) throw std::invalid_argument("family: delta must lie in (0, 1/8]");
    if (f.d == 0) throw std::invalid_argument("family: d must be positive");
    switch (f.kind) {
        case FamilyKind::Cube:
            if (f.k != f.d + 1) throw std::invalid_argument("cube family requires k = d + 1");
            break;
        case FamilyKind::Slab:
            if (f.k < 2 || f.k > f.d) throw std::invalid_argument("slab family requires 2 <= k <= d");
            break;
        case FamilyKind::Rhombus:
            if (f.d != 2 || f.k != 3) throw std::invalid_argument("rhombus family requires d = 2 and k = 3");
            break;
    }
}

double RealBox::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

std::vector<double> rotate_quarter_turn(const std::vector<double>& y) {
    if (y.size() != 2) throw std::invalid_argument("rotate_quarter_turn: planar point required");
    const double c = std::sqrt(0.5);
    return {c * (y[0] - y[1]), c * (y[0] + y[1])};
}

std::vector<double> rotate_quarter_turn_inverse(const std::vector<double>& x) {
    if (x.size() != 2) throw std::invalid_argument("rotate_quarter_turn_inverse: planar point required");
    const double c = std::sqrt(0.5);
    return {c * (x[0] + x[1]), c * (x[1] - x[0])};
}

double FamilyInstance::input_norm_squared(std::size_t j) const { return supports.at(j).volume(); }

double FamilyInstance::input_value(std::size_t j, const std::vector<double>& x) const {
    const RealBox& b = supports.at(j);
    if (x.size() != b.dim()) throw std::invalid_argument("input_value: point dimension mismatch");
    const std::vector<double> y = rotated ? rotate_quarter_turn_inverse(x) : x;
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] < b.lo[i] || y[i] > b.hi[i]) return 0.0;
    return 1.0;
}

FamilyInstance build_family(const ExampleFamily& family) {
    validate_family(family);
    const std::size_t d = family.d, k = family.k;
    const double delta = family.delta;
    FamilyInstance out;
    out.family = family;
    std::vector<RationalCube> caps;

    auto unit_cap = [](long lo) { return Interval(ratio(lo, 1), ratio(lo + 1, 1)); };

    if (family.kind == FamilyKind::Rhombus) {
        out.rotated = true;
        const double r2 = std::sqrt(2.0);
        for (std::size_t j = 0; j < 3; ++j) {
            const double center = (4.0 * static_cast<double>(j) + 1.0) * r2 / 2.0;
            out.supports.push_back(RealBox{{center - delta * delta / 2.0, -delta / 2.0},
                                           {center + delta * delta / 2.0, delta / 2.0}});
            const long lo = 2 * static_cast<long>(j);
            caps.push_back(RationalCube({unit_cap(lo), unit_cap(lo)}));
        }
        out.dual_half_widths = {1.0 / (delta * delta), 1.0 / delta, 1.0 / (delta * delta)};
        out.caps = CubeCollection(2, caps);
        return out;
    }

    // Cube kind: every side delta. Slab kind: the first k-1 axes have side delta^2.
    const bool slab = family.kind == FamilyKind::Slab;
    const std::size_t thin = slab ? k - 1 : 0;
    auto side = [&](std::size_t axis) { return axis < thin ? delta * delta : delta; };
    for (std::size_t j = 0; j < k; ++j) {
        RealBox box;
        std::vector<Interval> cap;
        for (std::size_t axis = 0; axis < d; ++axis) {
            long start = 0;
            if (j >= 1 && axis + 2 <= j) start = 2;
            if (j >= 1 && axis + 1 == j) start = 4;
            box.lo.push_back(static_cast<double>(start));
            box.hi.push_back(static_cast<double>(start) + side(axis));
            cap.push_back(unit_cap(start));
        }
        out.supports.push_back(box);
        caps.push_back(RationalCube(cap));
    }
    for (std::size_t axis = 0; axis < d; ++axis) out.dual_half_widths.push_back(1.0 / side(axis));
    out.dual_half_widths.push_back(slab ? 1.0 / (delta * delta) : 1.0 / delta);
    out.caps = CubeCollection(d, caps);
    return out;
}

Rational predicted_exponent(FamilyKind kind, std::size_t d, std::size_t k, const Rational& p) {
    if (p <= 0) throw std::invalid_argument("predicted_exponent: p must be positive");
    const long dl = static_cast<long>(d), kl = static_cast<long>(k);
    switch (kind) {
        case FamilyKind::Cube: return ratio(dl * (dl + 1), 2) - Rational(dl + 1) / p;
        case FamilyKind::Slab: return ratio(kl * (dl + kl - 1), 2) - Rational(dl + kl + 1) / p;
        case FamilyKind::Rhombus: return ratio(9, 2) - Rational(5) / p;
    }
    return Rational(0);
}

double scaling_ratio(const FamilyInstance& inst, const Rational& p_rat, double shrink, std::size_t n,
                     std::size_t threads) {
    if (!(shrink > 0.0)) throw std::invalid_argument("scaling_ratio: shrink must be positive");
    if (n == 0) throw std::invalid_argument("scaling_ratio: empty quadrature grid");
    if (p_rat <= 0) throw std::invalid_argument("scaling_ratio: p must be positive");
    const double p = to_double(p_rat);
    const std::size_t d = inst.family.d;
    std::vector<double> half(d + 1);
    for (std::size_t i = 0; i <= d; ++i) half[i] = shrink * inst.dual_half_widths[i];
    auto node = [&](std::size_t axis, std::size_t i) {
        return -half[axis] + (static_cast<double>(i) + 0.5) * 2.0 * half[axis] / static_cast<double>(n);
    };

    // For fixed t, |prod_j E f_j|^p factors over the xi axes.
    std::vector<double> slice(n, 0.0);
    auto work = [&](std::size_t it) {
        const double t = node(d, it);
        double prod = 1.0;
        for (std::size_t axis = 0; axis < d; ++axis) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double xi = node(axis, i);
                double mag = 1.0;
                for (const auto& box : inst.supports)
                    mag *= std::abs(chirp_segment_integral(box.lo[axis], box.hi[axis], xi, t));
                s += std::pow(mag, p);
            }
            prod *= s;
        }
        slice[it] = prod;
    };
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t it = 0; it < n; ++it) work(it);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t it = w; it < n; it += threads) work(it);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }
    double cell = 1.0;
    for (std::size_t i = 0; i <= d; ++i) cell *= 2.0 * half[i] / static_cast<double>(n);
    double integral = 0.0;
    for (double v : slice) integral += v;
    integral *= cell;
    double norms = 1.0;
    for (std::size_t j = 0; j < inst.supports.size(); ++j) norms *= std::sqrt(inst.input_norm_squared(j));
    return std::pow(integral, 1.0 / p) / norms;
}

std::pair<double, double> fit_line_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line_slope: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_line_slope: x values are all equal");
    const double slope = sxy / sxx, icept = my - slope * mx;
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (icept + slope * x[i]);
        rss += r * r;
    }
    return {slope, std::sqrt(rss / n)};
}

ScalingReport run_scaling(FamilyKind kind, std::size_t d, std::size_t k, const Rational& p,
                          const std::vector<double>& deltas, const ScalingOptions& options) {
    if (deltas.size() < 2) throw std::invalid_argument("run_scaling: at least two deltas required");
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1])) throw std::invalid_argument("run_scaling: deltas must be strictly decreasing");
    if (p <= 0) throw std::invalid_argument("run_scaling: p must be positive");

    ScalingReport rep;
    rep.kind = kind;
    rep.d = d;
    rep.k = k;
    rep.p = p;
    rep.shrink = options.shrink;
    rep.deltas = deltas;
    rep.predicted_exponent = to_double(predicted_exponent(kind, d, k, p));

    std::vector<double> logd, logr, logr_half;
    for (double delta : deltas) {
        FamilyInstance inst = build_family(ExampleFamily{kind, d, k, delta});
        ScalingPoint pt;
        pt.delta = delta;
        pt.coarse_ratio = scaling_ratio(inst, p, options.shrink, options.points_per_axis, options.threads);
        pt.fine_ratio = scaling_ratio(inst, p, options.shrink, 2 * options.points_per_axis, options.threads);
        pt.ratio = pt.fine_ratio;
        pt.quadrature_discrepancy = std::abs(pt.fine_ratio - pt.coarse_ratio) / pt.fine_ratio;
        if (!(pt.ratio > 0.0) || !std::isfinite(pt.ratio))
            throw std::runtime_error("run_scaling: non-positive ratio at delta " + std::to_string(delta));
        if (pt.quadrature_discrepancy > options.richardson_tolerance) {
            std::ostringstream msg;
            msg << "run_scaling: quadrature discrepancy " << pt.quadrature_discrepancy << " at delta " << delta
                << " exceeds " << options.richardson_tolerance << "; the phase is under-resolved, increase points per axis";
            throw std::runtime_error(msg.str());
        }
        rep.points.push_back(pt);
        rep.ratios.push_back(pt.ratio);
        logd.push_back(std::log(delta));
        logr.push_back(std::log(pt.ratio));
        logr_half.push_back(
            std::log(scaling_ratio(inst, p, options.shrink / 2.0, options.points_per_axis, options.threads)));
    }
    std::tie(rep.fitted_slope, rep.residual) = fit_line_slope(logd, logr);
    rep.slope_at_half_shrink = fit_line_slope(logd, logr_half).first;
    for (std::size_t i = 1; i < deltas.size(); ++i) {
        const double a = rep.ratios[i - 1] / std::pow(deltas[i - 1], rep.predicted_exponent);
        const double b = rep.ratios[i] / std::pow(deltas[i], rep.predicted_exponent);
        rep.constant_spread = std::max(rep.constant_spread, std::max(a / b, b / a));
    }
    return rep;
}

ThresholdRow thresholds(std::size_t k, std::size_t d, std::size_t tau) {
    if (d == 0 || k < 1 || k > d + 1) throw std::invalid_argument("thresholds: need 1 <= k <= d + 1");
    if (tau > d) throw std::invalid_argument("thresholds: need 0 <= |tau| <= d");
    const long K = static_cast<long>(k), D = static_cast<long>(d), T = static_cast<long>(tau);
    ThresholdRow row;
    row.k = k;
    row.d = d;
    row.tau = tau;
    row.p_tau = ratio(2 * (D + T + 2), K * (D + T));
    row.k_linear = ratio(2 * (D + K + 1), K * (D + K - 1));
    row.strichartz = ratio(2 * (D + 2), D);
    row.restriction = ratio(2 * (D + 1), D);
    row.multilinear_output = ratio(2 * (D + 1), K * D);
    if (k >= 2 && k < d + 1) row.p_kd = 2 * K < D ? ratio(4 * (D + 1), D + K + 1) : ratio(4 * (D + 1), 2 * D - K + 1);
    if (k >= 2) row.product_input = Rational(4);
    return row;
}

}  // namespace extlab

#pragma once

#include "extlab/geometry.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace extlab {

using Complex = std::complex<double>;

struct BumpProfile {
    enum class Mode { Sharp, Smooth };

    Mode mode = Mode::Sharp;
    RationalCube cube;
    double margin = 0.1;

    BumpProfile() = default;
    /// Throws std::invalid_argument for an empty cube or a non-positive smooth margin.
    BumpProfile(Mode mode_, RationalCube cube_, double margin_ = 0.1);

    static BumpProfile sharp(const RationalCube& cube) { return BumpProfile(Mode::Sharp, cube); }
    static BumpProfile smooth(const RationalCube& cube, double margin = 0.1) {
        return BumpProfile(Mode::Smooth, cube, margin);
    }

    std::size_t dim() const { return cube.dim(); }
    double operator()(const std::vector<double>& x) const;
    /// Factor of the product profile along one axis.
    double axis_value(std::size_t axis, double x) const;
    /// Closed support along an axis (the cube, enlarged by the margin in smooth mode).
    std::pair<double, double> support(std::size_t axis) const;
};

/// 1 at s <= 0, 0 at s >= 1, C-infinity in between: the normalized integral of exp(-1/(1-u^2)).
double mollifier_transition(double s);

struct WavePacket {
    BumpProfile profile;
    std::vector<long> n;
    long m = 0;
};

/// Complex samples at the N^d cell centers of a cube, axis 0 varying slowest.
class GridFunction {
public:
    GridFunction() = default;
    /// Throws std::invalid_argument on size mismatch, N == 0, a degenerate cube, or non-finite samples.
    GridFunction(RationalCube cube, std::size_t n, std::vector<Complex> samples);
    static GridFunction sample(const RationalCube& cube, std::size_t n,
                               const std::function<Complex(const std::vector<double>&)>& f);

    const RationalCube& cube() const { return cube_; }
    std::size_t dim() const { return cube_.dim(); }
    std::size_t resolution() const { return n_; }
    const std::vector<Complex>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

    double cell_width(std::size_t axis) const;
    double cell_volume() const;
    std::vector<double> cell_center(std::size_t flat_index) const;
    /// Midpoint-rule squared L2 norm.
    double norm_squared() const;

private:
    RationalCube cube_;
    std::size_t n_ = 0;
    std::vector<Complex> samples_;
    std::vector<double> lo_, width_;
};

struct ChirpAtom {
    long n = 0;
    double t = 1.0;
};

struct HeisenbergBox {
    double x_lo, x_hi, freq_lo, freq_hi;
};

Complex eval_wavepacket(const WavePacket& wp, const std::vector<double>& x);

/// Integral over [a, b] of exp(-2 pi i (xi x + t x^2)).
Complex chirp_segment_integral(double a, double b, double xi, double t);

/// Integral over [a, b] of w(x) exp(2 pi i (alpha x + beta x^2)) by composite Gauss-Legendre,
/// at least min_panels panels and enough for about one turn of phase per panel.
Complex oscillatory_integral(const std::function<double(double)>& w, double a, double b, double alpha, double beta,
                             std::size_t min_panels = 1);

/// N < 8 (max|n_i| + |m| + 1).
bool resolution_inadequate(std::size_t n, const std::vector<long>& freq, long m);

struct InnerProduct {
    Complex value;
    bool resolution_warning = false;
};

/// Midpoint rule for the integral of g times conjugate(phi_{n,m}) over g's cube.
InnerProduct inner_product(const GridFunction& g, const WavePacket& wp);

struct IndexRange {
    long lo = 0, hi = 0;  // inclusive
    std::size_t size() const { return hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0; }
};

struct CoefficientSlab {
    long m = 0;
    std::vector<IndexRange> n_box;
    std::vector<Complex> values;  // axis 0 slowest
    bool resolution_warning = false;

    const Complex& at(const std::vector<long>& n) const;
};

/// All <g, phi_{n,m}> for n in the box, by one FFT when the cube sides are integers.
/// Throws std::invalid_argument("... increase resolution") if |n_i| * side_i exceeds N/2.
CoefficientSlab coefficient_slab(const GridFunction& g, const BumpProfile& profile, long m,
                                 const std::vector<IndexRange>& n_box);
/// Sharp profile on g's own cube.
CoefficientSlab coefficient_slab(const GridFunction& g, long m, const std::vector<IndexRange>& n_box);

/// psi(u) = S(1 - |u|) with S(s) = f(s) / (f(s) + f(1-s)), f(s) = exp(-1/s); sum_n psi(u - n) = 1.
double partition_bump(double u);

struct ChirpAtomValue {
    long n;
    Complex value;
};

Complex eval_chirp_atom(const ChirpAtom& atom, double x);
HeisenbergBox heisenberg_box(const ChirpAtom& atom);
/// Throws std::invalid_argument if t <= 0.
std::vector<ChirpAtomValue> chirp_unit_decomposition(double t, double x, IndexRange n_range);

/// <phi_{n,m}, phi_{k,m'}>, a product of one-dimensional oscillatory integrals.
Complex packet_overlap(const WavePacket& a, const WavePacket& b);

}  // namespace extlab

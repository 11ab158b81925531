#pragma once

#include "extlab/wavepackets.hpp"

#include <cstddef>
#include <limits>
#include <map>
#include <random>
#include <vector>

namespace extlab {

/// Coefficients c_{n,m} of the step function sum c_{n,m} chi_n (x) chi_m; m slowest, then n axis 0.
struct CoefficientField {
    std::vector<IndexRange> n_ranges;
    IndexRange m_range;
    std::vector<Complex> values;

    CoefficientField() = default;
    /// Zero field; throws std::invalid_argument on an empty range.
    CoefficientField(std::vector<IndexRange> n_ranges_, IndexRange m_range_);

    std::size_t dim() const { return n_ranges.size(); }
    std::size_t n_count() const;
    std::size_t index(const std::vector<long>& n, long m) const;
    Complex& at(const std::vector<long>& n, long m) { return values[index(n, m)]; }
    const Complex& at(const std::vector<long>& n, long m) const { return values[index(n, m)]; }
    /// Multi-index (n, m) of a flat position.
    std::pair<std::vector<long>, long> position(std::size_t flat) const;
};

struct MultilinearSpec {
    CubeCollection cubes;
    std::vector<GridFunction> inputs;
    std::vector<BumpProfile> profiles;

    MultilinearSpec() = default;
    /// Sharp profiles on each cube. Throws if counts differ or an input's cube is not inside its cube.
    MultilinearSpec(CubeCollection cubes_, std::vector<GridFunction> inputs_);
    MultilinearSpec(CubeCollection cubes_, std::vector<GridFunction> inputs_, std::vector<BumpProfile> profiles_);
};

/// E_d coefficients, one coefficient slab per m, spread over `threads` workers.
CoefficientField e_d_coefficients(const GridFunction& g, const BumpProfile& profile,
                                  const std::vector<IndexRange>& n_ranges, IndexRange m_range,
                                  std::size_t threads = 1);
/// Sharp profile on g's cube.
CoefficientField e_d_coefficients(const GridFunction& g, const std::vector<IndexRange>& n_ranges,
                                  IndexRange m_range, std::size_t threads = 1);

/// Entrywise product of the per-cube fields.
CoefficientField me_kd_coefficients(const MultilinearSpec& spec, const std::vector<IndexRange>& n_ranges,
                                    IndexRange m_range, std::size_t threads = 1);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (sum |c|^p)^(1/p), or max |c| for p = infinity. Throws if p < 1.
double lp_norm(const CoefficientField& field, double p);
/// Same power sum for any p > 0 (a quasi-norm below 1).
double lq_quasinorm(const CoefficientField& field, double q);
/// l^q over (n_i for i outside S, m) of the l^2 norm over (n_i for i in S).
double mixed_norm(const CoefficientField& field, const std::vector<std::size_t>& inner_axes, double q);
/// Mass (|c|^p) on the outermost m values over the total; 0 for an all-zero field.
double tail_fraction(const CoefficientField& field, double p);

struct NormReport {
    double p = 2.0;
    double value = 0.0;
    double tail_fraction = 0.0;
    bool quasi = false;
};

/// lp_norm or lq_quasinorm with the m-shell tail.
NormReport norm_report(const CoefficientField& field, double p);

/// Midpoint-rule L^p norm of the samples.
double grid_lp_norm(const GridFunction& g, double p);

struct WeightedBox {
    RationalCube box;
    Complex weight = 1.0;
};

struct ExtensionPoint {
    std::vector<double> xi;
    double t = 0.0;
};

/// Integral of g(x) exp(-2 pi i (x.xi + t|x|^2)) for g a weighted sum of box indicators.
std::vector<Complex> continuous_extension(const std::vector<WeightedBox>& g, const std::vector<ExtensionPoint>& points);
Complex continuous_extension(const std::vector<WeightedBox>& g, const ExtensionPoint& point);

struct NormRatio {
    double ratio = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
    double tail_fraction = 0.0;
    bool tail_exceeded = false;  // tail_fraction > 1e-3
};

/// ||E_d g||_q / ||g||_p. Throws std::invalid_argument when ||g||_p is zero.
NormRatio norm_ratio(const GridFunction& g, double p_in, double q_out, const std::vector<IndexRange>& n_ranges,
                     IndexRange m_range, std::size_t threads = 1);
/// ||ME_{k,d}(g_1..g_k)||_q / prod ||g_j||_p.
NormRatio norm_ratio(const MultilinearSpec& spec, double p_in, double q_out, const std::vector<IndexRange>& n_ranges,
                     IndexRange m_range, std::size_t threads = 1);

constexpr double kTailLimit = 1e-3;

struct LevelSetHistogram {
    double floor = 0.0;
    std::map<int, std::size_t> counts;  // l -> #{|c| in [2^-l, 2^-l+1)}
    std::size_t below_floor = 0;

    std::size_t total() const;
};

/// Throws std::invalid_argument unless floor > 0.
LevelSetHistogram level_set_histogram(const CoefficientField& field, double floor);

/// Complex Gaussian values on cells^d coarse cells, smoothed by a 3-tap moving average along every axis,
/// held constant on an n^d grid. Throws unless cells divides n.
GridFunction random_corpus_sample(std::mt19937_64& rng, const RationalCube& cube, std::size_t cells, std::size_t n);

/// Largest n box [-h, h - 1] with h * side <= N/2 on every axis.
std::vector<IndexRange> full_n_box(const GridFunction& g);

}  // namespace extlab

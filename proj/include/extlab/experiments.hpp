#pragma once

#include "extlab/geometry.hpp"
#include "extlab/rational.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace extlab {

enum class FamilyKind { Cube, Slab, Rhombus };

std::string to_string(FamilyKind kind);
/// "cube", "slab" or "rhombus"; throws std::invalid_argument otherwise.
FamilyKind parse_family_kind(const std::string& text);

struct ExampleFamily {
    FamilyKind kind = FamilyKind::Cube;
    std::size_t d = 1, k = 2;
    double delta = 0.125;
};

/// Throws std::invalid_argument unless: cube has k = d+1, slab has 2 <= k <= d, rhombus has d = 2 and k = 3,
/// and delta lies in (0, 1/8].
void validate_family(const ExampleFamily& family);

/// Axis-aligned box with real endpoints.
struct RealBox {
    std::vector<double> lo, hi;

    std::size_t dim() const { return lo.size(); }
    double volume() const;
};

struct FamilyInstance {
    ExampleFamily family;
    /// Caps U_j the inputs live on.
    CubeCollection caps;
    /// Indicator supports. For the rhombus kind these are in rotated coordinates y, with x = T y.
    std::vector<RealBox> supports;
    bool rotated = false;
    /// Half-widths of the dual box in (xi_1, ..., xi_d, t) before the shrink factor, in the support coordinates.
    std::vector<double> dual_half_widths;

    /// Squared L2 norm of input j (the support volume; rotation preserves it).
    double input_norm_squared(std::size_t j) const;
    /// Value of input j at a physical point x.
    double input_value(std::size_t j, const std::vector<double>& x) const;
};

FamilyInstance build_family(const ExampleFamily& family);

/// cube: d(d+1)/2 - (d+1)/p; slab: k(d+k-1)/2 - (d+k+1)/p; rhombus: 9/2 - 5/p.
Rational predicted_exponent(FamilyKind kind, std::size_t d, std::size_t k, const Rational& p);

/// T: counterclockwise quarter-turn by pi/4 in the plane.
std::vector<double> rotate_quarter_turn(const std::vector<double>& y);
std::vector<double> rotate_quarter_turn_inverse(const std::vector<double>& x);

struct ScalingOptions {
    double shrink = 0.25;
    std::size_t points_per_axis = 32;  // midpoint grid, checked against twice as many
    double richardson_tolerance = 0.02;
    std::size_t threads = 1;
};

struct ScalingPoint {
    double delta = 0.0;
    double ratio = 0.0;
    double coarse_ratio = 0.0;          // points_per_axis grid
    double fine_ratio = 0.0;            // 2 * points_per_axis grid
    double quadrature_discrepancy = 0.0;  // |fine - coarse| / fine
};

struct ScalingReport {
    FamilyKind kind = FamilyKind::Cube;
    std::size_t d = 1, k = 2;
    Rational p;
    std::vector<double> deltas, ratios;
    std::vector<ScalingPoint> points;
    double fitted_slope = 0.0;
    double predicted_exponent = 0.0;
    double residual = 0.0;              // RMS of the least-squares fit
    double shrink = 0.25;
    double slope_at_half_shrink = 0.0;  // sensitivity to the dual-box shrink factor
    /// max over consecutive deltas of the ratio of R(delta) / delta^predicted (larger over smaller).
    double constant_spread = 1.0;
};

/// ||prod_j E_{U_j} f_j||_{L^p(dual box)} / prod ||f_j||_2 for one delta, on an n-point-per-axis midpoint grid.
double scaling_ratio(const FamilyInstance& instance, const Rational& p, double shrink, std::size_t points_per_axis,
                     std::size_t threads = 1);

/// Throws std::invalid_argument for bad parameters, deltas not strictly decreasing,
/// or std::runtime_error when a quadrature discrepancy exceeds the tolerance.
ScalingReport run_scaling(FamilyKind kind, std::size_t d, std::size_t k, const Rational& p,
                          const std::vector<double>& deltas, const ScalingOptions& options = {});

/// Least-squares slope and RMS residual of y against x.
std::pair<double, double> fit_line_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ThresholdRow {
    std::size_t k = 1, d = 1, tau = 0;
    Rational p_tau;             // 2(d+|tau|+2) / (k(d+|tau|))
    Rational k_linear;          // 2(d+k+1) / (k(d+k-1))
    Rational strichartz;        // 2(d+2) / d
    Rational restriction;       // 2(d+1) / d
    Rational multilinear_output;  // 2(d+1) / (kd)
    std::optional<Rational> p_kd;  // 4(d+1)/(d+k+1) if 2 <= k < d/2, 4(d+1)/(2d-k+1) if d/2 <= k < d+1
    std::optional<Rational> product_input;  // 4, for 2 <= k <= d+1
};

/// Throws std::invalid_argument unless 1 <= k <= d+1 and tau <= d.
ThresholdRow thresholds(std::size_t k, std::size_t d, std::size_t tau);

}  // namespace extlab

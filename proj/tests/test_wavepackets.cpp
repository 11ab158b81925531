#include "extlab/wavepackets.hpp"
#include "test_util.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace extlab;
using testutil::box;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent oracle: adaptive Gauss-Kronrod over pieces
// carrying at most a quarter turn of phase each (boost's tolerance is relative to the estimate).
Complex oracle_chirp(double a, double b, double xi, double t) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto angle = [&](double x) {
        long double turns = -(static_cast<long double>(xi) * x + static_cast<long double>(t) * x * x);
        return 2 * kPi * static_cast<double>(turns - std::floor(turns));
    };
    auto f = [&](double x) { return Complex(std::cos(angle(x)), std::sin(angle(x))); };
    const double turns = (std::abs(xi) + 2 * std::abs(t) * std::max(std::abs(a), std::abs(b))) * (b - a);
    const int pieces = 4 * static_cast<int>(std::ceil(turns)) + 1;
    Complex total = 0.0;
    for (int k = 0; k < pieces; ++k) {
        double lo = a + (b - a) * k / pieces, hi = a + (b - a) * (k + 1) / pieces;
        total += GK::integrate(f, lo, hi, 10, 1e-12);
    }
    return total;
}

RationalCube unit(std::size_t d) {
    return uniform_cube(d, 0, 1);
}

GridFunction random_grid(std::mt19937_64& rng, const RationalCube& cube, std::size_t n, bool real) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::size_t total = 1;
    for (std::size_t a = 0; a < cube.dim(); ++a) total *= n;
    std::vector<Complex> v(total);
    for (auto& z : v) z = Complex(g(rng), real ? 0.0 : g(rng));
    return GridFunction(cube, n, std::move(v));
}

WavePacket packet(const BumpProfile& p, std::vector<long> n, long m) {
    return WavePacket{p, std::move(n), m};
}

}  // namespace

TEST(Profile, SharpAndSmooth) {
    auto sharp = BumpProfile::sharp(unit(2));
    EXPECT_EQ(sharp({0.5, 0.5}), 1.0);
    EXPECT_EQ(sharp({1.0, 0.0}), 1.0);
    EXPECT_EQ(sharp({1.01, 0.5}), 0.0);
    auto smooth = BumpProfile::smooth(unit(1));
    EXPECT_EQ(smooth({0.3}), 1.0);
    EXPECT_EQ(smooth({1.1}), 0.0);
    EXPECT_EQ(smooth({-0.2}), 0.0);
    double prev = 1.0;
    for (int i = 1; i < 20; ++i) {
        double v = smooth({1.0 + 0.005 * i});
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
        EXPECT_LE(v, prev);
        prev = v;
    }
    EXPECT_THROW(BumpProfile::smooth(unit(1), 0.0), std::invalid_argument);
}

TEST(Profile, TransitionIsSymmetric) {
    EXPECT_NEAR(mollifier_transition(0.5), 0.5, 1e-14);
    for (double s : {0.01, 0.1, 0.3, 0.45})
        EXPECT_NEAR(mollifier_transition(s) + mollifier_transition(1 - s), 1.0, 1e-13) << s;
    // Oracle: tanh-sinh integral of the mollifier, normalized.
    boost::math::quadrature::tanh_sinh<double> ts;
    auto rho = [](double u) { return std::abs(u) >= 1 ? 0.0 : std::exp(-1 / (1 - u * u)); };
    const double total = ts.integrate(rho, -1.0, 1.0);
    for (double s : {0.001, 0.02, 0.137, 0.5, 0.77, 0.999}) {
        double tail = ts.integrate(rho, 2 * s - 1, 1.0) / total;
        EXPECT_NEAR(mollifier_transition(s), tail, 1e-13) << s;
    }
    EXPECT_LT(mollifier_transition(0.02), 1.0);
}

TEST(WavePacketEval, Examples) {
    auto p = BumpProfile::sharp(unit(1));
    EXPECT_NEAR(std::abs(eval_wavepacket(packet(p, {0}, 0), {0.4}) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(eval_wavepacket(packet(p, {2}, 3), {1.5}), Complex(0.0));
    Complex v = eval_wavepacket(packet(p, {1}, 1), {0.5});
    EXPECT_NEAR(v.real(), 0.0, 1e-14);
    EXPECT_NEAR(v.imag(), -1.0, 1e-14);
}

TEST(ChirpSegment, Examples) {
    EXPECT_NEAR(std::abs(chirp_segment_integral(0, 1, 0, 0) - 1.0), 0.0, 1e-14);
    for (double n : {1.0, -3.0, 17.0}) EXPECT_LT(std::abs(chirp_segment_integral(0, 1, n, 0)), 1e-13);
    // Half of the Fresnel values C(2) + i S(2).
    Complex fresnel = chirp_segment_integral(0, 1, 0, -1);
    EXPECT_NEAR(fresnel.real(), 0.2441267030376700, 1e-12);
    EXPECT_NEAR(fresnel.imag(), 0.1717078391818450, 1e-12);
    EXPECT_LT(std::abs(fresnel - oracle_chirp(0, 1, 0, -1)), 1e-12);
    EXPECT_THROW(chirp_segment_integral(1, 0, 0, 0), std::invalid_argument);
    EXPECT_THROW(chirp_segment_integral(0, NAN, 0, 0), std::invalid_argument);
}

TEST(ChirpSegment, AgreesWithAdaptiveOracle) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2, 2), s(-40, 40);
    for (int i = 0; i < 25; ++i) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        double xi = s(rng), t = s(rng);
        EXPECT_LT(std::abs(chirp_segment_integral(a, b, xi, t) - oracle_chirp(a, b, xi, t)), 1e-10)
            << a << " " << b << " " << xi << " " << t;
    }
}

TEST(ChirpSegment, ConjugationSymmetry) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5, 5), s(-200, 200);
    for (int i = 0; i < 100; ++i) {
        double a = u(rng), b = a + std::abs(u(rng)), xi = s(rng), t = s(rng);
        EXPECT_LT(std::abs(chirp_segment_integral(a, b, xi, t) - std::conj(chirp_segment_integral(a, b, -xi, -t))),
                  1e-12);
    }
}

TEST(InnerProduct, Examples) {
    auto cube = unit(1);
    auto p = BumpProfile::sharp(cube);
    auto g = GridFunction::sample(cube, 16384, [](const std::vector<double>& x) {
        return std::polar(1.0, 2 * kPi * (3 * x[0] + 2 * x[0] * x[0]));
    });
    EXPECT_LT(std::abs(inner_product(g, packet(p, {3}, 2)).value - 1.0), 1e-9);
    EXPECT_LT(std::abs(inner_product(g, packet(p, {0}, 2)).value), 1e-9);
    EXPECT_LT(std::abs(inner_product(g, packet(p, {3}, 1)).value - chirp_segment_integral(0, 1, 0, -1)), 1e-8);
}

TEST(InnerProduct, ResolutionWarningAndPrecondition) {
    auto cube = unit(1);
    auto g = GridFunction::sample(cube, 32, [](const std::vector<double>&) { return Complex(1.0); });
    auto p = BumpProfile::sharp(cube);
    EXPECT_FALSE(inner_product(g, packet(p, {2}, 1)).resolution_warning);
    EXPECT_TRUE(inner_product(g, packet(p, {3}, 1)).resolution_warning);
    auto small = BumpProfile::sharp(box({{0, ratio(1, 2)}}));
    EXPECT_THROW(inner_product(g, packet(small, {0}, 0)), std::invalid_argument);
    EXPECT_NO_THROW(inner_product(g, packet(BumpProfile::smooth(box({{ratio(-1, 20), 1}})), {0}, 0)));
}

TEST(GridFunctionType, Validation) {
    auto cube = unit(2);
    EXPECT_THROW(GridFunction(cube, 4, std::vector<Complex>(15)), std::invalid_argument);
    EXPECT_THROW(GridFunction(cube, 0, {}), std::invalid_argument);
    EXPECT_THROW(GridFunction(box({{0, 0}}), 2, std::vector<Complex>(2)), std::invalid_argument);
    std::vector<Complex> bad(16, 1.0);
    bad[3] = Complex(INFINITY, 0);
    EXPECT_THROW(GridFunction(cube, 4, bad), std::invalid_argument);
    GridFunction g(cube, 4, std::vector<Complex>(16, 2.0));
    EXPECT_DOUBLE_EQ(g.norm_squared(), 4.0);
    auto x = g.cell_center(1);
    EXPECT_DOUBLE_EQ(x[0], 0.125);
    EXPECT_DOUBLE_EQ(x[1], 0.375);
}

TEST(CoefficientSlab, ConstantFunction) {
    auto cube = unit(1);
    auto g = GridFunction::sample(cube, 64, [](const std::vector<double>&) { return Complex(1.0); });
    auto slab = coefficient_slab(g, 0, {{-32, 31}});
    for (long n = -32; n <= 31; ++n) EXPECT_LT(std::abs(slab.at({n}) - (n == 0 ? 1.0 : 0.0)), 1e-12) << n;
}

TEST(CoefficientSlab, Parseval) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t d = 1 + trial % 2, N = d == 1 ? 128 : 32;
        auto g = random_grid(rng, unit(d), N, false);
        const long half = static_cast<long>(N / 2);
        for (long m : {-3L, 0L, 5L}) {
            auto slab = coefficient_slab(g, m, std::vector<IndexRange>(d, {-half, half - 1}));
            double mass = 0;
            for (const auto& c : slab.values) mass += std::norm(c);
            EXPECT_NEAR(mass / g.norm_squared(), 1.0, 1e-10);
        }
    }
}

TEST(CoefficientSlab, MatchesInnerProduct) {
    std::mt19937_64 rng(9);
    for (std::size_t d : {1u, 2u}) {
        const std::size_t N = d == 1 ? 64 : 16;
        auto g = random_grid(rng, unit(d), N, false);
        auto p = BumpProfile::sharp(unit(d));
        const long half = static_cast<long>(N / 2);
        for (int i = 0; i < 50; ++i) {
            long m = static_cast<long>(rng() % 11) - 5;
            std::vector<long> n(d);
            for (auto& x : n) x = static_cast<long>(rng() % N) - half;
            auto slab = coefficient_slab(g, m, std::vector<IndexRange>(d, {-half, half}));
            EXPECT_LT(std::abs(slab.at(n) - inner_product(g, packet(p, n, m)).value), 1e-9);
        }
    }
}

TEST(CoefficientSlab, NonUnitCubes) {
    std::mt19937_64 rng(10);
    // Integer side length 2 uses the FFT; side 3/2 uses direct summation.
    for (auto cube : {box({{-1, 1}}), box({{ratio(1, 4), ratio(7, 4)}}), box({{-1, 1}, {0, ratio(3, 2)}})}) {
        auto g = random_grid(rng, cube, 32, false);
        auto p = BumpProfile::sharp(cube);
        std::vector<IndexRange> range(cube.dim(), {-5, 5});
        for (long m : {0L, 2L}) {
            auto slab = coefficient_slab(g, m, range);
            for (long n0 = -5; n0 <= 5; ++n0) {
                std::vector<long> n(cube.dim(), n0);
                if (cube.dim() == 2) n[1] = -n0 / 2;
                EXPECT_LT(std::abs(slab.at(n) - inner_product(g, packet(p, n, m)).value), 1e-9);
            }
        }
    }
}

TEST(CoefficientSlab, IncreaseResolutionError) {
    auto g = GridFunction::sample(unit(1), 16, [](const std::vector<double>&) { return Complex(1.0); });
    EXPECT_NO_THROW(coefficient_slab(g, 0, {{-8, 8}}));
    try {
        coefficient_slab(g, 0, {{-9, 0}});
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("increase resolution"), std::string::npos);
    }
    auto wide = GridFunction::sample(box({{0, 2}}), 16, [](const std::vector<double>&) { return Complex(1.0); });
    EXPECT_THROW(coefficient_slab(wide, 0, {{-5, 5}}), std::invalid_argument);
}

TEST(CoefficientSlab, ModulationCovariance) {
    std::mt19937_64 rng(12);
    auto g = random_grid(rng, unit(2), 32, false);
    const std::vector<long> k{3, -2};
    std::vector<Complex> shifted(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto x = g.cell_center(i);
        shifted[i] = g.samples()[i] * std::polar(1.0, 2 * kPi * (k[0] * x[0] + k[1] * x[1]));
    }
    GridFunction gk(g.cube(), 32, shifted);
    auto a = coefficient_slab(gk, 4, {{-10, 10}, {-10, 10}});
    auto b = coefficient_slab(g, 4, {{-13, 7}, {-8, 12}});
    for (long n0 = -10; n0 <= 10; ++n0)
        for (long n1 = -10; n1 <= 10; ++n1)
            EXPECT_LT(std::abs(a.at({n0, n1}) - b.at({n0 - k[0], n1 - k[1]})), 1e-12);
}

TEST(CoefficientSlab, ConjugationSymmetryForRealInput) {
    std::mt19937_64 rng(14);
    auto g = random_grid(rng, unit(1), 64, true);
    auto plus = coefficient_slab(g, 3, {{-20, 20}});
    auto minus = coefficient_slab(g, -3, {{-20, 20}});
    for (long n = -20; n <= 20; ++n) EXPECT_LT(std::abs(minus.at({-n}) - std::conj(plus.at({n}))), 1e-12);
}

TEST(CoefficientSlab, ResolutionConvergence) {
    auto f = [](const std::vector<double>& x) { return Complex(std::exp(-x[0]), std::sin(3 * x[0])); };
    auto p = BumpProfile::sharp(unit(1));
    double prev_change = INFINITY;
    Complex prev = 0.0;
    for (std::size_t N : {64u, 128u, 256u, 512u}) {
        auto g = GridFunction::sample(unit(1), N, f);
        auto slab = coefficient_slab(g, 2, {{-3, 3}});
        EXPECT_FALSE(slab.resolution_warning);
        if (N > 64) {
            double change = std::abs(slab.at({1}) - prev);
            EXPECT_LT(change, 1e-3);
            EXPECT_LT(change, prev_change);
            prev_change = change;
        }
        prev = slab.at({1});
    }
    auto fine = GridFunction::sample(unit(1), 8192, f);
    EXPECT_LT(std::abs(inner_product(fine, packet(p, {1}, 2)).value - prev), 1e-4);
}

TEST(ChirpDecomposition, ReconstructsChirp) {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> tt(0.1, 500), xx(-3, 3);
    for (int i = 0; i < 500; ++i) {
        double t = tt(rng), x = xx(rng);
        long c = static_cast<long>(std::floor(std::sqrt(t) * x));
        Complex sum = 0.0;
        for (const auto& a : chirp_unit_decomposition(t, x, {c - 1, c + 2})) sum += a.value;
        long double turns = static_cast<long double>(t) * x * x;
        Complex exact = std::polar(1.0, 2 * kPi * static_cast<double>(turns - std::floor(turns)));
        EXPECT_LT(std::abs(sum - exact), 1e-12) << t << " " << x;
    }
}

TEST(ChirpDecomposition, PartitionAndSupport) {
    for (double u : {-2.0, -0.5, 0.0, 0.25, 0.999, 3.7})
        EXPECT_NEAR(partition_bump(u - std::floor(u)) + partition_bump(u - std::floor(u) - 1), 1.0, 1e-15);
    EXPECT_EQ(partition_bump(0.0), 1.0);
    double t = 4.0, x = 1.5;  // sqrt(t) x = 3
    auto atoms = chirp_unit_decomposition(t, x, {0, 6});
    for (const auto& a : atoms) {
        if (a.n == 3) EXPECT_NEAR(std::abs(a.value), 1.0, 1e-15);
        else EXPECT_EQ(a.value, Complex(0.0));
    }
    EXPECT_THROW(chirp_unit_decomposition(0.0, 1.0, {0, 1}), std::invalid_argument);
    auto hb = heisenberg_box({2, 9.0});
    EXPECT_DOUBLE_EQ(hb.x_lo, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(hb.x_hi, 1.0);
    EXPECT_DOUBLE_EQ(hb.freq_lo, 12.0);
    EXPECT_DOUBLE_EQ(hb.freq_hi, 15.0);
}

TEST(PacketOverlap, Examples) {
    auto p = BumpProfile::sharp(unit(2));
    EXPECT_LT(std::abs(packet_overlap(packet(p, {1, -2}, 3), packet(p, {1, -2}, 3)) - 1.0), 1e-13);
    EXPECT_LT(std::abs(packet_overlap(packet(p, {1, -2}, 3), packet(p, {4, -2}, 3))), 1e-9);
    EXPECT_LT(std::abs(packet_overlap(packet(p, {0, 0}, 1), packet(p, {0, 5}, 1))), 1e-9);
    auto q = BumpProfile::sharp(unit(1));
    EXPECT_LT(std::abs(packet_overlap(packet(q, {0}, 0), packet(q, {0}, 1)) - chirp_segment_integral(0, 1, 0, 1)),
              1e-13);
}

namespace {

double decay_slope(double margin, const std::vector<long>& ms) {
    auto p = BumpProfile::smooth(unit(1), margin);
    std::vector<double> lx, ly;
    for (long m : ms) {
        lx.push_back(std::log(static_cast<double>(m)));
        ly.push_back(std::log(std::abs(packet_overlap(packet(p, {0}, 0), packet(p, {0}, m)))));
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / lx.size();
        my += ly[i] / ly.size();
    }
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

std::vector<long> doublings(long from, long to) {
    std::vector<long> out;
    for (long m = from; m <= to; m *= 2) out.push_back(m);
    return out;
}

}  // namespace

TEST(PacketOverlap, StationaryPhaseDecayAsymptotic) {
    EXPECT_NEAR(decay_slope(0.1, doublings(1024, 16384)), -0.5, 0.02);
}

TEST(PacketOverlap, StationaryPhaseDecayWideMargin) {
    EXPECT_NEAR(decay_slope(0.5, doublings(4, 256)), -0.5, 0.1);
}

TEST(PacketOverlap, DefaultMarginIsPreAsymptoticForSmallM) {
    // The stationary point sits on the edge of the flat part; until 1/sqrt(m) is well below
    // the margin only part of the left half of the Gaussian lies inside the support.
    double slope = decay_slope(0.1, doublings(4, 256));
    EXPECT_GT(slope, -0.42);
    EXPECT_LT(slope, -0.3);
}

#include "extlab/brascamp_lieb.hpp"
#include "extlab/experiments.hpp"
#include "extlab/geometry.hpp"
#include "extlab/operators.hpp"
#include "extlab/wavepackets.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

using namespace extlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int precision = 4) {
    std::ostringstream os;
    os << std::setprecision(precision) << x;
    return os.str();
}

RationalCube box(std::initializer_list<std::pair<long, long>> sides) {
    std::vector<Interval> iv;
    for (const auto& [lo, hi] : sides) iv.emplace_back(Rational(lo), Rational(hi));
    return RationalCube(std::move(iv));
}

// 1

Outcome geometry_examples() {
    std::ostringstream detail;
    bool ok = true;
    double slowest = 0.0;

    auto t0 = Clock::now();
    CubeCollection diagonal(2, {box({{0, 1}, {0, 1}}), box({{2, 3}, {2, 3}}), box({{4, 5}, {4, 5}})});
    bool wt1 = is_weakly_transversal(diagonal);
    double wedge = min_wedge_grid_estimate(diagonal, 8);
    bool heuristic1 = wedge > 0.05;
    slowest = std::max(slowest, seconds_since(t0));
    ok = ok && wt1 && !heuristic1;
    detail << "diagonal WT=" << wt1 << " min_wedge=" << fmt(wedge) << "; ";

    t0 = Clock::now();
    CubeCollection staircase(2, {box({{0, 1}, {0, 1}}), box({{4, 5}, {0, 1}}), box({{2, 3}, {2, 3}})});
    bool wt2 = is_weakly_transversal(staircase);
    slowest = std::max(slowest, seconds_since(t0));
    ok = ok && wt2;
    detail << "staircase WT=" << wt2 << "; ";

    t0 = Clock::now();
    CubeCollection remark(2, {box({{1, 4}, {2, 3}}), box({{0, 2}, {0, 1}}), box({{3, 5}, {0, 1}})});
    bool pivot1 = weakly_transversal_with_pivot(remark, 0).has_value();
    auto dec = decompose_weakly_transversal(remark);
    slowest = std::max(slowest, seconds_since(t0));
    ok = ok && !pivot1 && dec.all_weakly_transversal;
    detail << "remark WT(pivot Q1)=" << pivot1 << " selections=" << dec.selection_count
           << " all_pass=" << dec.all_weakly_transversal << "; slowest " << fmt(slowest, 3) << " s";
    ok = ok && slowest < 1.0;
    return {ok, detail.str()};
}

// 2

bool lemma_oracle(const RationalMatrix& m, std::size_t column) {
    const std::size_t k = m.cols(), d = m.rows() - 1;
    std::vector<std::size_t> others;
    for (std::size_t c = 0; c < k; ++c)
        if (c != column) others.push_back(c);
    std::vector<std::size_t> rows(d);
    std::iota(rows.begin(), rows.end(), 0);
    do {
        bool fits = true;
        for (std::size_t l = 0; l < others.size() && fits; ++l) fits = m(rows[l], column) != m(rows[l], others[l]);
        if (fits) return true;
    } while (std::next_permutation(rows.begin(), rows.end()));
    return false;
}

Outcome matrix_lemma_fuzz() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(20240501);
    std::uniform_int_distribution<int> entry(-5, 5);
    std::size_t cases = 0, checks = 0, failures = 0;
    while (cases < 1000) {
        std::size_t k = 1 + rng() % 5;
        std::size_t d = std::max<std::size_t>(1, k - 1 + rng() % 3);
        RationalMatrix m(d + 1, k);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < k; ++c) m(r, c) = entry(rng);
        for (std::size_t c = 0; c < k; ++c) m(d, c) = 1;
        if (rank(m) != k) continue;
        ++cases;
        for (std::size_t col = 0; col < k; ++col) {
            ++checks;
            bool good = lemma_oracle(m, col);
            try {
                auto res = matrix_lemma_rows(m, col);
                std::vector<bool> row_used(d, false), col_used(k, false);
                good = good && res.rows.size() == k - 1 && res.paired_columns.size() == k - 1;
                for (std::size_t l = 0; good && l < res.rows.size(); ++l) {
                    auto r = res.rows[l], c = res.paired_columns[l];
                    good = r < d && c < k && c != col && !row_used[r] && !col_used[c] && m(r, col) != m(r, c);
                    if (good) row_used[r] = col_used[c] = true;
                }
            } catch (const std::exception&) {
                good = false;
            }
            if (!good) ++failures;
        }
    }
    double secs = seconds_since(t0);
    return {failures == 0 && secs < 10.0, std::to_string(cases) + " matrices, " + std::to_string(checks) +
                                              " column checks, " + std::to_string(failures) + " failures, " +
                                              fmt(secs, 3) + " s"};
}

// 3

// Overlapping cubes on a span-4 grid (mostly infinite), or unit cubes on a span-8 grid (mostly finite).
RationalCube fuzz_cube(std::mt19937_64& rng, std::size_t d, bool spread) {
    std::uniform_int_distribution<int> pick(0, 4), corner(0, 7);
    std::vector<Interval> iv;
    for (std::size_t i = 0; i < d; ++i) {
        if (spread) {
            int a = corner(rng);
            iv.emplace_back(Rational(a), Rational(a + 1));
            continue;
        }
        int a = pick(rng), b = pick(rng);
        if (a > b) std::swap(a, b);
        if (a == b) (b < 4 ? ++b : --a);
        iv.emplace_back(Rational(a), Rational(b));
    }
    return RationalCube(std::move(iv));
}

RationalVector point_in(std::mt19937_64& rng, const RationalCube& cube) {
    std::uniform_int_distribution<long> u(0, 16);
    RationalVector x;
    for (const auto& iv : cube.intervals) x.push_back(iv.lo + iv.length() * ratio(u(rng), 16));
    return x;
}

Outcome theorem_cross_validation() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(77);
    std::size_t finite_by_d[4] = {0, 0, 0, 0};
    std::size_t finite = 0, infinite = 0, contradictions = 0, bad_witness = 0, samples = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
        std::vector<RationalCube> cubes;
        bool spread = (trial / 3) % 2 == 1;
        for (std::size_t j = 0; j <= d; ++j) cubes.push_back(fuzz_cube(rng, d, spread));
        CubeCollection coll(d, cubes);
        auto verdict = cap_finiteness_via_geometry(coll);
        if (verdict.kind == CapVerdict::Kind::FiniteForAllPoints) {
            ++finite;
            ++finite_by_d[d];
            for (int s = 0; s < 100; ++s) {
                std::vector<RationalVector> pts;
                for (const auto& c : cubes) pts.push_back(point_in(rng, c));
                auto datum = bl_datum_from_caps(CapPointSet(d, pts));
                ++samples;
                auto check = check_finiteness(datum, candidate_subspaces(datum).subspaces);
                if (check.kind == FinitenessVerdict::Kind::Infinite) ++contradictions;
            }
            continue;
        }
        ++infinite;
        if (!verdict.witness) {
            ++bad_witness;
            continue;
        }
        const auto& w = *verdict.witness;
        bool ok = w.points.points.size() == d + 1;
        for (std::size_t j = 0; ok && j <= d; ++j) ok = cubes[j].contains(w.points.points[j]);
        if (ok) {
            auto datum = bl_datum_from_caps(w.points);
            Rational rhs = 0;
            for (std::size_t j = 0; j < datum.maps.size(); ++j)
                rhs += datum.exponents[j] * static_cast<long>(image_dim(datum.maps[j], w.v));
            auto n = static_cast<long>(w.subset.members.size());
            auto dl = static_cast<long>(d);
            Rational predicted = ratio((n - 1) * dl - 1, dl);
            ok = Rational(static_cast<long>(w.v.dim())) > rhs && rhs == predicted && w.check.rhs == rhs &&
                 !dimension_condition_on(datum, w.v).holds;
        }
        if (!ok) ++bad_witness;
    }
    double secs = seconds_since(t0);
    std::ostringstream detail;
    detail << finite << " finite (d=1,2,3: " << finite_by_d[1] << "/" << finite_by_d[2] << "/" << finite_by_d[3] << "; " << samples << " point samples, " << contradictions << " contradictions), "
           << infinite << " infinite (" << bad_witness << " unverified witnesses), " << fmt(secs, 3) << " s";
    return {contradictions == 0 && bad_witness == 0 && secs < 60.0, detail.str()};
}

// 4

Outcome parseval() {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss;
    const std::size_t n = 256;
    const IndexRange m_range{-8, 8};
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t d = 1 + static_cast<std::size_t>(trial % 2);
        auto cube = uniform_cube(d, Rational(0), Rational(1));
        std::size_t total = d == 1 ? n : n * n;
        std::vector<Complex> samples(total);
        for (auto& z : samples) z = {gauss(rng), gauss(rng)};
        GridFunction g(cube, n, std::move(samples));
        double energy = g.norm_squared();
        auto field = e_d_coefficients(g, full_n_box(g), m_range);
        std::size_t per_m = field.n_count();
        for (std::size_t k = 0; k < m_range.size(); ++k) {
            double mass = 0.0;
            for (std::size_t i = 0; i < per_m; ++i) mass += std::norm(field.values[k * per_m + i]);
            worst = std::max(worst, std::abs(mass - energy) / energy);
        }
    }
    return {worst <= 1e-6, "50 functions (d = 1, 2), N = 256, |m| <= 8, worst relative error " + fmt(worst, 3)};
}

// 5

Outcome stationary_phase_decay() {
    auto profile = BumpProfile::smooth(uniform_cube(1, Rational(0), Rational(1)));
    WavePacket base{profile, {0}, 0};
    std::vector<double> lx, ly;
    for (long m = 4; m <= 256; ++m) {
        WavePacket other{profile, {0}, m};
        lx.push_back(std::log(static_cast<double>(m)));
        ly.push_back(std::log(std::abs(packet_overlap(base, other))));
    }
    auto [slope, rms] = fit_line_slope(lx, ly);
    return {std::abs(slope + 0.5) <= 0.1, "fitted slope " + fmt(slope) + " over m = 4..256 (margin " +
                                              fmt(profile.margin) + "), target -0.5 +- 0.1"};
}

// 6

Outcome bilinear_boundedness() {
    constexpr double kConstant = 3.0;
    std::mt19937_64 rng(6);
    auto left = uniform_cube(1, Rational(0), Rational(1));
    auto right = uniform_cube(1, Rational(4), Rational(5));
    CubeCollection caps(1, {left, right});
    double running = 0.0, at_200 = 0.0, worst_tail = 0.0;
    for (int s = 0; s < 400; ++s) {
        auto f = random_corpus_sample(rng, left, 16, 512);
        auto g = random_corpus_sample(rng, right, 16, 512);
        auto r = norm_ratio(MultilinearSpec(caps, {f, g}), 2.0, 2.0, full_n_box(f), {-32, 32});
        running = std::max(running, r.ratio);
        worst_tail = std::max(worst_tail, r.tail_fraction);
        if (s == 199) at_200 = running;
    }
    double change = (running - at_200) / running;
    bool ok = change < 0.1 && running < kConstant && worst_tail <= kTailLimit;
    return {ok, "running max " + fmt(at_200) + " (200) -> " + fmt(running) + " (400), change " + fmt(change, 3) +
                    ", constant " + fmt(kConstant) + ", worst tail " + fmt(worst_tail, 3)};
}

// 7

Outcome scaling_laws() {
    auto t0 = Clock::now();
    struct Case {
        FamilyKind kind;
        std::size_t d, k;
        Rational p;
    };
    std::vector<Case> cases{{FamilyKind::Cube, 1, 2, Rational(2)},    {FamilyKind::Cube, 1, 2, Rational(4)},
                            {FamilyKind::Slab, 2, 2, Rational(2)},    {FamilyKind::Slab, 2, 2, Rational(3)},
                            {FamilyKind::Rhombus, 2, 3, ratio(10, 9)}, {FamilyKind::Rhombus, 2, 3, Rational(2)}};
    std::vector<double> deltas{0.125, 0.0625, 0.03125, 0.015625};
    bool ok = true;
    std::ostringstream detail;
    for (const auto& c : cases) {
        auto report = run_scaling(c.kind, c.d, c.k, c.p, deltas);
        double err = std::abs(report.fitted_slope - to_double(predicted_exponent(c.kind, c.d, c.k, c.p)));
        ok = ok && err <= 0.15;
        detail << to_string(c.kind) << " p=" << to_string(c.p) << ": " << fmt(report.fitted_slope) << " vs "
               << fmt(report.predicted_exponent) << "; ";
    }
    double secs = seconds_since(t0);
    detail << fmt(secs, 3) << " s";
    return {ok && secs < 300.0, detail.str()};
}

// 8

Outcome threshold_identities() {
    std::size_t rows = 0, mismatches = 0;
    for (std::size_t d = 1; d + 1 <= 7; ++d) {
        for (std::size_t k = 1; k <= d + 1; ++k) {
            auto K = static_cast<long>(k), D = static_cast<long>(d);
            auto at_k = thresholds(k, d, k - 1);
            auto at_0 = thresholds(k, d, 0);
            auto at_d = thresholds(k, d, d);
            rows += 3;
            if (at_k.p_tau != ratio(2 * (D + K + 1), K * (D + K - 1))) ++mismatches;
            if (at_0.p_tau != ratio(2 * (D + 2), K * D)) ++mismatches;
            if (at_d.p_tau != ratio(2 * (D + 1), K * D)) ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(rows) + " exact comparisons for 1 <= k <= d+1 <= 7, " +
                                 std::to_string(mismatches) + " mismatches"};
}

// 9

Outcome tensor_factorization() {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    const std::size_t n = 64;
    const IndexRange m_range{-6, 6};
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Complex> a(n), b(n), ab(n * n);
        for (auto& z : a) z = {gauss(rng), gauss(rng)};
        for (auto& z : b) z = {gauss(rng), gauss(rng)};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) ab[i * n + j] = a[i] * b[j];
        auto line = uniform_cube(1, Rational(0), Rational(1));
        GridFunction ga(line, n, a), gb(line, n, b), g2(uniform_cube(2, Rational(0), Rational(1)), n, ab);
        auto fa = e_d_coefficients(ga, full_n_box(ga), m_range);
        auto fb = e_d_coefficients(gb, full_n_box(gb), m_range);
        auto f2 = e_d_coefficients(g2, full_n_box(g2), m_range);
        const std::size_t side = fa.n_count();
        for (std::size_t k = 0; k < m_range.size(); ++k)
            for (std::size_t i = 0; i < side; ++i)
                for (std::size_t j = 0; j < side; ++j) {
                    Complex outer = fa.values[k * side + i] * fb.values[k * side + j];
                    Complex direct = f2.values[(k * side + i) * side + j];
                    worst = std::max(worst, std::abs(outer - direct));
                }
    }
    return {worst <= 1e-8, "20 tensors (d = 2, N = 64, |m| <= 6), worst entry error " + fmt(worst, 3)};
}

struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite: one PASS/FAIL line per criterion", "acceptance"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    std::vector<Criterion> criteria{
        {1, "geometry examples", geometry_examples},
        {2, "matrix lemma fuzz", matrix_lemma_fuzz},
        {3, "geometry / Brascamp-Lieb cross-validation", theorem_cross_validation},
        {4, "Parseval per m", parseval},
        {5, "stationary-phase decay", stationary_phase_decay},
        {6, "bilinear L2 boundedness", bilinear_boundedness},
        {7, "scaling laws", scaling_laws},
        {8, "threshold identities", threshold_identities},
        {9, "tensor factorization", tensor_factorization},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("error: ") + e.what()};
        }
        if (!out.pass) ++failed;
        std::cout << (out.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << out.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}

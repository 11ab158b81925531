#include "extlab/brascamp_lieb.hpp"
#include "extlab/experiments.hpp"
#include "extlab/geometry.hpp"
#include "extlab/io.hpp"
#include "extlab/operators.hpp"
#include "extlab/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

using namespace extlab;
using io::ConfigError;
using io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

/// Numerical check failed after the report was produced.
struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::size_t threads = 1;
    bool no_timestamp = false;
    std::string output;
};

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json file_digest(const std::string& path) {
    auto text = io::read_text_file(path);
    return Json{{"path", path}, {"fnv1a64", io::hex64(io::fnv1a64(text))}};
}

void emit(const Globals& g, const std::string& command, const Json& config, Json result) {
    Json report;
    report["tool"] = "extlab";
    report["version"] = kVersion;
    report["command"] = command;
    report["config"] = config;
    report["config_hash"] = io::hex64(io::fnv1a64(config.dump()));
    if (!g.no_timestamp) report["timestamp"] = utc_timestamp();
    report["result"] = std::move(result);
    auto text = report.dump(2) + "\n";
    if (g.output.empty() || g.output == "-") {
        std::cout << text;
    } else {
        std::ofstream out(g.output, std::ios::binary);
        if (!out) throw ConfigError(g.output + ": cannot open for writing");
        out << text;
    }
}

Rational parse_exact(const std::string& text, const std::string& name) {
    try {
        return parse_rational(text);
    } catch (const std::exception& e) {
        throw ConfigError(name + ": cannot parse \"" + text + "\" as a rational (" + e.what() + ")");
    }
}

double parse_exponent(const std::string& text, const std::string& name) {
    if (text == "inf" || text == "infinity") return kInfinity;
    auto r = parse_exact(text, name);
    if (r <= 0) throw ConfigError(name + " must be positive");
    return to_double(r);
}

Json range_json(const IndexRange& r) { return Json::array({r.lo, r.hi}); }

// geom

struct GeomOptions {
    std::string input;
    std::size_t subdivisions = 8;
    double wedge_threshold = 0.05;
    bool decompose = false;
    long pivot = -1;
    std::size_t max_classes = 64;
};

Json decomposition_json(const Decomposition& dec, std::size_t max_classes) {
    Json classes = Json::array();
    std::size_t failing = 0;
    for (const auto& cls : dec.classes) {
        if (!cls.weakly_transversal) ++failing;
        if (classes.size() >= max_classes) continue;
        Json c{{"multiplicity", cls.multiplicity}, {"weakly_transversal", cls.weakly_transversal},
               {"cubes", io::to_json(cls.cubes)["cubes"]}};
        classes.push_back(std::move(c));
    }
    return Json{{"refinement_rounds", dec.refinement.rounds},
                {"refinement_conditions_met", dec.refinement.conditions_met},
                {"subcube_counts", dec.subcube_counts},
                {"selection_count", dec.selection_count},
                {"class_count", dec.classes.size()},
                {"failing_classes", failing},
                {"all_selections_pass", dec.all_weakly_transversal},
                {"classes_listed", classes.size()},
                {"classes", std::move(classes)}};
}

void cmd_geom_check(const Globals& g, const GeomOptions& o) {
    auto coll = io::cube_collection_from_json(io::read_json_file(o.input));
    Json config{{"input", file_digest(o.input)}, {"subdivisions", o.subdivisions},
                {"wedge_threshold", o.wedge_threshold}, {"decompose", o.decompose}};
    Json pivots = Json::array();
    bool all = true;
    for (std::size_t p = 0; p < coll.size(); ++p) {
        auto a = weakly_transversal_with_pivot(coll, p);
        all = all && a.has_value();
        pivots.push_back(Json{{"pivot", p}, {"weakly_transversal", a.has_value()},
                              {"assignment", a ? io::to_json(*a) : Json(nullptr)}});
    }
    auto tau = transversality_vector(coll);
    Json result{{"d", coll.d}, {"k", coll.size()}, {"weakly_transversal", all}, {"pivots", std::move(pivots)},
                {"transversality_vector", Json{{"bits", tau.bits}, {"total", tau.total}}}};
    if (coll.size() <= coll.d + 1) {
        double w = min_wedge_grid_estimate(coll, o.subdivisions);
        result["wedge_estimate"] = Json{{"min_wedge", w}, {"subdivisions", o.subdivisions},
                                        {"transversal_heuristic", w > o.wedge_threshold}};
    } else {
        result["wedge_estimate"] = nullptr;
    }
    if (o.decompose) result["decomposition"] = decomposition_json(decompose_weakly_transversal(coll), o.max_classes);
    emit(g, "geom check", config, std::move(result));
}

void cmd_geom_decompose(const Globals& g, const GeomOptions& o) {
    auto coll = io::cube_collection_from_json(io::read_json_file(o.input));
    Json config{{"input", file_digest(o.input)}, {"pivot", o.pivot}, {"max_classes", o.max_classes}};
    if (o.pivot >= static_cast<long>(coll.size())) throw ConfigError("--pivot out of range");
    auto dec = o.pivot < 0 ? decompose_weakly_transversal(coll)
                           : decompose_for_pivot(coll, static_cast<std::size_t>(o.pivot));
    Json result{{"d", coll.d}, {"k", coll.size()}, {"mode", o.pivot < 0 ? "all_pivots" : "single_pivot"}};
    result["decomposition"] = decomposition_json(dec, o.max_classes);
    emit(g, "geom decompose", config, std::move(result));
}

// bl

struct BLOptions {
    std::string input;
    std::size_t max_candidates = 4096;
    std::size_t rounds = 2;
};

Json dimension_json(const DimensionCheck& c) {
    return Json{{"holds", c.holds}, {"dim_v", c.lhs}, {"weighted_image_dims", to_string(c.rhs)}};
}

void cmd_bl_check(const Globals& g, const BLOptions& o) {
    auto datum = io::bl_datum_from_json(io::read_json_file(o.input));
    Json config{{"input", file_digest(o.input)}, {"max_candidates", o.max_candidates}, {"rounds", o.rounds}};
    CandidateOptions copt;
    copt.max_size = o.max_candidates;
    copt.max_rounds = o.rounds;
    auto family = candidate_subspaces(datum, {}, copt);
    auto verdict = check_finiteness(datum, family.subspaces);
    Json result{{"n", datum.ambient_dim}, {"maps", datum.maps.size()}, {"scaling_condition", scaling_condition(datum)}};
    result["verdict"] = verdict.kind == FinitenessVerdict::Kind::Infinite ? "Infinite" : "FiniteOnCandidates";
    result["reason"] = verdict.kind == FinitenessVerdict::Kind::Infinite
                           ? Json(verdict.scaling_failed ? "scaling" : "dimension")
                           : Json(nullptr);
    result["witness"] = verdict.witness ? Json{{"subspace", io::to_json(*verdict.witness)},
                                              {"check", dimension_json(verdict.witness_check)}}
                                        : Json(nullptr);
    result["candidates"] = Json{{"count", family.subspaces.size()}, {"truncated", family.truncated}};
    emit(g, "bl check", config, std::move(result));
}

void cmd_bl_from_caps(const Globals& g, const BLOptions& o) {
    auto coll = io::cube_collection_from_json(io::read_json_file(o.input));
    Json config{{"input", file_digest(o.input)}};
    if (coll.size() != coll.d + 1)
        throw ConfigError("cap data need k = d+1 cubes, got k = " + std::to_string(coll.size()) + ", d = " +
                          std::to_string(coll.d));
    auto v = cap_finiteness_via_geometry(coll);
    Json result{{"d", coll.d}, {"k", coll.size()},
                {"verdict", v.kind == CapVerdict::Kind::FiniteForAllPoints ? "FiniteForAllPoints" : "InfiniteForSomePoints"},
                {"selection_count", v.selection_count}, {"class_count", v.class_count}};
    if (v.witness) {
        const auto& w = *v.witness;
        Json points = Json::array();
        for (const auto& p : w.points.points) {
            Json row = Json::array();
            for (const auto& x : p) row.push_back(to_string(x));
            points.push_back(std::move(row));
        }
        result["witness"] = Json{{"subspace", io::to_json(w.v)},
                                 {"points", std::move(points)},
                                 {"subset", Json{{"members", w.subset.members}, {"directions", w.subset.directions}}},
                                 {"check", dimension_json(w.check)},
                                 {"predicted_rhs", to_string(w.predicted_rhs)}};
    } else {
        result["witness"] = nullptr;
    }
    emit(g, "bl from-caps", config, std::move(result));
}

// model

struct ModelOptions {
    std::string input;
    std::string p = "2", q = "2";
    long m_min = 0, m_max = 8;
    bool m_min_set = false;
    std::string profile = "sharp";
    double margin = 0.1;
    std::string field_out;
    std::string format = "csv";
    double floor = 0.0;
    // corpus
    std::size_t d = 1;
    std::size_t samples = 200;
    std::uint64_t seed = 1;
    std::size_t resolution = 1024;
    std::size_t cells = 8;
    bool bilinear = false;
};

IndexRange m_range_of(const ModelOptions& o) {
    IndexRange r{o.m_min_set ? o.m_min : -o.m_max, o.m_max};
    if (r.hi < r.lo) throw ConfigError("empty m range");
    return r;
}

BumpProfile profile_of(const ModelOptions& o, const RationalCube& cube) {
    if (o.profile == "sharp") return BumpProfile::sharp(cube);
    if (o.profile == "smooth") return BumpProfile::smooth(cube, o.margin);
    throw ConfigError("--profile must be sharp or smooth");
}

void cmd_model_coeffs(const Globals& g, const ModelOptions& o) {
    auto grid = io::load_grid_function(o.input);
    auto mr = m_range_of(o);
    double q = parse_exponent(o.q, "--q");
    auto profile = profile_of(o, grid.cube());
    Json config{{"input", file_digest(o.input)}, {"m_range", range_json(mr)}, {"profile", o.profile},
                {"margin", o.margin}, {"q", o.q}, {"format", o.format}, {"field_out", o.field_out}};
    if (o.format != "csv" && o.format != "binary") throw ConfigError("--format must be csv or binary");
    auto box = full_n_box(grid);
    auto field = e_d_coefficients(grid, profile, box, mr, g.threads);
    if (!o.field_out.empty()) {
        std::ofstream out(o.field_out, std::ios::binary);
        if (!out) throw ConfigError(o.field_out + ": cannot open for writing");
        if (o.format == "csv") io::write_field_csv(out, field);
        else io::write_field_binary(out, field);
    }
    Json boxes = Json::array();
    for (const auto& r : box) boxes.push_back(range_json(r));
    Json result{{"d", grid.dim()}, {"resolution", grid.resolution()}, {"n_ranges", std::move(boxes)},
                {"m_range", range_json(mr)}, {"entries", field.values.size()},
                {"grid_l2_norm_squared", grid.norm_squared()},
                {"coefficient_l2_norm_squared", std::pow(lp_norm(field, 2.0), 2)},
                {"norm", io::to_json(norm_report(field, q))}};
    if (o.floor > 0) result["level_sets"] = io::to_json(level_set_histogram(field, o.floor));
    emit(g, "model coeffs", config, std::move(result));
}

void cmd_model_norms(const Globals& g, const ModelOptions& o) {
    double p = parse_exponent(o.p, "--p"), q = parse_exponent(o.q, "--q");
    auto mr = m_range_of(o);
    if (!o.input.empty()) {
        auto grid = io::load_grid_function(o.input);
        Json config{{"input", file_digest(o.input)}, {"p", o.p}, {"q", o.q}, {"m_range", range_json(mr)}};
        auto r = norm_ratio(grid, p, q, full_n_box(grid), mr, g.threads);
        Json result{{"ratio", r.ratio}, {"numerator", r.numerator}, {"denominator", r.denominator},
                    {"tail_fraction", r.tail_fraction}, {"tail_limit", kTailLimit}, {"tail_ok", !r.tail_exceeded}};
        emit(g, "model norms", config, std::move(result));
        if (r.tail_exceeded) throw NumericalFailure("tail fraction above the limit; widen the m range");
        return;
    }
    if (o.d == 0 || o.d > 2) throw ConfigError("--d must be 1 or 2 for the corpus");
    if (o.bilinear && o.d != 1) throw ConfigError("--bilinear is defined for d = 1");
    if (o.samples < 2) throw ConfigError("--samples must be at least 2");
    if (o.cells == 0 || o.resolution % o.cells != 0) throw ConfigError("--cells must divide --resolution");
    Json config{{"corpus", Json{{"d", o.d}, {"samples", o.samples}, {"seed", o.seed}, {"resolution", o.resolution},
                                {"cells", o.cells}}},
                {"bilinear", o.bilinear}, {"p", o.p}, {"q", o.q}, {"m_range", range_json(mr)}};
    std::mt19937_64 rng(o.seed);
    auto unit = uniform_cube(o.d, Rational(0), Rational(1));
    auto far = uniform_cube(1, Rational(4), Rational(5));
    double running = 0.0, at_half = 0.0, worst_tail = 0.0;
    std::size_t argmax = 0;
    for (std::size_t s = 0; s < o.samples; ++s) {
        NormRatio r;
        if (o.bilinear) {
            auto f = random_corpus_sample(rng, unit, o.cells, o.resolution);
            auto h = random_corpus_sample(rng, far, o.cells, o.resolution);
            MultilinearSpec spec(CubeCollection(1, {unit, far}), {f, h});
            r = norm_ratio(spec, p, q, full_n_box(f), mr, g.threads);
        } else {
            auto f = random_corpus_sample(rng, unit, o.cells, o.resolution);
            r = norm_ratio(f, p, q, full_n_box(f), mr, g.threads);
        }
        if (r.ratio > running) {
            running = r.ratio;
            argmax = s;
        }
        worst_tail = std::max(worst_tail, r.tail_fraction);
        if (s + 1 == o.samples / 2) at_half = running;
    }
    double change = (running - at_half) / running;
    Json result{{"operator", o.bilinear ? "ME_2,1" : "E_d"},
                {"running_max", running},
                {"running_max_at_half", at_half},
                {"argmax_sample", argmax},
                {"relative_change_on_doubling", change},
                {"stabilized", change < 0.1},
                {"worst_tail_fraction", worst_tail},
                {"tail_limit", kTailLimit},
                {"tail_ok", worst_tail <= kTailLimit}};
    emit(g, "model norms", config, std::move(result));
    if (worst_tail > kTailLimit) throw NumericalFailure("tail fraction above the limit; widen the m range");
}

// scaling

struct ScalingCliOptions {
    std::string family = "cube";
    std::size_t d = 0, k = 0;
    std::string p = "2";
    std::vector<std::string> deltas{"1/8", "1/16", "1/32", "1/64"};
    double shrink = 0.25;
    std::size_t points = 32;
    double tolerance = 0.02;
    std::string csv, plot;
};

void cmd_scaling(const Globals& g, const ScalingCliOptions& o) {
    FamilyKind kind;
    try {
        kind = parse_family_kind(o.family);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("--family: ") + e.what());
    }
    std::size_t d = o.d, k = o.k;
    if (d == 0) d = kind == FamilyKind::Cube ? 1 : 2;
    if (k == 0) k = kind == FamilyKind::Cube ? d + 1 : kind == FamilyKind::Slab ? 2 : 3;
    auto p = parse_exact(o.p, "--p");
    std::vector<double> deltas;
    Json delta_strings = Json::array();
    for (const auto& s : o.deltas) {
        deltas.push_back(to_double(parse_exact(s, "--deltas")));
        delta_strings.push_back(s);
    }
    Json config{{"family", o.family}, {"d", d}, {"k", k}, {"p", to_string(p)}, {"deltas", delta_strings},
                {"shrink", o.shrink}, {"points_per_axis", o.points}, {"richardson_tolerance", o.tolerance}};
    ScalingOptions opt;
    opt.shrink = o.shrink;
    opt.points_per_axis = o.points;
    opt.richardson_tolerance = o.tolerance;
    opt.threads = g.threads;
    auto report = run_scaling(kind, d, k, p, deltas, opt);
    if (!o.csv.empty()) {
        std::ofstream out(o.csv);
        if (!out) throw ConfigError(o.csv + ": cannot open for writing");
        io::write_scaling_csv(out, report);
    }
    if (!o.plot.empty()) {
        std::ofstream out(o.plot);
        if (!out) throw ConfigError(o.plot + ": cannot open for writing");
        io::write_scaling_plot_data(out, report);
    }
    emit(g, "scaling run", config, io::to_json(report));
}

// thresholds

struct ThresholdOptions {
    std::size_t k = 2, d = 1;
    long tau = -1;
};

void cmd_thresholds(const Globals& g, const ThresholdOptions& o) {
    Json config{{"k", o.k}, {"d", o.d}, {"tau", o.tau}};
    if (o.k == 0 || o.k > o.d + 1) throw ConfigError("--k must satisfy 1 <= k <= d+1");
    if (o.tau > static_cast<long>(o.d)) throw ConfigError("--tau must satisfy 0 <= tau <= d");
    Json result;
    if (o.tau >= 0) {
        result = io::to_json(thresholds(o.k, o.d, static_cast<std::size_t>(o.tau)));
    } else {
        result = Json::array();
        for (std::size_t t = 0; t <= o.d; ++t) result.push_back(io::to_json(thresholds(o.k, o.d, t)));
    }
    emit(g, "thresholds", config, std::move(result));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical companion for multilinear Fourier extension estimates", "extlab"};
    app.fallthrough();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Globals globals;
    if (const char* env = std::getenv("EXTLAB_THREADS"); env && *env) {
        char* end = nullptr;
        errno = 0;
        unsigned long v = std::strtoul(env, &end, 10);
        if (errno != 0 || *end != '\0' || v < 1 || v > 1024 || env[0] == '-') {
            std::cerr << "extlab: invalid configuration: EXTLAB_THREADS must be an integer in [1, 1024]\n";
            return kExitConfig;
        }
        globals.threads = v;
    }
    app.add_option("--threads", globals.threads, "Worker threads for parallel stages (default: EXTLAB_THREADS or 1)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1024}));
    app.add_flag("--no-timestamp", globals.no_timestamp, "Omit the timestamp field from reports");
    app.add_option("-o,--output", globals.output, "Report path (stdout when omitted)");

    std::function<void()> action;

    GeomOptions geom;
    auto* geom_cmd = app.add_subcommand("geom", "Weak transversality of a cube collection")->require_subcommand(1);
    auto* geom_check = geom_cmd->add_subcommand("check", "Verdicts per pivot, transversality vector, wedge estimate");
    geom_check->add_option("input", geom.input, "Cube-collection JSON")->required();
    geom_check->add_option("--subdivisions", geom.subdivisions, "Grid parts per axis for the wedge estimate")
        ->check(CLI::PositiveNumber);
    geom_check->add_option("--wedge-threshold", geom.wedge_threshold, "Wedge volume regarded as transversal");
    geom_check->add_flag("--decompose", geom.decompose, "Also refine and check every selection");
    geom_check->add_option("--max-classes", geom.max_classes, "Selection classes listed in the report");
    geom_check->callback([&] { action = [&] { cmd_geom_check(globals, geom); }; });
    auto* geom_dec = geom_cmd->add_subcommand("decompose", "Refinement and per-selection verdicts");
    geom_dec->add_option("input", geom.input, "Cube-collection JSON")->required();
    geom_dec->add_option("--pivot", geom.pivot, "Check a single pivot (0-based) with pivot refinement");
    geom_dec->add_option("--max-classes", geom.max_classes, "Selection classes listed in the report");
    geom_dec->callback([&] { action = [&] { cmd_geom_decompose(globals, geom); }; });

    BLOptions bl;
    auto* bl_cmd = app.add_subcommand("bl", "Brascamp-Lieb finiteness")->require_subcommand(1);
    auto* bl_check = bl_cmd->add_subcommand("check", "Scaling and dimension conditions for an explicit datum");
    bl_check->add_option("input", bl.input, "BL datum JSON")->required();
    bl_check->add_option("--max-candidates", bl.max_candidates, "Cap on the candidate subspace family");
    bl_check->add_option("--rounds", bl.rounds, "Sum/intersection closure rounds");
    bl_check->callback([&] { action = [&] { cmd_bl_check(globals, bl); }; });
    auto* bl_caps = bl_cmd->add_subcommand("from-caps", "Finiteness of the cap datum at every choice of points");
    bl_caps->add_option("input", bl.input, "Cube-collection JSON with k = d+1")->required();
    bl_caps->callback([&] { action = [&] { cmd_bl_from_caps(globals, bl); }; });

    ModelOptions model;
    auto* model_cmd = app.add_subcommand("model", "Discrete extension model")->require_subcommand(1);
    auto add_m_options = [&](CLI::App* sub) {
        sub->add_option("--m-max", model.m_max, "Largest |m| (range [-M, M])")->check(CLI::NonNegativeNumber);
        sub->add_option_function<long>("--m-min", [&](const long& v) {
            model.m_min = v;
            model.m_min_set = true;
        }, "Smallest m, overriding -M");
    };
    auto* coeffs = model_cmd->add_subcommand("coeffs", "Wave-packet coefficients of a grid function");
    coeffs->add_option("--input", model.input, "Grid function (binary container or JSON)")->required();
    add_m_options(coeffs);
    coeffs->add_option("--profile", model.profile, "sharp or smooth");
    coeffs->add_option("--margin", model.margin, "Smooth profile margin");
    coeffs->add_option("--q", model.q, "Exponent of the coefficient norm report (p/q string or inf)");
    coeffs->add_option("--field-out", model.field_out, "Write the coefficient field here");
    coeffs->add_option("--format", model.format, "csv or binary");
    coeffs->add_option("--floor", model.floor, "Level-set histogram floor (0 disables)");
    coeffs->callback([&] { action = [&] { cmd_model_coeffs(globals, model); }; });
    auto* norms = model_cmd->add_subcommand("norms", "||E g||_q / ||g||_p for one input or a seeded corpus");
    norms->add_option("--input", model.input, "Grid function; omit for the random corpus");
    norms->add_option("--p", model.p, "Input exponent");
    norms->add_option("--q", model.q, "Output exponent");
    add_m_options(norms);
    norms->add_option("--d", model.d, "Corpus dimension (1 or 2)");
    norms->add_option("--samples", model.samples, "Corpus size");
    norms->add_option("--seed", model.seed, "Corpus seed");
    norms->add_option("--resolution", model.resolution, "Grid points per axis");
    norms->add_option("--cells", model.cells, "Coarse cells per axis of the corpus step functions");
    norms->add_flag("--bilinear", model.bilinear, "ME_2,1 on [0,1] and [4,5] instead of E_d");
    norms->callback([&] {
        // the [4,5] cap aliases at large m on the default grid
        if (model.bilinear && norms->count("--m-max") == 0) model.m_max = 48;
        action = [&] { cmd_model_norms(globals, model); };
    });
    norms->preparse_callback([&](std::size_t) {
        model.m_max = 160;
    });

    ScalingCliOptions scaling;
    auto* scaling_cmd = app.add_subcommand("scaling", "Scaling experiments for the sharp example families");
    scaling_cmd->add_option("--family", scaling.family, "cube, slab or rhombus");
    scaling_cmd->add_option("--d", scaling.d, "Dimension (default: 1 for cube, 2 otherwise)");
    scaling_cmd->add_option("--k", scaling.k, "Number of functions (default: d+1, 2 or 3)");
    scaling_cmd->add_option("--p", scaling.p, "Output exponent, p/q string");
    scaling_cmd->add_option("--deltas", scaling.deltas, "Strictly decreasing deltas")->delimiter(',');
    scaling_cmd->add_option("--shrink", scaling.shrink, "Dual-box shrink factor");
    scaling_cmd->add_option("--points", scaling.points, "Quadrature points per axis")->check(CLI::PositiveNumber);
    scaling_cmd->add_option("--tolerance", scaling.tolerance, "Allowed coarse/fine quadrature discrepancy");
    scaling_cmd->add_option("--csv", scaling.csv, "Write delta,ratio rows here");
    scaling_cmd->add_option("--plot", scaling.plot, "Write log-log plot data here");
    scaling_cmd->add_subcommand("run", "Run the experiment (same as plain 'scaling')");
    scaling_cmd->callback([&] { action = [&] { cmd_scaling(globals, scaling); }; });

    ThresholdOptions thr;
    auto* thr_cmd = app.add_subcommand("thresholds", "Exponent thresholds for given k, d and tau");
    thr_cmd->add_option("--k", thr.k, "Number of functions")->required();
    thr_cmd->add_option("--d", thr.d, "Dimension")->required();
    thr_cmd->add_option("--tau", thr.tau, "Total transversality degree (all when omitted)");
    thr_cmd->callback([&] { action = [&] { cmd_thresholds(globals, thr); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (action) action();
        return kExitOk;
    } catch (const NumericalFailure& e) {
        std::cerr << "extlab: numerical failure: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "extlab: invalid configuration: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "extlab: internal failure: " << e.what() << "\n";
        return kExitFailure;
    }
}

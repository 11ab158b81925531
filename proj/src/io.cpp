#include "extlab/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace extlab::io {

namespace {

constexpr char kGridMagic[8] = {'E', 'X', 'T', 'L', 'A', 'B', 'G', 'F'};
constexpr char kFieldMagic[8] = {'E', 'X', 'T', 'L', 'A', 'B', 'C', 'F'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 32;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

const Json& member(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
    return *it;
}

const Json& array_at(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
    return j;
}

std::size_t size_from_json(const Json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected a non-negative integer");
    auto v = j.get<std::int64_t>();
    if (v < 0) fail(where, "expected a non-negative integer");
    return static_cast<std::size_t>(v);
}

Json rational_json(const Rational& r) { return to_string(r); }

void put_u32(std::ostream& out, std::uint32_t v) {
    std::array<char, 4> b{};
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b.data(), 8);
}

void put_f64(std::ostream& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

void put_string(std::ostream& out, const std::string& s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void read_exact(std::istream& in, char* dst, std::size_t n, const char* what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw ConfigError(std::string("truncated input while reading ") + what);
}

std::uint64_t get_uint(std::istream& in, int bytes, const char* what) {
    std::array<unsigned char, 8> b{};
    read_exact(in, reinterpret_cast<char*>(b.data()), static_cast<std::size_t>(bytes), what);
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& in, const char* what) { return std::bit_cast<double>(get_uint(in, 8, what)); }

std::string get_string(std::istream& in, const char* what) {
    auto len = get_uint(in, 4, what);
    if (len > 4096) throw ConfigError(std::string("implausible string length while reading ") + what);
    std::string s(len, '\0');
    read_exact(in, s.data(), len, what);
    return s;
}

void expect_magic(std::istream& in, const char (&magic)[8], const char* what) {
    char got[8];
    read_exact(in, got, 8, what);
    if (std::memcmp(got, magic, 8) != 0) throw ConfigError(std::string("bad magic for ") + what);
    auto version = get_uint(in, 4, what);
    if (version != kFormatVersion) throw ConfigError(std::string("unsupported ") + what + " version " + std::to_string(version));
}

std::string shortest(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

}  // namespace

Json parse_json(std::string_view text, const std::string& source) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1, column = 1;
        auto stop = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string what = e.what();
        auto pos = what.find("syntax error");
        if (pos != std::string::npos) what = what.substr(pos);
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Json read_json_file(const std::string& path) { return parse_json(read_text_file(path), path); }

Rational rational_from_json(const Json& j, const std::string& where) {
    std::string text;
    if (j.is_string()) {
        text = j.get<std::string>();
    } else if (j.is_number_integer() || j.is_number_unsigned()) {
        text = j.dump();
    } else if (j.is_number_float()) {
        double x = j.get<double>();
        if (!std::isfinite(x)) fail(where, "non-finite number");
        text = j.dump();
    } else {
        fail(where, "expected a rational string such as \"3/2\" or \"0.25\"");
    }
    try {
        return parse_rational(text);
    } catch (const std::exception& e) {
        fail(where, "cannot parse \"" + text + "\" as a rational (" + e.what() + ")");
    }
}

CubeCollection cube_collection_from_json(const Json& j) {
    auto d = size_from_json(member(j, "d", "$"), "$.d");
    if (d == 0) fail("$.d", "dimension must be positive");
    const auto& cubes = array_at(member(j, "cubes", "$"), "$.cubes");
    if (cubes.empty()) fail("$.cubes", "the cube list is empty");
    std::vector<RationalCube> out;
    for (std::size_t c = 0; c < cubes.size(); ++c) {
        std::string cw = "$.cubes[" + std::to_string(c) + "]";
        const auto& axes = array_at(cubes[c], cw);
        if (axes.size() != d) fail(cw, "expected " + std::to_string(d) + " intervals, got " + std::to_string(axes.size()));
        std::vector<Interval> iv;
        for (std::size_t a = 0; a < d; ++a) {
            std::string aw = cw + "[" + std::to_string(a) + "]";
            const auto& pair = array_at(axes[a], aw);
            if (pair.size() != 2) fail(aw, "expected [lo, hi]");
            auto lo = rational_from_json(pair[0], aw + "[0]");
            auto hi = rational_from_json(pair[1], aw + "[1]");
            if (!(lo < hi)) fail(aw, "interval must satisfy lo < hi");
            iv.emplace_back(lo, hi);
        }
        out.emplace_back(std::move(iv));
    }
    return CubeCollection(d, std::move(out));
}

Json to_json(const CubeCollection& coll) {
    Json cubes = Json::array();
    for (const auto& c : coll.cubes) {
        Json axes = Json::array();
        for (const auto& iv : c.intervals) axes.push_back({rational_json(iv.lo), rational_json(iv.hi)});
        cubes.push_back(std::move(axes));
    }
    return Json{{"d", coll.d}, {"cubes", std::move(cubes)}};
}

BLDatum bl_datum_from_json(const Json& j) {
    auto n = size_from_json(member(j, "n", "$"), "$.n");
    if (n == 0) fail("$.n", "ambient dimension must be positive");
    const auto& maps = array_at(member(j, "maps", "$"), "$.maps");
    const auto& exps = array_at(member(j, "exponents", "$"), "$.exponents");
    if (maps.empty()) fail("$.maps", "no maps given");
    if (maps.size() != exps.size()) fail("$.exponents", "expected one exponent per map");
    std::vector<RationalMatrix> mats;
    std::vector<Rational> ps;
    for (std::size_t m = 0; m < maps.size(); ++m) {
        std::string mw = "$.maps[" + std::to_string(m) + "]";
        const auto& rows = array_at(maps[m], mw);
        std::vector<RationalVector> rv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            std::string rw = mw + "[" + std::to_string(r) + "]";
            const auto& row = array_at(rows[r], rw);
            if (row.size() != n) fail(rw, "expected " + std::to_string(n) + " entries");
            RationalVector v;
            for (std::size_t c = 0; c < n; ++c) v.push_back(rational_from_json(row[c], rw + "[" + std::to_string(c) + "]"));
            rv.push_back(std::move(v));
        }
        mats.push_back(RationalMatrix::from_rows(rv, n));
        auto p = rational_from_json(exps[m], "$.exponents[" + std::to_string(m) + "]");
        if (p < 0) fail("$.exponents[" + std::to_string(m) + "]", "exponent must be non-negative");
        ps.push_back(p);
    }
    return BLDatum(n, std::move(mats), std::move(ps));
}

Json to_json(const BLDatum& datum) {
    Json maps = Json::array();
    for (const auto& m : datum.maps) {
        Json rows = Json::array();
        for (std::size_t r = 0; r < m.rows(); ++r) {
            Json row = Json::array();
            for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(rational_json(m(r, c)));
            rows.push_back(std::move(row));
        }
        maps.push_back(std::move(rows));
    }
    Json exps = Json::array();
    for (const auto& p : datum.exponents) exps.push_back(rational_json(p));
    return Json{{"n", datum.ambient_dim}, {"maps", std::move(maps)}, {"exponents", std::move(exps)}};
}

Json to_json(const Subspace& v) {
    Json basis = Json::array();
    for (const auto& b : v.basis()) {
        Json row = Json::array();
        for (const auto& x : b) row.push_back(rational_json(x));
        basis.push_back(std::move(row));
    }
    return Json{{"ambient_dim", v.ambient_dim()}, {"dim", v.dim()}, {"basis", std::move(basis)}};
}

Json to_json(const DirectionAssignment& a) {
    Json axes = Json::object();
    for (const auto& [cube, axis] : a.axis_of) axes[std::to_string(cube)] = axis;
    return Json{{"pivot", a.pivot}, {"axis_of", std::move(axes)}, {"min_separation", rational_json(a.min_separation)}};
}

void write_grid_function(std::ostream& out, const GridFunction& g) {
    out.write(kGridMagic, 8);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(g.dim()));
    put_u64(out, g.resolution());
    for (const auto& iv : g.cube().intervals) {
        put_string(out, to_decimal_string(iv.lo));
        put_string(out, to_decimal_string(iv.hi));
    }
    for (const auto& z : g.samples()) {
        put_f64(out, z.real());
        put_f64(out, z.imag());
    }
    if (!out) throw std::runtime_error("write failed for grid function");
}

GridFunction read_grid_function(std::istream& in) {
    expect_magic(in, kGridMagic, "grid function");
    auto d = get_uint(in, 4, "grid function header");
    auto n = get_uint(in, 8, "grid function header");
    if (d == 0 || d > 8) throw ConfigError("grid function: dimension " + std::to_string(d) + " out of range");
    if (n == 0) throw ConfigError("grid function: resolution must be positive");
    std::uint64_t total = 1;
    for (std::uint64_t a = 0; a < d; ++a) {
        if (total > kMaxSamples / n) throw ConfigError("grid function: too many samples");
        total *= n;
    }
    std::vector<Interval> iv;
    for (std::uint64_t a = 0; a < d; ++a) {
        auto lo = get_string(in, "cube endpoint");
        auto hi = get_string(in, "cube endpoint");
        try {
            iv.emplace_back(parse_rational(lo), parse_rational(hi));
        } catch (const std::exception& e) {
            throw ConfigError("grid function: bad endpoint on axis " + std::to_string(a) + ": " + e.what());
        }
    }
    std::vector<Complex> samples(total);
    for (auto& z : samples) {
        double re = get_f64(in, "samples");
        double im = get_f64(in, "samples");
        z = {re, im};
    }
    try {
        return GridFunction(RationalCube(std::move(iv)), n, std::move(samples));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("grid function: ") + e.what());
    }
}

Json grid_function_to_json(const GridFunction& g) {
    Json cube = Json::array();
    for (const auto& iv : g.cube().intervals) cube.push_back({rational_json(iv.lo), rational_json(iv.hi)});
    Json samples = Json::array();
    for (const auto& z : g.samples()) samples.push_back({z.real(), z.imag()});
    return Json{{"cube", std::move(cube)}, {"n", g.resolution()}, {"samples", std::move(samples)}};
}

GridFunction grid_function_from_json(const Json& j) {
    const auto& cube = array_at(member(j, "cube", "$"), "$.cube");
    if (cube.empty()) fail("$.cube", "the cube has no axes");
    std::vector<Interval> iv;
    for (std::size_t a = 0; a < cube.size(); ++a) {
        std::string aw = "$.cube[" + std::to_string(a) + "]";
        const auto& pair = array_at(cube[a], aw);
        if (pair.size() != 2) fail(aw, "expected [lo, hi]");
        auto lo = rational_from_json(pair[0], aw + "[0]");
        auto hi = rational_from_json(pair[1], aw + "[1]");
        if (!(lo < hi)) fail(aw, "interval must satisfy lo < hi");
        iv.emplace_back(lo, hi);
    }
    auto n = size_from_json(member(j, "n", "$"), "$.n");
    if (n == 0) fail("$.n", "resolution must be positive");
    const auto& samples = array_at(member(j, "samples", "$"), "$.samples");
    std::size_t expected = 1;
    for (std::size_t a = 0; a < iv.size(); ++a) expected *= n;
    if (samples.size() != expected)
        fail("$.samples", "expected " + std::to_string(expected) + " samples, got " + std::to_string(samples.size()));
    std::vector<Complex> values;
    values.reserve(expected);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::string sw = "$.samples[" + std::to_string(i) + "]";
        const auto& s = samples[i];
        if (s.is_number()) {
            values.emplace_back(s.get<double>(), 0.0);
        } else if (s.is_array() && s.size() == 2 && s[0].is_number() && s[1].is_number()) {
            values.emplace_back(s[0].get<double>(), s[1].get<double>());
        } else {
            fail(sw, "expected a number or [re, im]");
        }
        if (!std::isfinite(values.back().real()) || !std::isfinite(values.back().imag())) fail(sw, "non-finite sample");
    }
    return GridFunction(RationalCube(std::move(iv)), n, std::move(values));
}

GridFunction load_grid_function(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    char head[8] = {};
    in.read(head, 8);
    bool binary = in.gcount() == 8 && std::memcmp(head, kGridMagic, 8) == 0;
    in.clear();
    in.seekg(0);
    if (binary) {
        try {
            return read_grid_function(in);
        } catch (const ConfigError& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }
    auto j = read_json_file(path);
    try {
        return grid_function_from_json(j);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void write_field_csv(std::ostream& out, const CoefficientField& field) {
    auto d = field.dim();
    for (std::size_t a = 0; a < d; ++a) out << 'n' << a << ',';
    out << "m,re,im\n";
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        auto [n, m] = field.position(i);
        for (auto v : n) out << v << ',';
        out << m << ',' << shortest(field.values[i].real()) << ',' << shortest(field.values[i].imag()) << '\n';
    }
}

void write_field_binary(std::ostream& out, const CoefficientField& field) {
    out.write(kFieldMagic, 8);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(field.dim()));
    for (const auto& r : field.n_ranges) {
        put_u64(out, static_cast<std::uint64_t>(r.lo));
        put_u64(out, static_cast<std::uint64_t>(r.hi));
    }
    put_u64(out, static_cast<std::uint64_t>(field.m_range.lo));
    put_u64(out, static_cast<std::uint64_t>(field.m_range.hi));
    for (const auto& z : field.values) {
        put_f64(out, z.real());
        put_f64(out, z.imag());
    }
    if (!out) throw std::runtime_error("write failed for coefficient field");
}

CoefficientField read_field_binary(std::istream& in) {
    expect_magic(in, kFieldMagic, "coefficient field");
    auto d = get_uint(in, 4, "coefficient field header");
    if (d == 0 || d > 8) throw ConfigError("coefficient field: dimension " + std::to_string(d) + " out of range");
    auto get_range = [&in]() {
        auto lo = static_cast<long>(static_cast<std::int64_t>(get_uint(in, 8, "index range")));
        auto hi = static_cast<long>(static_cast<std::int64_t>(get_uint(in, 8, "index range")));
        if (hi < lo || hi - lo > (1L << 24)) throw ConfigError("coefficient field: bad index range");
        return IndexRange{lo, hi};
    };
    std::vector<IndexRange> ranges;
    for (std::uint64_t a = 0; a < d; ++a) ranges.push_back(get_range());
    auto m = get_range();
    std::uint64_t total = static_cast<std::uint64_t>(m.hi - m.lo + 1);
    for (const auto& r : ranges) {
        total *= static_cast<std::uint64_t>(r.hi - r.lo + 1);
        if (total > kMaxSamples) throw ConfigError("coefficient field: too many entries");
    }
    CoefficientField field(ranges, m);
    for (auto& z : field.values) {
        double re = get_f64(in, "values");
        double im = get_f64(in, "values");
        z = {re, im};
    }
    return field;
}

Json to_json(const NormReport& r) {
    Json j{{"p", r.p == kInfinity ? Json("inf") : Json(r.p)}, {"value", r.value}, {"tail_fraction", r.tail_fraction}};
    if (r.quasi) j["quasi_norm"] = true;
    return j;
}

Json to_json(const LevelSetHistogram& h) {
    Json counts = Json::object();
    for (const auto& [l, c] : h.counts) counts[std::to_string(l)] = c;
    return Json{{"floor", h.floor}, {"counts", std::move(counts)}, {"below_floor", h.below_floor}, {"total", h.total()}};
}

Json to_json(const ScalingReport& r) {
    Json points = Json::array();
    for (const auto& pt : r.points)
        points.push_back({{"delta", pt.delta},
                          {"ratio", pt.ratio},
                          {"coarse_ratio", pt.coarse_ratio},
                          {"fine_ratio", pt.fine_ratio},
                          {"quadrature_discrepancy", pt.quadrature_discrepancy}});
    return Json{{"family", to_string(r.kind)},
                {"d", r.d},
                {"k", r.k},
                {"p", to_string(r.p)},
                {"points", std::move(points)},
                {"fitted_slope", r.fitted_slope},
                {"predicted_exponent", r.predicted_exponent},
                {"slope_error", std::abs(r.fitted_slope - r.predicted_exponent)},
                {"fit_residual", r.residual},
                {"shrink", r.shrink},
                {"slope_at_half_shrink", r.slope_at_half_shrink},
                {"constant_spread", r.constant_spread}};
}

void write_scaling_csv(std::ostream& out, const ScalingReport& r) {
    out << "delta,ratio\n";
    for (std::size_t i = 0; i < r.deltas.size(); ++i) out << shortest(r.deltas[i]) << ',' << shortest(r.ratios[i]) << '\n';
}

void write_scaling_plot_data(std::ostream& out, const ScalingReport& r) {
    out << "# log(delta) log(ratio)\n";
    for (std::size_t i = 0; i < r.deltas.size(); ++i)
        out << shortest(std::log(r.deltas[i])) << ' ' << shortest(std::log(r.ratios[i])) << '\n';
}

Json to_json(const ThresholdRow& row) {
    auto entry = [](const Rational& q) { return Json{{"exact", to_string(q)}, {"value", to_double(q)}}; };
    Json j{{"k", row.k},
           {"d", row.d},
           {"tau", row.tau},
           {"p_tau", entry(row.p_tau)},
           {"k_linear", entry(row.k_linear)},
           {"strichartz", entry(row.strichartz)},
           {"restriction", entry(row.restriction)},
           {"multilinear_output", entry(row.multilinear_output)}};
    j["p_kd"] = row.p_kd ? entry(*row.p_kd) : Json(nullptr);
    j["product_input"] = row.product_input ? entry(*row.product_input) : Json(nullptr);
    return j;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

}  // namespace extlab::io

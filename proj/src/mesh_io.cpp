#include "pflat/mesh_io.hpp"

#include "pflat/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

namespace pflat {

namespace {

class LineReader
{
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-empty line split into tokens; false at end of input.
    bool next(std::vector<std::string>& tokens)
    {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            std::istringstream ss(line);
            tokens.clear();
            for (std::string t; ss >> t;) tokens.push_back(t);
            if (!tokens.empty()) return true;
        }
        ++line_;
        return false;
    }

    std::vector<std::string> require(const std::string& what)
    {
        std::vector<std::string> tokens;
        if (!next(tokens)) throw ParseError(line_, "unexpected end of file, expected " + what);
        return tokens;
    }

    int line() const noexcept { return line_; }

private:
    std::istream& in_;
    int line_ = 0;
};

template <class T>
T parse_number(const std::string& token, int line, const char* what)
{
    T value{};
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ParseError(line, std::string("invalid ") + what + " '" + token + "'");
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(value)) throw ParseError(line, std::string("non-finite ") + what + " '" + token + "'");
    return value;
}

void expect_count(const std::vector<std::string>& tokens, std::size_t n, int line, const std::string& what)
{
    if (tokens.size() != n)
        throw ParseError(line, what + ": expected " + std::to_string(n) + " fields, got " + std::to_string(tokens.size()));
}

std::string format(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using LabelPair = std::pair<VertexLabel, VertexLabel>;

LabelPair sorted_pair(VertexLabel a, VertexLabel b)
{
    return a < b ? LabelPair{a, b} : LabelPair{b, a};
}

} // namespace

MeshFile parse_mesh(std::istream& in)
{
    LineReader reader(in);
    MeshFile m;

    auto header = reader.require("header 'pfmesh 1'");
    if (header.size() != 2 || header[0] != "pfmesh") throw ParseError(reader.line(), "expected header 'pfmesh 1'");
    m.version = parse_number<int>(header[1], reader.line(), "format version");
    if (m.version != 1) throw ParseError(reader.line(), "unsupported format version " + header[1]);

    std::set<std::string> seen;
    std::set<VertexLabel> vertex_set;
    std::set<LabelPair> edges;
    std::vector<std::string> tokens;

    auto read_count = [&](const std::vector<std::string>& t) {
        expect_count(t, 2, reader.line(), t[0]);
        const long long n = parse_number<long long>(t[1], reader.line(), "count");
        if (n < 0 || n > 100'000'000) throw ParseError(reader.line(), "count out of range: " + t[1]);
        return static_cast<std::size_t>(n);
    };
    auto label = [&](const std::string& token) {
        const auto v = parse_number<VertexLabel>(token, reader.line(), "vertex label");
        if (!vertex_set.empty() && !vertex_set.contains(v))
            throw ParseError(reader.line(), "undeclared vertex " + token);
        return v;
    };
    auto need_vertices = [&](const std::string& block) {
        if (!seen.contains("vertices")) throw ParseError(reader.line(), "'" + block + "' must follow 'vertices'");
    };
    auto read_vertex_values = [&](std::size_t n, const std::string& block) {
        need_vertices(block);
        std::vector<MeshFile::VertexValue> values;
        std::set<VertexLabel> covered;
        for (std::size_t r = 0; r < n; ++r) {
            const auto t = reader.require(block + " entry");
            expect_count(t, 2, reader.line(), block + " entry");
            const auto v = label(t[0]);
            if (!covered.insert(v).second) throw ParseError(reader.line(), "duplicate " + block + " entry for vertex " + t[0]);
            values.push_back({v, parse_number<double>(t[1], reader.line(), "value")});
        }
        if (covered.size() != vertex_set.size())
            throw ParseError(reader.line(), block + " block must cover all " + std::to_string(vertex_set.size()) +
                                                " vertices");
        return values;
    };
    auto read_edge_values = [&](std::size_t n, const std::string& block, bool directed) {
        if (!seen.contains("simplices")) throw ParseError(reader.line(), "'" + block + "' must follow 'simplices'");
        std::vector<MeshFile::EdgeValue> values;
        std::set<LabelPair> covered;
        for (std::size_t r = 0; r < n; ++r) {
            const auto t = reader.require(block + " entry");
            expect_count(t, 3, reader.line(), block + " entry");
            const auto a = label(t[0]);
            const auto b = label(t[1]);
            if (!edges.contains(sorted_pair(a, b)))
                throw ParseError(reader.line(), "{" + t[0] + ", " + t[1] + "} is not an edge");
            const LabelPair key = directed ? LabelPair{a, b} : sorted_pair(a, b);
            if (!covered.insert(key).second) throw ParseError(reader.line(), "duplicate " + block + " entry " + t[0] + " " + t[1]);
            values.push_back({a, b, parse_number<double>(t[2], reader.line(), "value")});
        }
        const std::size_t want = directed ? 2 * edges.size() : edges.size();
        if (covered.size() != want)
            throw ParseError(reader.line(), block + " block must have " + std::to_string(want) + " entries");
        return values;
    };

    while (reader.next(tokens)) {
        const std::string key = tokens[0];
        if (seen.contains(key)) throw ParseError(reader.line(), "duplicate block '" + key + "'");
        if (key == "dimension") {
            expect_count(tokens, 2, reader.line(), key);
            m.dimension = parse_number<int>(tokens[1], reader.line(), "dimension");
            if (m.dimension != 2 && m.dimension != 3) throw ParseError(reader.line(), "dimension must be 2 or 3");
        } else if (key == "vertices") {
            const auto n = read_count(tokens);
            for (std::size_t r = 0; r < n; ++r) {
                const auto t = reader.require("vertex label");
                expect_count(t, 1, reader.line(), "vertex line");
                const auto v = parse_number<VertexLabel>(t[0], reader.line(), "vertex label");
                if (!vertex_set.insert(v).second) throw ParseError(reader.line(), "duplicate vertex " + t[0]);
                m.vertices.push_back(v);
            }
        } else if (key == "simplices") {
            if (m.dimension == 0) throw ParseError(reader.line(), "'simplices' must follow 'dimension'");
            need_vertices(key);
            const auto n = read_count(tokens);
            for (std::size_t r = 0; r < n; ++r) {
                const auto t = reader.require("simplex");
                expect_count(t, static_cast<std::size_t>(m.dimension + 1), reader.line(), "simplex");
                std::vector<VertexLabel> s;
                for (const auto& token : t) s.push_back(label(token));
                for (std::size_t a = 0; a < s.size(); ++a)
                    for (std::size_t b = a + 1; b < s.size(); ++b) {
                        if (s[a] == s[b]) throw ParseError(reader.line(), "repeated vertex in simplex");
                        edges.insert(sorted_pair(s[a], s[b]));
                    }
                m.simplices.push_back(std::move(s));
            }
        } else if (key == "chart") {
            expect_count(tokens, 2, reader.line(), key);
            try {
                m.chart = chart_kind_from_string(tokens[1]);
            } catch (const std::invalid_argument&) {
                throw ParseError(reader.line(), "unknown chart '" + tokens[1] + "'");
            }
        } else if (key == "edge_values") {
            m.edge_values = read_edge_values(read_count(tokens), key, false);
        } else if (key == "f") {
            m.f = read_vertex_values(read_count(tokens), key);
        } else if (key == "metric") {
            m.metric = read_edge_values(read_count(tokens), key, true);
        } else if (key == "target") {
            m.target = read_vertex_values(read_count(tokens), key);
        } else {
            throw ParseError(reader.line(), "unknown block '" + key + "'");
        }
        seen.insert(key);
    }

    const int end = reader.line();
    for (const char* required : {"dimension", "vertices", "simplices"})
        if (!seen.contains(required)) throw ParseError(end, std::string("missing '") + required + "' block");
    const bool has_chart = m.chart.has_value() || seen.contains("f") || seen.contains("edge_values");
    const bool has_metric = seen.contains("metric");
    if (has_chart == has_metric) throw ParseError(end, "exactly one of 'chart' + 'f' or 'metric' is required");
    if (has_chart) {
        if (!m.chart) throw ParseError(end, "missing 'chart' block");
        if (!seen.contains("f")) throw ParseError(end, "missing 'f' block");
        const bool wants_values = *m.chart != ChartKind::Packing;
        if (wants_values != seen.contains("edge_values"))
            throw ParseError(end, wants_values ? "chart '" + std::string(to_string(*m.chart)) + "' needs 'edge_values'"
                                               : "packing chart takes no 'edge_values'");
    }
    return m;
}

MeshFile parse_mesh(const std::string& text)
{
    std::istringstream in(text);
    return parse_mesh(in);
}

MeshFile read_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return parse_mesh(in);
}

std::string serialize(const MeshFile& m)
{
    std::ostringstream out;
    out << "pfmesh " << m.version << '\n';
    out << "dimension " << m.dimension << '\n';
    out << "vertices " << m.vertices.size() << '\n';
    for (auto v : m.vertices) out << v << '\n';
    out << "simplices " << m.simplices.size() << '\n';
    for (const auto& s : m.simplices) {
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
        out << '\n';
    }
    if (m.chart) out << "chart " << to_string(*m.chart) << '\n';
    auto edge_block = [&](const char* name, const std::vector<MeshFile::EdgeValue>& values, bool always) {
        if (values.empty() && !always) return;
        out << name << ' ' << values.size() << '\n';
        for (const auto& e : values) out << e.a << ' ' << e.b << ' ' << format(e.value) << '\n';
    };
    auto vertex_block = [&](const char* name, const std::vector<MeshFile::VertexValue>& values, bool always) {
        if (values.empty() && !always) return;
        out << name << ' ' << values.size() << '\n';
        for (const auto& v : values) out << v.v << ' ' << format(v.value) << '\n';
    };
    edge_block("edge_values", m.edge_values, m.chart && *m.chart != ChartKind::Packing);
    vertex_block("f", m.f, m.chart.has_value());
    edge_block("metric", m.metric, !m.chart.has_value());
    vertex_block("target", m.target, false);
    return out.str();
}

void write_mesh(const std::filesystem::path& path, const MeshFile& mesh)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << serialize(mesh);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

ConformalChart file_chart(const MeshFile& file, const SimplicialComplex& cx)
{
    if (!file.chart) throw std::invalid_argument("mesh has no chart block");
    std::vector<double> data(static_cast<std::size_t>(cx.num_edges()));
    for (const auto& e : file.edge_values)
        data[static_cast<std::size_t>(cx.edge_id(cx.vertex_index(e.a), cx.vertex_index(e.b)))] = e.value;
    switch (*file.chart) {
    case ChartKind::Packing: return ConformalChart::packing(cx);
    case ChartKind::FixedInversive: return ConformalChart::fixed_inversive(cx, std::move(data));
    case ChartKind::PerpBisector: break;
    }
    return ConformalChart::perp_bisector(cx, std::move(data));
}

std::vector<double> file_vertex_values(std::span<const MeshFile::VertexValue> values, const SimplicialComplex& cx)
{
    std::vector<double> out(static_cast<std::size_t>(cx.num_vertices()));
    for (const auto& v : values) out[static_cast<std::size_t>(cx.vertex_index(v.v))] = v.value;
    return out;
}

Mesh load(const MeshFile& file)
{
    Mesh mesh{SimplicialComplex::build(file.dimension, file.simplices), std::nullopt, {}, {}, std::nullopt};
    const auto& cx = mesh.complex;
    if (static_cast<std::size_t>(cx.num_vertices()) != file.vertices.size())
        throw std::invalid_argument("declared vertices that lie in no simplex");
    if (file.chart) {
        mesh.chart = file_chart(file, cx);
        mesh.f = file_vertex_values(file.f, cx);
        mesh.metric = apply(*mesh.chart, cx, mesh.f);
    } else {
        mesh.metric = PreMetric::constant(cx, 0.0);
        for (const auto& e : file.metric) mesh.metric.set(cx, cx.vertex_index(e.a), cx.vertex_index(e.b), e.value);
    }
    if (!file.target.empty()) mesh.target = file_vertex_values(file.target, cx);
    return mesh;
}

MeshFile to_mesh_file(const SimplicialComplex& cx, const ConformalChart& chart, std::span<const double> f)
{
    MeshFile m;
    m.dimension = cx.dimension();
    m.vertices.assign(cx.vertex_labels().begin(), cx.vertex_labels().end());
    m.simplices = cx.top_simplex_labels();
    m.chart = chart.kind();
    if (chart.kind() != ChartKind::Packing)
        for (int e = 0; e < cx.num_edges(); ++e) {
            const auto [a, b] = cx.edge(e);
            m.edge_values.push_back({cx.label(a), cx.label(b), chart.edge_data()[static_cast<std::size_t>(e)]});
        }
    for (int v = 0; v < cx.num_vertices(); ++v) m.f.push_back({cx.label(v), f[static_cast<std::size_t>(v)]});
    return m;
}

MeshFile to_mesh_file(const SimplicialComplex& cx, const PreMetric& d)
{
    MeshFile m;
    m.dimension = cx.dimension();
    m.vertices.assign(cx.vertex_labels().begin(), cx.vertex_labels().end());
    m.simplices = cx.top_simplex_labels();
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [a, b] = cx.edge(e);
        m.metric.push_back({cx.label(a), cx.label(b), d.directed(e, true)});
        m.metric.push_back({cx.label(b), cx.label(a), d.directed(e, false)});
    }
    return m;
}

MeshFile off_to_mesh(std::istream& in)
{
    LineReader reader(in);
    auto t = reader.require("OFF header");
    std::size_t at = 0;
    if (t[0] != "OFF") throw ParseError(reader.line(), "expected 'OFF'");
    if (t.size() == 1) {
        t = reader.require("OFF counts");
    } else {
        at = 1;
    }
    if (t.size() < at + 2) throw ParseError(reader.line(), "expected vertex and face counts");
    const auto nv = parse_number<long long>(t[at], reader.line(), "vertex count");
    const auto nf = parse_number<long long>(t[at + 1], reader.line(), "face count");
    if (nv <= 0 || nf <= 0) throw ParseError(reader.line(), "OFF counts must be positive");

    std::vector<std::array<double, 3>> xyz;
    for (long long i = 0; i < nv; ++i) {
        const auto v = reader.require("OFF vertex");
        if (v.size() < 3) throw ParseError(reader.line(), "OFF vertex needs three coordinates");
        xyz.push_back({parse_number<double>(v[0], reader.line(), "coordinate"),
                       parse_number<double>(v[1], reader.line(), "coordinate"),
                       parse_number<double>(v[2], reader.line(), "coordinate")});
    }
    MeshFile m;
    m.dimension = 2;
    for (long long i = 0; i < nv; ++i) m.vertices.push_back(i);
    for (long long i = 0; i < nf; ++i) {
        const auto face = reader.require("OFF face");
        if (face.size() < 4 || face[0] != "3") throw ParseError(reader.line(), "only triangular OFF faces are supported");
        std::vector<VertexLabel> s;
        for (int k = 1; k <= 3; ++k) {
            const auto v = parse_number<VertexLabel>(face[static_cast<std::size_t>(k)], reader.line(), "vertex index");
            if (v < 0 || v >= nv) throw ParseError(reader.line(), "vertex index out of range");
            s.push_back(v);
        }
        m.simplices.push_back(std::move(s));
    }

    const auto cx = SimplicialComplex::build(2, m.simplices);
    std::vector<double> lengths(static_cast<std::size_t>(cx.num_edges()));
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [a, b] = cx.edge(e);
        const auto& p = xyz[static_cast<std::size_t>(cx.label(a))];
        const auto& q = xyz[static_cast<std::size_t>(cx.label(b))];
        lengths[static_cast<std::size_t>(e)] = std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
    }
    const auto chart = ConformalChart::perp_bisector(cx, lengths);
    return to_mesh_file(cx, chart, std::vector<double>(static_cast<std::size_t>(cx.num_vertices()), 0.0));
}

} // namespace pflat

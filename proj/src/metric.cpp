#include "pflat/metric.hpp"

#include "pflat/errors.hpp"
#include "pflat/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace pflat {

namespace {

constexpr double kResidualTolerance = 1e-10;

TriangleMetric sub_triangle(const TetMetric& m, int a, int b, int c)
{
    const std::array<int, 3> v{a, b, c};
    TriangleMetric t;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t s = 0; s < 3; ++s)
            if (r != s) t.d[r][s] = m(v[r], v[s]);
    return t;
}

std::array<int, 2> others(int i, int j)
{
    std::array<int, 2> o{};
    int n = 0;
    for (int r = 0; r < 4; ++r)
        if (r != i && r != j) o[static_cast<std::size_t>(n++)] = r;
    return o;
}

int local_index(std::span<const int> simplex, int v)
{
    for (std::size_t m = 0; m < simplex.size(); ++m)
        if (simplex[m] == v) return static_cast<int>(m);
    throw UnknownSimplex("vertex " + std::to_string(v) + " is not in the simplex");
}

template <int N>
LocalMetric<N> local_metric(const SimplicialComplex& cx, const PreMetric& d, std::span<const int> v)
{
    LocalMetric<N> m;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            if (a != b)
                m.d[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                    d(cx, v[static_cast<std::size_t>(a)], v[static_cast<std::size_t>(b)]);
    return m;
}

void require_dimension(const SimplicialComplex& cx, int dim, const char* what)
{
    if (cx.dimension() != dim)
        throw std::invalid_argument(std::string(what) + " requires a " + std::to_string(dim) +
                                    "-dimensional complex");
}

} // namespace

PreMetric::PreMetric(std::vector<double> directed) : d_(std::move(directed))
{
    if (d_.size() % 2 != 0) throw std::invalid_argument("PreMetric: odd number of directed values");
}

PreMetric PreMetric::constant(const SimplicialComplex& cx, double value)
{
    return PreMetric(std::vector<double>(2 * static_cast<std::size_t>(cx.num_edges()), value));
}

double PreMetric::operator()(const SimplicialComplex& cx, int from, int to) const
{
    return directed(cx.edge_id(from, to), from < to);
}

void PreMetric::set(const SimplicialComplex& cx, int from, int to, double value)
{
    directed(cx.edge_id(from, to), from < to) = value;
}

std::vector<double> PreMetric::lengths() const
{
    std::vector<double> out(static_cast<std::size_t>(num_edges()));
    for (int e = 0; e < num_edges(); ++e) out[static_cast<std::size_t>(e)] = length(e);
    return out;
}

TriangleMetric local_triangle(const SimplicialComplex& cx, const PreMetric& d, int t)
{
    return local_metric<3>(cx, d, cx.simplex(2, t));
}

TetMetric local_tetrahedron(const SimplicialComplex& cx, const PreMetric& d, int t)
{
    return local_metric<4>(cx, d, cx.simplex(3, t));
}

double metric_residual(const TriangleMetric& m)
{
    auto sq = [](double x) { return x * x; };
    return sq(m(0, 1)) + sq(m(1, 2)) + sq(m(2, 0)) - sq(m(1, 0)) - sq(m(0, 2)) - sq(m(2, 1));
}

double height_2d(const TriangleMetric& m, int i, int j, int k)
{
    const double gamma = face_angle(m.length(i, j), m.length(i, k), m.length(j, k));
    return (m(i, k) - m(i, j) * std::cos(gamma)) / std::sin(gamma);
}

double height_3d(const TetMetric& m, int i, int j, int k, int l)
{
    const double h_ijl = height_2d(sub_triangle(m, i, j, l), 0, 1, 2);
    const double h_ijk = height_2d(sub_triangle(m, i, j, k), 0, 1, 2);
    const double beta = dihedral_angle(m.lengths(), i, j);
    return (h_ijl - h_ijk * std::cos(beta)) / std::sin(beta);
}

double dual_area(const TetMetric& m, int i, int j)
{
    const auto [k, l] = others(i, j);
    const double h_ijk = height_2d(sub_triangle(m, i, j, k), 0, 1, 2);
    const double h_ijl = height_2d(sub_triangle(m, i, j, l), 0, 1, 2);
    return 0.5 * (h_ijk * height_3d(m, i, j, k, l) + h_ijl * height_3d(m, i, j, l, k));
}

MetricReport check_metric(const SimplicialComplex& cx, const PreMetric& d)
{
    MetricReport r;
    if (d.num_edges() != cx.num_edges())
        throw std::invalid_argument("pre-metric has " + std::to_string(d.num_edges()) +
                                    " edges, complex has " + std::to_string(cx.num_edges()));

    r.all_directed_positive = true;
    for (int e = 0; e < cx.num_edges(); ++e) {
        if (!(d.length(e) > 0)) r.nonpositive_edges.push_back(e);
        if (!(d.directed(e, true) > 0 && d.directed(e, false) > 0)) r.all_directed_positive = false;
    }

    r.triangle_residuals.resize(static_cast<std::size_t>(cx.num_triangles()));
    for (int t = 0; t < cx.num_triangles(); ++t) {
        const auto m = local_triangle(cx, d, t);
        const double mean = (m.length(0, 1) + m.length(0, 2) + m.length(1, 2)) / 3.0;
        const double res = metric_residual(m);
        r.triangle_residuals[static_cast<std::size_t>(t)] = res;
        if (!(std::abs(res) <= kResidualTolerance * mean * mean)) r.residual_violations.push_back(t);
    }

    const auto lengths = d.lengths();
    for (int t = 0; t < cx.num_top(); ++t) {
        bool good = true;
        const auto edges = cx.top_edges(t);
        try {
            if (cx.dimension() == 2) {
                const double lex[3] = {lengths[static_cast<std::size_t>(edges[0])],
                                       lengths[static_cast<std::size_t>(edges[1])],
                                       lengths[static_cast<std::size_t>(edges[2])]};
                cm_volume(lex, 2);
            } else {
                std::array<double, 6> lex{};
                for (std::size_t m = 0; m < 6; ++m) lex[m] = lengths[static_cast<std::size_t>(edges[m])];
                const TetLengths tl(lex);
                for (int skip = 0; skip < 4; ++skip) {
                    std::array<int, 3> f{};
                    int n = 0;
                    for (int a = 0; a < 4; ++a)
                        if (a != skip) f[static_cast<std::size_t>(n++)] = a;
                    const double face[3] = {tl(f[0], f[1]), tl(f[0], f[2]), tl(f[1], f[2])};
                    cm_volume(face, 2);
                }
                cm_volume(lex, 3);
            }
        } catch (const Degenerate&) {
            good = false;
        }
        if (!good) r.degenerate_simplices.push_back(t);
    }

    r.ok = r.nonpositive_edges.empty() && r.residual_violations.empty() && r.degenerate_simplices.empty();
    if (r.ok) {
        try {
            r.all_dual_lengths_positive = true;
            const double tol = dual_length_tolerance(cx, lengths);
            for (double x : dual_lengths(cx, d))
                if (!(x > tol)) r.all_dual_lengths_positive = false;
        } catch (const Degenerate&) {
            r.all_dual_lengths_positive = false;
        }
    }
    return r;
}

double height_2d(const SimplicialComplex& cx, const PreMetric& d, int triangle, int edge)
{
    const auto tv = cx.simplex(2, triangle);
    const auto [a, b] = cx.edge(edge);
    const int i = local_index(tv, a);
    const int j = local_index(tv, b);
    const int k = 3 - i - j;
    return height_2d(local_triangle(cx, d, triangle), i, j, k);
}

double height_3d(const SimplicialComplex& cx, const PreMetric& d, int tetrahedron, int face)
{
    require_dimension(cx, 3, "height_3d");
    const auto tv = cx.simplex(3, tetrahedron);
    const auto fv = cx.simplex(2, face);
    const int i = local_index(tv, fv[0]);
    const int j = local_index(tv, fv[1]);
    const int k = local_index(tv, fv[2]);
    return height_3d(local_tetrahedron(cx, d, tetrahedron), i, j, k, 6 - i - j - k);
}

double dual_area(const SimplicialComplex& cx, const PreMetric& d, int tetrahedron, int edge)
{
    require_dimension(cx, 3, "dual_area");
    const auto tv = cx.simplex(3, tetrahedron);
    const auto [a, b] = cx.edge(edge);
    return dual_area(local_tetrahedron(cx, d, tetrahedron), local_index(tv, a), local_index(tv, b));
}

double dual_length(const SimplicialComplex& cx, const PreMetric& d, int edge)
{
    double sum = 0;
    for (int t : cx.star_span(1, edge))
        sum += cx.dimension() == 2 ? height_2d(cx, d, t, edge) : dual_area(cx, d, t, edge);
    return sum;
}

std::vector<double> dual_lengths(const SimplicialComplex& cx, const PreMetric& d)
{
    const int dim = cx.dimension();
    const std::size_t width = dim == 2 ? 3 : 6;
    std::vector<double> per_top(static_cast<std::size_t>(cx.num_top()) * width);

    parallel_for(cx.num_top(), [&](int t) {
        double* out = per_top.data() + static_cast<std::size_t>(t) * width;
        if (dim == 2) {
            const auto m = local_triangle(cx, d, t);
            out[0] = height_2d(m, 0, 1, 2);
            out[1] = height_2d(m, 0, 2, 1);
            out[2] = height_2d(m, 1, 2, 0);
        } else {
            const auto m = local_tetrahedron(cx, d, t);
            std::size_t n = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b) out[n++] = dual_area(m, a, b);
        }
    });

    std::vector<double> result(static_cast<std::size_t>(cx.num_edges()), 0.0);
    for (int t = 0; t < cx.num_top(); ++t) {
        const auto edges = cx.top_edges(t);
        for (std::size_t m = 0; m < width; ++m)
            result[static_cast<std::size_t>(edges[m])] += per_top[static_cast<std::size_t>(t) * width + m];
    }
    return result;
}

namespace {

// Contributions of one tetrahedron to V_i for each of its local vertices.
std::array<double, 4> tet_vertex_volumes(const TetMetric& m)
{
    const auto l = m.lengths();
    std::array<double, 4> face_area{};
    std::array<double, 4> face_height{};
    for (int opp = 0; opp < 4; ++opp) {
        std::array<int, 3> f{};
        int n = 0;
        for (int a = 0; a < 4; ++a)
            if (a != opp) f[static_cast<std::size_t>(n++)] = a;
        const double lex[3] = {l(f[0], f[1]), l(f[0], f[2]), l(f[1], f[2])};
        face_area[static_cast<std::size_t>(opp)] = cm_volume(lex, 2);
        face_height[static_cast<std::size_t>(opp)] = height_3d(m, f[0], f[1], f[2], opp);
    }
    std::array<double, 4> out{};
    for (int i = 0; i < 4; ++i)
        for (int opp = 0; opp < 4; ++opp)
            if (opp != i)
                out[static_cast<std::size_t>(i)] +=
                    face_height[static_cast<std::size_t>(opp)] * face_area[static_cast<std::size_t>(opp)] / 3.0;
    return out;
}

} // namespace

double dual_length_tolerance(const SimplicialComplex& cx, std::span<const double> lengths)
{
    double mean = 0;
    for (double l : lengths) mean += std::abs(l);
    mean /= static_cast<double>(std::max<std::size_t>(lengths.size(), 1));
    return 1e-12 * std::pow(mean, cx.dimension() - 1);
}

double vertex_volume(const SimplicialComplex& cx, const PreMetric& d, int vertex)
{
    require_dimension(cx, 3, "vertex_volume");
    double sum = 0;
    for (int t : cx.star_span(0, vertex)) {
        const auto v = tet_vertex_volumes(local_tetrahedron(cx, d, t));
        sum += v[static_cast<std::size_t>(local_index(cx.simplex(3, t), vertex))];
    }
    return sum;
}

std::vector<double> vertex_volumes(const SimplicialComplex& cx, const PreMetric& d)
{
    require_dimension(cx, 3, "vertex_volumes");
    std::vector<std::array<double, 4>> per_tet(static_cast<std::size_t>(cx.num_top()));
    parallel_for(cx.num_top(), [&](int t) {
        per_tet[static_cast<std::size_t>(t)] = tet_vertex_volumes(local_tetrahedron(cx, d, t));
    });
    std::vector<double> out(static_cast<std::size_t>(cx.num_vertices()), 0.0);
    for (int t = 0; t < cx.num_top(); ++t) {
        const auto v = cx.simplex(3, t);
        for (std::size_t m = 0; m < 4; ++m)
            out[static_cast<std::size_t>(v[m])] += per_tet[static_cast<std::size_t>(t)][m];
    }
    return out;
}

double edge_volume(const SimplicialComplex& cx, const PreMetric& d, int edge)
{
    return dual_length(cx, d, edge) * d.length(edge) / cx.dimension();
}

} // namespace pflat

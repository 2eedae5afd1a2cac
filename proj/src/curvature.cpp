#include "pflat/curvature.hpp"

#include "pflat/errors.hpp"
#include "pflat/parallel.hpp"
#include "pflat/simplex_geometry.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pflat {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

void require_dimension(const SimplicialComplex& cx, int dim, const char* what)
{
    if (cx.dimension() != dim)
        throw std::invalid_argument(std::string(what) + " requires a " + std::to_string(dim) +
                                    "-dimensional complex");
}

void require_lengths(const SimplicialComplex& cx, std::span<const double> lengths)
{
    if (lengths.size() != static_cast<std::size_t>(cx.num_edges()))
        throw std::invalid_argument("expected one length per edge");
}

TetLengths tet_lengths(const SimplicialComplex& cx, std::span<const double> lengths, int t)
{
    const auto edges = cx.top_edges(t);
    std::array<double, 6> lex{};
    for (std::size_t m = 0; m < 6; ++m) lex[m] = lengths[static_cast<std::size_t>(edges[m])];
    return TetLengths(lex);
}

// Per-tetrahedron quantities in lexicographic local edge order.
template <typename Fn>
std::vector<double> reduce_over_tets(const SimplicialComplex& cx, std::span<const double> lengths, Fn per_edge)
{
    std::vector<std::array<double, 6>> per_tet(static_cast<std::size_t>(cx.num_top()));
    parallel_for(cx.num_top(), [&](int t) {
        const auto l = tet_lengths(cx, lengths, t);
        std::size_t m = 0;
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) per_tet[static_cast<std::size_t>(t)][m++] = per_edge(l, a, b);
    });
    std::vector<double> out(static_cast<std::size_t>(cx.num_edges()), 0.0);
    for (int t = 0; t < cx.num_top(); ++t) {
        const auto edges = cx.top_edges(t);
        for (std::size_t m = 0; m < 6; ++m)
            out[static_cast<std::size_t>(edges[m])] += per_tet[static_cast<std::size_t>(t)][m];
    }
    return out;
}

} // namespace

std::vector<double> curvature_2d(const SimplicialComplex& cx, std::span<const double> lengths)
{
    require_dimension(cx, 2, "curvature_2d");
    require_lengths(cx, lengths);
    std::vector<std::array<double, 3>> angles(static_cast<std::size_t>(cx.num_top()));
    parallel_for(cx.num_top(), [&](int t) {
        const auto edges = cx.top_edges(t);
        const double lex[3] = {lengths[static_cast<std::size_t>(edges[0])],
                               lengths[static_cast<std::size_t>(edges[1])],
                               lengths[static_cast<std::size_t>(edges[2])]};
        const TriangleLengths l(lex);
        for (int i = 0; i < 3; ++i) angles[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)] = face_angle(l, i);
    });
    std::vector<double> k(static_cast<std::size_t>(cx.num_vertices()), kTwoPi);
    for (int t = 0; t < cx.num_top(); ++t) {
        const auto v = cx.simplex(2, t);
        for (std::size_t i = 0; i < 3; ++i) k[static_cast<std::size_t>(v[i])] -= angles[static_cast<std::size_t>(t)][i];
    }
    return k;
}

std::vector<double> dihedral_sums(const SimplicialComplex& cx, std::span<const double> lengths)
{
    require_dimension(cx, 3, "dihedral_sums");
    require_lengths(cx, lengths);
    return reduce_over_tets(cx, lengths, [](const TetLengths& l, int a, int b) { return dihedral_angle(l, a, b); });
}

std::vector<double> edge_curvature_3d(const SimplicialComplex& cx, std::span<const double> lengths)
{
    auto k = dihedral_sums(cx, lengths);
    for (std::size_t e = 0; e < k.size(); ++e) k[e] = (kTwoPi - k[e]) * lengths[e];
    return k;
}

std::vector<double> scalar_curvature_3d(const SimplicialComplex& cx, const PreMetric& d)
{
    const auto lengths = d.lengths();
    const auto sums = dihedral_sums(cx, lengths);
    std::vector<double> k(static_cast<std::size_t>(cx.num_vertices()), 0.0);
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [a, b] = cx.edge(e);
        const double deficit = kTwoPi - sums[static_cast<std::size_t>(e)];
        k[static_cast<std::size_t>(a)] += deficit * d.directed(e, true);
        k[static_cast<std::size_t>(b)] += deficit * d.directed(e, false);
    }
    return k;
}

std::vector<double> vertex_curvature(const SimplicialComplex& cx, const PreMetric& d)
{
    if (cx.dimension() == 2) return curvature_2d(cx, d.lengths());
    return scalar_curvature_3d(cx, d);
}

double ehr(const SimplicialComplex& cx, std::span<const double> lengths)
{
    const auto k = edge_curvature_3d(cx, lengths);
    return std::accumulate(k.begin(), k.end(), 0.0);
}

double total_volume(const SimplicialComplex& cx, std::span<const double> lengths)
{
    require_lengths(cx, lengths);
    const int k = cx.dimension();
    double sum = 0;
    for (int t = 0; t < cx.num_top(); ++t) {
        const auto edges = cx.top_edges(t);
        std::array<double, 6> lex{};
        for (std::size_t m = 0; m < edges.size(); ++m) lex[m] = lengths[static_cast<std::size_t>(edges[m])];
        sum += cm_volume(std::span<const double>(lex.data(), edges.size()), k);
    }
    return sum;
}

double einstein_lambda(const SimplicialComplex& cx, std::span<const double> lengths)
{
    return ehr(cx, lengths) / (3.0 * total_volume(cx, lengths));
}

std::vector<double> volume_length_gradient(const SimplicialComplex& cx, std::span<const double> lengths)
{
    require_dimension(cx, 3, "volume_length_gradient");
    require_lengths(cx, lengths);
    return reduce_over_tets(cx, lengths,
                            [](const TetLengths& l, int a, int b) { return volume_length_derivative(l, a, b); });
}

Residuals residuals(const SimplicialComplex& cx, const PreMetric& d)
{
    require_dimension(cx, 3, "residuals");
    const auto lengths = d.lengths();
    Residuals r;
    r.lambda = einstein_lambda(cx, lengths);
    const auto kij = edge_curvature_3d(cx, lengths);
    const auto dv = volume_length_gradient(cx, lengths);
    r.einstein.resize(kij.size());
    for (std::size_t e = 0; e < kij.size(); ++e) r.einstein[e] = kij[e] - r.lambda * lengths[e] * dv[e];
    const auto ki = scalar_curvature_3d(cx, d);
    const auto vi = vertex_volumes(cx, d);
    r.constant_scalar.resize(ki.size());
    for (std::size_t v = 0; v < ki.size(); ++v) r.constant_scalar[v] = ki[v] - r.lambda * vi[v];
    return r;
}

CurvatureReport curvature_report(const SimplicialComplex& cx, const PreMetric& d)
{
    CurvatureReport rep;
    rep.dimension = cx.dimension();
    const auto lengths = d.lengths();
    rep.vertex_curvature = vertex_curvature(cx, d);
    rep.curvature_sum = std::accumulate(rep.vertex_curvature.begin(), rep.vertex_curvature.end(), 0.0);
    rep.total_volume = total_volume(cx, lengths);
    if (cx.dimension() == 2) {
        rep.gauss_bonnet_defect = rep.curvature_sum - kTwoPi * cx.euler_characteristic();
        return rep;
    }
    rep.edge_curvature = edge_curvature_3d(cx, lengths);
    rep.ehr = std::accumulate(rep.edge_curvature.begin(), rep.edge_curvature.end(), 0.0);
    rep.lambda = rep.ehr / (3.0 * rep.total_volume);
    rep.vertex_volumes = vertex_volumes(cx, d);
    const auto res = residuals(cx, d);
    rep.einstein_residuals = res.einstein;
    rep.csc_residuals = res.constant_scalar;
    return rep;
}

} // namespace pflat

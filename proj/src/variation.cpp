#include "pflat/variation.hpp"

#include "pflat/curvature.hpp"
#include "pflat/errors.hpp"
#include "pflat/simplex_geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <stdexcept>

namespace pflat {

namespace {

void require_dimension(const SimplicialComplex& cx, int dim, const char* what)
{
    if (cx.dimension() != dim)
        throw std::invalid_argument(std::string(what) + " requires a " + std::to_string(dim) +
                                    "-dimensional complex");
}

void require_size(std::size_t got, int want, const char* what)
{
    if (got != static_cast<std::size_t>(want))
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) + " values, got " +
                                    std::to_string(got));
}

void check_local(int v, int n)
{
    if (v < 0 || v >= n) throw std::out_of_range("local vertex index out of range");
}

std::vector<SparseOperator::Entry> weighted_laplacian_entries(const SimplicialComplex& cx,
                                                              std::span<const double> weights, double scale)
{
    std::vector<SparseOperator::Entry> entries;
    entries.reserve(static_cast<std::size_t>(cx.num_vertices() + 2 * cx.num_edges()));
    std::vector<double> diag(static_cast<std::size_t>(cx.num_vertices()), 0.0);
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [a, b] = cx.edge(e);
        const double w = scale * weights[static_cast<std::size_t>(e)];
        entries.push_back({a, b, w});
        entries.push_back({b, a, w});
        diag[static_cast<std::size_t>(a)] -= w;
        diag[static_cast<std::size_t>(b)] -= w;
    }
    for (int v = 0; v < cx.num_vertices(); ++v) entries.push_back({v, v, diag[static_cast<std::size_t>(v)]});
    return entries;
}

} // namespace

double angle_gradient_2d(const TriangleMetric& m, int angle_vertex, int varying_vertex)
{
    check_local(angle_vertex, 3);
    check_local(varying_vertex, 3);
    const int a = angle_vertex;
    const int c = varying_vertex;
    if (a != c) {
        const int b = 3 - a - c;
        return height_2d(m, a, c, b) / m.length(a, c);
    }
    const int p = (c + 1) % 3;
    const int r = (c + 2) % 3;
    return -(height_2d(m, p, c, r) / m.length(p, c) + height_2d(m, r, c, p) / m.length(r, c));
}

double dihedral_gradient_3d(const TetMetric& m, int i, int j, int varying_vertex)
{
    check_local(i, 4);
    check_local(j, 4);
    check_local(varying_vertex, 4);
    const int v = varying_vertex;
    if (i == j) throw std::invalid_argument("dihedral_gradient_3d: i == j");
    if (v == i || v == j)
        throw std::invalid_argument("dihedral_gradient_3d: the varying vertex must not lie on the edge");
    const int o = 6 - i - j - v;
    const auto l = m.lengths();
    const double gamma = face_angle(l, i, j, v);
    return height_3d(m, i, j, v, o) / (std::sin(gamma) * l(i, v));
}

std::array<double, 4> dihedral_row_rhs(const TetMetric& m, int varying_vertex)
{
    check_local(varying_vertex, 4);
    std::array<double, 4> rhs{};
    double sum = 0;
    for (int w = 0; w < 4; ++w) {
        if (w == varying_vertex) continue;
        const double value = 2.0 * dual_area(m, w, varying_vertex) / m.length(w, varying_vertex);
        rhs[static_cast<std::size_t>(w)] = value;
        sum += value;
    }
    rhs[static_cast<std::size_t>(varying_vertex)] = -sum;
    return rhs;
}

SparseOperator curvature_jacobian_2d(const SimplicialComplex& cx, const ConformalChart& chart,
                                     std::span<const double> f)
{
    require_dimension(cx, 2, "curvature_jacobian_2d");
    const PreMetric d = apply(chart, cx, f);
    const auto star = dual_lengths(cx, d);
    std::vector<double> w(star.size());
    for (int e = 0; e < cx.num_edges(); ++e)
        w[static_cast<std::size_t>(e)] = star[static_cast<std::size_t>(e)] / d.length(e);
    return SparseOperator(cx.num_vertices(), weighted_laplacian_entries(cx, w, -1.0));
}

SparseOperator curvature_jacobian_3d(const SimplicialComplex& cx, const ConformalChart& chart,
                                     std::span<const double> f)
{
    require_dimension(cx, 3, "curvature_jacobian_3d");
    const PreMetric d = apply(chart, cx, f);
    const auto lengths = d.lengths();
    const auto star = dual_lengths(cx, d);
    const auto k_edge = edge_curvature_3d(cx, lengths);
    const auto k_vertex = scalar_curvature_3d(cx, d);
    const auto qs = q_values(chart, cx, f);
    std::vector<double> w(lengths.size());
    for (std::size_t e = 0; e < w.size(); ++e) w[e] = (2.0 * star[e] - qs[e] * k_edge[e]) / lengths[e];
    auto entries = weighted_laplacian_entries(cx, w, -1.0);
    for (int v = 0; v < cx.num_vertices(); ++v) entries.push_back({v, v, k_vertex[static_cast<std::size_t>(v)]});
    return SparseOperator(cx.num_vertices(), std::move(entries));
}

SparseOperator curvature_jacobian(const SimplicialComplex& cx, const ConformalChart& chart,
                                  std::span<const double> f)
{
    return cx.dimension() == 2 ? curvature_jacobian_2d(cx, chart, f) : curvature_jacobian_3d(cx, chart, f);
}

SparseOperator laplacian(const SimplicialComplex& cx, const PreMetric& d)
{
    require_size(static_cast<std::size_t>(d.num_edges()), cx.num_edges(), "laplacian");
    const auto star = dual_lengths(cx, d);
    std::vector<double> w(star.size());
    for (int e = 0; e < cx.num_edges(); ++e) {
        if (!(d.length(e) > 0)) throw Degenerate("non-positive edge length on edge " + std::to_string(e));
        w[static_cast<std::size_t>(e)] = star[static_cast<std::size_t>(e)] / d.length(e);
    }
    return SparseOperator(cx.num_vertices(), weighted_laplacian_entries(cx, w, 1.0));
}

double laplacian_weak_form(const SimplicialComplex& cx, const PreMetric& d, std::span<const double> phi,
                           std::span<const double> psi)
{
    require_size(phi.size(), cx.num_vertices(), "laplacian_weak_form");
    require_size(psi.size(), cx.num_vertices(), "laplacian_weak_form");
    double sum = 0;
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [a, b] = cx.edge(e);
        const auto ua = static_cast<std::size_t>(a);
        const auto ub = static_cast<std::size_t>(b);
        const double l = d.length(e);
        sum += (phi[ua] - phi[ub]) / l * (psi[ua] - psi[ub]) / l * edge_volume(cx, d, e);
    }
    // Each unordered edge stands for two ordered pairs.
    return -0.5 * cx.dimension() * 2.0 * sum;
}

double EhrHessian::evaluate(std::span<const double> fdot, std::span<const double> fddot) const
{
    require_size(fdot.size(), static_cast<int>(vertex_coefficients.size()), "EhrHessian::evaluate");
    if (!fddot.empty()) require_size(fddot.size(), static_cast<int>(vertex_coefficients.size()), "EhrHessian::evaluate");
    double sum = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double diff = fdot[static_cast<std::size_t>(edges[e][1])] - fdot[static_cast<std::size_t>(edges[e][0])];
        sum += 2.0 * edge_coefficients[e] * diff * diff;
    }
    for (std::size_t v = 0; v < vertex_coefficients.size(); ++v)
        sum += vertex_coefficients[v] * (fdot[v] * fdot[v] + (fddot.empty() ? 0.0 : fddot[v]));
    return sum;
}

SparseOperator EhrHessian::as_operator() const
{
    const int n = static_cast<int>(vertex_coefficients.size());
    std::vector<SparseOperator::Entry> entries;
    std::vector<double> diag(vertex_coefficients);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        const double w = 2.0 * edge_coefficients[e];
        entries.push_back({a, b, -w});
        entries.push_back({b, a, -w});
        diag[static_cast<std::size_t>(a)] += w;
        diag[static_cast<std::size_t>(b)] += w;
    }
    for (int v = 0; v < n; ++v) entries.push_back({v, v, diag[static_cast<std::size_t>(v)]});
    return SparseOperator(n, std::move(entries));
}

EhrHessian ehr_hessian(const SimplicialComplex& cx, const ConformalChart& chart, std::span<const double> f)
{
    require_dimension(cx, 3, "ehr_hessian");
    const PreMetric d = apply(chart, cx, f);
    const auto lengths = d.lengths();
    const auto star = dual_lengths(cx, d);
    const auto k_edge = edge_curvature_3d(cx, lengths);
    const auto qs = q_values(chart, cx, f);

    EhrHessian h;
    h.edges.reserve(lengths.size());
    h.edge_coefficients.resize(lengths.size());
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto u = static_cast<std::size_t>(e);
        h.edges.push_back(cx.edge(e));
        h.edge_coefficients[u] = star[u] / lengths[u] - qs[u] * k_edge[u] / (2.0 * lengths[u]);
    }
    h.vertex_coefficients = scalar_curvature_3d(cx, d);
    return h;
}

double functional_F(const SimplicialComplex& cx, const ConformalChart& chart, std::span<const double> f_start,
                    std::span<const double> f_end, std::span<const std::vector<double>> waypoints)
{
    require_dimension(cx, 2, "functional_F");
    const int n = cx.num_vertices();
    require_size(f_start.size(), n, "functional_F");
    require_size(f_end.size(), n, "functional_F");

    std::vector<std::vector<double>> nodes;
    nodes.emplace_back(f_start.begin(), f_start.end());
    for (const auto& w : waypoints) {
        require_size(w.size(), n, "functional_F waypoint");
        nodes.push_back(w);
    }
    nodes.emplace_back(f_end.begin(), f_end.end());

    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0;
    std::vector<double> f(static_cast<std::size_t>(n));
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        const auto& a = nodes[s];
        const auto& b = nodes[s + 1];
        bool moves = false;
        for (std::size_t i = 0; i < a.size(); ++i) moves = moves || a[i] != b[i];
        if (!moves) continue;
        auto integrand = [&](double t) {
            for (std::size_t i = 0; i < f.size(); ++i) f[i] = a[i] + t * (b[i] - a[i]);
            const auto k = curvature_2d(cx, apply(chart, cx, f).lengths());
            double dot = 0;
            for (std::size_t i = 0; i < f.size(); ++i) dot += k[i] * (b[i] - a[i]);
            return dot;
        };
        // Probe both endpoints so a segment leaving the domain at its end is caught.
        integrand(0.0);
        integrand(1.0);
        total += Quadrature::integrate(integrand, 0.0, 1.0, 15, 1e-14);
    }
    return total;
}

} // namespace pflat

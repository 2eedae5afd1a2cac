#include "support.hpp"

#include "pflat/simplex_geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pflat::testing {

namespace {

using Labels = std::vector<std::vector<VertexLabel>>;

int wrap(int x, int n)
{
    return ((x % n) + n) % n;
}

// Smallest lattice step (entries in {-1, 0, 1}) from a to b on the n-torus.
template <int D>
std::array<int, D> lattice_step(const std::array<int, D>& a, const std::array<int, D>& b, int n)
{
    std::array<int, D> step{};
    for (std::size_t c = 0; c < D; ++c) {
        const int diff = wrap(b[c] - a[c], n);
        step[c] = diff == n - 1 ? -1 : diff;
        if (step[c] > 1) throw std::logic_error("not a lattice neighbour");
    }
    return step;
}

Labels torus_triangles(int n, VertexLabel offset)
{
    Labels t;
    auto id = [&](int i, int j) { return offset + wrap(i, n) * n + wrap(j, n); };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            t.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
            t.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return t;
}

} // namespace

SimplicialComplex sphere_tet()
{
    const Labels t{{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}};
    return SimplicialComplex::build(2, t);
}

std::vector<Point> icosahedron_coordinates()
{
    const double g = (1 + std::sqrt(5.0)) / 2;
    return {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
            {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
}

SimplicialComplex icosahedron()
{
    const Labels t{{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                   {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                   {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    return SimplicialComplex::build(2, t);
}

LengthFixture flat_torus(int n)
{
    const Eigen::Vector2d a(1.0, 0.0);
    const Eigen::Vector2d b(0.4, 0.95);
    auto cx = SimplicialComplex::build(2, torus_triangles(n, 0));
    std::vector<double> lengths(static_cast<std::size_t>(cx.num_edges()));
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [u, v] = cx.edge(e);
        const auto lu = static_cast<int>(cx.label(u));
        const auto lv = static_cast<int>(cx.label(v));
        const auto s = lattice_step<2>({lu / n, lu % n}, {lv / n, lv % n}, n);
        lengths[static_cast<std::size_t>(e)] = (s[0] * a + s[1] * b).norm();
    }
    return {std::move(cx), std::move(lengths)};
}

SimplicialComplex genus2()
{
    // Remove the triangle {0, 3, 1} from two 3x3 tori and glue along its boundary.
    Labels first = torus_triangles(3, 0);
    Labels second = torus_triangles(3, 100);
    first.erase(first.begin());
    second.erase(second.begin());
    for (auto& t : second)
        for (auto& v : t)
            if (v == 100 || v == 101 || v == 103) v -= 100;
    first.insert(first.end(), second.begin(), second.end());
    return SimplicialComplex::build(2, first);
}

SimplicialComplex s3_boundary()
{
    Labels t;
    for (VertexLabel skip = 1; skip <= 5; ++skip) {
        std::vector<VertexLabel> s;
        for (VertexLabel v = 1; v <= 5; ++v)
            if (v != skip) s.push_back(v);
        t.push_back(s);
    }
    return SimplicialComplex::build(3, t);
}

SimplicialComplex cell16()
{
    // +e_i has label i + 1, -e_i has label i + 5.
    Labels t;
    for (int signs = 0; signs < 16; ++signs) {
        std::vector<VertexLabel> s;
        for (int i = 0; i < 4; ++i) s.push_back(((signs >> i) & 1) ? i + 5 : i + 1);
        t.push_back(s);
    }
    return SimplicialComplex::build(3, t);
}

LengthFixture flat_3torus(int n)
{
    auto id = [&](int i, int j, int k) -> VertexLabel { return (wrap(i, n) * n + wrap(j, n)) * n + wrap(k, n); };
    const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    Labels t;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (const auto& p : perms) {
                    std::array<int, 3> x{i, j, k};
                    std::vector<VertexLabel> s{id(x[0], x[1], x[2])};
                    for (int m = 0; m < 3; ++m) {
                        ++x[static_cast<std::size_t>(p[m])];
                        s.push_back(id(x[0], x[1], x[2]));
                    }
                    t.push_back(s);
                }
    auto cx = SimplicialComplex::build(3, t);
    std::vector<double> lengths(static_cast<std::size_t>(cx.num_edges()));
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [u, v] = cx.edge(e);
        auto coords = [&](VertexLabel l) {
            const int li = static_cast<int>(l);
            return std::array<int, 3>{li / (n * n), (li / n) % n, li % n};
        };
        const auto s = lattice_step<3>(coords(cx.label(u)), coords(cx.label(v)), n);
        lengths[static_cast<std::size_t>(e)] = std::sqrt(double(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]));
    }
    return {std::move(cx), std::move(lengths)};
}

LengthFixture non_delaunay_sphere()
{
    auto cx = sphere_tet();
    std::vector<double> lengths(static_cast<std::size_t>(cx.num_edges()), 1.0);
    lengths[static_cast<std::size_t>(cx.edge_id(cx.vertex_index(1), cx.vertex_index(2)))] = 1.9;
    return {std::move(cx), std::move(lengths)};
}

LengthFixture sliver_s3(double eps, double width)
{
    auto cx = s3_boundary();
    Eigen::Vector4d p[5];
    for (auto& x : p) x.setZero();
    p[0](0) = 1;
    p[1](0) = -1;
    p[2] << 0, width, eps, 0;
    p[3] << 0, -width, eps, 0;
    p[4] << 0, 0, 0.2, 1;
    std::vector<double> lengths(static_cast<std::size_t>(cx.num_edges()));
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [a, b] = cx.edge(e);
        lengths[static_cast<std::size_t>(e)] = (p[a] - p[b]).norm();
    }
    return {std::move(cx), std::move(lengths)};
}

std::vector<double> lengths_from_points(const SimplicialComplex& cx, const std::vector<Point>& points)
{
    std::vector<double> lengths(static_cast<std::size_t>(cx.num_edges()));
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [u, v] = cx.edge(e);
        lengths[static_cast<std::size_t>(e)] =
            (points[static_cast<std::size_t>(cx.label(u))] - points[static_cast<std::size_t>(cx.label(v))]).norm();
    }
    return lengths;
}

ConformalChart random_chart(const SimplicialComplex& cx, ChartKind kind, std::mt19937_64& rng)
{
    const auto edges = static_cast<std::size_t>(cx.num_edges());
    switch (kind) {
    case ChartKind::Packing: return ConformalChart::packing(cx);
    case ChartKind::FixedInversive: {
        std::uniform_real_distribution<double> eta(cx.dimension() == 2 ? 0.0 : 0.8, 1.6);
        std::vector<double> values(edges);
        for (double& x : values) x = eta(rng);
        return ConformalChart::fixed_inversive(cx, std::move(values));
    }
    case ChartKind::PerpBisector: {
        std::uniform_real_distribution<double> radius(0.6, 1.4);
        std::vector<double> r(static_cast<std::size_t>(cx.num_vertices()));
        for (double& x : r) x = radius(rng);
        std::vector<double> values(edges);
        for (int e = 0; e < cx.num_edges(); ++e) {
            const auto [a, b] = cx.edge(e);
            values[static_cast<std::size_t>(e)] = r[static_cast<std::size_t>(a)] + r[static_cast<std::size_t>(b)];
        }
        return ConformalChart::perp_bisector(cx, std::move(values));
    }
    }
    throw std::logic_error("unknown chart kind");
}

std::vector<double> random_f(const SimplicialComplex& cx, const ConformalChart& chart, std::mt19937_64& rng,
                             double amplitude, std::span<const double> center)
{
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<double> f(static_cast<std::size_t>(cx.num_vertices()));
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = (center.empty() ? 0.0 : center[i]) + amplitude * unit(rng);
        if (domain_check(chart, cx, f).ok) return f;
        if (attempt % 20 == 19) amplitude *= 0.5;
    }
    throw std::runtime_error("random_f: no in-domain sample");
}

std::vector<Instance> random_instances(int dimension, std::mt19937_64& rng)
{
    std::vector<std::pair<std::string, SimplicialComplex>> complexes;
    if (dimension == 2) {
        complexes = {{"sphere_tet", sphere_tet()},
                     {"icosahedron", icosahedron()},
                     {"torus", flat_torus(4).cx},
                     {"genus2", genus2()}};
    } else {
        complexes = {{"s3_boundary", s3_boundary()}, {"cell16", cell16()}, {"flat_3torus", flat_3torus(3).cx}};
    }
    std::vector<Instance> out;
    for (const auto& [name, cx] : complexes)
        for (ChartKind kind : kAllCharts) {
            for (int attempt = 0;; ++attempt) {
                auto chart = random_chart(cx, kind, rng);
                try {
                    auto f = random_f(cx, chart, rng, 0.3);
                    out.push_back({name + "/" + std::string(to_string(kind)), cx, std::move(chart), std::move(f)});
                    break;
                } catch (const std::runtime_error&) {
                    if (attempt > 20) throw;
                }
            }
        }
    return out;
}

std::vector<Point> embed(std::span<const double> lex_lengths, int k)
{
    const Eigen::MatrixXd x = embed_simplex(lex_lengths, k);
    std::vector<Point> out;
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        Point p = Point::Zero();
        for (Eigen::Index c = 0; c < x.cols(); ++c) p(c) = x(r, c);
        out.push_back(p);
    }
    return out;
}

double angle_at(const Point& apex, const Point& a, const Point& b)
{
    const Point u = a - apex;
    const Point v = b - apex;
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

double dihedral_at(const Point& p, const Point& q, const Point& r, const Point& s)
{
    const Point axis = (q - p).normalized();
    Point u = r - p;
    Point w = s - p;
    u -= u.dot(axis) * axis;
    w -= w.dot(axis) * axis;
    return std::atan2(u.cross(w).norm(), u.dot(w));
}

Point center_from(const std::vector<Point>& v, std::span<const double> d_from_0)
{
    // c = v0 + sum_j a_j (v_j - v0) with (c - v0) . (v_j - v0) = d_0j |v_j - v0|.
    const int k = static_cast<int>(v.size()) - 1;
    Eigen::MatrixXd gram(k, k);
    Eigen::VectorXd rhs(k);
    for (int i = 1; i <= k; ++i) {
        const Point ei = v[static_cast<std::size_t>(i)] - v[0];
        for (int j = 1; j <= k; ++j) gram(i - 1, j - 1) = ei.dot(v[static_cast<std::size_t>(j)] - v[0]);
        rhs(i - 1) = d_from_0[static_cast<std::size_t>(i - 1)] * ei.norm();
    }
    const Eigen::VectorXd a = gram.fullPivLu().solve(rhs);
    Point c = v[0];
    for (int j = 1; j <= k; ++j) c += a(j - 1) * (v[static_cast<std::size_t>(j)] - v[0]);
    return c;
}

double signed_distance(const Point& x, const std::vector<Point>& face, const Point& toward)
{
    std::vector<Point> basis;
    for (std::size_t i = 1; i < face.size(); ++i) {
        Point b = face[i] - face[0];
        for (const auto& e : basis) b -= b.dot(e) * e;
        basis.push_back(b.normalized());
    }
    Point n = toward - face[0];
    for (const auto& e : basis) n -= n.dot(e) * e;
    return (x - face[0]).dot(n.normalized());
}

double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw std::invalid_argument("max_abs_diff: size mismatch");
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(std::span<const double> a)
{
    double m = 0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

} // namespace pflat::testing

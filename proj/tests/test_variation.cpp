#include "support.hpp"

#include "pflat/conformal.hpp"
#include "pflat/curvature.hpp"
#include "pflat/errors.hpp"
#include "pflat/finite_difference.hpp"
#include "pflat/simplex_geometry.hpp"
#include "pflat/variation.hpp"

#include <Eigen/Eigenvalues>
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <random>

using namespace pflat;
using namespace pflat::testing;
using std::numbers::pi;

namespace {

std::vector<double> curvature_of(const Instance& inst, std::span<const double> f)
{
    return vertex_curvature(inst.cx, apply(inst.chart, inst.cx, f));
}

double ehr_of(const Instance& inst, std::span<const double> f)
{
    return ehr(inst.cx, apply(inst.chart, inst.cx, f).lengths());
}

double relative_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Random instances until each chart kind has at least `per_chart` of them.
std::vector<Instance> many_instances(int dimension, int per_chart, std::mt19937_64& rng)
{
    std::vector<Instance> out;
    std::map<ChartKind, int> counts;
    while (counts[ChartKind::Packing] < per_chart || counts[ChartKind::FixedInversive] < per_chart ||
           counts[ChartKind::PerpBisector] < per_chart)
        for (auto& inst : random_instances(dimension, rng)) {
            counts[inst.chart.kind()]++;
            out.push_back(std::move(inst));
        }
    return out;
}

// cot of the angle opposite c in a triangle with sides a, b, c.
double cot_opposite(double a, double b, double c)
{
    const double s = 0.5 * (a + b + c);
    const double area = std::sqrt(s * (s - a) * (s - b) * (s - c));
    return (a * a + b * b - c * c) / (4 * area);
}

TriangleMetric unit_triangle()
{
    TriangleMetric m;
    for (auto& row : m.d) row.fill(0.5);
    return m;
}

TetMetric unit_tet()
{
    TetMetric m;
    for (auto& row : m.d) row.fill(0.5);
    return m;
}

} // namespace

TEST_SUITE("variation")
{
    TEST_CASE("angle gradient examples")
    {
        const auto m = unit_triangle();
        CHECK(angle_gradient_2d(m, 0, 2) == doctest::Approx(1 / (2 * std::sqrt(3.0))).epsilon(1e-12));
        CHECK(angle_gradient_2d(m, 2, 2) == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-12));
        CHECK(angle_gradient_2d(m, 2, 2) == doctest::Approx(-0.5773503).epsilon(1e-7));

        // 3-4-5 with the circumcenter on the hypotenuse 12.
        TriangleMetric r;
        const double l[3][3] = {{0, 4, 3}, {4, 0, 5}, {3, 5, 0}};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) r.d[a][b] = 0.5 * l[a][b];
        CHECK(std::abs(height_2d(r, 1, 2, 0)) < 1e-12);
        CHECK(std::abs(angle_gradient_2d(r, 1, 2)) < 1e-12);
        CHECK(std::abs(angle_gradient_2d(r, 2, 1)) < 1e-12);
    }

    TEST_CASE("angle gradients match finite differences")
    {
        std::mt19937_64 rng(51);
        const auto cx = sphere_tet();
        for (ChartKind kind : kAllCharts)
            for (int trial = 0; trial < 40; ++trial) {
                const auto chart = random_chart(cx, kind, rng);
                const auto f = random_f(cx, chart, rng, 0.4);
                const int t = trial % 4;
                const auto tv = cx.triangle(t);
                const auto m = local_triangle(cx, apply(chart, cx, f), t);
                for (int c = 0; c < 3; ++c) {
                    double row = 0;
                    for (int a = 0; a < 3; ++a) {
                        auto angle = [&](std::span<const double> g) {
                            return face_angle(local_triangle(cx, apply(chart, cx, g), t).lengths(), a);
                        };
                        std::vector<double> dir(4, 0.0);
                        dir[static_cast<std::size_t>(tv[static_cast<std::size_t>(c)])] = 1;
                        const double fd = fd_directional(angle, f, dir);
                        const double an = angle_gradient_2d(m, a, c);
                        CHECK(an == doctest::Approx(fd).epsilon(1e-7).scale(1));
                        row += an;
                    }
                    CHECK(std::abs(row) < 1e-12);
                }
            }
    }

    TEST_CASE("dihedral gradient examples")
    {
        const auto m = unit_tet();
        CHECK(dihedral_gradient_3d(m, 0, 1, 3) == doctest::Approx(1 / std::sqrt(18.0)).epsilon(1e-12));
        CHECK(dihedral_gradient_3d(m, 0, 1, 3) == doctest::Approx(0.2357023).epsilon(1e-7));
        CHECK_THROWS_AS(dihedral_gradient_3d(m, 0, 1, 1), std::invalid_argument);
        const auto rhs = dihedral_row_rhs(m, 3);
        for (int w = 0; w < 3; ++w) CHECK(rhs[static_cast<std::size_t>(w)] == doctest::Approx(0.1178511).epsilon(1e-7));
        CHECK(rhs[3] == doctest::Approx(-3 * 0.1178511).epsilon(1e-7));
    }

    TEST_CASE("dihedral gradients match finite differences")
    {
        std::mt19937_64 rng(52);
        const auto cx = s3_boundary();
        int checked = 0;
        for (ChartKind kind : kAllCharts)
            for (int trial = 0; trial < 100; ++trial) {
                const auto chart = random_chart(cx, kind, rng);
                const auto f = random_f(cx, chart, rng, 0.3);
                const int t = trial % 5;
                const auto tv = cx.tetrahedron(t);
                const auto m = local_tetrahedron(cx, apply(chart, cx, f), t);
                for (int v = 0; v < 4; ++v) {
                    std::vector<double> dir(5, 0.0);
                    dir[static_cast<std::size_t>(tv[static_cast<std::size_t>(v)])] = 1;
                    std::array<double, 4> row{};
                    for (int i = 0; i < 4; ++i)
                        for (int j = i + 1; j < 4; ++j) {
                            auto beta = [&](std::span<const double> g) {
                                return dihedral_angle(local_tetrahedron(cx, apply(chart, cx, g), t).lengths(), i, j);
                            };
                            const double fd = fd_directional(beta, f, dir);
                            if (i != v && j != v) {
                                CHECK(dihedral_gradient_3d(m, i, j, v) == doctest::Approx(fd).epsilon(1e-6).scale(1));
                                CHECK(dihedral_gradient_3d(m, j, i, v) == doctest::Approx(fd).epsilon(1e-6).scale(1));
                                ++checked;
                            }
                            row[static_cast<std::size_t>(i)] += m(i, j) * fd;
                            row[static_cast<std::size_t>(j)] += m(j, i) * fd;
                        }
                    // Per-vertex identities: sum_u d_wu dbeta_wu = rhs_w.
                    const auto rhs = dihedral_row_rhs(m, v);
                    for (std::size_t w = 0; w < 4; ++w) CHECK(row[w] == doctest::Approx(rhs[w]).epsilon(1e-6).scale(1));
                }
            }
        CHECK(checked == 3 * 100 * 4 * 3);
    }

    TEST_CASE("2D curvature Jacobian example")
    {
        const auto cx = sphere_tet();
        const std::vector<double> f(4, std::log(0.5));
        const auto j = curvature_jacobian_2d(cx, ConformalChart::packing(cx), f);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                CHECK(j(a, b) == doctest::Approx(a == b ? std::sqrt(3.0) : -1 / std::sqrt(3.0)).epsilon(1e-12));
        CHECK(max_abs(j.row_sums()) < 1e-14);
    }

    TEST_CASE("2D curvature Jacobians match finite differences")
    {
        std::mt19937_64 rng(53);
        for (const auto& inst : many_instances(2, 100, rng)) {
            CAPTURE(inst.name);
            const auto j = curvature_jacobian_2d(inst.cx, inst.chart, inst.f);
            const auto dense = j.to_dense();
            const auto fd = fd_jacobian([&](std::span<const double> g) { return curvature_of(inst, g); }, inst.f);
            CHECK(relative_gap(dense, fd) < 1e-6);
            CHECK(j.symmetry_defect() < 1e-10 * std::max(1.0, j.max_abs()));
            CHECK(max_abs(j.row_sums()) < 1e-10 * std::max(1.0, j.max_abs()));
        }
    }

    TEST_CASE("flat torus Jacobian is the cotangent Laplacian")
    {
        const auto torus = flat_torus(4);
        const auto& cx = torus.cx;
        const auto chart = ConformalChart::perp_bisector(cx, torus.lengths);
        const std::vector<double> zero(static_cast<std::size_t>(cx.num_vertices()), 0.0);
        const auto j = curvature_jacobian_2d(cx, chart, zero);
        const auto lap = laplacian(cx, apply(chart, cx, zero));
        for (int e = 0; e < cx.num_edges(); ++e) {
            const auto [a, b] = cx.edge(e);
            double cot_sum = 0;
            for (int t : cx.star({1, e})) {
                const auto tv = cx.triangle(t);
                const int c = tv[0] + tv[1] + tv[2] - a - b;
                auto len = [&](int u, int v) { return torus.lengths[static_cast<std::size_t>(cx.edge_id(u, v))]; };
                cot_sum += cot_opposite(len(a, c), len(b, c), len(a, b));
            }
            CHECK(lap(a, b) == doctest::Approx(0.5 * cot_sum).epsilon(1e-10));
            CHECK(j(a, b) == doctest::Approx(-0.5 * cot_sum).epsilon(1e-10));
        }
    }

    TEST_CASE("3D curvature Jacobians match finite differences")
    {
        std::mt19937_64 rng(54);
        for (const auto& inst : many_instances(3, 100, rng)) {
            CAPTURE(inst.name);
            const auto j = curvature_jacobian_3d(inst.cx, inst.chart, inst.f);
            const auto fd = fd_jacobian([&](std::span<const double> g) { return curvature_of(inst, g); }, inst.f);
            CHECK(relative_gap(j.to_dense(), fd) < 1e-6);
            CHECK(j.symmetry_defect() < 1e-10 * std::max(1.0, j.max_abs()));
            // Scaling direction.
            const auto k = curvature_of(inst, inst.f);
            const auto j1 = j.apply(std::vector<double>(inst.f.size(), 1.0));
            CHECK(max_abs_diff(j1, k) < 1e-8 * std::max(1.0, max_abs(k)));
        }
    }

    TEST_CASE("3D Jacobian structure")
    {
        const auto t3 = flat_3torus(3);
        const auto chart = ConformalChart::perp_bisector(t3.cx, t3.lengths);
        const std::vector<double> zero(27, 0.0);
        const auto j = curvature_jacobian_3d(t3.cx, chart, zero).to_dense();
        const auto lap = laplacian(t3.cx, apply(chart, t3.cx, zero)).to_dense();
        CHECK((j + 2 * lap).cwiseAbs().maxCoeff() < 1e-10);

        std::mt19937_64 rng(55);
        const auto cx = s3_boundary();
        const auto packing = ConformalChart::packing(cx);
        const auto f = random_f(cx, packing, rng, 0.3);
        const auto d = apply(packing, cx, f);
        Eigen::MatrixXd expected = -2 * laplacian(cx, d).to_dense();
        const auto k = vertex_curvature(cx, d);
        for (int i = 0; i < 5; ++i) expected(i, i) += k[static_cast<std::size_t>(i)];
        CHECK((curvature_jacobian_3d(cx, packing, f).to_dense() - expected).cwiseAbs().maxCoeff() < 1e-10);
    }

    TEST_CASE("perpendicular bisector FD check on the 4-simplex boundary")
    {
        const auto cx = s3_boundary();
        const auto chart = ConformalChart::perp_bisector(cx, std::vector<double>(10, 1.0));
        const Instance inst{"s3/pb", cx, chart, std::vector<double>(5, 0.0)};
        const auto fd = fd_jacobian([&](std::span<const double> g) { return curvature_of(inst, g); }, inst.f);
        CHECK(relative_gap(curvature_jacobian(cx, chart, inst.f).to_dense(), fd) < 1e-6);
    }

    TEST_CASE("Laplacian of the unit tetrahedron boundary")
    {
        const auto cx = sphere_tet();
        const auto lap = laplacian(cx, PreMetric::constant(cx, 0.5));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap.to_dense());
        const auto ev = es.eigenvalues();
        CHECK(std::abs(ev(3)) < 1e-12);
        for (int i = 0; i < 3; ++i) CHECK(ev(i) == doctest::Approx(-4 / std::sqrt(3.0)).epsilon(1e-12));
        CHECK(max_abs(lap.apply(std::vector<double>(4, 2.5))) < 1e-14);
    }

    TEST_CASE("Laplacian weak form")
    {
        std::mt19937_64 rng(56);
        std::normal_distribution<double> n(0, 1);
        for (int dim : {2, 3})
            for (const auto& inst : random_instances(dim, rng)) {
                CAPTURE(inst.name);
                const auto d = apply(inst.chart, inst.cx, inst.f);
                const auto lap = laplacian(inst.cx, d);
                CHECK(lap.symmetry_defect() < 1e-12 * lap.max_abs());
                CHECK(max_abs(lap.row_sums()) < 1e-12 * lap.max_abs());
                for (int pair = 0; pair < 50; ++pair) {
                    std::vector<double> phi(inst.f.size());
                    std::vector<double> psi(inst.f.size());
                    for (double& x : phi) x = n(rng);
                    for (double& x : psi) x = n(rng);
                    const auto lphi = lap.apply(phi);
                    double strong = 0;
                    for (std::size_t i = 0; i < psi.size(); ++i) strong += lphi[i] * psi[i];
                    const double weak = laplacian_weak_form(inst.cx, d, phi, psi);
                    CHECK(strong == doctest::Approx(weak).epsilon(1e-10).scale(1));
                }
            }
    }

    TEST_CASE("EHR gradient and Hessian")
    {
        std::mt19937_64 rng(57);
        std::normal_distribution<double> n(0, 1);
        for (const auto& inst : many_instances(3, 10, rng)) {
            CAPTURE(inst.name);
            auto fn = [&](std::span<const double> g) { return ehr_of(inst, g); };
            // dEHR/df_i = K_i
            const auto grad = fd_gradient(fn, inst.f);
            const auto k = curvature_of(inst, inst.f);
            CHECK(max_abs_diff(grad, k) < 1e-6 * std::max(1.0, max_abs(k)));

            const auto hess = ehr_hessian(inst.cx, inst.chart, inst.f);
            const auto jac = curvature_jacobian_3d(inst.cx, inst.chart, inst.f);
            CHECK((hess.as_operator().to_dense() - jac.to_dense()).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, jac.max_abs()));
            for (int trial = 0; trial < 3; ++trial) {
                std::vector<double> v(inst.f.size());
                for (double& x : v) x = n(rng);
                const double form = hess.evaluate(v);
                const double fd = fd_second_directional(fn, inst.f, v);
                CHECK(form == doctest::Approx(fd).epsilon(1e-5).scale(1));
                // Along a curve with second derivative, the f'' term enters through K.
                std::vector<double> acc(inst.f.size());
                for (double& x : acc) x = n(rng);
                double kacc = 0;
                for (std::size_t i = 0; i < acc.size(); ++i) kacc += k[i] * acc[i];
                CHECK(hess.evaluate(v, acc) == doctest::Approx(form + kacc).epsilon(1e-12).scale(1));
            }
        }
    }

    TEST_CASE("EHR Hessian coefficient forms")
    {
        // Perpendicular bisector: c_ij = l*/l - K_ij / 8.
        const auto cx = s3_boundary();
        const auto chart = ConformalChart::perp_bisector(cx, std::vector<double>(10, 1.0));
        const std::vector<double> zero(5, 0.0);
        const auto hess = ehr_hessian(cx, chart, zero);
        const auto d = apply(chart, cx, zero);
        const auto star = dual_lengths(cx, d);
        const auto kij = edge_curvature_3d(cx, d.lengths());
        for (std::size_t e = 0; e < hess.edges.size(); ++e) {
            const int id = cx.edge_id(hess.edges[e][0], hess.edges[e][1]);
            CHECK(hess.edge_coefficients[e] ==
                  doctest::Approx(star[static_cast<std::size_t>(id)] - kij[static_cast<std::size_t>(id)] / 8).epsilon(1e-12));
        }

        // Flat 3-torus: only l*/l survives.
        const auto t3 = flat_3torus(3);
        const auto pb = ConformalChart::perp_bisector(t3.cx, t3.lengths);
        const auto flat = ehr_hessian(t3.cx, pb, std::vector<double>(27, 0.0));
        const auto dt = apply(pb, t3.cx, std::vector<double>(27, 0.0));
        for (double k : flat.vertex_coefficients) CHECK(std::abs(k) < 1e-10);
        for (std::size_t e = 0; e < flat.edges.size(); ++e) {
            const int id = t3.cx.edge_id(flat.edges[e][0], flat.edges[e][1]);
            CHECK(flat.edge_coefficients[e] ==
                  doctest::Approx(dual_length(t3.cx, dt, id) / dt.length(id)).epsilon(1e-10).scale(1));
        }
    }

    TEST_CASE("finite difference oracle")
    {
        const auto cx = sphere_tet();
        const auto chart = ConformalChart::packing(cx);
        const std::vector<double> f(4, std::log(0.5));
        const int e = cx.edge_id(0, 1);
        const auto grad = fd_gradient([&](std::span<const double> g) { return apply(chart, cx, g).length(e); }, f);
        CHECK(grad[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(grad[1] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(std::abs(grad[2]) < 1e-12);
        CHECK(std::abs(grad[3]) < 1e-12);

        const std::vector<double> x{0.3, -1.2};
        CHECK(default_fd_step(x) == doctest::Approx(1.2e-5));
        auto cubic = [](std::span<const double> p) { return p[0] * p[0] * p[0] + std::sin(p[1]); };
        const auto g = fd_gradient(cubic, x, {0, true});
        CHECK(g[0] == doctest::Approx(3 * 0.09).epsilon(1e-9));
        CHECK(g[1] == doctest::Approx(std::cos(-1.2)).epsilon(1e-9));
        const std::vector<double> v{1, 0};
        CHECK(fd_second_directional(cubic, x, v) == doctest::Approx(1.8).epsilon(1e-6));
    }

    TEST_CASE("Regge variation and volume variation")
    {
        std::mt19937_64 rng(58);
        for (const auto& inst : random_instances(3, rng)) {
            CAPTURE(inst.name);
            const auto d = apply(inst.chart, inst.cx, inst.f);
            const auto l = d.lengths();
            const auto grad = fd_gradient([&](std::span<const double> x) { return ehr(inst.cx, x); }, l);
            const auto sums = dihedral_sums(inst.cx, l);
            for (std::size_t e = 0; e < l.size(); ++e) CHECK(grad[e] == doctest::Approx(2 * pi - sums[e]).epsilon(1e-7).scale(1));

            const auto vgrad = fd_gradient(
                [&](std::span<const double> g) { return total_volume(inst.cx, apply(inst.chart, inst.cx, g).lengths()); },
                inst.f);
            const auto vi = vertex_volumes(inst.cx, d);
            for (std::size_t i = 0; i < vi.size(); ++i) CHECK(vgrad[i] == doctest::Approx(vi[i]).epsilon(1e-7).scale(1));
        }
    }

    TEST_CASE("functional F")
    {
        const auto cx = sphere_tet();
        const auto chart = ConformalChart::packing(cx);
        const std::vector<double> f0{-0.7, -0.6, -0.75, -0.65};
        CHECK(functional_F(cx, chart, f0, f0) == 0.0);

        std::vector<double> f1 = f0;
        for (double& x : f1) x += 0.3;
        CHECK(functional_F(cx, chart, f0, f1) == doctest::Approx(4 * pi * 0.3).epsilon(1e-12));

        const std::vector<double> target{-0.2, -0.9, -0.4, -0.5};
        const std::vector<std::vector<double>> dogleg{{-0.2, -0.6, -0.75, -0.65}, {-0.2, -0.9, -0.75, -0.65}};
        const double straight = functional_F(cx, chart, f0, target);
        const double bent = functional_F(cx, chart, f0, target, dogleg);
        CHECK(std::abs(straight - bent) < 1e-9);

        // dF/df_end = K(f_end)
        const auto grad = fd_gradient([&](std::span<const double> g) { return functional_F(cx, chart, f0, g); }, target);
        const auto k = vertex_curvature(cx, apply(chart, cx, target));
        CHECK(max_abs_diff(grad, k) < 1e-7);

        const auto pb = ConformalChart::perp_bisector(cx, std::vector<double>(6, 1.0));
        CHECK_THROWS_AS(functional_F(cx, pb, std::vector<double>(4, 0.0), std::vector<double>{0, 0, -3, 0}), OutOfDomain);
    }

    TEST_CASE("F is path independent on random instances")
    {
        std::mt19937_64 rng(59);
        for (const auto& inst : random_instances(2, rng)) {
            CAPTURE(inst.name);
            const auto end = random_f(inst.cx, inst.chart, rng, 0.1, inst.f);
            const auto mid = random_f(inst.cx, inst.chart, rng, 0.1, inst.f);
            const std::vector<std::vector<double>> path{mid};
            double a = 0;
            double b = 0;
            try {
                a = functional_F(inst.cx, inst.chart, inst.f, end);
                b = functional_F(inst.cx, inst.chart, inst.f, end, path);
            } catch (const OutOfDomain&) {
                continue;
            }
            CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, max_abs(curvature_of(inst, inst.f))));
        }
    }
}

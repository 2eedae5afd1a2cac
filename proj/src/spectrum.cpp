#include "pflat/spectrum.hpp"

#include "pflat/curvature.hpp"
#include "pflat/errors.hpp"
#include "pflat/simplex_geometry.hpp"
#include "pflat/variation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

namespace pflat {

namespace {

constexpr double kKernelTolerance = 1e-10;
constexpr double kConstantTolerance = 1e-8;
constexpr double kNullspaceTolerance = 1e-8;
constexpr double kCriticalTolerance = 1e-8;

Eigen::MatrixXd symmetric_part(const SparseOperator& op)
{
    const Eigen::MatrixXd a = op.to_dense();
    return 0.5 * (a + a.transpose());
}

// Orthonormal basis of the zero-sum vectors, one per column.
Eigen::MatrixXd zero_sum_basis(int n)
{
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Ones(n, 1));
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    return q.rightCols(n - 1);
}

void remove_mean(Eigen::VectorXd& v)
{
    v.array() -= v.mean();
}

// Dominant eigenvalue of (S - shift I), S = symmetric part of op.
double power_iteration(const Eigen::SparseMatrix<double>& s, double shift, bool constants_removed,
                       const SpectrumOptions& opts)
{
    const auto n = s.rows();
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    if (constants_removed) remove_mean(v);
    v.normalize();
    double rayleigh = 0;
    for (int it = 0; it < opts.max_power_iterations; ++it) {
        Eigen::VectorXd w = s * v - shift * v;
        if (constants_removed) remove_mean(w);
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0) return 0;
        v = w / norm;
        if (it > 0 && std::abs(next - rayleigh) <= opts.power_tolerance * std::max(1.0, std::abs(next))) {
            rayleigh = next;
            break;
        }
        rayleigh = next;
    }
    return rayleigh;
}

bool circumcircle_contains_center(const TriangleMetric& m)
{
    const double l = m.length(0, 1);
    const double gamma = face_angle(m.length(2, 0), m.length(2, 1), l);
    const double radius = l / (2 * std::sin(gamma));
    const double along = m(0, 1) - 0.5 * l;
    const double across = height_2d(m, 0, 1, 2) - radius * std::cos(gamma);
    return along * along + across * across <= radius * radius * (1 + 1e-12);
}

} // namespace

std::vector<double> symmetric_eigenvalues(const SparseOperator& op)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric_part(op), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

ExtremeEigenvalues extreme_eigenvalues(const SparseOperator& op, bool constants_removed, const SpectrumOptions& opts)
{
    ExtremeEigenvalues out;
    const int n = op.size();
    if (n == 0 || (constants_removed && n == 1)) return out;
    if (n < opts.dense_threshold) {
        Eigen::MatrixXd s = symmetric_part(op);
        if (constants_removed) {
            const Eigen::MatrixXd q = zero_sum_basis(n);
            s = q.transpose() * s * q;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
        const Eigen::VectorXd ev = solver.eigenvalues();
        out.all.assign(ev.data(), ev.data() + ev.size());
        out.min = out.all.front();
        out.max = out.all.back();
        return out;
    }
    const Eigen::SparseMatrix<double> a = op.to_sparse();
    const Eigen::SparseMatrix<double> s = 0.5 * (a + Eigen::SparseMatrix<double>(a.transpose()));
    const double first = power_iteration(s, 0.0, constants_removed, opts);
    const double second = power_iteration(s, first, constants_removed, opts) + first;
    out.min = std::min(first, second);
    out.max = std::max(first, second);
    return out;
}

DefinitenessReport definiteness_report(const SimplicialComplex& cx, const ConformalChart& chart,
                                       std::span<const double> f, const SpectrumOptions& opts)
{
    DefinitenessReport r;
    const PreMetric d = apply(chart, cx, f);
    const int dim = cx.dimension();
    const int n = cx.num_vertices();

    r.dual_lengths = dual_lengths(cx, d);
    const double zero_dual = dual_length_tolerance(cx, d.lengths());
    for (int e = 0; e < cx.num_edges(); ++e)
        if (!(r.dual_lengths[static_cast<std::size_t>(e)] > zero_dual)) r.nonpositive_dual_edges.push_back(e);
    r.dual_lengths_positive = r.nonpositive_dual_edges.empty();

    if (dim == 2) {
        if (chart.kind() == ChartKind::FixedInversive) {
            const auto eta = chart.edge_data();
            r.inversive_eta_nonnegative = std::all_of(eta.begin(), eta.end(), [](double x) { return x >= 0; });
        }
        const auto values = d.values();
        r.directed_positive = std::all_of(values.begin(), values.end(), [](double x) { return x > 0; });
        r.perp_bisector = chart.kind() == ChartKind::PerpBisector;
        r.centers_in_circumcircles = true;
        for (int t = 0; t < cx.num_triangles(); ++t)
            if (!circumcircle_contains_center(local_triangle(cx, d, t))) {
                r.centers_in_circumcircles = false;
                break;
            }
    } else {
        r.packing_3d = chart.kind() == ChartKind::Packing;
        const auto lengths = d.lengths();
        const auto k_vertex = scalar_curvature_3d(cx, d);
        const auto k_edge = edge_curvature_3d(cx, lengths);
        const auto qs = q_values(chart, cx, f);
        double mean_length = 0;
        for (double l : lengths) mean_length += l;
        mean_length /= static_cast<double>(lengths.size());
        const bool k_nonnegative = std::all_of(k_vertex.begin(), k_vertex.end(),
                                               [&](double k) { return k >= -1e-10 * mean_length; });
        r.convex_packing = r.packing_3d && k_nonnegative;
        bool edges_ok = true;
        for (std::size_t e = 0; e < lengths.size(); ++e)
            edges_ok = edges_ok && r.dual_lengths[e] - 0.5 * qs[e] * k_edge[e] > zero_dual;
        r.convex_general = edges_ok && k_nonnegative;
    }
    r.any_sufficient_condition = r.dual_lengths_positive || r.inversive_eta_nonnegative || r.directed_positive ||
                                 r.perp_bisector || r.centers_in_circumcircles || r.packing_3d;

    const SparseOperator lap = laplacian(cx, d);
    const auto ones = std::vector<double>(static_cast<std::size_t>(n), 1.0);
    for (double x : lap.apply(ones)) r.constant_residual = std::max(r.constant_residual, std::abs(x));

    const ExtremeEigenvalues nonconstant = extreme_eigenvalues(lap, true, opts);
    r.laplacian_max_nonconstant = nonconstant.max;
    if (n < opts.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric_part(lap));
        const Eigen::VectorXd ev = solver.eigenvalues();
        r.laplacian_eigenvalues.assign(ev.data(), ev.data() + ev.size());
        r.laplacian_min = ev(0);
        r.laplacian_max = ev(n - 1);
        r.laplacian_scale = std::max(std::abs(r.laplacian_min), std::abs(r.laplacian_max));
        const double tol = kKernelTolerance * std::max(r.laplacian_scale, 1e-300);
        int kernel_index = -1;
        for (int i = 0; i < n; ++i)
            if (std::abs(ev(i)) <= tol) {
                ++r.kernel_dimension;
                kernel_index = i;
            }
        if (r.kernel_dimension == 1) {
            const Eigen::VectorXd v = solver.eigenvectors().col(kernel_index).normalized();
            r.kernel_constant_defect = (v.array() - v.mean()).abs().maxCoeff();
        }
        r.nsd_constant_kernel = r.laplacian_max <= tol && r.kernel_dimension == 1 &&
                                r.kernel_constant_defect <= kConstantTolerance;
    } else {
        const ExtremeEigenvalues full = extreme_eigenvalues(lap, false, opts);
        r.laplacian_min = full.min;
        r.laplacian_max = full.max;
        r.laplacian_scale = std::max(std::abs(full.min), std::abs(full.max));
        const double tol = kKernelTolerance * r.laplacian_scale;
        r.kernel_dimension = r.laplacian_max_nonconstant < -tol ? 1 : 2;
        r.nsd_constant_kernel = r.laplacian_max <= tol && r.kernel_dimension == 1 && r.constant_residual <= tol;
    }

    const ExtremeEigenvalues hessian = extreme_eigenvalues(curvature_jacobian(cx, chart, f), true, opts);
    r.hessian_min = hessian.min;
    r.hessian_max = hessian.max;
    return r;
}

RigidityReport rigidity_check(const SimplicialComplex& cx, const ConformalChart& chart, std::span<const double> f,
                              std::span<const double> target)
{
    const int n = cx.num_vertices();
    if (!target.empty() && target.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("rigidity_check: target has the wrong size");
    RigidityReport r;
    const auto k = vertex_curvature(cx, apply(chart, cx, f));
    for (int i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        r.curvature_residual = std::max(r.curvature_residual, std::abs(k[u] - (target.empty() ? 0.0 : target[u])));
    }
    if (!(r.curvature_residual < kCriticalTolerance))
        throw NotCritical("curvature residual " + std::to_string(r.curvature_residual) + " is not below 1e-8");

    const SparseOperator jac = curvature_jacobian(cx, chart, f);
    const Eigen::MatrixXd s = symmetric_part(jac);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    const Eigen::VectorXd ev = solver.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd a = jac.to_dense();
    for (int i = 0; i < n; ++i) {
        if (std::abs(ev(i)) > kNullspaceTolerance * scale) continue;
        const Eigen::VectorXd v = solver.eigenvectors().col(i).normalized();
        r.nullspace_basis.emplace_back(v.data(), v.data() + v.size());
        r.basis_residuals.push_back((a * v).cwiseAbs().maxCoeff());
    }
    r.nullspace_dimension = static_cast<int>(r.nullspace_basis.size());
    if (r.nullspace_dimension == 1) {
        const Eigen::Map<const Eigen::VectorXd> v(r.nullspace_basis[0].data(), n);
        r.constant_defect = (v.array() - v.mean()).abs().maxCoeff();
        r.rigid = r.constant_defect < kConstantTolerance;
    }
    return r;
}

} // namespace pflat

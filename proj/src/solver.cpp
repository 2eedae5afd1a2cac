#include "pflat/solver.hpp"

#include "pflat/curvature.hpp"
#include "pflat/errors.hpp"
#include "pflat/finite_difference.hpp"
#include "pflat/variation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SparseLU>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace pflat {

namespace {

double inf_norm(std::span<const double> x)
{
    double m = 0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

void require_size(std::size_t got, int want, const char* what)
{
    if (got != static_cast<std::size_t>(want))
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) + " values, got " +
                                    std::to_string(got));
}

Eigen::VectorXd gauge_vector(const SolveProblem& p)
{
    const int n = p.complex().num_vertices();
    if (p.gauge().kind == Gauge::Kind::ZeroMean) return Eigen::VectorXd::Ones(n);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    g(p.gauge().vertex) = 1.0;
    return g;
}

std::pair<double, double> reduced_spectrum(const Eigen::MatrixXd& jac)
{
    const auto n = jac.rows();
    if (n < 2) return {0.0, 0.0};
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Eigen::MatrixXd::Ones(n, 1));
    const Eigen::MatrixXd q = (qr.householderQ() * Eigen::MatrixXd::Identity(n, n)).rightCols(n - 1);
    const Eigen::MatrixXd s = q.transpose() * (0.5 * (jac + jac.transpose())) * q;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s, Eigen::EigenvaluesOnly);
    return {solver.eigenvalues()(0), solver.eigenvalues()(n - 2)};
}

// Solves [J g; g^T 0][delta; mu] = [-r; 0].
std::vector<double> project(const SolveProblem& p, std::vector<double> v)
{
    if (p.gauge().kind == Gauge::Kind::ZeroMean) {
        double mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        for (double& x : v) x -= mean;
    } else {
        const double pinned = v[static_cast<std::size_t>(p.gauge().vertex)];
        for (double& x : v) x -= pinned;
    }
    return v;
}

// Removes the rounding-level gauge component of a Newton update.
Eigen::VectorXd gauge_fixed(const SolveProblem& p, const Eigen::VectorXd& delta)
{
    const auto v = project(p, std::vector<double>(delta.data(), delta.data() + delta.size()));
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd newton_direction(const SolveProblem& p, std::span<const double> f, std::span<const double> r,
                                 TraceEntry& entry)
{
    const int n = p.complex().num_vertices();
    const Eigen::VectorXd g = gauge_vector(p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    for (int i = 0; i < n; ++i) rhs(i) = -r[static_cast<std::size_t>(i)];

    if (n < p.options().dense_threshold || p.target_kind() == TargetKind::ConstantScalar) {
        const Eigen::MatrixXd jac = p.jacobian(f);
        if (p.options().trace_spectrum && n < p.options().dense_threshold)
            std::tie(entry.jacobian_min_eigenvalue, entry.jacobian_max_eigenvalue) = reduced_spectrum(jac);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 1, n + 1);
        m.topLeftCorner(n, n) = jac;
        m.block(0, n, n, 1) = g;
        m.block(n, 0, 1, n) = g.transpose();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
        lu.setThreshold(1e-13);
        if (lu.rank() < n + 1)
            throw SingularHessian("gauge-reduced Jacobian is singular (rank " + std::to_string(lu.rank()) + " of " +
                                  std::to_string(n + 1) + ")");
        return gauge_fixed(p, lu.solve(rhs).head(n));
    }

    const SparseOperator jac = curvature_jacobian(p.complex(), p.chart(), f);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(jac.entries().size() + 2 * static_cast<std::size_t>(n));
    for (const auto& e : jac.entries()) t.emplace_back(e.row, e.col, e.value);
    for (int i = 0; i < n; ++i)
        if (g(i) != 0) {
            t.emplace_back(i, n, g(i));
            t.emplace_back(n, i, g(i));
        }
    Eigen::SparseMatrix<double> m(n + 1, n + 1);
    m.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw SingularHessian("sparse factorization of the bordered Jacobian failed");
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite()) throw SingularHessian("bordered Jacobian solve failed");
    return gauge_fixed(p, x.head(n));
}

} // namespace

SolveProblem::SolveProblem(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0, TargetKind kind,
                           std::vector<double> target, Gauge gauge, SolveOptions opts)
    : cx_(std::move(cx)), chart_(std::move(chart)), f0_(std::move(f0)), kind_(kind), target_(std::move(target)),
      gauge_(gauge), opts_(opts)
{
    const int n = cx_.num_vertices();
    require_size(f0_.size(), n, "SolveProblem initial f");
    if (kind_ == TargetKind::Prescribed) require_size(target_.size(), n, "SolveProblem target");
    if (chart_.num_edges() != cx_.num_edges()) throw std::invalid_argument("SolveProblem: chart does not match complex");
    if (gauge_.kind == Gauge::Kind::Pin && (gauge_.vertex < 0 || gauge_.vertex >= n))
        throw std::invalid_argument("SolveProblem: pinned vertex out of range");
    if (!(opts_.tolerance > 0) || opts_.max_iterations < 0 || opts_.max_halvings < 0)
        throw std::invalid_argument("SolveProblem: invalid options");
    if (!in_domain(f0_)) throw OutOfDomain("initial f is outside the chart domain");
}

SolveProblem SolveProblem::prescribed(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0,
                                      std::vector<double> target, Gauge gauge, SolveOptions opts)
{
    if (cx.dimension() == 2) {
        require_size(target.size(), cx.num_vertices(), "prescribed target");
        double sum = 0;
        for (double k : target) sum += k;
        const double expected = 2 * std::numbers::pi * cx.euler_characteristic();
        if (std::abs(sum - expected) > 1e-9 * std::max(1.0, std::abs(expected)))
            throw Infeasible("target curvatures sum to " + std::to_string(sum) + " but Gauss-Bonnet requires " +
                             std::to_string(expected) + " (2*pi*chi, chi = " +
                             std::to_string(cx.euler_characteristic()) + ")");
    }
    return SolveProblem(std::move(cx), std::move(chart), std::move(f0), TargetKind::Prescribed, std::move(target),
                        gauge, opts);
}

SolveProblem SolveProblem::constant_curvature_2d(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0,
                                                 Gauge gauge, SolveOptions opts)
{
    if (cx.dimension() != 2) throw std::invalid_argument("constant_curvature_2d requires a 2-dimensional complex");
    const double k = 2 * std::numbers::pi * cx.euler_characteristic() / cx.num_vertices();
    std::vector<double> target(static_cast<std::size_t>(cx.num_vertices()), k);
    return prescribed(std::move(cx), std::move(chart), std::move(f0), std::move(target), gauge, opts);
}

SolveProblem SolveProblem::flat(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0, Gauge gauge,
                                SolveOptions opts)
{
    std::vector<double> target(static_cast<std::size_t>(cx.num_vertices()), 0.0);
    return prescribed(std::move(cx), std::move(chart), std::move(f0), std::move(target), gauge, opts);
}

SolveProblem SolveProblem::constant_scalar_3d(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0,
                                              Gauge gauge, SolveOptions opts)
{
    if (cx.dimension() != 3) throw std::invalid_argument("constant_scalar_3d requires a 3-dimensional complex");
    return SolveProblem(std::move(cx), std::move(chart), std::move(f0), TargetKind::ConstantScalar, {}, gauge, opts);
}

std::vector<double> SolveProblem::residual(std::span<const double> f) const
{
    const PreMetric d = apply(chart_, cx_, f);
    if (kind_ == TargetKind::ConstantScalar) return residuals(cx_, d).constant_scalar;
    auto k = vertex_curvature(cx_, d);
    for (std::size_t i = 0; i < k.size(); ++i) k[i] -= target_[i];
    return k;
}

Eigen::MatrixXd SolveProblem::jacobian(std::span<const double> f) const
{
    if (kind_ == TargetKind::ConstantScalar)
        return fd_jacobian([this](std::span<const double> x) { return residual(x); }, f);
    return curvature_jacobian(cx_, chart_, f).to_dense();
}

bool SolveProblem::in_domain(std::span<const double> f) const
{
    for (double x : f)
        if (!std::isfinite(x)) return false;
    return domain_check(chart_, cx_, f).ok;
}

std::vector<double> SolveTrace::residuals() const
{
    std::vector<double> r;
    r.reserve(entries.size());
    for (const auto& e : entries) r.push_back(e.residual);
    return r;
}

void SolveTrace::write_csv(std::ostream& out) const
{
    const auto old = out.precision(17);
    const std::size_t n = entries.empty() ? 0 : entries.front().f.size();
    out << "iteration,residual,step,jacobian_min_eigenvalue,jacobian_max_eigenvalue";
    for (std::size_t i = 0; i < n; ++i) out << ",f_" << i;
    out << '\n';
    for (const auto& e : entries) {
        out << e.iteration << ',' << e.residual << ',' << e.step << ',' << e.jacobian_min_eigenvalue << ','
            << e.jacobian_max_eigenvalue;
        for (double x : e.f) out << ',' << x;
        out << '\n';
    }
    out.precision(old);
}

void SolveTrace::write_json(std::ostream& out) const
{
    nlohmann::json j;
    j["converged"] = converged;
    j["status"] = status;
    auto& rows = j["iterations"] = nlohmann::json::array();
    auto number = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    for (const auto& e : entries)
        rows.push_back({{"iteration", e.iteration},
                        {"residual", e.residual},
                        {"step", e.step},
                        {"jacobian_min_eigenvalue", number(e.jacobian_min_eigenvalue)},
                        {"jacobian_max_eigenvalue", number(e.jacobian_max_eigenvalue)},
                        {"f", e.f}});
    out << j.dump(2) << '\n';
}

std::vector<double> newton_solve(const SolveProblem& p, SolveTrace& trace)
{
    const auto& opts = p.options();
    std::vector<double> f(p.initial().begin(), p.initial().end());
    std::vector<double> r = p.residual(f);
    double norm = inf_norm(r);
    double last_step = 0;
    trace = {};

    for (int it = 0;; ++it) {
        TraceEntry entry;
        entry.iteration = it;
        entry.f = f;
        entry.residual = norm;
        entry.step = last_step;
        if (norm < opts.tolerance) {
            trace.entries.push_back(std::move(entry));
            trace.converged = true;
            trace.status = "converged";
            return f;
        }
        if (it >= opts.max_iterations) {
            trace.entries.push_back(std::move(entry));
            trace.status = "max_iterations";
            throw MaxIterations("Newton did not converge in " + std::to_string(opts.max_iterations) +
                                " iterations (residual " + std::to_string(norm) + ")");
        }
        Eigen::VectorXd delta;
        try {
            delta = newton_direction(p, f, r, entry);
        } catch (const SingularHessian&) {
            trace.entries.push_back(std::move(entry));
            trace.status = "singular_hessian";
            throw;
        }
        trace.entries.push_back(std::move(entry));

        double t = 1.0;
        bool any_in_domain = false;
        bool accepted = false;
        std::vector<double> trial(f.size());
        for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
            for (std::size_t i = 0; i < f.size(); ++i) trial[i] = f[i] + t * delta(static_cast<Eigen::Index>(i));
            if (!p.in_domain(trial)) continue;
            any_in_domain = true;
            auto trial_r = p.residual(trial);
            const double trial_norm = inf_norm(trial_r);
            if (trial_norm < norm) {
                f = trial;
                r = std::move(trial_r);
                norm = trial_norm;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (!any_in_domain) {
                trace.status = "left_domain";
                throw LeftDomain("no step along the Newton direction stays in the chart domain after " +
                                 std::to_string(opts.max_halvings) + " halvings");
            }
            trace.status = "line_search_stalled";
            throw MaxIterations("line search could not reduce the residual " + std::to_string(norm));
        }
        last_step = t;
    }
}

SolveResult newton_solve(const SolveProblem& problem)
{
    SolveResult out;
    out.f = newton_solve(problem, out.trace);
    return out;
}

std::vector<double> gradient_flow(const SolveProblem& p, const FlowOptions& flow, SolveTrace& trace)
{
    const auto& opts = p.options();
    if (flow.window < 1 || flow.max_iterations < 0 || flow.dt < 0)
        throw std::invalid_argument("gradient_flow: invalid options");
    std::vector<double> f(p.initial().begin(), p.initial().end());
    std::vector<double> r = p.residual(f);
    trace = {};
    trace.entries.push_back({0, f, inf_norm(r), 0.0});
    if (trace.entries.back().residual < opts.tolerance) {
        trace.converged = true;
        trace.status = "converged";
        return f;
    }

    double dt = flow.dt;
    if (dt == 0) {
        const Eigen::MatrixXd jac = p.jacobian(f);
        const double bound = jac.cwiseAbs().rowwise().sum().maxCoeff();
        dt = bound > 0 ? 1.0 / bound : 1.0;
    }

    std::vector<double> trial(f.size());
    for (int k = 1; k <= flow.max_iterations; ++k) {
        const auto step = project(p, r);
        bool moved = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            for (std::size_t i = 0; i < f.size(); ++i) trial[i] = f[i] - dt * step[i];
            if (p.in_domain(trial)) {
                moved = true;
                break;
            }
            dt *= 0.5;
        }
        if (!moved) {
            trace.status = "left_domain";
            throw LeftDomain("flow step leaves the chart domain after " + std::to_string(opts.max_halvings) +
                             " halvings of the time step");
        }
        f = trial;
        r = p.residual(f);
        const double norm = inf_norm(r);
        trace.entries.push_back({k, f, norm, dt});
        if (norm < opts.tolerance) {
            trace.converged = true;
            trace.status = "converged";
            return f;
        }
        const auto window = static_cast<std::size_t>(flow.window);
        if (trace.entries.size() > window && norm >= trace.entries[trace.entries.size() - 1 - window].residual) {
            trace.status = "non_monotone";
            throw AbortNonMonotone("residual did not decrease over " + std::to_string(flow.window) +
                                   " flow steps (now " + std::to_string(norm) + ")");
        }
    }
    trace.status = "max_iterations";
    throw MaxIterations("flow did not converge in " + std::to_string(flow.max_iterations) + " steps");
}

SolveResult gradient_flow(const SolveProblem& problem, const FlowOptions& flow)
{
    SolveResult out;
    out.f = gradient_flow(problem, flow, out.trace);
    return out;
}

} // namespace pflat

#pragma once

#include "pflat/complex.hpp"
#include "pflat/conformal.hpp"

#include <Eigen/Core>

#include <cmath>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace pflat {

enum class TargetKind
{
    Prescribed,     ///< K_i = K*_i
    ConstantScalar, ///< 3D: K_i = lambda V_i with lambda free
};

struct Gauge
{
    enum class Kind
    {
        ZeroMean, ///< the update has zero mean, so mean(f) stays at its initial value
        Pin,      ///< f at one vertex stays at its initial value
    };
    Kind kind = Kind::ZeroMean;
    int vertex = 0;

    static Gauge zero_mean() { return {}; }
    static Gauge pin(int vertex) { return {Kind::Pin, vertex}; }
};

struct SolveOptions
{
    double tolerance = 1e-10;
    int max_iterations = 50;
    int max_halvings = 40;
    /// Dense factorization and full eigendecomposition below this many vertices.
    int dense_threshold = 2000;
    /// Record the extreme eigenvalues of the gauge-reduced Jacobian per iterate.
    bool trace_spectrum = true;
};

///
/// A prescribed curvature problem in a fixed conformal chart. The residual is
/// K(f) - K* (or K(f) - lambda V in the constant scalar case) and its
/// infinity norm is driven below the tolerance.
///
class SolveProblem
{
public:
    /// 2D: K_i = target_i. Throws Infeasible unless sum target = 2 pi chi
    /// within 1e-9 * max(1, |2 pi chi|).
    static SolveProblem prescribed(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0,
                                   std::vector<double> target, Gauge gauge = {}, SolveOptions opts = {});
    /// 2D: K_i = 2 pi chi / n.
    static SolveProblem constant_curvature_2d(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0,
                                              Gauge gauge = {}, SolveOptions opts = {});
    /// K_i = 0. In 2D only the torus is feasible (Infeasible otherwise).
    static SolveProblem flat(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0, Gauge gauge = {},
                             SolveOptions opts = {});
    /// 3D: K_i - lambda V_i = 0 with lambda = EHR / (3 vol). There is no
    /// feasibility pre-check in 3D.
    static SolveProblem constant_scalar_3d(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0,
                                           Gauge gauge = {}, SolveOptions opts = {});

    const SimplicialComplex& complex() const noexcept { return cx_; }
    const ConformalChart& chart() const noexcept { return chart_; }
    std::span<const double> initial() const noexcept { return f0_; }
    TargetKind target_kind() const noexcept { return kind_; }
    std::span<const double> target() const noexcept { return target_; }
    const Gauge& gauge() const noexcept { return gauge_; }
    const SolveOptions& options() const noexcept { return opts_; }
    SolveOptions& options() noexcept { return opts_; }

    std::vector<double> residual(std::span<const double> f) const;
    /// d residual / df: analytic for prescribed targets, central differences
    /// for the constant scalar case.
    Eigen::MatrixXd jacobian(std::span<const double> f) const;
    bool in_domain(std::span<const double> f) const;

private:
    SolveProblem(SimplicialComplex cx, ConformalChart chart, std::vector<double> f0, TargetKind kind,
                 std::vector<double> target, Gauge gauge, SolveOptions opts);

    SimplicialComplex cx_;
    ConformalChart chart_;
    std::vector<double> f0_;
    TargetKind kind_;
    std::vector<double> target_;
    Gauge gauge_;
    SolveOptions opts_;
};

struct TraceEntry
{
    int iteration = 0;
    std::vector<double> f;
    double residual = 0;
    /// Accepted step length (Newton damping factor or flow time step); 0 for the initial entry.
    double step = 0;
    double jacobian_min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    double jacobian_max_eigenvalue = std::numeric_limits<double>::quiet_NaN();
};

struct SolveTrace
{
    std::vector<TraceEntry> entries;
    bool converged = false;
    std::string status = "running";

    std::vector<double> residuals() const;
    void write_csv(std::ostream& out) const;
    void write_json(std::ostream& out) const;
};

struct SolveResult
{
    std::vector<double> f;
    SolveTrace trace;
};

/// Damped Newton on the bordered system [J g; g^T 0]. Throws MaxIterations,
/// LeftDomain or SingularHessian; `trace` holds every accepted iterate either way.
std::vector<double> newton_solve(const SolveProblem& problem, SolveTrace& trace);
SolveResult newton_solve(const SolveProblem& problem);

struct FlowOptions
{
    /// Initial time step; 0 picks 1 / (max absolute row sum of the initial Jacobian).
    double dt = 0;
    int max_iterations = 20000;
    /// The residual must drop over every window of this many steps.
    int window = 20;
};

/// Explicit Euler on fdot = -residual, projected by the gauge. The time step
/// is halved only when a step leaves the chart domain. Throws LeftDomain,
/// AbortNonMonotone or MaxIterations.
std::vector<double> gradient_flow(const SolveProblem& problem, const FlowOptions& flow, SolveTrace& trace);
SolveResult gradient_flow(const SolveProblem& problem, const FlowOptions& flow = {});

} // namespace pflat

#pragma once

#include "pflat/complex.hpp"
#include "pflat/conformal.hpp"
#include "pflat/metric.hpp"
#include "pflat/sparse_operator.hpp"

#include <span>
#include <vector>

namespace pflat {

struct SpectrumOptions
{
    /// Full symmetric eigendecomposition below this many vertices, power
    /// iteration for the extreme eigenvalues at or above it.
    int dense_threshold = 2000;
    int max_power_iterations = 20000;
    double power_tolerance = 1e-12;
};

/// All eigenvalues of a symmetric operator in ascending order (dense solver).
std::vector<double> symmetric_eigenvalues(const SparseOperator& op);

struct ExtremeEigenvalues
{
    double min = 0;
    double max = 0;
    /// Set when the full spectrum was computed.
    std::vector<double> all;
};

/// Extreme eigenvalues of the symmetric part of `op`. With `constants_removed`
/// the operator is restricted to vectors with zero sum.
ExtremeEigenvalues extreme_eigenvalues(const SparseOperator& op, bool constants_removed,
                                       const SpectrumOptions& opts = {});

struct DefinitenessReport
{
    std::vector<double> dual_lengths;
    // Sufficient conditions for the Laplacian to be negative semidefinite with
    // a kernel of constants. Conditions that do not apply to the dimension or
    // chart are false.
    bool dual_lengths_positive = false;
    std::vector<int> nonpositive_dual_edges;
    bool inversive_eta_nonnegative = false;
    bool directed_positive = false;
    bool perp_bisector = false;
    bool centers_in_circumcircles = false;
    bool packing_3d = false;
    bool any_sufficient_condition = false;

    // Convexity of EHR (3D): packing with K_i >= 0, or l*_ij - q_ij K_ij / 2 > 0 with K_i >= 0.
    bool convex_packing = false;
    bool convex_general = false;

    std::vector<double> laplacian_eigenvalues; ///< empty above the dense threshold
    double laplacian_min = 0;
    double laplacian_max = 0;
    /// Largest eigenvalue on zero-sum vectors; negative iff the kernel is the constants.
    double laplacian_max_nonconstant = 0;
    double laplacian_scale = 0;
    double constant_residual = 0; ///< |L 1|_inf
    int kernel_dimension = 0;
    double kernel_constant_defect = 0;
    bool nsd_constant_kernel = false;

    /// Extreme eigenvalues of the curvature Jacobian (the Hessian of F in 2D,
    /// of EHR in 3D) on zero-sum vectors.
    double hessian_min = 0;
    double hessian_max = 0;
};

DefinitenessReport definiteness_report(const SimplicialComplex& cx, const ConformalChart& chart,
                                       std::span<const double> f, const SpectrumOptions& opts = {});

struct RigidityReport
{
    bool rigid = false;
    double curvature_residual = 0;
    int nullspace_dimension = 0;
    std::vector<std::vector<double>> nullspace_basis;
    /// |J v|_inf for each basis vector.
    std::vector<double> basis_residuals;
    /// max_i |v_i - mean(v)| for a one-dimensional kernel with |v| = 1.
    double constant_defect = 0;
};

/// Throws NotCritical if |K(f) - target|_inf >= 1e-8. An empty target means zero.
RigidityReport rigidity_check(const SimplicialComplex& cx, const ConformalChart& chart, std::span<const double> f,
                              std::span<const double> target = {});

} // namespace pflat

#pragma once

#include "pflat/complex.hpp"
#include "pflat/conformal.hpp"
#include "pflat/metric.hpp"
#include "pflat/sparse_operator.hpp"

#include <array>
#include <span>
#include <vector>

namespace pflat {

/// d(gamma_a)/d(f_c) for a triangle metric, where gamma_a is the angle at
/// local vertex a and f_c moves the two edges at c (the opposite edge is fixed).
double angle_gradient_2d(const TriangleMetric& m, int angle_vertex, int varying_vertex);

/// d(beta_ij)/d(f_v) for the dihedral angle at edge {i, j} of a tetrahedron,
/// v not in {i, j}. Throws std::invalid_argument when v is an endpoint.
double dihedral_gradient_3d(const TetMetric& m, int i, int j, int varying_vertex);

///
/// Right-hand sides of the per-vertex dihedral identities when only f_c moves:
/// entry w != c is 2 A_{wc} / l_wc, the value of sum_u d_wu d(beta_wu)/d(f_c);
/// entry c is minus the sum of the other three.
///
std::array<double, 4> dihedral_row_rhs(const TetMetric& m, int varying_vertex);

/// dK_i/df_j in 2D: -l*_ij/l_ij off the diagonal, the row sum negated on it.
SparseOperator curvature_jacobian_2d(const SimplicialComplex& cx, const ConformalChart& chart,
                                     std::span<const double> f);

/// dK_i/df_j in 3D: off-diagonal -(2 l*_ij/l_ij - q_ij K_ij/l_ij), diagonal the
/// negated off-diagonal sum plus K_i.
SparseOperator curvature_jacobian_3d(const SimplicialComplex& cx, const ConformalChart& chart,
                                     std::span<const double> f);

/// Either of the above, by dimension.
SparseOperator curvature_jacobian(const SimplicialComplex& cx, const ConformalChart& chart,
                                  std::span<const double> f);

/// (L phi)_i = sum_j (l*_ij/l_ij)(phi_j - phi_i).
SparseOperator laplacian(const SimplicialComplex& cx, const PreMetric& d);

/// -(n/2) sum over ordered pairs of ((phi_i-phi_j)/l_ij)((psi_i-psi_j)/l_ij) V_ij.
double laplacian_weak_form(const SimplicialComplex& cx, const PreMetric& d, std::span<const double> phi,
                           std::span<const double> psi);

///
/// Second conformal variation of EHR as coefficient lists:
///   sum_i sum_{j != i} c_ij (fdot_j - fdot_i)^2 + sum_i K_i (fdot_i^2 + fddot_i)
/// with c_ij = l*_ij/l_ij - q_ij K_ij / (2 l_ij).
///
struct EhrHessian
{
    std::vector<std::array<int, 2>> edges;
    std::vector<double> edge_coefficients;
    std::vector<double> vertex_coefficients;

    double evaluate(std::span<const double> fdot, std::span<const double> fddot = {}) const;
    /// Symmetric matrix H with fdot^T H fdot = evaluate(fdot).
    SparseOperator as_operator() const;
};

EhrHessian ehr_hessian(const SimplicialComplex& cx, const ConformalChart& chart, std::span<const double> f);

/// Line integral of sum_i K_i df_i (2D) along the polyline f_start -> waypoints
/// -> f_end, adaptive Gauss-Kronrod per segment. Throws OutOfDomain if a
/// quadrature node leaves the chart domain. The value is path independent
/// only within a simply connected part of the domain; that is not checked.
double functional_F(const SimplicialComplex& cx, const ConformalChart& chart, std::span<const double> f_start,
                    std::span<const double> f_end, std::span<const std::vector<double>> waypoints = {});

} // namespace pflat

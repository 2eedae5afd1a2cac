#pragma once

#include "pflat/complex.hpp"
#include "pflat/metric.hpp"

#include <span>
#include <vector>

namespace pflat {

/// K_i = 2*pi - sum of the triangle angles at i (2D).
std::vector<double> curvature_2d(const SimplicialComplex& cx, std::span<const double> lengths);

/// Sum of dihedral angles around each edge (3D).
std::vector<double> dihedral_sums(const SimplicialComplex& cx, std::span<const double> lengths);

/// K_ij = (2*pi - sum of dihedral angles at ij) * l_ij (3D).
std::vector<double> edge_curvature_3d(const SimplicialComplex& cx, std::span<const double> lengths);

/// K_i = sum_j (2*pi - sum of dihedral angles at ij) * d_ij (3D).
std::vector<double> scalar_curvature_3d(const SimplicialComplex& cx, const PreMetric& d);

/// Curvature per vertex in either dimension: curvature_2d or scalar_curvature_3d.
std::vector<double> vertex_curvature(const SimplicialComplex& cx, const PreMetric& d);

/// Einstein-Hilbert-Regge functional: the sum of edge curvatures.
double ehr(const SimplicialComplex& cx, std::span<const double> lengths);
/// Sum of the top simplex volumes (areas in 2D).
double total_volume(const SimplicialComplex& cx, std::span<const double> lengths);
/// EHR / (3 * total volume).
double einstein_lambda(const SimplicialComplex& cx, std::span<const double> lengths);

/// dV/dl_ij of the total volume, summed over the tetrahedra containing ij.
std::vector<double> volume_length_gradient(const SimplicialComplex& cx, std::span<const double> lengths);

struct Residuals
{
    double lambda = 0;
    /// K_ij - lambda * l_ij * dV/dl_ij per edge.
    std::vector<double> einstein;
    /// K_i - lambda * V_i per vertex.
    std::vector<double> constant_scalar;
};

Residuals residuals(const SimplicialComplex& cx, const PreMetric& d);

///
/// Everything the `curvature` command prints. Edge curvature, EHR, lambda and
/// residuals are filled in 3D only; in 2D total_volume is the total area.
///
struct CurvatureReport
{
    int dimension = 0;
    std::vector<double> vertex_curvature;
    std::vector<double> edge_curvature;
    double ehr = 0;
    double total_volume = 0;
    double lambda = 0;
    double curvature_sum = 0;
    /// 2D: sum K_i - 2*pi*chi.
    double gauss_bonnet_defect = 0;
    std::vector<double> vertex_volumes;
    std::vector<double> einstein_residuals;
    std::vector<double> csc_residuals;
};

CurvatureReport curvature_report(const SimplicialComplex& cx, const PreMetric& d);

} // namespace pflat

#pragma once

#include "pflat/complex.hpp"
#include "pflat/simplex_geometry.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace pflat {

///
/// A value d_ij on every directed edge (i, j); the induced edge length is
/// l_ij = d_ij + d_ji. Values may be negative.
///
/// Storage is per edge id e of the underlying complex: slot 2e holds the
/// value directed away from the lower vertex index, slot 2e+1 the value
/// directed away from the higher one.
///
class PreMetric
{
public:
    PreMetric() = default;
    explicit PreMetric(std::vector<double> directed);
    static PreMetric constant(const SimplicialComplex& cx, double value);

    int num_edges() const noexcept { return static_cast<int>(d_.size() / 2); }
    std::span<const double> values() const noexcept { return d_; }

    /// d_{from,to} for vertex indices joined by an edge of `cx`.
    double operator()(const SimplicialComplex& cx, int from, int to) const;
    void set(const SimplicialComplex& cx, int from, int to, double value);

    /// Value on edge e directed away from its lower (`from_low`) or higher vertex.
    double directed(int e, bool from_low) const { return d_[slot(e, from_low)]; }
    double& directed(int e, bool from_low) { return d_[slot(e, from_low)]; }

    double length(int e) const { return d_[slot(e, true)] + d_[slot(e, false)]; }
    std::vector<double> lengths() const;

    friend bool operator==(const PreMetric&, const PreMetric&) = default;

private:
    static std::size_t slot(int e, bool from_low)
    {
        return 2 * static_cast<std::size_t>(e) + (from_low ? 0 : 1);
    }
    std::vector<double> d_;
};

/// The directed values of a single simplex in local vertex numbering.
template <int N>
struct LocalMetric
{
    std::array<std::array<double, N>, N> d{};

    double operator()(int from, int to) const
    {
        return d[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
    }
    double length(int a, int b) const { return (*this)(a, b) + (*this)(b, a); }
    LocalLengths<N> lengths() const
    {
        LocalLengths<N> l;
        for (int a = 0; a < N; ++a)
            for (int b = a + 1; b < N; ++b) l.set(a, b, length(a, b));
        return l;
    }
};

using TriangleMetric = LocalMetric<3>;
using TetMetric = LocalMetric<4>;

/// Local metric of a top simplex (or of triangle `t` in any dimension), in
/// the order of the simplex's sorted vertex list.
TriangleMetric local_triangle(const SimplicialComplex& cx, const PreMetric& d, int t);
TetMetric local_tetrahedron(const SimplicialComplex& cx, const PreMetric& d, int t);

/// Residual d_ij^2 + d_jk^2 + d_ki^2 - d_ji^2 - d_ik^2 - d_kj^2 of a triangle.
double metric_residual(const TriangleMetric& m);

/// Signed distance h_{ij,k} from the edge center c_ij to the triangle center,
/// evaluated with the face angle at i.
double height_2d(const TriangleMetric& m, int i, int j, int k);
/// Signed distance h_{ijk,l} from the face center c_ijk to the tetrahedron
/// center, evaluated through the dihedral angle at edge {i, j}.
double height_3d(const TetMetric& m, int i, int j, int k, int l);
/// Signed area A_{ij,kl} of the dual quadrilateral of edge {i, j}.
double dual_area(const TetMetric& m, int i, int j);

struct MetricReport
{
    bool ok = true;
    std::vector<double> triangle_residuals;
    /// Triangles whose residual exceeds 1e-10 * (mean length)^2.
    std::vector<int> residual_violations;
    std::vector<int> nonpositive_edges;
    /// Top simplices failing the Cayley-Menger test (in 3D also tetrahedra
    /// with a degenerate face).
    std::vector<int> degenerate_simplices;
    // Informational; neither is required for a metric.
    bool all_directed_positive = false;
    bool all_dual_lengths_positive = false;
};

/// Report-style validation of a pre-metric as a metric; never throws on bad data.
MetricReport check_metric(const SimplicialComplex& cx, const PreMetric& d);

double height_2d(const SimplicialComplex& cx, const PreMetric& d, int triangle, int edge);
double height_3d(const SimplicialComplex& cx, const PreMetric& d, int tetrahedron, int face);
double dual_area(const SimplicialComplex& cx, const PreMetric& d, int tetrahedron, int edge);

/// Dual length l*_ij: sum of the two adjacent h_{ij,k} in 2D, of the dual
/// areas over the tetrahedra containing the edge in 3D.
double dual_length(const SimplicialComplex& cx, const PreMetric& d, int edge);
std::vector<double> dual_lengths(const SimplicialComplex& cx, const PreMetric& d);
/// Dual lengths within 1e-12 * (mean edge length)^(n-1) of zero count as zero
/// in positivity tests.
double dual_length_tolerance(const SimplicialComplex& cx, std::span<const double> lengths);

/// V_i = 1/3 * sum over tetrahedra containing i and their faces containing i
/// of h_{face,opposite} * area(face). 3D only.
double vertex_volume(const SimplicialComplex& cx, const PreMetric& d, int vertex);
std::vector<double> vertex_volumes(const SimplicialComplex& cx, const PreMetric& d);

/// V_ij = l*_ij * l_ij / n.
double edge_volume(const SimplicialComplex& cx, const PreMetric& d, int edge);

} // namespace pflat

#pragma once

#include "pflat/complex.hpp"
#include "pflat/conformal.hpp"
#include "pflat/metric.hpp"

#include <Eigen/Core>

#include <array>
#include <random>
#include <string>
#include <vector>

namespace pflat::testing {

using Point = Eigen::Vector3d;

// Fixtures ---------------------------------------------------------------

/// Boundary of a tetrahedron on labels 1..4.
SimplicialComplex sphere_tet();
SimplicialComplex icosahedron();
std::vector<Point> icosahedron_coordinates();

struct LengthFixture
{
    SimplicialComplex cx;
    std::vector<double> lengths; ///< flat lengths per edge id
};

/// n x n torus from an acute lattice, every square split along one diagonal.
LengthFixture flat_torus(int n = 4);
/// Connected sum of two 3x3 tori: 15 vertices, chi = -2.
SimplicialComplex genus2();
/// Boundary of the 4-simplex on labels 1..5.
SimplicialComplex s3_boundary();
/// Boundary of the 16-cell (cross-polytope): 8 vertices, 16 tetrahedra.
SimplicialComplex cell16();
/// Kuhn triangulation of the unit-cube lattice mod n: 6 n^3 tetrahedra.
LengthFixture flat_3torus(int n = 3);
/// sphere_tet with l_12 = 1.9 and all other lengths 1 (edge 12 is not Delaunay).
LengthFixture non_delaunay_sphere();

/// Boundary of the 4-simplex with perpendicular-bisector lengths from five
/// points in R^4, the first four forming a sliver of height `eps`.
LengthFixture sliver_s3(double eps, double width);

std::vector<double> lengths_from_points(const SimplicialComplex& cx, const std::vector<Point>& points);

// Random instances --------------------------------------------------------

struct Instance
{
    std::string name;
    SimplicialComplex cx;
    ConformalChart chart;
    std::vector<double> f;
};

ConformalChart random_chart(const SimplicialComplex& cx, ChartKind kind, std::mt19937_64& rng);
/// f with entries in [-amplitude, amplitude] around `center` (zero if empty)
/// and inside the chart domain.
std::vector<double> random_f(const SimplicialComplex& cx, const ConformalChart& chart, std::mt19937_64& rng,
                             double amplitude, std::span<const double> center = {});

/// A random instance on each closed 2D / 3D fixture for each chart kind.
std::vector<Instance> random_instances(int dimension, std::mt19937_64& rng);

inline constexpr ChartKind kAllCharts[] = {ChartKind::Packing, ChartKind::FixedInversive, ChartKind::PerpBisector};

// Embedding oracles -------------------------------------------------------

/// Coordinates of a simplex with the given lengths (lexicographic order).
std::vector<Point> embed(std::span<const double> lex_lengths, int k);

double angle_at(const Point& apex, const Point& a, const Point& b);
/// Dihedral angle at edge (p, q) between the faces through r and s.
double dihedral_at(const Point& p, const Point& q, const Point& r, const Point& s);

/// Center of an embedded simplex from the directed values at local vertex 0:
/// the point whose projection onto edge 0j is at distance d_0j from vertex 0.
Point center_from(const std::vector<Point>& v, std::span<const double> d_from_0);
/// Signed distance from `x` to the line (2D) or plane through `face`,
/// positive on the side of `toward`.
double signed_distance(const Point& x, const std::vector<Point>& face, const Point& toward);

double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);

} // namespace pflat::testing

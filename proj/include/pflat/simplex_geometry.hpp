#pragma once

#include <Eigen/Core>

#include <array>
#include <span>

namespace pflat {

///
/// Edge lengths of a single N-vertex simplex, addressed by local vertex
/// indices 0..N-1. Stored as a symmetric matrix with a zero diagonal.
///
template <int N>
class LocalLengths
{
public:
    static constexpr int num_edges = N * (N - 1) / 2;

    LocalLengths() = default;

    /// Lengths in lexicographic order of local pairs: (01,02,12) for
    /// triangles, (01,02,03,12,13,23) for tetrahedra.
    explicit LocalLengths(std::span<const double> lex)
    {
        int m = 0;
        for (int a = 0; a < N; ++a)
            for (int b = a + 1; b < N; ++b) set(a, b, lex[static_cast<std::size_t>(m++)]);
    }

    double operator()(int a, int b) const { return l_[idx(a)][idx(b)]; }
    void set(int a, int b, double value) { l_[idx(a)][idx(b)] = l_[idx(b)][idx(a)] = value; }

    std::array<double, num_edges> lex() const
    {
        std::array<double, num_edges> out{};
        int m = 0;
        for (int a = 0; a < N; ++a)
            for (int b = a + 1; b < N; ++b) out[static_cast<std::size_t>(m++)] = (*this)(a, b);
        return out;
    }

    double mean() const
    {
        double s = 0;
        for (double x : lex()) s += x;
        return s / num_edges;
    }

private:
    static std::size_t idx(int a) { return static_cast<std::size_t>(a); }
    std::array<std::array<double, N>, N> l_{};
};

using TriangleLengths = LocalLengths<3>;
using TetLengths = LocalLengths<4>;

/// Volume of a k-simplex (k = 1, 2, 3) from its edge lengths in lexicographic
/// order, via the Cayley-Menger determinant. Throws Degenerate when the
/// determinant is below 1e-12 * (mean length)^(2k).
double cm_volume(std::span<const double> lengths, int k);
double triangle_area(const TriangleLengths& l);
double tetrahedron_volume(const TetLengths& l);

/// Angle at the vertex between the sides of length `a` and `b`, opposite the
/// side `c`. Throws Degenerate if the triangle inequality fails.
double face_angle(double a, double b, double c);
/// Angle of a triangle at local vertex i.
double face_angle(const TriangleLengths& l, int i);
/// Angle at local vertex i of the face {i, j, k} of a tetrahedron.
double face_angle(const TetLengths& l, int i, int j, int k);

/// Dihedral angle of a tetrahedron at edge {i, j}, evaluated from the face
/// angles at both endpoints and averaged. Throws Degenerate if the two
/// evaluations disagree by more than 1e-9.
double dihedral_angle(const TetLengths& l, int i, int j);

/// Solid angle at local vertex i: the three dihedral angles through i minus pi.
double solid_angle(const TetLengths& l, int i);

/// Partial derivative of the tetrahedron volume with respect to the length of
/// edge {i, j}: l_ij * l_kl * cot(beta_kl) / 6.
double volume_length_derivative(const TetLengths& l, int i, int j);

/// Coordinates of a k-simplex (rows are vertices, k columns) with v0 at the
/// origin, v1 on the positive first axis, v2 in the upper half-plane and v3
/// above it. Throws Degenerate.
Eigen::MatrixXd embed_simplex(std::span<const double> lengths, int k);

} // namespace pflat

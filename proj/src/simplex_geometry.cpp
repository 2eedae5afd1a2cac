#include "pflat/simplex_geometry.hpp"

#include "pflat/errors.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <string>

namespace pflat {

namespace {

constexpr double kRelativeVolumeEps = 1e-12;
constexpr double kClampSlack = 1e-9;
constexpr double kDihedralAgreement = 1e-9;

double safe_acos(double x)
{
    if (x > 1.0) {
        if (x - 1.0 > kClampSlack) throw Degenerate("cosine out of range: " + std::to_string(x));
        return 0.0;
    }
    if (x < -1.0) {
        if (-1.0 - x > kClampSlack) throw Degenerate("cosine out of range: " + std::to_string(x));
        return std::numbers::pi;
    }
    return std::acos(x);
}

void check_triangle(double a, double b, double c)
{
    if (!(a > 0 && b > 0 && c > 0) || !(a + b > c && a + c > b && b + c > a))
        throw Degenerate("triangle inequality fails for lengths (" + std::to_string(a) + ", " +
                         std::to_string(b) + ", " + std::to_string(c) + ")");
}

// Cosine and sine of the angle between sides a and b opposite c. The sine
// comes from the area so it stays accurate for small angles.
std::pair<double, double> cos_sin(double a, double b, double c)
{
    check_triangle(a, b, c);
    const double cosine = (a * a + b * b - c * c) / (2 * a * b);
    const double lex[3] = {a, b, c};
    const double area = cm_volume(lex, 2);
    return {cosine, 2 * area / (a * b)};
}

double dihedral_at(const TetLengths& l, int i, int j, int k, int m)
{
    const auto [cjk, sjk] = cos_sin(l(i, j), l(i, k), l(j, k));
    const auto [cjm, sjm] = cos_sin(l(i, j), l(i, m), l(j, m));
    const auto [ckm, skm] = cos_sin(l(i, k), l(i, m), l(k, m));
    (void)skm;
    return safe_acos((ckm - cjk * cjm) / (sjk * sjm));
}

std::array<int, 2> others(int i, int j)
{
    std::array<int, 2> o{};
    int n = 0;
    for (int r = 0; r < 4; ++r)
        if (r != i && r != j) o[static_cast<std::size_t>(n++)] = r;
    return o;
}

} // namespace

double cm_volume(std::span<const double> lengths, int k)
{
    if (k < 1 || k > 3) throw std::invalid_argument("cm_volume: k must be 1, 2 or 3");
    const auto n_edges = static_cast<std::size_t>(k * (k + 1) / 2);
    if (lengths.size() != n_edges)
        throw std::invalid_argument("cm_volume: expected " + std::to_string(n_edges) + " lengths");
    for (double x : lengths)
        if (!(x > 0) || !std::isfinite(x)) throw Degenerate("non-positive edge length");
    if (k == 1) return lengths[0];

    const int n = k + 2;
    Eigen::MatrixXd cm = Eigen::MatrixXd::Zero(n, n);
    double mean = 0;
    for (int a = 1; a < n; ++a) cm(0, a) = cm(a, 0) = 1.0;
    std::size_t m = 0;
    for (int a = 0; a <= k; ++a)
        for (int b = a + 1; b <= k; ++b) {
            const double x = lengths[m++];
            mean += x;
            cm(a + 1, b + 1) = cm(b + 1, a + 1) = x * x;
        }
    mean /= static_cast<double>(n_edges);

    // V^2 = (-1)^(k+1) det / (2^k (k!)^2)
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    const double denominator = (k == 2) ? 16.0 : 288.0;
    const double scaled = sign * cm.determinant();
    if (!(scaled > kRelativeVolumeEps * std::pow(mean, 2 * k)))
        throw Degenerate("degenerate " + std::to_string(k) + "-simplex (Cayley-Menger determinant " +
                         std::to_string(scaled) + ")");
    return std::sqrt(scaled / denominator);
}

double triangle_area(const TriangleLengths& l)
{
    const auto lex = l.lex();
    return cm_volume(lex, 2);
}

double tetrahedron_volume(const TetLengths& l)
{
    const auto lex = l.lex();
    return cm_volume(lex, 3);
}

double face_angle(double a, double b, double c)
{
    check_triangle(a, b, c);
    return safe_acos((a * a + b * b - c * c) / (2 * a * b));
}

double face_angle(const TriangleLengths& l, int i)
{
    const int j = (i + 1) % 3;
    const int k = (i + 2) % 3;
    return face_angle(l(i, j), l(i, k), l(j, k));
}

double face_angle(const TetLengths& l, int i, int j, int k)
{
    return face_angle(l(i, j), l(i, k), l(j, k));
}

double dihedral_angle(const TetLengths& l, int i, int j)
{
    if (i == j) throw std::invalid_argument("dihedral_angle: i == j");
    tetrahedron_volume(l);
    const auto [k, m] = others(i, j);
    const double at_i = dihedral_at(l, i, j, k, m);
    const double at_j = dihedral_at(l, j, i, k, m);
    if (std::abs(at_i - at_j) > kDihedralAgreement)
        throw Degenerate("dihedral angle evaluations disagree (" + std::to_string(at_i) + " vs " +
                         std::to_string(at_j) + ")");
    return 0.5 * (at_i + at_j);
}

double solid_angle(const TetLengths& l, int i)
{
    double sum = 0;
    for (int j = 0; j < 4; ++j)
        if (j != i) sum += dihedral_angle(l, i, j);
    return sum - std::numbers::pi;
}

double volume_length_derivative(const TetLengths& l, int i, int j)
{
    const auto [k, m] = others(i, j);
    return l(i, j) * l(k, m) / (6.0 * std::tan(dihedral_angle(l, k, m)));
}

Eigen::MatrixXd embed_simplex(std::span<const double> lengths, int k)
{
    cm_volume(lengths, k);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(k + 1, k);
    if (k == 1) {
        x(1, 0) = lengths[0];
        return x;
    }
    // Lexicographic positions: 01 02 (03) 12 (13 23)
    const double l01 = lengths[0];
    const double l02 = lengths[1];
    const double l12 = (k == 2) ? lengths[2] : lengths[3];
    x(1, 0) = l01;
    x(2, 0) = (l02 * l02 + l01 * l01 - l12 * l12) / (2 * l01);
    x(2, 1) = std::sqrt(std::max(0.0, l02 * l02 - x(2, 0) * x(2, 0)));
    if (k == 3) {
        const double l03 = lengths[2];
        const double l13 = lengths[4];
        const double l23 = lengths[5];
        const double px = (l03 * l03 - l13 * l13 + l01 * l01) / (2 * l01);
        const double py = (l03 * l03 - l23 * l23 + x(2, 0) * x(2, 0) + x(2, 1) * x(2, 1) -
                           2 * px * x(2, 0)) /
                          (2 * x(2, 1));
        x(3, 0) = px;
        x(3, 1) = py;
        x(3, 2) = std::sqrt(std::max(0.0, l03 * l03 - px * px - py * py));
    }
    return x;
}

} // namespace pflat

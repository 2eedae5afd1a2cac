#pragma once

#include "pflat/complex.hpp"
#include "pflat/conformal.hpp"
#include "pflat/metric.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pflat {

///
/// Text mesh file. Line oriented, '#' starts a comment, blank lines are
/// ignored. The first line is `pfmesh 1`; blocks follow in any order except
/// that `dimension` must precede `simplices`:
///
///     dimension 2
///     vertices N          followed by N vertex labels, one per line
///     simplices M         followed by M lines of dimension+1 labels
///     chart KIND          packing | inversive | perp_bisector
///     edge_values E       E lines "i j value" (eta or L), not for packing
///     f N                 N lines "i value"
///     metric 2E           2E lines "i j d_ij", instead of chart + f
///     target N            optional, N lines "i K*"
///
struct MeshFile
{
    struct EdgeValue
    {
        VertexLabel a = 0;
        VertexLabel b = 0;
        double value = 0;
        friend bool operator==(const EdgeValue&, const EdgeValue&) = default;
    };
    struct VertexValue
    {
        VertexLabel v = 0;
        double value = 0;
        friend bool operator==(const VertexValue&, const VertexValue&) = default;
    };

    int version = 1;
    int dimension = 0;
    std::vector<VertexLabel> vertices;
    std::vector<std::vector<VertexLabel>> simplices;
    std::optional<ChartKind> chart;
    std::vector<EdgeValue> edge_values;
    std::vector<VertexValue> f;
    std::vector<EdgeValue> metric;
    std::vector<VertexValue> target;

    friend bool operator==(const MeshFile&, const MeshFile&) = default;
};

/// Throws ParseError naming the offending line.
MeshFile parse_mesh(std::istream& in);
MeshFile parse_mesh(const std::string& text);
MeshFile read_mesh(const std::filesystem::path& path);

/// Numbers are written with 17 significant digits, so parsing is lossless.
std::string serialize(const MeshFile& mesh);
void write_mesh(const std::filesystem::path& path, const MeshFile& mesh);

/// A mesh file resolved against its complex; vectors are indexed by vertex
/// and edge ids.
struct Mesh
{
    SimplicialComplex complex;
    std::optional<ConformalChart> chart;
    std::vector<double> f;
    PreMetric metric;
    std::optional<std::vector<double>> target;
};

/// The chart block of `file` on its complex. Throws std::invalid_argument
/// for a metric-only file, Degenerate as perp_bisector() does.
ConformalChart file_chart(const MeshFile& file, const SimplicialComplex& cx);
/// Per-vertex values (f or target) indexed by vertex id.
std::vector<double> file_vertex_values(std::span<const MeshFile::VertexValue> values, const SimplicialComplex& cx);

/// Builds the complex (NonManifold, DuplicateSimplex), the chart (Degenerate
/// for perpendicular bisector data that is not piecewise flat) and the metric
/// (OutOfDomain when f lies outside the chart domain).
Mesh load(const MeshFile& file);

MeshFile to_mesh_file(const SimplicialComplex& cx, const ConformalChart& chart, std::span<const double> f);
MeshFile to_mesh_file(const SimplicialComplex& cx, const PreMetric& d);

/// Triangle-only OFF surface to a perpendicular bisector mesh with L from the
/// vertex coordinates and f = 0. Vertex labels are the 0-based OFF indices.
MeshFile off_to_mesh(std::istream& in);

} // namespace pflat

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace pflat {

using VertexLabel = std::int64_t;

/// A simplex addressed by its dimension and dense id within that dimension.
struct SimplexRef
{
    int dim = 0;
    int id = 0;
    friend bool operator==(const SimplexRef&, const SimplexRef&) = default;
};

///
/// A closed, connected triangulated 2- or 3-manifold.
///
/// Vertices carry user labels (as they appear in input files) and are stored
/// internally by dense index 0..n-1 in increasing label order. Every simplex
/// is stored as a sorted list of vertex indices and addressed by a dense id;
/// ids follow lexicographic order of the sorted vertex lists, so all
/// iteration orders are deterministic.
///
/// Instances are immutable after construction.
///
class SimplicialComplex
{
public:
    /// Builds all faces and incidence maps from the top simplices and checks
    /// the closed-manifold invariants.
    ///
    /// Throws NonManifold if a codimension-one face does not have exactly two
    /// cofaces, a vertex link is not a connected cycle (2D) / sphere (3D), or
    /// the complex is disconnected. Throws DuplicateSimplex if a vertex set is
    /// listed twice, std::invalid_argument on malformed input.
    static SimplicialComplex build(int dimension,
                                   std::span<const std::vector<VertexLabel>> top_simplices);

    int dimension() const noexcept { return dimension_; }
    int num_vertices() const noexcept { return static_cast<int>(labels_.size()); }
    int num_edges() const noexcept { return count(1); }
    int num_triangles() const noexcept { return count(2); }
    int num_tetrahedra() const noexcept { return dimension_ == 3 ? count(3) : 0; }
    int num_top() const noexcept { return count(dimension_); }
    int count(int k) const;

    /// Sorted vertex indices of simplex `id` of dimension `k`.
    std::span<const int> simplex(int k, int id) const;
    std::array<int, 2> edge(int e) const;
    std::array<int, 3> triangle(int t) const;
    std::array<int, 4> tetrahedron(int t) const;

    std::span<const VertexLabel> vertex_labels() const noexcept { return labels_; }
    VertexLabel label(int v) const { return labels_.at(static_cast<std::size_t>(v)); }
    /// Dense index of a vertex label; throws UnknownSimplex.
    int vertex_index(VertexLabel label) const;

    /// Id of the simplex spanned by the given vertex indices (any order), or -1.
    int find(std::span<const int> vertices) const;
    int find_edge(int a, int b) const;
    /// As find_edge, but throws UnknownSimplex.
    int edge_id(int a, int b) const;

    /// Top simplices containing `s`, sorted by id. Throws UnknownSimplex.
    std::vector<int> star(SimplexRef s) const;
    /// Same as star() but without a copy, for k < dimension.
    std::span<const int> star_span(int k, int id) const;

    /// Edge ids of a top simplex, in lexicographic order of the local vertex
    /// pairs (01, 02, 12) or (01, 02, 03, 12, 13, 23).
    std::span<const int> top_edges(int top) const;
    /// Edge ids of a triangle in order (01, 02, 12).
    std::array<int, 3> triangle_edges(int t) const;
    /// Triangle ids of a tetrahedron; entry m is the face opposite local vertex m.
    std::array<int, 4> tetrahedron_faces(int t) const;

    /// Neighbouring vertex indices of v (sorted) and the matching edge ids.
    std::span<const int> neighbors(int v) const;
    std::span<const int> incident_edges(int v) const;

    int euler_characteristic() const;

    /// Top simplices as label lists, in id order. Feeding this back to build()
    /// reproduces the same complex.
    std::vector<std::vector<VertexLabel>> top_simplex_labels() const;

private:
    struct Csr
    {
        std::vector<int> offsets{0};
        std::vector<int> data;
        std::span<const int> row(int i) const
        {
            const auto b = static_cast<std::size_t>(offsets[static_cast<std::size_t>(i)]);
            const auto e = static_cast<std::size_t>(offsets[static_cast<std::size_t>(i) + 1]);
            return {data.data() + b, e - b};
        }
    };

    using Key = std::array<int, 4>;
    struct KeyHash
    {
        std::size_t operator()(const Key& k) const noexcept
        {
            std::size_t h = 1469598103934665603ull;
            for (int x : k) h = (h ^ static_cast<std::size_t>(x + 1)) * 1099511628211ull;
            return h;
        }
    };
    static Key make_key(std::span<const int> sorted);
    void check_manifold() const;

    int dimension_ = 0;
    std::vector<VertexLabel> labels_;
    std::unordered_map<VertexLabel, int> label_index_;
    // simplices_[k] holds count(k) sorted vertex lists with stride k+1.
    std::array<std::vector<int>, 4> simplices_;
    std::array<std::unordered_map<Key, int, KeyHash>, 4> lookup_;
    // star_[k] maps a k-simplex (k < dimension) to the top simplices containing it.
    std::array<Csr, 3> star_;
    std::vector<int> top_edges_;
    Csr neighbors_;
    Csr incident_edges_;
};

} // namespace pflat

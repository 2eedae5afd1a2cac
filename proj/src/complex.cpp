#include "pflat/complex.hpp"

#include "pflat/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>

namespace pflat {

namespace {

std::string describe(std::span<const VertexLabel> labels, std::span<const int> simplex)
{
    std::string s = "{";
    for (std::size_t m = 0; m < simplex.size(); ++m) {
        if (m) s += ",";
        s += std::to_string(labels[static_cast<std::size_t>(simplex[m])]);
    }
    return s + "}";
}

// All sorted (k+1)-subsets of a sorted vertex list, lexicographic.
void for_each_face(std::span<const int> simplex, int k, auto&& fn)
{
    const int n = static_cast<int>(simplex.size());
    std::vector<int> pick(static_cast<std::size_t>(k + 1));
    std::iota(pick.begin(), pick.end(), 0);
    std::vector<int> face(pick.size());
    while (true) {
        for (std::size_t m = 0; m < pick.size(); ++m)
            face[m] = simplex[static_cast<std::size_t>(pick[m])];
        fn(std::span<const int>(face));
        int m = k;
        while (m >= 0 && pick[static_cast<std::size_t>(m)] == n - k - 1 + m) --m;
        if (m < 0) break;
        ++pick[static_cast<std::size_t>(m)];
        for (int r = m + 1; r <= k; ++r)
            pick[static_cast<std::size_t>(r)] = pick[static_cast<std::size_t>(r - 1)] + 1;
    }
}

// Union-find over small index sets.
struct Components
{
    std::vector<int> parent;
    explicit Components(int n) : parent(static_cast<std::size_t>(n))
    {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int root(int x)
    {
        while (parent[static_cast<std::size_t>(x)] != x) {
            auto& p = parent[static_cast<std::size_t>(x)];
            p = parent[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }
    void join(int a, int b) { parent[static_cast<std::size_t>(root(a))] = root(b); }
};

} // namespace

SimplicialComplex::Key SimplicialComplex::make_key(std::span<const int> sorted)
{
    Key key{-1, -1, -1, -1};
    std::copy(sorted.begin(), sorted.end(), key.begin());
    return key;
}

SimplicialComplex SimplicialComplex::build(int dimension,
                                           std::span<const std::vector<VertexLabel>> top_simplices)
{
    if (dimension != 2 && dimension != 3)
        throw std::invalid_argument("dimension must be 2 or 3");
    if (top_simplices.empty()) throw std::invalid_argument("no top simplices given");

    SimplicialComplex cx;
    cx.dimension_ = dimension;
    const auto width = static_cast<std::size_t>(dimension + 1);

    for (const auto& s : top_simplices) {
        if (s.size() != width)
            throw std::invalid_argument("top simplex with " + std::to_string(s.size()) +
                                        " vertices in a " + std::to_string(dimension) +
                                        "-dimensional complex");
        cx.labels_.insert(cx.labels_.end(), s.begin(), s.end());
    }
    std::sort(cx.labels_.begin(), cx.labels_.end());
    cx.labels_.erase(std::unique(cx.labels_.begin(), cx.labels_.end()), cx.labels_.end());
    for (std::size_t v = 0; v < cx.labels_.size(); ++v)
        cx.label_index_.emplace(cx.labels_[v], static_cast<int>(v));

    std::vector<std::vector<int>> tops;
    tops.reserve(top_simplices.size());
    for (const auto& s : top_simplices) {
        std::vector<int> t;
        for (auto l : s) t.push_back(cx.label_index_.at(l));
        std::sort(t.begin(), t.end());
        if (std::adjacent_find(t.begin(), t.end()) != t.end())
            throw std::invalid_argument("simplex with repeated vertex " +
                                        describe(cx.labels_, t));
        tops.push_back(std::move(t));
    }
    std::sort(tops.begin(), tops.end());
    if (auto dup = std::adjacent_find(tops.begin(), tops.end()); dup != tops.end())
        throw DuplicateSimplex("simplex " + describe(cx.labels_, *dup) + " listed twice");

    // Faces of every dimension below the top.
    const int nv = cx.num_vertices();
    for (int v = 0; v < nv; ++v) {
        cx.simplices_[0].push_back(v);
        cx.lookup_[0].emplace(make_key(std::span<const int>(&v, 1)), v);
    }
    for (int k = 1; k < dimension; ++k) {
        std::set<std::vector<int>> faces;
        for (const auto& t : tops)
            for_each_face(t, k, [&](std::span<const int> f) { faces.emplace(f.begin(), f.end()); });
        int id = 0;
        for (const auto& f : faces) {
            cx.simplices_[static_cast<std::size_t>(k)].insert(
                cx.simplices_[static_cast<std::size_t>(k)].end(), f.begin(), f.end());
            cx.lookup_[static_cast<std::size_t>(k)].emplace(make_key(f), id++);
        }
    }
    {
        int id = 0;
        for (const auto& t : tops) {
            auto& store = cx.simplices_[static_cast<std::size_t>(dimension)];
            store.insert(store.end(), t.begin(), t.end());
            cx.lookup_[static_cast<std::size_t>(dimension)].emplace(make_key(t), id++);
        }
    }

    // Stars of lower simplices; rows come out sorted because tops are visited in id order.
    for (int k = 0; k < dimension; ++k) {
        std::vector<std::vector<int>> rows(static_cast<std::size_t>(cx.count(k)));
        for (int t = 0; t < cx.num_top(); ++t)
            for_each_face(cx.simplex(dimension, t), k, [&](std::span<const int> f) {
                rows[static_cast<std::size_t>(cx.find(f))].push_back(t);
            });
        auto& csr = cx.star_[static_cast<std::size_t>(k)];
        for (const auto& r : rows) {
            csr.data.insert(csr.data.end(), r.begin(), r.end());
            csr.offsets.push_back(static_cast<int>(csr.data.size()));
        }
    }

    for (int t = 0; t < cx.num_top(); ++t)
        for_each_face(cx.simplex(dimension, t), 1, [&](std::span<const int> f) {
            cx.top_edges_.push_back(cx.find(f));
        });

    {
        std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(nv));
        for (int e = 0; e < cx.num_edges(); ++e) {
            const auto [a, b] = cx.edge(e);
            adj[static_cast<std::size_t>(a)].emplace_back(b, e);
            adj[static_cast<std::size_t>(b)].emplace_back(a, e);
        }
        for (auto& row : adj) {
            std::sort(row.begin(), row.end());
            for (auto [w, e] : row) {
                cx.neighbors_.data.push_back(w);
                cx.incident_edges_.data.push_back(e);
            }
            cx.neighbors_.offsets.push_back(static_cast<int>(cx.neighbors_.data.size()));
            cx.incident_edges_.offsets.push_back(static_cast<int>(cx.incident_edges_.data.size()));
        }
    }

    cx.check_manifold();
    return cx;
}

void SimplicialComplex::check_manifold() const
{
    const int d = dimension_;

    for (int f = 0; f < count(d - 1); ++f) {
        const auto cofaces = star_span(d - 1, f);
        if (cofaces.size() != 2)
            throw NonManifold("face " + describe(labels_, simplex(d - 1, f)) + " has " +
                              std::to_string(cofaces.size()) + " cofaces (expected 2)");
    }

    Components whole(num_vertices());
    for (int e = 0; e < num_edges(); ++e) whole.join(edge(e)[0], edge(e)[1]);
    for (int v = 1; v < num_vertices(); ++v)
        if (whole.root(v) != whole.root(0)) throw NonManifold("complex is disconnected");

    // Vertex links: 2D a single cycle, 3D a connected closed surface with chi = 2.
    for (int v = 0; v < num_vertices(); ++v) {
        const auto nbrs = neighbors(v);
        auto local = [&](int w) {
            return static_cast<int>(std::lower_bound(nbrs.begin(), nbrs.end(), w) - nbrs.begin());
        };
        Components link(static_cast<int>(nbrs.size()));
        std::set<std::pair<int, int>> link_edges;
        int link_faces = 0;
        for (int t : star_span(0, v)) {
            std::vector<int> opp;
            for (int w : simplex(d, t))
                if (w != v) opp.push_back(local(w));
            for (std::size_t a = 0; a < opp.size(); ++a)
                for (std::size_t b = a + 1; b < opp.size(); ++b) {
                    link.join(opp[a], opp[b]);
                    link_edges.emplace(opp[a], opp[b]);
                }
            ++link_faces;
        }
        for (int w = 1; w < static_cast<int>(nbrs.size()); ++w)
            if (link.root(w) != link.root(0))
                throw NonManifold("link of vertex " + std::to_string(labels_[static_cast<std::size_t>(v)]) +
                                  " is disconnected");
        if (d == 3) {
            const int chi = static_cast<int>(nbrs.size()) - static_cast<int>(link_edges.size()) + link_faces;
            if (chi != 2)
                throw NonManifold("link of vertex " + std::to_string(labels_[static_cast<std::size_t>(v)]) +
                                  " has Euler characteristic " + std::to_string(chi) + " (expected 2)");
        }
    }
}

int SimplicialComplex::count(int k) const
{
    if (k < 0 || k > dimension_) return 0;
    return static_cast<int>(simplices_[static_cast<std::size_t>(k)].size() / static_cast<std::size_t>(k + 1));
}

std::span<const int> SimplicialComplex::simplex(int k, int id) const
{
    if (id < 0 || id >= count(k))
        throw UnknownSimplex("no " + std::to_string(k) + "-simplex with id " + std::to_string(id));
    const auto w = static_cast<std::size_t>(k + 1);
    return {simplices_[static_cast<std::size_t>(k)].data() + static_cast<std::size_t>(id) * w, w};
}

std::array<int, 2> SimplicialComplex::edge(int e) const
{
    const auto s = simplex(1, e);
    return {s[0], s[1]};
}

std::array<int, 3> SimplicialComplex::triangle(int t) const
{
    const auto s = simplex(2, t);
    return {s[0], s[1], s[2]};
}

std::array<int, 4> SimplicialComplex::tetrahedron(int t) const
{
    const auto s = simplex(3, t);
    return {s[0], s[1], s[2], s[3]};
}

int SimplicialComplex::vertex_index(VertexLabel label) const
{
    const auto it = label_index_.find(label);
    if (it == label_index_.end()) throw UnknownSimplex("unknown vertex " + std::to_string(label));
    return it->second;
}

int SimplicialComplex::find(std::span<const int> vertices) const
{
    const auto k = vertices.size();
    if (k == 0 || k > static_cast<std::size_t>(dimension_ + 1)) return -1;
    std::array<int, 4> sorted{-1, -1, -1, -1};
    std::copy(vertices.begin(), vertices.end(), sorted.begin());
    std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k));
    const auto& map = lookup_[k - 1];
    const auto it = map.find(sorted);
    return it == map.end() ? -1 : it->second;
}

int SimplicialComplex::find_edge(int a, int b) const
{
    const std::array<int, 2> v{a, b};
    return find(v);
}

int SimplicialComplex::edge_id(int a, int b) const
{
    const int e = find_edge(a, b);
    if (e < 0)
        throw UnknownSimplex("no edge between vertices " + std::to_string(a) + " and " + std::to_string(b));
    return e;
}

std::vector<int> SimplicialComplex::star(SimplexRef s) const
{
    if (s.dim < 0 || s.dim > dimension_ || s.id < 0 || s.id >= count(s.dim))
        throw UnknownSimplex("no " + std::to_string(s.dim) + "-simplex with id " + std::to_string(s.id));
    if (s.dim == dimension_) return {s.id};
    const auto row = star_span(s.dim, s.id);
    return {row.begin(), row.end()};
}

std::span<const int> SimplicialComplex::star_span(int k, int id) const
{
    if (k < 0 || k >= dimension_ || id < 0 || id >= count(k))
        throw UnknownSimplex("no " + std::to_string(k) + "-simplex with id " + std::to_string(id));
    return star_[static_cast<std::size_t>(k)].row(id);
}

std::span<const int> SimplicialComplex::top_edges(int top) const
{
    const std::size_t w = dimension_ == 2 ? 3 : 6;
    return {top_edges_.data() + static_cast<std::size_t>(top) * w, w};
}

std::array<int, 3> SimplicialComplex::triangle_edges(int t) const
{
    const auto [a, b, c] = triangle(t);
    return {edge_id(a, b), edge_id(a, c), edge_id(b, c)};
}

std::array<int, 4> SimplicialComplex::tetrahedron_faces(int t) const
{
    const auto v = tetrahedron(t);
    std::array<int, 4> faces{};
    for (int m = 0; m < 4; ++m) {
        std::array<int, 3> f{};
        int n = 0;
        for (int r = 0; r < 4; ++r)
            if (r != m) f[static_cast<std::size_t>(n++)] = v[static_cast<std::size_t>(r)];
        faces[static_cast<std::size_t>(m)] = find(f);
    }
    return faces;
}

std::span<const int> SimplicialComplex::neighbors(int v) const { return neighbors_.row(v); }

std::span<const int> SimplicialComplex::incident_edges(int v) const { return incident_edges_.row(v); }

int SimplicialComplex::euler_characteristic() const
{
    int chi = 0;
    for (int k = 0; k <= dimension_; ++k) chi += (k % 2 == 0 ? 1 : -1) * count(k);
    return chi;
}

std::vector<std::vector<VertexLabel>> SimplicialComplex::top_simplex_labels() const
{
    std::vector<std::vector<VertexLabel>> out;
    for (int t = 0; t < num_top(); ++t) {
        std::vector<VertexLabel> s;
        for (int v : simplex(dimension_, t)) s.push_back(labels_[static_cast<std::size_t>(v)]);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace pflat

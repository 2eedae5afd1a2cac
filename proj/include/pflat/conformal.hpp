#pragma once

#include "pflat/complex.hpp"
#include "pflat/metric.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pflat {

enum class ChartKind
{
    Packing,        ///< d_ij = e^{f_i}
    FixedInversive, ///< circles of radius e^{f_i} with fixed inversive distance eta_ij
    PerpBisector,   ///< l_ij = e^{(f_i + f_j)/2} L_ij, d_ij = l_ij / 2
};

std::string_view to_string(ChartKind kind);
/// Parses "packing", "inversive" or "perp_bisector"; throws std::invalid_argument.
ChartKind chart_kind_from_string(std::string_view name);

///
/// A conformal structure on a fixed complex: a map from vertex functions f to
/// metrics with dl_ij/df_i = d_ij and d_ij independent of f_k for k not in
/// {i, j}. Per-edge data is eta (FixedInversive) or L (PerpBisector), indexed
/// by edge id.
///
class ConformalChart
{
public:
    static ConformalChart packing(const SimplicialComplex& cx);
    static ConformalChart fixed_inversive(const SimplicialComplex& cx, std::vector<double> eta);
    /// Throws Degenerate unless (M, T, L) is a piecewise flat manifold.
    static ConformalChart perp_bisector(const SimplicialComplex& cx, std::vector<double> lengths);

    ChartKind kind() const noexcept { return kind_; }
    int num_edges() const noexcept { return num_edges_; }
    /// eta or L per edge; empty for Packing.
    std::span<const double> edge_data() const noexcept { return edge_data_; }

    friend bool operator==(const ConformalChart&, const ConformalChart&) = default;

private:
    ChartKind kind_ = ChartKind::Packing;
    int num_edges_ = 0;
    std::vector<double> edge_data_;
};

struct DomainReport
{
    bool ok = true;
    /// Edges where the chart yields a non-positive length (or l^2 <= 0).
    std::vector<int> bad_length_edges;
    /// Top simplices that are degenerate under the induced lengths.
    std::vector<int> degenerate_simplices;
    /// FixedInversive edges with eta < -1; allowed, but l^2 can vanish there.
    std::vector<int> flagged_edges;
};

/// Induced metric d = chart(f). Throws OutOfDomain if some length is not
/// positive or some simplex is degenerate.
PreMetric apply(const ConformalChart& chart, const SimplicialComplex& cx, std::span<const double> f);

/// Report-style domain membership; ok iff apply() would succeed.
DomainReport domain_check(const ConformalChart& chart, const SimplicialComplex& cx,
                          std::span<const double> f);

/// q_ij = dd_ij/df_j = dd_ji/df_i.
double q(const ConformalChart& chart, const SimplicialComplex& cx, std::span<const double> f, int edge);
std::vector<double> q_values(const ConformalChart& chart, const SimplicialComplex& cx,
                             std::span<const double> f);

} // namespace pflat

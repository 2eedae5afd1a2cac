#include "pflat/conformal.hpp"

#include "pflat/errors.hpp"
#include "pflat/simplex_geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace pflat {

namespace {

void require_size(std::size_t got, int want, const char* what)
{
    if (got != static_cast<std::size_t>(want))
        throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(want) +
                                    " values, got " + std::to_string(got));
}

bool simplex_ok(const SimplicialComplex& cx, std::span<const double> lengths, int top)
{
    const auto edges = cx.top_edges(top);
    auto l = [&](std::size_t m) { return lengths[static_cast<std::size_t>(edges[m])]; };
    try {
        if (cx.dimension() == 2) {
            const double lex[3] = {l(0), l(1), l(2)};
            cm_volume(lex, 2);
        } else {
            const std::array<double, 6> lex{l(0), l(1), l(2), l(3), l(4), l(5)};
            const TetLengths tl(lex);
            for (int skip = 0; skip < 4; ++skip) {
                std::array<int, 3> f{};
                int n = 0;
                for (int a = 0; a < 4; ++a)
                    if (a != skip) f[static_cast<std::size_t>(n++)] = a;
                const double face[3] = {tl(f[0], f[1]), tl(f[0], f[2]), tl(f[1], f[2])};
                cm_volume(face, 2);
            }
            cm_volume(lex, 3);
        }
    } catch (const Degenerate&) {
        return false;
    }
    return true;
}

// Fills d and reports domain problems; d is meaningful only when the report is ok.
PreMetric evaluate(const ConformalChart& chart, const SimplicialComplex& cx, std::span<const double> f,
                   DomainReport& report)
{
    require_size(f.size(), cx.num_vertices(), "vertex function");
    if (chart.num_edges() != cx.num_edges())
        throw std::invalid_argument("chart does not match the complex");
    for (double x : f)
        if (!std::isfinite(x)) throw OutOfDomain("vertex function is not finite");

    std::vector<double> d(2 * static_cast<std::size_t>(cx.num_edges()));
    const auto data = chart.edge_data();
    for (int e = 0; e < cx.num_edges(); ++e) {
        const auto [a, b] = cx.edge(e);
        const double fa = f[static_cast<std::size_t>(a)];
        const double fb = f[static_cast<std::size_t>(b)];
        double dab = 0;
        double dba = 0;
        bool length_ok = true;
        switch (chart.kind()) {
        case ChartKind::Packing:
            dab = std::exp(fa);
            dba = std::exp(fb);
            break;
        case ChartKind::FixedInversive: {
            const double eta = data[static_cast<std::size_t>(e)];
            if (eta < -1) report.flagged_edges.push_back(e);
            const double ra = std::exp(fa);
            const double rb = std::exp(fb);
            const double l2 = ra * ra + rb * rb + 2 * ra * rb * eta;
            if (!(l2 > 0)) {
                length_ok = false;
                break;
            }
            const double l = std::sqrt(l2);
            dab = ra * (ra + rb * eta) / l;
            dba = rb * (rb + ra * eta) / l;
            break;
        }
        case ChartKind::PerpBisector: {
            const double half = 0.5 * std::exp(0.5 * (fa + fb)) * data[static_cast<std::size_t>(e)];
            dab = half;
            dba = half;
            break;
        }
        }
        if (!length_ok || !(dab + dba > 0)) report.bad_length_edges.push_back(e);
        d[2 * static_cast<std::size_t>(e)] = dab;
        d[2 * static_cast<std::size_t>(e) + 1] = dba;
    }

    PreMetric metric(std::move(d));
    if (report.bad_length_edges.empty()) {
        const auto lengths = metric.lengths();
        for (int t = 0; t < cx.num_top(); ++t)
            if (!simplex_ok(cx, lengths, t)) report.degenerate_simplices.push_back(t);
    }
    report.ok = report.bad_length_edges.empty() && report.degenerate_simplices.empty();
    return metric;
}

} // namespace

std::string_view to_string(ChartKind kind)
{
    switch (kind) {
    case ChartKind::Packing: return "packing";
    case ChartKind::FixedInversive: return "inversive";
    case ChartKind::PerpBisector: return "perp_bisector";
    }
    return "unknown";
}

ChartKind chart_kind_from_string(std::string_view name)
{
    if (name == "packing") return ChartKind::Packing;
    if (name == "inversive") return ChartKind::FixedInversive;
    if (name == "perp_bisector") return ChartKind::PerpBisector;
    throw std::invalid_argument("unknown chart kind '" + std::string(name) + "'");
}

ConformalChart ConformalChart::packing(const SimplicialComplex& cx)
{
    ConformalChart c;
    c.kind_ = ChartKind::Packing;
    c.num_edges_ = cx.num_edges();
    return c;
}

ConformalChart ConformalChart::fixed_inversive(const SimplicialComplex& cx, std::vector<double> eta)
{
    require_size(eta.size(), cx.num_edges(), "inversive distances");
    for (double x : eta)
        if (!std::isfinite(x)) throw std::invalid_argument("inversive distance is not finite");
    ConformalChart c;
    c.kind_ = ChartKind::FixedInversive;
    c.num_edges_ = cx.num_edges();
    c.edge_data_ = std::move(eta);
    return c;
}

ConformalChart ConformalChart::perp_bisector(const SimplicialComplex& cx, std::vector<double> lengths)
{
    require_size(lengths.size(), cx.num_edges(), "base lengths");
    for (double x : lengths)
        if (!(x > 0) || !std::isfinite(x)) throw Degenerate("base length must be positive");
    for (int t = 0; t < cx.num_top(); ++t)
        if (!simplex_ok(cx, lengths, t))
            throw Degenerate("base lengths make top simplex " + std::to_string(t) + " degenerate");
    ConformalChart c;
    c.kind_ = ChartKind::PerpBisector;
    c.num_edges_ = cx.num_edges();
    c.edge_data_ = std::move(lengths);
    return c;
}

PreMetric apply(const ConformalChart& chart, const SimplicialComplex& cx, std::span<const double> f)
{
    DomainReport report;
    auto d = evaluate(chart, cx, f, report);
    if (!report.bad_length_edges.empty())
        throw OutOfDomain("non-positive length on edge " + std::to_string(report.bad_length_edges.front()));
    if (!report.degenerate_simplices.empty())
        throw OutOfDomain("degenerate top simplex " + std::to_string(report.degenerate_simplices.front()));
    return d;
}

DomainReport domain_check(const ConformalChart& chart, const SimplicialComplex& cx,
                          std::span<const double> f)
{
    DomainReport report;
    try {
        evaluate(chart, cx, f, report);
    } catch (const OutOfDomain&) {
        report.ok = false;
    }
    return report;
}

double q(const ConformalChart& chart, const SimplicialComplex& cx, std::span<const double> f, int edge)
{
    require_size(f.size(), cx.num_vertices(), "vertex function");
    const auto [a, b] = cx.edge(edge);
    const double fa = f[static_cast<std::size_t>(a)];
    const double fb = f[static_cast<std::size_t>(b)];
    switch (chart.kind()) {
    case ChartKind::Packing: return 0.0;
    case ChartKind::FixedInversive: {
        const double eta = chart.edge_data()[static_cast<std::size_t>(edge)];
        const double ra = std::exp(fa);
        const double rb = std::exp(fb);
        const double l2 = ra * ra + rb * rb + 2 * ra * rb * eta;
        if (!(l2 > 0)) throw OutOfDomain("non-positive length on edge " + std::to_string(edge));
        const double l = std::sqrt(l2);
        return ra * ra * rb * rb * (eta * eta - 1) / (l * l * l);
    }
    case ChartKind::PerpBisector:
        return 0.25 * std::exp(0.5 * (fa + fb)) * chart.edge_data()[static_cast<std::size_t>(edge)];
    }
    return 0.0;
}

std::vector<double> q_values(const ConformalChart& chart, const SimplicialComplex& cx,
                             std::span<const double> f)
{
    std::vector<double> out(static_cast<std::size_t>(cx.num_edges()));
    for (int e = 0; e < cx.num_edges(); ++e) out[static_cast<std::size_t>(e)] = q(chart, cx, f, e);
    return out;
}

} // namespace pflat

#include "support.hpp"

#include "pflat/curvature.hpp"
#include "pflat/errors.hpp"
#include "pflat/mesh_io.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace pflat;
using namespace pflat::testing;
using std::numbers::pi;

namespace {

const char* kSphere = R"(pfmesh 1
# boundary of a tetrahedron
dimension 2
vertices 4
1
2
3
4
simplices 4
1 2 3
1 2 4
1 3 4
2 3 4
chart packing
f 4
1 -0.69314718055994529
2 -0.69314718055994529   # trailing comment
3 -0.69314718055994529

4 -0.69314718055994529
)";

int parse_error_line(const std::string& text)
{
    try {
        parse_mesh(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

std::string replace(std::string text, const std::string& from, const std::string& to)
{
    const auto at = text.find(from);
    REQUIRE(at != std::string::npos);
    return text.replace(at, from.size(), to);
}

} // namespace

TEST_SUITE("mesh_io")
{
    TEST_CASE("parse a packing sphere")
    {
        const auto file = parse_mesh(std::string(kSphere));
        CHECK(file.version == 1);
        CHECK(file.dimension == 2);
        CHECK(file.vertices.size() == 4);
        CHECK(file.simplices.size() == 4);
        CHECK(file.chart == ChartKind::Packing);
        CHECK(file.f.size() == 4);
        CHECK(file.edge_values.empty());
        CHECK(file.target.empty());
        const auto mesh = load(file);
        for (double k : vertex_curvature(mesh.complex, mesh.metric)) CHECK(k == doctest::Approx(pi).epsilon(1e-12));
    }

    TEST_CASE("round trip of generated files")
    {
        std::mt19937_64 rng(71);
        for (int dim : {2, 3})
            for (const auto& inst : random_instances(dim, rng)) {
                CAPTURE(inst.name);
                auto file = to_mesh_file(inst.cx, inst.chart, inst.f);
                for (int v = 0; v < inst.cx.num_vertices(); ++v)
                    file.target.push_back({inst.cx.label(v), std::normal_distribution<double>(0, 1)(rng)});
                const auto text = serialize(file);
                const auto again = parse_mesh(text);
                CHECK(again == file);
                CHECK(serialize(again) == text);
                const auto mesh = load(again);
                CHECK(mesh.chart == inst.chart);
                CHECK(mesh.f == inst.f);
                CHECK(mesh.metric == apply(inst.chart, inst.cx, inst.f));

                const auto raw = to_mesh_file(inst.cx, apply(inst.chart, inst.cx, inst.f));
                CHECK_FALSE(raw.chart.has_value());
                CHECK(parse_mesh(serialize(raw)) == raw);
                CHECK(load(raw).metric == apply(inst.chart, inst.cx, inst.f));
            }
    }

    TEST_CASE("serialized doubles are exact")
    {
        const auto cx = sphere_tet();
        const std::vector<double> f{0.1, 1.0 / 3, -std::nextafter(0.7, 1.0), 1e-300};
        const auto file = to_mesh_file(cx, ConformalChart::packing(cx), f);
        CHECK(load(parse_mesh(serialize(file))).f == f);
    }

    TEST_CASE("labels need not be contiguous")
    {
        const std::string text = replace(replace(std::string(kSphere), "\n4\nsimplices", "\n40\nsimplices"), "2 3 4\n", "2 3 40\n");
        auto fixed = replace(replace(text, "1 3 4\n", "1 3 40\n"), "1 2 4\n", "1 2 40\n");
        fixed = replace(fixed, "\n4 -0.69", "\n40 -0.69");
        const auto mesh = load(parse_mesh(fixed));
        CHECK(mesh.complex.label(3) == 40);
    }

    TEST_CASE("parse errors carry line numbers")
    {
        const std::string s = kSphere;
        CHECK(parse_error_line("pfmash 1\n") == 1);
        CHECK(parse_error_line("pfmesh 2\n") == 1);
        CHECK(parse_error_line("") == 1);
        CHECK(parse_error_line(replace(s, "dimension 2", "dimension 4")) == 3);
        CHECK(parse_error_line(replace(s, "1 2 3\n", "1 2\n")) == 10);
        CHECK(parse_error_line(replace(s, "1 2 3\n", "1 2 9\n")) == 10);
        CHECK(parse_error_line(replace(s, "1 2 3\n", "1 2 2\n")) == 10);
        CHECK(parse_error_line(replace(s, "chart packing", "chart circles")) == 14);
        CHECK(parse_error_line(replace(s, "2 -0.69314718055994529", "2 abc")) == 17);
        CHECK(parse_error_line(replace(s, "2 -0.69314718055994529", "2 nan")) == 17);
        CHECK(parse_error_line(replace(s, "2 -0.69314718055994529", "1 0.5")) == 17);
        CHECK(parse_error_line(replace(s, "chart packing", "widget 3")) == 14);
        CHECK(parse_error_line(replace(s, "vertices 4", "vertices -4")) == 4);
        CHECK(parse_error_line(replace(s, "\n2\n3\n", "\n2\n2\n")) == 7);
    }

    TEST_CASE("truncated and incomplete files")
    {
        const std::string s = kSphere;
        // Cut inside the f block: the error points one past the last line.
        const auto cut = s.substr(0, s.find("3 -0.69"));
        CHECK(parse_error_line(cut) == 18);
        CHECK(parse_error_line(s.substr(0, s.find("chart packing"))) == 14);
        // No f block at all.
        CHECK(parse_error_line(s.substr(0, s.find("f 4"))) == 15);
    }

    TEST_CASE("block order and exclusivity")
    {
        const std::string s = kSphere;
        CHECK(parse_error_line("pfmesh 1\nsimplices 1\n1 2 3\n") == 2);
        CHECK(parse_error_line("pfmesh 1\ndimension 2\nf 1\n1 0\n") == 3);
        CHECK(parse_error_line(s + "metric 12\n") > 0);
        CHECK(parse_error_line(s + "edge_values 6\n1 2 1\n1 3 1\n1 4 1\n2 3 1\n2 4 1\n3 4 1\n") > 0);
        CHECK(parse_error_line(replace(s, "chart packing", "chart inversive")) > 0);
        CHECK(parse_error_line(s + "dimension 2\n") == 21);
        // Edge data must name edges.
        const auto inv = replace(s, "chart packing", "chart inversive\nedge_values 6\n1 2 1\n1 3 1\n1 4 1\n2 3 1\n2 4 1\n3 3 1");
        CHECK(parse_error_line(inv) == 21);
        const auto ok = replace(s, "chart packing", "chart inversive\nedge_values 6\n1 2 1\n1 3 1\n1 4 1\n2 3 1\n2 4 1\n4 3 1");
        CHECK(parse_mesh(ok).edge_values.size() == 6);
    }

    TEST_CASE("load errors")
    {
        const std::string s = kSphere;
        // Open disk.
        const auto open = replace(replace(s, "simplices 4", "simplices 3"), "2 3 4\n", "");
        CHECK_THROWS_AS(load(parse_mesh(open)), NonManifold);
        // Perpendicular bisector lengths that violate the triangle inequality.
        const auto pb = replace(s, "chart packing", "chart perp_bisector\nedge_values 6\n1 2 5\n1 3 1\n1 4 1\n2 3 1\n2 4 1\n3 4 1");
        CHECK_THROWS_AS(load(parse_mesh(pb)), Degenerate);
        // Out of the chart domain.
        const auto far = replace(pb, "1 2 5", "1 2 1");
        CHECK_NOTHROW(load(parse_mesh(far)));
        CHECK_THROWS_AS(load(parse_mesh(replace(far, "3 -0.69314718055994529", "3 -4"))), OutOfDomain);
        // A declared vertex that is in no simplex.
        const auto extra = replace(replace(replace(s, "vertices 4", "vertices 5"), "\n4\nsimplices", "\n4\n5\nsimplices"),
                                   "f 4\n", "f 5\n5 0\n");
        CHECK_THROWS_AS(load(parse_mesh(extra)), std::invalid_argument);
    }

    TEST_CASE("OFF import")
    {
        std::ostringstream off;
        const auto points = icosahedron_coordinates();
        const auto cx = icosahedron();
        off << "OFF\n12 20 30\n";
        for (const auto& p : points) off << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
        for (const auto& t : cx.top_simplex_labels()) off << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
        std::istringstream in(off.str());
        const auto file = off_to_mesh(in);
        CHECK(file.chart == ChartKind::PerpBisector);
        const auto mesh = load(file);
        for (double k : vertex_curvature(mesh.complex, mesh.metric)) CHECK(k == doctest::Approx(pi / 3).epsilon(1e-9));

        std::istringstream quad("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
        CHECK_THROWS_AS(off_to_mesh(quad), ParseError);
        std::istringstream bad("PLY\n");
        CHECK_THROWS_AS(off_to_mesh(bad), ParseError);
    }
}

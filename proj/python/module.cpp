#include "pflat/complex.hpp"
#include "pflat/conformal.hpp"
#include "pflat/curvature.hpp"
#include "pflat/errors.hpp"
#include "pflat/mesh_io.hpp"
#include "pflat/metric.hpp"
#include "pflat/solver.hpp"
#include "pflat/spectrum.hpp"
#include "pflat/variation.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace pflat;

namespace {

using Vec = std::vector<double>;

py::dict definiteness_dict(const DefinitenessReport& r)
{
    py::dict out;
    out["dual_lengths"] = r.dual_lengths;
    out["dual_lengths_positive"] = r.dual_lengths_positive;
    out["nonpositive_dual_edges"] = r.nonpositive_dual_edges;
    out["inversive_eta_nonnegative"] = r.inversive_eta_nonnegative;
    out["directed_positive"] = r.directed_positive;
    out["perp_bisector"] = r.perp_bisector;
    out["centers_in_circumcircles"] = r.centers_in_circumcircles;
    out["packing_3d"] = r.packing_3d;
    out["any_sufficient_condition"] = r.any_sufficient_condition;
    out["convex_packing"] = r.convex_packing;
    out["convex_general"] = r.convex_general;
    out["laplacian_eigenvalues"] = r.laplacian_eigenvalues;
    out["laplacian_min"] = r.laplacian_min;
    out["laplacian_max"] = r.laplacian_max;
    out["laplacian_max_nonconstant"] = r.laplacian_max_nonconstant;
    out["constant_residual"] = r.constant_residual;
    out["kernel_dimension"] = r.kernel_dimension;
    out["nsd_constant_kernel"] = r.nsd_constant_kernel;
    out["hessian_min"] = r.hessian_min;
    out["hessian_max"] = r.hessian_max;
    return out;
}

py::dict metric_dict(const MetricReport& r)
{
    py::dict out;
    out["ok"] = r.ok;
    out["triangle_residuals"] = r.triangle_residuals;
    out["residual_violations"] = r.residual_violations;
    out["nonpositive_edges"] = r.nonpositive_edges;
    out["degenerate_simplices"] = r.degenerate_simplices;
    out["all_directed_positive"] = r.all_directed_positive;
    out["all_dual_lengths_positive"] = r.all_dual_lengths_positive;
    return out;
}

Gauge gauge_from(const py::object& gauge)
{
    if (gauge.is_none()) return Gauge::zero_mean();
    return Gauge::pin(gauge.cast<int>());
}

py::dict solve(const SimplicialComplex& cx, const ConformalChart& chart, const Vec& f0, const py::object& target,
               const std::string& method, const py::object& gauge, double tolerance, int max_iterations, double dt)
{
    SolveOptions opts;
    opts.tolerance = tolerance;
    opts.max_iterations = max_iterations;
    const Gauge g = gauge_from(gauge);
    auto problem = [&] {
        if (py::isinstance<py::str>(target)) {
            const auto name = target.cast<std::string>();
            if (name == "flat") return SolveProblem::flat(cx, chart, f0, g, opts);
            if (name == "csc")
                return cx.dimension() == 2 ? SolveProblem::constant_curvature_2d(cx, chart, f0, g, opts)
                                           : SolveProblem::constant_scalar_3d(cx, chart, f0, g, opts);
            throw std::invalid_argument("target must be 'flat', 'csc' or a list of curvatures");
        }
        return SolveProblem::prescribed(cx, chart, f0, target.cast<Vec>(), g, opts);
    }();

    SolveTrace trace;
    Vec f;
    if (method == "newton") {
        f = newton_solve(problem, trace);
    } else if (method == "flow") {
        FlowOptions flow;
        flow.dt = dt;
        flow.max_iterations = max_iterations;
        f = gradient_flow(problem, flow, trace);
    } else {
        throw std::invalid_argument("method must be 'newton' or 'flow'");
    }
    py::dict out;
    out["f"] = f;
    out["residuals"] = trace.residuals();
    out["status"] = trace.status;
    out["converged"] = trace.converged;
    return out;
}

} // namespace

PYBIND11_MODULE(_pflat, m)
{
    m.doc() = "Piecewise flat manifolds: curvature, conformal variations and prescribed curvature";

    auto base = py::register_exception<Error>(m, "PflatError", PyExc_RuntimeError);
    py::register_exception<NonManifold>(m, "NonManifold", base.ptr());
    py::register_exception<DuplicateSimplex>(m, "DuplicateSimplex", base.ptr());
    py::register_exception<UnknownSimplex>(m, "UnknownSimplex", base.ptr());
    py::register_exception<Degenerate>(m, "Degenerate", base.ptr());
    py::register_exception<OutOfDomain>(m, "OutOfDomain", base.ptr());
    py::register_exception<Infeasible>(m, "Infeasible", base.ptr());
    py::register_exception<MaxIterations>(m, "MaxIterations", base.ptr());
    py::register_exception<LeftDomain>(m, "LeftDomain", base.ptr());
    py::register_exception<SingularHessian>(m, "SingularHessian", base.ptr());
    py::register_exception<NotCritical>(m, "NotCritical", base.ptr());
    py::register_exception<AbortNonMonotone>(m, "AbortNonMonotone", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", base.ptr());

    py::class_<SimplicialComplex>(m, "Complex")
        .def(py::init([](int dimension, const std::vector<std::vector<VertexLabel>>& simplices) {
                 return SimplicialComplex::build(dimension, simplices);
             }),
             py::arg("dimension"), py::arg("simplices"))
        .def_property_readonly("dimension", &SimplicialComplex::dimension)
        .def_property_readonly("num_vertices", &SimplicialComplex::num_vertices)
        .def_property_readonly("num_edges", &SimplicialComplex::num_edges)
        .def_property_readonly("num_top", &SimplicialComplex::num_top)
        .def_property_readonly("euler_characteristic", &SimplicialComplex::euler_characteristic)
        .def_property_readonly("labels",
                               [](const SimplicialComplex& cx) {
                                   std::vector<VertexLabel> out;
                                   for (int v = 0; v < cx.num_vertices(); ++v) out.push_back(cx.label(v));
                                   return out;
                               })
        .def_property_readonly("edges",
                               [](const SimplicialComplex& cx) {
                                   std::vector<std::array<int, 2>> out;
                                   for (int e = 0; e < cx.num_edges(); ++e) out.push_back(cx.edge(e));
                                   return out;
                               })
        .def("edge_id", &SimplicialComplex::edge_id, py::arg("a"), py::arg("b"))
        .def("top_simplices", &SimplicialComplex::top_simplex_labels)
        .def("__repr__", [](const SimplicialComplex& cx) {
            std::ostringstream s;
            s << "<Complex dim=" << cx.dimension() << " vertices=" << cx.num_vertices() << " edges=" << cx.num_edges()
              << " top=" << cx.num_top() << '>';
            return s.str();
        });

    py::class_<ConformalChart>(m, "Chart")
        .def_static("packing", &ConformalChart::packing, py::arg("complex"))
        .def_static("fixed_inversive", &ConformalChart::fixed_inversive, py::arg("complex"), py::arg("eta"))
        .def_static("perp_bisector", &ConformalChart::perp_bisector, py::arg("complex"), py::arg("lengths"))
        .def_property_readonly("kind", [](const ConformalChart& c) { return std::string(to_string(c.kind())); })
        .def_property_readonly("edge_data", [](const ConformalChart& c) { return Vec(c.edge_data().begin(), c.edge_data().end()); });

    py::class_<PreMetric>(m, "PreMetric")
        .def(py::init<Vec>(), py::arg("directed"))
        .def_property_readonly("values", [](const PreMetric& d) { return Vec(d.values().begin(), d.values().end()); })
        .def("lengths", &PreMetric::lengths)
        .def("__call__", &PreMetric::operator(), py::arg("complex"), py::arg("source"), py::arg("target"));

    m.def("apply", [](const ConformalChart& chart, const SimplicialComplex& cx, const Vec& f) { return apply(chart, cx, f); },
          py::arg("chart"), py::arg("complex"), py::arg("f"));
    m.def("in_domain",
          [](const ConformalChart& chart, const SimplicialComplex& cx, const Vec& f) { return domain_check(chart, cx, f).ok; },
          py::arg("chart"), py::arg("complex"), py::arg("f"));
    m.def("q_values",
          [](const ConformalChart& chart, const SimplicialComplex& cx, const Vec& f) { return q_values(chart, cx, f); },
          py::arg("chart"), py::arg("complex"), py::arg("f"));
    m.def("check_metric", [](const SimplicialComplex& cx, const PreMetric& d) { return metric_dict(check_metric(cx, d)); },
          py::arg("complex"), py::arg("metric"));

    m.def("vertex_curvature", &vertex_curvature, py::arg("complex"), py::arg("metric"));
    m.def("edge_curvature", [](const SimplicialComplex& cx, const Vec& l) { return edge_curvature_3d(cx, l); },
          py::arg("complex"), py::arg("lengths"));
    m.def("ehr", [](const SimplicialComplex& cx, const Vec& l) { return ehr(cx, l); }, py::arg("complex"),
          py::arg("lengths"));
    m.def("total_volume", [](const SimplicialComplex& cx, const Vec& l) { return total_volume(cx, l); },
          py::arg("complex"), py::arg("lengths"));
    m.def("einstein_lambda", [](const SimplicialComplex& cx, const Vec& l) { return einstein_lambda(cx, l); },
          py::arg("complex"), py::arg("lengths"));
    m.def("dual_lengths", &dual_lengths, py::arg("complex"), py::arg("metric"));
    m.def("vertex_volumes", &vertex_volumes, py::arg("complex"), py::arg("metric"));

    m.def(
        "curvature_jacobian",
        [](const SimplicialComplex& cx, const ConformalChart& chart, const Vec& f) {
            return curvature_jacobian(cx, chart, f).to_dense();
        },
        py::arg("complex"), py::arg("chart"), py::arg("f"));
    m.def(
        "laplacian", [](const SimplicialComplex& cx, const PreMetric& d) { return laplacian(cx, d).to_dense(); },
        py::arg("complex"), py::arg("metric"));
    m.def(
        "ehr_hessian",
        [](const SimplicialComplex& cx, const ConformalChart& chart, const Vec& f) {
            return ehr_hessian(cx, chart, f).as_operator().to_dense();
        },
        py::arg("complex"), py::arg("chart"), py::arg("f"));
    m.def(
        "functional_F",
        [](const SimplicialComplex& cx, const ConformalChart& chart, const Vec& start, const Vec& end,
           const std::vector<Vec>& waypoints) { return functional_F(cx, chart, start, end, waypoints); },
        py::arg("complex"), py::arg("chart"), py::arg("start"), py::arg("end"), py::arg("waypoints") = std::vector<Vec>{});
    m.def(
        "definiteness_report",
        [](const SimplicialComplex& cx, const ConformalChart& chart, const Vec& f) {
            return definiteness_dict(definiteness_report(cx, chart, f));
        },
        py::arg("complex"), py::arg("chart"), py::arg("f"));

    m.def("solve", &solve, py::arg("complex"), py::arg("chart"), py::arg("f0"), py::arg("target") = "csc",
          py::arg("method") = "newton", py::arg("gauge") = py::none(), py::arg("tolerance") = 1e-10,
          py::arg("max_iterations") = 50, py::arg("dt") = 0.0,
          "Solve for f with the prescribed curvature. `target` is 'flat', 'csc' or per-vertex curvatures; "
          "`gauge` is None for zero mean or a vertex index to pin.");

    py::class_<Mesh>(m, "Mesh")
        .def_readonly("complex", &Mesh::complex)
        .def_readonly("chart", &Mesh::chart)
        .def_readonly("f", &Mesh::f)
        .def_readonly("metric", &Mesh::metric)
        .def_readonly("target", &Mesh::target);
    m.def("load_mesh", [](const std::filesystem::path& path) { return load(read_mesh(path)); }, py::arg("path"));
    m.def("parse_mesh", [](const std::string& text) { return load(parse_mesh(text)); }, py::arg("text"));
    m.def(
        "serialize_mesh",
        [](const SimplicialComplex& cx, const ConformalChart& chart, const Vec& f) {
            return serialize(to_mesh_file(cx, chart, f));
        },
        py::arg("complex"), py::arg("chart"), py::arg("f"));
}

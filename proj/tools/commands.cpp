#include "commands.hpp"

#include "pflat/curvature.hpp"
#include "pflat/errors.hpp"
#include "pflat/finite_difference.hpp"
#include "pflat/mesh_io.hpp"
#include "pflat/solver.hpp"
#include "pflat/spectrum.hpp"
#include "pflat/variation.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

namespace pflat::cli {

namespace {

using nlohmann::json;

constexpr double kJacobianTolerance = 1e-6;
constexpr double kSymmetryTolerance = 1e-10;
constexpr double kRowSumTolerance = 1e-10;
constexpr double kScalingTolerance = 1e-8;
constexpr double kHessianTolerance = 1e-5;
constexpr double kQTolerance = 1e-7;

std::string format(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json edge_labels(const SimplicialComplex& cx, int e)
{
    const auto [a, b] = cx.edge(e);
    return json::array({cx.label(a), cx.label(b)});
}

json simplex_labels(const SimplicialComplex& cx, int k, int id)
{
    json out = json::array();
    for (int v : cx.simplex(k, id)) out.push_back(cx.label(v));
    return out;
}

json error_json(const std::string& kind, const std::string& message)
{
    return {{"ok", false}, {"error", {{"kind", kind}, {"message", message}}}};
}

void print(const json& j)
{
    std::cout << j.dump(2) << '\n';
}

double max_abs(std::span<const double> x)
{
    double m = 0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

const ConformalChart& require_chart(const Mesh& mesh, const char* command)
{
    if (!mesh.chart) throw std::invalid_argument(std::string(command) + " needs a mesh with a chart block");
    return *mesh.chart;
}

// ---------------------------------------------------------------- check

int cmd_check(const std::string& path)
{
    const MeshFile file = read_mesh(path);
    json out{{"file", path}};

    SimplicialComplex cx;
    try {
        cx = SimplicialComplex::build(file.dimension, file.simplices);
    } catch (const Error& e) {
        out["ok"] = false;
        out["manifold"] = {{"ok", false}, {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
        print(out);
        return kValidation;
    }
    out["manifold"] = {{"ok", true},
                       {"dimension", cx.dimension()},
                       {"vertices", cx.num_vertices()},
                       {"edges", cx.num_edges()},
                       {"triangles", cx.num_triangles()},
                       {"tetrahedra", cx.num_tetrahedra()},
                       {"euler_characteristic", cx.euler_characteristic()}};

    bool ok = true;
    PreMetric d;
    bool have_metric = false;
    if (file.chart) {
        json domain{{"chart", to_string(*file.chart)}};
        try {
            const ConformalChart chart = file_chart(file, cx);
            const std::vector<double> f = file_vertex_values(file.f, cx);
            const DomainReport report = domain_check(chart, cx, f);
            domain["ok"] = report.ok;
            domain["bad_length_edges"] = json::array();
            for (int e : report.bad_length_edges) domain["bad_length_edges"].push_back(edge_labels(cx, e));
            domain["degenerate_simplices"] = json::array();
            for (int t : report.degenerate_simplices)
                domain["degenerate_simplices"].push_back(simplex_labels(cx, cx.dimension(), t));
            domain["flagged_edges"] = json::array();
            for (int e : report.flagged_edges) domain["flagged_edges"].push_back(edge_labels(cx, e));
            ok = ok && report.ok;
            if (report.ok) {
                d = apply(chart, cx, f);
                have_metric = true;
            }
        } catch (const Error& e) {
            domain["ok"] = false;
            domain["error"] = {{"kind", e.kind()}, {"message", e.what()}};
            ok = false;
        }
        out["domain"] = domain;
    } else {
        d = load(file).metric;
        have_metric = true;
    }

    if (have_metric) {
        const MetricReport report = check_metric(cx, d);
        json metric{{"ok", report.ok},
                    {"max_triangle_residual", max_abs(report.triangle_residuals)},
                    {"all_directed_positive", report.all_directed_positive},
                    {"all_dual_lengths_positive", report.all_dual_lengths_positive}};
        metric["residual_violations"] = json::array();
        for (int t : report.residual_violations) metric["residual_violations"].push_back(simplex_labels(cx, 2, t));
        metric["nonpositive_edges"] = json::array();
        for (int e : report.nonpositive_edges) metric["nonpositive_edges"].push_back(edge_labels(cx, e));
        metric["degenerate_simplices"] = json::array();
        for (int t : report.degenerate_simplices)
            metric["degenerate_simplices"].push_back(simplex_labels(cx, cx.dimension(), t));
        out["metric"] = metric;
        ok = ok && report.ok;
    }
    out["ok"] = ok;
    print(out);
    return ok ? kOk : kValidation;
}

// ----------------------------------------------------------- curvature

int cmd_curvature(const std::string& path, const std::string& format_name)
{
    const Mesh mesh = load(read_mesh(path));
    const auto& cx = mesh.complex;
    const CurvatureReport r = curvature_report(cx, mesh.metric);
    const bool three = r.dimension == 3;

    if (format_name == "csv") {
        // entity,a,b,curvature,volume,residual
        std::cout << "entity,a,b,curvature,volume,residual\n";
        for (int v = 0; v < cx.num_vertices(); ++v) {
            const auto u = static_cast<std::size_t>(v);
            std::cout << "vertex," << cx.label(v) << ",," << format(r.vertex_curvature[u]) << ','
                      << (three ? format(r.vertex_volumes[u]) : "") << ','
                      << (three ? format(r.csc_residuals[u]) : "") << '\n';
        }
        if (three)
            for (int e = 0; e < cx.num_edges(); ++e) {
                const auto [a, b] = cx.edge(e);
                const auto u = static_cast<std::size_t>(e);
                std::cout << "edge," << cx.label(a) << ',' << cx.label(b) << ',' << format(r.edge_curvature[u])
                          << ",," << format(r.einstein_residuals[u]) << '\n';
            }
        auto summary = [](const char* name, double value) {
            std::cout << name << ",,," << format(value) << ",,\n";
        };
        summary("curvature_sum", r.curvature_sum);
        summary("total_volume", r.total_volume);
        if (three) {
            summary("ehr", r.ehr);
            summary("lambda", r.lambda);
        } else {
            summary("gauss_bonnet_defect", r.gauss_bonnet_defect);
        }
        return kOk;
    }

    json out{{"dimension", r.dimension},
             {"euler_characteristic", cx.euler_characteristic()},
             {"curvature_sum", r.curvature_sum},
             {"total_volume", r.total_volume}};
    if (three) {
        out["ehr"] = r.ehr;
        out["lambda"] = r.lambda;
    } else {
        out["gauss_bonnet_defect"] = r.gauss_bonnet_defect;
    }
    out["vertices"] = json::array();
    for (int v = 0; v < cx.num_vertices(); ++v) {
        const auto u = static_cast<std::size_t>(v);
        json row{{"label", cx.label(v)}, {"K", r.vertex_curvature[u]}};
        if (three) {
            row["V"] = r.vertex_volumes[u];
            row["csc_residual"] = r.csc_residuals[u];
        }
        out["vertices"].push_back(row);
    }
    if (three) {
        out["edges"] = json::array();
        for (int e = 0; e < cx.num_edges(); ++e) {
            const auto u = static_cast<std::size_t>(e);
            out["edges"].push_back({{"edge", edge_labels(cx, e)},
                                    {"K", r.edge_curvature[u]},
                                    {"einstein_residual", r.einstein_residuals[u]}});
        }
    }
    print(out);
    return kOk;
}

// ------------------------------------------------------- jacobian-test

double relative(double err, double scale)
{
    return scale > 0 ? err / scale : err;
}

int cmd_jacobian_test(const std::string& path, int trials, std::uint64_t seed, double perturbation)
{
    const Mesh mesh = load(read_mesh(path));
    const auto& cx = mesh.complex;
    const ConformalChart& chart = require_chart(mesh, "jacobian-test");
    if (trials < 0) throw std::invalid_argument("--trials must be non-negative");
    if (trials == 0) std::cerr << "warning: --trials 0 runs no checks\n";

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int n = cx.num_vertices();
    const bool three = cx.dimension() == 3;

    double jac_err = 0, sym_err = 0, row_err = 0, scaling_err = 0, hess_err = 0, q_err = 0;
    int completed = 0;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> f;
        double amplitude = perturbation;
        for (int attempt = 0; attempt < 60; ++attempt, amplitude *= 0.5) {
            f = mesh.f;
            for (double& x : f) x += amplitude * unit(rng);
            if (domain_check(chart, cx, f).ok) break;
            f.clear();
        }
        if (f.empty()) throw OutOfDomain("could not sample an in-domain f near the mesh's f");

        const SparseOperator jac = curvature_jacobian(cx, chart, f);
        const Eigen::MatrixXd fd = fd_jacobian(
            [&](std::span<const double> x) { return vertex_curvature(cx, apply(chart, cx, x)); }, f);
        const Eigen::MatrixXd analytic = jac.to_dense();
        jac_err = std::max(jac_err, relative((analytic - fd).cwiseAbs().maxCoeff(), fd.cwiseAbs().maxCoeff()));
        sym_err = std::max(sym_err, relative(jac.symmetry_defect(), jac.max_abs()));
        if (three) {
            const auto k = vertex_curvature(cx, apply(chart, cx, f));
            const auto k1 = jac.row_sums();
            double diff = 0;
            for (std::size_t i = 0; i < k.size(); ++i) diff = std::max(diff, std::abs(k1[i] - k[i]));
            scaling_err = std::max(scaling_err, relative(diff, std::max(max_abs(k), jac.max_abs())));

            std::vector<double> v(static_cast<std::size_t>(n));
            for (double& x : v) x = unit(rng);
            const double form = ehr_hessian(cx, chart, f).evaluate(v);
            const double second = fd_second_directional(
                [&](std::span<const double> x) { return ehr(cx, apply(chart, cx, x).lengths()); }, f, v);
            hess_err = std::max(hess_err, relative(std::abs(form - second), std::max(std::abs(second), 1e-8)));
        } else {
            row_err = std::max(row_err, relative(max_abs(jac.row_sums()), jac.max_abs()));
        }

        const auto qs = q_values(chart, cx, f);
        double q_abs = 0, q_scale = 0;
        for (int e = 0; e < cx.num_edges(); ++e) {
            const auto [a, b] = cx.edge(e);
            auto dir = [&](std::span<const double> x) {
                return apply(chart, cx, x).directed(e, true); // d_ab, a < b
            };
            std::vector<double> x = f;
            const double h = default_fd_step(f);
            x[static_cast<std::size_t>(b)] = f[static_cast<std::size_t>(b)] + h;
            const double plus = dir(x);
            x[static_cast<std::size_t>(b)] = f[static_cast<std::size_t>(b)] - h;
            const double minus = dir(x);
            const double numeric = (plus - minus) / (2 * h);
            q_abs = std::max(q_abs, std::abs(numeric - qs[static_cast<std::size_t>(e)]));
            q_scale = std::max(q_scale, std::abs(numeric));
            (void)a;
        }
        q_err = std::max(q_err, relative(q_abs, q_scale));
        ++completed;
    }

    json errors{{"jacobian", jac_err}, {"symmetry", sym_err}, {"q", q_err}};
    json tolerances{{"jacobian", kJacobianTolerance}, {"symmetry", kSymmetryTolerance}, {"q", kQTolerance}};
    bool passed = jac_err < kJacobianTolerance && sym_err < kSymmetryTolerance && q_err < kQTolerance;
    if (three) {
        errors["scaling"] = scaling_err;
        errors["hessian"] = hess_err;
        tolerances["scaling"] = kScalingTolerance;
        tolerances["hessian"] = kHessianTolerance;
        passed = passed && scaling_err < kScalingTolerance && hess_err < kHessianTolerance;
    } else {
        errors["row_sums"] = row_err;
        tolerances["row_sums"] = kRowSumTolerance;
        passed = passed && row_err < kRowSumTolerance;
    }
    json out{{"ok", passed},
             {"trials", completed},
             {"seed", seed},
             {"chart", to_string(chart.kind())},
             {"max_relative_errors", errors},
             {"tolerances", tolerances}};
    if (trials == 0) out["warning"] = "no trials run";
    print(out);
    return passed ? kOk : kValidation;
}

// --------------------------------------------------------------- solve

struct SolveArgs
{
    std::string path;
    std::string target = "flat";
    std::string method = "newton";
    std::string gauge = "zero-mean";
    std::string out;
    std::string trace;
    int max_iterations = -1;
    double tolerance = 1e-10;
    double dt = 0;
};

int cmd_solve(const SolveArgs& args)
{
    const MeshFile file = read_mesh(args.path);
    Mesh mesh = load(file);
    const auto& cx = mesh.complex;
    const ConformalChart& chart = require_chart(mesh, "solve");

    Gauge gauge;
    if (args.gauge.rfind("pin:", 0) == 0) {
        const auto text = args.gauge.substr(4);
        VertexLabel label = 0;
        try {
            std::size_t used = 0;
            label = std::stoll(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } catch (const std::exception&) {
            throw std::invalid_argument("--gauge pin:LABEL needs an integer vertex label");
        }
        gauge = Gauge::pin(cx.vertex_index(label));
    } else if (args.gauge != "zero-mean") {
        throw std::invalid_argument("--gauge must be zero-mean or pin:LABEL");
    }

    SolveOptions opts;
    opts.tolerance = args.tolerance;
    if (args.max_iterations >= 0) opts.max_iterations = args.max_iterations;

    auto problem = [&] {
        if (args.target == "flat") return SolveProblem::flat(cx, chart, mesh.f, gauge, opts);
        if (args.target == "csc")
            return cx.dimension() == 2 ? SolveProblem::constant_curvature_2d(cx, chart, mesh.f, gauge, opts)
                                       : SolveProblem::constant_scalar_3d(cx, chart, mesh.f, gauge, opts);
        if (!mesh.target) throw std::invalid_argument("--target file needs a target block in the mesh");
        return SolveProblem::prescribed(cx, chart, mesh.f, *mesh.target, gauge, opts);
    }();

    std::string trace_path = args.trace;
    if (trace_path.empty() && !args.out.empty()) trace_path = args.out + ".trace.csv";
    SolveTrace trace;
    auto write_trace = [&] {
        if (trace_path.empty()) return;
        std::ofstream t(trace_path);
        if (!t) throw std::runtime_error("cannot write " + trace_path);
        trace.write_csv(t);
    };

    std::vector<double> f;
    try {
        if (args.method == "newton") {
            f = newton_solve(problem, trace);
        } else {
            FlowOptions flow;
            flow.dt = args.dt;
            if (args.max_iterations >= 0) flow.max_iterations = args.max_iterations;
            f = gradient_flow(problem, flow, trace);
        }
    } catch (const Error& e) {
        const std::string kind = e.kind();
        if (kind != "MaxIterations" && kind != "LeftDomain" && kind != "AbortNonMonotone" &&
            kind != "SingularHessian")
            throw;
        write_trace();
        json out = error_json(kind, e.what());
        out["status"] = trace.status;
        out["iterations"] = trace.entries.empty() ? 0 : trace.entries.back().iteration;
        out["residuals"] = trace.residuals();
        if (!trace_path.empty()) out["trace"] = trace_path;
        print(out);
        std::cerr << "error: " << e.what() << '\n';
        return kNonConvergence;
    }

    write_trace();
    if (!args.out.empty()) {
        MeshFile solved = to_mesh_file(cx, chart, f);
        solved.target = file.target;
        write_mesh(args.out, solved);
    }
    json out{{"ok", true},
             {"status", trace.status},
             {"method", args.method},
             {"iterations", trace.entries.back().iteration},
             {"residual", trace.entries.back().residual},
             {"residuals", trace.residuals()}};
    if (!args.out.empty()) out["out"] = args.out;
    if (!trace_path.empty()) out["trace"] = trace_path;
    print(out);
    return kOk;
}

// ------------------------------------------------------------ spectrum

int cmd_spectrum(const std::string& path, const std::string& format_name)
{
    const Mesh mesh = load(read_mesh(path));
    const auto& cx = mesh.complex;
    const SparseOperator lap = laplacian(cx, mesh.metric);
    const std::vector<double> ones(static_cast<std::size_t>(cx.num_vertices()), 1.0);
    const double constant_residual = max_abs(lap.apply(ones));

    std::vector<double> eigenvalues;
    json out{{"constant_residual", constant_residual}};
    if (mesh.chart) {
        const DefinitenessReport r = definiteness_report(cx, *mesh.chart, mesh.f);
        eigenvalues = r.laplacian_eigenvalues;
        out["laplacian_min"] = r.laplacian_min;
        out["laplacian_max"] = r.laplacian_max;
        out["laplacian_max_nonconstant"] = r.laplacian_max_nonconstant;
        out["kernel_dimension"] = r.kernel_dimension;
        out["kernel_constant_defect"] = r.kernel_constant_defect;
        out["nsd_constant_kernel"] = r.nsd_constant_kernel;
        out["conditions"] = {{"dual_lengths_positive", r.dual_lengths_positive},
                             {"inversive_eta_nonnegative", r.inversive_eta_nonnegative},
                             {"directed_positive", r.directed_positive},
                             {"perp_bisector", r.perp_bisector},
                             {"centers_in_circumcircles", r.centers_in_circumcircles},
                             {"packing_3d", r.packing_3d},
                             {"any", r.any_sufficient_condition}};
        if (cx.dimension() == 3)
            out["convexity"] = {{"packing_nonnegative_K", r.convex_packing}, {"general", r.convex_general}};
        out["nonpositive_dual_edges"] = json::array();
        for (int e : r.nonpositive_dual_edges) out["nonpositive_dual_edges"].push_back(edge_labels(cx, e));
        out["hessian_min"] = r.hessian_min;
        out["hessian_max"] = r.hessian_max;
        try {
            const RigidityReport rig = rigidity_check(cx, *mesh.chart, mesh.f);
            out["rigidity"] = {{"rigid", rig.rigid},
                               {"nullspace_dimension", rig.nullspace_dimension},
                               {"constant_defect", rig.constant_defect},
                               {"basis_residuals", rig.basis_residuals}};
        } catch (const NotCritical&) {
            out["rigidity"] = nullptr;
        }
    } else {
        eigenvalues = symmetric_eigenvalues(lap);
    }

    if (format_name == "csv") {
        // name,index,value; flags are written as 0/1
        std::cout << "name,index,value\n";
        for (std::size_t i = 0; i < eigenvalues.size(); ++i)
            std::cout << "eigenvalue," << i << ',' << format(eigenvalues[i]) << '\n';
        for (const auto& [key, value] : out.items()) {
            if (value.is_boolean())
                std::cout << key << ",," << (value.get<bool>() ? 1 : 0) << '\n';
            else if (value.is_number_integer())
                std::cout << key << ",," << value.get<long long>() << '\n';
            else if (value.is_number())
                std::cout << key << ",," << format(value.get<double>()) << '\n';
            else if (value.is_object() && key != "rigidity")
                for (const auto& [flag, x] : value.items())
                    if (x.is_boolean()) std::cout << key << '.' << flag << ",," << (x.get<bool>() ? 1 : 0) << '\n';
        }
        return kOk;
    }
    out["eigenvalues"] = eigenvalues;
    print(out);
    return kOk;
}

// ------------------------------------------------------------ off2mesh

int cmd_off2mesh(const std::string& path, const std::string& out_path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    const MeshFile mesh = off_to_mesh(in);
    if (out_path.empty())
        std::cout << serialize(mesh);
    else
        write_mesh(out_path, mesh);
    return kOk;
}

} // namespace

int run(int argc, char** argv)
{
    CLI::App app{"Discrete conformal variations of piecewise flat 2- and 3-manifolds"};
    app.require_subcommand(1);

    std::string path;
    std::string format_name = "json";

    auto* check = app.add_subcommand("check", "Validate complex, chart domain and metric");
    check->add_option("path", path, "mesh file")->required();

    auto* curvature = app.add_subcommand("curvature", "Curvatures, EHR, volume and residuals");
    curvature->add_option("path", path, "mesh file")->required();
    curvature->add_option("--format", format_name, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    int trials = 5;
    std::uint64_t seed = 1;
    double perturbation = 0.1;
    auto* jacobian = app.add_subcommand("jacobian-test", "Compare analytic variations with finite differences");
    jacobian->add_option("path", path, "mesh file")->required();
    jacobian->add_option("--trials", trials, "number of random f");
    jacobian->add_option("--seed", seed, "random seed");
    jacobian->add_option("--perturb", perturbation, "amplitude of the random perturbation of f");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Solve a prescribed curvature problem in the mesh's chart");
    solve->add_option("path", solve_args.path, "mesh file")->required();
    solve->add_option("--target", solve_args.target, "flat, csc or file")->check(CLI::IsMember({"flat", "csc", "file"}));
    solve->add_option("--method", solve_args.method, "newton or flow")->check(CLI::IsMember({"newton", "flow"}));
    solve->add_option("--gauge", solve_args.gauge, "zero-mean or pin:LABEL");
    solve->add_option("--out", solve_args.out, "solved mesh file");
    solve->add_option("--trace", solve_args.trace, "trace CSV (default OUT.trace.csv)");
    solve->add_option("--max-iter", solve_args.max_iterations, "iteration limit");
    solve->add_option("--tol", solve_args.tolerance, "residual tolerance (infinity norm)");
    solve->add_option("--dt", solve_args.dt, "initial flow time step (0 = automatic)");

    auto* spectrum = app.add_subcommand("spectrum", "Laplacian eigenvalues and definiteness diagnostics");
    spectrum->add_option("path", path, "mesh file")->required();
    spectrum->add_option("--format", format_name, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    std::string out_path;
    auto* off2mesh = app.add_subcommand("off2mesh", "Convert a triangle OFF surface to a mesh file");
    off2mesh->add_option("path", path, "OFF file")->required();
    off2mesh->add_option("--out", out_path, "output mesh file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*check) return cmd_check(path);
        if (*curvature) return cmd_curvature(path, format_name);
        if (*jacobian) return cmd_jacobian_test(path, trials, seed, perturbation);
        if (*solve) return cmd_solve(solve_args);
        if (*spectrum) return cmd_spectrum(path, format_name);
        if (*off2mesh) return cmd_off2mesh(path, out_path);
    } catch (const ParseError& e) {
        json out = error_json("ParseError", e.what());
        out["error"]["line"] = e.line();
        print(out);
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const Error& e) {
        print(error_json(e.kind(), e.what()));
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        print(error_json("InvalidInput", e.what()));
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    }
    return kUsage;
}

} // namespace pflat::cli

"""Curvature and conformal variations of piecewise flat 2- and 3-manifolds."""

from ._pflat import (
    AbortNonMonotone,
    Chart,
    Complex,
    Degenerate,
    DuplicateSimplex,
    Infeasible,
    LeftDomain,
    MaxIterations,
    Mesh,
    NonManifold,
    NotCritical,
    OutOfDomain,
    ParseError,
    PflatError,
    PreMetric,
    SingularHessian,
    UnknownSimplex,
    apply,
    check_metric,
    curvature_jacobian,
    definiteness_report,
    dual_lengths,
    edge_curvature,
    ehr,
    ehr_hessian,
    einstein_lambda,
    functional_F,
    in_domain,
    laplacian,
    load_mesh,
    parse_mesh,
    q_values,
    serialize_mesh,
    solve,
    total_volume,
    vertex_curvature,
    vertex_volumes,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

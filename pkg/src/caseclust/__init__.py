"""Switch-statement lowering: size-bounded jump-table clustering."""

__version__ = "0.1.0"

from .core import (
    CaseSet,
    ClusterParams,
    ClusterStats,
    OracleResult,
    Partition,
    Violation,
    cluster_oracle,
    cluster_quadratic,
    cluster_stats,
    cluster_windowed,
    density,
    validate_partition,
)
from .estimator import CaseClusterer
from .exceptions import (
    CaseClusterError,
    EmptyInputError,
    ParseError,
    PlanOverflowError,
    PreconditionError,
    SizeLimitError,
    SpecError,
    ValidationError,
)
from .ingest import GeneratorSpec, Trace, generate_cases, generate_trace, parse_cases, parse_trace
from .layout import DEFAULT, LoweringPlan, build_plan, lookup
from .predictor import Penalties, PredictorModel, SimReport, compare_plans, simulate

__all__ = [
    "CaseSet",
    "ClusterParams",
    "ClusterStats",
    "OracleResult",
    "Partition",
    "Violation",
    "cluster_oracle",
    "cluster_quadratic",
    "cluster_stats",
    "cluster_windowed",
    "density",
    "validate_partition",
    "CaseClusterer",
    "CaseClusterError",
    "EmptyInputError",
    "ParseError",
    "PlanOverflowError",
    "PreconditionError",
    "SizeLimitError",
    "SpecError",
    "ValidationError",
    "GeneratorSpec",
    "Trace",
    "generate_cases",
    "generate_trace",
    "parse_cases",
    "parse_trace",
    "DEFAULT",
    "LoweringPlan",
    "build_plan",
    "lookup",
    "Penalties",
    "PredictorModel",
    "SimReport",
    "compare_plans",
    "simulate",
]

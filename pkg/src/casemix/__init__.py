"""Case-mix planning engine: throughput bounds, alterations, comparisons."""

from .model import (
    Activity,
    PatientType,
    Scenario,
    SubType,
    Violation,
    Zone,
    ZoneKind,
    effective_ward_duration,
    scale_horizon,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)
from .lp import LinearProgram, LpSolution, NumericalError, solve_lp
from .pwl import PwlApprox, add_pwl_variable, build_square_pwl
from .capacity import (
    CapacityResult,
    FeasibilityReport,
    UNCAPPED,
    bound_analysis,
    check_feasibility,
    effective_type_bounds,
    max_throughput,
    report_utilization,
    subtype_bounds,
)
from .alteration import (
    AlterationRequest,
    AlterationResult,
    alter_subtype,
    alter_type,
    sweep_delta,
)
from .mcdm import (
    ComparisonReport,
    ProximityScore,
    SimilarityReport,
    compare,
    proximity,
    scaled_distance,
    similarity,
    similarity_boundary,
)
from .store import StoredScenario, load_scenario, save_scenario

__version__ = "0.1.0"

"""Two-species prey-predator reaction-diffusion dynamics on finite
connected weighted graphs, with discrete calculus operators and a
verification harness for the qualitative solution guarantees."""

from .calculus import (
    gradient_form,
    gradient_form_at,
    gradient_length,
    gradient_length_at,
    green_identity_residual,
    integrate,
    laplacian,
    laplacian_at,
    normal_derivative,
)
from .diagnostics import (
    DiagnosticsRecord,
    Scenario,
    TrajectoryCollector,
    VerificationReport,
    bundled_scenarios,
    record,
    verify_identities,
    verify_theorems,
    write_states,
    write_timeseries,
)
from .graph import (
    BoundedSubgraph,
    GraphError,
    GraphParseError,
    VertexField,
    WeightedGraph,
    check_connected,
    generate,
    induce_bounded_subgraph,
    parse_graph,
    serialize_graph,
)
from .model import (
    Bounds,
    Equilibrium,
    LVParams,
    bounds,
    coexistence_holds,
    dissipation_identity_residual,
    equilibrium,
    f_functional,
    lyapunov_density,
    lyapunov_functional,
    reaction,
)
from .solver import (
    InvariantViolation,
    NonFiniteError,
    SimulationResult,
    SolverConfig,
    State,
    enforce_neumann,
    simulate,
    stable_dt,
    step,
)

__version__ = "0.1.0"

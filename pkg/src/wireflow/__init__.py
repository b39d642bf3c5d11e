"""DC power flow for overhead-wire traction circuits.

Constant-power loads make the nodal equations of a DC wire network
nonlinear, and for high enough demands no solution exists at all.  This
package solves the power flow with Newton-Raphson and, when the demands
exceed what the wires can physically deliver, finds the maximal uniform
demand scale for which a solution still exists — the quantity an on-board
battery or a slower acceleration profile has to make up for.

Public surface:

* :mod:`wireflow.network` — circuit description, nodal assembly, residual
  and Jacobian evaluation.
* :mod:`wireflow.linsolve` — LU solves with loud singularity reporting and
  condition estimation.
* :mod:`wireflow.newton` — Newton-Raphson solver at a fixed demand scale.
* :mod:`wireflow.search` — grid and bracketing searches for the maximal
  admissible scale, plus the admissible-interval verifier.
* :mod:`wireflow.analysis` — branch currents/powers, scale sweeps, timing.
* :mod:`wireflow.scenarios` — reference circuits and the route driver.
* :mod:`wireflow.netlist` — the JSON netlist document format.
* :mod:`wireflow.cli` — the ``wireflow`` command.
"""

from .network import (
    BadResistanceError,
    CircuitError,
    CircuitSpec,
    DisconnectedCircuitError,
    MissingSourceError,
    MnaSystem,
    NodePartition,
    NodeRoleError,
    Potentials,
    UnknownNodeError,
    ZeroPotentialError,
    assemble,
    jacobian,
    kirchhoff_imbalance,
    residual,
    rhs,
)
from .linsolve import LinearSolveReport, condition_estimate, solve_linear
from .newton import NrConfig, NrOutcome, initial_guess, newton_solve
from .search import (
    DichotomyReport,
    SearchBudgetError,
    SearchConfig,
    SearchResult,
    TraceEntry,
    search_basic,
    search_efficient,
    verify_dichotomy,
)
from .analysis import (
    BranchReport,
    SweepRecord,
    SweepReport,
    TimingSummary,
    alpha_sweep,
    branch_report,
    timing_harness,
)
from .scenarios import (
    LadderScenario,
    TimelineStep,
    deficit_energy_j,
    route_circuit,
    single_load_circuit,
    straight_route_timeline,
    toy_case_1,
    toy_case_2,
    trapezoid_power_profile,
)
from .netlist import (
    NetlistError,
    circuit_from_doc,
    circuit_to_doc,
    dumps_netlist,
    load_netlist,
    loads_netlist,
    save_netlist,
)

__version__ = "0.1.0"

__all__ = [
    "BadResistanceError",
    "BranchReport",
    "CircuitError",
    "CircuitSpec",
    "DichotomyReport",
    "DisconnectedCircuitError",
    "LadderScenario",
    "LinearSolveReport",
    "MissingSourceError",
    "MnaSystem",
    "NetlistError",
    "NodePartition",
    "NodeRoleError",
    "NrConfig",
    "NrOutcome",
    "Potentials",
    "SearchBudgetError",
    "SearchConfig",
    "SearchResult",
    "SweepRecord",
    "SweepReport",
    "TimelineStep",
    "TimingSummary",
    "TraceEntry",
    "UnknownNodeError",
    "ZeroPotentialError",
    "alpha_sweep",
    "assemble",
    "branch_report",
    "circuit_from_doc",
    "circuit_to_doc",
    "condition_estimate",
    "deficit_energy_j",
    "dumps_netlist",
    "initial_guess",
    "jacobian",
    "kirchhoff_imbalance",
    "load_netlist",
    "loads_netlist",
    "newton_solve",
    "residual",
    "rhs",
    "route_circuit",
    "save_netlist",
    "search_basic",
    "search_efficient",
    "single_load_circuit",
    "solve_linear",
    "straight_route_timeline",
    "timing_harness",
    "toy_case_1",
    "toy_case_2",
    "trapezoid_power_profile",
    "verify_dichotomy",
    "__version__",
]

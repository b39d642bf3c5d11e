"""Search for the maximal admissible demand scale in [0, 1].

Scaling every power demand by a common factor always yields a solvable
system at scale 0 (zero currents, flat profile at the source level) and,
for overloaded circuits, an unsolvable one at scale 1.  Under the standard
regularity assumptions the admissible scales form a closed interval
[0, alpha_0] whose right end point carries a singular Newton Jacobian, so
Newton failures are an honest oracle for "scale too large".

Two strategies are provided:

* :func:`search_basic` walks a fixed grid upward from 0 and stops at the
  first failure — simple, but it visits every grid point even when the
  unscaled problem is solvable.
* :func:`search_efficient` starts at scale 1 (so feasible circuits finish
  after a single Newton run), brackets the boundary with bisection against
  a stack of failed scales, and when the bracket gets tight it doubles the
  Newton budget and sharpens the bracket tolerance tenfold before retrying
  the most recent failure.  The run ends when the tolerance drops below
  the optimality target, leaving the accepted scale within roughly that
  target of the boundary.

Newton warm starts reuse the most recently accepted potentials; after a
failed run the iterate may be nonsense, so the last good vector (or the
linear initial guess) is used instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import MnaSystem, Potentials
from .newton import NrConfig, NrOutcome, initial_guess, newton_solve

__all__ = [
    "SearchConfig",
    "TraceEntry",
    "SearchResult",
    "SearchBudgetError",
    "DichotomyReport",
    "search_basic",
    "search_efficient",
    "verify_dichotomy",
    "DICHOTOMY_MAX_ITERS",
]

#: Default Newton budget for :func:`verify_dichotomy`.  Grid points right
#: at the solvability boundary converge only linearly (the Jacobian turns
#: singular there), which needs far more than the search's inner default.
DICHOTOMY_MAX_ITERS = 50


@dataclass(frozen=True)
class SearchConfig:
    """Tolerances and budgets for the scale search.

    ``delta_alpha`` is the grid step of the basic strategy.  ``delta_act``
    is the bracket width below which the efficient strategy reacts to the
    ill-conditioning near the boundary (budget doubling + tolerance
    sharpening); it shrinks during the run and the run stops once it falls
    below ``delta_opt``.  ``c_bi`` places the bisection trial inside the
    bracket.  ``max_outer`` is a safety net only.
    """

    delta_alpha: float = 1e-2
    delta_opt: float = 1e-5
    delta_act: float = 1e-2
    c_bi: float = 0.5
    nr: NrConfig = field(default_factory=NrConfig)
    max_outer: int = 200

    def __post_init__(self):
        if not (0.0 < self.delta_opt <= self.delta_act <= 1.0):
            raise ValueError("need 0 < delta_opt <= delta_act <= 1")
        if not (0.0 < self.c_bi < 1.0):
            raise ValueError("c_bi must lie strictly between 0 and 1")
        if not (0.0 < self.delta_alpha < 1.0):
            raise ValueError("delta_alpha must lie strictly between 0 and 1")
        if self.max_outer < 1:
            raise ValueError("max_outer must be at least 1")


@dataclass(frozen=True)
class TraceEntry:
    """One Newton invocation: the scale tried and how the run ended."""

    alpha: float
    converged: bool
    iterations: int
    residual_norm: float


@dataclass(frozen=True)
class SearchResult:
    """Accepted scale and solution.

    ``alpha_hat`` is the largest scale a Newton run accepted; ``phi`` the
    potentials at that scale; ``fully_supplied`` is true iff the unscaled
    problem was solved (``alpha_hat == 1``).  ``trace`` lists every Newton
    invocation in order; ``failed_alphas`` is the final stack of scales
    whose runs failed (all strictly above ``alpha_hat``).
    """

    alpha_hat: float
    phi: Potentials
    fully_supplied: bool
    trace: tuple[TraceEntry, ...]
    failed_alphas: tuple[float, ...]


class SearchBudgetError(RuntimeError):
    """The outer iteration cap was hit; carries the trace so far."""

    def __init__(self, message: str, trace: tuple[TraceEntry, ...]):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class DichotomyReport:
    """Outcome of sampling the admissible interval.

    Truthy iff every sampled scale solved.  ``failed_alpha`` is the first
    offending scale otherwise.
    """

    passed: bool
    failed_alpha: float | None
    alphas: tuple[float, ...]

    def __bool__(self) -> bool:
        return self.passed


def _entry(alpha: float, outcome: NrOutcome) -> TraceEntry:
    return TraceEntry(
        alpha=float(alpha),
        converged=outcome.converged,
        iterations=outcome.iterations,
        residual_norm=outcome.final_residual_norm,
    )


def search_basic(sys: MnaSystem, cfg: SearchConfig | None = None) -> SearchResult:
    """Grid walk from scale 0 upward; stop at the first Newton failure.

    The grid is ``{0, delta_alpha, 2*delta_alpha, ...}`` with 1 appended
    when the step does not land on it exactly.  The last scale that
    converged is returned with tolerance ``delta_alpha``.  A failure at
    scale 0 cannot occur for a well-posed circuit (the scale-0 system is
    linear); it would surface as a singular-matrix error.
    """
    cfg = cfg or SearchConfig()
    steps = int(np.floor(1.0 / cfg.delta_alpha + 1e-12))
    grid = [k * cfg.delta_alpha for k in range(steps + 1)]
    if grid[-1] != 1.0:
        grid.append(1.0)

    start = initial_guess(sys)
    trace: list[TraceEntry] = []
    accepted: tuple[float, Potentials] | None = None
    failed: list[float] = []
    for alpha in grid:
        outcome = newton_solve(sys, alpha, start, cfg.nr)
        trace.append(_entry(alpha, outcome))
        if not outcome.converged:
            failed.append(alpha)
            break
        accepted = (alpha, outcome.phi)
        start = outcome.phi
    if accepted is None:
        raise np.linalg.LinAlgError(
            "Newton failed at scale 0; the linear system is not solvable"
        )
    alpha_hat, phi = accepted
    return SearchResult(
        alpha_hat=alpha_hat,
        phi=phi,
        fully_supplied=(alpha_hat == 1.0),
        trace=tuple(trace),
        failed_alphas=tuple(failed),
    )


def search_efficient(
    sys: MnaSystem, cfg: SearchConfig | None = None
) -> SearchResult:
    """Bracketing search from scale 1 with adaptive Newton budgets.

    One outer iteration = one Newton run.  Success raises the accepted
    scale; failure pushes the scale onto a stack.  While the gap between
    the accepted scale and the most recent failure is at least the active
    tolerance, the next trial bisects that gap.  Once the gap is tighter,
    the Newton budget is doubled and the active tolerance divided by ten
    (both stay that way for the rest of the run), and the most recent
    failure is retried — it may well have been a budget artefact rather
    than true unsolvability.  The run returns when no failures are
    outstanding or when the active tolerance undercuts ``delta_opt``.
    """
    cfg = cfg or SearchConfig()
    start_phi = initial_guess(sys)

    alpha_trial = 1.0
    alpha_hat = 0.0
    phi_hat: Potentials | None = None
    stack: list[float] = []
    trace: list[TraceEntry] = []
    max_iters = cfg.nr.max_iters
    delta_act = cfg.delta_act

    def run_newton(alpha: float) -> NrOutcome:
        warm = phi_hat if phi_hat is not None else start_phi
        outcome = newton_solve(
            sys, alpha, warm, NrConfig(cfg.nr.delta_con, max_iters)
        )
        trace.append(_entry(alpha, outcome))
        return outcome

    def finish() -> SearchResult:
        nonlocal phi_hat
        if phi_hat is None:
            # Nothing accepted yet: close out with the always-solvable
            # scale-0 run so the result carries a genuine solution.
            outcome = run_newton(0.0)
            if not outcome.converged:
                raise np.linalg.LinAlgError(
                    "Newton failed at scale 0; the linear system is not solvable"
                )
            phi_hat = outcome.phi
        return SearchResult(
            alpha_hat=alpha_hat,
            phi=phi_hat,
            fully_supplied=(alpha_hat == 1.0),
            trace=tuple(trace),
            failed_alphas=tuple(stack),
        )

    for _ in range(cfg.max_outer):
        outcome = run_newton(alpha_trial)
        if outcome.converged:
            alpha_hat = alpha_trial
            phi_hat = outcome.phi
        else:
            stack.append(alpha_trial)

        if not stack:
            return finish()

        if abs(alpha_hat - stack[-1]) >= delta_act:
            alpha_trial = alpha_hat + cfg.c_bi * (stack[-1] - alpha_hat)
        else:
            max_iters *= 2
            delta_act /= 10.0
            if delta_act < cfg.delta_opt:
                return finish()
            alpha_trial = stack.pop()

    raise SearchBudgetError(
        f"scale search did not terminate within {cfg.max_outer} outer "
        f"iterations",
        tuple(trace),
    )


def verify_dichotomy(
    sys: MnaSystem,
    alpha_hat: float,
    grid_size: int,
    cfg: NrConfig | None = None,
) -> DichotomyReport:
    """Check that every scale on a uniform grid over [0, alpha_hat] solves.

    This is the executable face of the solvability dichotomy: below the
    accepted scale there must be no holes.  Newton runs warm-start from the
    previous grid point and use a generous iteration budget by default,
    because convergence right at the boundary degrades to linear.
    """
    if grid_size < 1:
        raise ValueError("grid_size must be at least 1")
    if not (0.0 <= alpha_hat <= 1.0):
        raise ValueError("alpha_hat must lie in [0, 1]")
    nr = cfg or NrConfig(max_iters=DICHOTOMY_MAX_ITERS)
    alphas = tuple(float(a) for a in np.linspace(0.0, alpha_hat, grid_size))
    phi = initial_guess(sys)
    for alpha in alphas:
        outcome = newton_solve(sys, alpha, phi, nr)
        if not outcome.converged:
            return DichotomyReport(False, alpha, alphas)
        phi = outcome.phi
    return DichotomyReport(True, None, alphas)

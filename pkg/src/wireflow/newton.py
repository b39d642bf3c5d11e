"""Newton-Raphson solver for the scaled DC power flow system at fixed scale.

Pure undamped Newton steps, as the outer demand-scaling search expects:
robustness near the solvability boundary is the outer loop's job, not a
line search's.  Non-convergence is data, not an exception — the search
treats a failed solve as evidence that the scale is not admissible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linsolve import solve_linear
from .network import (
    ZERO_PHI_GUARD,
    MnaSystem,
    Potentials,
    _jacobian_unchecked,
    _residual_unchecked,
)

__all__ = ["NrConfig", "NrOutcome", "initial_guess", "newton_solve"]


@dataclass(frozen=True)
class NrConfig:
    """Newton iteration budget and convergence tolerance.

    ``delta_con`` bounds the Euclidean norm of the full mismatch vector.
    The norm mixes ampere rows and volt rows; that is accepted because the
    default 1e-8 sits far below any physically meaningful current or
    voltage on 600 V-class networks.
    """

    delta_con: float = 1e-8
    max_iters: int = 10

    def __post_init__(self):
        if not (self.delta_con > 0.0):
            raise ValueError("delta_con must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True)
class NrOutcome:
    """Outcome of one Newton run.

    ``converged`` implies ``final_residual_norm < delta_con``.  On failure
    ``phi`` is the last iterate (diagnostic value only; it may be far from
    any solution) and ``failure`` names the cause: ``"max_iters"``,
    ``"singular_jacobian"`` or ``"nonfinite_iterate"``.
    ``residual_norms`` records the mismatch norm after each update and
    ``jacobian_log_abs_det`` the log |det| of the last factorized Jacobian,
    a proximity signal for the solvability boundary (reported, never used
    as a stopping rule).
    """

    converged: bool
    phi: Potentials
    iterations: int
    final_residual_norm: float
    residual_norms: tuple[float, ...]
    failure: str | None
    jacobian_log_abs_det: float | None


def initial_guess(sys: MnaSystem) -> Potentials:
    """Start vector from one linear solve with frozen load currents.

    Load potentials are frozen at the nominal source level (the mean level
    when sources differ) and the resulting constant right-hand side is
    solved for the potentials.  For a single feeder and load this is the
    exact first-order voltage-drop profile, which starts Newton on the
    physical (high-voltage) solution branch.
    """
    if sys.partition.n_source == 0:
        raise ValueError("system has no source rows")
    u_nom = float(sys.source.mean())
    if abs(u_nom) < ZERO_PHI_GUARD:
        raise ValueError("mean source level is zero; cannot freeze load currents")
    b0 = np.zeros(sys.dim)
    j = sys.partition.load_slice
    b0[j] = -sys.demand / u_nom
    b0[sys.partition.source_slice] = sys.source
    report = solve_linear(sys.matrix, b0)
    if report.singular_flag:
        raise np.linalg.LinAlgError(
            "conductance matrix is singular; circuit is not well posed"
        )
    return report.solution


def newton_solve(
    sys: MnaSystem,
    alpha: float,
    phi_init: Potentials,
    cfg: NrConfig = NrConfig(),
) -> NrOutcome:
    """Run Newton-Raphson on the scaled system at fixed ``alpha``.

    Every iteration performs one full update then tests convergence, so at
    least one linear solve always happens.  Source rows are linear and are
    pinned to the source levels after each update, making them exact.  A
    singular Jacobian, a non-finite iterate, or a load potential inside the
    zero guard ends the run as a failure.
    """
    phi = np.array(phi_init, dtype=float)
    if phi.shape != (sys.dim,):
        raise ValueError(
            f"phi_init has shape {phi.shape}, expected ({sys.dim},)"
        )
    if not np.isfinite(phi).all():
        raise ValueError("phi_init must be finite")
    j = sys.partition.load_slice
    if (np.abs(phi[j]) < ZERO_PHI_GUARD).any():
        raise ValueError("phi_init is zero at a load node")

    src = sys.partition.source_slice
    mismatch = _residual_unchecked(sys, phi, alpha)
    norms: list[float] = []
    logdet: float | None = None
    rnorm = math.sqrt(float(mismatch @ mismatch))

    for iteration in range(1, cfg.max_iters + 1):
        step_report = solve_linear(_jacobian_unchecked(sys, phi, alpha), mismatch)
        logdet = step_report.log_abs_det
        if step_report.singular_flag:
            return NrOutcome(
                False, phi, iteration, rnorm, tuple(norms),
                "singular_jacobian", logdet,
            )
        phi = phi - step_report.solution
        phi[src] = sys.source
        if not np.isfinite(phi).all() or (np.abs(phi[j]) < ZERO_PHI_GUARD).any():
            return NrOutcome(
                False, phi, iteration, float("nan"), tuple(norms),
                "nonfinite_iterate", logdet,
            )
        mismatch = _residual_unchecked(sys, phi, alpha)
        rnorm = math.sqrt(float(mismatch @ mismatch))
        norms.append(rnorm)
        if rnorm < cfg.delta_con:
            phi.setflags(write=False)
            return NrOutcome(
                True, phi, iteration, rnorm, tuple(norms), None, logdet
            )

    return NrOutcome(
        False, phi, cfg.max_iters, rnorm, tuple(norms), "max_iters", logdet
    )

"""Post-solve electrical bookkeeping and scale-sweep diagnostics.

Branch reports derive currents and powers from the solved potentials with
Ohm's and the power law, independently of the assembled matrix, so their
balance checks are genuine cross-checks.  Scale sweeps record, per grid
point, whether Newton converged plus the residual, iteration count and the
Jacobian condition number at the solution — the numerical fingerprint of
the solvability boundary (condition blow-up, rising iteration counts, and
a gap-free admissible prefix).
"""

from __future__ import annotations

import io
import csv as _csv
import time
from dataclasses import dataclass

import numpy as np

from .linsolve import condition_estimate
from .network import CircuitSpec, MnaSystem, Potentials, assemble, jacobian, residual
from .newton import NrConfig, initial_guess, newton_solve
from .search import SearchConfig, search_efficient

__all__ = [
    "BranchReport",
    "SweepRecord",
    "SweepReport",
    "TimingSummary",
    "branch_report",
    "alpha_sweep",
    "timing_harness",
]


def _csv_text(header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = _csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


@dataclass(frozen=True)
class BranchReport:
    """Currents and powers at a converged operating point.

    ``resistor_currents`` follow the a->b orientation of the circuit's
    resistor list.  ``source_currents`` are positive when the source
    injects into the wire.  ``load_received_powers`` are computed from the
    wire currents arriving at each load node (not from the demand values),
    so they match ``alpha * watts`` only up to the solve tolerance — which
    is exactly what makes them a useful check.
    """

    alpha: float
    resistor_currents: tuple[float, ...]
    source_currents: tuple[float, ...]
    source_powers: tuple[float, ...]
    load_received_powers: tuple[float, ...]
    total_loss: float

    @property
    def total_source_power(self) -> float:
        return float(sum(self.source_powers))

    @property
    def total_received_power(self) -> float:
        return float(sum(self.load_received_powers))

    def power_imbalance(self) -> float:
        """Source power minus received power minus line losses (W)."""
        return self.total_source_power - self.total_received_power - self.total_loss

    def to_doc(self, spec: CircuitSpec) -> dict:
        """JSON-ready document, field order fixed for reproducible output."""
        return {
            "alpha": round(self.alpha, 4),
            "resistor_currents_a": [
                {"a": a, "b": b, "amps": float(i)}
                for (a, b, _), i in zip(spec.resistors, self.resistor_currents)
            ],
            "sources": [
                {"node": n, "amps": float(i), "watts": float(p)}
                for (n, _), i, p in zip(
                    spec.sources, self.source_currents, self.source_powers
                )
            ],
            "loads": [
                {"node": n, "received_watts": float(p)}
                for (n, _), p in zip(spec.loads, self.load_received_powers)
            ],
            "total_loss_w": float(self.total_loss),
        }

    def to_csv(self, spec: CircuitSpec) -> str:
        """One row per circuit element, dot decimal separator."""
        rows = []
        for (a, b, ohms), current in zip(spec.resistors, self.resistor_currents):
            rows.append(
                ["resistor", f"{a}-{b}", f"{current:.6g}",
                 f"{current * current * ohms:.6g}"]
            )
        for (node, _), current, power in zip(
            spec.sources, self.source_currents, self.source_powers
        ):
            rows.append(["source", node, f"{current:.6g}", f"{power:.6g}"])
        for (node, _), power in zip(spec.loads, self.load_received_powers):
            rows.append(["load", node, "", f"{power:.6g}"])
        return _csv_text(["element", "id", "amps", "watts"], rows)


def branch_report(
    spec: CircuitSpec,
    sys: MnaSystem,
    phi: Potentials,
    alpha: float,
    *,
    delta_con: float = 1e-8,
) -> BranchReport:
    """Electrical quantities at a solved operating point.

    Requires ``phi`` to actually solve the scaled problem (residual below
    ``delta_con``); calling it on a non-converged vector is a hard error
    because every downstream number would be fiction.
    """
    phi = np.asarray(phi, dtype=float)
    rnorm = float(np.linalg.norm(residual(sys, phi, alpha)))
    if not rnorm < delta_con:
        raise ValueError(
            f"branch report requires a converged solution; residual norm "
            f"{rnorm:.3e} is not below {delta_con:.1e}"
        )
    index = sys.partition.index

    resistor_currents = []
    inflow = np.zeros(sys.dim)  # net wire current arriving at each node
    for a, b, ohms in spec.resistors:
        i, k = index[a], index[b]
        current = (phi[i] - phi[k]) / ohms
        resistor_currents.append(current)
        inflow[i] -= current
        inflow[k] += current

    source_currents = []
    source_powers = []
    for node, volts in spec.sources:
        injected = -inflow[index[node]]
        source_currents.append(injected)
        source_powers.append(volts * injected)

    received = []
    for node, _ in spec.loads:
        i = index[node]
        received.append(phi[i] * inflow[i])

    loss = sum(
        c * c * ohms for c, (_, _, ohms) in zip(resistor_currents, spec.resistors)
    )
    return BranchReport(
        alpha=float(alpha),
        resistor_currents=tuple(float(c) for c in resistor_currents),
        source_currents=tuple(float(c) for c in source_currents),
        source_powers=tuple(float(p) for p in source_powers),
        load_received_powers=tuple(float(p) for p in received),
        total_loss=float(loss),
    )


@dataclass(frozen=True)
class SweepRecord:
    """One grid point of a scale sweep.

    ``condition`` is present only for converged points — beyond the
    boundary there is no solution to evaluate the Jacobian at.
    """

    alpha: float
    converged: bool
    residual_norm: float
    iterations: int
    condition: float | None


@dataclass(frozen=True)
class SweepReport:
    """Scale sweep records, sorted by scale."""

    records: tuple[SweepRecord, ...]

    def converged_alphas(self) -> tuple[float, ...]:
        return tuple(r.alpha for r in self.records if r.converged)

    def is_prefix(self) -> bool:
        """True iff the converged records form a gap-free leading block."""
        flags = [r.converged for r in self.records]
        if False not in flags:
            return True
        first_failure = flags.index(False)
        return not any(flags[first_failure:])

    def to_doc(self) -> dict:
        return {
            "records": [
                {
                    "alpha": r.alpha,
                    "converged": r.converged,
                    "residual_norm": r.residual_norm,
                    "iterations": r.iterations,
                    "condition": r.condition,
                }
                for r in self.records
            ]
        }

    def to_csv(self) -> str:
        rows = []
        for r in self.records:
            rows.append(
                [
                    f"{r.alpha:.4f}",
                    "true" if r.converged else "false",
                    f"{r.residual_norm:.6g}",
                    str(r.iterations),
                    "" if r.condition is None else f"{r.condition:.6g}",
                ]
            )
        return _csv_text(
            ["alpha", "converged", "residual_norm", "iterations", "condition"],
            rows,
        )


def alpha_sweep(
    sys: MnaSystem,
    grid,
    cfg: NrConfig | None = None,
    *,
    warm_start: bool = True,
) -> SweepReport:
    """Newton outcome and conditioning across a grid of demand scales.

    With ``warm_start`` (default) each run starts from the last converged
    potentials, which is how the boundary region stays reachable; the
    sweep is then inherently sequential.  Without it every run starts from
    the linear initial guess and grid points are independent of each other
    (safe to evaluate concurrently).
    """
    grid = [float(a) for a in grid]
    if any(not (0.0 <= a <= 1.0) for a in grid):
        raise ValueError("sweep grid values must lie in [0, 1]")
    if grid != sorted(grid):
        raise ValueError("sweep grid must be sorted ascending")
    nr = cfg or NrConfig()
    guess = initial_guess(sys)
    last_good = guess
    records = []
    for alpha in grid:
        start = last_good if warm_start else guess
        outcome = newton_solve(sys, alpha, start, nr)
        if outcome.converged:
            cond = condition_estimate(jacobian(sys, outcome.phi, alpha))
            records.append(
                SweepRecord(
                    alpha, True, outcome.final_residual_norm,
                    outcome.iterations, cond,
                )
            )
            last_good = outcome.phi
        else:
            records.append(
                SweepRecord(
                    alpha, False, outcome.final_residual_norm,
                    outcome.iterations, None,
                )
            )
    return SweepReport(records=tuple(records))


@dataclass(frozen=True)
class TimingSummary:
    """Wall-clock statistics of repeated searches on one circuit."""

    repetitions: int
    mean_s: float
    max_s: float
    min_s: float
    alpha_hat: float


def timing_harness(
    spec: CircuitSpec,
    repetitions: int,
    cfg: SearchConfig | None = None,
) -> TimingSummary:
    """Time ``search_efficient`` over repeated cold runs.

    Assembly happens once outside the clock; each repetition times the
    search call only.  The accepted scale must be identical across all
    repetitions (the search is deterministic) — any drift is a bug and
    raises.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    sys_ = assemble(spec)
    durations = []
    alpha_hat = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = search_efficient(sys_, cfg)
        durations.append(time.perf_counter() - t0)
        if alpha_hat is None:
            alpha_hat = result.alpha_hat
        elif result.alpha_hat != alpha_hat:
            raise RuntimeError(
                f"accepted scale drifted across repetitions: "
                f"{alpha_hat!r} vs {result.alpha_hat!r}"
            )
    return TimingSummary(
        repetitions=repetitions,
        mean_s=float(np.mean(durations)),
        max_s=float(np.max(durations)),
        min_s=float(np.min(durations)),
        alpha_hat=float(alpha_hat),
    )

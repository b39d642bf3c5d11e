"""Shared circuit builders and independent oracles for the test suite.

The single-load circuit is the analytic workhorse: its load potential
solves ``phi^2 - V*phi + a*P*R = 0``, giving closed forms for the solution
branch and for the maximal admissible demand scale.  Random circuits are
spanning trees plus extra edges, so they are connected by construction.
"""

from __future__ import annotations

import math

import numpy as np

from wireflow import CircuitSpec, residual
from wireflow.scenarios import LadderScenario


def two_node(volts=600.0, ohms=0.1, watts=1e6) -> CircuitSpec:
    return CircuitSpec(
        nodes=("n1", "n2"),
        resistors=(("n1", "n2", ohms),),
        sources=(("n1", volts),),
        loads=(("n2", watts),),
    )


def quad_roots(volts, ohms, watts, alpha=1.0):
    """Real roots of ``phi^2 - V*phi + a*P*R = 0``, or None if complex."""
    disc = volts * volts - 4.0 * alpha * watts * ohms
    if disc < 0.0:
        return None
    s = math.sqrt(disc)
    return ((volts + s) / 2.0, (volts - s) / 2.0)


def critical_scale(volts, ohms, watts) -> float:
    """Closed-form maximal admissible scale of the single-load circuit."""
    if watts <= 0.0:
        return 1.0
    return min(1.0, volts * volts / (4.0 * ohms * watts))


def fd_jacobian(sys, phi, alpha, step=1e-3):
    """Central finite differences of the residual, column by column."""
    n = sys.dim
    out = np.zeros((n, n))
    phi = np.asarray(phi, dtype=float)
    for k in range(n):
        up = phi.copy()
        dn = phi.copy()
        up[k] += step
        dn[k] -= step
        out[:, k] = (residual(sys, up, alpha) - residual(sys, dn, alpha)) / (
            2.0 * step
        )
    return out


def random_circuit(rng, max_nodes=12, uniform_volts=None) -> CircuitSpec:
    """Random connected circuit with at least one source.

    A spanning tree guarantees connectivity; extra random edges (possibly
    parallel to existing ones) add meshes.  Loads go on a random subset of
    the non-source nodes and may be regenerative.
    """
    n = int(rng.integers(2, max_nodes + 1))
    names = [f"b{i:02d}" for i in range(n)]
    resistors = []
    for i in range(1, n):
        j = int(rng.integers(0, i))
        resistors.append((names[j], names[i], float(rng.uniform(0.02, 0.3))))
    for _ in range(int(rng.integers(0, n))):
        i, j = rng.choice(n, size=2, replace=False)
        resistors.append(
            (names[int(i)], names[int(j)], float(rng.uniform(0.02, 0.3)))
        )
    k_src = int(rng.integers(1, max(2, n // 4) + 1))
    src_idx = sorted(int(i) for i in rng.choice(n, size=k_src, replace=False))
    if uniform_volts is None:
        sources = [(names[i], float(rng.uniform(400.0, 800.0))) for i in src_idx]
    else:
        sources = [(names[i], float(uniform_volts)) for i in src_idx]
    rest = [i for i in range(n) if i not in src_idx]
    loads = []
    if rest:
        k_load = int(rng.integers(1, len(rest) + 1))
        picked = rng.choice(len(rest), size=k_load, replace=False)
        for i in sorted(rest[int(k)] for k in picked):
            loads.append((names[i], float(rng.uniform(-50e3, 250e3))))
    return CircuitSpec(
        nodes=names, resistors=resistors, sources=sources, loads=loads
    )


def random_phi(rng, sys) -> np.ndarray:
    """Potentials with magnitudes in [1, 800] V, occasionally negative."""
    mag = rng.uniform(1.0, 800.0, size=sys.dim)
    sign = np.where(rng.uniform(size=sys.dim) < 0.1, -1.0, 1.0)
    return mag * sign


def random_ladder(rng) -> LadderScenario:
    """Random straight section: 1-2 feeds, 3-8 vehicles on a 400 m grid."""
    n_veh = int(rng.integers(3, 9))
    n_feed = int(rng.integers(1, 3))
    extras = int(rng.integers(0, 4))
    total = n_veh + n_feed + extras
    feed_slots = sorted(
        int(i) for i in rng.choice(total, size=n_feed, replace=False)
    )
    open_slots = [s for s in range(total) if s not in feed_slots]
    chosen = rng.choice(len(open_slots), size=n_veh, replace=False)
    veh_slots = sorted(open_slots[int(k)] for k in chosen)
    spacing = 400.0
    vehicles = []
    for s in veh_slots:
        if rng.uniform() < 0.15:
            watts = -float(rng.uniform(2e3, 30e3))
        else:
            watts = float(rng.uniform(30e3, 350e3))
        vehicles.append((s * spacing, watts))
    return LadderScenario(
        substation_volts=600.0,
        feed_positions_m=tuple(s * spacing for s in feed_slots),
        vehicles=tuple(vehicles),
    )

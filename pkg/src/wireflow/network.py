"""Circuit model and nodal equations for DC overhead-wire networks.

A circuit is declared as nodes, resistors, ideal voltage sources and
constant-power loads.  ``assemble`` compiles it into a nodal system with a
fixed row layout: conductance rows for plain wire nodes and load nodes,
identity rows pinning source nodes to their voltage level.  Because a load
draws the current ``scale * watts / potential`` at its node, the system is
nonlinear in the potentials; ``residual`` and ``jacobian`` provide the
mismatch vector and its exact derivative for Newton-type solvers.

Sign convention: positive ``watts`` means consumption.  The mismatch row of
a load node is ``sum_j (phi_i - phi_j)/R_ij + scale * watts_i / phi_i``, so
for a single load behind a feeder this reduces to the familiar quadratic
``phi^2 - V*phi + scale*P*R = 0`` whose discriminant vanishes at the
critical demand ``V^2 / (4R)``.  Negative ``watts`` models regenerative
braking (power injected into the wire).

All value types are immutable and safe to share between threads; the
operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

__all__ = [
    "CircuitError",
    "DisconnectedCircuitError",
    "MissingSourceError",
    "NodeRoleError",
    "BadResistanceError",
    "UnknownNodeError",
    "ZeroPotentialError",
    "CircuitSpec",
    "NodePartition",
    "MnaSystem",
    "Potentials",
    "assemble",
    "rhs",
    "residual",
    "jacobian",
    "kirchhoff_imbalance",
    "DENSE_NODE_LIMIT",
    "ZERO_PHI_GUARD",
]

#: Node count above which ``assemble`` switches to sparse matrix storage.
#: Purely a storage/performance knob; results are identical either way.
DENSE_NODE_LIMIT = 256

#: Potentials with magnitude below this (in volts) are rejected at load
#: nodes instead of producing huge or non-finite load currents.
ZERO_PHI_GUARD = 1e-9

#: Node potentials in volts, ordered per :class:`NodePartition`.
Potentials = np.ndarray


class CircuitError(ValueError):
    """A circuit description violates a structural invariant."""


class DisconnectedCircuitError(CircuitError):
    """The resistor graph does not connect all nodes."""


class MissingSourceError(CircuitError):
    """The circuit has no voltage source."""


class NodeRoleError(CircuitError):
    """A node carries conflicting or duplicated elements."""


class BadResistanceError(CircuitError):
    """A resistor value is not strictly positive and finite."""


class UnknownNodeError(CircuitError):
    """An element references a node id that is not declared."""


class ZeroPotentialError(ValueError):
    """Evaluation requested at a load node potential too close to zero."""


@dataclass(frozen=True)
class CircuitSpec:
    """Declarative electrical network.

    Attributes:
        nodes: node identifiers (opaque strings, unique).
        resistors: ``(node_a, node_b, ohms)`` triples, ``ohms > 0``.
        sources: ``(node, volts)`` ideal voltage sources.
        loads: ``(node, watts)`` aggregate power demands; positive watts is
            consumption, negative is regeneration.

    Validation happens at construction, so an instance always satisfies
    the structural invariants: the resistor graph is connected, at least
    one source exists, a node carries at most one source and at most one
    load and never both, and all resistances are strictly positive.
    """

    nodes: tuple[str, ...]
    resistors: tuple[tuple[str, str, float], ...]
    sources: tuple[tuple[str, float], ...]
    loads: tuple[tuple[str, float], ...]

    def __init__(self, nodes, resistors, sources, loads):
        object.__setattr__(self, "nodes", tuple(str(n) for n in nodes))
        object.__setattr__(
            self,
            "resistors",
            tuple((str(a), str(b), float(r)) for a, b, r in resistors),
        )
        object.__setattr__(
            self, "sources", tuple((str(n), float(v)) for n, v in sources)
        )
        object.__setattr__(
            self, "loads", tuple((str(n), float(p)) for n, p in loads)
        )
        self._validate()

    def _validate(self) -> None:
        if not self.nodes:
            raise CircuitError("circuit has no nodes")
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise CircuitError("duplicate node ids in node list")

        for a, b, r in self.resistors:
            if a not in known:
                raise UnknownNodeError(f"resistor references unknown node {a!r}")
            if b not in known:
                raise UnknownNodeError(f"resistor references unknown node {b!r}")
            if a == b:
                raise CircuitError(f"resistor connects node {a!r} to itself")
            if not np.isfinite(r) or r <= 0.0:
                raise BadResistanceError(
                    f"resistance between {a!r} and {b!r} must be positive and "
                    f"finite, got {r!r}"
                )

        source_nodes: set[str] = set()
        for n, v in self.sources:
            if n not in known:
                raise UnknownNodeError(f"source references unknown node {n!r}")
            if n in source_nodes:
                raise NodeRoleError(f"node {n!r} carries more than one source")
            if not np.isfinite(v):
                raise CircuitError(f"source voltage at {n!r} is not finite")
            source_nodes.add(n)

        load_nodes: set[str] = set()
        for n, p in self.loads:
            if n not in known:
                raise UnknownNodeError(f"load references unknown node {n!r}")
            if n in load_nodes:
                raise NodeRoleError(
                    f"node {n!r} carries more than one load; aggregate first"
                )
            if n in source_nodes:
                raise NodeRoleError(f"node {n!r} carries both a source and a load")
            if not np.isfinite(p):
                raise CircuitError(f"load power at {n!r} is not finite")
            load_nodes.add(n)

        if not source_nodes:
            raise MissingSourceError("circuit has no voltage source")

        self._check_connected()

    def _check_connected(self) -> None:
        n = len(self.nodes)
        if n == 1:
            return
        index = {node: i for i, node in enumerate(self.nodes)}
        ia = np.array([index[a] for a, _, _ in self.resistors], dtype=int)
        ib = np.array([index[b] for _, b, _ in self.resistors], dtype=int)
        adj = sparse.coo_array(
            (np.ones(len(ia)), (ia, ib)), shape=(n, n)
        ).tocsr()
        parts, labels = csgraph.connected_components(adj, directed=False)
        if parts != 1:
            stranded = [self.nodes[i] for i in np.flatnonzero(labels != labels[0])]
            raise DisconnectedCircuitError(
                f"resistor graph is disconnected; unreachable from "
                f"{self.nodes[0]!r}: {stranded[:5]}"
            )


@dataclass(frozen=True)
class NodePartition:
    """Deterministic node ordering and role partition of a circuit.

    The matrix order puts plain wire nodes first, then load nodes, then
    source nodes, each block sorted lexicographically by node id.  The
    partition is therefore reproducible bit-for-bit from a given
    :class:`CircuitSpec`.
    """

    order: tuple[str, ...]
    n_passive: int
    n_load: int
    n_source: int

    @property
    def dim(self) -> int:
        return len(self.order)

    @property
    def passive_slice(self) -> slice:
        """Rows of nodes connected only through resistors."""
        return slice(0, self.n_passive)

    @property
    def load_slice(self) -> slice:
        """Rows of nodes carrying a power load."""
        return slice(self.n_passive, self.n_passive + self.n_load)

    @property
    def source_slice(self) -> slice:
        """Rows of nodes pinned by a voltage source."""
        return slice(self.n_passive + self.n_load, self.dim)

    @cached_property
    def index(self) -> dict[str, int]:
        """Node id -> matrix row."""
        return {node: i for i, node in enumerate(self.order)}

    def passive_nodes(self) -> tuple[str, ...]:
        return self.order[self.passive_slice]

    def load_nodes(self) -> tuple[str, ...]:
        return self.order[self.load_slice]

    def source_nodes(self) -> tuple[str, ...]:
        return self.order[self.source_slice]


@dataclass(frozen=True)
class MnaSystem:
    """Assembled nodal system.

    ``matrix`` holds conductance rows (siemens) for wire and load nodes and
    identity rows (dimensionless) for source nodes; it does not depend on
    the potentials or on the demand scale.  ``demand`` is the load vector in
    watts over the load block, ``source`` the voltage levels in volts over
    the source block.
    """

    matrix: object  # (n, n) ndarray or scipy.sparse array
    demand: np.ndarray
    source: np.ndarray
    partition: NodePartition

    @property
    def dim(self) -> int:
        return self.partition.dim

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.matrix)

    @cached_property
    def _load_diag(self) -> np.ndarray:
        block = self.partition.load_slice
        return np.arange(block.start, block.stop)

    # Slices cached here because the Newton loop touches them per iteration.
    @cached_property
    def _jslice(self) -> slice:
        return self.partition.load_slice

    @cached_property
    def _sslice(self) -> slice:
        return self.partition.source_slice


def _require_phi(sys: MnaSystem, phi: np.ndarray) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (sys.dim,):
        raise ValueError(
            f"potential vector has shape {phi.shape}, expected ({sys.dim},)"
        )
    phi_j = phi[sys.partition.load_slice]
    small = np.abs(phi_j) < ZERO_PHI_GUARD
    if small.any():
        offender = sys.partition.load_nodes()[int(np.argmax(small))]
        raise ZeroPotentialError(
            f"potential at load node {offender!r} is within {ZERO_PHI_GUARD} V "
            f"of zero; load current is undefined there"
        )
    return phi


def assemble(spec: CircuitSpec, *, dense_limit: int = DENSE_NODE_LIMIT) -> MnaSystem:
    """Build the nodal system for a circuit.

    Wire and load rows carry Laplacian conductance stamps (diagonal: sum of
    incident 1/R; off-diagonal: -1/R per neighbour), source rows a bare 1 on
    the diagonal.  Storage is dense up to ``dense_limit`` nodes and sparse
    beyond; the choice does not affect any numerical contract.
    """
    if not isinstance(spec, CircuitSpec):
        spec = CircuitSpec(spec.nodes, spec.resistors, spec.sources, spec.loads)

    load_map = dict(spec.loads)
    source_map = dict(spec.sources)
    passive = sorted(set(spec.nodes) - load_map.keys() - source_map.keys())
    order = (*passive, *sorted(load_map), *sorted(source_map))
    part = NodePartition(
        order=order,
        n_passive=len(passive),
        n_load=len(load_map),
        n_source=len(source_map),
    )
    n = part.dim
    index = part.index

    ia = np.array([index[a] for a, _, _ in spec.resistors], dtype=int)
    ib = np.array([index[b] for _, b, _ in spec.resistors], dtype=int)
    g = np.array([1.0 / r for _, _, r in spec.resistors])
    src_rows = np.arange(part.source_slice.start, n)

    if n <= dense_limit:
        mat = np.zeros((n, n))
        np.add.at(mat, (ia, ia), g)
        np.add.at(mat, (ib, ib), g)
        np.add.at(mat, (ia, ib), -g)
        np.add.at(mat, (ib, ia), -g)
        mat[src_rows, :] = 0.0
        mat[src_rows, src_rows] = 1.0
        mat.setflags(write=False)
    else:
        is_src = np.zeros(n, dtype=bool)
        is_src[src_rows] = True
        rows = np.concatenate([ia, ia, ib, ib])
        cols = np.concatenate([ia, ib, ib, ia])
        vals = np.concatenate([g, -g, g, -g])
        keep = ~is_src[rows]
        rows = np.concatenate([rows[keep], src_rows])
        cols = np.concatenate([cols[keep], src_rows])
        vals = np.concatenate([vals[keep], np.ones(len(src_rows))])
        mat = sparse.coo_array((vals, (rows, cols)), shape=(n, n)).tocsr()
        mat.sum_duplicates()

    demand = np.array([load_map[node] for node in part.load_nodes()])
    source = np.array([source_map[node] for node in part.source_nodes()])
    demand.setflags(write=False)
    source.setflags(write=False)
    return MnaSystem(matrix=mat, demand=demand, source=source, partition=part)


def rhs(sys: MnaSystem, phi: Potentials, alpha: float) -> np.ndarray:
    """Right-hand side vector at the given potentials and demand scale.

    Zero on wire rows, ``-alpha * watts / phi`` on load rows (consumption
    draws current out of the node), source voltage on source rows.  The
    load block is computed as ``alpha`` times its value at ``alpha = 1`` so
    that scaling is exactly linear in floating point as well.
    """
    phi = _require_phi(sys, phi)
    out = np.zeros(sys.dim)
    j = sys.partition.load_slice
    out[j] = alpha * (-sys.demand / phi[j])
    out[sys.partition.source_slice] = sys.source
    return out


def _residual_unchecked(sys: MnaSystem, phi: np.ndarray, alpha: float) -> np.ndarray:
    out = sys.matrix @ phi
    j = sys._jslice
    out[j] += alpha * (sys.demand / phi[j])
    out[sys._sslice] -= sys.source
    return out


def _jacobian_unchecked(sys: MnaSystem, phi: np.ndarray, alpha: float):
    j = sys._jslice
    correction = -alpha * sys.demand / phi[j] ** 2
    if sys.is_sparse:
        full = np.zeros(sys.dim)
        full[j] = correction
        return (sys.matrix + sparse.diags_array(full)).tocsr()
    jac = sys.matrix.copy()
    diag = sys._load_diag
    jac[diag, diag] += correction
    return jac


def residual(sys: MnaSystem, phi: Potentials, alpha: float) -> np.ndarray:
    """Nodal mismatch ``matrix @ phi - rhs(phi, alpha)``.

    The zero vector iff ``phi`` solves the scaled power flow problem at
    ``alpha``.  Wire rows are net resistor currents (A), load rows add the
    scaled load current, source rows are potential errors (V).
    """
    return _residual_unchecked(sys, _require_phi(sys, phi), alpha)


def jacobian(sys: MnaSystem, phi: Potentials, alpha: float):
    """Exact derivative of ``residual`` with respect to the potentials.

    Equals ``matrix`` plus ``-alpha * watts / phi^2`` on the diagonal of the
    load block only.  Dense (sparse) systems yield dense (sparse) matrices.
    """
    return _jacobian_unchecked(sys, _require_phi(sys, phi), alpha)


def kirchhoff_imbalance(
    spec: CircuitSpec, sys: MnaSystem, phi: Potentials, alpha: float
) -> np.ndarray:
    """Per-node current imbalance computed straight from the resistor list.

    Independent of the assembled matrix: for each node, sums the branch
    currents ``(phi_i - phi_j) / R_ij`` leaving the node, adds the load
    current ``alpha * watts / phi`` where a load is attached, and reports
    zero for source nodes (their balance is closed by the source itself).
    Useful as a brute-force cross-check of ``assemble`` and ``residual``.
    """
    phi = np.asarray(phi, dtype=float)
    index = sys.partition.index
    out = np.zeros(sys.dim)
    for a, b, r in spec.resistors:
        i, k = index[a], index[b]
        current = (phi[i] - phi[k]) / r
        out[i] += current
        out[k] -= current
    for node, watts in spec.loads:
        i = index[node]
        out[i] += alpha * watts / phi[i]
    for node, _ in spec.sources:
        out[index[node]] = 0.0
    return out

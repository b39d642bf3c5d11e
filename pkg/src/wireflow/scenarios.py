"""Builders for reference circuits and the quasi-static route driver.

The single-load circuit is the analytic anchor of the whole library: its
load potential obeys ``phi^2 - V*phi + scale*P*R = 0``, so the maximal
admissible demand scale is ``min(1, V^2 / (4*R*P))`` in closed form.

The two ladder layouts are reconstructions of benchmark overhead-wire
sections (one feed with four vehicles, two feeds with ten vehicles).  The
originals publish only the demands, voltage level and a plausible range of
segment resistances, not the geometry, so the node spacing and wire
resistivity here are pinned constants chosen inside that range; regression
values obtained for these layouts are stable but specific to them.

The route driver moves a single vehicle along a straight wire fed from one
substation, rebuilding and re-solving the circuit at every time step.  Its
record of accepted scales over time is what an on-board battery would have
to cover: the deficit energy per step is ``(1 - scale) * demand * dt``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .analysis import branch_report
from .network import CircuitSpec, assemble
from .search import SearchConfig, search_efficient

__all__ = [
    "WIRE_RESISTIVITY_OHM_PER_M",
    "LADDER_SPACING_M",
    "LadderScenario",
    "TimelineStep",
    "single_load_circuit",
    "toy_case_1",
    "toy_case_2",
    "route_circuit",
    "straight_route_timeline",
    "trapezoid_power_profile",
    "deficit_energy_j",
]

#: Wire resistance per metre.  With 400 m node spacing this gives 0.064 ohm
#: per segment, inside the plausible 0.023-0.23 ohm range for overhead
#: conductor between neighbouring taps.
WIRE_RESISTIVITY_OHM_PER_M = 1.6e-4

#: Distance between adjacent wire nodes in the ladder reconstructions.
LADDER_SPACING_M = 400.0

#: A vehicle tap is kept at least this far from a wire grid node so the
#: split segments keep strictly positive resistance.
_MIN_TAP_GAP_M = 0.5


def single_load_circuit(volts: float, ohms: float, watts: float) -> CircuitSpec:
    """Two-node feeder: source ``n1`` at ``volts``, load ``n2`` behind ``ohms``.

    For ``watts > 0`` the maximal admissible demand scale is
    ``min(1, volts**2 / (4 * ohms * watts))``; zero or negative demand is
    always fully suppliable.
    """
    if volts <= 0.0 or ohms <= 0.0:
        raise ValueError("volts and ohms must be positive")
    return CircuitSpec(
        nodes=("n1", "n2"),
        resistors=(("n1", "n2", ohms),),
        sources=(("n1", volts),),
        loads=(("n2", watts),),
    )


def _position_node(position_m: float) -> str:
    return f"n{position_m:06.0f}"


@dataclass(frozen=True)
class LadderScenario:
    """Straight overhead-wire section with taps on a uniform node grid.

    Wire nodes sit every ``node_spacing_m`` metres from 0 to the farthest
    tap; adjacent nodes are joined by a resistor of exactly
    ``resistivity_ohm_per_m * node_spacing_m``.  Feed points carry the
    substation voltage, vehicle positions carry the demands.  All tap
    positions must lie on the grid and no position may carry both roles.
    """

    substation_volts: float
    feed_positions_m: tuple[float, ...]
    vehicles: tuple[tuple[float, float], ...]  # (position_m, watts)
    resistivity_ohm_per_m: float = WIRE_RESISTIVITY_OHM_PER_M
    node_spacing_m: float = LADDER_SPACING_M

    def __post_init__(self):
        if self.substation_volts <= 0.0:
            raise ValueError("substation voltage must be positive")
        if self.resistivity_ohm_per_m <= 0.0:
            raise ValueError("wire resistivity must be positive")
        if self.node_spacing_m <= 0.0:
            raise ValueError("node spacing must be positive")
        if not self.feed_positions_m:
            raise ValueError("at least one feed position is required")
        positions = [p for p, _ in self.vehicles]
        if positions != sorted(positions):
            raise ValueError("vehicle positions must be strictly increasing")
        taken = set()
        for pos in (*self.feed_positions_m, *positions):
            if pos < 0.0:
                raise ValueError("positions must be non-negative")
            if round(pos / self.node_spacing_m) * self.node_spacing_m != pos:
                raise ValueError(
                    f"position {pos} is not on the {self.node_spacing_m} m grid"
                )
            if pos in taken:
                raise ValueError(f"two taps share position {pos}")
            taken.add(pos)

    def to_circuit(self) -> CircuitSpec:
        """Materialize the grid, segment resistors, feeds and loads."""
        spacing = self.node_spacing_m
        last = max((*self.feed_positions_m, *(p for p, _ in self.vehicles)))
        count = int(round(last / spacing)) + 1
        positions = [k * spacing for k in range(count)]
        nodes = [_position_node(p) for p in positions]
        segment_ohms = self.resistivity_ohm_per_m * spacing
        resistors = [
            (nodes[k], nodes[k + 1], segment_ohms) for k in range(count - 1)
        ]
        sources = [
            (_position_node(p), self.substation_volts)
            for p in self.feed_positions_m
        ]
        loads = [(_position_node(p), watts) for p, watts in self.vehicles]
        return CircuitSpec(
            nodes=nodes, resistors=resistors, sources=sources, loads=loads
        )


def toy_case_1() -> LadderScenario:
    """One feed, four vehicles (260 / 20 / 30 / -5 kW) on a 4 km section.

    The feed sits at the section start; the vehicle group runs near the far
    end, the last one braking regeneratively.  Eleven wire nodes in total.
    """
    return LadderScenario(
        substation_volts=600.0,
        feed_positions_m=(0.0,),
        vehicles=(
            (2800.0, 260e3),
            (3200.0, 20e3),
            (3600.0, 30e3),
            (4000.0, -5e3),
        ),
    )


def toy_case_2() -> LadderScenario:
    """Two feeds, ten vehicles of 250 kW each on a 5.2 km section.

    The feed points split the vehicles into groups of two, six and two;
    the middle group bunches towards the left feed, which is what pushes
    the section past its delivery limit at full demand.  Fourteen wire
    nodes in total.
    """
    demands = tuple(
        (pos, 250e3)
        for pos in (0.0, 400.0, 1200.0, 2000.0, 2400.0, 2800.0,
                    3600.0, 4000.0, 4800.0, 5200.0)
    )
    return LadderScenario(
        substation_volts=600.0,
        feed_positions_m=(800.0, 4400.0),
        vehicles=demands,
    )


def route_circuit(
    route_length_m: float,
    intersection_spacing_m: float,
    substation_pos_m: float,
    vehicle_pos_m: float,
    demand_w: float,
    *,
    substation_volts: float = 600.0,
    resistivity_ohm_per_m: float = WIRE_RESISTIVITY_OHM_PER_M,
) -> CircuitSpec:
    """Straight route with one substation and one vehicle tap.

    Wire nodes sit at every intersection (multiples of the spacing, which
    must divide the route length); the vehicle node is spliced into its
    segment, splitting the segment resistance in proportion to position.
    A vehicle on top of a grid node is nudged by half a metre so both split
    resistances stay positive.
    """
    spacing = float(intersection_spacing_m)
    length = float(route_length_m)
    if spacing <= 0.0 or length <= 0.0:
        raise ValueError("route length and spacing must be positive")
    segments = round(length / spacing)
    if segments < 1 or segments * spacing != length:
        raise ValueError("intersection spacing must divide the route length")
    if round(substation_pos_m / spacing) * spacing != substation_pos_m:
        raise ValueError("substation must sit on an intersection")
    if not (0.0 <= substation_pos_m <= length):
        raise ValueError("substation position outside the route")

    gap = min(_MIN_TAP_GAP_M, spacing / 4.0)
    pos = min(max(float(vehicle_pos_m), 0.0), length)
    segment = min(int(pos // spacing), segments - 1)
    lo = segment * spacing
    hi = lo + spacing
    pos = min(max(pos, lo + gap), hi - gap)

    grid = [k * spacing for k in range(segments + 1)]
    nodes = [f"w{p:06.0f}" for p in grid]
    rho = resistivity_ohm_per_m
    resistors = []
    for k in range(segments):
        if k == segment:
            resistors.append((nodes[k], "veh", rho * (pos - lo)))
            resistors.append(("veh", nodes[k + 1], rho * (hi - pos)))
        else:
            resistors.append((nodes[k], nodes[k + 1], rho * spacing))
    return CircuitSpec(
        nodes=[*nodes, "veh"],
        resistors=resistors,
        sources=[(f"w{substation_pos_m:06.0f}", substation_volts)],
        loads=[("veh", demand_w)],
    )


def trapezoid_power_profile(
    period_s: float,
    peak_w: float = 200e3,
    cruise_w: float = 30e3,
    regen_w: float = -60e3,
) -> Callable[[float], float]:
    """Periodic demand: ramp to peak, plateau, cruise, regenerative tail.

    One period spans the run between two intersections: hard acceleration
    first, a cruising stretch, then braking that feeds power back.
    """
    if period_s <= 0.0:
        raise ValueError("period must be positive")

    def profile(t: float) -> float:
        x = (t / period_s) % 1.0
        if x < 0.10:
            return peak_w * (x / 0.10)
        if x < 0.45:
            return peak_w
        if x < 0.55:
            return peak_w + (cruise_w - peak_w) * (x - 0.45) / 0.10
        if x < 0.75:
            return cruise_w
        if x < 0.85:
            return cruise_w + (regen_w - cruise_w) * (x - 0.75) / 0.10
        return regen_w

    return profile


@dataclass(frozen=True)
class TimelineStep:
    """One quasi-static snapshot of the moving-vehicle simulation."""

    time_s: float
    position_m: float
    demand_w: float
    alpha_hat: float
    received_w: float


def straight_route_timeline(
    route_length_m: float = 8000.0,
    intersection_spacing_m: float = 200.0,
    substation_pos_m: float = 0.0,
    speed_profile: Callable[[float], float] | None = None,
    power_profile: Callable[[float], float] | None = None,
    dt_s: float = 1.0,
    *,
    substation_volts: float = 600.0,
    resistivity_ohm_per_m: float = WIRE_RESISTIVITY_OHM_PER_M,
    cfg: SearchConfig | None = None,
) -> list[TimelineStep]:
    """Drive one vehicle down the route, solving a circuit per time step.

    Each step places the vehicle by integrating the speed profile, asks the
    power profile for the demand, and runs the efficient scale search on
    the resulting circuit.  The received power is read back from the
    branch currents at the vehicle node, so it tracks ``scale * demand``
    only through the converged electrical state.

    The default profiles model a vehicle holding 10 m/s that accelerates
    hard after every intersection and brakes regeneratively before the
    next one.
    """
    if dt_s <= 0.0:
        raise ValueError("dt must be positive")
    speed = speed_profile or (lambda t: 10.0)
    if power_profile is None:
        v0 = speed(0.0)
        if v0 <= 0.0:
            raise ValueError("speed profile must be positive at t = 0")
        power_profile = trapezoid_power_profile(intersection_spacing_m / v0)

    steps: list[TimelineStep] = []
    t = 0.0
    pos = 0.0
    while pos <= route_length_m:
        demand = float(power_profile(t))
        circuit = route_circuit(
            route_length_m,
            intersection_spacing_m,
            substation_pos_m,
            pos,
            demand,
            substation_volts=substation_volts,
            resistivity_ohm_per_m=resistivity_ohm_per_m,
        )
        sys_ = assemble(circuit)
        result = search_efficient(sys_, cfg)
        report = branch_report(circuit, sys_, result.phi, result.alpha_hat)
        steps.append(
            TimelineStep(
                time_s=t,
                position_m=pos,
                demand_w=demand,
                alpha_hat=result.alpha_hat,
                received_w=report.load_received_powers[0],
            )
        )
        v = float(speed(t))
        if v <= 0.0:
            raise ValueError(f"speed profile must stay positive, got {v} at t={t}")
        pos += v * dt_s
        t += dt_s
    return steps


def deficit_energy_j(steps: list[TimelineStep], dt_s: float) -> float:
    """Total energy an on-board source must cover, ``sum (1-a)*P*dt``."""
    return float(sum((1.0 - s.alpha_hat) * s.demand_w * dt_s for s in steps))

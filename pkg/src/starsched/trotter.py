"""Compile one second-order Trotter step into a clock-stamped schedule.

A step runs, in order: onsite ZZ rotations, a patch-move layer separating the
spin rows, the hopping terms local under ordering A (two vertex-disjoint
sub-layers), fermionic-swap layers routing to ordering B, the hopping terms
local under B, and then the mirror image.  The two middle hopping batches are
merged into one with doubled angle, so the step contains 7 hopping batches,
2 onsite batches, 2 move layers and 2(n-1) fSWAP layers.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from . import fabric
from .fabric import SurgeryOp, Timeline, build_grid
from .hubbard import (
    FSwapSchedule,
    HubbardSpec,
    OrderingPair,
    build_hamiltonian,
    default_orderings,
    route_orderings,
    sublayers,
)
from .rus import expected_trials

# schedule-dependent aggregate kinds used in compiled timelines
fabric._VARIABLE_KINDS.update({"xxyy_block"})

XXYY_FIXED_CLOCKS = 9.0  # CNOT/Hadamard frame around the two rotation phases
MOVE_CLOCKS = fabric.CATALOG["patch_move_layer"]
FSWAP_CLOCKS = fabric.CATALOG["fswap"]
MULTI_CNOT_CLOCKS = fabric.CATALOG["multi_target_cnot_reduced"]
MULTI_CZ_LAYER_CLOCKS = 2 * fabric.CATALOG["multi_target_cz"]  # both spin rows


@dataclass(frozen=True)
class AngleSet:
    """Rotation angles of one step of duration dt (magnitudes)."""

    theta_zz: float
    theta_hop: float

    @classmethod
    def from_spec(cls, spec: HubbardSpec, dt: float) -> "AngleSet":
        # each half step applies e^{-i c P dt/2}: onsite c = u/4, hopping |c| = t/2
        return cls(theta_zz=spec.u * dt / 8, theta_hop=spec.t * dt / 4)


@dataclass(frozen=True)
class Batch:
    kind: str  # zz_rotation_layer | move_layer | xxyy_batch | fswap_layer |
    #            multi_cnot_layer | multi_cz_layer
    rus_groups: tuple[tuple[int, str, float], ...]  # (count M, basis, theta*)
    fixed_clocks: float
    merged: bool = False
    edges: tuple[tuple[int, int], ...] = ()


@dataclass
class TrotterSchedule:
    n: int
    mode: str
    batches: list[Batch]
    timeline: Timeline
    pair: OrderingPair
    fswaps: FSwapSchedule
    rus_clocks: dict[tuple[int, str], float]

    @property
    def fixed_clocks(self) -> float:
        return sum(b.fixed_clocks for b in self.batches)

    def rus_group_multiset(self) -> Counter:
        out: Counter = Counter()
        for b in self.batches:
            for m, basis, _theta in b.rus_groups:
                out[(m, basis)] += 1
        return out

    @property
    def total_clocks(self) -> float:
        return self.fixed_clocks + sum(
            self.rus_clocks[(m, basis)]
            for b in self.batches
            for m, basis, _theta in b.rus_groups
        )


def rough_t_rus(m: int, basis: str) -> float:
    """Rough per-batch RUS clock model: one injection clock and one
    measurement clock per expected trial of the slowest process."""
    return 2 * expected_trials(m)


def trotter_clocks(n: int, t_rus) -> float:
    """Clocks of one plain step given a per-batch RUS clock model t_rus(M, basis)."""
    v = n * n
    return (
        7 * t_rus(v - n, "Z")
        + 7 * t_rus(v - n, "ZZ")
        + 2 * t_rus(v, "ZZ")
        + 14 * n
        + 55
    )


def controlled_overhead(t_steps: int) -> float:
    """Extra clocks for controlling a T-step evolution: 16 + 18 per step.

    Per step: two multi-target CNOT layers (5 clocks each) and two
    multi-target CZ layers covering both spin rows (4 clocks each); the
    constant 16 = 2x5 CNOT layers + 2x3 ancilla move layers at the ends.
    """
    if t_steps < 0:
        raise ValueError("step count must be nonnegative")
    return 16 + 18 * t_steps


def anticommuting_controls(n: int):
    """Pauli operators anticommuting with the hopping / onsite sub-Hamiltonians.

    K0 applies Z to both spin-orbitals of every odd-parity site (row + col
    odd); K1 applies X to the spin-down orbital of every site.  Both are
    verified symbolically against the term set: an operator pair
    anticommutes iff it disagrees (with non-identity letters) on an odd
    number of qubits.
    """
    v = n * n
    k0 = tuple(
        (spin * v + r * n + c, "Z")
        for spin in (0, 1)
        for r in range(n)
        for c in range(n)
        if (r + c) % 2 == 1
    )
    k1 = tuple((v + s, "X") for s in range(v))
    terms = build_hamiltonian(HubbardSpec(n))
    for term in terms.terms:
        control = k0 if term.kind.startswith("hopping") else k1
        if not _anticommutes(control, term.support):
            raise AssertionError(
                f"control does not anticommute with {term.kind} term {term.support}"
            )
    return k0, k1


def _anticommutes(a, b) -> bool:
    letters_a = dict(a)
    odd = 0
    for q, letter in b:
        other = letters_a.get(q)
        if other is not None and other != letter:
            odd += 1
    return odd % 2 == 1


def serial_clocks(n: int) -> float:
    """Clock count of one step under the serial one-rotation-at-a-time layout."""
    if n < 2:
        raise ValueError(f"lattice size must be at least 2, got {n}")
    v, m = n * n, n
    return 154 * v - 152 * m


def compile_step(
    n: int,
    dt: float = 0.01,
    mode: str = "plain",
    spec: HubbardSpec | None = None,
    pair: OrderingPair | None = None,
    t_rus=None,
) -> TrotterSchedule:
    """Compile one Trotter step to batches plus a validated patch timeline.

    ``t_rus(M, basis)`` supplies the clock count charged to each RUS batch
    (rough analytic model by default; quantized to half clocks).  The same
    quantized values feed both the timeline and the clock accounting, so the
    two always agree.
    """
    if mode not in ("plain", "controlled"):
        raise ValueError(f"mode must be plain or controlled, got {mode!r}")
    spec = spec or HubbardSpec(n)
    if spec.n != n:
        raise ValueError("lattice size disagrees with model spec")
    pair = pair or default_orderings(n)
    fswaps = route_orderings(pair)
    angles = AngleSet.from_spec(spec, dt)
    v = n * n
    m_hop = n * (n - 1)  # edges per sub-layer x two spins = V - n
    model = t_rus or rough_t_rus
    rus_clocks = {
        (v, "ZZ"): round(model(v, "ZZ") * 2) / 2,
        (v - n, "ZZ"): round(model(v - n, "ZZ") * 2) / 2,
        (v - n, "Z"): round(model(v - n, "Z") * 2) / 2,
    }

    sub_a = sublayers(pair.edges_a, pair.order_a)
    sub_b = sublayers(pair.edges_b, pair.order_b)

    batches: list[Batch] = []
    grid = build_grid(n, with_qpe_ancilla=(mode == "controlled"))
    timeline = Timeline()
    clock = [0.0]  # running start time, mutated by emitters
    order = list(pair.order_a)

    def pos_of() -> dict[int, int]:
        return {s: p for p, s in enumerate(order)}

    def advance(duration: float) -> float:
        start = clock[0]
        clock[0] = start + duration
        return start

    def emit_zz_layer() -> None:
        dur = rus_clocks[(v, "ZZ")]
        start = advance(dur)
        pos = pos_of()
        for s in range(v):
            c = pos[s]
            timeline.add(
                start,
                SurgeryOp("rus_block_zz", ((0, c), (1, c), (2, c), (3, c)), dur),
            )
        batches.append(Batch("zz_rotation_layer", ((v, "ZZ", angles.theta_zz),), 0.0))

    def emit_move_layer() -> None:
        start = advance(MOVE_CLOCKS)
        for c in range(v):
            timeline.add(
                start,
                SurgeryOp("patch_move_layer", ((1, c), (2, c), (3, c)), MOVE_CLOCKS),
            )
        batches.append(Batch("move_layer", (), MOVE_CLOCKS))

    def emit_xxyy(edges, theta: float, merged: bool) -> None:
        dur = (
            XXYY_FIXED_CLOCKS
            + rus_clocks[(v - n, "ZZ")]
            + rus_clocks[(v - n, "Z")]
        )
        start = advance(dur)
        pos = pos_of()
        for a, b in edges:
            p1, p2 = sorted((pos[a], pos[b]))
            timeline.add(
                start,
                SurgeryOp("xxyy_block", ((0, p1), (0, p2), (1, p1), (1, p2)), dur),
            )
            timeline.add(
                start,
                SurgeryOp("xxyy_block", ((3, p1), (3, p2), (2, p1), (2, p2)), dur),
            )
        batches.append(
            Batch(
                "xxyy_batch",
                ((v - n, "ZZ", theta), (v - n, "Z", theta)),
                XXYY_FIXED_CLOCKS,
                merged=merged,
                edges=tuple(edges),
            )
        )

    def emit_fswap_layer(layer: tuple[int, ...]) -> None:
        start = advance(FSWAP_CLOCKS)
        for p in layer:
            timeline.add(
                start, SurgeryOp("fswap", ((0, p), (0, p + 1), (1, p)), FSWAP_CLOCKS)
            )
            timeline.add(
                start, SurgeryOp("fswap", ((3, p), (3, p + 1), (2, p)), FSWAP_CLOCKS)
            )
        for p in layer:
            order[p], order[p + 1] = order[p + 1], order[p]
        batches.append(Batch("fswap_layer", (), FSWAP_CLOCKS))

    def emit_multi_cnot() -> None:
        # flips spin-down orbitals (row 1 arrangement) controlled on the ancilla
        start = advance(MULTI_CNOT_CLOCKS)
        parts = (grid.qpe_ancilla,) + tuple((1, c) for c in range(v)) + tuple(
            (2, c) for c in range(v)
        )
        timeline.add(
            start, SurgeryOp("multi_target_cnot_reduced", parts, MULTI_CNOT_CLOCKS)
        )
        batches.append(Batch("multi_cnot_layer", (), MULTI_CNOT_CLOCKS))

    def emit_multi_cz() -> None:
        # phases odd-parity sites on both spin rows, one row at a time
        pos = pos_of()
        odd_cols = tuple(
            pos[r * n + c] for r in range(n) for c in range(n) if (r + c) % 2 == 1
        )
        dur = fabric.CATALOG["multi_target_cz"]
        for row, routing in ((0, 1), (3, 2)):
            start = advance(dur)
            parts = (
                (grid.qpe_ancilla,)
                + tuple((row, c) for c in sorted(odd_cols))
                + tuple((routing, c) for c in range(v))
            )
            timeline.add(start, SurgeryOp("multi_target_cz", parts, dur))
        batches.append(Batch("multi_cz_layer", (), MULTI_CZ_LAYER_CLOCKS))

    controlled = mode == "controlled"
    if controlled:
        emit_multi_cnot()
    emit_zz_layer()
    emit_move_layer()
    if controlled:
        emit_multi_cz()
    emit_xxyy(sub_a[0], angles.theta_hop, merged=False)
    emit_xxyy(sub_a[1], angles.theta_hop, merged=False)
    for layer in fswaps.layers:
        emit_fswap_layer(layer)
    emit_xxyy(sub_b[0], angles.theta_hop, merged=False)
    emit_xxyy(sub_b[1], 2 * angles.theta_hop, merged=True)
    emit_xxyy(sub_b[0], angles.theta_hop, merged=False)
    for layer in reversed(fswaps.layers):
        emit_fswap_layer(layer)
    emit_xxyy(sub_a[1], angles.theta_hop, merged=False)
    emit_xxyy(sub_a[0], angles.theta_hop, merged=False)
    if controlled:
        emit_multi_cz()
    emit_move_layer()
    emit_zz_layer()
    if controlled:
        emit_multi_cnot()

    assert tuple(order) == pair.order_a, "step must restore the initial ordering"

    schedule = TrotterSchedule(n, mode, batches, timeline, pair, fswaps, rus_clocks)
    conflict = fabric.validate(timeline, grid)
    if conflict is not None:
        raise AssertionError(f"compiled timeline failed validation: {conflict}")
    return schedule

"""Logical-patch grid, lattice-surgery operation catalog, and timeline checks.

Time is measured in lattice-surgery clocks (1 clock = d code cycles).  All
durations are multiples of 0.5 clocks and are stored internally as integer
half-clocks, so arbitrarily long schedules accumulate no floating-point drift.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# Clock cost per operation kind.  This is data, not code.
CATALOG: dict[str, float] = {
    "hadamard": 3.0,
    "hadamard_no_moveback": 2.0,
    "cnot": 3.0,
    "cnot_no_moveback": 2.0,
    "cz": 4.0,
    "s_gate": 1.5,
    "multi_target_cnot": 8.0,
    "multi_target_cnot_reduced": 5.0,
    "multi_target_cz": 2.0,
    "fswap": 7.0,
    "patch_move_layer": 3.0,
    "zz_rotation_trial": 2.0,
    "joint_pauli_measurement": 1.0,
}

# Aggregate op kinds whose duration is schedule-dependent (repeat-until-success
# rotation batches); they are exempt from the catalog-duration check.
_VARIABLE_KINDS = {"rus_block_z", "rus_block_zz"}

# Kinds realized as merge/split joint measurements: their participants must be
# mutually connected on the grid.
_MERGE_KINDS = {
    "hadamard",
    "hadamard_no_moveback",
    "cnot",
    "cnot_no_moveback",
    "cz",
    "multi_target_cnot",
    "multi_target_cnot_reduced",
    "multi_target_cz",
    "fswap",
    "joint_pauli_measurement",
    "zz_rotation_trial",
}


def catalog_cost(kind: str) -> float:
    """Clock cost of a catalog operation."""
    try:
        return CATALOG[kind]
    except KeyError:
        raise KeyError(f"unknown operation kind: {kind!r}") from None


def to_half(clocks: float) -> int:
    """Convert a clock value to integer half-clocks, requiring 0.5 granularity."""
    h = round(clocks * 2)
    if abs(h - clocks * 2) > 1e-9:
        raise ValueError(f"clock value {clocks} is not a multiple of 0.5")
    return h


Coord = tuple[int, int]


@dataclass
class Patch:
    coord: Coord
    role: str  # "data" | "routing"
    occupant: object = "free"  # "free" | ("orbital", site, spin) | "ancilla" | ("injection", pid)
    busy_until: float = 0.0


@dataclass
class PatchGrid:
    """4 x V grid of logical patches: data row / two routing rows / data row."""

    n: int
    cells: dict[Coord, Patch]
    qpe_ancilla: Coord | None = None

    @property
    def cols(self) -> int:
        return self.n * self.n

    @property
    def patch_count(self) -> int:
        return len(self.cells)

    def in_bounds(self, coord: Coord) -> bool:
        return coord in self.cells

    def neighbors(self, coord: Coord):
        r, c = coord
        for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if nb in self.cells:
                yield nb


def build_grid(n: int, with_qpe_ancilla: bool = False) -> PatchGrid:
    """Patch grid for an n x n model: rows 0/3 data, rows 1/2 routing.

    Initially the spin-up orbital of site i sits at (0, i) and the spin-down
    orbital at the vertically adjacent (1, i); rows 2 and 3 start free.  The
    optional phase-estimation ancilla patch attaches to the routing region at
    the right edge.
    """
    if n < 2:
        raise ValueError(f"lattice size must be at least 2, got {n}")
    v = n * n
    cells: dict[Coord, Patch] = {}
    for r in range(4):
        role = "data" if r in (0, 3) else "routing"
        for c in range(v):
            cells[(r, c)] = Patch((r, c), role)
    for i in range(v):
        cells[(0, i)].occupant = ("orbital", i, 0)
        cells[(1, i)].occupant = ("orbital", i, 1)
    qpe = None
    if with_qpe_ancilla:
        qpe = (1, v)
        cells[qpe] = Patch(qpe, "data", "ancilla")
    return PatchGrid(n, cells, qpe)


@dataclass(frozen=True)
class SurgeryOp:
    kind: str
    participants: tuple[Coord, ...]
    duration: float  # clocks, 0.5 granularity

    def __post_init__(self) -> None:
        if self.kind in CATALOG and self.duration != CATALOG[self.kind]:
            raise ValueError(
                f"{self.kind} duration {self.duration} does not match "
                f"catalog value {CATALOG[self.kind]}"
            )
        to_half(self.duration)  # granularity check


@dataclass
class Timeline:
    ops: list[tuple[float, SurgeryOp]] = field(default_factory=list)

    def add(self, start: float, op: SurgeryOp) -> None:
        to_half(start)
        self.ops.append((start, op))

    @property
    def horizon(self) -> float:
        return max((s + op.duration for s, op in self.ops), default=0.0)

    def export_jsonl(self, path) -> None:
        """One op per line with stable field order, for diffing."""
        with open(path, "w") as fh:
            for start, op in self.ops:
                fh.write(
                    json.dumps(
                        {
                            "start": start,
                            "kind": op.kind,
                            "participants": [list(c) for c in op.participants],
                            "duration": op.duration,
                        }
                    )
                )
                fh.write("\n")


@dataclass(frozen=True)
class Conflict:
    clock: float
    coord: Coord
    op_indices: tuple[int, int] | tuple[int]
    reason: str


def validate(timeline: Timeline, grid: PatchGrid) -> Conflict | None:
    """Check a timeline for spatial conflicts; None means the schedule is ok.

    Rejects out-of-bounds coords, two ops claiming the same patch over
    overlapping clock intervals, and merge-type ops whose participants are
    not connected through their own patches plus free routing patches at the
    start clock.  The verdict does not depend on op-list order: candidate
    conflicts are collected and the earliest (by clock, then coord) returned.
    """
    # deterministic op identity independent of insertion order
    indexed = sorted(
        range(len(timeline.ops)),
        key=lambda i: (
            timeline.ops[i][0],
            timeline.ops[i][1].kind,
            timeline.ops[i][1].participants,
        ),
    )
    conflicts: list[Conflict] = []
    intervals: dict[Coord, list[tuple[int, int, int]]] = {}
    for rank, i in enumerate(indexed):
        start, op = timeline.ops[i]
        s, e = to_half(start), to_half(start) + to_half(op.duration)
        for coord in op.participants:
            if not grid.in_bounds(coord):
                conflicts.append(Conflict(start, coord, (rank,), "out of bounds"))
                continue
            intervals.setdefault(coord, []).append((s, e, rank))
    for coord, ivs in intervals.items():
        ivs.sort()
        for (s1, e1, r1), (s2, e2, r2) in zip(ivs, ivs[1:]):
            if s2 < e1:
                conflicts.append(
                    Conflict(s2 / 2, coord, tuple(sorted((r1, r2))), "patch overlap")
                )
    # connectivity of merge-type ops at their start clock
    for rank, i in enumerate(indexed):
        start, op = timeline.ops[i]
        if op.kind not in _MERGE_KINDS or len(op.participants) < 2:
            continue
        if any(not grid.in_bounds(c) for c in op.participants):
            continue
        s = to_half(start)
        busy = set()
        for rank2, j in enumerate(indexed):
            if rank2 == rank:
                continue
            st2, op2 = timeline.ops[j]
            s2, e2 = to_half(st2), to_half(st2) + to_half(op2.duration)
            if s2 <= s < e2:
                busy.update(op2.participants)
        allowed = set(op.participants) | {
            c for c, p in grid.cells.items() if p.role == "routing" and c not in busy
        }
        seen = {op.participants[0]}
        stack = [op.participants[0]]
        while stack:
            cur = stack.pop()
            for nb in grid.neighbors(cur):
                if nb in allowed and nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        for coord in op.participants:
            if coord not in seen:
                conflicts.append(
                    Conflict(start, coord, (rank,), "participants disconnected")
                )
                break
    if not conflicts:
        return None
    conflicts.sort(key=lambda c: (c.clock, c.coord, c.op_indices))
    return conflicts[0]

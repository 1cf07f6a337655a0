"""2D Hubbard model terms and Jordan-Wigner orderings on an open square lattice.

Sites of the n x n lattice are indexed row-major: site = row * n + col.
Spin-orbitals are indexed spin * n**2 + site with spin 0 = up, 1 = down.
A Jordan-Wigner ordering maps line positions (0..V-1) to sites; both spin
sectors share the same site ordering on separate lines.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources


class OrderingError(ValueError):
    """Raised when an ordering pair violates a structural requirement."""


@dataclass(frozen=True)
class HubbardSpec:
    """Problem instance: n x n lattice with hopping t and onsite repulsion u."""

    n: int
    t: float = 1.0
    u: float = 4.0

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"lattice size must be at least 2, got {self.n}")

    @property
    def volume(self) -> int:
        return self.n * self.n


@dataclass(frozen=True)
class PauliTerm:
    """A single Pauli term: coefficient times a product of single-qubit Paulis.

    ``support`` maps spin-orbital index to a letter in {X, Y, Z}.
    """

    coefficient: float
    support: tuple[tuple[int, str], ...]
    kind: str  # "hopping_xx" | "hopping_yy" | "onsite_zz"


@dataclass
class PauliTermSet:
    terms: list[PauliTerm] = field(default_factory=list)

    def by_kind(self, kind: str) -> list[PauliTerm]:
        return [t for t in self.terms if t.kind == kind]

    def one_norm(self) -> float:
        return sum(abs(t.coefficient) for t in self.terms)


def grid_edges(n: int) -> list[tuple[int, int]]:
    """All nearest-neighbour edges of the n x n grid, as sorted site pairs."""
    edges = []
    for r in range(n):
        for c in range(n):
            s = r * n + c
            if c + 1 < n:
                edges.append((s, s + 1))
            if r + 1 < n:
                edges.append((s, s + n))
    return edges


def build_hamiltonian(spec: HubbardSpec) -> PauliTermSet:
    """Qubit Hamiltonian terms for the Hubbard instance.

    Each hopping edge contributes an XX and a YY term per spin sector with
    coefficient -t/2 (string factors between the endpoints cancel when the
    endpoints are adjacent on the Jordan-Wigner line, so only the two-qubit
    cores are recorded).  Each site contributes one ZZ term with coefficient
    u/4 coupling its two spin-orbitals.  Identity offsets are dropped.
    """
    v = spec.volume
    out = PauliTermSet()
    for spin in (0, 1):
        for a, b in grid_edges(spec.n):
            qa, qb = spin * v + a, spin * v + b
            out.terms.append(
                PauliTerm(-spec.t / 2, ((qa, "X"), (qb, "X")), "hopping_xx")
            )
            out.terms.append(
                PauliTerm(-spec.t / 2, ((qa, "Y"), (qb, "Y")), "hopping_yy")
            )
    for s in range(v):
        out.terms.append(
            PauliTerm(spec.u / 4, ((s, "Z"), (v + s, "Z")), "onsite_zz")
        )
    return out


def one_norm(spec: HubbardSpec) -> float:
    """Sum of absolute coefficients: 4n(n-1)t + n^2 u / 4."""
    n = spec.n
    return 4 * n * (n - 1) * spec.t + n * n * spec.u / 4


# ---------------------------------------------------------------------------
# Jordan-Wigner ordering pairs


@dataclass(frozen=True)
class OrderingPair:
    """Two site orderings that together make every grid edge line-local.

    ``order_a`` and ``order_b`` map line position -> site index.  ``edges_a``
    are the grid edges executed while the register sits in ordering A (their
    endpoints are adjacent on line A), ``edges_b`` likewise for B.  Together
    they partition the full edge set.
    """

    n: int
    order_a: tuple[int, ...]
    order_b: tuple[int, ...]
    edges_a: tuple[tuple[int, int], ...]
    edges_b: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class FSwapSchedule:
    """Layers of disjoint adjacent transpositions taking line A to line B.

    Each layer is a tuple of left positions p, meaning positions (p, p+1)
    are swapped simultaneously.
    """

    layers: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.layers)


def _local_edges(order: tuple[int, ...], n: int) -> set[tuple[int, int]]:
    """Grid edges whose endpoints sit on adjacent line positions."""
    grid = set(grid_edges(n))
    out = set()
    for p in range(len(order) - 1):
        e = tuple(sorted((order[p], order[p + 1])))
        if e in grid:
            out.add(e)
    return out


def _band_order(n: int, phase: int) -> tuple[int, ...]:
    """Site ordering by anti-diagonal bands of width two.

    Band k collects sites with row + col in {2k - 1 + phase, 2k + phase},
    each band sorted by col - row descending.  The two phases (0 and 1)
    produce complementary orderings: horizontal and vertical edges swap
    their locality between them.
    """
    out: list[int] = []
    sites = [(r, c) for r in range(n) for c in range(n)]
    maxd = 2 * (n - 1)
    k = 0
    while True:
        lo, hi = 2 * k - 1 + phase, 2 * k + phase
        band = [s for s in sites if lo <= s[0] + s[1] <= hi]
        if not band and lo > maxd:
            break
        band.sort(key=lambda s: s[1] - s[0], reverse=True)
        out.extend(r * n + c for r, c in band)
        k += 1
    return tuple(out)


def _split_shared(n: int, loc_a: set, loc_b: set) -> tuple[tuple, tuple]:
    """Partition the grid edges into A-local and B-local execution sets.

    Edges local to only one ordering are forced; edges local to both are
    distributed alternately (in sorted order) to keep the sets balanced.
    """
    shared = sorted(loc_a & loc_b)
    edges_a = set(loc_a - loc_b)
    edges_b = set(loc_b - loc_a)
    for i, e in enumerate(shared):
        (edges_a if i % 2 == 0 else edges_b).add(e)
    return tuple(sorted(edges_a)), tuple(sorted(edges_b))


def generate_ordering_pair(n: int) -> OrderingPair:
    """Construct the default ordering pair for an n x n lattice."""
    order_a = _band_order(n, 0)
    order_b = _band_order(n, 1)
    edges_a, edges_b = _split_shared(
        n, _local_edges(order_a, n), _local_edges(order_b, n)
    )
    pair = OrderingPair(n, order_a, order_b, edges_a, edges_b)
    validate_ordering_pair(pair)
    return pair


def validate_ordering_pair(pair: OrderingPair) -> None:
    """Check all structural requirements; raise OrderingError with details."""
    n = pair.n
    v = n * n
    for name, order in (("order_a", pair.order_a), ("order_b", pair.order_b)):
        if sorted(order) != list(range(v)):
            raise OrderingError(f"{name} is not a permutation of 0..{v - 1}")
    grid = set(grid_edges(n))
    ea, eb = set(pair.edges_a), set(pair.edges_b)
    if ea & eb:
        raise OrderingError(f"edge sets overlap: {sorted(ea & eb)}")
    if ea | eb != grid:
        missing = sorted(grid - (ea | eb))
        extra = sorted((ea | eb) - grid)
        raise OrderingError(f"edge cover mismatch: missing={missing} extra={extra}")
    for name, edges, order in (
        ("edges_a", ea, pair.order_a),
        ("edges_b", eb, pair.order_b),
    ):
        pos = {s: p for p, s in enumerate(order)}
        for a, b in edges:
            if abs(pos[a] - pos[b]) != 1:
                raise OrderingError(
                    f"{name} edge ({a},{b}) is not line-local "
                    f"(positions {pos[a]}, {pos[b]})"
                )
        # the two halves must be executable as vertex-disjoint sub-layers
        sublayers(edges, order)


def sublayers(
    edges, order: tuple[int, ...]
) -> tuple[tuple[tuple[int, int], ...], tuple[tuple[int, int], ...]]:
    """Split line-local edges into two equal vertex-disjoint halves.

    Edges are coloured by the parity of the lower line position of their
    endpoints; since every edge occupies two consecutive positions, edges of
    equal colour cannot share a site.
    """
    pos = {s: p for p, s in enumerate(order)}
    half0, half1 = [], []
    for e in sorted(edges):
        p = min(pos[e[0]], pos[e[1]])
        (half0 if p % 2 == 0 else half1).append(e)
    if len(half0) != len(half1):
        raise OrderingError(
            f"sub-layers unbalanced: {len(half0)} vs {len(half1)} edges"
        )
    for half in (half0, half1):
        seen: set[int] = set()
        for a, b in half:
            if a in seen or b in seen:
                raise OrderingError(f"sub-layer not vertex-disjoint at edge ({a},{b})")
            seen.update((a, b))
    return tuple(half0), tuple(half1)


_DATA_RANGE = range(2, 11)


def _data_file(n: int):
    return resources.files("starsched.data").joinpath(f"ordering_pair_n{n}.json")


def load_ordering_pair(path_or_obj) -> OrderingPair:
    """Load and validate an ordering pair from a JSON file or dict."""
    if isinstance(path_or_obj, dict):
        obj = path_or_obj
    else:
        with open(path_or_obj) as fh:
            obj = json.load(fh)
    try:
        pair = OrderingPair(
            n=int(obj["n"]),
            order_a=tuple(obj["order_a"]),
            order_b=tuple(obj["order_b"]),
            edges_a=tuple(tuple(sorted(e)) for e in obj["edges_a"]),
            edges_b=tuple(tuple(sorted(e)) for e in obj["edges_b"]),
        )
    except (KeyError, TypeError) as exc:
        raise OrderingError(f"malformed ordering pair data: {exc}") from exc
    validate_ordering_pair(pair)
    return pair


def default_orderings(n: int) -> OrderingPair:
    """The shipped ordering pair for n in 2..10, generated otherwise."""
    if n < 2:
        raise ValueError(f"lattice size must be at least 2, got {n}")
    if n in _DATA_RANGE:
        with resources.as_file(_data_file(n)) as path:
            return load_ordering_pair(path)
    return generate_ordering_pair(n)


# ---------------------------------------------------------------------------
# Routing between orderings


def _odd_even_route(
    order_a: tuple[int, ...], order_b: tuple[int, ...], start_phase: int
) -> tuple[tuple[int, ...], ...]:
    """Odd-even transposition routing from order_a to order_b.

    In each layer only positions with the current parity may swap, and a
    pair swaps exactly when doing so reduces displacement (the elements are
    inverted relative to the target ordering).
    """
    target = {s: p for p, s in enumerate(order_b)}
    cur = list(order_a)
    v = len(cur)
    layers: list[tuple[int, ...]] = []
    phase = start_phase
    while cur != list(order_b):
        layer = []
        for p in range(phase, v - 1, 2):
            if target[cur[p]] > target[cur[p + 1]]:
                layer.append(p)
        for p in layer:
            cur[p], cur[p + 1] = cur[p + 1], cur[p]
        layers.append(tuple(layer))
        phase ^= 1
        if len(layers) > 2 * v:
            raise OrderingError("routing failed to converge")
    while layers and not layers[-1]:
        layers.pop()
    return tuple(layers)


def route_orderings(pair: OrderingPair) -> FSwapSchedule:
    """Schedule of adjacent-swap layers taking line A to line B.

    Both starting parities of the odd-even router are tried and the shorter
    schedule is returned.  For the default ordering pairs the depth is n - 1.
    """
    best = None
    for phase in (0, 1):
        layers = _odd_even_route(pair.order_a, pair.order_b, phase)
        if best is None or len(layers) < len(best):
            best = layers
    assert best is not None
    sched = FSwapSchedule(best)
    # composition check: applying the layers to A must yield B
    cur = list(pair.order_a)
    for layer in sched.layers:
        used: set[int] = set()
        for p in layer:
            if p in used or p + 1 in used:
                raise OrderingError(f"overlapping swaps in layer {layer}")
            used.update((p, p + 1))
            cur[p], cur[p + 1] = cur[p + 1], cur[p]
    if tuple(cur) != pair.order_b:
        raise OrderingError("swap layers do not compose to the target ordering")
    return sched

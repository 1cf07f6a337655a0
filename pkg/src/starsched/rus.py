"""Parallel repeat-until-success rotations: analytics and Monte Carlo simulation.

A batch of M rotations runs as M independent RUS processes.  Each trial needs
a freshly injected ancilla (prepared in its injection region) and a joint
Pauli measurement (Z: 1 clock, ZZ: 2 clocks) that succeeds with probability
1/2; a failure doubles the rotation angle for the next trial.  The batch
finishes when the slowest process completes.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .injection import InjectionConfig, RotationRequest, success_prob

Coord = tuple[int, int]


# ---------------------------------------------------------------------------
# Analytics


def prob_finish_at(k: int, m: int) -> float:
    """Probability that the slowest of m processes finishes at trial k."""
    if k < 1 or m < 1:
        raise ValueError("k and m must be at least 1")
    return (1 - 2.0**-k) ** m - (1 - 2.0 ** (-k + 1)) ** m


def expected_trials(m: int) -> float:
    """Expected trial count of the slowest of m processes, summed to 1e-12.

    The tail beyond K is bounded by sum_{k>K} k·m·2^{-k}, which is driven
    below the tolerance before truncating.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    terms = []
    k = 1
    while True:
        terms.append(k * prob_finish_at(k, m))
        # geometric tail bound: sum_{j>k} j*m*2^-j = m*(k+2)*2^-k
        if m * (k + 2) * 2.0**-k < 1e-16:
            return math.fsum(terms)
        k += 1


# ---------------------------------------------------------------------------
# Injection-region growth


def update_injection_regions(
    free: set[Coord],
    regions: dict[int, set[Coord]],
    neighbors,
) -> dict[int, set[Coord]]:
    """Grow the ongoing regions over the free patches by simultaneous BFS.

    One ring per step: a free node adjacent to exactly one region is assigned
    to it; a node reached by several regions in the same step goes to the
    region with the fewest patches at the start of the step (ties to the
    lower process id).  Growth stops when no free adjacent node remains.
    Assigned nodes are removed from ``free`` in place.
    """
    regions = {pid: set(cells) for pid, cells in regions.items()}
    while True:
        sizes = {pid: len(cells) for pid, cells in regions.items()}
        claims: dict[Coord, list[int]] = {}
        for pid in sorted(regions):
            for cell in regions[pid]:
                for nb in neighbors(cell):
                    if nb in free:
                        claimants = claims.setdefault(nb, [])
                        if pid not in claimants:
                            claimants.append(pid)
        if not claims:
            return regions
        for node in sorted(claims):
            winner = min(claims[node], key=lambda pid: (sizes[pid], pid))
            regions[winner].add(node)
            free.discard(node)


# ---------------------------------------------------------------------------
# Simulator


@dataclass(frozen=True)
class RusStats:
    """Completion-clock statistics over independent simulated runs."""

    completions: tuple[int, ...]
    runs: int
    seed: int

    @property
    def mean(self) -> float:
        return sum(self.completions) / len(self.completions)

    @property
    def max(self) -> int:
        return max(self.completions)

    def histogram(self) -> dict[int, int]:
        return dict(sorted(Counter(self.completions).items()))

    def percentile(self, q: float) -> int:
        ordered = sorted(self.completions)
        idx = min(len(ordered) - 1, math.ceil(q / 100 * len(ordered)) - 1)
        return ordered[max(idx, 0)]


class _Proc:
    __slots__ = ("pid", "k", "status", "meas_left", "buffered", "region", "done_at")

    def __init__(self, pid: int, region: set[Coord]):
        self.pid = pid
        self.k = 1
        self.status = "awaiting"  # awaiting | ready | measuring | done
        self.meas_left = 0
        self.buffered = False
        self.region = region
        self.done_at = 0


def benchmark_layout(m: int, basis: str):
    """Targets and initial injection regions for an M-process batch.

    Z processes occupy single data patches on the outer rows with a one-patch
    region on the adjacent routing row; ZZ processes occupy a vertical data
    pair per column with a two-patch region below.
    """
    if m < 1:
        raise ValueError("need at least one process")
    targets: dict[int, tuple[Coord, ...]] = {}
    regions: dict[int, set[Coord]] = {}
    if basis == "Z":
        cols = (m + 1) // 2
        for pid in range(m):
            if pid < cols:
                targets[pid] = ((0, pid),)
                regions[pid] = {(1, pid)}
            else:
                c = pid - cols
                targets[pid] = ((3, c),)
                regions[pid] = {(2, c)}
    elif basis == "ZZ":
        cols = m
        for pid in range(m):
            targets[pid] = ((0, pid), (1, pid))
            regions[pid] = {(2, pid), (3, pid)}
    else:
        raise ValueError(f"basis must be Z or ZZ, got {basis!r}")
    cells = {(r, c) for r in range(4) for c in range(cols)}
    return targets, regions, cells


def _grid_neighbors(cells: set[Coord]):
    def neighbors(coord: Coord):
        r, c = coord
        return [
            nb
            for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1))
            if nb in cells
        ]

    return neighbors


def simulate_parallel_rus(
    m: int,
    basis: str,
    theta_star: float,
    cfg: InjectionConfig,
    mode: str = "adaptive",
    runs: int = 1000,
    seed: int = 0,
    threads: int = 1,
    debug: bool = False,
) -> RusStats:
    """Monte Carlo of M parallel RUS processes; returns per-run completion clocks.

    Per clock each awaiting process makes l·a injection attempts (l = region
    size, a = attempts per clock); a prepared ancilla starts its joint
    measurement on the next clock.  In adaptive mode processes pre-inject the
    next trial's ancilla during measurement clocks (one buffered state at
    most) and regions regrow over freed patches whenever processes complete;
    naive mode keeps the fixed initial regions and no pre-injection.
    """
    if mode not in ("naive", "adaptive"):
        raise ValueError(f"mode must be naive or adaptive, got {mode!r}")
    targets, regions0, cells = benchmark_layout(m, basis)
    neighbors = _grid_neighbors(cells)
    target_cells = {c for t in targets.values() for c in t}
    free0 = cells - target_cells - {c for r in regions0.values() for c in r}
    meas_clocks = 1 if basis == "Z" else 2
    a = cfg.attempts_per_clock

    # per-attempt success probability by trial index (angle doubles each trial)
    p_cache: dict[int, float] = {}

    def p_attempt(k: int) -> float:
        if k not in p_cache:
            p_cache[k] = success_prob(RotationRequest(theta_star, basis, k), cfg)
        return p_cache[k]

    def run_once(run_idx: int) -> int:
        rng = np.random.default_rng((seed, run_idx))
        procs = [_Proc(pid, set(regions0[pid])) for pid in range(m)]
        free = set(free0)
        remaining = m
        t = 0
        while remaining:
            t += 1
            finishing = []
            for p in procs:
                if p.status == "measuring":
                    if mode == "adaptive" and not p.buffered:
                        q = 1 - (1 - p_attempt(p.k + 1)) ** (len(p.region) * a)
                        if rng.random() < q:
                            p.buffered = True
                    p.meas_left -= 1
                    if p.meas_left == 0:
                        finishing.append(p)
                elif p.status == "awaiting":
                    q = 1 - (1 - p_attempt(p.k)) ** (len(p.region) * a)
                    if rng.random() < q:
                        p.status = "ready"
            completed = False
            for p in finishing:
                if rng.random() < 0.5:
                    p.status = "done"
                    p.done_at = t
                    free |= p.region
                    p.region = set()
                    remaining -= 1
                    completed = True
                else:
                    p.k += 1
                    if p.buffered:
                        p.buffered = False
                        p.status = "ready"
                    else:
                        p.status = "awaiting"
            if completed and mode == "adaptive" and remaining:
                ongoing = {p.pid: p.region for p in procs if p.status != "done"}
                grown = update_injection_regions(free, ongoing, neighbors)
                for p in procs:
                    if p.pid in grown:
                        p.region = grown[p.pid]
            for p in procs:
                if p.status == "ready":
                    p.status = "measuring"
                    p.meas_left = meas_clocks
            if debug:
                seen: set[Coord] = set()
                for p in procs:
                    assert not (p.region & seen), "regions overlap"
                    assert not (p.region & free), "region cell marked free"
                    seen |= p.region
        return t

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            completions = tuple(pool.map(run_once, range(runs)))
    else:
        completions = tuple(run_once(i) for i in range(runs))
    return RusStats(completions, runs, seed)


def calibrate_p_pass(
    target_mean: float,
    m: int = 32,
    basis: str = "Z",
    theta_star: float = 1e-8,
    cfg: InjectionConfig | None = None,
    runs: int = 300,
    seed: int = 7,
) -> float:
    """Pass rate making the naive-mode mean completion ≈ target_mean clocks.

    Bisects on log10(p_pass); the naive mean is monotone decreasing in the
    pass rate.
    """
    from dataclasses import replace

    from .injection import SHIPPED_CONFIGS

    base = cfg or SHIPPED_CONFIGS[9]

    def mean_at(log_p: float) -> float:
        trial = replace(base, p_pass=10.0**log_p)
        return simulate_parallel_rus(
            m, basis, theta_star, trial, "naive", runs, seed
        ).mean

    lo, hi = -4.0, 0.0
    for _ in range(22):
        mid = (lo + hi) / 2
        if mean_at(mid) > target_mean:
            lo = mid
        else:
            hi = mid
    return 10.0 ** ((lo + hi) / 2)

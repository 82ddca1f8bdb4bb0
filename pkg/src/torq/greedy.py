"""Random greedy matching process on toroidal boards.

Repeatedly picks a uniformly random remaining edge, adds it to a
matching, and deletes its vertices together with all incident edges.
Each step records the remaining edge count Q(i), the degree extremes
over surviving vertices, and (for odd n) the signed parity disparity:
the number of surviving odd-centered S vertices minus odd-centered D
vertices, which changes only when a single-wrap edge is removed.

Reference curves: with p(i) = 1 - 4i/|V(0)| the process tracks
Q(i) ~ n^2 p^4 and degrees ~ n p^3, with error envelopes
e_q = 2(1 - 4 ln p) b n^2 and e_d = 2(1 - 4 ln p) b^(2/3) n for a
user-chosen envelope width b.  The per-step product of Q(i) also yields
an unbiased estimator of the number of ordered perfect edge sequences,
i.e. n! times the perfect-matching count.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .board import (
    BoardKind,
    Edge,
    Matching,
    Part,
    TorusGraph,
    centered,
)
from .errors import PreconditionError, VerificationError

#: RNG family used by run_greedy; recorded in trace metadata.
RNG_ALGORITHM = "pcg64"


@dataclass(frozen=True)
class StepRecord:
    """State of the process after i edges have been removed."""

    i: int
    q: int  # remaining edge count Q(i)
    d_min: int  # minimum degree over surviving vertices (0 if none)
    d_max: int  # maximum degree over surviving vertices (0 if none)
    parity_disparity: int  # signed odd-S minus odd-D count (odd n only)
    p: float  # 1 - k*i/|V(0)| for a k-partite board


@dataclass(frozen=True)
class GreedyTrace:
    """Full record of one greedy run: per-step stats plus the matching."""

    n: int
    seed: int
    stop_fraction: float
    kind: BoardKind
    rng_algorithm: str
    steps: tuple[StepRecord, ...]
    matching: Matching
    completed: bool


@dataclass(frozen=True)
class Envelope:
    """Reference error envelopes around the idealized trajectories."""

    b: float

    def __post_init__(self) -> None:
        if self.b <= 0:
            raise PreconditionError("b", "envelope parameter b must be positive")

    def e_q(self, n: int, p: float) -> float:
        """Allowed deviation of Q(i) from n^2 p^4."""
        return 2.0 * (1.0 - 4.0 * math.log(p)) * self.b * n * n

    def e_d(self, n: int, p: float) -> float:
        """Allowed deviation of any degree from n p^3."""
        return 2.0 * (1.0 - 4.0 * math.log(p)) * self.b ** (2.0 / 3.0) * n


def _centered_parity(n: int) -> np.ndarray:
    """parity[c] = centered(n, c) mod 2 for residues c in 0..n-1."""
    c = np.arange(n)
    return np.where(c > n // 2, c - n, c) % 2


def _line_ids(n: int, part: Part, coord: int) -> np.ndarray:
    """Edge ids (x*n + y) of all edges through the given vertex."""
    t = np.arange(n)
    if part is Part.X:
        return coord * n + t
    if part is Part.Y:
        return t * n + coord
    if part is Part.S:
        return t * n + (coord - t) % n
    return t * n + (t - coord) % n


def run_greedy(
    g: TorusGraph, seed: int, stop_fraction: float, debug: bool = False
) -> GreedyTrace:
    """Run the uniform random greedy matching process on g.

    Selects a uniformly random remaining edge, appends it to the
    matching, deletes its vertices and all incident edges, and repeats
    until ceil(stop_fraction * m_max) edges are placed (m_max being the
    largest conceivable matching size) or no edges remain.  The trace
    records a StepRecord for every prefix, including the empty one.
    Deterministic for fixed (g, seed, stop_fraction).

    With debug=True the incrementally maintained degree arrays are
    recomputed from scratch every 256 steps and compared.
    """
    if g.kind is BoardKind.QUEENS_CLASSICAL:
        raise PreconditionError("kind", "greedy process runs on toroidal boards")
    if not (0.0 < stop_fraction <= 1.0):
        raise PreconditionError("stop-fraction", "stop_fraction must be in (0, 1]")
    n = g.n
    parts = g.parts()
    k = len(parts)
    has_d = Part.D in parts

    # Alive-edge mask over edge ids x*n + y, honouring punched holes.
    alive = np.ones(n * n, dtype=bool)
    vertex_alive = {part: np.ones(n, dtype=bool) for part in parts}
    for v in g.removed:
        alive[_line_ids(n, v.part, v.coord)] = False
        vertex_alive[v.part][v.coord] = False

    ids = np.flatnonzero(alive)
    xs, ys = ids // n, ids % n
    deg = {
        Part.X: np.bincount(xs, minlength=n),
        Part.Y: np.bincount(ys, minlength=n),
        Part.S: np.bincount((xs + ys) % n, minlength=n),
    }
    if has_d:
        deg[Part.D] = np.bincount((xs - ys) % n, minlength=n)
    q = int(ids.size)

    v0 = g.vertex_count()
    track_parity = has_d and n % 2 == 1
    par = _centered_parity(n)
    disparity = 0
    if track_parity:
        disparity = int(par[vertex_alive[Part.S]].sum()) - int(
            par[vertex_alive[Part.D]].sum()
        )

    m_max = min(int(vertex_alive[part].sum()) for part in parts)
    m_target = math.ceil(stop_fraction * m_max)

    # Uniform sampling by lazy deletion: draw an index into a pool of
    # edge ids, redraw while the edge is dead, compact the pool once
    # more than half of it is dead.
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    pool = ids

    def record(i: int) -> StepRecord:
        d_lo: int | None = None
        d_hi = 0
        for part in parts:
            mask = vertex_alive[part]
            if mask.any():
                col = deg[part][mask]
                lo = int(col.min())
                d_lo = lo if d_lo is None else min(d_lo, lo)
                d_hi = max(d_hi, int(col.max()))
        return StepRecord(i, q, d_lo or 0, d_hi, disparity, 1.0 - (k * i) / v0)

    steps = [record(0)]
    chosen: list[Edge] = []
    while len(chosen) < m_target and q > 0:
        if 2 * q < pool.size:
            pool = pool[alive[pool]]
        while True:
            eid = int(pool[rng.integers(pool.size)])
            if alive[eid]:
                break
        x0, y0 = divmod(eid, n)
        e = Edge(x0, y0)
        dead = [(Part.X, x0), (Part.Y, y0), (Part.S, (x0 + y0) % n)]
        if has_d:
            dead.append((Part.D, (x0 - y0) % n))
        cand = np.unique(np.concatenate([_line_ids(n, p, c) for p, c in dead]))
        rem = cand[alive[cand]]
        alive[rem] = False
        q -= int(rem.size)
        rx, ry = rem // n, rem % n
        deg[Part.X] -= np.bincount(rx, minlength=n)
        deg[Part.Y] -= np.bincount(ry, minlength=n)
        deg[Part.S] -= np.bincount((rx + ry) % n, minlength=n)
        if has_d:
            deg[Part.D] -= np.bincount((rx - ry) % n, minlength=n)
        for part, coord in dead:
            vertex_alive[part][coord] = False
        if track_parity:
            disparity += int(par[(x0 - y0) % n]) - int(par[(x0 + y0) % n])
        chosen.append(e)
        steps.append(record(len(chosen)))
        if debug and len(chosen) % 256 == 0:
            live = np.flatnonzero(alive)
            lx, ly = live // n, live % n
            assert np.array_equal(deg[Part.X], np.bincount(lx, minlength=n))
            assert np.array_equal(deg[Part.Y], np.bincount(ly, minlength=n))
            assert np.array_equal(deg[Part.S], np.bincount((lx + ly) % n, minlength=n))
            if has_d:
                assert np.array_equal(
                    deg[Part.D], np.bincount((lx - ly) % n, minlength=n)
                )
    return GreedyTrace(
        n=n,
        seed=seed,
        stop_fraction=stop_fraction,
        kind=g.kind,
        rng_algorithm=RNG_ALGORITHM,
        steps=tuple(steps),
        matching=Matching.of(chosen),
        completed=len(chosen) >= m_target,
    )


@dataclass(frozen=True)
class EnvelopeReport:
    """Per-step envelope verdicts for a trace."""

    first_violation: int | None
    inside_fraction: float
    inside: tuple[bool, ...]


def envelope_check(trace: GreedyTrace, b: float) -> EnvelopeReport:
    """Flag, per recorded step, whether Q(i) and the degree extremes lie
    within the reference envelopes around n^2 p^4 and n p^3."""
    env = Envelope(b)
    n = trace.n
    flags: list[bool] = []
    first: int | None = None
    for rec in trace.steps:
        p = rec.p
        v_alive = rec.i < len(trace.steps) - 1 or rec.d_max > 0 or rec.q > 0
        ok_q = abs(rec.q - n * n * p**4) <= env.e_q(n, p)
        ok_d = True
        if v_alive:
            target = n * p**3
            dev = max(abs(rec.d_min - target), abs(rec.d_max - target))
            ok_d = dev <= env.e_d(n, p)
        ok = ok_q and ok_d
        flags.append(ok)
        if not ok and first is None:
            first = rec.i
    frac = sum(flags) / len(flags) if flags else 1.0
    return EnvelopeReport(first, frac, tuple(flags))


@dataclass(frozen=True)
class CountEstimate:
    """Accumulated log of the number of process choices."""

    total: float  # sum over steps of log Q(i) - log(n - i)
    normalized: float  # total / n, comparable with log n - 3


def count_estimate(trace: GreedyTrace) -> CountEstimate:
    """Accumulate log Q(i) - log(n - i) over the steps actually taken.

    Q(i) counts the choices available at step i; dividing by (n - i)
    discounts the order in which the final matching could have been
    produced.  Normalized by n the value is comparable with log n - 3,
    the per-queen log of the (n/e^3)^n count lower bound.
    """
    n = trace.n
    total = 0.0
    for i in range(len(trace.matching)):
        total += math.log(trace.steps[i].q) - math.log(n - i)
    return CountEstimate(total, total / n)


def knuth_count_estimator(g: TorusGraph, trials: int, seed: int = 0) -> float:
    """Unbiased estimate of the number of ordered perfect edge sequences.

    Runs the greedy process to completion `trials` times; a run reaching
    a perfect matching contributes the product of its per-step choice
    counts Q(i), a dead run contributes 0.  The expectation of one run
    is exactly the number of ordered sequences of edges forming a
    perfect matching, i.e. n! times the perfect-matching count.
    Products are accumulated as exact integers, so no intermediate
    rounding occurs.  Trial t draws from the child stream
    SeedSequence([seed, t]), making each trial individually
    reproducible.
    """
    if g.kind is BoardKind.QUEENS_CLASSICAL:
        raise PreconditionError("kind", "estimator runs on toroidal boards")
    n = g.n
    parts = g.parts()
    base_alive = [True] * (n * n)
    for v in g.removed:
        for eid in _line_ids(n, v.part, v.coord):
            base_alive[int(eid)] = False
    m_max = n - max(sum(1 for v in g.removed if v.part is part) for part in parts)
    has_d = Part.D in parts
    lines = {
        part: [[int(e) for e in _line_ids(n, part, c)] for c in range(n)]
        for part in parts
    }

    total = 0
    for t in range(trials):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, t])))
        alive = base_alive.copy()
        pool = [i for i in range(n * n) if alive[i]]
        q = len(pool)
        product = 1
        placed = 0
        while placed < m_max and q > 0:
            product *= q
            if 2 * q < len(pool):
                pool = [i for i in pool if alive[i]]
            while True:
                eid = pool[int(rng.integers(len(pool)))]
                if alive[eid]:
                    break
            x0, y0 = divmod(eid, n)
            touched = (
                lines[Part.X][x0] + lines[Part.Y][y0] + lines[Part.S][(x0 + y0) % n]
            )
            if has_d:
                touched += lines[Part.D][(x0 - y0) % n]
            for other in touched:
                if alive[other]:
                    alive[other] = False
                    q -= 1
            placed += 1
        if placed == m_max:
            total += product
    return total / trials if trials else 0.0


def parity_track(trace: GreedyTrace) -> tuple[int, ...]:
    """Signed parity disparity after each step of an odd-n queens trace.

    Recomputes the sequence from the per-edge wrap classification of the
    matching (an edge whose centered S coordinate is even and centered D
    coordinate is odd contributes +1, the opposite single-wrap kind -1,
    non-wrap and double-wrap edges 0) and checks it against the values
    recorded during the run.
    """
    if trace.n % 2 == 0:
        raise PreconditionError("odd-n", "parity tracking requires odd n")
    if trace.kind is not BoardKind.QUEENS_TOROIDAL:
        raise PreconditionError("kind", "parity tracking requires the D part")
    n = trace.n
    out: list[int] = []
    delta = trace.steps[0].parity_disparity
    for i, e in enumerate(trace.matching):
        ps = centered(n, e.s(n)) % 2
        pd = centered(n, e.d(n)) % 2
        delta += pd - ps
        if delta != trace.steps[i + 1].parity_disparity:
            raise VerificationError(
                f"parity disparity mismatch at step {i + 1}: "
                f"recomputed {delta}, recorded {trace.steps[i + 1].parity_disparity}"
            )
        out.append(delta)
    return tuple(out)


# --- Reporting ----------------------------------------------------------


def trace_to_csv(trace: GreedyTrace, b: float) -> str:
    """Render a trace as CSV with the reference curves alongside."""
    env = Envelope(b)
    n = trace.n
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "Q", "p", "n2p4", "eq", "dmin", "dmax", "np3", "ed",
                "parity_disparity"])
    for rec in trace.steps:
        p = rec.p
        w.writerow([
            rec.i, rec.q, repr(p), repr(n * n * p**4), repr(env.e_q(n, p)),
            rec.d_min, rec.d_max, repr(n * p**3), repr(env.e_d(n, p)),
            rec.parity_disparity,
        ])
    return buf.getvalue()


def run_campaign(
    n: int, seeds: Sequence[int], b: float, stop_fraction: float
) -> dict:
    """Run one greedy trace per seed and fold the summary statistics."""
    g = TorusGraph(n)
    fracs: list[float] = []
    estimates: list[float] = []
    for seed in seeds:
        trace = run_greedy(g, seed, stop_fraction)
        fracs.append(envelope_check(trace, b).inside_fraction)
        estimates.append(count_estimate(trace).normalized)
    return {
        "schema": "torq/1",
        "n": n,
        "seeds": list(seeds),
        "b": b,
        "stop_fraction": stop_fraction,
        "summary": {
            "inside_fraction_median": statistics.median(fracs),
            "estimate_mean_log": statistics.fmean(estimates),
        },
    }

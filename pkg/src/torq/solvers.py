"""Exact solvers and explicit constructions on small boards.

Backtracking counters for the classical, toroidal, and semi-queens
problems; a branch-and-bound maximum partial toroidal solution matching
Monsky's closed form; and the removed-vertex construction that turns a
perfect matching of a punctured torus into a classical n-queens
placement whose only toroidal attacks are six pairs among twelve fixed
queens (three pairs on each diagonal family).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from random import Random
from typing import Iterator

from .board import (
    Edge,
    Matching,
    Part,
    TorusGraph,
    Vertex,
    attacks,
    placement_to_json,
    verify_matching,
)
from .errors import CapacityError, PreconditionError, VerificationError
from .lattice import Verdict, check_lattice_queens, sv

#: Largest n counted exhaustively by default (classical/toroidal/semi).
DEFAULT_EXHAUSTIVE_BOUND = 13
#: Largest n for the maximum-partial branch and bound by default.
DEFAULT_PARTIAL_BOUND = 16


def _check_n(n: int, bound: int | None, default: int) -> None:
    if n < 1:
        raise PreconditionError("n", "board side must be >= 1")
    limit = default if bound is None else bound
    if n > limit:
        raise CapacityError(
            f"n={n} exceeds the exhaustive bound {limit}; raise the bound explicitly"
        )


def count_classical(n: int, bound: int | None = None) -> int:
    """Exact number of n-queens placements on the classical board.

    Row-by-row backtracking with column/diagonal bitmasks and no
    symmetry reduction, so the value matches the published sequence.
    """
    _check_n(n, bound, DEFAULT_EXHAUSTIVE_BOUND)
    full = (1 << n) - 1

    def rec(cols: int, d1: int, d2: int) -> int:
        if cols == full:
            return 1
        count = 0
        avail = full & ~(cols | d1 | d2)
        while avail:
            bit = avail & -avail
            avail ^= bit
            count += rec(cols | bit, ((d1 | bit) << 1) & full, (d2 | bit) >> 1)
        return count

    return rec(0, 0, 0)


def count_toroidal(n: int, bound: int | None = None) -> int:
    """Exact number of perfect matchings of the toroidal board T(n)."""
    _check_n(n, bound, DEFAULT_EXHAUSTIVE_BOUND)
    return sum(1 for _ in toroidal_solutions(n, bound))


def toroidal_solutions(n: int, bound: int | None = None) -> Iterator[tuple[tuple[int, int], ...]]:
    """Yield every toroidal n-queens solution as a row-ordered placement."""
    _check_n(n, bound, DEFAULT_EXHAUSTIVE_BOUND)
    queens: list[tuple[int, int]] = []

    def rec(r: int, cols: int, sused: int, dused: int):
        if r == n:
            yield tuple(queens)
            return
        for c in range(n):
            s, d = (r + c) % n, (r - c) % n
            probe = (cols >> c | sused >> s | dused >> d) & 1
            if probe:
                continue
            queens.append((r, c))
            yield from rec(r + 1, cols | 1 << c, sused | 1 << s, dused | 1 << d)
            queens.pop()

    yield from rec(0, 0, 0, 0)


def count_semiqueens(n: int, mode: str = "toroidal", bound: int | None = None) -> int:
    """Exact semi-queens count: permutations with distinct sum diagonals,
    taken mod n (toroidal) or over 0..2n-2 (classical)."""
    _check_n(n, bound, DEFAULT_EXHAUSTIVE_BOUND)
    if mode not in ("toroidal", "classical"):
        raise PreconditionError("mode", f"unknown mode {mode!r}")
    toroidal = mode == "toroidal"
    full = (1 << n) - 1

    def rec(r: int, cols: int, sused: int) -> int:
        if cols == full:
            return 1
        count = 0
        for c in range(n):
            s = (r + c) % n if toroidal else r + c
            if (cols >> c | sused >> s) & 1:
                continue
            count += rec(r + 1, cols | 1 << c, sused | 1 << s)
        return count

    return rec(0, 0, 0)


def monsky_value(n: int) -> int:
    """Closed form for the maximum partial toroidal solution size: n when
    n = 1,5 mod 6, n-1 when neither 3 nor 4 divides n, else n-2."""
    if n % 6 in (1, 5):
        return n
    if n % 3 != 0 and n % 4 != 0:
        return n - 1
    return n - 2


def max_partial_toroidal(n: int, bound: int | None = None) -> int:
    """Maximum matching size in T(n), by branch and bound.

    Feasibility of each target size m is tested in descending order with
    a skip budget of n - m rows.  The torus translation group acts on
    partial solutions, so any nonempty solution can be normalized to
    contain a queen at (0, 0); fixing that queen prunes the search by a
    factor of n^2 without losing feasibility.
    """
    _check_n(n, bound, DEFAULT_PARTIAL_BOUND)
    if n == 1:
        return 1
    full = (1 << n) - 1

    def rot(mask: int, k: int) -> int:
        # bit c of the result is bit (c + k) mod n of mask
        k %= n
        return ((mask >> k) | (mask << (n - k))) & full

    def feasible(m: int) -> bool:
        # su is indexed by (r + c) mod n; nd by (c - r) mod n, which makes
        # both row-queryable by rotation.
        def rec(r: int, placed: int, skips: int, cols: int, su: int, nd: int) -> bool:
            if placed == m:
                return True
            if n - r < m - placed:
                return False
            avail = full & ~(cols | rot(su, r) | rot(nd, n - r))
            while avail:
                bit = avail & -avail
                avail ^= bit
                c = bit.bit_length() - 1
                if rec(r + 1, placed + 1, skips, cols | bit,
                       su | 1 << (r + c) % n, nd | 1 << (c - r) % n):
                    return True
            return skips > 0 and rec(r + 1, placed, skips - 1, cols, su, nd)

        # Normalized: queen at (0, 0) uses column 0, sum 0, difference 0.
        return rec(1, 1, n - m, 1, 1, 1)

    for m in range(n, 0, -1):
        if feasible(m):
            return m
    return 0


# --- The punctured-torus classical construction -------------------------


@dataclass(frozen=True)
class WSet:
    """Removed-vertex data for the punctured torus T* = T(n) - W.

    tuples holds three octets (a, b, x, y, c, d, w, z) of distinct
    elements of 1..n with x + y = a + b + n and w - z = c - d - n, so the
    queens (a, b), (x, y) attack toroidally on a sum diagonal and
    (c, d), (w, z) on a difference diagonal, with no classical attacks.
    W removes 12 vertices per part: the rows, columns, and the nine used
    diagonal classes, padded to twelve by three spare diagonals per
    family offset by delta (n/6, n/2, or n/3 by divisibility case).
    """

    n: int
    case: str  # "even-3div" | "even-3ndiv" | "odd-3div"
    tuples: tuple[tuple[int, int, int, int, int, int, int, int], ...]
    delta: int
    removed_vertices: frozenset[Vertex]

    def fixed_queens(self) -> tuple[tuple[int, int], ...]:
        """The 12 queens, as 0-indexed board squares."""
        out = []
        for a, b, x, y, c, d, w, z in self.tuples:
            out += [(a - 1, b - 1), (x - 1, y - 1), (c - 1, d - 1), (w - 1, z - 1)]
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "schema": "torq/1",
            "n": self.n,
            "case": self.case,
            "delta": self.delta,
            "tuples": [list(t) for t in self.tuples],
            "removed_vertices": sorted(
                (v.part.value, v.coord) for v in self.removed_vertices
            ),
        }


def _wset_case(n: int) -> tuple[str, int]:
    if n % 6 in (1, 5):
        raise PreconditionError("case", "n = 1,5 mod 6 needs no removed vertices")
    if n % 2 == 0 and n % 3 == 0:
        return "even-3div", n // 6
    if n % 2 == 0:
        return "even-3ndiv", n // 2
    if n % 3 == 0:
        return "odd-3div", n // 3
    raise PreconditionError("case", f"n={n} falls in no divisibility case")


def _congruence_holds(n: int, case: str, total: int) -> bool:
    """The per-case divisibility constraint on sum(a_i+b_i+c_i-d_i)."""
    if case == "even-3div":
        return (2 + n + 2 * total) % 12 == 0
    if case == "even-3ndiv":
        return (2 + n + 2 * total) % 4 == 0
    return (1 + 2 * total) % 3 == 0


def _removed_vertices(
    n: int,
    tuples: tuple[tuple[int, int, int, int, int, int, int, int], ...],
    delta: int,
) -> frozenset[Vertex]:
    """W as board vertices.  Elements of 1..n convert to residues by
    v -> v-1 on rows/columns; a sum-diagonal value sigma (of 1-indexed
    squares) is the S residue sigma-2, a difference value is unchanged."""
    out: set[Vertex] = set()
    for a, b, x, y, c, d, w, z in tuples:
        for row in (a, x, c, w):
            out.add(Vertex(Part.X, row - 1))
        for col in (b, y, d, z):
            out.add(Vertex(Part.Y, col - 1))
        for sigma in (a + b, c + d, w + z, a + b + delta):
            out.add(Vertex(Part.S, (sigma - 2) % n))
        for diff in (a - b, x - y, c - d, c - d + delta):
            out.add(Vertex(Part.D, diff % n))
    return frozenset(out)


def wset_candidates(n: int, node_limit: int = 200_000_000) -> Iterator[WSet]:
    """All WSets for n in lexicographic order of their flattened tuples.

    Depth-first search over the free fields in the order a1, b1, x1, c1,
    d1, w1, a2, ... (y_i and z_i are determined), taking values in
    ascending order; prunes on element distinctness, on distinctness
    mod n of the twelve sum and twelve difference diagonal classes, on
    the case congruence once all a, b, c, d are fixed, and on having
    enough disjoint small-sum pairs left for the remaining octets.
    """
    if n < 26:
        raise PreconditionError("n", "need n >= 26 for 24 distinct elements")
    case, delta = _wset_case(n)
    half = n // 2
    used: set[int] = set()
    svals: set[int] = set()
    dvals: set[int] = set()
    octets: list[tuple[int, ...]] = []
    nodes = 0

    def small_pairs_available(needed: int) -> bool:
        # Each octet still to build consumes a distinct pair of elements
        # with sum at most n//2; a two-pointer scan over the free
        # elements counts the largest number of disjoint such pairs.
        if needed <= 0:
            return True
        free = sorted(e for e in range(1, half + 1) if e not in used)
        lo, hi, pairs = 0, len(free) - 1, 0
        while lo < hi:
            if free[lo] + free[hi] <= half:
                pairs += 1
                lo += 1
            hi -= 1
        return pairs >= needed

    def octet(i: int) -> Iterator[None]:
        nonlocal nodes
        for a in range(1, half):
            if a in used:
                continue
            for b in range(1, half - a + 1):
                nodes += 1
                if nodes > node_limit:
                    raise CapacityError(f"WSet search exceeded {node_limit} nodes")
                if b in used or b == a:
                    continue
                s_ab = [(a + b) % n, (a + b + delta) % n]
                if len(set(s_ab)) < 2 or svals.intersection(s_ab):
                    continue
                d_ab = (a - b) % n
                if d_ab in dvals:
                    continue
                svals.update(s_ab)
                dvals.add(d_ab)
                used.update((a, b))
                if small_pairs_available(2 - i):
                    yield from _octet_x(i, a, b)
                used.difference_update((a, b))
                svals.difference_update(s_ab)
                dvals.discard(d_ab)

    def _octet_x(i: int, a: int, b: int) -> Iterator[None]:
        for x in range(a + b, n + 1):
            y = a + b + n - x
            if x in used or y in used or x == y:
                continue
            d_xy = (x - y) % n
            if d_xy in dvals:
                continue
            dvals.add(d_xy)
            used.update((x, y))
            yield from _octet_cd(i, a, b, x, y)
            used.difference_update((x, y))
            dvals.discard(d_xy)

    def _octet_cd(i: int, a: int, b: int, x: int, y: int) -> Iterator[None]:
        for c in range(1, n + 1):
            if c in used:
                continue
            for d in range(max(1, c - half), c):
                if d in used:
                    continue
                if i == 2:
                    total = sum(t[0] + t[1] + t[4] - t[5] for t in octets)
                    if not _congruence_holds(n, case, total + a + b + c - d):
                        continue
                s_cd = (c + d) % n
                if s_cd in svals:
                    continue
                d_cd = [(c - d) % n, (c - d + delta) % n]
                if len(set(d_cd)) < 2 or dvals.intersection(d_cd):
                    continue
                svals.add(s_cd)
                dvals.update(d_cd)
                used.update((c, d))
                yield from _octet_w(i, a, b, x, y, c, d)
                used.difference_update((c, d))
                svals.discard(s_cd)
                dvals.difference_update(d_cd)

    def _octet_w(
        i: int, a: int, b: int, x: int, y: int, c: int, d: int
    ) -> Iterator[None]:
        for w in range(1, c - d + 1):
            z = w + n - (c - d)
            if w in used or z in used:
                continue
            s_wz = (w + z) % n
            if s_wz in svals:
                continue
            svals.add(s_wz)
            used.update((w, z))
            octets.append((a, b, x, y, c, d, w, z))
            if small_pairs_available(2 - i):
                if i == 2:
                    yield None
                else:
                    yield from octet(i + 1)
            octets.pop()
            used.difference_update((w, z))
            svals.discard(s_wz)

    for _ in octet(0):
        tuples = tuple(octets)
        wset = WSet(n, case, tuples, delta, _removed_vertices(n, tuples, delta))
        _verify_wset(wset)
        yield wset


def build_wset(n: int, node_limit: int = 20_000_000) -> WSet:
    """The lexicographically smallest WSet for n's divisibility case."""
    for wset in wset_candidates(n, node_limit):
        return wset
    raise CapacityError(f"no WSet exists within the searched range for n={n}")


def wset_from_tuples(
    n: int, tuples: tuple[tuple[int, int, int, int, int, int, int, int], ...]
) -> WSet:
    """Rebuild a WSet from its three octets, re-verifying every invariant."""
    case, delta = _wset_case(n)
    wset = WSet(n, case, tuples, delta, _removed_vertices(n, tuples, delta))
    _verify_wset(wset)
    return wset


def _verify_wset(w: WSet) -> None:
    """Re-check every WSet invariant on a constructed instance."""
    n, half = w.n, w.n // 2
    elements = [e for t in w.tuples for e in t]
    if len(set(elements)) != 24 or not all(1 <= e <= n for e in elements):
        raise VerificationError("WSet elements not 24 distinct members of 1..n")
    svals, dvals = set(), set()
    total = 0
    for a, b, x, y, c, d, wv, z in w.tuples:
        if not (1 <= a + b <= half and x + y == a + b + n):
            raise VerificationError("sum-pair constraint violated")
        if not (1 <= c - d <= half and wv - z == c - d - n):
            raise VerificationError("difference-pair constraint violated")
        svals.update(v % n for v in (a + b, c + d, wv + z, a + b + w.delta))
        dvals.update(v % n for v in (a - b, x - y, c - d, c - d + w.delta))
        total += a + b + c - d
    if len(svals) != 12 or len(dvals) != 12:
        raise VerificationError("diagonal classes of W not distinct mod n")
    if not _congruence_holds(n, w.case, total):
        raise VerificationError("case congruence violated")
    if len(w.removed_vertices) != 48:
        raise VerificationError("W must remove 12 vertices in each part")


def verify_tstar_lattice(n: int, w: WSet) -> Verdict:
    """Lattice membership of the all-ones target on T(n) minus W.

    Builds the vector with weight 1 on every vertex outside W and 0 on
    W, and runs the full queens-lattice membership test; a valid WSet
    must pass, which is what makes the all-ones target on the punctured
    board reachable."""
    weights = {
        part: dict.fromkeys(range(n), 1) for part in (Part.X, Part.Y, Part.S, Part.D)
    }
    for v in w.removed_vertices:
        weights[v.part][v.coord] = 0
    items = [
        (part, coord, wt)
        for part, col in weights.items()
        for coord, wt in col.items()
    ]
    return check_lattice_queens(sv(n, items))


@dataclass(frozen=True)
class ClassicalExtension:
    """A full n-queens placement assembled from a punctured-torus
    matching plus the 12 fixed queens."""

    n: int
    queens: tuple[tuple[int, int], ...]  # all n, fixed first
    fixed_queens: tuple[tuple[int, int], ...]
    matching: Matching
    toroidal_attack_pairs: tuple[tuple[int, int], ...]  # indices into queens

    def to_json(self) -> dict:
        obj = placement_to_json(self.n, "classical", self.queens)
        obj["fixed_queens"] = [[r, c] for r, c in self.fixed_queens]
        obj["toroidal_attack_pairs"] = [
            [i, j] for i, j in self.toroidal_attack_pairs
        ]
        return obj


def verify_placement(
    n: int, queens: list[tuple[int, int]], mode: str
) -> list[tuple[int, int]]:
    """All attacking index pairs among the queens under the given mode."""
    if len(set(queens)) != len(queens):
        raise PreconditionError("queens", "duplicate squares in placement")
    out = []
    for i in range(len(queens)):
        for j in range(i + 1, len(queens)):
            if attacks(n, mode, queens[i], queens[j]):
                out.append((i, j))
    return out


def extend_classical(
    n: int,
    w: WSet,
    budget_seconds: float = 30.0,
    max_restarts: int = 1000,
    seed: int = 0,
) -> ClassicalExtension:
    """Classical n-queens placement with exactly six toroidal attack
    pairs, from a perfect matching of the punctured torus.

    Searches for a perfect matching of T(n) minus W by depth-first
    search with seed-shuffled row and column orders, restarting with a
    fresh shuffle whenever a node cap is hit, within the wall-clock
    budget.  A found matching is combined with the 12 fixed queens and
    the result is fully verified before being returned: no classical
    attacks, and exactly six toroidal attack pairs, all among the fixed
    queens.  Raises CapacityError when the budget is exhausted.
    """
    _verify_wset(w)
    removed = {part: set() for part in (Part.X, Part.Y, Part.S, Part.D)}
    for v in w.removed_vertices:
        removed[v.part].add(v.coord)
    rows = [r for r in range(n) if r not in removed[Part.X]]
    cols = [c for c in range(n) if c not in removed[Part.Y]]
    deadline = time.monotonic() + budget_seconds
    node_cap = 50_000

    for restart in range(max_restarts):
        if time.monotonic() > deadline:
            break
        rng = Random((seed << 20) + restart)
        order = rows[:]
        rng.shuffle(order)
        col_order = {r: rng.sample(cols, len(cols)) for r in order}
        used_c: set[int] = set()
        used_s: set[int] = set()
        used_d: set[int] = set()
        chosen: list[Edge] = []
        nodes = 0
        truncated = False

        def rec(idx: int) -> bool:
            nonlocal nodes, truncated
            if idx == len(order):
                return True
            nodes += 1
            if nodes > node_cap or time.monotonic() > deadline:
                truncated = True
                return False
            r = order[idx]
            for c in col_order[r]:
                if c in used_c:
                    continue
                s, d = (r + c) % n, (r - c) % n
                if s in removed[Part.S] or d in removed[Part.D]:
                    continue
                if s in used_s or d in used_d:
                    continue
                used_c.add(c)
                used_s.add(s)
                used_d.add(d)
                chosen.append(Edge(r, c))
                if rec(idx + 1):
                    return True
                chosen.pop()
                used_c.discard(c)
                used_s.discard(s)
                used_d.discard(d)
            return False

        if rec(0):
            return _assemble_extension(n, w, Matching.of(chosen))
        if not truncated:
            # The restart ran to exhaustion: this punctured torus has no
            # perfect matching at all, so further restarts are pointless.
            raise CapacityError(
                f"the punctured torus for n={n} has no perfect matching "
                "with this removed-vertex set"
            )
    raise CapacityError(
        f"no perfect matching of the punctured torus found within budget for n={n}"
    )


def extend_classical_search(
    n: int,
    budget_seconds: float = 60.0,
    seed: int = 0,
    per_wset_seconds: float = 1.0,
) -> ClassicalExtension:
    """Classical extension over successive WSets within a time budget.

    At desk scale the lexicographically smallest WSet often leaves a
    punctured torus with no perfect matching at all, so this walks the
    WSets in lexicographic order, giving each a short slice of the
    budget (provably empty punctured tori are dismissed in one
    exhausted restart).  Deterministic given (n, seed).
    """
    deadline = time.monotonic() + budget_seconds
    for w in wset_candidates(n):
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            break
        try:
            return extend_classical(
                n, w, budget_seconds=min(per_wset_seconds, remaining), seed=seed
            )
        except CapacityError:
            continue
    raise CapacityError(
        f"no extendable removed-vertex set found within budget for n={n}"
    )


def _assemble_extension(n: int, w: WSet, m: Matching) -> ClassicalExtension:
    tstar = TorusGraph(n, removed=w.removed_vertices)
    report = verify_matching(tstar, m, require_perfect=True)
    if not (report.valid and report.perfect):
        raise VerificationError("candidate matching fails verification on T*")
    fixed = w.fixed_queens()
    queens = fixed + tuple((e.x, e.y) for e in m)
    if verify_placement(n, list(queens), "classical"):
        raise VerificationError("assembled placement has classical attacks")
    pairs = tuple(verify_placement(n, list(queens), "toroidal"))
    if len(pairs) != 6 or any(j >= len(fixed) for _, j in pairs):
        raise VerificationError(
            "toroidal attacks are not exactly six pairs among the fixed queens"
        )
    s_pairs = sum(
        1 for i, j in pairs if (queens[i][0] + queens[i][1]) % n
        == (queens[j][0] + queens[j][1]) % n
    )
    if s_pairs != 3:
        raise VerificationError("toroidal attacks must split 3 + 3 by diagonal family")
    return ClassicalExtension(n, queens, fixed, m, pairs)

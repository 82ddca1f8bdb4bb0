"""Constructive decompositions of lattice vectors into signed edge sets.

The central objects are signed edge multisets ``phi`` whose boundary
(:func:`torq.lattice.shadow`) hits a prescribed target vector.  The
builders proceed through named phases and every public entry point
re-verifies its own output bit-exactly, raising :class:`VerificationError`
rather than returning a wrong answer.

Step vectors used internally ("SQ steps", in offset form) are the
supports ``+1@a, -1@(a+b), -1@(a+c), +1@(a+b+c)`` on the diagonal-sum
part; "Q steps" are differences of two SQ steps at bases ``a`` and
``a+s`` and are exactly the vectors realizable by eight signed edges
with no residue on the other three parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .board import (
    Edge,
    Interval,
    Matching,
    PART_ORDER,
    Part,
    TorusGraph,
    Vertex,
    centered,
    edge_at_centered,
    edge_of,
    square,
    verify_matching,
)
from .errors import CapacityError, PreconditionError, VerificationError
from .lattice import (
    SignedEdgeSet,
    SupportVector,
    check_lattice_queens,
    check_sublattice_S,
    shadow,
)

__all__ = [
    "ZeroSumConfig",
    "Cascade",
    "DecompositionResult",
    "make_config",
    "bidc_reduce",
    "bidc_size_bound",
    "decompose_bounded",
    "push_down",
    "zero_sum_support",
    "cover_leave",
    "to_matching_pair",
    "build_cascade",
]


# --- zero-sum configurations -------------------------------------------


@dataclass(frozen=True)
class ZeroSumConfig:
    """Eight edges in two matchings of four whose boundaries cancel.

    Parameters are residues; the fourth implied column is
    ``d = b + c - a``.  The two matchings cover the same sixteen
    vertices when ``valid`` holds.
    """

    n: int
    a: int
    b: int
    c: int
    s: int

    @property
    def d(self) -> int:
        return (self.b + self.c - self.a) % self.n

    def positive_edges(self) -> tuple[Edge, ...]:
        n, a, b, c, s, d = self.n, self.a, self.b, self.c, self.s, self.d
        return (
            edge_of(n, a, (b + s) % n),
            edge_of(n, b, (d + s) % n),
            edge_of(n, c, (a + s) % n),
            edge_of(n, d, (c + s) % n),
        )

    def negative_edges(self) -> tuple[Edge, ...]:
        n, a, b, c, s, d = self.n, self.a, self.b, self.c, self.s, self.d
        return (
            edge_of(n, a, (c + s) % n),
            edge_of(n, b, (a + s) % n),
            edge_of(n, c, (d + s) % n),
            edge_of(n, d, (b + s) % n),
        )

    def edge_set(self) -> SignedEdgeSet:
        acc: dict[Edge, int] = {}
        for e in self.positive_edges():
            acc[e] = acc.get(e, 0) + 1
        for e in self.negative_edges():
            acc[e] = acc.get(e, 0) - 1
        return SignedEdgeSet(self.n, acc)

    def vertices(self) -> set[Vertex]:
        out: set[Vertex] = set()
        for e in self.positive_edges():
            out.update(e.vertices(self.n))
        return out

    @property
    def valid(self) -> bool:
        """True when the sixteen vertices are pairwise distinct."""
        return len(self.vertices()) == 16

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "params": {"a": self.a, "b": self.b, "c": self.c, "s": self.s},
            "valid": self.valid,
            "positive": [{"x": e.x, "y": e.y} for e in self.positive_edges()],
            "negative": [{"x": e.x, "y": e.y} for e in self.negative_edges()],
        }


def make_config(n: int, a: int, b: int, c: int, s: int) -> ZeroSumConfig:
    """Build the zero-sum configuration with the given residue parameters."""
    if n < 1:
        raise PreconditionError("board-size", "n must be positive")
    return ZeroSumConfig(n, a % n, b % n, c % n, s % n)


# --- results ------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionResult:
    """A target vector, the realizing edge set, and a per-phase audit."""

    target: SupportVector
    phi: SignedEdgeSet
    phases: tuple[tuple[str, int, int], ...] = ()

    @property
    def size(self) -> int:
        return self.phi.size()

    def to_json(self) -> dict:
        return {
            "target": self.target.to_json(),
            "phi": self.phi.to_json(),
            "size": self.size,
            "phases": [
                {"name": name, "gadgets": g, "edges": e} for name, g, e in self.phases
            ],
        }


# --- Q-step realization -------------------------------------------------


def _q_step_realizable(n: int, b: int, c: int, s: int) -> bool:
    return n % 2 == 1 or s % 2 == 0 or (b + c) % 2 == 1


def _q_step_edges(n: int, a: int, b: int, c: int, s: int) -> list[tuple[int, int, int]]:
    """Eight signed edges whose boundary is the Q step (a, b, c, s).

    Returned as ``(x, y, sign)`` triples; the boundary vanishes on the
    row, column and difference parts and equals
    ``SQ(a,b,c) - SQ(a+s,b,c)`` on the sum part.
    """
    out: list[tuple[int, int, int]] = []
    if s % 2 == 0 or n % 2 == 1:
        t = (s // 2) % n if s % 2 == 0 else (s * ((n + 1) // 2)) % n
        r0, r1 = 0, c % n
        k0, k1 = a % n, (a + b) % n
        out += [(r0, k0, 1), (r1, k1, 1), (r0, k1, -1), (r1, k0, -1)]
        out += [
            ((r0 + t) % n, (k0 + t) % n, -1),
            ((r1 + t) % n, (k1 + t) % n, -1),
            ((r0 + t) % n, (k1 + t) % n, 1),
            ((r1 + t) % n, (k0 + t) % n, 1),
        ]
        return out
    if (b + c) % 2 == 0:
        raise PreconditionError(
            "q-step-parity",
            f"Q step (a={a}, b={b}, c={c}, s={s}) has no edge realization at even n={n}",
        )
    # Crosswise pairing: the two constituent matrices use the two step
    # orientations so their difference-part residues cancel despite the
    # odd shift.
    out += [(0, a % n, 1), (c % n, (a + b) % n, 1), (0, (a + b) % n, -1), (c % n, a % n, -1)]
    h = (s % n) + (c % n) - (b % n)
    ap = (h // 2) % n  # h is even: s odd and b+c odd
    base = (a + s) % n
    out += [
        (ap, (base - ap) % n, -1),
        ((ap + b) % n, (base + c - ap) % n, -1),
        (ap, (base + c - ap) % n, 1),
        ((ap + b) % n, (base - ap) % n, 1),
    ]
    return out


# --- binary-identity reduction on the sum part --------------------------


def _sq_step_decompose(n: int, weights: dict[int, int]) -> list[tuple[int, int, int, int]]:
    """Greedy exact decomposition of a sum-part vector into SQ steps.

    Requires total weight zero and first moment divisible by n.  Returns
    endpoint quadruple signs ``(sign, a, p, q)`` standing for
    ``sign * (+1@a, -1@p, -1@q, +1@(p+q-a))``; the total absolute weight
    drops by exactly two per emitted step.
    """
    w = {k: v for k, v in weights.items() if v}
    gens: list[tuple[int, int, int, int]] = []
    while w:
        a0 = min(k for k, v in w.items() if v)
        sigma = 1 if w[a0] > 0 else -1
        opp = sorted(k for k, v in w.items() if (v > 0) != (sigma > 0))
        if not opp:
            raise VerificationError("sum-part decomposition lost zero total weight")
        p = opp[0]
        if abs(w[p]) >= 2:
            q = p
        elif len(opp) > 1:
            q = opp[1]
        else:
            raise VerificationError("sum-part decomposition hit an unsplittable pair")
        r = (p + q - a0) % n
        gens.append((sigma, a0, p, q))
        for coord, delta in ((a0, -sigma), (p, sigma), (q, sigma), (r, -sigma)):
            nv = w.get(coord, 0) + delta
            if nv:
                w[coord] = nv
            else:
                w.pop(coord, None)
    return gens


def _split_powers(n: int, g: int) -> list[int]:
    """Binary expansion of a residue with every power at most n // 2."""
    parts: list[int] = []
    top = 1 << (g.bit_length() - 1)
    if top > n // 2:
        parts += [top // 2, top // 2]
        g -= top
    while g:
        p = 1 << (g.bit_length() - 1)
        parts.append(p)
        g -= p
    return parts


class _BinaryReducer:
    """Rewrites a sum-part vector into realizable Q steps.

    Tracks the invariant: input = (class coefficients on the base steps
    SQ(0, 1, 2^j)) + (recorded Q steps).
    """

    def __init__(self, n: int) -> None:
        self.n = n
        self.classes: dict[int, int] = {}
        self.steps: list[tuple[str, int, int, int, int, int]] = []

    def record(self, phase: str, mult: int, a: int, b: int, c: int, s: int) -> None:
        if mult == 0:
            return
        n = self.n
        a, b, c, s = a % n, b % n, c % n, s % n
        if not _q_step_realizable(n, b, c, s):
            raise VerificationError(
                f"internal Q step (a={a}, b={b}, c={c}, s={s}) unrealizable at n={n}"
            )
        self.steps.append((phase, mult, a, b, c, s))

    def bump_class(self, j: int, w: int) -> None:
        nv = self.classes.get(j, 0) + w
        if nv:
            self.classes[j] = nv
        else:
            self.classes.pop(j, None)

    def _is_small_power(self, g: int) -> bool:
        return g > 0 and (g & (g - 1)) == 0 and g <= self.n // 2

    def normalize(self, w: int, a: int, b: int, c: int) -> None:
        """Fold w * SQ(a, b, c) into base classes, recording Q steps."""
        n = self.n
        a, b, c = a % n, b % n, c % n
        if w == 0 or b == 0 or c == 0:
            return
        # Prefer the short residue representative: SQ(a, b, c) with
        # c = n - h equals -SQ(a - h, b, h), a pure rewrite.
        if c > n - c and not self._is_small_power(c):
            self.normalize(-w, a - (n - c), b, n - c)
            return
        if b > n - b and not self._is_small_power(b):
            self.normalize(-w, a - (n - b), n - b, c)
            return
        if not self._is_small_power(b):
            pos = 0
            for p in _split_powers(n, b):
                self.normalize(w, a + pos, p, c)
                pos += p
            return
        if not self._is_small_power(c):
            pos = 0
            for p in _split_powers(n, c):
                self.normalize(w, a + pos, b, p)
                pos += p
            return
        x = b.bit_length() - 1
        y = c.bit_length() - 1
        if x > 0 and y > 0:
            # Halve one power while doubling the other until the first
            # becomes a unit step; each halving costs two Q steps.
            while x > 0:
                bb = 1 << (x - 1)
                cc = 1 << y
                self.record("shift-to-1", w, a, bb, cc, cc)
                self.record("shift-to-1", -w, a, bb, cc, bb)
                x -= 1
                y += 1
            self.normalize(w, a, 1, pow(2, y, n))
            return
        g = 1 << max(x, y)
        self._base_shift(w, a, g)

    def _base_shift(self, w: int, a: int, g: int) -> None:
        n = self.n
        a %= n
        if a == 0:
            self.bump_class(g.bit_length() - 1, w)
            return
        if g == 1 and n % 2 == 0 and a % 2 == 1:
            # An odd base cannot be shifted home directly at even n;
            # trade the step for a width-2 step and an even-base unit.
            self.normalize(w, a, 1, 2)
            self._base_shift(-w, a + 1, 1)
            return
        self.record("base-shift", w, a, 1, g, (n - a) % n)
        self.bump_class(g.bit_length() - 1, w)


def bidc_size_bound(weight: int, n: int) -> int:
    """Declared upper bound on the edge count of :func:`bidc_reduce`."""
    logn = max(1, (n - 1).bit_length())
    return 8 * (logn + 3) ** 3 * (weight + 4)


def bidc_reduce(v: SupportVector) -> DecompositionResult:
    """Realize a sum-part lattice vector as a signed edge set.

    The input must be supported on the sum part and satisfy the sum-part
    sublattice conditions; the output boundary equals the input exactly
    and vanishes on the other three parts along the way.
    """
    n = v.n
    if n < 4:
        raise PreconditionError("board-size", "reduction requires n >= 4")
    verdict = check_sublattice_S(v)
    if not verdict:
        raise PreconditionError(verdict.failed)

    red = _BinaryReducer(n)
    weights = v.part_weights(Part.S)

    gens = _sq_step_decompose(n, weights)

    # Opposite-sign steps of the same width class differ by a single Q
    # step; pair them off directly before the binary rewrite.
    buckets: dict[tuple[int, int], tuple[list[int], list[int]]] = {}
    for sigma, a, p, q in gens:
        bc = tuple(sorted(((p - a) % n, (q - a) % n)))
        pos, neg = buckets.setdefault(bc, ([], []))
        (pos if sigma > 0 else neg).append(a % n)
    leftovers: list[tuple[int, int, int, int]] = []
    for (b, c), (pos, neg) in sorted(buckets.items()):
        if n % 2 == 0 and (b + c) % 2 == 0:
            groups = [
                ([a for a in pos if a % 2 == r], [a for a in neg if a % 2 == r])
                for r in (0, 1)
            ]
        else:
            groups = [(pos, neg)]
        for gp, gn in groups:
            gp.sort()
            gn.sort()
            while gp and gn:
                a_pos, a_neg = gp.pop(), gn.pop()
                red.record("base-shift", 1, a_pos, b, c, (a_neg - a_pos) % n)
            leftovers += [(1, a, b, c) for a in gp] + [(-1, a, b, c) for a in gn]

    n_steps = len(red.steps)
    for sigma, a, b, c in leftovers:
        red.normalize(sigma, a, b, c)
    rewrite_steps = len(red.steps) - n_steps

    # Zero the exact second moment with width-2 Q steps of second moment
    # 2n each, folding the displaced far step back into base classes.
    total2 = sum(w * (1 << (j + 1)) for j, w in red.classes.items())
    if total2 % (2 * n) != 0:
        raise VerificationError("second moment of the class residual is not a 2n multiple")
    k = total2 // (2 * n)
    i2_steps = len(red.steps)
    if k:
        red.record("i2-zeroing", k, 0, 1, 2, (n - 2) % n)
        red.bump_class(1, -k)
        # Fold the displaced step through an explicit binary chain so the
        # class second moment drops by exactly 2n per copy.
        pos = 0
        for p in _split_powers(n, (n - 2) % n):
            red.normalize(-k, pos, 1, p)
            pos += p
    i2_steps = len(red.steps) - i2_steps

    # Binary carries: pairs of a base class fold into the next class.
    cap = (n // 2).bit_length() - 1
    carry_steps = len(red.steps)
    for j in range(cap):
        cj = red.classes.get(j, 0)
        q, r = divmod(cj, 2)
        if q:
            if j == 0 and n % 2 == 0:
                raise VerificationError("even-n parity invariant left a unit-class surplus")
            red.record("binary-carry", q, 0, 1, 1 << j, 1 << j)
            red.bump_class(j, -2 * q)
            red.bump_class(j + 1, q)
        if r and j == 0 and n % 2 == 0:
            raise VerificationError("even-n parity invariant left a unit-class surplus")
    carry_steps = len(red.steps) - carry_steps
    if any(red.classes.values()):
        raise VerificationError("class residual nonzero after carries")

    acc: dict[Edge, int] = {}
    phase_edges: dict[str, int] = {}
    phase_gadgets: dict[str, int] = {}
    for phase, mult, a, b, c, s in red.steps:
        phase_gadgets[phase] = phase_gadgets.get(phase, 0) + abs(mult)
        phase_edges[phase] = phase_edges.get(phase, 0) + 8 * abs(mult)
        for x, y, sign in _q_step_edges(n, a, b, c, s):
            e = edge_of(n, x, y)
            m = acc.get(e, 0) + sign * mult
            if m:
                acc[e] = m
            else:
                acc.pop(e, None)
    phi = SignedEdgeSet(n, acc)
    if shadow(phi) != v:
        raise VerificationError("reduced edge set does not shadow the target")
    if phi.size() > bidc_size_bound(v.size(), n):
        raise VerificationError("reduced edge set exceeds its declared size bound")

    phases = [
        ("sq-decompose", len(gens), 0),
        ("power-of-2", rewrite_steps, 0),
    ]
    for name in ("shift-to-1", "base-shift", "i2-zeroing", "binary-carry"):
        phases.append((name, phase_gadgets.get(name, 0), phase_edges.get(name, 0)))
    return DecompositionResult(v, phi, tuple(phases))


# --- bounded decomposition of general lattice vectors -------------------


def _exact_matching_cover(
    target: SupportVector, node_cap: int = 200_000
) -> list[Edge] | None:
    """A matching whose shadow equals target exactly, if one is found.

    Only applicable to all-ones targets with the same number of units in
    every part; searches by backtracking with a node cap, returning None
    when the target is out of scope, no matching exists, or the cap is
    hit.
    """
    n = target.n
    if not target.entries or any(w != 1 for w in target.entries.values()):
        return None
    units = {p: sorted(target.part_weights(p)) for p in PART_ORDER}
    k = len(units[Part.X])
    if any(len(units[p]) != k for p in PART_ORDER):
        return None
    rows = units[Part.X]
    cols, ss, ds = (set(units[p]) for p in (Part.Y, Part.S, Part.D))
    nodes = 0
    acc: list[Edge] = []

    def dfs(i: int) -> bool:
        nonlocal nodes
        if i == k:
            return True
        x = rows[i]
        for y in sorted(cols):
            nodes += 1
            if nodes > node_cap:
                return False
            s, d = (x + y) % n, (x - y) % n
            if y not in cols or s not in ss or d not in ds:
                continue
            cols.remove(y)
            ss.remove(s)
            ds.remove(d)
            acc.append(Edge(x, y))
            if dfs(i + 1):
                return True
            acc.pop()
            cols.add(y)
            ss.add(s)
            ds.add(d)
            if nodes > node_cap:
                return False
        return False

    return acc if dfs(0) else None


def decompose_bounded(target: SupportVector) -> DecompositionResult:
    """Realize an arbitrary lattice vector as a signed edge set.

    A target that is exactly a matching shadow is reconstructed as that
    matching.  Otherwise: cover every weighted vertex by edges,
    eliminate the row and column parts by pairing units, lift the
    difference part away through signed simple matrices, then reduce the
    remaining sum-part vector.
    """
    n = target.n
    verdict = check_lattice_queens(target)
    if not verdict:
        raise PreconditionError(verdict.failed)

    exact = _exact_matching_cover(target)
    if exact is not None:
        phi = SignedEdgeSet(n, {e: 1 for e in exact})
        if shadow(phi) != target:
            raise VerificationError("matching reconstruction does not shadow the target")
        phases = (
            ("edge-cover", target.size(), len(exact)),
            ("xy-elimination", 0, 0),
            ("d-reduction", 0, 0),
            ("bidc", 0, 0),
        )
        return DecompositionResult(target, phi, phases)

    acc: dict[Edge, int] = {}

    def add_edge(x: int, y: int, m: int) -> None:
        if m == 0:
            return
        e = edge_of(n, x % n, y % n)
        nv = acc.get(e, 0) + m
        if nv:
            acc[e] = nv
        else:
            acc.pop(e, None)

    def residual() -> SupportVector:
        return target - shadow(SignedEdgeSet(n, acc))

    # Phase: edge cover.  Pair row units with column units, preferring
    # edges that also cover same-sign diagonal units; a matching shadow
    # is reconstructed exactly by this pass.
    cover_edges = 0
    for sign in (1, -1):
        while True:
            r = residual()
            rx = {k: v for k, v in r.part_weights(Part.X).items() if v * sign > 0}
            ry = {k: v for k, v in r.part_weights(Part.Y).items() if v * sign > 0}
            if not rx or not ry:
                break
            rs = r.part_weights(Part.S)
            rd = r.part_weights(Part.D)
            x = min(rx)
            best = None
            for y in sorted(ry):
                bonus = (rs.get((x + y) % n, 0) * sign > 0) + (
                    rd.get((x - y) % n, 0) * sign > 0
                )
                if best is None or bonus > best[0]:
                    best = (bonus, y)
                    if bonus == 2:
                        break
            add_edge(x, best[1], sign)
            cover_edges += 1

    # Phase: row/column elimination of the leftover same-part ± pairs.
    r = residual()
    px, nx, py, ny = [], [], [], []
    for coord, w in sorted(r.part_weights(Part.X).items()):
        (px if w > 0 else nx).extend([coord] * abs(w))
    for coord, w in sorted(r.part_weights(Part.Y).items()):
        (py if w > 0 else ny).extend([coord] * abs(w))
    xy_edges = 0
    while px and nx:
        add_edge(px.pop(), 0, 1)
        add_edge(nx.pop(), 0, -1)
        xy_edges += 2
    while py and ny:
        add_edge(0, py.pop(), 1)
        add_edge(0, ny.pop(), -1)
        xy_edges += 2
    if px or nx or py or ny:
        raise VerificationError("row/column elimination left unpaired units")

    # Phase: lift the difference part into the sum part with signed
    # simple matrices (each has zero row/column boundary).
    r = residual()
    dpart = r.part_weights(Part.D)
    d_gens = _sq_step_decompose(n, dpart)
    for sigma, a0, p, q in d_gens:
        beta = (p - a0) % n
        gamma = (q - a0) % n
        m = (-a0 - beta) % n
        # Simple matrix on rows {0, gamma}, columns {m, m + beta}: its
        # difference-part boundary is -SQ(a0, beta, gamma) and its sum
        # part lands at base m.
        for x, y, sign in (
            (0, m, 1),
            (gamma, (m + beta) % n, 1),
            (0, (m + beta) % n, -1),
            (gamma, m, -1),
        ):
            add_edge(x, y, -sigma * sign)

    # Phase: sum-part reduction.
    r = residual()
    if any(v.part is not Part.S for v in r.support()):
        raise VerificationError("difference lift left residue off the sum part")
    sub = bidc_reduce(r)
    for e, m in sub.phi.entries.items():
        add_edge(e.x, e.y, m)

    phi = SignedEdgeSet(n, acc)
    if shadow(phi) != target:
        raise VerificationError("decomposition does not shadow the target")
    phases = (
        ("edge-cover", target.size(), cover_edges),
        ("xy-elimination", xy_edges, xy_edges),
        ("d-reduction", len(d_gens), 4 * len(d_gens)),
        ("bidc", sum(g for _, g, _ in sub.phases), sub.phi.size()),
    )
    return DecompositionResult(target, phi, phases)


# --- support push-down --------------------------------------------------


def push_down(u: SupportVector, t: int) -> SignedEdgeSet:
    """Halve the support radius of a lattice vector.

    Returns ``phi`` with ``u + shadow(phi)`` supported inside the square
    interval of radius ``t // 2``; all edges stay inside radius ``t``,
    ``|phi| <= 3|u|`` and ``|u + shadow(phi)| <= 6|u|``.
    """
    n = u.n
    if t % 2 != 0 or t < 2:
        raise PreconditionError("radius-even", "push-down radius must be even and >= 2")
    if t > n // 2:
        raise PreconditionError("radius-range", f"radius {t} exceeds n//2 = {n // 2}")
    box_t = square(t)
    for v in u.support():
        if not box_t.contains(n, v):
            raise PreconditionError("support-interval", f"vertex {v} outside radius {t}")

    half = t // 2
    acc: dict[Edge, int] = {}

    def add(cx: int, cy: int, m: int) -> None:
        e = edge_at_centered(n, cx, cy)
        nv = acc.get(e, 0) + m
        if nv:
            acc[e] = nv
        else:
            acc.pop(e, None)

    for v, w in sorted(u.entries.items()):
        c = centered(n, v.coord)
        if abs(c) <= half:
            continue
        i = c % 2
        a = (c + i) // 2
        if v.part is Part.S:
            add(a, a - i, -w)
        elif v.part is Part.D:
            add(a, i - a, -w)
        elif v.part is Part.X:
            add(c, 0, -w)
            add(a, a - i, w)
            add(a, i - a, w)
        else:
            add(0, c, -w)
            add(a, a - i, w)
            add(i - a, a, w)

    phi = SignedEdgeSet(n, acc)
    for e in phi.entries:
        if not box_t.contains_edge(n, e):
            raise VerificationError(f"push-down edge {e} escapes radius {t}")
    pushed = u + shadow(phi)
    box_half = square(half)
    for v in pushed.support():
        if not box_half.contains(n, v):
            raise VerificationError(f"push-down left {v} outside radius {half}")
    if phi.size() > 3 * u.size():
        raise VerificationError("push-down edge count exceeds 3|u|")
    if pushed.size() > 6 * u.size():
        raise VerificationError("push-down residual exceeds 6|u|")
    return phi


# --- zero-summing of diagonal support -----------------------------------


def _balance_counts(u: SupportVector) -> tuple[int, int]:
    """(odd, even) centered-parity sums of the S part minus the D part."""
    n = u.n
    odd = even = 0
    for v, w in u.entries.items():
        if v.part not in (Part.S, Part.D):
            continue
        sign = 1 if v.part is Part.S else -1
        if centered(n, v.coord) % 2:
            odd += sign * w
        else:
            even += sign * w
    return odd, even


def zero_sum_support(u: SupportVector, avoid_wrap: bool = True) -> SignedEdgeSet:
    """Clear the diagonal parts of a vector by pairing units with edges.

    Returns ``phi`` with ``u + shadow(phi)`` supported on rows and
    columns only.  With ``avoid_wrap`` every added edge has both
    centered diagonal coordinates equal to the unit it cancels (possible
    exactly when the centered-parity balance between the two diagonal
    parts holds); without it, odd boards may pair across parity classes.
    """
    n = u.n
    odd, even = _balance_counts(u)
    balanced = odd == 0 and even == 0
    if not balanced and (avoid_wrap or n % 2 == 0):
        raise PreconditionError(
            "parity-balance",
            "diagonal parity classes are unbalanced between the sum and difference parts",
        )

    acc: dict[Edge, int] = {}

    def add(cx: int, cy: int, m: int) -> None:
        e = edge_at_centered(n, cx, cy)
        nv = acc.get(e, 0) + m
        if nv:
            acc[e] = nv
        else:
            acc.pop(e, None)

    def pair_lists(sp: list[int], sm: list[int], dp: list[int], dm: list[int], p: int) -> None:
        while sp and dp:
            s_c, d_c = sp.pop(), dp.pop()
            add((s_c + d_c) // 2, (s_c - d_c) // 2, -1)
        while sm and dm:
            s_c, d_c = sm.pop(), dm.pop()
            add((s_c + d_c) // 2, (s_c - d_c) // 2, 1)
        while sp and sm:
            s_pos, s_neg = sp.pop(), sm.pop()
            add((s_pos + p) // 2, (s_pos - p) // 2, -1)
            add((s_neg + p) // 2, (s_neg - p) // 2, 1)
        while dp and dm:
            d_pos, d_neg = dp.pop(), dm.pop()
            add((p + d_pos) // 2, (p - d_pos) // 2, -1)
            add((p + d_neg) // 2, (p - d_neg) // 2, 1)
        if sp or sm or dp or dm:
            raise VerificationError("zero-summing left unpaired diagonal units")

    if balanced:
        for p in (0, 1):
            sp: list[int] = []
            sm: list[int] = []
            dp: list[int] = []
            dm: list[int] = []
            for v, w in sorted(u.entries.items()):
                if v.part not in (Part.S, Part.D):
                    continue
                c = centered(n, v.coord)
                if c % 2 != p:
                    continue
                target = (sp if w > 0 else sm) if v.part is Part.S else (dp if w > 0 else dm)
                target.extend([c] * abs(w))
            pair_lists(sp, sm, dp, dm, p)
    else:
        # Odd board, wrap permitted: pair freely using the residue
        # halving map (2 is invertible).
        inv2 = (n + 1) // 2
        sp, sm, dp, dm = [], [], [], []
        for v, w in sorted(u.entries.items()):
            if v.part not in (Part.S, Part.D):
                continue
            target = (sp if w > 0 else sm) if v.part is Part.S else (dp if w > 0 else dm)
            target.extend([v.coord] * abs(w))

        def addr(s_c: int, d_c: int, m: int) -> None:
            x = ((s_c + d_c) * inv2) % n
            y = ((s_c - d_c) * inv2) % n
            e = edge_of(n, x, y)
            nv = acc.get(e, 0) + m
            if nv:
                acc[e] = nv
            else:
                acc.pop(e, None)

        while sp and dp:
            addr(sp.pop(), dp.pop(), -1)
        while sm and dm:
            addr(sm.pop(), dm.pop(), 1)
        while sp and sm:
            addr(sp.pop(), 0, -1)
            addr(sm.pop(), 0, 1)
        while dp and dm:
            addr(0, dp.pop(), -1)
            addr(0, dm.pop(), 1)
        if sp or sm or dp or dm:
            raise VerificationError("zero-summing left unpaired diagonal units")

    phi = SignedEdgeSet(n, acc)
    cleared = u + shadow(phi)
    if any(v.part in (Part.S, Part.D) for v in cleared.support()):
        raise VerificationError("zero-summing left diagonal residue")
    return phi


# --- covering a qualifying leave ----------------------------------------


def cover_leave(leave: SupportVector, radius: int) -> DecompositionResult:
    """Realize a qualifying 0/1 leave set as a signed edge set.

    Conditions: (1) weights in {0, 1}; (2) support inside the square
    interval of the given radius; (3) lattice membership; (4) balanced
    centered-parity counts between the two diagonal parts.
    """
    n = leave.n
    if any(w != 1 for w in leave.entries.values()):
        raise PreconditionError("qualifying-leave condition 1", "weights must be 0/1")
    box_r = square(radius) if radius >= 0 else None
    if radius < 0 or any(not box_r.contains(n, v) for v in leave.support()):
        raise PreconditionError(
            "qualifying-leave condition 2", f"support outside radius {radius}"
        )
    verdict = check_lattice_queens(leave)
    if not verdict:
        raise PreconditionError("qualifying-leave condition 3", verdict.failed)
    odd, even = _balance_counts(leave)
    if odd != 0 or even != 0:
        raise PreconditionError(
            "qualifying-leave condition 4", "diagonal parity classes unbalanced"
        )

    t = 2
    while t < max(radius, 2):
        t *= 2
    if t > n // 2:
        raise PreconditionError("radius-range", f"radius {radius} too large for n={n}")

    steps: dict[Edge, int] = {}
    phases: list[tuple[str, int, int]] = []

    def absorb(phi_step: SignedEdgeSet) -> None:
        for e, m in phi_step.entries.items():
            nv = steps.get(e, 0) + m
            if nv:
                steps[e] = nv
            else:
                steps.pop(e, None)

    r = leave
    while t >= 2:
        phi_step = push_down(r, t)
        absorb(phi_step)
        r = r + shadow(phi_step)
        phases.append(("push-down", 1, phi_step.size()))
        t //= 2

    phi_step = zero_sum_support(r, avoid_wrap=True)
    absorb(phi_step)
    r = r + shadow(phi_step)
    phases.append(("zero-sum", 1, phi_step.size()))

    # Finisher: the surviving row pattern is forced to (h, -2h, h) on
    # centered coordinates (-1, 0, 1); one gadget per unit clears it and
    # the column pattern must then vanish identically.
    rx = {centered(n, coord): w for coord, w in r.part_weights(Part.X).items()}
    ry = {centered(n, coord): w for coord, w in r.part_weights(Part.Y).items()}
    if any(abs(c) > 1 for c in list(rx) + list(ry)):
        raise VerificationError("finisher saw support outside the unit square")
    h = rx.get(1, 0)
    if rx.get(-1, 0) != h or rx.get(0, 0) != -2 * h:
        raise VerificationError("finisher row pattern is not (h, -2h, h)")
    m = -h
    gadget = [((0, -1), -1), ((0, 1), -1), ((-1, 0), 1), ((1, 0), 1)]
    if m:
        acc_g: dict[Edge, int] = {}
        for (cx, cy), sign in gadget:
            e = edge_at_centered(n, cx, cy)
            acc_g[e] = acc_g.get(e, 0) + sign * m
        phi_step = SignedEdgeSet(n, acc_g)
        absorb(phi_step)
        r = r + shadow(phi_step)
    phases.append(("finish-gadget", abs(m), 4 * abs(m)))
    if not r.is_zero():
        raise VerificationError("leave cover left a nonzero residual")

    phi = -SignedEdgeSet(n, steps)
    if shadow(phi) != leave:
        raise VerificationError("leave cover does not shadow the leave")
    return DecompositionResult(leave, phi, tuple(phases))


# --- rewriting an edge set into a matching pair -------------------------


_TMATCH_PART_ORDER = {Part.D: 0, Part.S: 1, Part.Y: 2, Part.X: 3}


def _spiral(n: int) -> Iterator[int]:
    """Residues in order of increasing absolute centered value."""
    yield 0
    for k in range(1, n // 2 + 1):
        yield k % n
        if (n - k) % n != k % n:
            yield (n - k) % n


def to_matching_pair(
    phi: SignedEdgeSet, region: Interval
) -> tuple[Matching, Matching]:
    """Rewrite a signed edge set with a 0/±1 shadow into two matchings.

    Replaces opposite-sign edge pairs through over-covered vertices by
    zero-sum configurations whose fresh vertices lie inside ``region``
    and are currently uncovered; terminates because each replacement
    strictly reduces the same-sign over-coverage.
    """
    n = phi.n
    sh = shadow(phi)
    if any(abs(w) > 1 for w in sh.entries.values()):
        raise PreconditionError("shadow-weights", "shadow weights must lie in {-1, 0, 1}")

    work = dict(phi.entries)
    steps = 0
    max_steps = 100 + 8 * phi.size()
    max_edges = 64 + 4 * phi.size()
    scan_budget = 200_000  # candidate configurations across the whole call

    def covers() -> tuple[dict[Vertex, int], dict[Vertex, int]]:
        pos: dict[Vertex, int] = {}
        neg: dict[Vertex, int] = {}
        for e, m in work.items():
            for v in e.vertices(n):
                if m > 0:
                    pos[v] = pos.get(v, 0) + m
                else:
                    neg[v] = neg.get(v, 0) - m
        return pos, neg

    def apply(delta: SignedEdgeSet) -> None:
        for e, m in delta.entries.items():
            nv = work.get(e, 0) + m
            if nv:
                work[e] = nv
            else:
                work.pop(e, None)

    while True:
        pos, neg = covers()
        conflicts = sorted(
            (v for v in set(pos) | set(neg) if pos.get(v, 0) >= 2 or neg.get(v, 0) >= 2),
            key=lambda v: (_TMATCH_PART_ORDER[v.part], v.coord),
        )
        if not conflicts:
            break
        steps += 1
        if steps > max_steps or len(work) > max_edges:
            raise CapacityError(
                "rewriting did not converge within its step budget",
                blocking=conflicts[0],
            )
        covered = set(pos) | set(neg)

        # Prefer a configuration whose fresh vertices are all uncovered;
        # fall back on the fewest-collision one (a collision may create a
        # new conflict, so the global step cap above bounds the retries).
        chosen = None
        fallback: tuple[int, ZeroSumConfig] | None = None
        for v in conflicts:
            epos = sorted(e for e, m in work.items() if m > 0 and v in e.vertices(n))
            eneg = sorted(e for e, m in work.items() if m < 0 and v in e.vertices(n))
            if not epos or not eneg:
                raise VerificationError(
                    f"over-covered vertex {v} lacks an opposite-sign edge"
                )
            for e_plus in epos:
                for e_minus in eneg:
                    keep = set(e_plus.vertices(n)) | set(e_minus.vertices(n))
                    for q in _spiral(n):
                        scan_budget -= 1
                        if scan_budget < 0:
                            raise CapacityError(
                                "rewriting did not converge within its step budget",
                                blocking=v,
                            )
                        z = _link_config(n, v.part, v.coord, e_minus, e_plus, q)
                        if not z.valid:
                            continue
                        zset = z.edge_set()
                        if zset.mult(e_minus) != 1 or zset.mult(e_plus) != -1:
                            continue
                        fresh = z.vertices() - keep
                        if len(fresh) != 9:
                            continue
                        if any(not region.contains(n, f) for f in fresh):
                            continue
                        collisions = sum(f in covered for f in fresh)
                        if collisions == 0:
                            chosen = z
                            break
                        if fallback is None or collisions < fallback[0]:
                            fallback = (collisions, z)
                    if chosen is not None:
                        break
                if chosen is not None:
                    break
            if chosen is not None:
                break
        if chosen is None:
            if fallback is None:
                raise CapacityError(
                    "no admissible replacement configuration at any over-covered vertex",
                    blocking=conflicts[0],
                )
            chosen = fallback[1]
        apply(chosen.edge_set())

    if any(abs(m) > 1 for m in work.values()):
        raise VerificationError("rewriting finished with a multi-edge")
    final = SignedEdgeSet(n, work)
    if shadow(final) != sh:
        raise VerificationError("rewriting changed the shadow")
    g = TorusGraph(n)
    m1 = Matching.of(final.positive_part())
    m2 = Matching.of(final.negative_part())
    for m in (m1, m2):
        report = verify_matching(g, m)
        if not report.valid:
            raise VerificationError(
                f"rewriting produced a non-matching at {report.offending_vertex}"
            )
    return m1, m2


# --- cascades -----------------------------------------------------------


@dataclass(frozen=True)
class Cascade:
    """A seed edge, four target edges, and five zero-sum configurations
    whose signed union links them through two 16-edge matchings."""

    n: int
    seed: Edge
    targets: tuple[Edge, Edge, Edge, Edge]
    primary: ZeroSumConfig
    links: tuple[ZeroSumConfig, ZeroSumConfig, ZeroSumConfig, ZeroSumConfig]
    m1: Matching
    m2: Matching

    def vertices(self) -> set[Vertex]:
        out: set[Vertex] = set()
        for e in self.m1:
            out.update(e.vertices(self.n))
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "seed": {"x": self.seed.x, "y": self.seed.y},
            "targets": [{"x": e.x, "y": e.y} for e in self.targets],
            "primary": self.primary.to_json(),
            "links": [z.to_json() for z in self.links],
            "m1": [{"x": e.x, "y": e.y} for e in self.m1],
            "m2": [{"x": e.x, "y": e.y} for e in self.m2],
        }


def _link_config(
    n: int, part: Part, shared_coord: int, e_pos_role: Edge, e_neg_role: Edge, q: int
) -> ZeroSumConfig:
    """The configuration holding ``e_pos_role`` in its positive matching
    and ``e_neg_role`` in its negative one, joined at the shared vertex;
    ``q`` is the free parameter."""
    if part is Part.X:
        return make_config(n, shared_coord, (e_pos_role.y - q) % n, (e_neg_role.y - q) % n, q)
    if part is Part.Y:
        return make_config(n, q, e_neg_role.x, e_pos_role.x, (shared_coord - q) % n)
    if part is Part.S:
        a_q = e_pos_role.x
        return make_config(n, a_q, e_neg_role.x, q, (e_neg_role.y - a_q) % n)
    a_q = e_pos_role.x
    b_q = (e_pos_role.y - q) % n
    return make_config(n, a_q, b_q, e_neg_role.x, q)


def build_cascade(
    g: TorusGraph,
    e: Edge,
    targets: Sequence[Edge],
    avoid: Iterable[Vertex] = (),
) -> Cascade:
    """Link a seed edge to four 1-intersecting target edges.

    Each target must share with the seed exactly the seed's vertex in one
    part (in part order X, Y, S, D) and nothing else; the sixteen seed
    vertices must be distinct and all fresh vertices avoid ``avoid``.
    """
    n = g.n
    if len(targets) != 4:
        raise PreconditionError("cascade-targets", "exactly four target edges required")
    seed_vs = e.vertices(n)
    seed_all: set[Vertex] = set(seed_vs)
    for i, (t_edge, v_shared) in enumerate(zip(targets, seed_vs)):
        tvs = set(t_edge.vertices(n))
        if v_shared not in tvs:
            raise PreconditionError(
                "cascade-intersection", f"target {i} misses the seed's {v_shared.part.value} vertex"
            )
        if len(tvs & set(seed_vs)) != 1:
            raise PreconditionError(
                "cascade-intersection", f"target {i} meets the seed in more than one vertex"
            )
        overlap = tvs & seed_all
        if overlap - {v_shared}:
            raise PreconditionError("cascade-overlap", f"target {i} reuses earlier vertices")
        seed_all |= tvs
    if len(seed_all) != 16:
        raise PreconditionError("cascade-overlap", "seed vertices are not sixteen distinct")
    used = set(seed_all) | set(avoid)

    # Primary configuration: contains the seed edge positively, avoids
    # every other used vertex; two free parameters.
    primary = None
    for s in _spiral(n):
        for c in _spiral(n):
            z = make_config(n, e.x, (e.y - s) % n, c, s)
            if not z.valid:
                continue
            fresh = z.vertices() - set(seed_vs)
            if len(fresh) != 12 or any(f in used for f in fresh):
                continue
            primary = z
            break
        if primary is not None:
            break
    if primary is None:
        raise CapacityError("no admissible primary configuration for the cascade seed")
    used |= primary.vertices()

    a, b, c, s, d = primary.a, primary.b, primary.c, primary.s, primary.d
    spokes = (
        edge_of(n, a, (c + s) % n),
        edge_of(n, d, (b + s) % n),
        edge_of(n, b, (a + s) % n),
        edge_of(n, c, (d + s) % n),
    )

    links: list[ZeroSumConfig] = []
    parts = (Part.X, Part.Y, Part.S, Part.D)
    for i, (spoke, t_edge, part, v_shared) in enumerate(zip(spokes, targets, parts, seed_vs)):
        pick = None
        allowed = set(spoke.vertices(n)) | set(t_edge.vertices(n))
        for q in _spiral(n):
            z = _link_config(n, part, v_shared.coord, spoke, t_edge, q)
            if not z.valid:
                continue
            zset = z.edge_set()
            if zset.mult(spoke) != 1 or zset.mult(t_edge) != -1:
                continue
            fresh = z.vertices() - allowed
            if len(fresh) != 9 or any(f in used for f in fresh):
                continue
            pick = z
            break
        if pick is None:
            raise CapacityError(
                f"no admissible link configuration at target {i}", blocking=t_edge
            )
        used |= pick.vertices()
        links.append(pick)

    acc: dict[Edge, int] = {}
    for z in [primary, *links]:
        for edge, m in z.edge_set().entries.items():
            nv = acc.get(edge, 0) + m
            if nv:
                acc[edge] = nv
            else:
                acc.pop(edge, None)
    total = SignedEdgeSet(n, acc)
    m1 = Matching.of(total.positive_part())
    m2 = Matching.of(total.negative_part())
    if len(m1) != 16 or len(m2) != 16:
        raise VerificationError("cascade matchings are not sixteen edges each")
    if total.mult(e) != 1 or any(total.mult(t) != -1 for t in targets):
        raise VerificationError("cascade lost its seed or target edges")
    vs1: set[Vertex] = set()
    vs2: set[Vertex] = set()
    for edge in m1:
        vs1.update(edge.vertices(n))
    for edge in m2:
        vs2.update(edge.vertices(n))
    if vs1 != vs2 or len(vs1) != 64:
        raise VerificationError("cascade matchings do not cover the same 64 vertices")
    for m in (m1, m2):
        report = verify_matching(TorusGraph(n), m)
        if not report.valid:
            raise VerificationError("cascade produced overlapping edges")
    return Cascade(n, e, tuple(targets), primary, tuple(links), m1, m2)

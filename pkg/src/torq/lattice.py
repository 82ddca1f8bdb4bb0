"""Integer vectors on the vertex set, edge shadows, generator families,
and exact lattice-membership tests.

The edge lattice L of a board is the integer span of the shadows of its
edges.  Membership is characterised by part-sum equalities together with
weighted congruences in i and i^2; for even n an additional exact parity
identity is required (the sum of weights on odd S-coordinates must equal
the sum on odd D-coordinates — every even-n edge has S and D coordinates
of equal parity, so this quantity is invariant and zero on the lattice).
An independent Hermite-style integer elimination oracle cross-checks the
congruence tests at small n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .board import Edge, Part, PART_ORDER, Vertex

QUEENS_PARTS = PART_ORDER
SEMI_PARTS = (Part.X, Part.Y, Part.S)


@dataclass(frozen=True)
class SupportVector:
    """Integer weights on the vertices of a board of side n.

    kind is "queens" (4 parts) or "semi" (3 parts, no D).
    Zero weights are never stored.
    """

    n: int
    entries: Mapping[Vertex, int] = field(default_factory=dict)
    kind: str = "queens"

    def __post_init__(self) -> None:
        parts = SEMI_PARTS if self.kind == "semi" else QUEENS_PARTS
        clean = {}
        for v, w in self.entries.items():
            if w == 0:
                continue
            if v.part not in parts or not (0 <= v.coord < self.n):
                raise ValueError(f"vertex {v} invalid for n={self.n} kind={self.kind}")
            clean[v] = int(w)
        object.__setattr__(self, "entries", clean)

    def weight(self, v: Vertex) -> int:
        return self.entries.get(v, 0)

    def size(self) -> int:
        return sum(abs(w) for w in self.entries.values())

    def support(self) -> list[Vertex]:
        return sorted(self.entries)

    def part_weights(self, part: Part) -> dict[int, int]:
        return {v.coord: w for v, w in self.entries.items() if v.part is part}

    def part_sum(self, part: Part) -> int:
        return sum(w for v, w in self.entries.items() if v.part is part)

    def moment(self, part: Part, power: int) -> int:
        return sum(v.coord**power * w for v, w in self.entries.items() if v.part is part)

    def odd_sum(self, part: Part) -> int:
        return sum(w for v, w in self.entries.items() if v.part is part and v.coord % 2 == 1)

    def __add__(self, other: "SupportVector") -> "SupportVector":
        if (self.n, self.kind) != (other.n, other.kind):
            raise ValueError("mismatched vectors")
        merged = dict(self.entries)
        for v, w in other.entries.items():
            merged[v] = merged.get(v, 0) + w
        return SupportVector(self.n, merged, self.kind)

    def __sub__(self, other: "SupportVector") -> "SupportVector":
        return self + (-other)

    def __neg__(self) -> "SupportVector":
        return SupportVector(self.n, {v: -w for v, w in self.entries.items()}, self.kind)

    def scaled(self, k: int) -> "SupportVector":
        return SupportVector(self.n, {v: k * w for v, w in self.entries.items()}, self.kind)

    def is_zero(self) -> bool:
        return not self.entries

    def restricted(self, part: Part) -> "SupportVector":
        return SupportVector(
            self.n, {v: w for v, w in self.entries.items() if v.part is part}, self.kind
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "kind": self.kind,
            "entries": [
                {"part": v.part.value, "coord": v.coord, "weight": w}
                for v, w in sorted(self.entries.items())
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "SupportVector":
        n = int(obj["n"])
        if n < 1:
            raise ValueError("n: must be a positive integer")
        kind = obj.get("kind", "queens")
        if kind not in ("queens", "semi"):
            raise ValueError("kind: must be 'queens' or 'semi'")
        entries: dict[Vertex, int] = {}
        for i, ent in enumerate(obj["entries"]):
            v = Vertex(Part(ent["part"]), int(ent["coord"]))
            if v in entries:
                raise ValueError(f"entries[{i}]: duplicate vertex")
            entries[v] = int(ent["weight"])
        return SupportVector(n, entries, kind)


def sv(n: int, items: Iterable[tuple[Part, int, int]], kind: str = "queens") -> SupportVector:
    """Build a SupportVector from (part, coord, weight) triples (coords
    reduced mod n, repeated vertices accumulated)."""
    entries: dict[Vertex, int] = {}
    for part, coord, w in items:
        v = Vertex(part, coord % n)
        entries[v] = entries.get(v, 0) + w
    return SupportVector(n, entries, kind)


@dataclass(frozen=True)
class SignedEdgeSet:
    """An integer multiset of edges with signs (multiplicity per edge)."""

    n: int
    entries: Mapping[Edge, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for e, m in self.entries.items():
            if m == 0:
                continue
            if not (0 <= e.x < self.n and 0 <= e.y < self.n):
                raise ValueError(f"edge {e} out of range for n={self.n}")
            clean[e] = int(m)
        object.__setattr__(self, "entries", clean)

    def size(self) -> int:
        return sum(abs(m) for m in self.entries.values())

    def mult(self, e: Edge) -> int:
        return self.entries.get(e, 0)

    def __add__(self, other: "SignedEdgeSet") -> "SignedEdgeSet":
        if self.n != other.n:
            raise ValueError("mismatched edge sets")
        merged = dict(self.entries)
        for e, m in other.entries.items():
            merged[e] = merged.get(e, 0) + m
        return SignedEdgeSet(self.n, merged)

    def __neg__(self) -> "SignedEdgeSet":
        return SignedEdgeSet(self.n, {e: -m for e, m in self.entries.items()})

    def __sub__(self, other: "SignedEdgeSet") -> "SignedEdgeSet":
        return self + (-other)

    def positive_part(self) -> list[Edge]:
        """Each positive edge repeated by multiplicity, sorted."""
        out = []
        for e, m in sorted(self.entries.items()):
            out.extend([e] * max(m, 0))
        return out

    def negative_part(self) -> list[Edge]:
        out = []
        for e, m in sorted(self.entries.items()):
            out.extend([e] * max(-m, 0))
        return out

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [
                {"x": e.x, "y": e.y, "mult": m} for e, m in sorted(self.entries.items())
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "SignedEdgeSet":
        n = int(obj["n"])
        if n < 1:
            raise ValueError("n: must be a positive integer")
        entries: dict[Edge, int] = {}
        for i, ent in enumerate(obj["entries"]):
            e = Edge(int(ent["x"]), int(ent["y"]))
            if e in entries:
                raise ValueError(f"entries[{i}]: duplicate edge")
            entries[e] = int(ent["mult"])
        return SignedEdgeSet(n, entries)


def edge_shadow(n: int, e: Edge, kind: str = "queens") -> SupportVector:
    items = [(Part.X, e.x, 1), (Part.Y, e.y, 1), (Part.S, e.s(n), 1)]
    if kind == "queens":
        items.append((Part.D, e.d(n), 1))
    return sv(n, items, kind)


def shadow(phi: SignedEdgeSet, kind: str = "queens") -> SupportVector:
    """The boundary map: each vertex receives the signed sum of the
    multiplicities of edges containing it."""
    n = phi.n
    entries: dict[Vertex, int] = {}

    def bump(part: Part, coord: int, m: int) -> None:
        v = Vertex(part, coord)
        entries[v] = entries.get(v, 0) + m

    for e, m in phi.entries.items():
        bump(Part.X, e.x, m)
        bump(Part.Y, e.y, m)
        bump(Part.S, e.s(n), m)
        if kind == "queens":
            bump(Part.D, e.d(n), m)
    return SupportVector(n, entries, kind)


# --- membership tests ---------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    ok: bool
    failed: str | None = None  # name of the first violated condition

    def __bool__(self) -> bool:
        return self.ok


def check_lattice_queens(v: SupportVector) -> Verdict:
    """Exact membership of v in the edge lattice of the toroidal queens
    board.

    Odd n: (i) equal part sums; (ii) sum(i*vX)+sum(i*vY) = sum(i*vS) mod n;
    (iii) sum(i*vX)-sum(i*vY) = sum(i*vD) mod n; (iv)
    2*sum(i^2*vX)+2*sum(i^2*vY) = sum(i^2*vS)+sum(i^2*vD) mod n.
    Even n: (a)-(c) as (i)-(iii); (d) the i^2 combination divisible by 2n;
    (e) the odd-coordinate weight sums on S and D agree exactly.
    """
    n = v.n
    sx, sy, ss, sd = (v.part_sum(p) for p in QUEENS_PARTS)
    odd = n % 2 == 1
    if not (sx == sy == ss == sd):
        return Verdict(False, "i" if odd else "a")
    mx, my, ms, md = (v.moment(p, 1) for p in QUEENS_PARTS)
    if (mx + my - ms) % n != 0:
        return Verdict(False, "ii" if odd else "b")
    if (mx - my - md) % n != 0:
        return Verdict(False, "iii" if odd else "c")
    qx, qy, qs, qd = (v.moment(p, 2) for p in QUEENS_PARTS)
    combo = qs + qd - 2 * qx - 2 * qy
    if odd:
        if combo % n != 0:
            return Verdict(False, "iv")
    else:
        if combo % (2 * n) != 0:
            return Verdict(False, "d")
        if v.odd_sum(Part.S) != v.odd_sum(Part.D):
            return Verdict(False, "e")
    return Verdict(True)


def in_lattice_queens(v: SupportVector) -> bool:
    return check_lattice_queens(v).ok


def check_lattice_semiqueens(v: SupportVector) -> Verdict:
    """Membership in the edge lattice of the semi-queens board: equal part
    sums and sum(i*vX)+sum(i*vY) = sum(i*vS) mod n."""
    n = v.n
    sx, sy, ss = (v.part_sum(p) for p in SEMI_PARTS)
    if not (sx == sy == ss):
        return Verdict(False, "part-sums")
    if (v.moment(Part.X, 1) + v.moment(Part.Y, 1) - v.moment(Part.S, 1)) % n != 0:
        return Verdict(False, "i-sum")
    return Verdict(True)


def in_lattice_semiqueens(v: SupportVector) -> bool:
    return check_lattice_semiqueens(v).ok


def check_sublattice_S(v: SupportVector) -> Verdict:
    """Membership in the one-part sublattice: lattice members supported on
    the S part only.

    Odd n: sum v = 0, sum i*v = 0 mod n, sum i^2*v = 0 mod n.  Even n: the
    i^2 condition strengthens to divisibility by 2n and the odd-coordinate
    weight sum must vanish exactly.
    """
    n = v.n
    if any(u.part is not Part.S for u in v.entries):
        return Verdict(False, "support")
    if v.part_sum(Part.S) != 0:
        return Verdict(False, "sum")
    if v.moment(Part.S, 1) % n != 0:
        return Verdict(False, "i-sum")
    q = v.moment(Part.S, 2)
    if n % 2 == 1:
        if q % n != 0:
            return Verdict(False, "i2-sum")
    else:
        if q % (2 * n) != 0:
            return Verdict(False, "i2-sum")
        if v.odd_sum(Part.S) != 0:
            return Verdict(False, "odd-sum")
    return Verdict(True)


def in_sublattice_S(v: SupportVector) -> bool:
    return check_sublattice_S(v).ok


# --- generators ---------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    """One of the four generator families.

    simple-matrix(a, b, c, d): +1 at matrix cells (a,c),(b,d), -1 at
    (a,d),(b,c) — rows a,b and columns c,d of an n x n integer matrix.
    sq-gen(a, b, c): S-weights (1,-1,-1,1) at (a, b, c, b+c-a).
    two-part-gen(a, b, c, s): the sq-gen pattern on S paired with its
    negation on D at (s-a, s-b, s-c, s-(b+c-a)).
    q-gen(a, b, c, s): offsets — (1,-1,-1,1) at (a, a+b, a+c, a+b+c)
    minus the same pattern shifted by s.
    """

    kind: str
    params: tuple[int, ...]
    sign: int = 1

    _ARITY = {"simple-matrix": 4, "sq-gen": 3, "two-part-gen": 4, "q-gen": 4}

    def __post_init__(self) -> None:
        if self.kind not in self._ARITY:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if len(self.params) != self._ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {self._ARITY[self.kind]} parameters")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")


def expand(n: int, g: Generator, kind: str = "queens") -> SupportVector:
    """The definite SupportVector of a generator on a board of side n."""
    t = g.sign
    if g.kind == "sq-gen":
        a, b, c = g.params
        return sv(
            n,
            [(Part.S, a, t), (Part.S, b, -t), (Part.S, c, -t), (Part.S, b + c - a, t)],
            kind,
        )
    if g.kind == "q-gen":
        a, b, c, s = g.params
        items = []
        for coord, w in (
            (a, 1), (a + b, -1), (a + c, -1), (a + b + c, 1),
            (s + a, -1), (s + a + b, 1), (s + a + c, 1), (s + a + b + c, -1),
        ):
            items.append((Part.S, coord, t * w))
        return sv(n, items, kind)
    if g.kind == "two-part-gen":
        a, b, c, s = g.params
        d = b + c - a
        items = [
            (Part.S, a, t), (Part.S, b, -t), (Part.S, c, -t), (Part.S, d, t),
            (Part.D, s - a, -t), (Part.D, s - b, t), (Part.D, s - c, t), (Part.D, s - d, -t),
        ]
        return sv(n, items, kind)
    # simple-matrix
    a, b, c, d = g.params
    items = [
        (Part.S, a + c, t), (Part.S, b + d, t), (Part.S, a + d, -t), (Part.S, b + c, -t),
        (Part.D, a - c, t), (Part.D, b - d, t), (Part.D, a - d, -t), (Part.D, b - c, -t),
    ]
    return sv(n, items, kind)


def simple_matrix_edges(n: int, g: Generator) -> SignedEdgeSet:
    """A simple matrix as a signed edge multiset ((row, col) cells as
    board edges)."""
    if g.kind != "simple-matrix":
        raise ValueError("not a simple matrix")
    a, b, c, d = (p % n for p in g.params)
    t = g.sign
    entries: dict[Edge, int] = {}
    for e, w in (
        (Edge(a, c), t), (Edge(b, d), t), (Edge(a, d), -t), (Edge(b, c), -t),
    ):
        entries[e] = entries.get(e, 0) + w
    return SignedEdgeSet(n, entries)


def simple_matrix_decompose(a_mat: Sequence[Sequence[int]]) -> list[Generator]:
    """Express an integer matrix with zero row and column sums as a sum of
    simple matrices; at most ceil(sum|a_ij| / 2) of them."""
    m = [list(map(int, row)) for row in a_mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    if any(len(r) != cols for r in m):
        raise ValueError("matrix must be rectangular")
    if any(sum(r) != 0 for r in m) or any(
        sum(m[i][j] for i in range(rows)) != 0 for j in range(cols)
    ):
        raise ValueError("matrix must have zero row and column sums")
    out: list[Generator] = []
    while True:
        pivot = next(
            ((i, j) for i in range(rows) for j in range(cols) if m[i][j] > 0), None
        )
        if pivot is None:
            break
        a, c = pivot
        b = next(i for i in range(rows) if m[i][c] < 0)
        d = next(j for j in range(cols) if m[a][j] < 0)
        # Subtract the simple matrix +1@(a,c),(b,d) / -1@(a,d),(b,c).
        m[a][c] -= 1
        m[b][d] -= 1
        m[a][d] += 1
        m[b][c] += 1
        out.append(Generator("simple-matrix", (a, b, c, d), 1))
    return out


# --- independent membership oracle --------------------------------------

HNF_MAX_N = 15


class _EchelonLattice:
    """Integer lattice kept in row-echelon form (Hermite-style pivots).

    Rows are dicts column-index -> value with a leading pivot column;
    insertion eliminates against existing pivots using extended gcd.
    """

    def __init__(self, dim: int) -> None:
        self.dim = dim
        self.rows: dict[int, dict[int, int]] = {}  # pivot column -> row

    @staticmethod
    def _pivot(row: dict[int, int]) -> int | None:
        live = [c for c, x in row.items() if x != 0]
        return min(live) if live else None

    def add(self, vec: dict[int, int]) -> None:
        row = {c: x for c, x in vec.items() if x != 0}
        while True:
            p = self._pivot(row)
            if p is None:
                return
            if p not in self.rows:
                lead = row[p]
                if lead < 0:
                    row = {c: -x for c, x in row.items()}
                self.rows[p] = row
                return
            base = self.rows[p]
            a, b = base[p], row[p]
            if b % a == 0:
                q = b // a
                row = {
                    c: row.get(c, 0) - q * base.get(c, 0)
                    for c in set(row) | set(base)
                }
            else:
                g, u, w = _ext_gcd(a, b)
                new_base = {
                    c: u * base.get(c, 0) + w * row.get(c, 0)
                    for c in set(row) | set(base)
                }
                qa, qb = a // g, b // g
                new_row = {
                    c: qa * row.get(c, 0) - qb * base.get(c, 0)
                    for c in set(row) | set(base)
                }
                self.rows[p] = {c: x for c, x in new_base.items() if x != 0}
                row = new_row

    def contains(self, vec: dict[int, int]) -> bool:
        row = {c: x for c, x in vec.items() if x != 0}
        while True:
            p = self._pivot(row)
            if p is None:
                return True
            if p not in self.rows:
                return False
            base = self.rows[p]
            if row[p] % base[p] != 0:
                return False
            q = row[p] // base[p]
            row = {
                c: row.get(c, 0) - q * base.get(c, 0) for c in set(row) | set(base)
            }


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _vertex_index(n: int, kind: str, v: Vertex) -> int:
    parts = SEMI_PARTS if kind == "semi" else QUEENS_PARTS
    return parts.index(v.part) * n + v.coord


_lattice_cache: dict[tuple[int, str], _EchelonLattice] = {}


def _edge_lattice(n: int, kind: str) -> _EchelonLattice:
    key = (n, kind)
    if key not in _lattice_cache:
        nparts = 3 if kind == "semi" else 4
        lat = _EchelonLattice(nparts * n)
        for x in range(n):
            for y in range(n):
                shade = edge_shadow(n, Edge(x, y), kind)
                lat.add(
                    {_vertex_index(n, kind, v): w for v, w in shade.entries.items()}
                )
        _lattice_cache[key] = lat
    return _lattice_cache[key]


def hnf_oracle(n: int, kind: str, v: SupportVector) -> bool:
    """Membership of v in the integer span of edge shadows, decided by
    exact integer elimination (independent of the congruence tests)."""
    if n > HNF_MAX_N:
        raise ValueError(f"hnf_oracle supports n <= {HNF_MAX_N}")
    if kind not in ("queens", "semi"):
        raise ValueError("kind: must be 'queens' or 'semi'")
    lat = _edge_lattice(n, kind)
    return lat.contains({_vertex_index(n, kind, u): w for u, w in v.entries.items()})

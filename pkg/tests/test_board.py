"""Board model: coordinates, wraps, intervals, graphs, matchings."""

import pytest
from hypothesis import given, strategies as st

from torq.board import (
    BoardKind,
    Edge,
    Matching,
    Part,
    TorusGraph,
    Vertex,
    attacks,
    box,
    centered,
    centered_range,
    edge_at_centered,
    edge_of,
    edges_into,
    edges_through,
    pair_degree,
    parity_census,
    placement_from_json,
    placement_to_json,
    square,
    verify_matching,
    wrap_parity_test,
    wraps,
    WrapKind,
)


class TestCentered:
    def test_odd_range(self):
        assert centered_range(9) == (-4, 4)
        assert [centered(9, c) for c in range(9)] == [0, 1, 2, 3, 4, -4, -3, -2, -1]

    def test_even_range(self):
        assert centered_range(8) == (-3, 4)
        assert [centered(8, c) for c in range(8)] == [0, 1, 2, 3, 4, -3, -2, -1]

    @given(st.integers(2, 40), st.integers(-100, 100))
    def test_centered_is_congruent_and_in_range(self, n, c):
        lo, hi = centered_range(n)
        cc = centered(n, c)
        assert lo <= cc <= hi
        assert (cc - c) % n == 0


class TestEdges:
    def test_vertices(self):
        e = edge_of(7, 2, 6)
        assert e.vertices(7) == (
            Vertex(Part.X, 2),
            Vertex(Part.Y, 6),
            Vertex(Part.S, 1),
            Vertex(Part.D, 3),
        )

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            edge_of(5, 5, 0)

    def test_centered_constructor(self):
        assert edge_at_centered(7, -1, -2) == Edge(6, 5)

    @given(st.integers(3, 30), st.data())
    def test_wrap_parity_against_classification(self, n, data):
        if n % 2 == 0:
            n += 1
        e = Edge(data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, n - 1)))
        single = wraps(n, e) in (WrapKind.SUM, WrapKind.DIFF)
        assert wrap_parity_test(n, e) == single

    def test_wrap_kinds(self):
        n = 9
        assert wraps(n, Edge(0, 0)) is WrapKind.NONE
        assert wraps(n, Edge(4, 4)) is WrapKind.SUM  # centered sum 8 wraps
        assert wraps(n, Edge(4, 5)) is WrapKind.DIFF  # centered diff -5 wraps


class TestIntervals:
    def test_square_bounds_all_parts(self):
        i = square(5)
        assert all(i.bound_for(p) == 5 for p in Part)

    def test_box_caps_rows_and_columns(self):
        i = box(9)
        assert i.bound_for(Part.X) == 6
        assert i.bound_for(Part.S) == 9

    def test_contains_edge(self):
        assert square(2).contains_edge(11, Edge(1, 1))
        assert not square(2).contains_edge(11, Edge(2, 1))  # sum coord 3


class TestTorusGraph:
    def test_full_board_counts(self):
        g = TorusGraph(6)
        assert g.vertex_count() == 24
        assert sum(1 for _ in g.edges()) == 36
        assert all(len(edges_through(g, v)) == 6 for v in g.vertices())

    def test_semi_board(self):
        g = TorusGraph(5, BoardKind.SEMIQUEENS_TOROIDAL)
        assert g.parts() == (Part.X, Part.Y, Part.S)
        assert g.vertex_count() == 15

    def test_classical_diagonal_parts(self):
        g = TorusGraph(4, BoardKind.QUEENS_CLASSICAL)
        assert g.part_size(Part.S) == 7
        assert g.vertex_count() == 2 * 4 + 2 * 7

    def test_removed_vertex_punctures_lines(self):
        g = TorusGraph(7, removed=frozenset({Vertex(Part.S, 3)}))
        assert sum(1 for _ in g.edges()) == 49 - 7
        assert all(e.s(7) != 3 for e in g.edges())

    def test_pair_degree_is_one_on_queens_board(self):
        g = TorusGraph(7)
        assert pair_degree(g, Vertex(Part.X, 1), Vertex(Part.S, 4)) == 1

    def test_edges_into_interval(self):
        g = TorusGraph(13)
        inside = edges_into(g, Vertex(Part.X, 0), square(2))
        assert inside
        assert all(square(2).contains(13, w) for e in inside
                   for w in e.vertices(13) if w.part is not Part.X)


class TestAttacks:
    def test_row_and_column(self):
        assert attacks(8, "classical", (0, 0), (0, 5))
        assert attacks(8, "classical", (2, 3), (6, 3))

    def test_toroidal_wraps_diagonal(self):
        assert not attacks(8, "classical", (0, 7), (1, 0))
        assert attacks(8, "toroidal", (0, 7), (1, 0))

    def test_distinct_required(self):
        with pytest.raises(ValueError):
            attacks(8, "classical", (1, 1), (1, 1))


class TestMatching:
    def test_verify_disjoint(self):
        g = TorusGraph(5)
        m = Matching.of([Edge(0, 0), Edge(1, 2)])
        assert verify_matching(g, m).valid

    def test_verify_rejects_shared_vertex(self):
        g = TorusGraph(5)
        report = verify_matching(g, Matching.of([Edge(0, 0), Edge(1, 4)]))
        assert not report.valid
        assert report.offending_vertex == Vertex(Part.S, 0)

    def test_perfect_solution(self):
        g = TorusGraph(5)
        m = Matching.of([Edge(i, (2 * i) % 5) for i in range(5)])
        report = verify_matching(g, m, require_perfect=True)
        assert report.valid and report.perfect

    def test_parity_census_full_board_balanced(self):
        _, _, _, _, disparity = parity_census(9, TorusGraph(9).vertices())
        assert disparity == 0


class TestPlacementJson:
    def test_round_trip(self):
        obj = placement_to_json(5, "toroidal", [(0, 0), (1, 2)])
        assert placement_from_json(obj) == (5, "toroidal", [(0, 0), (1, 2)])

    def test_rejects_out_of_range_with_field_path(self):
        obj = placement_to_json(5, "toroidal", [(0, 9)])
        with pytest.raises(ValueError, match=r"queens\[0\]"):
            placement_from_json(obj)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError, match="n:"):
            placement_from_json({"n": 0, "mode": "toroidal", "queens": []})

import pytest

from schelling.graph import (EdgeListError, GenerationFailureError, Graph,
                             GraphError, InvalidDimensionError, ParityError,
                             load_edge_list, make_random_regular,
                             make_ring_union, make_toroidal_moore_grid,
                             save_edge_list)


def assert_simple_symmetric(g):
    for u in range(g.n):
        assert u not in g.adj_sets[u]
        assert len(set(g.adj[u])) == len(g.adj[u])
        for v in g.adj[u]:
            assert u in g.adj_sets[v]


class TestMooreTorus:
    def test_3x3_is_k9(self):
        g = make_toroidal_moore_grid(3, 3)
        assert g.n == 9
        assert g.m == 36
        assert all(g.degree(v) == 8 for v in range(9))
        # every pair adjacent
        for u in range(9):
            assert g.adj_sets[u] == frozenset(range(9)) - {u}

    def test_10x10(self):
        g = make_toroidal_moore_grid(10, 10)
        assert g.n == 100
        assert g.m == 400
        assert all(g.degree(v) == 8 for v in range(100))
        assert g.is_connected

    def test_4x3_against_offset_oracle(self):
        rows, cols = 4, 3
        g = make_toroidal_moore_grid(rows, cols)
        # independent enumeration of king-move neighborhoods
        for r in range(rows):
            for c in range(cols):
                expected = set()
                for dr in (-1, 0, 1):
                    for dc in (-1, 0, 1):
                        if (dr, dc) != (0, 0):
                            expected.add(((r + dr) % rows) * cols + (c + dc) % cols)
                assert g.adj_sets[r * cols + c] == expected
        assert all(g.degree(v) == 8 for v in range(g.n))
        assert_simple_symmetric(g)

    def test_edge_count_formula(self):
        for rows, cols in [(3, 4), (5, 5), (6, 3)]:
            g = make_toroidal_moore_grid(rows, cols)
            assert g.m == rows * cols * 4

    @pytest.mark.parametrize("rows,cols", [(2, 5), (5, 2), (1, 1)])
    def test_small_dimensions_rejected(self, rows, cols):
        with pytest.raises(InvalidDimensionError):
            make_toroidal_moore_grid(rows, cols)


class TestRandomRegular:
    def test_two_regular_is_single_cycle(self):
        g = make_random_regular(10, 2, seed=7)
        assert all(g.degree(v) == 2 for v in range(10))
        assert g.is_connected   # a connected 2-regular graph is one cycle

    def test_eight_regular(self):
        g = make_random_regular(100, 8, seed=3)
        assert g.n == 100
        assert g.m == 400
        assert all(g.degree(v) == 8 for v in range(100))
        assert g.is_connected

    def test_adjacency_audit_6_3(self):
        g = make_random_regular(6, 3, seed=11)
        assert all(g.degree(v) == 3 for v in range(6))
        assert_simple_symmetric(g)

    def test_deterministic_under_seed(self):
        a = make_random_regular(40, 8, seed=5)
        b = make_random_regular(40, 8, seed=5)
        assert a == b
        c = make_random_regular(40, 8, seed=6)
        assert a != c   # astronomically unlikely to collide

    def test_parity_error(self):
        with pytest.raises(ParityError):
            make_random_regular(5, 3, seed=0)
        with pytest.raises(ParityError):
            make_random_regular(4, 5, seed=0)

    def test_generation_failure_cap(self):
        # a triangle is the unique connected 2-regular graph on 3 nodes,
        # so this succeeds; a cap of zero attempts must fail cleanly
        with pytest.raises(GenerationFailureError):
            make_random_regular(10, 2, seed=0, max_attempts=0)


class TestRingUnion:
    def test_triangle(self):
        g = make_ring_union([3])
        assert g.n == 3
        assert g.m == 3
        assert g.is_connected

    def test_three_rings(self):
        g = make_ring_union([3, 4, 5])
        assert g.n == 12
        assert g.m == 12
        assert len(g.components()) == 3
        assert not g.is_connected

    def test_component_labeling_4_5(self):
        g = make_ring_union([4, 5])
        assert all(g.degree(v) == 2 for v in range(9))
        comps = g.components()
        assert comps == [[0, 1, 2, 3], [4, 5, 6, 7, 8]]

    def test_small_ring_rejected(self):
        with pytest.raises(InvalidDimensionError):
            make_ring_union([3, 2])


class TestEdgeListIO:
    def test_triangle_text(self):
        g = load_edge_list("3 3\n0 1\n1 2\n0 2\n")
        assert g.n == 3 and g.m == 3

    def test_round_trip_generators(self):
        for g in [make_toroidal_moore_grid(3, 3), make_toroidal_moore_grid(4, 5),
                  make_random_regular(20, 4, seed=1), make_ring_union([3, 4])]:
            text = save_edge_list(g)
            g2 = load_edge_list(text, allow_disconnected=True)
            assert g2 == g

    def test_save_header(self):
        text = save_edge_list(make_toroidal_moore_grid(3, 3))
        lines = text.strip().splitlines()
        assert lines[0] == "9 36"
        assert len(lines) == 37

    def test_self_loop_rejected(self):
        with pytest.raises(EdgeListError):
            load_edge_list("2 1\n0 0\n")

    def test_duplicate_edge_rejected(self):
        with pytest.raises(EdgeListError):
            load_edge_list("3 3\n0 1\n0 1\n1 2\n")

    def test_out_of_range_rejected(self):
        with pytest.raises(EdgeListError):
            load_edge_list("3 2\n0 1\n1 3\n")

    def test_unsorted_pair_rejected(self):
        with pytest.raises(EdgeListError):
            load_edge_list("3 2\n1 0\n1 2\n")

    def test_bad_header(self):
        with pytest.raises(EdgeListError):
            load_edge_list("3\n")
        with pytest.raises(EdgeListError):
            load_edge_list("")

    def test_edge_count_mismatch(self):
        with pytest.raises(EdgeListError):
            load_edge_list("3 3\n0 1\n1 2\n")

    def test_disconnected_requires_flag(self):
        text = save_edge_list(make_ring_union([3, 3]))
        with pytest.raises(EdgeListError):
            load_edge_list(text)
        g = load_edge_list(text, allow_disconnected=True)
        assert len(g.components()) == 2


def test_graph_rejects_disconnected_by_default():
    with pytest.raises(GraphError):
        Graph(4, [(0, 1), (2, 3)])

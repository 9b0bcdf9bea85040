import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levelhom import (
    CapacityExceeded,
    FilteredComplex,
    ParseError,
    PersistenceDiagram,
    SimplicialComplex,
    betti,
    build_filtered_rips,
    emit_tsv,
    parse_tsv,
    reduce,
    rips_persistence,
)
from levelhom.complexes import vertex_level_index

INF = math.inf


def triangle_filtration():
    c = SimplicialComplex.from_simplices([(0, 1, 2)])
    return FilteredComplex(c, [np.array([0, 0, 0]), np.array([1, 1, 1]), np.array([2])], [2.0, 1.0, 0.0])


def random_filtration(seed, n=14, n_levels=5, r=0.22, k_max=3):
    g = np.random.default_rng(seed)
    pts = g.uniform(size=(n, 2))
    values = g.uniform(size=n)
    levels = np.linspace(1.0, 0.0, n_levels)
    return pts, values, levels, r, k_max


class TestDiagram:
    """Diagram container."""

    def test_birth_must_exceed_death(self):
        with pytest.raises(ValueError):
            PersistenceDiagram(0, [(1.0, 2.0)])

    def test_only_negative_infinity(self):
        with pytest.raises(ValueError):
            PersistenceDiagram(0, [(1.0, INF)])

    def test_canonical_order(self):
        dg = PersistenceDiagram(0, [(1.0, 0.0), (2.0, -INF), (2.0, 1.0)])
        assert dg.pairs.tolist() == [[2.0, 1.0], [2.0, -INF], [1.0, 0.0]]

    def test_persistence_with_floor(self):
        dg = PersistenceDiagram(0, [(2.0, -INF), (1.5, 1.0)])
        assert dg.persistence().tolist() == [INF, 0.5]
        assert dg.persistence(floor=0.0).tolist() == [2.0, 0.5]

    def test_alive(self):
        dg = PersistenceDiagram(1, [(3.0, 1.0), (3.0, 2.5), (2.0, -INF)])
        assert dg.alive(2.0, 2.0) == 2
        assert dg.alive(3.0, 2.0) == 1


class TestReduce:
    """Explicit column reduction."""

    def test_triangle_example(self):
        h0, h1, h2 = reduce(triangle_filtration())
        assert h0.pairs.tolist() == [[2.0, 1.0], [2.0, 1.0], [2.0, -INF]]
        assert h1.pairs.tolist() == [[1.0, 0.0]]
        assert len(h2) == 0

    def test_single_vertex(self):
        fc = FilteredComplex(SimplicialComplex.from_simplices([(0,)]), [np.array([0])], [1.0])
        (h0,) = reduce(fc)
        assert h0.pairs.tolist() == [[1.0, -INF]]

    def test_zero_length_pair_dropped(self):
        c = SimplicialComplex.from_simplices([(0, 1)])
        (h0, h1) = reduce(FilteredComplex(c, [np.array([0, 0]), np.array([0])], [1.0]))
        assert h0.pairs.tolist() == [[1.0, -INF]]
        assert len(h1) == 0

    @pytest.mark.parametrize("seed", range(8))
    def test_euler_bookkeeping(self, seed):
        fc = build_filtered_rips(*random_filtration(seed))
        dgs = reduce(fc)
        c = fc.complex
        chi = sum((-1) ** k * c.n(k) for k in range(c.k_max + 1))
        assert chi == sum((-1) ** k * len(dg.essential()) for k, dg in enumerate(dgs))

    @pytest.mark.parametrize("seed", range(8))
    def test_final_step_matches_betti(self, seed):
        fc = build_filtered_rips(*random_filtration(seed))
        dgs = reduce(fc)
        for k in range(fc.k_max + 1):
            assert len(dgs[k].essential()) == betti(fc.complex, k)


class TestEngine:
    """The compiled Rips engine against the explicit reduction."""

    def test_triangle_example(self):
        pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]])
        # all vertices at level 0, edges enter at index 0 as well
        h0, h1 = rips_persistence(pts, [0, 0, 0], [2.0], 0.6, 2)
        assert h0.pairs.tolist() == [[2.0, -INF]]
        assert len(h1) == 0

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 2**31), n=st.integers(1, 16), n_levels=st.integers(1, 6),
           r=st.floats(0.05, 0.35))
    def test_matches_explicit(self, seed, n, n_levels, r):
        pts, values, levels, _, k_max = random_filtration(seed, n, n_levels)
        expected = reduce(build_filtered_rips(pts, values, levels, r, k_max))
        got = rips_persistence(pts, vertex_level_index(values, levels), levels, r, k_max)
        assert len(got) == k_max
        for k in range(k_max):
            assert got[k] == expected[k]

    def test_dense_cloud(self, rng):
        pts = rng.uniform(size=(60, 2))
        values = rng.uniform(size=60)
        levels = np.linspace(1, 0, 8)
        expected = reduce(build_filtered_rips(pts, values, levels, 0.18, 3))
        got = rips_persistence(pts, vertex_level_index(values, levels), levels, 0.18, 3)
        assert all(got[k] == expected[k] for k in range(3))

    def test_drops_unlevelled_vertices(self):
        pts = np.array([[0.0], [5.0]])
        (h0,) = rips_persistence(pts, [0, -1], [1.0], 0.5, 1)
        assert h0.pairs.tolist() == [[1.0, -INF]]

    def test_budget(self, rng):
        with pytest.raises(CapacityExceeded):
            rips_persistence(rng.uniform(size=(50, 2)), np.zeros(50, int), [1.0], 5.0, 3, budget=500)


class TestTsv:
    """Diagram text format."""

    def test_round_trip(self):
        dgs = [PersistenceDiagram(0, [(0.1 + 0.2, 0.1), (1.0, -INF)]), PersistenceDiagram(1, [(0.7, 0.3)])]
        parsed = parse_tsv(emit_tsv(dgs))
        assert parsed[0] == dgs[0] and parsed[1] == dgs[1]
        assert emit_tsv(list(parsed.values())) == emit_tsv(dgs)

    def test_format(self):
        assert emit_tsv([PersistenceDiagram(0, [(2.0, -INF)])]) == "0\t2.0\t-inf\n"

    @pytest.mark.parametrize(
        "text,line",
        [("0\t1.0\n", 1), ("0\t1\t0\n1\tx\t0\n", 2), ("0\t1\t2\n", 1), ("-1\t1\t0\n", 1), ("0\tinf\t0\n", 1),
         ("# c\n\n0\t1\tnan\n", 3)],
    )
    def test_parse_errors(self, text, line):
        with pytest.raises(ParseError) as info:
            parse_tsv(text)
        assert info.value.line == line
        assert str(info.value).startswith(f"line {line}:")

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 3), st.floats(-1e6, 1e6), st.floats(0, 1e3, exclude_min=True),
                              st.booleans()), max_size=12))
    def test_round_trip_property(self, rows):
        by_k = {}
        for k, b, gap, ess in rows:
            by_k.setdefault(k, []).append((b, -INF if ess else b - gap))
        dgs = [PersistenceDiagram(k, v) for k, v in sorted(by_k.items()) if all(p[0] > p[1] for p in v)]
        text = emit_tsv(dgs)
        assert emit_tsv(list(parse_tsv(text).values())) == text
